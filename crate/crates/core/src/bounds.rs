//! Right-hand sides of the asymptotic bounds, evaluated with implied
//! constant 1 and natural logarithms, and paired with exactly computed
//! left-hand sides.
//!
//! For plain upper bounds the reported ratio is `lhs / rhs`. For asymptotic
//! formulas `lhs = main + O(err)` the bound value is `err` and the ratio is
//! `|lhs - main| / err`.

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::constructions::{count_q, nonresidue_spacings, v2_witness_count};
use crate::error::{Error, Result};
use crate::field::{totient, PrimeContext, SequenceKind, Window};
use crate::moments::{
    additive_moment, count_product_collisions, count_sum_collisions, count_to_f64, multiplicative_moment,
};
use crate::repcount::{
    binomial, discrepancy_from_table, fixed_sum_table, max_multiplicity, max_uniformity_deviation,
    representation_table,
};
use crate::spectrum::{max_incomplete_character_sum, multiplicative_spectrum, PhasePolynomial};
use crate::sweep::try_ordered_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `max_χ≠χ0 |T(χ,f,H,N)| ≪ N^{3/4} p^{1/8} (log p)^{1/4}`
    TIndividual,
    /// `Σ_χ |T(χ,f,H,N)|² ≪ p N^{3/2}`
    TSecondMoment,
    /// `Σ_a |S(a,H,N)|² ≪ p N^{3/2}`
    SSecondMoment,
    /// `I_ℓ ≪ N^{2ℓ-1+2^{-ℓ}}`
    IMoment,
    /// `I_ℓ = N^{2ℓ}/(p-1) + O(N^{3ℓ/2+r/2-1+2^{-r}} p^{(ℓ-r)/4} (log p)^{(ℓ-r)/2})`
    IAsymptotic,
    /// `F_ℓ(a) = N^ℓ/(p-1) + O(N^{3ℓ/4+r/2-1+2^{-r}} p^{(ℓ-2r)/8} (log p)^{(ℓ-2r)/4})`
    FUniform,
    /// `V_ℓ = p + O(N^{-ℓ/2+r/2-1+2^{-r}} p^{(ℓ-r+8)/4} (log p)^{(ℓ-r)/2})`
    VValueset,
    /// `D_ℓ ≪ N^{-ℓ/4+r/2-1+2^{-r}} p^{(ℓ-2r+4)/8} (log p)^{(ℓ-2r+4)/4}`
    DDiscrepancy,
    /// `G_ℓ(a,N) = C(N-1,ℓ-1)/(p-1) + O(N^{3ℓ/4} p^{(ℓ+6)/8} (log p)^{(ℓ-2)/4})`
    GFixedsum,
    /// `max_a F(a,H,N) ≪ N^{2/3}`
    FMax,
    /// `V_2(0,p-1) ≥ 5p/8 + O(p^{1/2} log² p)`
    V2Lower,
    /// `Σ_{j≤J} (-1)^{j-1} d_j ≪ J^{3/4} p^{1/8} (log p)^{1/4}`
    SpacingAltsum,
    /// `Q(H,N) = N φ(p-1)/(p-1) + O(N^{3/4} p^{1/8+ε})`
    QPrimroot,
    /// `max_χ≠χ0 max_{h≤k} |Σ_{c=h+1}^k χ(c)| ≪ p^{1/2} log p`
    PolyaVinogradov,
    /// `J_ℓ ≪ N^{2ℓ-1+1/(ℓ+1)}`
    JMoment,
}

impl BoundKind {
    pub const ALL: [BoundKind; 15] = [
        BoundKind::TIndividual,
        BoundKind::TSecondMoment,
        BoundKind::SSecondMoment,
        BoundKind::IMoment,
        BoundKind::IAsymptotic,
        BoundKind::FUniform,
        BoundKind::VValueset,
        BoundKind::DDiscrepancy,
        BoundKind::GFixedsum,
        BoundKind::FMax,
        BoundKind::V2Lower,
        BoundKind::SpacingAltsum,
        BoundKind::QPrimroot,
        BoundKind::PolyaVinogradov,
        BoundKind::JMoment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::TIndividual => "t_individual",
            BoundKind::TSecondMoment => "t_second_moment",
            BoundKind::SSecondMoment => "s_second_moment",
            BoundKind::IMoment => "i_moment",
            BoundKind::IAsymptotic => "i_asymptotic",
            BoundKind::FUniform => "f_uniform",
            BoundKind::VValueset => "v_valueset",
            BoundKind::DDiscrepancy => "d_discrepancy",
            BoundKind::GFixedsum => "g_fixedsum",
            BoundKind::FMax => "f_max",
            BoundKind::V2Lower => "v2_lower",
            BoundKind::SpacingAltsum => "spacing_altsum",
            BoundKind::QPrimroot => "q_primroot",
            BoundKind::PolyaVinogradov => "polya_vinogradov",
            BoundKind::JMoment => "j_moment",
        }
    }

    /// True for `lhs = main + O(err)` kinds.
    pub fn is_asymptotic(self) -> bool {
        matches!(
            self,
            BoundKind::IAsymptotic
                | BoundKind::FUniform
                | BoundKind::VValueset
                | BoundKind::GFixedsum
                | BoundKind::V2Lower
                | BoundKind::QPrimroot
        )
    }

    /// Default `(ℓ, r)` for sweeps.
    pub fn default_ell_r(self) -> (u32, u32) {
        match self {
            BoundKind::IAsymptotic => (4, 1),
            BoundKind::FUniform => (7, 1),
            BoundKind::VValueset => (2, 1),
            BoundKind::DDiscrepancy => (2, 1),
            BoundKind::GFixedsum => (2, 1),
            BoundKind::V2Lower => (2, 1),
            _ => (1, 1),
        }
    }
}

impl std::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BoundKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        let key = match key.as_str() {
            "t_secondmoment" => "t_second_moment",
            "s_secondmoment" => "s_second_moment",
            other => other,
        };
        BoundKind::ALL.into_iter().find(|k| k.name() == key).ok_or_else(|| {
            let names: Vec<&str> = BoundKind::ALL.iter().map(|k| k.name()).collect();
            format!("unknown bound kind {s:?} (expected one of {})", names.join(", "))
        })
    }
}

/// Parameters of a bound expression. Fields a kind does not use are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub ell: u32,
    pub r: u32,
    #[serde(rename = "J")]
    pub j: u64,
    pub eps: f64,
}

impl BoundParams {
    pub fn new(p: u64, n: u64) -> Self {
        BoundParams {
            p,
            n,
            ell: 1,
            r: 1,
            j: 1,
            eps: 0.01,
        }
    }
}

fn violation(kind: BoundKind, reason: String) -> Error {
    Error::DomainViolation {
        kind: kind.name(),
        reason,
    }
}

fn check_domain(kind: BoundKind, q: &BoundParams) -> Result<()> {
    let fail = |reason: String| Err(violation(kind, reason));
    if q.p < 3 {
        return fail(format!("p = {} must be an odd prime", q.p));
    }
    let needs_window = !matches!(kind, BoundKind::SpacingAltsum | BoundKind::PolyaVinogradov | BoundKind::V2Lower);
    if needs_window && (q.n == 0 || q.n >= q.p) {
        return fail(format!("N = {} must satisfy 1 <= N < p = {}", q.n, q.p));
    }
    let (ell, r) = (q.ell, q.r);
    match kind {
        BoundKind::IMoment | BoundKind::JMoment if ell == 0 => fail("ell must be at least 1".into()),
        BoundKind::IAsymptotic | BoundKind::VValueset if !(ell >= r && r >= 1) => {
            fail(format!("requires ell >= r >= 1, got ell = {ell}, r = {r}"))
        }
        BoundKind::FUniform | BoundKind::DDiscrepancy if !(ell >= 2 * r && r >= 1) => {
            fail(format!("requires ell >= 2r >= 1, got ell = {ell}, r = {r}"))
        }
        BoundKind::GFixedsum if ell == 0 || q.n.saturating_mul(ell as u64) >= q.p => fail(format!(
            "requires ell >= 1 and 1 <= N < p/ell, got N = {}, ell = {ell}, p = {}",
            q.n, q.p
        )),
        BoundKind::SpacingAltsum => {
            let pf = q.p as f64;
            let lo = pf.sqrt() * pf.ln();
            if (q.j as f64) < lo || q.j > (q.p - 1) / 2 {
                fail(format!(
                    "requires p^(1/2) log p <= J <= (p-1)/2, got J = {} with bounds [{lo:.2}, {}]",
                    q.j,
                    (q.p - 1) / 2
                ))
            } else {
                Ok(())
            }
        }
        BoundKind::QPrimroot if q.eps <= 0.0 => fail(format!("eps must be positive, got {}", q.eps)),
        _ => Ok(()),
    }
}

/// The bound expression (the error term for asymptotic kinds).
pub fn eval_bound(kind: BoundKind, q: &BoundParams) -> Result<f64> {
    check_domain(kind, q)?;
    let p = q.p as f64;
    let n = q.n as f64;
    let l = q.ell as f64;
    let r = q.r as f64;
    let lg = p.ln();
    let two_r = 2f64.powf(-r);
    Ok(match kind {
        BoundKind::TIndividual => n.powf(0.75) * p.powf(0.125) * lg.powf(0.25),
        BoundKind::TSecondMoment | BoundKind::SSecondMoment => p * n.powf(1.5),
        BoundKind::IMoment => n.powf(2.0 * l - 1.0 + 2f64.powf(-l)),
        BoundKind::IAsymptotic => {
            n.powf(1.5 * l + r / 2.0 - 1.0 + two_r) * p.powf((l - r) / 4.0) * lg.powf((l - r) / 2.0)
        }
        BoundKind::FUniform => {
            n.powf(0.75 * l + r / 2.0 - 1.0 + two_r) * p.powf((l - 2.0 * r) / 8.0) * lg.powf((l - 2.0 * r) / 4.0)
        }
        BoundKind::VValueset => {
            n.powf(-l / 2.0 + r / 2.0 - 1.0 + two_r) * p.powf((l - r + 8.0) / 4.0) * lg.powf((l - r) / 2.0)
        }
        BoundKind::DDiscrepancy => {
            n.powf(-l / 4.0 + r / 2.0 - 1.0 + two_r)
                * p.powf((l - 2.0 * r + 4.0) / 8.0)
                * lg.powf((l - 2.0 * r + 4.0) / 4.0)
        }
        BoundKind::GFixedsum => n.powf(0.75 * l) * p.powf((l + 6.0) / 8.0) * lg.powf((l - 2.0) / 4.0),
        BoundKind::FMax => n.powf(2.0 / 3.0),
        BoundKind::V2Lower => p.sqrt() * lg * lg,
        BoundKind::SpacingAltsum => (q.j as f64).powf(0.75) * p.powf(0.125) * lg.powf(0.25),
        BoundKind::QPrimroot => n.powf(0.75) * p.powf(0.125 + q.eps),
        BoundKind::PolyaVinogradov => p.sqrt() * lg,
        BoundKind::JMoment => n.powf(2.0 * l - 1.0 + 1.0 / (l + 1.0)),
    })
}

/// Main term of an asymptotic kind.
pub fn main_term(kind: BoundKind, q: &BoundParams) -> Option<f64> {
    let p = q.p as f64;
    let n = q.n as f64;
    Some(match kind {
        BoundKind::IAsymptotic => n.powi(2 * q.ell as i32) / (p - 1.0),
        BoundKind::FUniform => n.powi(q.ell as i32) / (p - 1.0),
        BoundKind::VValueset => p,
        BoundKind::GFixedsum => binomial(q.n - 1, q.ell as u64 - 1).to_f64()? / (p - 1.0),
        BoundKind::V2Lower => 0.625 * p,
        BoundKind::QPrimroot => n * totient(q.p - 1) as f64 / (p - 1.0),
        _ => return None,
    })
}

/// One left-hand side paired with its bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub p: u64,
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub ell: u32,
    pub r: u32,
    /// exact decimal for integer quantities, shortest round-trip float
    /// otherwise; for F_uniform, G_fixedsum and D the maximum over a
    pub lhs: String,
    pub main_term: Option<f64>,
    pub rhs: f64,
    pub ratio: f64,
}

/// Sweep parameters shared by every prime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepParams {
    pub ell: u32,
    pub r: u32,
    /// J for the spacing kind; `None` means (p-1)/2
    #[serde(rename = "J")]
    pub j: Option<u64>,
    pub eps: f64,
}

impl SweepParams {
    pub fn for_kind(kind: BoundKind) -> Self {
        let (ell, r) = kind.default_ell_r();
        SweepParams {
            ell,
            r,
            j: None,
            eps: 0.01,
        }
    }
}

/// Window length used for a prime: the full window `(0, p-1)`, except the
/// fixed-sum kind, which takes the largest N with `N·ℓ < p`.
pub fn sweep_length(kind: BoundKind, p: u64, ell: u32) -> u64 {
    match kind {
        BoundKind::GFixedsum => (p - 1) / ell.max(1) as u64,
        _ => p - 1,
    }
}

fn float(x: f64) -> String {
    format!("{x:?}")
}

/// Exact left-hand side for one prime and its report.
pub fn bound_report(kind: BoundKind, p: u64, sp: &SweepParams) -> Result<BoundReport> {
    let ctx = PrimeContext::new(p, SequenceKind::Factorial)?;
    let n = sweep_length(kind, p, sp.ell);
    let w = Window::new(0, n);
    let q = BoundParams {
        p,
        n,
        ell: sp.ell,
        r: sp.r,
        j: sp.j.unwrap_or((p - 1) / 2),
        eps: sp.eps,
    };
    let rhs = eval_bound(kind, &q)?;
    let main = main_term(kind, &q);
    let zero = PhasePolynomial::zero();

    let (lhs, value): (String, f64) = match kind {
        BoundKind::TIndividual => {
            let s = multiplicative_spectrum(&ctx, &zero, w)?;
            let m = s.values[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
            (float(m), m)
        }
        BoundKind::TSecondMoment => {
            let m = multiplicative_moment(&ctx, &zero, w, 1)?;
            (float(m), m)
        }
        BoundKind::SSecondMoment => {
            let m = additive_moment(&ctx, w, 1)?;
            (float(m), m)
        }
        BoundKind::IMoment | BoundKind::IAsymptotic => {
            let c = count_product_collisions(&ctx, w, sp.ell)?;
            (c.to_string(), count_to_f64(&c))
        }
        BoundKind::JMoment => {
            let c = count_sum_collisions(&ctx, w, sp.ell)?;
            (c.to_string(), count_to_f64(&c))
        }
        BoundKind::FUniform => {
            let t = representation_table(&ctx, w, sp.ell)?;
            let dev = max_uniformity_deviation(&ctx, &t);
            (float(dev), dev)
        }
        BoundKind::VValueset => {
            let v = representation_table(&ctx, w, sp.ell)?.support_size();
            (v.to_string(), v as f64)
        }
        BoundKind::DDiscrepancy => {
            let t = representation_table(&ctx, w, sp.ell)?;
            let mut best = 0.0f64;
            for a in 1..p {
                best = best.max(discrepancy_from_table(&ctx, &t, a)?.d);
            }
            (float(best), best)
        }
        BoundKind::GFixedsum => {
            let table = fixed_sum_table(&ctx, n, sp.ell, false)?;
            let total = num_bigint::BigInt::from(binomial(n - 1, sp.ell as u64 - 1));
            let order = num_bigint::BigInt::from(p - 1);
            let worst = table[1..]
                .iter()
                .map(|g| (num_bigint::BigInt::from(g.clone()) * &order - &total).abs())
                .max()
                .unwrap_or_default();
            let dev = worst.to_f64().unwrap_or(f64::INFINITY) / (p - 1) as f64;
            (float(dev), dev)
        }
        BoundKind::FMax => {
            let (_, c) = max_multiplicity(&ctx, w)?;
            (c.to_string(), c as f64)
        }
        BoundKind::V2Lower => {
            let r = v2_witness_count(&ctx)?;
            (r.v2.to_string(), r.v2 as f64)
        }
        BoundKind::SpacingAltsum => {
            let s = nonresidue_spacings(&ctx, q.j)?;
            (s.alt_sum.to_string(), s.alt_sum.unsigned_abs() as f64)
        }
        BoundKind::QPrimroot => {
            let c = count_q(&ctx, w)?;
            (c.to_string(), c as f64)
        }
        BoundKind::PolyaVinogradov => {
            let m = max_incomplete_character_sum(&ctx);
            (float(m), m)
        }
    };
    let ratio = match (kind, main) {
        // F_uniform and G_fixedsum already report the deviation from the main term
        (BoundKind::FUniform | BoundKind::GFixedsum, _) => value / rhs,
        (_, Some(m)) => (value - m).abs() / rhs,
        (_, None) => value / rhs,
    };
    Ok(BoundReport {
        kind,
        p,
        h: 0,
        n,
        ell: sp.ell,
        r: sp.r,
        lhs,
        main_term: main,
        rhs,
        ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub kind: BoundKind,
    pub reports: Vec<BoundReport>,
    pub max_ratio: f64,
    /// prime attaining the maximum ratio (the smallest on ties)
    pub argmax_p: Option<u64>,
}

/// One report per prime, in the order given.
pub fn ratio_sweep(kind: BoundKind, primes: &[u64], sp: &SweepParams, jobs: usize) -> Result<SweepReport> {
    let reports = try_ordered_map(primes, jobs, |&p| bound_report(kind, p, sp))?;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax_p = None;
    for r in &reports {
        if r.ratio > max_ratio {
            max_ratio = r.ratio;
            argmax_p = Some(r.p);
        }
    }
    Ok(SweepReport {
        kind,
        reports,
        max_ratio,
        argmax_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::odd_primes_between;

    fn params(p: u64, n: u64, ell: u32, r: u32) -> BoundParams {
        BoundParams {
            ell,
            r,
            ..BoundParams::new(p, n)
        }
    }

    #[test]
    fn examples() {
        let b = eval_bound(BoundKind::IMoment, &params(101, 16, 1, 1)).unwrap();
        assert!((b - 64.0).abs() < 1e-9);
        let b = eval_bound(BoundKind::IMoment, &params(101, 16, 2, 1)).unwrap();
        assert!((b - 8192.0).abs() < 1e-6);
        let b = eval_bound(BoundKind::FMax, &params(1009, 1000, 1, 1)).unwrap();
        assert!((b - 100.0).abs() < 1e-9);
    }

    #[test]
    fn domains() {
        let err = eval_bound(BoundKind::FUniform, &params(101, 100, 3, 2)).unwrap_err();
        assert!(matches!(err, Error::DomainViolation { kind: "f_uniform", .. }));
        assert!(eval_bound(BoundKind::IAsymptotic, &params(101, 100, 1, 2)).is_err());
        assert!(eval_bound(BoundKind::GFixedsum, &params(101, 60, 2, 1)).is_err());
        assert!(eval_bound(BoundKind::GFixedsum, &params(101, 50, 2, 1)).is_ok());
        assert!(eval_bound(BoundKind::IMoment, &params(101, 101, 1, 1)).is_err());
        let q = BoundParams { j: 10, ..BoundParams::new(101, 100) };
        assert!(eval_bound(BoundKind::SpacingAltsum, &q).is_err());
        let q = BoundParams { j: 50, ..BoundParams::new(101, 100) };
        assert!(eval_bound(BoundKind::SpacingAltsum, &q).is_ok());
    }

    #[test]
    fn monotone_in_n() {
        for kind in BoundKind::ALL {
            let (ell, r) = kind.default_ell_r();
            let p = 10_007;
            let values: Vec<f64> = (1..200u64)
                .map(|k| k * 10)
                .filter_map(|n| {
                    let q = BoundParams { j: 2000, ..params(p, n, ell, r) };
                    eval_bound(kind, &q).ok()
                })
                .collect();
            let up = values.windows(2).all(|w| w[1] >= w[0]);
            let down = values.windows(2).all(|w| w[1] <= w[0]);
            assert!(up || down, "{kind}");
        }
    }

    #[test]
    fn names_round_trip() {
        for kind in BoundKind::ALL {
            assert_eq!(kind.name().parse::<BoundKind>().unwrap(), kind);
        }
        assert_eq!("T_secondmoment".parse::<BoundKind>().unwrap(), BoundKind::TSecondMoment);
        assert!("nope".parse::<BoundKind>().is_err());
    }

    #[test]
    fn every_kind_reports() {
        for kind in BoundKind::ALL {
            let sp = SweepParams::for_kind(kind);
            let r = bound_report(kind, 211, &sp).unwrap();
            assert!(r.ratio.is_finite() && r.ratio >= 0.0, "{kind}: {r:?}");
            assert_eq!(r.main_term.is_some(), kind.is_asymptotic());
        }
    }

    #[test]
    fn sweep_is_ordered_and_floors_hold() {
        let primes = odd_primes_between(101, 400);
        let sp = SweepParams::for_kind(BoundKind::IMoment);
        let serial = ratio_sweep(BoundKind::IMoment, &primes, &sp, 1).unwrap();
        let parallel = ratio_sweep(BoundKind::IMoment, &primes, &sp, 4).unwrap();
        assert_eq!(serial, parallel);
        for r in &serial.reports {
            let count: num_bigint::BigUint = r.lhs.parse().unwrap();
            assert!(crate::moments::satisfies_collision_floor(r.p, r.n, 1, &count));
        }
        assert!(serial.max_ratio > 0.0);
    }
}
