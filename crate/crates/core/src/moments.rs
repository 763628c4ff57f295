//! Exact moment counts.
//!
//! `I_ℓ(H,N)` counts 2ℓ-tuples from the window whose first ℓ sequence values
//! and last ℓ sequence values have the same product mod p; `J_ℓ(H,N)` is the
//! same with sums. With `c(v)` the window histogram (over indices for
//! products, over residues for sums) and `c^{*ℓ}` its ℓ-fold cyclic
//! convolution, both equal `Σ_v c^{*ℓ}(v)²`.
//!
//! The spectral moments `Σ_χ |T(χ)|^{2ℓ}` and `Σ_a |S(a)|^{2ℓ}` equal
//! `(p-1)·I_ℓ` and `p·J_ℓ` respectively (for f = 0), which ties the exact
//! integer route to the floating DFT route.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::convolution::{cyclic_power, Strategy};
use crate::error::{Error, Result};
use crate::field::{PrimeContext, Window};
use crate::spectrum::{additive_spectrum, multiplicative_spectrum, PhasePolynomial};

/// Arbitrary-precision nonnegative count.
pub type CountScalar = BigUint;

pub const MAX_ELL: u32 = 8;

pub(crate) fn check_ell(ell: u32) -> Result<()> {
    if (1..=MAX_ELL).contains(&ell) {
        Ok(())
    } else {
        Err(Error::EllOutOfRange(ell))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// length p-1, indexed by ind(u(n))
    Multiplicative,
    /// length p, indexed by u(n)
    Additive,
}

/// Occurrence counts of sequence values (or their indices) over a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueHistogram {
    pub domain: Domain,
    pub p: u64,
    pub counts: Vec<u64>,
}

impl ResidueHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Cells with nonzero count, as `(cell, count)`.
    pub fn support(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as u64, c))
    }
}

pub fn histogram(ctx: &PrimeContext, w: Window, domain: Domain) -> Result<ResidueHistogram> {
    let residues = ctx.sequence_residues(w)?;
    let counts = match domain {
        Domain::Multiplicative => {
            let mut counts = vec![0u64; ctx.group_order() as usize];
            for u in residues {
                counts[ctx.index_of(u) as usize] += 1;
            }
            counts
        }
        Domain::Additive => {
            let mut counts = vec![0u64; ctx.p() as usize];
            for u in residues {
                counts[u as usize] += 1;
            }
            counts
        }
    };
    Ok(ResidueHistogram {
        domain,
        p: ctx.p(),
        counts,
    })
}

/// ℓ-fold convolution of the window histogram in the given domain.
pub fn convolved_histogram(
    ctx: &PrimeContext,
    w: Window,
    ell: u32,
    domain: Domain,
    strategy: Strategy,
) -> Result<Vec<CountScalar>> {
    check_ell(ell)?;
    let hist = histogram(ctx, w, domain)?;
    cyclic_power(&hist.counts, ell, strategy)
}

fn sum_of_squares(cells: &[CountScalar]) -> CountScalar {
    cells.iter().map(|x| x * x).sum()
}

/// `I_ℓ(H,N)`.
pub fn count_product_collisions(ctx: &PrimeContext, w: Window, ell: u32) -> Result<CountScalar> {
    count_product_collisions_with(ctx, w, ell, Strategy::Auto)
}

pub fn count_product_collisions_with(
    ctx: &PrimeContext,
    w: Window,
    ell: u32,
    strategy: Strategy,
) -> Result<CountScalar> {
    let cells = convolved_histogram(ctx, w, ell, Domain::Multiplicative, strategy)?;
    Ok(sum_of_squares(&cells))
}

/// `J_ℓ(H,N)`.
pub fn count_sum_collisions(ctx: &PrimeContext, w: Window, ell: u32) -> Result<CountScalar> {
    count_sum_collisions_with(ctx, w, ell, Strategy::Auto)
}

pub fn count_sum_collisions_with(
    ctx: &PrimeContext,
    w: Window,
    ell: u32,
    strategy: Strategy,
) -> Result<CountScalar> {
    let cells = convolved_histogram(ctx, w, ell, Domain::Additive, strategy)?;
    Ok(sum_of_squares(&cells))
}

/// `Σ_χ |T(χ, f, H, N)|^{2ℓ}` over all p-1 characters.
pub fn multiplicative_moment(
    ctx: &PrimeContext,
    f: &PhasePolynomial,
    w: Window,
    ell: u32,
) -> Result<f64> {
    check_ell(ell)?;
    Ok(multiplicative_spectrum(ctx, f, w)?.power_sum(ell))
}

/// `Σ_a |S(a, H, N)|^{2ℓ}` over all p additive characters.
pub fn additive_moment(ctx: &PrimeContext, w: Window, ell: u32) -> Result<f64> {
    check_ell(ell)?;
    Ok(additive_spectrum(ctx, w)?.power_sum(ell))
}

/// Cauchy–Schwarz floor `(p-1)·I_ℓ ≥ N^{2ℓ}`, checked in integers.
pub fn satisfies_collision_floor(p: u64, n: u64, ell: u32, count: &CountScalar) -> bool {
    count * BigUint::from(p - 1) >= BigUint::from(n).pow(2 * ell)
}

/// Lossy conversion for reporting.
pub fn count_to_f64(x: &CountScalar) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MomentKind {
    I,
    J,
    T,
    S,
}

impl std::str::FromStr for MomentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "I" => Ok(MomentKind::I),
            "J" => Ok(MomentKind::J),
            "T" => Ok(MomentKind::T),
            "S" => Ok(MomentKind::S),
            other => Err(format!("unknown moment {other:?} (expected I, J, T or S)")),
        }
    }
}

/// One moment computation paired with its bound expression.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub p: u64,
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub ell: u32,
    pub which: MomentKind,
    /// exact decimal for I and J; shortest round-trip float for T and S
    pub count: String,
    pub bound_rhs: f64,
    pub ratio: f64,
}

/// Bound used in the report: `N^{2ℓ-1+2^{-ℓ}}` for I, `N^{2ℓ-1+1/(ℓ+1)}` for
/// J, and those multiplied by p-1 and p for the spectral moments T and S.
pub fn moment_report(
    ctx: &PrimeContext,
    w: Window,
    ell: u32,
    which: MomentKind,
    f: &PhasePolynomial,
) -> Result<MomentReport> {
    let n = w.len as f64;
    let l = ell as f64;
    let i_bound = n.powf(2.0 * l - 1.0 + 2f64.powi(-(ell as i32)));
    let j_bound = n.powf(2.0 * l - 1.0 + 1.0 / (l + 1.0));
    let p = ctx.p() as f64;
    let (count, lhs, rhs) = match which {
        MomentKind::I => {
            let c = count_product_collisions(ctx, w, ell)?;
            (c.to_string(), count_to_f64(&c), i_bound)
        }
        MomentKind::J => {
            let c = count_sum_collisions(ctx, w, ell)?;
            (c.to_string(), count_to_f64(&c), j_bound)
        }
        MomentKind::T => {
            let m = multiplicative_moment(ctx, f, w, ell)?;
            (format!("{m:?}"), m, (p - 1.0) * i_bound)
        }
        MomentKind::S => {
            let m = additive_moment(ctx, w, ell)?;
            (format!("{m:?}"), m, p * j_bound)
        }
    };
    Ok(MomentReport {
        p: ctx.p(),
        h: w.offset,
        n: w.len,
        ell,
        which,
        count,
        bound_rhs: rhs,
        ratio: lhs / rhs,
    })
}

/// True when every cell is zero.
pub fn all_zero(cells: &[CountScalar]) -> bool {
    cells.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SequenceKind;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p, SequenceKind::Factorial).unwrap()
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn histograms() {
        let h = histogram(&ctx(5), Window::new(0, 4), Domain::Additive).unwrap();
        assert_eq!(h.counts, vec![0, 2, 1, 0, 1]);
        let h = histogram(&ctx(5), Window::new(0, 4), Domain::Multiplicative).unwrap();
        assert_eq!(h.counts, vec![2, 1, 1, 0]);
        assert_eq!(h.total(), 4);
        let h = histogram(&ctx(7), Window::new(0, 1), Domain::Multiplicative).unwrap();
        assert_eq!(h.support().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn collision_counts() {
        let c5 = ctx(5);
        let w = Window::new(0, 4);
        assert_eq!(count_product_collisions(&c5, w, 1).unwrap(), big(6));
        assert_eq!(count_product_collisions(&c5, w, 2).unwrap(), big(70));
        assert_eq!(count_sum_collisions(&ctx(3), Window::new(0, 2), 1).unwrap(), big(2));
        assert_eq!(count_sum_collisions(&c5, w, 1).unwrap(), big(6));
        for ell in 1..=MAX_ELL {
            assert_eq!(count_product_collisions(&ctx(11), Window::new(4, 1), ell).unwrap(), big(1));
            assert_eq!(count_sum_collisions(&ctx(11), Window::new(4, 1), ell).unwrap(), big(1));
        }
    }

    #[test]
    fn ell_bounds() {
        let w = Window::new(0, 4);
        assert_eq!(count_product_collisions(&ctx(5), w, 0), Err(Error::EllOutOfRange(0)));
        assert_eq!(count_sum_collisions(&ctx(5), w, 9), Err(Error::EllOutOfRange(9)));
        assert!(multiplicative_moment(&ctx(5), &PhasePolynomial::zero(), w, 0).is_err());
    }

    #[test]
    fn spectral_moments() {
        let zero = PhasePolynomial::zero();
        let m = multiplicative_moment(&ctx(5), &zero, Window::new(0, 4), 1).unwrap();
        assert!((m - 24.0).abs() < 1e-9);
        let m = multiplicative_moment(&ctx(3), &zero, Window::new(0, 2), 1).unwrap();
        assert!((m - 4.0).abs() < 1e-9);
        let m = additive_moment(&ctx(3), Window::new(0, 2), 1).unwrap();
        assert!((m - 6.0).abs() < 1e-9);
        let m = additive_moment(&ctx(5), Window::new(0, 4), 1).unwrap();
        assert!((m - 30.0).abs() < 1e-9);
        let m = additive_moment(&ctx(13), Window::new(5, 1), 3).unwrap();
        assert!((m - 13.0).abs() < 1e-9);
    }

    #[test]
    fn moment_identities_small_primes() {
        let zero = PhasePolynomial::zero();
        for p in crate::field::odd_primes_between(3, 101) {
            let c = ctx(p);
            for w in [Window::full(p), Window::new(p / 3, p / 2)] {
                for ell in 1..=3 {
                    let i = count_to_f64(&count_product_collisions(&c, w, ell).unwrap());
                    let t = multiplicative_moment(&c, &zero, w, ell).unwrap();
                    assert!(((p - 1) as f64 * i - t).abs() <= 1e-6 * t, "p={p} ell={ell}");
                    let j = count_to_f64(&count_sum_collisions(&c, w, ell).unwrap());
                    let s = additive_moment(&c, w, ell).unwrap();
                    assert!((p as f64 * j - s).abs() <= 1e-6 * s, "p={p} ell={ell}");
                }
            }
        }
    }

    #[test]
    fn phase_only_lowers_the_moment() {
        let c = ctx(101);
        let w = Window::full(101);
        let f = PhasePolynomial::new(&[0, 5, 1], 101).unwrap();
        for ell in 1..=3 {
            let twisted = multiplicative_moment(&c, &f, w, ell).unwrap();
            let plain = multiplicative_moment(&c, &PhasePolynomial::zero(), w, ell).unwrap();
            assert!(twisted <= plain * (1.0 + 1e-9));
        }
    }

    #[test]
    fn floor_and_report() {
        let c = ctx(101);
        let w = Window::full(101);
        for ell in 1..=3 {
            let i = count_product_collisions(&c, w, ell).unwrap();
            assert!(satisfies_collision_floor(101, 100, ell, &i));
        }
        assert!(!satisfies_collision_floor(101, 100, 1, &big(99)));
        let r = moment_report(&ctx(5), Window::new(0, 4), 1, MomentKind::I, &PhasePolynomial::zero()).unwrap();
        assert_eq!(r.count, "6");
        assert!((r.bound_rhs - 8.0).abs() < 1e-12);
        assert!((r.ratio - 0.75).abs() < 1e-12);
    }
}
