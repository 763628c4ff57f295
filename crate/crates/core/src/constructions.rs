//! Explicit constructions and scans: Wilson-type representations, primitive
//! roots among factorials, power-residue classes, quadratic-nonresidue
//! spacings, the witness congruence behind the lower bound for `V_2`, the
//! scan for primes with pairwise distinct factorial residues, and short
//! representations `a ≡ n_1!⋯n_ℓ!`.

use std::f64::consts::E;

use num_integer::gcd;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{factorial_table, is_prime, mul_mod, totient, PrimeContext, SequenceKind, Window};
use crate::moments::check_ell;
use crate::repcount::{representation_table, value_set_size};

fn check_unit(p: u64, what: &'static str, x: u64) -> Result<()> {
    if x == 0 || x >= p {
        return Err(Error::OutOfRange {
            what,
            value: x,
            expected: format!("1..={}", p - 1),
        });
    }
    Ok(())
}

/// `b!·(p-1-b)! mod p` from a table of factorial residues, checked against
/// `(-1)^{b+1}`.
fn wilson_pair_in(fact: &[u64], p: u64, b: u64) -> Result<u64> {
    check_unit(p, "b", b)?;
    let value = mul_mod(fact[b as usize], fact[(p - 1 - b) as usize], p);
    let expected = if b % 2 == 1 { 1 } else { p - 1 };
    if value != expected {
        return Err(Error::Inconsistency(format!(
            "b!(p-1-b)! = {value} but (-1)^(b+1) = {expected} for p={p}, b={b}"
        )));
    }
    Ok(value)
}

/// `b!·(p-1-b)! mod p`, which equals `(-1)^{b+1}`.
///
/// Always uses factorials, whatever the sequence kind of the context.
pub fn wilson_pair(ctx: &PrimeContext, b: u64) -> Result<u64> {
    wilson_pair_in(&factorial_table(ctx.p()), ctx.p(), b)
}

/// Checks the pair identity for every `b` in `1..p`; returns the number of
/// values checked.
pub fn wilson_pair_all(ctx: &PrimeContext) -> Result<u64> {
    let p = ctx.p();
    let fact = factorial_table(p);
    for b in 1..p {
        wilson_pair_in(&fact, p, b)?;
    }
    Ok(p - 1)
}

/// `a ≡ ((p-1)!)^{r_b}·(b-1)!·(p-1-b)!` with `b ≡ a^{-1}` and
/// `r_b ≡ b+1 (mod 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WilsonWitness {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub r_b: u8,
    /// the arguments n of the factorials n! in the product
    pub factors: Vec<u64>,
    /// the product of the factorials modulo p
    pub product: u64,
}

impl WilsonWitness {
    pub fn render(&self) -> String {
        let terms: Vec<String> = self.factors.iter().map(|n| format!("{n}!")).collect();
        format!("{} = {} (mod {})", terms.join(" * "), self.product, self.p)
    }
}

fn wilson_representation_in(ctx: &PrimeContext, fact: &[u64], a: u64) -> Result<WilsonWitness> {
    let p = ctx.p();
    check_unit(p, "a", a)?;
    let b = ctx.inverse(a)?;
    let r_b = ((b + 1) % 2) as u8;
    let mut factors = Vec::with_capacity(3);
    if r_b == 1 {
        factors.push(p - 1);
    }
    factors.push(b - 1);
    factors.push(p - 1 - b);
    let product = factors.iter().fold(1, |acc, &n| mul_mod(acc, fact[n as usize], p));
    if product != a {
        return Err(Error::Inconsistency(format!(
            "witness for a={a} mod {p} multiplies to {product}"
        )));
    }
    Ok(WilsonWitness {
        p,
        a,
        b,
        r_b,
        factors,
        product,
    })
}

/// Three-factorial witness for `a`, validated by multiplication.
pub fn wilson_representation(ctx: &PrimeContext, a: u64) -> Result<WilsonWitness> {
    wilson_representation_in(ctx, &factorial_table(ctx.p()), a)
}

/// Witnesses for every `a` in `1..p`.
pub fn wilson_witnesses(ctx: &PrimeContext) -> Result<Vec<WilsonWitness>> {
    let fact = factorial_table(ctx.p());
    (1..ctx.p()).map(|a| wilson_representation_in(ctx, &fact, a)).collect()
}

/// Spacings of the first J quadratic nonresidues and the two sides of
/// `Σ_{j≤J} (-1)^{j-1} d_j = Σ_{n<n_J} (n!/p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpacingReport {
    pub p: u64,
    #[serde(rename = "J")]
    pub j: u64,
    /// nonresidues n_1 < … < n_J
    pub nonresidues: Vec<u64>,
    /// d_j = n_j - n_{j-1}, n_0 = 0
    pub d: Vec<u64>,
    pub alt_sum: i64,
    pub legendre_sum: i64,
}

impl SpacingReport {
    pub fn identity_holds(&self) -> bool {
        self.alt_sum == self.legendre_sum
    }
}

/// Uses the sign `(-1)^{j-1}`; the opposite sign convention negates both
/// sides.
pub fn nonresidue_spacings(ctx: &PrimeContext, j: u64) -> Result<SpacingReport> {
    let p = ctx.p();
    let max = (p - 1) / 2;
    if j == 0 || j > max {
        return Err(Error::JOutOfRange { j, max });
    }
    let nonresidues: Vec<u64> = (1..p).filter(|&n| ctx.legendre(n) == -1).take(j as usize).collect();
    let mut d = Vec::with_capacity(nonresidues.len());
    let mut prev = 0;
    let mut alt_sum = 0i64;
    for (i, &n) in nonresidues.iter().enumerate() {
        let step = n - prev;
        d.push(step);
        alt_sum += if i % 2 == 0 { step as i64 } else { -(step as i64) };
        prev = n;
    }
    let fact = factorial_table(p);
    let legendre_sum = (0..prev).map(|n| ctx.legendre(fact[n as usize]) as i64).sum();
    Ok(SpacingReport {
        p,
        j,
        nonresidues,
        d,
        alt_sum,
        legendre_sum,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitiveRootFactorial {
    pub p: u64,
    /// smallest n with u(n) a primitive root, if any n in 1..p-1 qualifies
    pub n: Option<u64>,
    /// n / p^{1/2}
    pub ratio_sqrt_p: Option<f64>,
}

/// Smallest `n ≥ 1` in the nonvanishing range with `u(n)` a primitive root.
pub fn find_primroot_factorial(ctx: &PrimeContext) -> PrimitiveRootFactorial {
    let p = ctx.p();
    let last = ctx.kind().last_nonzero(p);
    let n = if last == 0 {
        None
    } else {
        ctx.sequence_residues(Window::new(0, last))
            .expect("the nonvanishing range is a valid window")
            .into_iter()
            .position(|u| ctx.is_primitive_root(u))
            .map(|i| i as u64 + 1)
    };
    PrimitiveRootFactorial {
        p,
        n,
        ratio_sqrt_p: n.map(|n| n as f64 / (p as f64).sqrt()),
    }
}

/// Count of `n` in the window with `u(n)` a primitive root.
pub fn count_q(ctx: &PrimeContext, w: Window) -> Result<u64> {
    Ok(ctx
        .sequence_residues(w)?
        .into_iter()
        .filter(|&u| ctx.is_primitive_root(u))
        .count() as u64)
}

/// Count of `n` in the window with `u(n), …, u(n+m-1)` all primitive roots.
///
/// Only the window itself must be valid. Terms past the nonvanishing range
/// are ≡ 0 and never primitive roots, so they simply fail the test.
pub fn count_qm(ctx: &PrimeContext, m: u64, w: Window) -> Result<u64> {
    if m == 0 {
        return Err(Error::OutOfRange {
            what: "m",
            value: 0,
            expected: "m >= 1".into(),
        });
    }
    ctx.check_window(w)?;
    let residues = ctx.extended_residues(w.first(), w.last() + m - 1)?;
    let ok: Vec<bool> = residues.iter().map(|&u| u != 0 && ctx.is_primitive_root(u)).collect();
    Ok(ok.windows(m as usize).filter(|run| run.iter().all(|&b| b)).count() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitiveRootCount {
    pub p: u64,
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub m: u64,
    pub count: u64,
    /// N·(φ(p-1)/(p-1))^m
    pub main_term: f64,
}

pub fn primroot_count_report(ctx: &PrimeContext, m: u64, w: Window) -> Result<PrimitiveRootCount> {
    let count = count_qm(ctx, m, w)?;
    let density = totient(ctx.group_order()) as f64 / ctx.group_order() as f64;
    Ok(PrimitiveRootCount {
        p: ctx.p(),
        h: w.offset,
        n: w.len,
        m,
        count,
        main_term: w.len as f64 * density.powi(m as i32),
    })
}

/// `T(R, H, N)`: count of `n` in the window such that, for each prime
/// `q | p-1`, `u(n)` is a q-th power residue exactly when `q ∈ R`.
pub fn classify_power_residues(ctx: &PrimeContext, r: &[u64], w: Window) -> Result<u64> {
    let primes = ctx.order_divisors();
    if let Some(&bad) = r.iter().find(|q| !primes.contains(q)) {
        return Err(Error::InvalidSubset(bad));
    }
    let indices = ctx.sequence_indices(w)?;
    Ok(indices
        .into_iter()
        .filter(|k| primes.iter().all(|q| (k % q == 0) == r.contains(q)))
        .count() as u64)
}

/// Main term `N·Π_{q∈R} 1/q · Π_{q∉R} (q-1)/q` for `T(R,H,N)`; the q-th
/// powers are the indices divisible by q, a 1/q share.
pub fn power_class_main_term(ctx: &PrimeContext, r: &[u64], n: u64) -> f64 {
    ctx.order_divisors().iter().fold(n as f64, |acc, &q| {
        let q = q as f64;
        if r.contains(&(q as u64)) {
            acc / q
        } else {
            acc * (q - 1.0) / q
        }
    })
}

/// Witness count behind the lower bound `V_2(0,p-1) ≥ (p-1)/2 + W/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct V2Report {
    pub p: u64,
    /// solutions of 2u(2u+1) ≡ 2v (mod p), 0 ≤ u,v ≤ (p-3)/2
    #[serde(rename = "W")]
    pub w: u64,
    /// (p-1)/2 + W/2
    pub derived_bound: f64,
    #[serde(rename = "V2")]
    pub v2: u64,
    /// W / (p/4)
    pub w_ratio: f64,
    /// 0.625·p - 6·p^{1/2}·ln²p
    pub floor: f64,
    /// (V2 - 5p/8) / (p^{1/2} ln²p)
    pub normalized_excess: f64,
}

impl V2Report {
    /// `(p-1)/2 + W/2 ≤ V_2`, compared in integers.
    pub fn derived_bound_holds(&self) -> bool {
        self.p - 1 + self.w <= 2 * self.v2
    }
}

/// Exact W by enumeration: for each u the congruence fixes v ≡ u(2u+1).
pub fn witness_count_w(p: u64) -> u64 {
    let top = (p - 3) / 2;
    (0..=top)
        .filter(|&u| mul_mod(u, (2 * u + 1) % p, p) <= top)
        .count() as u64
}

pub fn v2_witness_count(ctx: &PrimeContext) -> Result<V2Report> {
    let p = ctx.p();
    let w = witness_count_w(p);
    let v2 = value_set_size(ctx, Window::full(p), 2)?;
    let pf = p as f64;
    let err = pf.sqrt() * pf.ln().powi(2);
    Ok(V2Report {
        p,
        w,
        derived_bound: (pf - 1.0) / 2.0 + w as f64 / 2.0,
        v2,
        w_ratio: w as f64 / (pf / 4.0),
        floor: 0.625 * pf - 6.0 * err,
        normalized_excess: (v2 as f64 - 0.625 * pf) / err,
    })
}

/// Whether `2!, …, (p-1)!` are pairwise distinct modulo p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistinctScanRecord {
    pub p: u64,
    pub is_distinct: bool,
    /// the residue in 1..p not attained, when distinct
    pub missing_residue: Option<u64>,
    /// missing ≡ -((p-1)/2)! and p ≡ 5 (mod 8), when distinct
    pub matches_prediction: Option<bool>,
}

pub fn distinct_record(p: u64) -> DistinctScanRecord {
    let fact = factorial_table(p);
    let mut seen = vec![false; p as usize];
    let mut is_distinct = true;
    for &f in &fact[2..] {
        if std::mem::replace(&mut seen[f as usize], true) {
            is_distinct = false;
            break;
        }
    }
    let (missing_residue, matches_prediction) = if is_distinct {
        let missing = (1..p).find(|&x| !seen[x as usize]);
        let predicted = (p - fact[((p - 1) / 2) as usize]) % p;
        (missing, Some(missing == Some(predicted) && p % 8 == 5))
    } else {
        (None, None)
    };
    DistinctScanRecord {
        p,
        is_distinct,
        missing_residue,
        matches_prediction,
    }
}

/// Primes in `[lo, hi]`, ascending.
pub fn scan_primes(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if lo < 3 || lo > hi {
        return Err(Error::BadRange { lo, hi });
    }
    Ok((lo..=hi).filter(|&n| n % 2 == 1 && is_prime(n)).collect())
}

/// One record per prime in `[lo, hi]`, ascending.
pub fn distinct_factorial_scan(lo: u64, hi: u64) -> Result<Vec<DistinctScanRecord>> {
    Ok(scan_primes(lo, hi)?.into_iter().map(distinct_record).collect())
}

/// Lexicographically smallest ℓ-tuple `(n_1, …, n_ℓ)` with `1 ≤ n_i ≤ M`
/// and `Π u(n_i) ≡ a`, or `None`.
///
/// Reachability of each residue by k-fold products (`F_k > 0` over the
/// window `(0, M)`) is taken from the representation tables for
/// `k < ℓ`; the tuple is then fixed one coordinate at a time, always taking
/// the smallest `n_i` whose remaining quotient is reachable by the
/// remaining factors.
pub fn search_representation(ctx: &PrimeContext, a: u64, ell: u32, max_n: u64) -> Result<Option<Vec<u64>>> {
    let p = ctx.p();
    check_unit(p, "a", a)?;
    check_ell(ell)?;
    if max_n == 0 || max_n >= p {
        return Err(Error::OutOfRange {
            what: "M",
            value: max_n,
            expected: format!("1..={}", p - 1),
        });
    }
    let w = Window::new(0, max_n);
    let order = ctx.group_order();
    let steps = ctx.sequence_indices(w)?;

    // reach[k][i]: index i is a k-fold product
    let mut reach: Vec<Vec<bool>> = Vec::with_capacity(ell as usize);
    let mut unit = vec![false; order as usize];
    unit[0] = true;
    reach.push(unit);
    for k in 1..ell {
        let t = representation_table(ctx, w, k)?;
        reach.push(t.index_domain(ctx).iter().map(|c| !c.is_zero()).collect());
    }

    let mut target = ctx.index_of(a);
    let mut tuple = Vec::with_capacity(ell as usize);
    for remaining in (0..ell as usize).rev() {
        let pick = steps
            .iter()
            .position(|&s| reach[remaining][((target + order - s) % order) as usize]);
        match pick {
            Some(i) => {
                tuple.push(i as u64 + 1);
                target = (target + order - steps[i]) % order;
            }
            None => return Ok(None),
        }
    }
    let residues = ctx.sequence_residues(w)?;
    let product = tuple.iter().fold(1, |acc, &n| mul_mod(acc, residues[n as usize - 1], p));
    if product != a {
        return Err(Error::Inconsistency(format!(
            "representation {tuple:?} multiplies to {product}, not {a}"
        )));
    }
    Ok(Some(tuple))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuyRow {
    pub p: u64,
    #[serde(rename = "V1")]
    pub v1: u64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuyReport {
    pub rows: Vec<GuyRow>,
    pub count: usize,
    pub mean: f64,
    pub std_dev: f64,
    /// 1 - 1/e
    pub target: f64,
    pub mean_minus_target: f64,
}

/// `V_1(0, p-1)/p` for the factorial sequence.
pub fn guy_row(p: u64) -> GuyRow {
    let mut seen = vec![false; p as usize];
    for &f in &factorial_table(p)[1..] {
        seen[f as usize] = true;
    }
    let v1 = seen.iter().filter(|&&s| s).count() as u64;
    GuyRow {
        p,
        v1,
        ratio: v1 as f64 / p as f64,
    }
}

pub fn guy_summary(rows: Vec<GuyRow>) -> GuyReport {
    let count = rows.len();
    let (mean, std_dev) = if count == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let n = count as f64;
        let mean = rows.iter().map(|r| r.ratio).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r.ratio - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    };
    let target = 1.0 - 1.0 / E;
    GuyReport {
        rows,
        count,
        mean,
        std_dev,
        target,
        mean_minus_target: mean - target,
    }
}

pub fn guy_f11_report(primes: &[u64]) -> Result<GuyReport> {
    for &p in primes {
        PrimeContext::new(p, SequenceKind::Factorial)?;
    }
    Ok(guy_summary(primes.iter().map(|&p| guy_row(p)).collect()))
}

/// Residues `gcd(ind(u(n)), p-1)` for the window; `1` marks a primitive root.
pub fn index_gcds(ctx: &PrimeContext, w: Window) -> Result<Vec<u64>> {
    Ok(ctx
        .sequence_indices(w)?
        .into_iter()
        .map(|k| gcd(k, ctx.group_order()))
        .collect())
}
