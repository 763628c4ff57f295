//! Representation counts `F_ℓ(a,H,N)`, value sets `V_ℓ`, fixed-sum counts
//! `G_ℓ(a,N)`, the largest single-value multiplicity, the discrepancy of the
//! scaled product sequence and its exponential sums.

use std::ops::AddAssign;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::convolution::{cyclic_convolution, cyclic_power, Strategy};
use crate::dft::{unit_root, CompensatedComplex};
use crate::error::{Error, Result};
use crate::field::{PrimeContext, Window};
use crate::moments::{check_ell, histogram, CountScalar, Domain};
use crate::spectrum::ComplexSum;

/// `F_ℓ(a, H, N)` for every residue a.
///
/// `a = 0` is never reached because in-window sequence values are units;
/// its entry is kept at zero so the table can be indexed by residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationTable {
    pub p: u64,
    pub ell: u32,
    pub window: Window,
    values: Vec<CountScalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub p: u64,
    pub a: u64,
    #[serde(rename = "F_ell")]
    pub f_ell: String,
}

impl RepresentationTable {
    fn from_index_domain(ctx: &PrimeContext, w: Window, ell: u32, by_index: Vec<CountScalar>) -> Self {
        let mut values = vec![BigUint::zero(); ctx.p() as usize];
        for (k, v) in by_index.into_iter().enumerate() {
            values[ctx.power(k as u64) as usize] = v;
        }
        RepresentationTable {
            p: ctx.p(),
            ell,
            window: w,
            values,
        }
    }

    pub fn get(&self, a: u64) -> &CountScalar {
        &self.values[(a % self.p) as usize]
    }

    /// Values indexed by residue; entry 0 is always zero.
    pub fn values(&self) -> &[CountScalar] {
        &self.values
    }

    /// Values indexed by discrete logarithm.
    pub fn index_domain(&self, ctx: &PrimeContext) -> Vec<CountScalar> {
        (0..ctx.group_order())
            .map(|k| self.values[ctx.power(k) as usize].clone())
            .collect()
    }

    pub fn total(&self) -> CountScalar {
        self.values.iter().sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = TableRow> + '_ {
        (1..self.p).map(move |a| TableRow {
            p: self.p,
            a,
            f_ell: self.values[a as usize].to_string(),
        })
    }

    /// Number of residues with a positive count.
    pub fn support_size(&self) -> u64 {
        self.values.iter().filter(|v| !v.is_zero()).count() as u64
    }

    /// Table of arity `self.ell + other.ell` as the multiplicative convolution
    /// of two tables over the same window.
    pub fn compose(&self, other: &RepresentationTable, ctx: &PrimeContext) -> Result<Self> {
        let conv = cyclic_convolution(&self.index_domain(ctx), &other.index_domain(ctx), Strategy::Auto)?;
        Ok(Self::from_index_domain(ctx, self.window, self.ell + other.ell, conv))
    }
}

pub fn representation_table(ctx: &PrimeContext, w: Window, ell: u32) -> Result<RepresentationTable> {
    representation_table_with(ctx, w, ell, Strategy::Auto)
}

pub fn representation_table_with(
    ctx: &PrimeContext,
    w: Window,
    ell: u32,
    strategy: Strategy,
) -> Result<RepresentationTable> {
    check_ell(ell)?;
    let hist = histogram(ctx, w, Domain::Multiplicative)?;
    let by_index = cyclic_power(&hist.counts, ell, strategy)?;
    Ok(RepresentationTable::from_index_domain(ctx, w, ell, by_index))
}

/// `V_ℓ(H, N)`: number of residues attained as an ℓ-fold product.
pub fn value_set_size(ctx: &PrimeContext, w: Window, ell: u32) -> Result<u64> {
    Ok(representation_table(ctx, w, ell)?.support_size())
}

/// `max_a F(a, H, N)` and the smallest residue attaining it.
pub fn max_multiplicity(ctx: &PrimeContext, w: Window) -> Result<(u64, u64)> {
    let mut counts = vec![0u64; ctx.p() as usize];
    for u in ctx.sequence_residues(w)? {
        counts[u as usize] += 1;
    }
    let mut best = (0u64, 0u64);
    for (a, &c) in counts.iter().enumerate() {
        if c > best.1 {
            best = (a as u64, c);
        }
    }
    Ok(best)
}

/// `G_ℓ(a, N)` for every residue a: ordered ℓ-tuples of positive integers
/// with `n_1 + … + n_ℓ = N`, bucketed by `Π u(n_i) mod p`.
///
/// By default `N·ℓ < p` is required, where the sum congruence and the
/// integer sum coincide; `allow_large` lifts it and counts exact integer
/// sums, with values at `n ≥ p` contributing residue 0.
pub fn fixed_sum_table(ctx: &PrimeContext, n: u64, ell: u32, allow_large: bool) -> Result<Vec<CountScalar>> {
    check_ell(ell)?;
    let p = ctx.p();
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "N",
            value: n,
            expected: "N >= 1".into(),
        });
    }
    if !allow_large && n.saturating_mul(ell as u64) >= p {
        return Err(Error::SumOutOfRange { n, ell, p });
    }
    let residues = ctx.extended_residues(1, n)?;
    // product state: index in 0..p-1, or `zero` for a vanishing product
    let zero = ctx.group_order() as usize;
    let steps: Vec<usize> = residues
        .iter()
        .map(|&u| if u == 0 { zero } else { ctx.index_of(u) as usize })
        .collect();

    let total = binomial(n - 1, ell as u64 - 1);
    let by_state = if total.bits() < 127 {
        compositions_by_product::<u128>(&steps, n as usize, ell, zero)
            .into_iter()
            .map(BigUint::from)
            .collect()
    } else {
        compositions_by_product::<BigUint>(&steps, n as usize, ell, zero)
    };

    let mut out = vec![BigUint::zero(); p as usize];
    for (k, v) in by_state.into_iter().enumerate() {
        let residue = if k == zero { 0 } else { ctx.power(k as u64) as usize };
        out[residue] = v;
    }
    Ok(out)
}

/// `G_ℓ(a, N)` for a single residue.
pub fn fixed_sum_count(ctx: &PrimeContext, a: u64, n: u64, ell: u32, allow_large: bool) -> Result<CountScalar> {
    if a >= ctx.p() {
        return Err(Error::OutOfRange {
            what: "a",
            value: a,
            expected: format!("0..={}", ctx.p() - 1),
        });
    }
    let mut table = fixed_sum_table(ctx, n, ell, allow_large)?;
    Ok(std::mem::take(&mut table[a as usize]))
}

/// Dynamic programme over (parts used, partial sum, product state), one
/// rolling layer at a time. `steps[m-1]` is the product state of part m.
fn compositions_by_product<C>(steps: &[usize], n: usize, ell: u32, zero: usize) -> Vec<C>
where
    C: Clone + Zero + One + for<'a> AddAssign<&'a C>,
{
    let states = zero + 1;
    let combine = |k: usize, step: usize| -> usize {
        if k == zero || step == zero {
            zero
        } else {
            (k + step) % zero
        }
    };
    // layer[s * states + k]
    let mut layer = vec![C::zero(); (n + 1) * states];
    layer[0] = C::one();
    for t in 1..=ell {
        let last = t == ell;
        let mut next = vec![C::zero(); (n + 1) * states];
        for s in 0..n {
            let row = &layer[s * states..(s + 1) * states];
            if row.iter().all(|c| c.is_zero()) {
                continue;
            }
            let parts = if last { n - s..=n - s } else { 1..=n - s };
            for m in parts {
                if m == 0 {
                    continue;
                }
                let step = steps[m - 1];
                let base = (s + m) * states;
                for (k, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        next[base + combine(k, step)] += c;
                    }
                }
            }
        }
        layer = next;
    }
    layer.split_off(n * states)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Exact discrepancy of the points `{a·Π u(n_i)/p}` over all ℓ-tuples in the
/// window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyResult {
    pub p: u64,
    pub a: u64,
    pub ell: u32,
    /// reduced numerator of D
    pub numerator: String,
    /// reduced denominator of D
    pub denominator: String,
    #[serde(rename = "D")]
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
    /// true when the extremal interval is the closed `[alpha, beta]`;
    /// false when D is the limit of closed intervals shrinking to the open
    /// `(alpha, beta)`
    pub closed: bool,
}

impl DiscrepancyResult {
    /// D as an exact rational `(numerator, denominator)`.
    pub fn ratio(&self) -> (BigUint, BigUint) {
        (
            self.numerator.parse().expect("decimal"),
            self.denominator.parse().expect("decimal"),
        )
    }
}

/// `D_ℓ(a, H, N)`.
///
/// Intervals are closed and points count with multiplicity. With `W(c)` the
/// number of tuples landing on `c/p`, `M = N^ℓ` points in total and grid
/// positions 0..=p (0 and p standing for the ends of [0,1]), the supremum is
/// the larger of
///
/// * `max_{c1≤c2} (W[c1..=c2]/M − (c2−c1)/p)` over closed grid intervals, and
/// * `max_{h<k} ((k−h)/p − W[h+1..k]/M)`, approached by closed intervals
///   shrinking to the open `(h/p, k/p)`.
///
/// Both are evaluated in O(p) on integers scaled by `M·p`.
pub fn discrepancy(ctx: &PrimeContext, a: u64, w: Window, ell: u32) -> Result<DiscrepancyResult> {
    let table = representation_table(ctx, w, ell)?;
    discrepancy_from_table(ctx, &table, a)
}

pub fn discrepancy_from_table(
    ctx: &PrimeContext,
    table: &RepresentationTable,
    a: u64,
) -> Result<DiscrepancyResult> {
    let p = ctx.p();
    let a = a % p;
    let a_inv = ctx.inverse(a).map_err(|_| Error::NonInvertibleMultiplier(a))?;
    let total = BigInt::from(table.total());
    let pb = BigInt::from(p);

    // prefix[i] = Σ_{c ≤ i} W(c), i in 0..=p, with W(0) = W(p) = 0
    let mut prefix = Vec::with_capacity(p as usize + 1);
    let mut run = BigInt::zero();
    prefix.push(run.clone());
    for c in 1..=p {
        if c < p {
            run += BigInt::from(table.get(a_inv * c % p).clone());
        }
        prefix.push(run.clone());
    }

    let mut best = BigInt::from(-1);
    let mut best_interval = (0u64, 0u64, true);

    // closed: p·(P[c2] − P[c1−1]) − M·(c2 − c1); track min of p·P[c1−1] − M·c1
    let mut min_left: Option<(BigInt, u64)> = None;
    for c in 0..=p {
        let left = if c == 0 {
            BigInt::zero()
        } else {
            &pb * &prefix[(c - 1) as usize] - &total * BigInt::from(c)
        };
        if min_left.as_ref().map_or(true, |(m, _)| left < *m) {
            min_left = Some((left, c));
        }
        let right = &pb * &prefix[c as usize] - &total * BigInt::from(c);
        let (m, c1) = min_left.as_ref().expect("set above");
        let value = right - m;
        if value > best {
            best = value;
            best_interval = (*c1, c, true);
        }
    }

    // open: M·(k − h) − p·(P[k−1] − P[h]); track min of M·h − p·P[h]
    let mut min_left: Option<(BigInt, u64)> = None;
    for k in 1..=p {
        let h = k - 1;
        let left = &total * BigInt::from(h) - &pb * &prefix[h as usize];
        if min_left.as_ref().map_or(true, |(m, _)| left < *m) {
            min_left = Some((left, h));
        }
        let right = &total * BigInt::from(k) - &pb * &prefix[(k - 1) as usize];
        let (m, h0) = min_left.as_ref().expect("set above");
        let value = right - m;
        if value > best {
            best = value;
            best_interval = (*h0, k, false);
        }
    }

    debug_assert!(!best.is_negative());
    let den = &total * &pb;
    let g = best.gcd(&den);
    let (num, den) = (best / &g, den / &g);
    let d = num.to_f64().unwrap_or(f64::NAN) / den.to_f64().unwrap_or(f64::NAN);
    let (lo, hi, closed) = best_interval;
    Ok(DiscrepancyResult {
        p,
        a,
        ell: table.ell,
        numerator: num.to_string(),
        denominator: den.to_string(),
        d,
        alpha: lo as f64 / p as f64,
        beta: hi as f64 / p as f64,
        closed,
    })
}

/// `Σ over ℓ-tuples of e(a·Π u(n_i))`, evaluated as `Σ_c F_ℓ(c) e(ac)`.
pub fn product_exp_sum(ctx: &PrimeContext, a: u64, w: Window, ell: u32) -> Result<ComplexSum> {
    let p = ctx.p();
    if a >= p {
        return Err(Error::OutOfRange {
            what: "a",
            value: a,
            expected: format!("0..={}", p - 1),
        });
    }
    let table = representation_table(ctx, w, ell)?;
    let mut acc = CompensatedComplex::new();
    for c in 1..p {
        let f = table.get(c);
        if f.is_zero() {
            continue;
        }
        acc.add(unit_root(a * c % p, p) * f.to_f64().unwrap_or(f64::INFINITY));
    }
    let z = acc.value();
    let cap = (w.len as f64).powi(ell as i32);
    Ok(ComplexSum { re: z.re, im: z.im, cap })
}

/// `max_a |F_ℓ(a) − N^ℓ/(p−1)|` as a float, computed from the exact
/// `|(p−1)·F_ℓ(a) − N^ℓ| / (p−1)`.
pub fn max_uniformity_deviation(ctx: &PrimeContext, table: &RepresentationTable) -> f64 {
    let order = BigInt::from(ctx.group_order());
    let total = BigInt::from(table.total());
    let worst = (1..ctx.p())
        .map(|a| (BigInt::from(table.get(a).clone()) * &order - &total).abs())
        .max()
        .unwrap_or_default();
    worst.to_f64().unwrap_or(f64::INFINITY) / ctx.group_order() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{odd_primes_between, SequenceKind};
    use num_complex::Complex64;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p, SequenceKind::Factorial).unwrap()
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn table_examples() {
        let c = ctx(5);
        let w = Window::new(0, 4);
        let t = representation_table(&c, w, 2).unwrap();
        assert_eq!(t.values(), &[big(0), big(5), big(4), big(2), big(5)][..]);
        assert_eq!(t.total(), big(16));
        let t1 = representation_table(&c, w, 1).unwrap();
        assert_eq!(t1.values(), &[big(0), big(2), big(1), big(0), big(1)][..]);
        assert_eq!(t.rows().next().unwrap().f_ell, "5");
    }

    #[test]
    fn value_sets() {
        assert_eq!(value_set_size(&ctx(7), Window::new(0, 6), 1).unwrap(), 4);
        assert_eq!(value_set_size(&ctx(7), Window::new(0, 6), 2).unwrap(), 6);
        assert_eq!(value_set_size(&ctx(5), Window::new(0, 4), 2).unwrap(), 4);
    }

    #[test]
    fn max_multiplicity_examples() {
        assert_eq!(max_multiplicity(&ctx(7), Window::new(0, 6)).unwrap(), (1, 2));
        assert_eq!(max_multiplicity(&ctx(5), Window::new(0, 4)).unwrap(), (1, 2));
        assert_eq!(max_multiplicity(&ctx(11), Window::new(3, 1)).unwrap(), (24 % 11, 1));
    }

    #[test]
    fn fixed_sum_examples() {
        let c = ctx(5);
        assert_eq!(fixed_sum_count(&c, 1, 4, 2, true).unwrap(), big(2));
        assert_eq!(fixed_sum_count(&c, 4, 4, 2, true).unwrap(), big(1));
        // 4·2 >= 5 needs the flag
        assert!(matches!(fixed_sum_count(&c, 1, 4, 2, false), Err(Error::SumOutOfRange { .. })));
        for p in [31u64, 37] {
            let c = ctx(p);
            for ell in 1..=3u32 {
                for n in 1..(p + ell as u64 - 1) / ell as u64 {
                    let table = fixed_sum_table(&c, n, ell, false).unwrap();
                    let total: BigUint = table.iter().sum();
                    assert_eq!(total, binomial(n - 1, ell as u64 - 1), "p={p} n={n} ell={ell}");
                    assert!(table[0].is_zero());
                }
            }
        }
    }

    #[test]
    fn fixed_sum_past_p_counts_vanishing_products() {
        // N = 8 > p = 7 with two parts: (1,7) and (7,1) contain 7! ≡ 0
        let c = ctx(7);
        let table = fixed_sum_table(&c, 8, 2, true).unwrap();
        assert_eq!(table[0], big(2));
        let total: BigUint = table.iter().sum();
        assert_eq!(total, big(7));
    }

    #[test]
    fn fixed_sum_switches_to_big_counts() {
        assert!(binomial(400, 7).bits() < 127);
        assert!(binomial(140, 70).bits() > 127);
        let big_path: Vec<BigUint> = compositions_by_product::<BigUint>(&[0, 1, 0, 2], 4, 2, 4);
        let small_path: Vec<BigUint> = compositions_by_product::<u128>(&[0, 1, 0, 2], 4, 2, 4)
            .into_iter()
            .map(BigUint::from)
            .collect();
        assert_eq!(big_path, small_path);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), big(10));
        assert_eq!(binomial(3, 5), big(0));
        assert_eq!(binomial(0, 0), big(1));
    }

    #[test]
    fn discrepancy_examples() {
        let r = discrepancy(&ctx(5), 1, Window::new(0, 4), 1).unwrap();
        assert_eq!(r.ratio(), (big(11), big(20)));
        assert!((r.d - 0.55).abs() < 1e-15);
        assert!((r.alpha - 0.2).abs() < 1e-15 && (r.beta - 0.4).abs() < 1e-15);
        assert!(r.closed);
        // one point at 0.2, closed interval [0.2, 0.2] holds all the mass
        let r = discrepancy(&ctx(5), 1, Window::new(0, 1), 1).unwrap();
        assert_eq!(r.ratio(), (big(1), big(1)));
        let again = discrepancy(&ctx(5), 1, Window::new(0, 1), 1).unwrap();
        assert_eq!(r, again);
        assert!(matches!(
            discrepancy(&ctx(5), 0, Window::new(0, 4), 1),
            Err(Error::NonInvertibleMultiplier(0))
        ));
    }

    #[test]
    fn discrepancy_in_unit_range() {
        for p in odd_primes_between(3, 60) {
            let c = ctx(p);
            for ell in 1..=3 {
                let t = representation_table(&c, Window::full(p), ell).unwrap();
                for a in 1..p {
                    let r = discrepancy_from_table(&c, &t, a).unwrap();
                    assert!(r.d > 0.0 && r.d <= 1.0);
                    assert!(r.d >= 1.0 / (2.0 * p as f64) - 1e-12);
                }
            }
        }
    }

    #[test]
    fn exponential_sums_of_products() {
        let c = ctx(5);
        let w = Window::new(0, 4);
        let s = product_exp_sum(&c, 0, w, 3).unwrap();
        assert_eq!((s.re, s.im), (64.0, 0.0));
        let s = product_exp_sum(&c, 1, w, 1).unwrap();
        let e = |k: u64| unit_root(k, 5);
        let direct = e(1) * 2.0 + e(2) + e(4);
        assert!((s.value() - direct).norm() < 1e-12);
        assert!((s.value() - Complex64::new(0.118, 1.539)).norm() < 1e-3);
        let s = product_exp_sum(&c, 2, w, 2).unwrap();
        let direct = e(2) * 5.0 + e(4) * 4.0 + e(6) * 2.0 + e(8) * 5.0;
        assert!((s.value() - direct).norm() < 1e-12);
        assert!(product_exp_sum(&c, 5, w, 2).is_err());
    }

    #[test]
    fn table_invariants() {
        for p in odd_primes_between(3, 101) {
            let c = ctx(p);
            let w = Window::full(p);
            let i2 = crate::moments::count_product_collisions(&c, w, 2).unwrap();
            let t1 = representation_table(&c, w, 1).unwrap();
            let t2 = representation_table(&c, w, 2).unwrap();
            let t3 = representation_table(&c, w, 3).unwrap();
            assert_eq!(t2.values().iter().map(|x| x * x).sum::<BigUint>(), i2);
            assert_eq!(t3.total(), BigUint::from(p - 1).pow(3));
            assert_eq!(t1.compose(&t2, &c).unwrap(), t3);
            assert!(t3.support_size() >= t2.support_size());
            assert!(t2.support_size() >= t1.support_size());
        }
    }

    #[test]
    fn uniformity_deviation() {
        let c = ctx(5);
        let t = representation_table(&c, Window::new(0, 4), 2).unwrap();
        // F = [5,4,2,5], N^2/(p-1) = 4
        assert!((max_uniformity_deviation(&c, &t) - 2.0).abs() < 1e-12);
    }
}
