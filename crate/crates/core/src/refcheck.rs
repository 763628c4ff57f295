//! Brute-force oracles written from the definitions.
//!
//! Nothing here touches the convolution, spectrum or table code; the only
//! shared input is the list of sequence residues from the prime context.
//! Every oracle refuses inputs whose enumeration would exceed
//! [`ENUMERATION_LIMIT`] items.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{mul_mod, PrimeContext, Window};
use crate::moments::{count_product_collisions, count_sum_collisions, CountScalar};
use crate::repcount::{discrepancy_from_table, fixed_sum_table, representation_table};

pub const ENUMERATION_LIMIT: u128 = 100_000_000;

fn guard(size: u128) -> Result<()> {
    if size > ENUMERATION_LIMIT {
        Err(Error::TooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        })
    } else {
        Ok(())
    }
}

fn tuple_count(n: u64, k: u32) -> u128 {
    (n as u128).checked_pow(k).unwrap_or(u128::MAX)
}

/// Calls `visit` with the product (or sum) of every ℓ-tuple of `values`.
fn for_each_tuple(values: &[u64], ell: u32, p: u64, product: bool, visit: &mut impl FnMut(u64)) {
    fn go(values: &[u64], left: u32, acc: u64, p: u64, product: bool, visit: &mut impl FnMut(u64)) {
        if left == 0 {
            visit(acc);
            return;
        }
        for &v in values {
            let next = if product { mul_mod(acc, v, p) } else { (acc + v) % p };
            go(values, left - 1, next, p, product, visit);
        }
    }
    go(values, ell, if product { 1 } else { 0 }, p, product, visit);
}

/// Number of 2ℓ-tuples whose two halves agree under `product` or sum.
fn collision_oracle(ctx: &PrimeContext, w: Window, ell: u32, product: bool) -> Result<CountScalar> {
    let values = ctx.sequence_residues(w)?;
    let p = ctx.p();
    let full = tuple_count(w.len, 2 * ell);
    if full <= ENUMERATION_LIMIT {
        let mut count = 0u64;
        for_each_tuple(&values, ell, p, product, &mut |left| {
            for_each_tuple(&values, ell, p, product, &mut |right| {
                if left == right {
                    count += 1;
                }
            });
        });
        return Ok(BigUint::from(count));
    }
    // count each half once, then pair up equal halves
    guard(tuple_count(w.len, ell))?;
    let mut halves: HashMap<u64, u64> = HashMap::new();
    for_each_tuple(&values, ell, p, product, &mut |v| *halves.entry(v).or_default() += 1);
    Ok(halves.values().map(|&c| BigUint::from(c) * c).sum())
}

/// `I_ℓ` by enumerating 2ℓ-tuples (or ℓ-tuple halves past the limit).
pub fn oracle_i(ctx: &PrimeContext, w: Window, ell: u32) -> Result<CountScalar> {
    collision_oracle(ctx, w, ell, true)
}

/// `J_ℓ` by enumerating 2ℓ-tuples (or ℓ-tuple halves past the limit).
pub fn oracle_j(ctx: &PrimeContext, w: Window, ell: u32) -> Result<CountScalar> {
    collision_oracle(ctx, w, ell, false)
}

/// `F_ℓ(a)` for every residue a, by enumerating ℓ-tuples.
pub fn oracle_f_table(ctx: &PrimeContext, w: Window, ell: u32) -> Result<Vec<u64>> {
    guard(tuple_count(w.len, ell))?;
    let values = ctx.sequence_residues(w)?;
    let mut table = vec![0u64; ctx.p() as usize];
    for_each_tuple(&values, ell, ctx.p(), true, &mut |v| table[v as usize] += 1);
    Ok(table)
}

/// `F_ℓ(a, H, N)`.
pub fn oracle_f(ctx: &PrimeContext, a: u64, w: Window, ell: u32) -> Result<CountScalar> {
    let table = oracle_f_table(ctx, w, ell)?;
    Ok(BigUint::from(table.get(a as usize).copied().unwrap_or(0)))
}

/// `V_ℓ(H, N)`.
pub fn oracle_v(ctx: &PrimeContext, w: Window, ell: u32) -> Result<u64> {
    Ok(oracle_f_table(ctx, w, ell)?.iter().filter(|&&c| c > 0).count() as u64)
}

/// `G_ℓ(a, N)` for every residue a, by listing compositions of N into ℓ
/// positive parts; terms with `n ≥ p` are ≡ 0.
pub fn oracle_g_table(ctx: &PrimeContext, n: u64, ell: u32) -> Result<Vec<u64>> {
    if n == 0 || ell == 0 {
        return Err(Error::BadRange { lo: ell as u64, hi: n });
    }
    // C(N-1, ℓ-1) compositions
    let mut size = 0u128;
    if n >= ell as u64 {
        size = 1;
        for i in 0..ell as u128 - 1 {
            size = size.saturating_mul(n as u128 - 1 - i) / (i + 1);
        }
    }
    guard(size)?;
    let residues = ctx.extended_residues(1, n)?;
    let p = ctx.p();
    let mut table = vec![0u64; p as usize];
    fn go(res: &[u64], left_parts: u32, left_sum: u64, acc: u64, p: u64, table: &mut [u64]) {
        if left_parts == 1 {
            table[mul_mod(acc, res[left_sum as usize - 1], p) as usize] += 1;
            return;
        }
        for m in 1..left_sum {
            if left_sum - m < (left_parts - 1) as u64 {
                break;
            }
            go(res, left_parts - 1, left_sum - m, mul_mod(acc, res[m as usize - 1], p), p, table);
        }
    }
    if n >= ell as u64 {
        go(&residues, ell, n, 1, p, &mut table);
    }
    Ok(table)
}

/// `G_ℓ(a, N)`.
pub fn oracle_g(ctx: &PrimeContext, a: u64, n: u64, ell: u32) -> Result<CountScalar> {
    let table = oracle_g_table(ctx, n, ell)?;
    Ok(BigUint::from(table.get(a as usize).copied().unwrap_or(0)))
}

/// `D_ℓ(a, H, N)` as a reduced fraction `(numerator, denominator)`.
///
/// Lists all `N^ℓ` points `{a·Π u(n_i)/p}`, then tries every pair of
/// endpoints drawn from the point values and {0, 1}, both as a closed
/// interval and as an open one (the limit of closed intervals shrinking to
/// it), with exact integer arithmetic.
pub fn oracle_d(ctx: &PrimeContext, a: u64, w: Window, ell: u32) -> Result<(BigUint, BigUint)> {
    let p = ctx.p();
    if a % p == 0 {
        return Err(Error::NonInvertibleMultiplier(a));
    }
    let m = tuple_count(w.len, ell);
    guard(m)?;
    let values = ctx.sequence_residues(w)?;
    let mut points = Vec::with_capacity(m as usize);
    for_each_tuple(&values, ell, p, true, &mut |v| points.push(mul_mod(a % p, v, p)));
    points.sort_unstable();

    let mut ends: Vec<u64> = points.clone();
    ends.push(0);
    ends.push(p);
    ends.sort_unstable();
    ends.dedup();
    // number of points ≤ x and < x, by binary search on the sorted points
    let upto = |x: u64| points.partition_point(|&q| q <= x) as i128;
    let below = |x: u64| points.partition_point(|&q| q < x) as i128;

    let (m, pi) = (m as i128, p as i128);
    let mut best: i128 = 0;
    for (i, &lo) in ends.iter().enumerate() {
        for &hi in &ends[i..] {
            let len = (hi - lo) as i128;
            let closed = upto(hi) - below(lo);
            let open = if hi > lo { below(hi) - upto(lo) } else { 0 };
            // |A/M - len/p| scaled by M·p
            best = best.max((closed * pi - len * m).abs());
            if hi > lo {
                best = best.max((open * pi - len * m).abs());
            }
        }
    }
    let num = BigUint::from(best as u128);
    let den = BigUint::from((m * pi) as u128);
    let g = num.gcd(&den);
    Ok((num / &g, den / &g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleTarget {
    I,
    J,
    F,
    V,
    G,
    D,
}

impl OracleTarget {
    pub const ALL: [OracleTarget; 6] = [
        OracleTarget::I,
        OracleTarget::J,
        OracleTarget::F,
        OracleTarget::V,
        OracleTarget::G,
        OracleTarget::D,
    ];
}

impl std::str::FromStr for OracleTarget {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "I" => Ok(OracleTarget::I),
            "J" => Ok(OracleTarget::J),
            "F" => Ok(OracleTarget::F),
            "V" => Ok(OracleTarget::V),
            "G" => Ok(OracleTarget::G),
            "D" => Ok(OracleTarget::D),
            other => Err(format!("unknown oracle target {other:?} (expected I, J, F, V, G or D)")),
        }
    }
}

/// One fast-versus-oracle comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub target: OracleTarget,
    pub p: u64,
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub ell: u32,
    /// residue or multiplier, for per-a targets
    pub a: Option<u64>,
    pub fast: String,
    pub oracle: String,
    pub pass: bool,
}

/// Compares the fast path with the oracle for one target.
///
/// F and D are compared at every `a` in `1..p`; G at every residue for the
/// sum `N` equal to the window length, with the `N·ℓ < p` restriction lifted
/// where needed.
pub fn compare(ctx: &PrimeContext, w: Window, ell: u32, target: OracleTarget) -> Result<Vec<Comparison>> {
    let p = ctx.p();
    let row = |a: Option<u64>, fast: String, oracle: String| Comparison {
        target,
        p,
        h: w.offset,
        n: w.len,
        ell,
        a,
        pass: fast == oracle,
        fast,
        oracle,
    };
    let rows = match target {
        OracleTarget::I => {
            vec![row(None, count_product_collisions(ctx, w, ell)?.to_string(), oracle_i(ctx, w, ell)?.to_string())]
        }
        OracleTarget::J => {
            vec![row(None, count_sum_collisions(ctx, w, ell)?.to_string(), oracle_j(ctx, w, ell)?.to_string())]
        }
        OracleTarget::F => {
            let fast = representation_table(ctx, w, ell)?;
            let slow = oracle_f_table(ctx, w, ell)?;
            (0..p)
                .map(|a| row(Some(a), fast.get(a).to_string(), slow[a as usize].to_string()))
                .collect()
        }
        OracleTarget::V => {
            let fast = representation_table(ctx, w, ell)?.support_size();
            vec![row(None, fast.to_string(), oracle_v(ctx, w, ell)?.to_string())]
        }
        OracleTarget::G => {
            let fast = fixed_sum_table(ctx, w.len, ell, true)?;
            let slow = oracle_g_table(ctx, w.len, ell)?;
            (0..p)
                .map(|a| row(Some(a), fast[a as usize].to_string(), slow[a as usize].to_string()))
                .collect()
        }
        OracleTarget::D => {
            let table = representation_table(ctx, w, ell)?;
            let mut out = Vec::with_capacity(p as usize - 1);
            for a in 1..p {
                let fast = discrepancy_from_table(ctx, &table, a)?;
                let (num, den) = oracle_d(ctx, a, w, ell)?;
                out.push(row(
                    Some(a),
                    format!("{}/{}", fast.numerator, fast.denominator),
                    format!("{num}/{den}"),
                ));
            }
            out
        }
    };
    Ok(rows)
}

/// All targets for one `(p, w, ℓ)`.
pub fn compare_all(ctx: &PrimeContext, w: Window, ell: u32) -> Result<Vec<Comparison>> {
    let mut out = Vec::new();
    for target in OracleTarget::ALL {
        out.extend(compare(ctx, w, ell, target)?);
    }
    Ok(out)
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
    fn oracle_examples() {
        let c = ctx(5);
        let w = Window::new(0, 4);
        assert_eq!(oracle_i(&c, w, 1).unwrap(), big(6));
        assert_eq!(oracle_i(&c, w, 2).unwrap(), big(70));
        assert_eq!(oracle_i(&ctx(13), Window::new(6, 1), 3).unwrap(), big(1));
        assert_eq!(oracle_f(&c, 3, w, 2).unwrap(), big(2));
        assert_eq!(oracle_g(&c, 1, 4, 2).unwrap(), big(2));
        assert_eq!(oracle_d(&c, 1, w, 1).unwrap(), (big(11), big(20)));
        assert_eq!(oracle_j(&ctx(3), Window::new(0, 2), 1).unwrap(), big(2));
        assert_eq!(oracle_v(&ctx(7), Window::new(0, 6), 2).unwrap(), 6);
    }

    #[test]
    fn both_collision_routes_agree() {
        // 12^4 enumerates in full; compare against the halves route
        let c = ctx(13);
        let w = Window::full(13);
        let full = oracle_i(&c, w, 2).unwrap();
        let values = c.sequence_residues(w).unwrap();
        let mut halves: HashMap<u64, u64> = HashMap::new();
        for_each_tuple(&values, 2, 13, true, &mut |v| *halves.entry(v).or_default() += 1);
        let paired: BigUint = halves.values().map(|&x| BigUint::from(x * x)).sum();
        assert_eq!(full, paired);
    }

    #[test]
    fn limits() {
        let c = ctx(1009);
        assert!(matches!(oracle_f(&c, 1, Window::full(1009), 3), Err(Error::TooLarge { .. })));
        assert!(matches!(oracle_d(&ctx(5), 0, Window::new(0, 4), 1), Err(Error::NonInvertibleMultiplier(0))));
    }

    #[test]
    fn compositions_are_counted_once() {
        let c = ctx(31);
        for ell in 1..=3u32 {
            for n in 1..=12u64 {
                let total: u64 = oracle_g_table(&c, n, ell).unwrap().iter().sum();
                let expected = crate::repcount::binomial(n - 1, ell as u64 - 1);
                assert_eq!(BigUint::from(total), expected, "n={n} ell={ell}");
            }
        }
    }

    #[test]
    fn small_grid_agrees() {
        for p in [3u64, 5, 7, 11] {
            let c = ctx(p);
            for w in [Window::full(p), Window::new(1, p / 2)] {
                for ell in 1..=2 {
                    for cmp in compare_all(&c, w, ell).unwrap() {
                        assert!(cmp.pass, "{cmp:?}");
                    }
                }
            }
        }
    }
}
