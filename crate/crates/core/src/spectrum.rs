//! Multiplicative character sums `T(χ, f, H, N) = Σ χ(u(n)) e(f(n))`,
//! additive sums `S(a, H, N) = Σ e(a·u(n))`, and their full spectra over
//! all characters via exact-length DFTs.
//!
//! Characters are parametrised by `j ∈ {0, …, p-2}` with
//! `χ_j(x) = exp(2πi·j·ind(x)/(p-1))` and `χ_j(0) = 0`.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::dft::{dft, unit_root, CompensatedComplex};
use crate::error::{Error, Result};
use crate::field::{PrimeContext, Window};

pub const MAX_PHASE_DEGREE: usize = 8;

/// Polynomial `f ∈ F_p[X]` contributing the additive phase `e(f(n))`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhasePolynomial {
    coeffs: Vec<u64>,
}

impl PhasePolynomial {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c_0 + c_1 X + …`, reduced modulo p with trailing zeros dropped.
    pub fn new(coeffs: &[u64], p: u64) -> Result<Self> {
        let mut coeffs: Vec<u64> = coeffs.iter().map(|c| c % p).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() > MAX_PHASE_DEGREE + 1 {
            return Err(Error::OutOfRange {
                what: "degree",
                value: coeffs.len() as u64 - 1,
                expected: format!("0..={MAX_PHASE_DEGREE}"),
            });
        }
        Ok(PhasePolynomial { coeffs })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, n: u64, p: u64) -> u64 {
        let x = n % p;
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (acc * x + c) % p)
    }
}

/// A character sum value with its a-priori magnitude cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexSum {
    pub re: f64,
    pub im: f64,
    /// |value| ≤ cap (up to rounding)
    pub cap: f64,
}

impl ComplexSum {
    fn new(z: Complex64, cap: f64) -> Self {
        ComplexSum {
            re: z.re,
            im: z.im,
            cap,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

fn check_character(ctx: &PrimeContext, j: u64) -> Result<()> {
    if j >= ctx.group_order() {
        return Err(Error::OutOfRange {
            what: "j",
            value: j,
            expected: format!("0..={}", ctx.group_order() - 1),
        });
    }
    Ok(())
}

fn check_additive(ctx: &PrimeContext, a: u64) -> Result<()> {
    if a >= ctx.p() {
        return Err(Error::OutOfRange {
            what: "a",
            value: a,
            expected: format!("0..={}", ctx.p() - 1),
        });
    }
    Ok(())
}

/// `χ_j(x)` for a residue x, with `χ_j(0) = 0`.
pub fn character_value(ctx: &PrimeContext, j: u64, x: u64) -> Complex64 {
    let x = x % ctx.p();
    if x == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let order = ctx.group_order();
    let k = ctx.index_of(x);
    unit_root((j % order) * k % order, order)
}

/// Direct O(N) evaluation of `T(χ_j, f, H, N)`.
pub fn character_sum(
    ctx: &PrimeContext,
    j: u64,
    f: &PhasePolynomial,
    w: Window,
) -> Result<ComplexSum> {
    check_character(ctx, j)?;
    let p = ctx.p();
    let order = ctx.group_order();
    let residues = ctx.sequence_residues(w)?;
    let mut acc = CompensatedComplex::new();
    for (n, u) in w.iter().zip(residues) {
        let chi = unit_root(j * ctx.index_of(u) % order, order);
        acc.add(chi * unit_root(f.eval(n, p), p));
    }
    Ok(ComplexSum::new(acc.value(), w.len as f64))
}

/// Direct O(N) evaluation of `S(a, H, N)`.
pub fn additive_sum(ctx: &PrimeContext, a: u64, w: Window) -> Result<ComplexSum> {
    check_additive(ctx, a)?;
    let p = ctx.p();
    let residues = ctx.sequence_residues(w)?;
    let mut acc = CompensatedComplex::new();
    for u in residues {
        acc.add(unit_root(a * u % p, p));
    }
    Ok(ComplexSum::new(acc.value(), w.len as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    /// indexed by character j ∈ Z/(p-1)
    Multiplicative,
    /// indexed by a ∈ Z/p
    Additive,
}

/// Values of all character sums of one kind over a window.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub kind: SpectrumKind,
    pub p: u64,
    pub values: Vec<Complex64>,
    pub cap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub p: u64,
    pub j_or_a: u64,
    pub re: f64,
    pub im: f64,
    pub magnitude2: f64,
}

impl Spectrum {
    pub fn get(&self, idx: u64) -> ComplexSum {
        ComplexSum::new(self.values[idx as usize], self.cap)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Σ |value|^{2ℓ}` with compensated accumulation.
    pub fn power_sum(&self, ell: u32) -> f64 {
        let mut acc = crate::dft::CompensatedSum::new();
        for z in &self.values {
            acc.add(z.norm_sqr().powi(ell as i32));
        }
        acc.value()
    }

    pub fn rows(&self) -> impl Iterator<Item = SpectrumRow> + '_ {
        self.values.iter().enumerate().map(move |(i, z)| SpectrumRow {
            p: self.p,
            j_or_a: i as u64,
            re: z.re,
            im: z.im,
            magnitude2: z.norm_sqr(),
        })
    }

    /// Little-endian `(re, im)` f64 pairs.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for z in &self.values {
            out.write_all(&z.re.to_le_bytes())?;
            out.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }
}

fn transform_weights(weights: &[Complex64]) -> Vec<Complex64> {
    let mut values = dft(weights);
    // entry 0 is the plain total of the weights
    let mut total = CompensatedComplex::new();
    for &z in weights {
        total.add(z);
    }
    values[0] = total.value();
    values
}

/// `T(χ_j, f, H, N)` for every `j ∈ {0, …, p-2}`.
pub fn multiplicative_spectrum(
    ctx: &PrimeContext,
    f: &PhasePolynomial,
    w: Window,
) -> Result<Spectrum> {
    let p = ctx.p();
    let residues = ctx.sequence_residues(w)?;
    let values = if f.is_zero() {
        let mut counts = vec![0u64; ctx.group_order() as usize];
        for u in residues {
            counts[ctx.index_of(u) as usize] += 1;
        }
        let weights: Vec<Complex64> = counts
            .iter()
            .map(|&c| Complex64::new(c as f64, 0.0))
            .collect();
        transform_weights(&weights)
    } else {
        let mut acc = vec![CompensatedComplex::new(); ctx.group_order() as usize];
        for (n, u) in w.iter().zip(residues) {
            acc[ctx.index_of(u) as usize].add(unit_root(f.eval(n, p), p));
        }
        let weights: Vec<Complex64> = acc.iter().map(|a| a.value()).collect();
        transform_weights(&weights)
    };
    Ok(Spectrum {
        kind: SpectrumKind::Multiplicative,
        p,
        values,
        cap: w.len as f64,
    })
}

/// `S(a, H, N)` for every `a ∈ {0, …, p-1}`.
pub fn additive_spectrum(ctx: &PrimeContext, w: Window) -> Result<Spectrum> {
    let p = ctx.p();
    let mut counts = vec![0u64; p as usize];
    for u in ctx.sequence_residues(w)? {
        counts[u as usize] += 1;
    }
    let weights: Vec<Complex64> = counts
        .iter()
        .map(|&c| Complex64::new(c as f64, 0.0))
        .collect();
    Ok(Spectrum {
        kind: SpectrumKind::Additive,
        p,
        values: transform_weights(&weights),
        cap: w.len as f64,
    })
}

/// `Σ_j χ_j(u)`: p-1 when u ≡ 1, otherwise 0.
pub fn character_orthogonality(ctx: &PrimeContext, u: u64) -> Complex64 {
    let mut acc = CompensatedComplex::new();
    for j in 0..ctx.group_order() {
        acc.add(character_value(ctx, j, u));
    }
    acc.value()
}

/// Largest incomplete sum of a nonprincipal character,
/// `max_χ≠χ0 max_{0≤h≤k≤p-1} |Σ_{c=h+1}^{k} χ(c)|`.
///
/// For each character the interval sums are differences of prefix sums, so
/// the inner maximum is the diameter of the prefix walk, found on its convex
/// hull. Conjugate characters share the diameter, so only `j ≤ (p-1)/2` is
/// scanned.
pub fn max_incomplete_character_sum(ctx: &PrimeContext) -> f64 {
    let order = ctx.group_order();
    let mut best = 0.0f64;
    for j in 1..=order / 2 {
        let mut walk = Vec::with_capacity(ctx.p() as usize);
        let mut acc = CompensatedComplex::new();
        walk.push((0.0, 0.0));
        for c in 1..ctx.p() {
            acc.add(character_value(ctx, j, c));
            let z = acc.value();
            walk.push((z.re, z.im));
        }
        best = best.max(diameter(walk));
    }
    best
}

fn diameter(mut pts: Vec<(f64, f64)>) -> f64 {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() < 3 {
        return match pts.as_slice() {
            [a, b] => dist(*a, *b),
            _ => 0.0,
        };
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for &pt in pts.iter().chain(pts.iter().rev().skip(1)) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0.0 {
            hull.pop();
        }
        hull.push(pt);
    }
    let mut best = 0.0f64;
    for (i, &a) in hull.iter().enumerate() {
        for &b in &hull[i + 1..] {
            best = best.max(dist(a, b));
        }
    }
    best
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{odd_primes_between, SequenceKind};

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p, SequenceKind::Factorial).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn direct_character_sums() {
        let zero = PhasePolynomial::zero();
        let quad = character_sum(&ctx(7), 3, &zero, Window::new(0, 6)).unwrap();
        assert!(quad.value().norm() < 1e-12);
        let t = character_sum(&ctx(5), 1, &zero, Window::new(0, 4)).unwrap();
        assert!(close(t.value(), Complex64::new(1.0, 1.0), 1e-12));
        for p in [5, 11, 101] {
            let w = Window::new(1, p - 3);
            let t = character_sum(&ctx(p), 0, &zero, w).unwrap();
            assert_eq!((t.re, t.im), ((p - 3) as f64, 0.0));
        }
        assert!(character_sum(&ctx(7), 6, &zero, Window::new(0, 6)).is_err());
    }

    #[test]
    fn direct_additive_sums() {
        let s = additive_sum(&ctx(3), 1, Window::new(0, 2)).unwrap();
        assert!(close(s.value(), Complex64::new(-1.0, 0.0), 1e-12));
        let s = additive_sum(&ctx(3), 2, Window::new(0, 2)).unwrap();
        assert!(close(s.value(), Complex64::new(-1.0, 0.0), 1e-12));
        let s = additive_sum(&ctx(13), 0, Window::new(2, 7)).unwrap();
        assert_eq!((s.re, s.im), (7.0, 0.0));
        assert!(additive_sum(&ctx(3), 3, Window::new(0, 2)).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let s = multiplicative_spectrum(&ctx(5), &PhasePolynomial::zero(), Window::new(0, 4)).unwrap();
        let mags: Vec<f64> = s.values.iter().map(|z| z.norm_sqr()).collect();
        for (m, e) in mags.iter().zip([16.0, 2.0, 4.0, 2.0]) {
            assert!((m - e).abs() < 1e-9);
        }
        let s = multiplicative_spectrum(&ctx(3), &PhasePolynomial::zero(), Window::new(0, 2)).unwrap();
        assert_eq!(s.values[0], Complex64::new(2.0, 0.0));
        let s = multiplicative_spectrum(&ctx(7), &PhasePolynomial::zero(), Window::new(0, 6)).unwrap();
        assert!(s.values[3].norm() < 1e-9);

        let s = additive_spectrum(&ctx(3), Window::new(0, 2)).unwrap();
        for (z, e) in s.values.iter().zip([2.0, -1.0, -1.0]) {
            assert!(close(*z, Complex64::new(e, 0.0), 1e-9));
        }
        let s = additive_spectrum(&ctx(5), Window::new(0, 4)).unwrap();
        assert_eq!(s.values[0], Complex64::new(4.0, 0.0));
        assert!((s.power_sum(1) - 30.0).abs() < 1e-9);
    }

    #[test]
    fn spectra_match_direct_sums() {
        let f = PhasePolynomial::new(&[3, 1, 4, 1], 1009).unwrap();
        for p in [31u64, 101, 1009] {
            let c = ctx(p);
            let w = Window::new(p / 7, p / 2);
            let cap = w.len as f64;
            let f = PhasePolynomial::new(&[3, 1, 4, 1], p).unwrap();
            for poly in [PhasePolynomial::zero(), f] {
                let s = multiplicative_spectrum(&c, &poly, w).unwrap();
                for j in (0..p - 1).step_by(((p - 1) / 20).max(1) as usize) {
                    let direct = character_sum(&c, j, &poly, w).unwrap();
                    assert!(close(s.values[j as usize], direct.value(), 1e-9 * cap));
                }
            }
            let s = additive_spectrum(&c, w).unwrap();
            for a in (0..p).step_by((p / 20).max(1) as usize) {
                let direct = additive_sum(&c, a, w).unwrap();
                assert!(close(s.values[a as usize], direct.value(), 1e-9 * cap));
            }
        }
        assert_eq!(f.degree(), 3);
    }

    #[test]
    fn conjugate_symmetry() {
        let c = ctx(61);
        let s = multiplicative_spectrum(&c, &PhasePolynomial::zero(), Window::new(4, 40)).unwrap();
        for j in 1..60u64 {
            assert!(close(s.values[(60 - j) as usize], s.values[j as usize].conj(), 1e-9));
        }
    }

    #[test]
    fn orthogonality() {
        for p in odd_primes_between(3, 50) {
            let c = ctx(p);
            for u in 1..p {
                let expected = if u == 1 { (p - 1) as f64 } else { 0.0 };
                assert!(close(character_orthogonality(&c, u), Complex64::new(expected, 0.0), 1e-9));
            }
            for j in 0..p - 1 {
                assert_eq!(character_value(&c, j, 0), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn phase_polynomial() {
        let f = PhasePolynomial::new(&[1, 2, 3], 7).unwrap();
        assert_eq!(f.eval(2, 7), (1 + 4 + 12) % 7);
        assert!(PhasePolynomial::new(&[7, 14], 7).unwrap().is_zero());
        assert!(PhasePolynomial::new(&[1; 10], 7).is_err());
    }

    #[test]
    fn incomplete_sums_of_quadratic_character() {
        // p = 7: Legendre symbols of 1..6 are +,+,-,+,-,-; prefix walk 0,1,2,1,2,1,0
        let c = ctx(7);
        let mut best = 0.0f64;
        for j in 1..6 {
            let mut walk = vec![Complex64::new(0.0, 0.0)];
            for x in 1..7 {
                let last = *walk.last().unwrap();
                walk.push(last + character_value(&c, j, x));
            }
            for a in &walk {
                for b in &walk {
                    best = best.max((a - b).norm());
                }
            }
        }
        assert!((max_incomplete_character_sum(&c) - best).abs() < 1e-9);
        assert!(best >= 2.0);
    }
}
