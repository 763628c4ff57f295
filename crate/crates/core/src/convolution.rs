//! Exact cyclic convolution of nonnegative integer vectors.
//!
//! Two routes compute the same thing:
//!
//! * schoolbook O(L²) over big integers, used for short lengths and as the
//!   cross-check for the fast route;
//! * number-theoretic transforms modulo several ~61-bit primes of the form
//!   `c·2^32 + 1`, reconstructed with Garner's algorithm. The number of
//!   moduli is chosen so their product exceeds an a-priori bound on every
//!   output cell (the product of the input masses), which makes the
//!   reconstruction exact.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Lengths up to this use the schoolbook route under [`Strategy::Auto`].
pub const SCHOOLBOOK_MAX_LEN: usize = 64;

const TWO_ADICITY: u32 = 32;
const MAX_TRANSFORM_LOG2: u32 = 28;
const MODULUS_COUNT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Auto,
    Schoolbook,
    Ntt,
}

impl Strategy {
    fn use_ntt(self, len: usize) -> bool {
        match self {
            Strategy::Auto => len > SCHOOLBOOK_MAX_LEN,
            Strategy::Schoolbook => false,
            Strategy::Ntt => true,
        }
    }
}

/// A prime modulus with Montgomery arithmetic (R = 2^64).
#[derive(Debug, Clone)]
struct NttPrime {
    q: u64,
    /// -q^{-1} mod 2^64
    neg_inv: u64,
    /// R² mod q
    r2: u64,
    /// generator of (Z/q)^*
    root: u64,
}

impl NttPrime {
    fn new(q: u64) -> Self {
        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % q as u128) as u64;
        let r2 = ((r as u128 * r as u128) % q as u128) as u64;
        let c = (q - 1) >> TWO_ADICITY;
        let mut factors = vec![2u64];
        factors.extend(crate::field::prime_divisors(c).into_iter().filter(|&f| f != 2));
        let root = (2..)
            .find(|&g| factors.iter().all(|&f| pow_mod_u128(g, (q - 1) / f, q) != 1))
            .expect("prime modulus has a generator");
        NttPrime {
            q,
            neg_inv: inv.wrapping_neg(),
            r2,
            root,
        }
    }

    #[inline]
    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.q as u128) >> 64) as u64;
        if u >= self.q {
            u - self.q
        } else {
            u
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    fn to_mont(&self, x: u64) -> u64 {
        self.mul(x % self.q, self.r2)
    }

    #[inline]
    fn from_mont(&self, x: u64) -> u64 {
        self.reduce(x as u128)
    }

    fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = self.to_mont(1);
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// In-place transform of Montgomery-form values; `inverse` includes the
    /// 1/n scaling.
    fn transform(&self, a: &mut [u64], inverse: bool) {
        let n = a.len();
        debug_assert!(n.is_power_of_two());
        if n == 1 {
            return;
        }
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let mut omega = self.pow(self.to_mont(self.root), (self.q - 1) / n as u64);
        if inverse {
            omega = self.pow(omega, n as u64 - 1);
        }
        // roots[k] = omega^k for k < n/2
        let mut roots = Vec::with_capacity(n / 2);
        let mut w = self.to_mont(1);
        for _ in 0..n / 2 {
            roots.push(w);
            w = self.mul(w, omega);
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for chunk in a.chunks_mut(len) {
                let (lo, hi) = chunk.split_at_mut(half);
                for k in 0..half {
                    let t = self.mul(hi[k], roots[k * stride]);
                    hi[k] = self.sub(lo[k], t);
                    lo[k] = self.add(lo[k], t);
                }
            }
            len <<= 1;
        }
        if inverse {
            let n_inv = self.pow(self.to_mont(n as u64), self.q - 2);
            for x in a.iter_mut() {
                *x = self.mul(*x, n_inv);
            }
        }
    }
}

fn pow_mod_u128(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit integers.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn moduli() -> &'static [NttPrime] {
    static MODULI: OnceLock<Vec<NttPrime>> = OnceLock::new();
    MODULI.get_or_init(|| {
        let mut out = Vec::with_capacity(MODULUS_COUNT);
        let mut c = (1u64 << (62 - TWO_ADICITY)) - 1;
        while out.len() < MODULUS_COUNT {
            let q = (c << TWO_ADICITY) + 1;
            if is_prime_u64(q) {
                out.push(NttPrime::new(q));
            }
            c -= 1;
        }
        out
    })
}

/// Number of moduli whose product exceeds `bound`.
fn moduli_for(bound: &BigUint) -> Result<usize> {
    let mut prod = BigUint::from(1u32);
    for (i, m) in moduli().iter().enumerate() {
        prod *= m.q;
        if &prod > bound {
            return Ok(i + 1);
        }
    }
    Err(Error::Inconsistency(format!(
        "convolution values up to {} bits exceed the CRT capacity",
        bound.bits()
    )))
}

/// Garner reconstruction of one value from its residues.
struct Garner {
    primes: Vec<u64>,
    /// inv[i] = (q_0 … q_{i-1})^{-1} mod q_i
    inv: Vec<u64>,
}

impl Garner {
    fn new(count: usize) -> Self {
        let primes: Vec<u64> = moduli()[..count].iter().map(|m| m.q).collect();
        let inv = (0..count)
            .map(|i| {
                let qi = primes[i];
                let prod = primes[..i]
                    .iter()
                    .fold(1u64, |acc, &q| (acc as u128 * (q % qi) as u128 % qi as u128) as u64);
                pow_mod_u128(prod, qi - 2, qi)
            })
            .collect();
        Garner { primes, inv }
    }

    fn reconstruct(&self, residues: &[u64]) -> BigUint {
        let k = self.primes.len();
        let mut digits = Vec::with_capacity(k);
        for i in 0..k {
            let qi = self.primes[i] as u128;
            // value of the partial mixed-radix number modulo q_i
            let mut v = 0u128;
            let mut coef = 1u128;
            for j in 0..i {
                v = (v + digits[j] as u128 % qi * coef) % qi;
                coef = coef * (self.primes[j] as u128 % qi) % qi;
            }
            let r = residues[i] as u128;
            let t = (r + qi - v) % qi * self.inv[i] as u128 % qi;
            digits.push(t as u64);
        }
        if k <= 2 {
            let mut x = digits[0] as u128;
            if k == 2 {
                x += digits[1] as u128 * self.primes[0] as u128;
            }
            return BigUint::from(x);
        }
        let mut x = BigUint::from(digits[k - 1]);
        for i in (0..k - 1).rev() {
            x *= self.primes[i];
            x += digits[i];
        }
        x
    }
}

fn residue_of(x: &BigUint, q: u64) -> u64 {
    (x % q).to_u64().expect("residue fits")
}

fn check_transform_len(len: usize) -> Result<usize> {
    let size = len.next_power_of_two();
    if size > 1usize << MAX_TRANSFORM_LOG2 {
        return Err(Error::ConvolutionTooLarge(len));
    }
    Ok(size)
}

/// Cyclic convolution `c[k] = Σ_{i+j ≡ k (mod L)} a[i] b[j]`.
pub fn cyclic_convolution(a: &[BigUint], b: &[BigUint], strategy: Strategy) -> Result<Vec<BigUint>> {
    assert_eq!(a.len(), b.len(), "cyclic convolution needs equal lengths");
    let len = a.len();
    if len == 0 {
        return Ok(Vec::new());
    }
    if !strategy.use_ntt(len) {
        return Ok(schoolbook_convolution(a, b));
    }
    let mass_a: BigUint = a.iter().sum();
    let mass_b: BigUint = b.iter().sum();
    let bound = mass_a * mass_b;
    if bound.is_zero() {
        return Ok(vec![BigUint::zero(); len]);
    }
    let count = moduli_for(&bound)?;
    let size = check_transform_len(2 * len - 1)?;
    let mut per_modulus = Vec::with_capacity(count);
    for m in &moduli()[..count] {
        let mut fa = vec![0u64; size];
        let mut fb = vec![0u64; size];
        for i in 0..len {
            fa[i] = m.to_mont(residue_of(&a[i], m.q));
            fb[i] = m.to_mont(residue_of(&b[i], m.q));
        }
        m.transform(&mut fa, false);
        m.transform(&mut fb, false);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = m.mul(*x, *y);
        }
        m.transform(&mut fa, true);
        per_modulus.push(fold(m, &fa, len));
    }
    Ok(reconstruct_all(&per_modulus, count, len))
}

/// `ell`-fold cyclic self-convolution of a count vector.
pub fn cyclic_power(hist: &[u64], ell: u32, strategy: Strategy) -> Result<Vec<BigUint>> {
    let len = hist.len();
    if ell == 0 {
        let mut out = vec![BigUint::zero(); len];
        if len > 0 {
            out[0] = BigUint::from(1u32);
        }
        return Ok(out);
    }
    if len == 0 {
        return Ok(Vec::new());
    }
    if !strategy.use_ntt(len) {
        let base: Vec<BigUint> = hist.iter().map(|&c| BigUint::from(c)).collect();
        let mut acc = base.clone();
        for _ in 1..ell {
            acc = schoolbook_convolution(&acc, &base);
        }
        return Ok(acc);
    }
    let mass: u64 = hist.iter().sum();
    let bound = BigUint::from(mass).pow(ell);
    if bound.is_zero() {
        return Ok(vec![BigUint::zero(); len]);
    }
    let linear_len = ell as usize * (len - 1) + 1;
    let Ok(size) = check_transform_len(linear_len) else {
        // the one-shot linear power is too long; fall back to cyclic squaring
        return power_by_squaring(hist, ell, strategy);
    };
    let count = moduli_for(&bound)?;
    let mut per_modulus = Vec::with_capacity(count);
    for m in &moduli()[..count] {
        let mut f = vec![0u64; size];
        for (slot, &c) in f.iter_mut().zip(hist) {
            *slot = m.to_mont(c);
        }
        m.transform(&mut f, false);
        for x in f.iter_mut() {
            *x = m.pow(*x, ell as u64);
        }
        m.transform(&mut f, true);
        per_modulus.push(fold(m, &f[..linear_len], len));
    }
    Ok(reconstruct_all(&per_modulus, count, len))
}

fn power_by_squaring(hist: &[u64], ell: u32, strategy: Strategy) -> Result<Vec<BigUint>> {
    let base: Vec<BigUint> = hist.iter().map(|&c| BigUint::from(c)).collect();
    let mut result: Option<Vec<BigUint>> = None;
    let mut square = base;
    let mut e = ell;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => square.clone(),
                Some(r) => cyclic_convolution(&r, &square, strategy)?,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        square = cyclic_convolution(&square, &square, strategy)?;
    }
    Ok(result.expect("ell >= 1"))
}

/// Folds a linear convolution (Montgomery form) modulo `len`, returning
/// plain residues.
fn fold(m: &NttPrime, linear: &[u64], len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    for (i, &x) in linear.iter().enumerate() {
        let k = i % len;
        out[k] = m.add(out[k], x);
    }
    out.into_iter().map(|x| m.from_mont(x)).collect()
}

fn reconstruct_all(per_modulus: &[Vec<u64>], count: usize, len: usize) -> Vec<BigUint> {
    if count == 1 {
        return per_modulus[0].iter().map(|&x| BigUint::from(x)).collect();
    }
    let garner = Garner::new(count);
    let mut residues = vec![0u64; count];
    (0..len)
        .map(|k| {
            for (slot, col) in residues.iter_mut().zip(per_modulus) {
                *slot = col[k];
            }
            garner.reconstruct(&residues)
        })
        .collect()
}

/// O(L²) big-integer cyclic convolution, skipping zero cells.
pub fn schoolbook_convolution(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    let len = a.len();
    let mut out = vec![BigUint::zero(); len];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[(i + j) % len] += x * y;
        }
    }
    out
}
