//! Prime-field context: primality, the smallest primitive root, the
//! discrete-logarithm (index) table and the residues of the studied
//! sequences (n!, central binomial coefficients, odd double factorials).
//!
//! Everything downstream works either with residues `u(n) mod p` or with
//! their indices `ind(u(n)) ∈ Z/(p-1)`, so the context materialises both
//! the index table and the power table of the primitive root once.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted modulus. Residues fit in `u32` and products of two
/// residues fit in `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    a * b % m
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime divisors of `n` in increasing order.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    prime_divisors(n)
        .into_iter()
        .fold(n, |acc, q| acc / q * (q - 1))
}

/// Odd primes in `[lo, hi]`, ascending, by a sieve of Eratosthenes.
pub fn odd_primes_between(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 3 || lo > hi {
        return Vec::new();
    }
    let hi_us = hi as usize;
    let mut composite = vec![false; hi_us + 1];
    let mut i = 2usize;
    while i * i <= hi_us {
        if !composite[i] {
            let mut j = i * i;
            while j <= hi_us {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (lo.max(3)..=hi)
        .filter(|&n| n % 2 == 1 && !composite[n as usize])
        .collect()
}

/// The sequence whose residues are studied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    /// u(n) = n!
    Factorial,
    /// u(n) = binom(2n, n)
    CentralBinomial,
    /// u(n) = (2n+1)!! = 1·3·…·(2n+1)
    DoubleFactorial,
}

impl SequenceKind {
    pub fn name(self) -> &'static str {
        match self {
            SequenceKind::Factorial => "factorial",
            SequenceKind::CentralBinomial => "central-binomial",
            SequenceKind::DoubleFactorial => "double-factorial",
        }
    }

    /// Largest n for which the running recurrence stays invertible, i.e.
    /// `u(1), …, u(n)` are all nonzero modulo p.
    pub fn last_nonzero(self, p: u64) -> u64 {
        match self {
            SequenceKind::Factorial => p - 1,
            // multipliers 2(2n-1) and divisors n stay nonzero while 2n-1 < p
            SequenceKind::CentralBinomial => (p - 1) / 2,
            // multipliers 2n+1 stay nonzero while 2n+1 < p
            SequenceKind::DoubleFactorial => (p - 3) / 2,
        }
    }
}

impl std::fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SequenceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "factorial" => Ok(SequenceKind::Factorial),
            "central-binomial" => Ok(SequenceKind::CentralBinomial),
            "double-factorial" => Ok(SequenceKind::DoubleFactorial),
            other => Err(format!(
                "unknown sequence kind {other:?} (expected factorial, central-binomial or double-factorial)"
            )),
        }
    }
}

/// Summation range `n = H+1, …, H+N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    /// H
    pub offset: u64,
    /// N
    pub len: u64,
}

impl Window {
    pub fn new(offset: u64, len: u64) -> Self {
        Window { offset, len }
    }

    /// The full window `(0, p-1)`.
    pub fn full(p: u64) -> Self {
        Window::new(0, p - 1)
    }

    pub fn first(&self) -> u64 {
        self.offset + 1
    }

    pub fn last(&self) -> u64 {
        self.offset + self.len
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.first()..=self.last()
    }
}

/// Serializable summary of a context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSummary {
    pub p: u64,
    pub g: u64,
    pub kind: SequenceKind,
}

/// Immutable per-prime precomputation.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u64,
    g: u64,
    kind: SequenceKind,
    /// `ind[x]` for x in 1..p; `ind[0]` is a sentinel and never read.
    ind: Vec<u32>,
    /// `pow[k] = g^k mod p` for k in 0..p-1.
    pow: Vec<u32>,
    order_divisors: Vec<u64>,
}

impl PrimeContext {
    pub fn new(p: u64, kind: SequenceKind) -> Result<Self> {
        if p < 3 || p % 2 == 0 {
            return Err(Error::EvenOrTooSmall(p));
        }
        if p > MAX_MODULUS {
            return Err(Error::ModulusTooLarge {
                value: p,
                max: MAX_MODULUS,
            });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let order_divisors = prime_divisors(p - 1);
        let g = (2..p)
            .find(|&g| order_divisors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
            .expect("every prime has a primitive root");

        let n = (p - 1) as usize;
        let mut ind = vec![u32::MAX; p as usize];
        let mut pow = Vec::with_capacity(n);
        let mut x = 1u64;
        for k in 0..n {
            pow.push(x as u32);
            ind[x as usize] = k as u32;
            x = mul_mod(x, g, p);
        }
        debug_assert_eq!(x, 1);

        Ok(PrimeContext {
            p,
            g,
            kind,
            ind,
            pow,
            order_divisors,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The smallest primitive root.
    pub fn generator(&self) -> u64 {
        self.g
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    /// Order of the multiplicative group, p-1.
    pub fn group_order(&self) -> u64 {
        self.p - 1
    }

    /// Distinct prime divisors of p-1.
    pub fn order_divisors(&self) -> &[u64] {
        &self.order_divisors
    }

    pub fn summary(&self) -> ContextSummary {
        ContextSummary {
            p: self.p,
            g: self.g,
            kind: self.kind,
        }
    }

    /// Discrete logarithm of `x` to base g. The index of 0 is undefined.
    pub fn index(&self, x: u64) -> Result<u64> {
        if x == 0 || x >= self.p {
            return Err(Error::OutOfRange {
                what: "x",
                value: x,
                expected: format!("1..={}", self.p - 1),
            });
        }
        Ok(self.ind[x as usize] as u64)
    }

    /// Index of a residue already known to be in `1..p`.
    #[inline]
    pub(crate) fn index_of(&self, x: u64) -> u64 {
        debug_assert!(x != 0 && x < self.p);
        self.ind[x as usize] as u64
    }

    /// `g^k mod p`.
    #[inline]
    pub fn power(&self, k: u64) -> u64 {
        self.pow[(k % (self.p - 1)) as usize] as u64
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inverse(&self, x: u64) -> Result<u64> {
        let x = x % self.p;
        if x == 0 {
            return Err(Error::NonInvertibleMultiplier(x));
        }
        let k = self.index_of(x);
        Ok(self.power((self.p - 1 - k) % (self.p - 1)))
    }

    /// Legendre symbol (x/p), read off the parity of the index.
    pub fn legendre(&self, x: u64) -> i8 {
        let x = x % self.p;
        if x == 0 {
            0
        } else if self.index_of(x) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// True when `x` generates the multiplicative group.
    pub fn is_primitive_root(&self, x: u64) -> bool {
        let x = x % self.p;
        x != 0 && num_integer::gcd(self.index_of(x), self.p - 1) == 1
    }

    pub fn check_window(&self, w: Window) -> Result<()> {
        let err = |reason| Error::WindowOutOfRange {
            p: self.p,
            offset: w.offset,
            len: w.len,
            reason,
        };
        if w.len == 0 {
            return Err(err("N must be at least 1"));
        }
        if w.offset.checked_add(w.len).map_or(true, |end| end >= self.p) {
            return Err(err("H+N must be below p"));
        }
        if w.last() > self.kind.last_nonzero(self.p) {
            return Err(err("the sequence vanishes modulo p inside the window"));
        }
        Ok(())
    }

    /// Residues `u(n) mod p` for `n = H+1, …, H+N`, by the running recurrence.
    pub fn sequence_residues(&self, w: Window) -> Result<Vec<u64>> {
        self.check_window(w)?;
        let mut out = Vec::with_capacity(w.len as usize);
        let mut u = 1u64;
        for n in 1..=w.last() {
            u = self.step(u, n);
            if n >= w.first() {
                out.push(u);
            }
        }
        Ok(out)
    }

    /// Indices `ind(u(n))` for the window.
    pub fn sequence_indices(&self, w: Window) -> Result<Vec<u64>> {
        Ok(self
            .sequence_residues(w)?
            .into_iter()
            .map(|x| self.index_of(x))
            .collect())
    }

    /// Residues `u(n) mod p` for `n = first, …, last`, continuing past the
    /// nonvanishing range with the exact value 0 where the sequence is known
    /// to be divisible by p. Fails where that value is not simply 0
    /// (central binomial coefficients at n ≥ p).
    pub fn extended_residues(&self, first: u64, last: u64) -> Result<Vec<u64>> {
        if first == 0 || first > last {
            return Err(Error::BadRange {
                lo: first,
                hi: last,
            });
        }
        if self.kind == SequenceKind::CentralBinomial && last >= self.p {
            return Err(Error::WindowOutOfRange {
                p: self.p,
                offset: first - 1,
                len: last - first + 1,
                reason: "central binomial residues at n >= p are not tracked",
            });
        }
        let limit = self.kind.last_nonzero(self.p);
        let mut out = Vec::with_capacity((last - first + 1) as usize);
        let mut u = 1u64;
        for n in 1..=last {
            u = if n <= limit { self.step(u, n) } else { 0 };
            if n >= first {
                out.push(u);
            }
        }
        Ok(out)
    }

    /// One step of the defining recurrence, `u(n)` from `u(n-1)`.
    #[inline]
    fn step(&self, prev: u64, n: u64) -> u64 {
        let p = self.p;
        match self.kind {
            SequenceKind::Factorial => mul_mod(prev, n % p, p),
            SequenceKind::CentralBinomial => {
                let num = mul_mod(2, (2 * n - 1) % p, p);
                let inv_n = self.inverse(n).expect("n < p inside the nonvanishing range");
                mul_mod(mul_mod(prev, num, p), inv_n, p)
            }
            SequenceKind::DoubleFactorial => mul_mod(prev, (2 * n + 1) % p, p),
        }
    }
}

/// Residues of `0!, 1!, …, (p-1)!` modulo p.
pub fn factorial_table(p: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(p as usize);
    let mut f = 1u64;
    out.push(1);
    for n in 1..p {
        f = mul_mod(f, n, p);
        out.push(f);
    }
    out
}
