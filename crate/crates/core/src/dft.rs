//! Exact-length discrete Fourier transforms in double precision.
//!
//! Arbitrary lengths go through the chirp-Z (Bluestein) reduction to a
//! power-of-two cyclic convolution. The transform computed here is
//!
//! ```text
//! X[j] = Σ_k x[k] · exp(+2πi·jk/n)
//! ```
//!
//! which is the sign convention of the character sums downstream
//! (χ_j(g^k) = exp(2πi·jk/(p-1)) and e(ac) = exp(2πi·ac/p)).

use std::f64::consts::TAU;

use num_complex::Complex64;

/// Neumaier-compensated accumulator for real sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedComplex {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `exp(2πi·num/den)` with `num` reduced modulo `den` before the float
/// conversion.
#[inline]
pub fn unit_root(num: u64, den: u64) -> Complex64 {
    let r = num % den;
    let (s, c) = (TAU * (r as f64 / den as f64)).sin_cos();
    Complex64::new(c, s)
}

/// In-place radix-2 FFT with the given exponent sign (+1 or -1).
fn fft_pow2(buf: &mut [Complex64], sign: f64) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| {
                let z = unit_root(k as u64, len as u64);
                Complex64::new(z.re, sign * z.im)
            })
            .collect();
        for chunk in buf.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let t = hi[k] * twiddles[k];
                hi[k] = lo[k] - t;
                lo[k] += t;
            }
        }
        len <<= 1;
    }
}

/// `X[j] = Σ_k x[k] exp(+2πi jk/n)` for any length n.
pub fn dft(input: &[Complex64]) -> Vec<Complex64> {
    let n = input.len();
    if n == 0 {
        return Vec::new();
    }
    if n.is_power_of_two() {
        let mut buf = input.to_vec();
        fft_pow2(&mut buf, 1.0);
        return buf;
    }
    // Bluestein: jk = (j² + k² - (j-k)²)/2, so with c[m] = exp(iπ m²/n)
    // X[j] = c[j] · Σ_k (x[k] c[k]) · conj(c[j-k]).
    let two_n = 2 * n as u64;
    let chirp: Vec<Complex64> = (0..n as u64)
        .map(|m| unit_root((m as u128 * m as u128 % two_n as u128) as u64, two_n))
        .collect();
    let size = (2 * n - 1).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); size];
    let mut b = vec![Complex64::new(0.0, 0.0); size];
    for k in 0..n {
        a[k] = input[k] * chirp[k];
    }
    b[0] = chirp[0].conj();
    for m in 1..n {
        let c = chirp[m].conj();
        b[m] = c;
        b[size - m] = c;
    }
    fft_pow2(&mut a, -1.0);
    fft_pow2(&mut b, -1.0);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    fft_pow2(&mut a, 1.0);
    let scale = 1.0 / size as f64;
    (0..n).map(|j| a[j] * scale * chirp[j]).collect()
}

/// Transform of a real, integer-valued vector (a histogram).
pub fn dft_of_counts(counts: &[u64]) -> Vec<Complex64> {
    let input: Vec<Complex64> = counts
        .iter()
        .map(|&c| Complex64::new(c as f64, 0.0))
        .collect();
    dft(&input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(input: &[Complex64]) -> Vec<Complex64> {
        let n = input.len() as u64;
        (0..n)
            .map(|j| {
                let mut acc = CompensatedComplex::new();
                for (k, x) in input.iter().enumerate() {
                    acc.add(*x * unit_root(j * k as u64, n));
                }
                acc.value()
            })
            .collect()
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::new();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn histogram_example() {
        // indices [0,1,0,2] of the factorials mod 5
        let out = dft_of_counts(&[2, 1, 1, 0]);
        let mags: Vec<f64> = out.iter().map(|z| z.norm_sqr()).collect();
        for (m, e) in mags.iter().zip([16.0, 2.0, 4.0, 2.0]) {
            assert!((m - e).abs() < 1e-12);
        }
        assert!((out[1] - Complex64::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn lengths_three_and_six() {
        let out = dft_of_counts(&[0, 1, 1]);
        assert!((out[0].re - 2.0).abs() < 1e-12);
        assert!((out[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let x: Vec<Complex64> = (0..6).map(|k| Complex64::new(k as f64, -(k as f64) / 2.0)).collect();
        for (a, b) in dft(&x).iter().zip(naive(&x)) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn matches_naive_transform(values in prop::collection::vec(-50i32..50, 1..80)) {
            let x: Vec<Complex64> = values
                .iter()
                .enumerate()
                .map(|(i, &v)| Complex64::new(v as f64, (i as i32 - v) as f64))
                .collect();
            let fast = dft(&x);
            let slow = naive(&x);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).norm() < 1e-8 * (1.0 + b.norm()));
            }
        }
    }
}
