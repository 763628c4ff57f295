//! Random windows on small primes: fast paths against enumeration.

use facmod::convolution::Strategy as Conv;
use facmod::field::is_prime;
use facmod::moments::{count_product_collisions_with, count_sum_collisions};
use facmod::refcheck::{oracle_d, oracle_f_table, oracle_g_table, oracle_i, oracle_j};
use facmod::repcount::{discrepancy, fixed_sum_table, representation_table, representation_table_with};
use facmod::sweep::ordered_map;
use facmod::{CountScalar, PrimeContext, SequenceKind, Window};
use proptest::prelude::*;

fn small_prime() -> impl Strategy<Value = u64> {
    (3u64..60).prop_filter("prime", |&n| is_prime(n))
}

fn kind() -> impl Strategy<Value = SequenceKind> {
    prop_oneof![
        Just(SequenceKind::Factorial),
        Just(SequenceKind::CentralBinomial),
        Just(SequenceKind::DoubleFactorial),
    ]
}

/// A window inside the nonvanishing range of the sequence.
fn setup() -> impl Strategy<Value = (PrimeContext, Window)> {
    (small_prime(), kind(), any::<u64>(), any::<u64>()).prop_filter_map("nonempty", |(p, k, x, y)| {
        let last = k.last_nonzero(p);
        if last == 0 {
            return None;
        }
        let h = x % last;
        let n = 1 + y % (last - h).min(8);
        Some((PrimeContext::new(p, k).ok()?, Window::new(h, n)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_match_enumeration((ctx, w) in setup(), ell in 1u32..=2) {
        let want = oracle_i(&ctx, w, ell).unwrap();
        for s in [Conv::Schoolbook, Conv::Ntt] {
            prop_assert_eq!(&count_product_collisions_with(&ctx, w, ell, s).unwrap(), &want);
        }
        prop_assert_eq!(count_sum_collisions(&ctx, w, ell).unwrap(), oracle_j(&ctx, w, ell).unwrap());
    }

    #[test]
    fn tables_match_enumeration((ctx, w) in setup(), ell in 1u32..=3) {
        let fast = representation_table(&ctx, w, ell).unwrap();
        let ntt = representation_table_with(&ctx, w, ell, Conv::Ntt).unwrap();
        let slow = oracle_f_table(&ctx, w, ell).unwrap();
        for a in 0..ctx.p() {
            prop_assert_eq!(fast.get(a), &CountScalar::from(slow[a as usize]));
            prop_assert_eq!(ntt.get(a), fast.get(a));
        }
        let total = CountScalar::from(w.len).pow(ell);
        prop_assert_eq!(fast.values().iter().sum::<CountScalar>(), total);
    }

    #[test]
    fn discrepancy_matches_endpoint_search((ctx, w) in setup(), ell in 1u32..=2, a in 1u64..1000) {
        let a = 1 + a % (ctx.p() - 1);
        let fast = discrepancy(&ctx, a, w, ell).unwrap();
        prop_assert_eq!(fast.ratio(), oracle_d(&ctx, a, w, ell).unwrap());
    }

    #[test]
    fn fixed_sums_match_compositions(p in small_prime(), n in 1u64..12, ell in 1u32..=3) {
        let ctx = PrimeContext::new(p, SequenceKind::Factorial).unwrap();
        let n = n.min(p - 1);
        prop_assume!(n >= ell as u64);
        let fast = fixed_sum_table(&ctx, n, ell, true).unwrap();
        let slow = oracle_g_table(&ctx, n, ell).unwrap();
        for a in 0..p as usize {
            prop_assert_eq!(&fast[a], &CountScalar::from(slow[a]));
        }
    }
}

#[test]
fn parallel_tables_are_ordered() {
    let primes: Vec<u64> = (3..200).filter(|&n| is_prime(n)).collect();
    let run = |jobs| {
        ordered_map(&primes, jobs, |&p| {
            let ctx = PrimeContext::new(p, SequenceKind::Factorial).unwrap();
            representation_table(&ctx, Window::full(p), 2).unwrap().values().to_vec()
        })
    };
    assert_eq!(run(1), run(4));
}
