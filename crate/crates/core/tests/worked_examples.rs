//! Small cases worked out by hand or by direct enumeration inside the test.

use facmod::constructions::{
    classify_power_residues, count_q, count_qm, distinct_record, find_primroot_factorial, guy_row,
    nonresidue_spacings, search_representation, v2_witness_count, wilson_pair, wilson_representation,
};
use facmod::moments::{additive_moment, count_product_collisions, count_sum_collisions, multiplicative_moment};
use facmod::repcount::{discrepancy, fixed_sum_count, max_multiplicity, representation_table, value_set_size};
use facmod::spectrum::{additive_sum, character_sum, multiplicative_spectrum, PhasePolynomial};
use facmod::{CountScalar, Error, PrimeContext, SequenceKind, Window};

fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p, SequenceKind::Factorial).unwrap()
}

fn big(x: u64) -> CountScalar {
    CountScalar::from(x)
}

#[test]
fn index_tables() {
    let c = ctx(7);
    assert_eq!(c.generator(), 3);
    assert_eq!((c.index(2).unwrap(), c.index(6).unwrap()), (2, 3));
    assert_eq!(c.sequence_residues(Window::full(7)).unwrap(), [1, 2, 6, 3, 1, 6]);
    assert_eq!(ctx(5).sequence_residues(Window::full(5)).unwrap(), [1, 2, 1, 4]);
    assert!(matches!(PrimeContext::new(9, SequenceKind::Factorial), Err(Error::NotPrime(9))));
    assert_eq!((c.legendre(2), c.legendre(3), c.legendre(0)), (1, -1, 0));
}

#[test]
fn character_sums() {
    let zero = PhasePolynomial::zero();
    let t = character_sum(&ctx(7), 3, &zero, Window::full(7)).unwrap();
    assert!(t.re.abs() < 1e-12 && t.im.abs() < 1e-12);
    let t = character_sum(&ctx(5), 1, &zero, Window::full(5)).unwrap();
    assert!((t.re - 1.0).abs() < 1e-12 && (t.im - 1.0).abs() < 1e-12);
    let s = additive_sum(&ctx(3), 1, Window::full(3)).unwrap();
    assert!((s.re + 1.0).abs() < 1e-12 && s.im.abs() < 1e-12);

    let t = multiplicative_spectrum(&ctx(5), &zero, Window::full(5)).unwrap();
    let mags: Vec<f64> = t.values.iter().map(|z| z.norm_sqr()).collect();
    for (m, want) in mags.iter().zip([16.0, 2.0, 4.0, 2.0]) {
        assert!((m - want).abs() < 1e-9);
    }
}

#[test]
fn moment_counts() {
    let w = Window::full(5);
    assert_eq!(count_product_collisions(&ctx(5), w, 1).unwrap(), big(6));
    assert_eq!(count_product_collisions(&ctx(5), w, 2).unwrap(), big(70));
    assert_eq!(count_sum_collisions(&ctx(3), Window::full(3), 1).unwrap(), big(2));
    assert_eq!(count_sum_collisions(&ctx(5), w, 1).unwrap(), big(6));
    assert_eq!(count_product_collisions(&ctx(11), Window::new(4, 1), 3).unwrap(), big(1));
    let t = multiplicative_moment(&ctx(5), &PhasePolynomial::zero(), w, 1).unwrap();
    assert!((t - 24.0).abs() < 1e-9);
    assert!((additive_moment(&ctx(5), w, 1).unwrap() - 30.0).abs() < 1e-9);
    assert!((additive_moment(&ctx(3), Window::full(3), 1).unwrap() - 6.0).abs() < 1e-9);
}

#[test]
fn representation_counts() {
    let t = representation_table(&ctx(5), Window::full(5), 2).unwrap();
    let f: Vec<_> = (1..5).map(|a| t.get(a).clone()).collect();
    assert_eq!(f, [big(5), big(4), big(2), big(5)]);
    assert_eq!(value_set_size(&ctx(7), Window::full(7), 1).unwrap(), 4);
    assert_eq!(value_set_size(&ctx(7), Window::full(7), 2).unwrap(), 6);
    assert_eq!(max_multiplicity(&ctx(7), Window::full(7)).unwrap(), (1, 2));
    assert_eq!(max_multiplicity(&ctx(5), Window::full(5)).unwrap(), (1, 2));
    assert_eq!(fixed_sum_count(&ctx(5), 1, 4, 2, true).unwrap(), big(2));
    assert_eq!(fixed_sum_count(&ctx(5), 4, 4, 2, true).unwrap(), big(1));
}

#[test]
fn discrepancy_of_five() {
    let d = discrepancy(&ctx(5), 1, Window::full(5), 1).unwrap();
    assert_eq!((d.numerator.as_str(), d.denominator.as_str()), ("11", "20"));
    assert!((d.d - 0.55).abs() < 1e-15);
}

#[test]
fn wilson_constructions() {
    let c = ctx(7);
    assert_eq!(wilson_pair(&c, 3).unwrap(), 1);
    assert_eq!(wilson_pair(&c, 6).unwrap(), 6);
    let w = wilson_representation(&c, 3).unwrap();
    assert_eq!((w.b, w.r_b, w.factors.as_slice()), (5, 0, &[4, 1][..]));
    let w = wilson_representation(&c, 6).unwrap();
    assert_eq!(w.factors[0], 6);
}

#[test]
fn spacings_of_seven() {
    let r = nonresidue_spacings(&ctx(7), 3).unwrap();
    assert_eq!(r.d, [3, 2, 1]);
    assert_eq!((r.alt_sum, r.legendre_sum), (2, 2));
    assert_eq!(r.d.iter().sum::<u64>(), r.nonresidues[2]);
}

#[test]
fn primitive_roots() {
    assert_eq!(find_primroot_factorial(&ctx(7)).n, Some(4));
    assert_eq!(find_primroot_factorial(&ctx(5)).n, Some(2));
    assert_eq!(find_primroot_factorial(&ctx(3)).n, Some(2));
    assert_eq!(count_q(&ctx(7), Window::full(7)).unwrap(), 1);
    assert_eq!(count_qm(&ctx(7), 2, Window::full(7)).unwrap(), 0);
    assert_eq!(classify_power_residues(&ctx(7), &[2, 3], Window::full(7)).unwrap(), 2);
    assert_eq!(classify_power_residues(&ctx(7), &[], Window::full(7)).unwrap(), 1);
}

#[test]
fn value_set_witness() {
    let r = v2_witness_count(&ctx(7)).unwrap();
    assert_eq!((r.w, r.v2), (1, 6));
    assert!((r.derived_bound - 3.5).abs() < 1e-12);
    assert_eq!(v2_witness_count(&ctx(5)).unwrap().w, 1);
}

#[test]
fn scans_and_searches() {
    assert!(!distinct_record(7).is_distinct);
    assert_eq!(distinct_record(5).missing_residue, Some(3));
    let t = search_representation(&ctx(7), 5, 2, 6).unwrap().unwrap();
    assert_eq!(t.iter().map(|&n| (1..=n).product::<u64>()).product::<u64>() % 7, 5);
    assert_eq!(search_representation(&ctx(7), 1, 1, 6).unwrap(), Some(vec![1]));
    assert_eq!(guy_row(7).v1, 4);
    assert_eq!(guy_row(5).v1, 3);
}
