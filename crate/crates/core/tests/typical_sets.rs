use ecx_core::typical_sets::LzHistogram;
use ecx_core::{lz78, BitString, Error, ProcessModel, Rational, TypicalSetSpec};

#[test]
fn membership_is_a_strict_threshold() {
    // code_len("00") = 2, so "00" needs r n > 2
    let x: BitString = "00".parse().unwrap();
    assert!(!TypicalSetSpec::new(Rational::new(1, 1), 2).unwrap().contains(&x).unwrap());
    assert!(TypicalSetSpec::new(Rational::new(5, 4), 2).unwrap().contains(&x).unwrap());
}

#[test]
fn enumeration_agrees_with_cardinality() {
    for n in 1..=12usize {
        for k in 1..=16u64 {
            let spec = TypicalSetSpec::new(Rational::new(k, 8), n as u64).unwrap();
            let members = spec.enumerate().unwrap();
            assert_eq!(members.len() as u64, spec.cardinality().unwrap());
            assert!(members.windows(2).all(|w| w[0] < w[1]));
            for x in &members {
                assert!(lz78::code_len(x).unwrap() * 8 < k * n as u64);
            }
        }
    }
}

#[test]
fn size_bound_small_cases() {
    for n in 1..=16usize {
        let h = LzHistogram::for_length(n);
        assert_eq!(h.counts().iter().sum::<u64>(), 1 << n);
        for k in 1..=16u64 {
            let spec = TypicalSetSpec::new(Rational::new(k, 8), n as u64).unwrap();
            let card = h.count_below(&spec) as f64;
            assert!(card <= (k as f64 * n as f64 / 8.0).exp2(), "n={n} k={k}");
        }
    }
}

#[test]
fn large_n_enumeration_is_refused() {
    let spec = TypicalSetSpec::new(Rational::new(1, 2), 40).unwrap();
    assert!(matches!(spec.cardinality(), Err(Error::ResourceBound(_))));
    assert!(matches!(spec.enumerate(), Err(Error::ResourceBound(_))));
}

#[test]
fn empirical_probability_is_reproducible_and_sensible() {
    let m: ProcessModel = "markov:flip=1/10".parse().unwrap();
    let spec = TypicalSetSpec::new(Rational::new(3, 4), 1 << 15).unwrap();
    let a = spec.empirical_prob(&m, 40, 5).unwrap();
    assert_eq!(a, spec.empirical_prob(&m, 40, 5).unwrap());
    assert!(a > 0.9, "{a}");
    let loose = TypicalSetSpec::new(Rational::new(2, 1), 1 << 12).unwrap();
    assert_eq!(loose.empirical_prob(&"bernoulli:p=1/2".parse().unwrap(), 20, 1).unwrap(), 1.0);
}
