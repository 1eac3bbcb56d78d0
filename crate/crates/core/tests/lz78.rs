use ecx_core::codec::nat_len;
use ecx_core::{lz78, BitString, ProcessModel};
use proptest::prelude::*;

#[test]
fn parse_of_worked_example() {
    let x: BitString = "1011010100010".parse().unwrap();
    let p = lz78::parse(&x).unwrap();
    assert_eq!(p.phrases.len(), 7);
    assert_eq!(p.code_len(), 21);
    assert_eq!(p.reconstruct(), x);
}

#[test]
fn long_runs_compress() {
    let x = BitString::zeros(4096);
    assert!(lz78::code_len(&x).unwrap() <= 1024);
    assert_eq!(lz78::decode(&lz78::encode(&x).unwrap()).unwrap(), x);
}

#[test]
fn million_bit_strings_round_trip() {
    for (i, spec) in ["bernoulli:p=1/2", "markov:flip=1/10", "bernoulli:p=1/64"].iter().enumerate() {
        let m: ProcessModel = spec.parse().unwrap();
        let x = m.sample(1 << 20, i as u64).unwrap();
        let b = lz78::encode(&x).unwrap();
        assert_eq!(b.len() as u64, nat_len(1 << 20) + lz78::code_len(&x).unwrap());
        assert_eq!(lz78::decode(&b).unwrap(), x);
    }
}

#[test]
fn malformed_streams_are_rejected() {
    let x: BitString = "0110100110010110".parse().unwrap();
    let b = lz78::encode(&x).unwrap();
    for cut in 0..b.len() {
        assert!(lz78::decode(&b.slice(0, cut)).is_err(), "cut={cut}");
    }
    let mut extra = b.clone();
    extra.push(false);
    assert!(lz78::decode(&extra).is_err());
    assert!(lz78::parse(&BitString::new()).is_err());
}

proptest! {
    #[test]
    fn round_trip(bits in proptest::collection::vec(any::<bool>(), 1..3000)) {
        let x = BitString::from_bits(bits);
        let b = lz78::encode(&x).unwrap();
        prop_assert_eq!(b.len() as u64, nat_len(x.len() as u64) + lz78::code_len(&x).unwrap());
        prop_assert_eq!(lz78::decode(&b).unwrap(), x);
    }

    #[test]
    fn phrases_are_distinct_and_grow_the_dictionary(bits in proptest::collection::vec(any::<bool>(), 1..500)) {
        let x = BitString::from_bits(bits);
        let p = lz78::parse(&x).unwrap();
        let mut seen = std::collections::HashSet::new();
        for (j, ph) in p.phrases.iter().enumerate() {
            prop_assert!((ph.parent as usize) <= j);
            if ph.bit.is_some() {
                prop_assert!(seen.insert((ph.parent, ph.bit)));
            }
        }
        let (complete, partial) = lz78::phrase_counts(x.bits());
        prop_assert_eq!(complete, p.complete_count);
        prop_assert_eq!(partial, p.has_partial);
    }
}
