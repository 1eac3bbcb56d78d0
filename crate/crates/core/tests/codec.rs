use ecx_core::codec::{decode_nat, decode_rational, encode_nat, encode_rational, nat_len, rational_len};
use ecx_core::{BitString, Rational};
use proptest::prelude::*;

#[test]
fn small_codewords() {
    let table = [(1u64, "1"), (2, "0100"), (3, "0101"), (4, "01100"), (5, "01101"), (8, "00100000")];
    for (n, w) in table {
        assert_eq!(encode_nat(n).unwrap().to_string(), w, "n={n}");
    }
    assert_eq!(encode_rational(&Rational::new(1, 1)).unwrap().to_string(), "11");
    assert_eq!(encode_rational(&Rational::new(1, 2)).unwrap().to_string(), "10100");
    assert_eq!(rational_len(&Rational::new(3, 4)), 9);
}

#[test]
fn zero_is_rejected() {
    assert!(encode_nat(0).is_err());
    assert!(encode_rational(&Rational::new_raw(0, 1)).is_err());
    assert!(encode_rational(&Rational::new_raw(2, 4)).is_err());
}

#[test]
fn truncated_words_fail() {
    for n in [2u64, 17, 1000, u64::MAX] {
        let w = encode_nat(n).unwrap();
        for cut in 0..w.len() {
            assert!(decode_nat(&w.slice(0, cut)).is_err(), "n={n} cut={cut}");
        }
    }
}

#[test]
fn unreduced_rationals_are_decode_errors() {
    let mut b = encode_nat(2).unwrap();
    b.extend_from(&encode_nat(4).unwrap());
    assert!(decode_rational(&b).is_err());
}

proptest! {
    #[test]
    fn nat_round_trip(n in 1u64..=u64::MAX, tail in proptest::collection::vec(any::<bool>(), 0..16)) {
        let w = encode_nat(n).unwrap();
        prop_assert_eq!(w.len() as u64, nat_len(n));
        let fl = n.ilog2() as u64;
        prop_assert_eq!(nat_len(n), fl + 2 * (fl + 1).ilog2() as u64 + 1);
        let mut padded = w.clone();
        padded.extend_from(&BitString::from_bits(tail));
        prop_assert_eq!(decode_nat(&padded).unwrap(), (n, w.len()));
    }

    #[test]
    fn nat_prefix_free(a in 1u64..1 << 40, b in 1u64..1 << 40) {
        prop_assume!(a != b);
        let (wa, wb) = (encode_nat(a).unwrap(), encode_nat(b).unwrap());
        prop_assert!(!wa.is_prefix_of(&wb));
        prop_assert!(!wb.is_prefix_of(&wa));
    }

    #[test]
    fn rational_round_trip(a in 1u64..1 << 30, b in 1u64..1 << 30) {
        let r = Rational::new(a, b);
        let w = encode_rational(&r).unwrap();
        prop_assert_eq!(w.len() as u64, rational_len(&r));
        prop_assert_eq!(decode_rational(&w).unwrap(), (r, w.len()));
    }

    #[test]
    fn bytes_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
        let x = BitString::from_bits(bits);
        prop_assert_eq!(BitString::from_bytes(&x.to_bytes(), x.len()).unwrap(), x.clone());
        let hex = format!("hex:{}:{}", x.len(), x.to_hex());
        prop_assert_eq!(hex.parse::<BitString>().unwrap(), x);
    }
}
