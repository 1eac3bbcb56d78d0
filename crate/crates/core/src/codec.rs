//! Prefix-free codes for positive integers and positive rationals.
//!
//! Every description length in the crate is a sum of lengths produced here.
//! Naturals use the Elias-delta code: the bit length `L` of `n` is written
//! with the Elias-gamma code, followed by the `L - 1` bits of `n` below its
//! leading one. Rationals `a/b` in lowest terms are the concatenation
//! `delta(a) ++ delta(b)`.

use num_integer::Integer;

use crate::bits::{BitReader, BitString};
use crate::error::{decode, domain, Result};
use crate::Rational;

/// Number of bits in the binary representation of `n` (`floor(log2 n) + 1`).
fn bit_width(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// Length of the Elias-delta codeword for `n >= 1`:
/// `floor(log2 n) + 2 floor(log2(floor(log2 n) + 1)) + 1`.
pub fn nat_len(n: u64) -> u64 {
    assert!(n >= 1, "Elias-delta is undefined for 0");
    let w = bit_width(n) as u64;
    let ww = bit_width(w) as u64;
    (w - 1) + 2 * (ww - 1) + 1
}

pub fn encode_nat(n: u64) -> Result<BitString> {
    if n == 0 {
        return Err(domain("Elias-delta code requires n >= 1"));
    }
    let mut out = BitString::with_capacity(nat_len(n) as usize);
    write_nat(&mut out, n);
    Ok(out)
}

/// Appends `delta(n)` to `out`. Panics on `n = 0`.
pub fn write_nat(out: &mut BitString, n: u64) {
    assert!(n >= 1, "Elias-delta is undefined for 0");
    let w = bit_width(n) as usize;
    let ww = bit_width(w as u64) as usize;
    // gamma(w): ww-1 zeros then w in ww bits
    out.push_u64(0, ww - 1);
    out.push_u64(w as u64, ww);
    out.push_u64(n, w - 1);
}

/// Decodes one codeword from the front of `b`, returning the value and the
/// number of bits consumed.
pub fn decode_nat(b: &BitString) -> Result<(u64, usize)> {
    let mut r = BitReader::new(b);
    let n = read_nat(&mut r)?;
    Ok((n, r.position()))
}

pub fn read_nat(r: &mut BitReader<'_>) -> Result<u64> {
    let mut zeros = 0usize;
    while !r.read_bit()? {
        zeros += 1;
        if zeros > 6 {
            return Err(decode("Elias-delta length prefix exceeds 64-bit range"));
        }
    }
    let w = (1u64 << zeros) | r.read_u64(zeros)?;
    if w > 64 {
        return Err(decode(format!("Elias-delta bit width {w} exceeds 64")));
    }
    let low = r.read_u64(w as usize - 1)?;
    Ok(if w == 64 {
        (1u64 << 63) | low
    } else {
        (1u64 << (w - 1)) | low
    })
}

/// Length of `encode_rational(r)` for a positive rational in lowest terms.
pub fn rational_len(r: &Rational) -> u64 {
    nat_len(*r.numer()) + nat_len(*r.denom())
}

pub fn encode_rational(r: &Rational) -> Result<BitString> {
    let (a, b) = (*r.numer(), *r.denom());
    if a == 0 || b == 0 {
        return Err(domain(format!("rational {a}/{b} must have a >= 1 and b >= 1")));
    }
    if a.gcd(&b) != 1 {
        return Err(domain(format!("rational {a}/{b} is not in lowest terms")));
    }
    let mut out = BitString::with_capacity(rational_len(r) as usize);
    write_nat(&mut out, a);
    write_nat(&mut out, b);
    Ok(out)
}

pub fn decode_rational(b: &BitString) -> Result<(Rational, usize)> {
    let mut r = BitReader::new(b);
    let q = read_rational(&mut r)?;
    Ok((q, r.position()))
}

pub fn read_rational(r: &mut BitReader<'_>) -> Result<Rational> {
    let a = read_nat(r)?;
    let b = read_nat(r)?;
    if a.gcd(&b) != 1 {
        return Err(decode(format!("rational {a}/{b} is not in lowest terms")));
    }
    Ok(Rational::new_raw(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn small_codewords() {
        assert_eq!(encode_nat(1).unwrap().to_string(), "1");
        assert_eq!(encode_nat(2).unwrap().to_string(), "0100");
        assert_eq!(encode_nat(3).unwrap().to_string(), "0101");
        assert_eq!(encode_nat(4).unwrap().to_string(), "01100");
        assert_eq!(encode_nat(8).unwrap().len(), 8);
        assert_eq!(encode_nat(8).unwrap().to_string(), "00100000");
    }

    #[test]
    fn zero_is_a_domain_error() {
        assert!(matches!(encode_nat(0), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn decode_respects_prefix() {
        assert_eq!(decode_nat(&bits("1")).unwrap(), (1, 1));
        assert_eq!(decode_nat(&bits("0100")).unwrap(), (2, 4));
        assert_eq!(decode_nat(&bits("0100111")).unwrap(), (2, 4));
        assert!(decode_nat(&bits("010")).is_err());
        assert!(decode_nat(&bits("")).is_err());
        assert!(decode_nat(&bits("0000000000")).is_err());
    }

    #[test]
    fn extreme_values() {
        for n in [u64::MAX, 1 << 63, (1 << 63) - 1, 1 << 32] {
            let c = encode_nat(n).unwrap();
            assert_eq!(c.len() as u64, nat_len(n));
            assert_eq!(decode_nat(&c).unwrap(), (n, c.len()));
        }
    }

    #[test]
    fn rationals() {
        let r = |a, b| Rational::new(a, b);
        assert_eq!(encode_rational(&r(1, 1)).unwrap().to_string(), "11");
        assert_eq!(encode_rational(&r(1, 2)).unwrap().to_string(), "10100");
        assert_eq!(encode_rational(&r(3, 4)).unwrap().len(), 9);
        assert_eq!(decode_rational(&bits("11")).unwrap(), (r(1, 1), 2));
        assert_eq!(decode_rational(&bits("10100")).unwrap(), (r(1, 2), 5));
        assert_eq!(decode_rational(&bits("110110")).unwrap(), (r(1, 1), 2));
        // 2/2 is not canonical
        assert!(decode_rational(&bits("01000100")).is_err());
        assert!(encode_rational(&Rational::new_raw(2, 4)).is_err());
        assert!(encode_rational(&Rational::new_raw(0, 1)).is_err());
    }
}
