//! Helpers around [`Rational`], the exact positive-rational type used for
//! probabilities, rates and thresholds.

use crate::error::{Error, Result};
use crate::Rational;

/// Parses `a/b` or a bare integer `a`. The result is reduced.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (a, b) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let a: u64 = a
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let b: u64 = b
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if b == 0 {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(a, b))
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Renders as `a/b` (always with the slash, so output stays exact text).
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `r * n` compared exactly: returns `ceil(r * n)`.
pub fn ceil_mul(r: &Rational, n: u64) -> u64 {
    let num = *r.numer() as u128 * n as u128;
    let den = *r.denom() as u128;
    num.div_ceil(den) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        assert_eq!(parse_rational("2/4").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("3").unwrap(), Rational::new(3, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert_eq!(format(&Rational::new(2, 1)), "2/1");
        assert_eq!(ceil_mul(&Rational::new(1, 3), 4), 2);
        assert_eq!(ceil_mul(&Rational::new(1, 2), 4), 2);
    }
}
