//! Exact rational scalars.
//!
//! All arithmetic in the mathematical core runs over arbitrary-precision
//! rationals kept in lowest terms with positive denominator, which is what
//! `num::BigRational` provides. Rationals cross file formats as `"p/q"`
//! strings, never as floats.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    assert!(d != 0, "zero denominator");
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

pub fn is_one(r: &Rational) -> bool {
    r.is_one()
}

pub fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

/// Formats as `"p/q"`, or just `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Parses `"p/q"` or a plain integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    match t.parse::<Rational>() {
        Ok(r) => Ok(r),
        Err(_) => Err(format!("invalid rational `{t}` (expected `p/q` or an integer)")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/2", "-3/8", "5", "0", "22/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn parse_normalizes() {
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(format_rational(&parse_rational("6/3").unwrap()), "2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("0.5").is_err());
    }
}
