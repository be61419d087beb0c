use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Division that reports a zero divisor instead of panicking.
pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

/// `"p/q"`, or just `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Parses `"p/q"` or `"p"` into canonical form.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let d: BigInt = d
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{Inv, One};

    #[test]
    fn small_fraction_arithmetic() {
        assert_eq!(rat(1, 6) + rat(-1, 30), rat(2, 15));
        let z = rat(1, 2) * rat(0, 1);
        assert!(z.is_zero());
        assert!(z.denom().is_one());
        assert_eq!(rat(1, 5760).inv(), rat_int(5760));
        assert!(rat(1, 3) < rat(1, 2));
        assert_eq!(-rat(2, 4), rat(-1, 2));
    }

    #[test]
    fn canonical_form() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-36").unwrap(), rat_int(-36));
        assert_eq!(parse_rational("2/-4").unwrap(), rat(-1, 2));
        assert_eq!(format_rational(&rat(-1, 12)), "-1/12");
        assert_eq!(format_rational(&rat_int(7)), "7");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn checked_division() {
        assert_eq!(checked_div(&rat(1, 2), &rat(1, 4)).unwrap(), rat_int(2));
        assert_eq!(
            checked_div(&rat(1, 2), &rat(0, 1)),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    #[should_panic]
    fn division_by_zero_panics() {
        let _ = rat(1, 2) / rat(0, 1);
    }
}
