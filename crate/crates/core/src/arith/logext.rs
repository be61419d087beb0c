use std::fmt;

use num_traits::{One, Zero};

use super::Rational;

/// `rat + log * ℓ`, where ℓ is an opaque constant (the branch value of the
/// logarithm at the ramification point).
///
/// Only ℓ-linear values are representable. Multiplying two values that both
/// carry ℓ panics: no computation in the engine ever needs ℓ².
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LogExt {
    pub rat: Rational,
    pub log: Rational,
}

impl LogExt {
    pub fn new(rat: Rational, log: Rational) -> Self {
        LogExt { rat, log }
    }

    pub fn rational(r: Rational) -> Self {
        LogExt {
            rat: r,
            log: Rational::zero(),
        }
    }

    /// The symbol ℓ itself.
    pub fn ell() -> Self {
        LogExt {
            rat: Rational::zero(),
            log: Rational::one(),
        }
    }

    pub fn has_log(&self) -> bool {
        !self.log.is_zero()
    }
}

impl fmt::Debug for LogExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LogExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log.is_zero() {
            write!(f, "{}", self.rat)
        } else {
            write!(f, "{} + ({})ℓ", self.rat, self.log)
        }
    }
}

impl super::Ring for LogExt {
    fn zero() -> Self {
        LogExt::default()
    }
    fn one() -> Self {
        LogExt::rational(One::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.rat) && Zero::is_zero(&self.log)
    }
    fn add(&self, o: &Self) -> Self {
        LogExt::new(&self.rat + &o.rat, &self.log + &o.log)
    }
    fn sub(&self, o: &Self) -> Self {
        LogExt::new(&self.rat - &o.rat, &self.log - &o.log)
    }
    fn mul(&self, o: &Self) -> Self {
        assert!(
            !(self.has_log() && o.has_log()),
            "ℓ-degree would exceed 1: ({self}) * ({o})"
        );
        LogExt::new(&self.rat * &o.rat, &self.rat * &o.log + &self.log * &o.rat)
    }
    fn neg(&self) -> Self {
        LogExt::new(-&self.rat, -&self.log)
    }
    fn from_rational(r: &Rational) -> Self {
        LogExt::rational(r.clone())
    }
    fn scale(&self, r: &Rational) -> Self {
        LogExt::new(&self.rat * r, &self.log * r)
    }
    fn try_inverse(&self) -> Option<Self> {
        if self.has_log() || Zero::is_zero(&self.rat) {
            None
        } else {
            Some(LogExt::rational(self.rat.recip()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int, Ring};

    #[test]
    fn linear_products() {
        let a = LogExt::new(rat_int(2), rat_int(3));
        let b = LogExt::rational(rat(1, 2));
        assert_eq!(a.mul(&b), LogExt::new(rat_int(1), rat(3, 2)));
        assert_eq!(a.sub(&a), LogExt::zero());
        assert!(a.try_inverse().is_none());
        assert_eq!(b.try_inverse(), Some(LogExt::rational(rat_int(2))));
    }

    #[test]
    #[should_panic(expected = "ℓ-degree")]
    fn squaring_the_log_symbol_is_rejected() {
        let _ = LogExt::ell().mul(&LogExt::ell());
    }
}
