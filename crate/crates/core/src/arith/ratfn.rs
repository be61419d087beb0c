use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Poly, Rational, Series};
use crate::error::{Error, Result};

/// Rational function `num / den` with coprime parts and a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFn::from_poly(Poly::default()));
        }
        let g = num.gcd(&den);
        let (mut n, _) = num.div_rem(&g)?;
        let (mut d, _) = den.div_rem(&g)?;
        let lead = d.leading().expect("nonzero").clone();
        if !lead.is_one() {
            let inv = lead.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        Ok(RatFn { num: n, den: d })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn {
            num: p,
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Re-normalizes; a no-op on values built through the public API.
    pub fn normalize(&self) -> RatFn {
        RatFn::new(self.num.clone(), self.den.clone()).expect("nonzero denominator")
    }

    pub fn derivative(&self) -> RatFn {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.den * &self.den;
        RatFn::new(n, d).expect("nonzero denominator")
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn inverse(&self) -> Result<RatFn> {
        RatFn::new(self.den.clone(), self.num.clone()).map_err(|_| Error::DivisionByZero)
    }

    /// Builds from parts already known to be coprime; only rescales to a
    /// monic denominator.
    pub fn from_coprime(num: Poly, den: Poly) -> Result<Self> {
        let lead = den.leading().ok_or(Error::ZeroDenominator)?.clone();
        if num.is_zero() {
            return Ok(RatFn::from_poly(Poly::default()));
        }
        let inv = lead.recip();
        Ok(RatFn {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    /// `self(x + c)`; translation preserves coprimality and monicity.
    pub fn shift(&self, c: &Rational) -> RatFn {
        RatFn {
            num: self.num.shift(c),
            den: self.den.shift(c),
        }
    }

    /// Exact Laurent expansion at `x = 0`, available when the only pole is at
    /// the origin (the monic denominator is a pure power of `x`).
    pub fn laurent_at_zero(&self) -> Result<Series<Rational>> {
        let k = self.den.degree().expect("nonzero");
        let is_monomial = self.den.coeffs()[..k].iter().all(|c| c.is_zero());
        if !is_monomial {
            return Err(Error::StrayPole(format!("denominator {}", self.den)));
        }
        Ok(Series::exact(-(k as i64), self.num.coeffs().to_vec()))
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFn({self})")
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, o: &RatFn) -> RatFn {
        if self.den == o.den {
            return RatFn::new(&self.num + &o.num, self.den.clone()).expect("nonzero");
        }
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFn::new(n, &self.den * &o.den).expect("nonzero")
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, o: &RatFn) -> RatFn {
        self + &(-o)
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, o: &RatFn) -> RatFn {
        RatFn::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero")
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl super::Ring for RatFn {
    fn zero() -> Self {
        RatFn::from_poly(Poly::default())
    }
    fn one() -> Self {
        RatFn::from_poly(Poly::constant(One::one()))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Self {
        RatFn::from_poly(Poly::constant(r.clone()))
    }
    fn scale(&self, r: &Rational) -> Self {
        if Zero::is_zero(r) {
            return RatFn::from_poly(Poly::default());
        }
        RatFn {
            num: self.num.scale(r),
            den: self.den.clone(),
        }
    }
    fn try_inverse(&self) -> Option<Self> {
        self.inverse().ok()
    }
}
