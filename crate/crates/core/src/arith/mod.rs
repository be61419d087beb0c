//! Exact arithmetic: rationals, dense polynomials, rational functions,
//! truncated Laurent series and the log-extended coefficient ring.

mod logext;
mod poly;
mod ratfn;
mod rational;
mod series;

pub use logext::LogExt;
pub use poly::Poly;
pub use ratfn::RatFn;
pub use rational::{checked_div, format_rational, parse_rational, rat, rat_int, Rational};
pub use series::{ibp_residue_check, Series};

use std::fmt::Debug;

/// Coefficient ring for [`Series`].
///
/// Methods take references; in generic code only these are visible so they do
/// not clash with the `std::ops` impls of the concrete types.
pub trait Ring: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn scale(&self, r: &Rational) -> Self;
    /// Multiplicative inverse when it exists inside the ring.
    fn try_inverse(&self) -> Option<Self>;
}

impl Ring for Rational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
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
        r.clone()
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn try_inverse(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            None
        } else {
            Some(num_traits::Inv::inv(self))
        }
    }
}
