//! The framed mirror curve `x + y^f + y^(f+1) = 0` and its local data at the
//! unique ramification point.
//!
//! Everything local is expressed in the shifted coordinate `z = y - y*`. The
//! conjugate point of `y* + z` is `y* + s(z)` for the involution series `s`,
//! which stands in for a square-root local coordinate and keeps every
//! expansion an integer-exponent Laurent series.

use num_traits::{One, Zero};

use crate::arith::{rat, rat_int, Poly, RatFn, Rational, Series};
use crate::conventions::Sign;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FramedCurve {
    f: i64,
    y_star: Rational,
    x_star: Rational,
    /// `x(y) = -y^f (1 + y)`
    x_poly: Poly,
    /// `x(y* + z)` as a polynomial in `z`
    x_local: Poly,
}

impl FramedCurve {
    pub fn new(f: i64) -> Result<Self> {
        if f < 1 {
            return Err(Error::InvalidFraming(f));
        }
        let mut c = vec![Rational::zero(); f as usize + 2];
        c[f as usize] = -Rational::one();
        c[f as usize + 1] = -Rational::one();
        let x_poly = Poly::new(c);
        let y_star = rat(-f, f + 1);
        let x_star = x_poly.eval(&y_star);
        let x_local = x_poly.shift(&y_star);
        Ok(FramedCurve {
            f,
            y_star,
            x_star,
            x_poly,
            x_local,
        })
    }

    pub fn framing(&self) -> i64 {
        self.f
    }

    pub fn y_star(&self) -> &Rational {
        &self.y_star
    }

    /// `x(y*)`, evaluated directly.
    pub fn x_star(&self) -> &Rational {
        &self.x_star
    }

    /// The closed form `f^f / (-1-f)^(-1-f)` as printed alongside the
    /// ramification point. It disagrees with [`Self::x_star`]; both are
    /// reported by the verification suite.
    pub fn x_star_displayed(&self) -> Rational {
        let f = self.f;
        let base = rat_int(-1 - f);
        let mut v = rat_int(f).pow(f as i32);
        v *= base.pow((1 + f) as i32);
        v
    }

    pub fn x_poly(&self) -> &Poly {
        &self.x_poly
    }

    /// `x(y* + z)` as a polynomial in `z`.
    pub fn x_local(&self) -> &Poly {
        &self.x_local
    }

    pub fn x_of_y(&self, y: &Rational) -> Rational {
        self.x_poly.eval(y)
    }

    /// `x(y(z))` for a series `y` of valuation >= 0.
    pub fn x_of_series(&self, y: &Series<Rational>) -> Result<Series<Rational>> {
        let c = y.coeff_checked(0)?;
        let rest = y.sub(&Series::constant(c.clone()));
        poly_series(&self.x_poly.shift(&c)).compose(&rest)
    }

    /// Roots of `dx/dy` away from the punctures `y = 0` and `y = -1`.
    ///
    /// `dx/dy = -y^(f-1) (f + (f+1) y)`: strip the factors `y` and `y + 1`,
    /// then the remainder must be linear.
    pub fn critical_points(&self) -> Result<Vec<Rational>> {
        let mut p = self.x_poly.derivative();
        for root in [Rational::zero(), -Rational::one()] {
            let lin = Poly::new(vec![-root.clone(), Rational::one()]);
            while !p.is_zero() && p.has_root(&root) {
                p = p.div_rem(&lin)?.0;
            }
        }
        match p.degree() {
            Some(0) => Ok(vec![]),
            Some(1) => Ok(vec![-p.coeff(0) / p.coeff(1)]),
            _ => Err(Error::Inconsistent(format!(
                "dx/dy has a nonlinear residual factor {p}"
            ))),
        }
    }

    /// The involution `s(z) = -z + O(z^2)` with `x(y* + s(z)) = x(y* + z)`,
    /// known through `z^window`.
    ///
    /// Newton iteration on `X(s) - X(z) = 0` from `s = -z`, where `X` is `x`
    /// recentred at the ramification point. `X'(s)` has valuation one, so
    /// each step keeps full precision only because `X(s) - X(z)` vanishes to
    /// order two.
    pub fn conjugate_series(&self, window: i64) -> Result<InvolutionSeries> {
        if window < 2 {
            return Err(Error::WindowTooSmall {
                exponent: 2,
                precision: window + 1,
            });
        }
        let p = window + 1;
        let dx = self.x_local.derivative();
        let xz = poly_series(&self.x_local).truncate(p + 1);
        let mut s = Series::monomial(-Rational::one(), 1);
        loop {
            let num = compose_truncated(&self.x_local, &s, p + 1).sub(&xz);
            let den = compose_truncated(&dx, &s, p);
            let next = s.sub(&num.div(&den)?).truncate(p).to_exact();
            if next == s {
                break;
            }
            s = next;
        }
        let inv = InvolutionSeries { s: s.truncate(p) };
        inv.verify_fiber(self)?;
        Ok(inv)
    }

    /// `D(z)` with `ω(q) - ω(q̄) = D(z) dz`.
    pub fn omega_diff_series(&self, window: i64) -> Result<Series<Rational>> {
        let inv = self.conjugate_series(window)?;
        self.omega_diff_from(&inv)
    }

    pub fn omega_diff_from(&self, inv: &InvolutionSeries) -> Result<Series<Rational>> {
        let s = inv.series();
        let p = s.prec().expect("truncated");
        let z = Series::monomial(Rational::one(), 1);
        let ystar = Series::constant(self.y_star.clone());
        // (y* + z)/(y* + s) - 1 = (z - s)/(y* + s)
        let u = z.sub(s).mul(&ystar.add(s).inverse()?);
        let log_ratio = u.log1p(p)?;
        let dx = poly_series(&self.x_poly.derivative().shift(&self.y_star));
        let x = poly_series(&self.x_local).truncate(p);
        let d = log_ratio.mul(&dx).mul(&x.inverse()?);
        match d.valuation() {
            Some(2) => Ok(d),
            Some(v) => Err(Error::Inconsistent(format!(
                "ω-difference has valuation {v}"
            ))),
            None => Err(Error::WindowTooSmall {
                exponent: 2,
                precision: d.prec().unwrap_or(0),
            }),
        }
    }

    /// The recursion kernel
    /// `K(w; z) = σ/2 · [1/(w - s(z)) - 1/(w - z)] / D(z)`,
    /// with `w = y_p - y*` the shifted coordinate of the free point.
    pub fn recursion_kernel(&self, window: i64, sign: Sign) -> Result<KernelSeries> {
        let inv = self.conjugate_series(window)?;
        self.kernel_from(&inv, sign)
    }

    /// [`Self::recursion_kernel`] from an already computed involution.
    pub fn kernel_from(&self, inv: &InvolutionSeries, sign: Sign) -> Result<KernelSeries> {
        let d = self.omega_diff_from(inv)?;
        let s = inv.series();
        let p = s.prec().expect("truncated");
        let z = Series::monomial(Rational::one(), 1);
        // Σ_k (s^k - z^k) u^(k+1), u = 1/w
        let mut numer: Series<Poly> = Series::zero(Some(p));
        let mut sk = Series::constant(Rational::one());
        let mut zk = Series::constant(Rational::one());
        for k in 1..p {
            sk = sk.mul(s);
            zk = zk.mul(&z);
            let diff = sk.sub(&zk).truncate(p);
            let upow = Poly::monomial(Rational::one(), (k + 1) as usize);
            numer = numer.add(&diff.map(|c| upow.scale(c)));
        }
        let k_u = numer
            .mul_rational(&d.inverse()?)
            .scale(&(sign.as_rational() / rat_int(2)));
        Ok(KernelSeries { u_form: k_u, sign })
    }
}

/// `p(s)` for an exact power series `s` of valuation >= 1, truncated below
/// `z^prec` after every Horner step.
fn compose_truncated(p: &Poly, s: &Series<Rational>, prec: i64) -> Series<Rational> {
    p.coeffs()
        .iter()
        .rev()
        .fold(Series::zero(None), |acc, c| {
            acc.mul(s)
                .add(&Series::constant(c.clone()))
                .truncate(prec)
                .to_exact()
        })
        .truncate(prec)
}

/// Exact polynomial as a Laurent series.
pub(crate) fn poly_series(p: &Poly) -> Series<Rational> {
    Series::exact(0, p.coeffs().to_vec())
}

/// `Σ c_j u^j` read as the rational function `Σ c_j w^(-j)`.
fn inverse_powers_to_ratfn(p: &Poly) -> RatFn {
    let Some(d) = p.degree() else {
        return RatFn::from_poly(Poly::default());
    };
    let num: Vec<Rational> = (0..=d).map(|i| p.coeff(d - i)).collect();
    // the reversed numerator has constant term p_d != 0, so w does not divide it
    RatFn::from_coprime(Poly::new(num), Poly::monomial(Rational::one(), d)).expect("nonzero")
}

/// The local conjugation `z ↦ s(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvolutionSeries {
    s: Series<Rational>,
}

impl InvolutionSeries {
    pub fn series(&self) -> &Series<Rational> {
        &self.s
    }

    /// Checks `x(y* + s) = x(y* + z)` and `s'(0) = -1` on the known window.
    pub fn verify_fiber(&self, c: &FramedCurve) -> Result<()> {
        let s = &self.s;
        let p = s.prec().expect("truncated");
        if s.coeff(1) != Some(-Rational::one()) {
            return Err(Error::Inconsistent(
                "involution is not -z to first order".into(),
            ));
        }
        let x = poly_series(c.x_local());
        let lhs = x.compose(s)?;
        let rhs = x.truncate(lhs.prec().unwrap_or(p));
        if lhs.sub(&rhs).terms().next().is_some() {
            return Err(Error::Inconsistent("x(y*+s(z)) != x(y*+z)".into()));
        }
        Ok(())
    }

    /// [`Self::verify_fiber`] plus `s∘s = id` on the known window.
    pub fn verify(&self, c: &FramedCurve) -> Result<()> {
        self.verify_fiber(c)?;
        let s = &self.s;
        let p = s.prec().expect("truncated");
        let ss = s.compose(s)?;
        let id = Series::monomial(Rational::one(), 1).truncate(ss.prec().unwrap_or(p));
        if ss.sub(&id).terms().next().is_some() {
            return Err(Error::Inconsistent("s(s(z)) != z".into()));
        }
        Ok(())
    }
}

/// `K(w; z)` as a series in `z` whose coefficients are polynomials in
/// `u = 1/w`, i.e. rational functions of the free coordinate `w` with poles
/// only at `w = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSeries {
    u_form: Series<Poly>,
    sign: Sign,
}

impl KernelSeries {
    /// Coefficients as rational functions of `w`.
    pub fn series(&self) -> Series<RatFn> {
        self.u_form.map(inverse_powers_to_ratfn)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Coefficients as polynomials in `u = 1/w`.
    pub fn in_inverse_powers(&self) -> &Series<Poly> {
        &self.u_form
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ser(start: i64, c: &[(i64, i64)]) -> Series<Rational> {
        Series::exact(start, c.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn ramification_data() {
        let c1 = FramedCurve::new(1).unwrap();
        assert_eq!(c1.y_star(), &rat(-1, 2));
        assert_eq!(c1.x_star(), &rat(1, 4));
        let c2 = FramedCurve::new(2).unwrap();
        assert_eq!(c2.y_star(), &rat(-2, 3));
        assert_eq!(c2.x_star(), &rat(-4, 27));
        assert_eq!(FramedCurve::new(0), Err(Error::InvalidFraming(0)));
        assert_eq!(FramedCurve::new(-2), Err(Error::InvalidFraming(-2)));
    }

    #[test]
    fn displayed_critical_value_disagrees() {
        let c1 = FramedCurve::new(1).unwrap();
        assert_eq!(c1.x_star_displayed(), rat_int(4));
        assert_ne!(&c1.x_star_displayed(), c1.x_star());
    }

    #[test]
    fn x_evaluation() {
        let c2 = FramedCurve::new(2).unwrap();
        assert_eq!(c2.x_of_y(&rat_int(1)), rat_int(-2));
        let c1 = FramedCurve::new(1).unwrap();
        let y = ser(0, &[(-1, 2), (1, 1)]);
        assert_eq!(
            c1.x_of_series(&y).unwrap(),
            ser(0, &[(1, 4), (0, 1), (-1, 1)])
        );
        let y2 = ser(0, &[(-2, 3), (1, 1)]);
        assert_eq!(
            c2.x_of_series(&y2).unwrap(),
            ser(0, &[(-4, 27), (0, 1), (1, 1), (-1, 1)])
        );
    }

    #[test]
    fn single_critical_point() {
        for f in 1..=5 {
            let c = FramedCurve::new(f).unwrap();
            assert_eq!(c.critical_points().unwrap(), vec![c.y_star().clone()]);
        }
    }

    #[test]
    fn involution_at_low_framing() {
        let s1 = FramedCurve::new(1).unwrap().conjugate_series(12).unwrap();
        assert_eq!(s1.series(), &Series::new(1, vec![rat_int(-1)], 13));
        let s2 = FramedCurve::new(2).unwrap().conjugate_series(8).unwrap();
        assert_eq!(s2.series().coeff(1), Some(rat_int(-1)));
        assert_eq!(s2.series().coeff(2), Some(rat_int(1)));
        assert!(FramedCurve::new(2).unwrap().conjugate_series(1).is_err());
    }

    #[test]
    fn omega_difference_at_f1() {
        let d = FramedCurve::new(1).unwrap().omega_diff_series(8).unwrap();
        assert_eq!(d.valuation(), Some(2));
        assert_eq!(d.coeff(2), Some(rat_int(32)));
        assert_eq!(d.coeff(3), Some(rat_int(0)));
        assert_eq!(d.coeff(4), Some(rat(512, 3)));
        for e in (3..d.prec().unwrap()).step_by(2) {
            assert_eq!(d.coeff(e), Some(rat_int(0)), "odd coefficient z^{e}");
        }
    }

    #[test]
    fn kernel_at_f1() {
        let k = FramedCurve::new(1)
            .unwrap()
            .recursion_kernel(10, Sign::Plus)
            .unwrap()
            .in_inverse_powers()
            .clone();
        assert_eq!(k.valuation(), Some(-1));
        // -(1/(32 z w^2)) (1 + z^2/w^2 - (16/3) z^2 + ...)
        assert_eq!(k.coeff(-1), Some(Poly::monomial(rat(-1, 32), 2)));
        assert_eq!(k.coeff(0), Some(Poly::default()));
        let expected = &Poly::monomial(rat(-1, 32), 4) + &Poly::monomial(rat(1, 6), 2);
        assert_eq!(k.coeff(1), Some(expected));
    }

    #[test]
    fn kernel_sign_flip_negates() {
        let c = FramedCurve::new(2).unwrap();
        let kp = c.recursion_kernel(8, Sign::Plus).unwrap();
        let km = c.recursion_kernel(8, Sign::Minus).unwrap();
        assert_eq!(kp.series().neg(), km.series());
        assert_eq!(kp.in_inverse_powers().neg(), *km.in_inverse_powers());
        assert_eq!(kp.series().valuation(), Some(-1));
    }
}
