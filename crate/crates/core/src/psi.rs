//! The Ψₙ one-forms with poles only at the ramification point, and peeling of
//! Laurent polynomials into that basis.
//!
//! `Ψₙ = -Ψ̂ₙ dy` where
//! `Ψ̂ₙ = A · (B d/dy)^(n+1) C`, `A = ((1+f)y+f)/(y(y+1))`, `B = 1/A`,
//! `C = 1/((1+f)((1+f)y+f))`.
//! In the shifted coordinate `z = y - y*` each Ψ̂ₙ is a Laurent polynomial with
//! exponents in `[-(2n+2), -2]`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::arith::{rat_int, Poly, RatFn, Rational, Series};
use crate::conventions::Sign;
use crate::curve::FramedCurve;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PsiForm {
    pub n: usize,
    pub f: i64,
    /// Ψ̂ₙ as a rational function of `y`.
    pub scalar_y: RatFn,
    /// Ψ̂ₙ as an exact Laurent polynomial in `z = y - y*`.
    pub scalar_z: Series<Rational>,
}

/// Ψ̂ₙ built directly from the operator definition in the `y` coordinate.
///
/// Each iterate is kept as `N / L^k` with `L = (1+f)y + f`, so that
/// `d/dy (N/L^k) = (N'L - k(1+f)N) / L^(k+1)` and `B = y(y+1)/L` never need a
/// polynomial gcd.
pub fn psi_form(n: usize, f: i64) -> Result<PsiForm> {
    let curve = FramedCurve::new(f)?;
    let one_f = rat_int(1 + f);
    let lin = Poly::from_ints(&[f, f + 1]);
    let yy1 = Poly::from_ints(&[0, 1, 1]);
    let d = |num: &Poly, k: usize| -> Poly {
        &(&num.derivative() * &lin) - &num.scale(&(rat_int(k as i64) * &one_f))
    };
    // C = 1/((1+f) L)
    let (mut num, mut k) = (Poly::constant(one_f.recip()), 1usize);
    for _ in 0..n {
        num = &yy1 * &d(&num, k);
        k += 2;
    }
    // A·B = 1, so the last factor pair collapses to one derivative.
    num = d(&num, k);
    k += 1;
    // Cancel powers of L left in the numerator.
    let root = -(rat_int(f) / &one_f);
    while k > 0 && !num.is_zero() && num.has_root(&root) {
        num = num.div_rem(&lin)?.0;
        k -= 1;
    }
    let mut den = Poly::constant(Rational::one());
    for _ in 0..k {
        den = &den * &lin;
    }
    let scalar_y = RatFn::from_coprime(num, den)?;
    let scalar_z = scalar_y.shift(curve.y_star()).laurent_at_zero()?;
    Ok(PsiForm {
        n,
        f,
        scalar_y,
        scalar_z,
    })
}

/// `(z - f/(1+f))(z + 1/(1+f)) / ((1+f) z)` as an exact Laurent polynomial.
fn shift_factor(f: i64) -> Series<Rational> {
    let one_f = rat_int(1 + f);
    let a = rat_int(f) / &one_f;
    let b = one_f.recip();
    // (z^2 + (b - a) z - ab) / ((1+f) z)
    Series::exact(
        -1,
        vec![-(&a * &b) / &one_f, (&b - &a) / &one_f, one_f.recip()],
    )
}

/// One step of the shifted-coordinate recursion
/// `Ψ̂ₙ = σ · d/dz( Ψ̂ₙ₋₁ · (z - f/(1+f))(z + 1/(1+f)) / ((1+f) z) )`.
pub fn psi_shift_recursion_step(prev: &PsiForm, sign: Sign) -> Result<PsiForm> {
    let next_z = prev
        .scalar_z
        .mul(&shift_factor(prev.f))
        .derive()
        .scale(&sign.as_rational());
    let curve = FramedCurve::new(prev.f)?;
    let scalar_y = laurent_to_ratfn(&next_z).shift(&-curve.y_star());
    Ok(PsiForm {
        n: prev.n + 1,
        f: prev.f,
        scalar_y,
        scalar_z: next_z,
    })
}

fn laurent_to_ratfn(s: &Series<Rational>) -> RatFn {
    let v = s.valuation().unwrap_or(0);
    let shift = (-v).max(0) as usize;
    let len = (s.last_exponent().unwrap_or(0) + shift as i64 + 1).max(1) as usize;
    let mut num = vec![Rational::zero(); len];
    for (e, c) in s.terms() {
        num[(e + shift as i64) as usize] = c.clone();
    }
    // the lowest coefficient is nonzero, so z does not divide the numerator
    RatFn::from_coprime(Poly::new(num), Poly::monomial(Rational::one(), shift)).expect("nonzero")
}

/// Finds the single sign under which the shift recursion, iterated from
/// Ψ̂₀, reproduces the operator definition for every `1 <= n <= n_max`.
pub fn calibrate_psirec(f: i64, n_max: usize) -> Result<Sign> {
    let table = PsiTable::new(f, n_max)?;
    let mut ok = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        let mut cur = table.form(0).clone();
        let mut agrees = true;
        for n in 1..=n_max {
            cur = psi_shift_recursion_step(&cur, sign)?;
            if cur.scalar_z != table.form(n).scalar_z || cur.scalar_y != table.form(n).scalar_y {
                agrees = false;
                break;
            }
        }
        if agrees {
            ok.push(sign);
        }
    }
    match ok.as_slice() {
        [s] => Ok(*s),
        _ => Err(Error::Calibration(format!(
            "shift recursion agrees with the operator definition under {} signs (f={f})",
            ok.len()
        ))),
    }
}

/// The base case printed next to the shift recursion, `-1/((1+f)^2 z)`.
/// It is not Ψ̂₀; the verification suite reports the mismatch.
pub fn displayed_base_case(f: i64) -> Series<Rational> {
    let c = rat_int(1 + f);
    Series::monomial(-(&c * &c).recip(), -1)
}

/// Coefficients with respect to a Ψ-type basis, `n → c`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PsiExpansion {
    pub coeffs: BTreeMap<usize, Rational>,
}

/// Ψ̂₀ … Ψ̂_{n_max} for one framing, in both coordinates plus the
/// inverse-power form used for peeling (`w^-k ↔ u^k`).
#[derive(Clone, Debug)]
pub struct PsiTable {
    f: i64,
    forms: Vec<PsiForm>,
    inverse_powers: Vec<Poly>,
}

impl PsiTable {
    pub fn new(f: i64, n_max: usize) -> Result<Self> {
        let forms = (0..=n_max)
            .map(|n| psi_form(n, f))
            .collect::<Result<Vec<_>>>()?;
        let inverse_powers = forms
            .iter()
            .map(|p| laurent_to_inverse_powers(&p.scalar_z))
            .collect::<Result<Vec<_>>>()?;
        Ok(PsiTable {
            f,
            forms,
            inverse_powers,
        })
    }

    pub fn framing(&self) -> i64 {
        self.f
    }

    pub fn n_max(&self) -> usize {
        self.forms.len() - 1
    }

    pub fn form(&self, n: usize) -> &PsiForm {
        &self.forms[n]
    }

    /// Ψ̂ₙ as a polynomial in `u = 1/z`.
    pub fn inverse_power_form(&self, n: usize) -> &Poly {
        &self.inverse_powers[n]
    }

    /// Triangular expansion of `p(u)` in the Ψ̂ basis (`u = 1/w`).
    pub fn peel_inverse_powers(&self, p: &Poly) -> Result<BTreeMap<usize, Rational>> {
        let mut rest = p.clone();
        let mut out = BTreeMap::new();
        while let Some(d) = rest.degree() {
            if d < 2 {
                return Err(Error::Peel(format!("exponent -{d} > -2 in remainder")));
            }
            if d % 2 == 1 {
                return Err(Error::Peel(format!("odd leading exponent -{d}")));
            }
            let n = (d - 2) / 2;
            if n > self.n_max() {
                return Err(Error::Peel(format!(
                    "needs Ψ̂_{n}, table holds {}",
                    self.n_max()
                )));
            }
            let basis = &self.inverse_powers[n];
            let c = rest.leading().expect("nonzero") / basis.leading().expect("nonzero");
            rest = &rest - &basis.scale(&c);
            out.insert(n, c);
        }
        Ok(out)
    }

    /// Expands a Laurent polynomial in `z` in the Ψ̂ basis:
    /// `w_form = Σ coeffs[n] Ψ̂ₙ`.
    pub fn psi_peel(&self, w_form: &Series<Rational>) -> Result<PsiExpansion> {
        let p = laurent_to_inverse_powers(w_form)?;
        Ok(PsiExpansion {
            coeffs: self.peel_inverse_powers(&p)?,
        })
    }

    /// Expands the one-form `w_form · dz` in the Ψ basis (`Ψₙ = -Ψ̂ₙ dz`).
    pub fn peel_one_form(&self, w_form: &Series<Rational>) -> Result<PsiExpansion> {
        let mut e = self.psi_peel(w_form)?;
        for c in e.coeffs.values_mut() {
            *c = -c.clone();
        }
        Ok(e)
    }

    /// `Σ coeffs[n] Ψ̂ₙ` in the shifted coordinate.
    pub fn reconstruct(&self, e: &PsiExpansion) -> Series<Rational> {
        e.coeffs.iter().fold(Series::zero(None), |acc, (&n, c)| {
            acc.add(&self.forms[n].scalar_z.scale(c))
        })
    }
}

/// `Σ c_e z^e` with all `e <= 0` rewritten as a polynomial in `u = 1/z`.
pub(crate) fn laurent_to_inverse_powers(s: &Series<Rational>) -> Result<Poly> {
    if !s.is_exact() {
        return Err(Error::Peel(
            "input must be an exact Laurent polynomial".into(),
        ));
    }
    let mut u = Vec::new();
    for (e, c) in s.terms() {
        if e > -2 {
            return Err(Error::Peel(format!("exponent {e} > -2")));
        }
        let k = (-e) as usize;
        if u.len() <= k {
            u.resize(k + 1, Rational::zero());
        }
        u[k] = c.clone();
    }
    Ok(Poly::new(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn laurent(start: i64, c: &[(i64, i64)]) -> Series<Rational> {
        Series::exact(start, c.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn psi_zero_matches_display() {
        for f in 1..=3 {
            let p = psi_form(0, f).unwrap();
            // Ψ₀ = dy/(f+(f+1)y)^2, so Ψ̂₀ = -1/(f+(f+1)y)^2
            let lin = Poly::from_ints(&[f, f + 1]);
            let expected = RatFn::new(Poly::from_ints(&[-1]), &lin * &lin).unwrap();
            assert_eq!(p.scalar_y, expected);
            let c = rat_int(1 + f);
            assert_eq!(p.scalar_z, Series::monomial(-(&c * &c).recip(), -2));
        }
    }

    #[test]
    fn psi_one_matches_display() {
        for f in 1..=3 {
            let p = psi_form(1, f).unwrap();
            // Ψ₁ = -dy (3(1+f)y(y+1) - (1+2y)(f+(f+1)y)) / (f+(f+1)y)^4
            let lin = Poly::from_ints(&[f, f + 1]);
            let num = &Poly::from_ints(&[0, 3 * (1 + f), 3 * (1 + f)])
                - &(&Poly::from_ints(&[1, 2]) * &lin);
            let den = &(&lin * &lin) * &(&lin * &lin);
            assert_eq!(p.scalar_y, RatFn::new(num, den).unwrap());
        }
    }

    #[test]
    fn psi_one_shifted_at_f1() {
        let p = psi_form(1, 1).unwrap();
        assert_eq!(p.scalar_z, laurent(-4, &[(-3, 32), (0, 1), (1, 8)]));
    }

    #[test]
    fn shift_recursion_step_from_psi_zero() {
        let p0 = psi_form(0, 1).unwrap();
        let p1 = psi_shift_recursion_step(&p0, Sign::Plus).unwrap();
        assert_eq!(p1.scalar_z, laurent(-4, &[(-3, 32), (0, 1), (1, 8)]));
        assert_eq!(p1.scalar_y, psi_form(1, 1).unwrap().scalar_y);
    }

    #[test]
    fn recursion_sign_is_plus() {
        for f in 1..=3 {
            assert_eq!(calibrate_psirec(f, 6).unwrap(), Sign::Plus);
        }
    }

    #[test]
    fn exponent_range_and_leading_term() {
        for f in 1..=3 {
            let t = PsiTable::new(f, 12).unwrap();
            for n in 0..=12 {
                let s = &t.form(n).scalar_z;
                assert_eq!(s.valuation(), Some(-(2 * n as i64) - 2));
                assert!(s.last_exponent().unwrap() <= -2);
                assert_eq!(s.coeff(-1), Some(Rational::zero()));
            }
        }
    }

    #[test]
    fn odd_exponents_only_vanish_at_f1() {
        let t1 = PsiTable::new(1, 6).unwrap();
        for n in 0..=6 {
            assert!(t1.form(n).scalar_z.terms().all(|(e, _)| e % 2 == 0));
        }
        let t2 = PsiTable::new(2, 1).unwrap();
        assert!(t2.form(1).scalar_z.terms().any(|(e, _)| e % 2 != 0));
    }

    #[test]
    fn peel_examples() {
        let t = PsiTable::new(1, 4).unwrap();
        let w11 = laurent(-4, &[(-1, 128), (0, 1), (1, 24)]);
        let one_form = t.peel_one_form(&w11).unwrap();
        assert_eq!(
            one_form.coeffs,
            BTreeMap::from([(0, rat(1, 8)), (1, rat(-1, 12))])
        );
        let hat = t.psi_peel(&w11).unwrap();
        assert_eq!(
            hat.coeffs,
            BTreeMap::from([(0, rat(-1, 8)), (1, rat(1, 12))])
        );

        let psi2 = t.form(2).scalar_z.clone();
        assert_eq!(
            t.psi_peel(&psi2).unwrap().coeffs,
            BTreeMap::from([(2, rat_int(1))])
        );

        assert!(matches!(
            t.psi_peel(&laurent(-3, &[(1, 1)])),
            Err(Error::Peel(_))
        ));
        assert!(matches!(
            t.psi_peel(&laurent(-1, &[(1, 1)])),
            Err(Error::Peel(_))
        ));
    }

    #[test]
    fn peel_rejects_out_of_span() {
        let t = PsiTable::new(2, 3).unwrap();
        // z^-4 alone is not in the span at f=2 (Ψ̂₁ also carries z^-3, z^-2)
        let lone = laurent(-4, &[(1, 1)]);
        assert!(t.psi_peel(&lone).is_err());
    }

    #[test]
    fn displayed_base_case_differs() {
        for f in 1..=3 {
            assert_ne!(displayed_base_case(f), psi_form(0, f).unwrap().scalar_z);
        }
    }
}
