//! The primitive θ of `ω = log y dx/x` near the ramification point, its
//! residues against the Ψ basis, and the free energies `F^(g)`.
//!
//! θ is never expanded directly: its differential is expanded over
//! `Q[ℓ]/(ℓ²)` with `ℓ = log(-f/(1+f))` and integrated with zero constant.
//! Dropping the constant is sound because every partner form is residue-free.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, rat_int, LogExt, Rational, Series};
use crate::conventions::{Conventions, Sign};
use crate::curve::FramedCurve;
use crate::error::{Error, Result};
use crate::hodge::{conjecture_rhs, hodge_extract};
use crate::psi::PsiTable;
use crate::recursion::{CorrDiff, CorrStore};

/// θ(y* + z) - θ(y*) known below `z^window`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSeries {
    pub series: Series<LogExt>,
}

/// Expands `dθ = (1+f) z log(z - a) / ((z - a)(z + b)) dz`, with
/// `a = f/(1+f)`, `b = 1/(1+f)`, and integrates it.
pub fn theta_series(c: &FramedCurve, window: i64) -> Result<ThetaSeries> {
    if window < 3 {
        return Err(Error::WindowTooSmall {
            exponent: 3,
            precision: window,
        });
    }
    let f = c.framing();
    let one_f = rat_int(1 + f);
    let a = rat_int(f) / &one_f;
    let b = one_f.recip();
    let p = window - 1;
    // (z - a)(z + b) = z² + (b - a) z - ab
    let quad = Series::new(0, vec![-(&a * &b), &b - &a, Rational::one()], p);
    let prefactor = Series::monomial(one_f.clone(), 1).mul(&quad.inverse()?);
    // log(z - a) = ℓ + log(1 - z/a)
    let log1p = Series::monomial(-a.recip(), 1).log1p(p)?;
    let log = log1p
        .map(|r| LogExt::rational(r.clone()))
        .add(&Series::constant(LogExt::ell()));
    let d_theta = log.mul(&prefactor.map(|r| LogExt::rational(r.clone())));
    let series = d_theta.antiderive()?;
    Ok(ThetaSeries { series })
}

/// `Res_{z=0} θ(z) Ψ_n` with `Ψ_n = -Ψ̂_n dz`; the ℓ-part must cancel.
pub fn residue_theta_psi(c: &FramedCurve, psi: &PsiTable, n: usize) -> Result<Rational> {
    let theta = theta_series(c, 2 * n as i64 + 3)?;
    let form = psi.form(n).scalar_z.neg();
    let r = theta.series.mul_rational(&form).residue()?;
    if r.has_log() {
        return Err(Error::LogSurvived(format!(
            "Res θΨ_{n} = {r} at f={}",
            c.framing()
        )));
    }
    Ok(r.rat)
}

/// `Res_{z=0}` of the scalar of `W^(g,1)`, which must vanish.
pub fn w_residue(w: &CorrDiff, psi: &PsiTable) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (k, c) in &w.coeffs {
        let r = psi.form(k[0]).scalar_z.coeff(-1).expect("exact form");
        acc -= c * r;
    }
    Ok(acc)
}

fn genus_sign(g: u32) -> Rational {
    if g.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `F^(g) = (-1)^g/(2-2g) Σ_n coeffs[(n)] Res θΨ_n`.
pub fn free_energy_direct(store: &CorrStore, c: &FramedCurve, g: u32) -> Result<Rational> {
    if g < 2 {
        return Err(Error::InvalidGenus(g.into()));
    }
    let w = store.correlator(c, g, 1)?;
    let n_max = w.coeffs.keys().map(|k| k[0]).max().unwrap_or(0);
    let psi = store.psi_table(c.framing(), n_max)?;
    let res_w = w_residue(&w, &psi)?;
    if !res_w.is_zero() {
        return Err(Error::Inconsistent(format!("W({g},1) has residue {res_w}")));
    }
    let mut sum = Rational::zero();
    for (k, coeff) in &w.coeffs {
        sum += coeff * residue_theta_psi(c, &psi, k[0])?;
    }
    Ok(genus_sign(g) / rat_int(2 - 2 * g as i64) * sum)
}

/// `F^(g) = bracket[1] · Res θΨ_1 / (2g-2)`, using only the dilaton slot.
pub fn free_energy_shortcut(store: &CorrStore, c: &FramedCurve, g: u32) -> Result<Rational> {
    if g < 2 {
        return Err(Error::InvalidGenus(g.into()));
    }
    let w = store.correlator(c, g, 1)?;
    let table = hodge_extract(&w)?;
    let psi = store.psi_table(c.framing(), 1)?;
    let r1 = residue_theta_psi(c, &psi, 1)?;
    Ok(table.bracket(1) * r1 / rat_int(2 * g as i64 - 2))
}

/// One `(g, f)` row of the free-energy comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergyReport {
    pub g: u32,
    pub f: i64,
    pub f_direct: Rational,
    pub f_shortcut: Rational,
    pub rhs: Rational,
    /// `F / rhs` when it is `±1`.
    pub sign_epsilon: Option<Sign>,
    pub conventions: Conventions,
}

impl EnergyReport {
    pub fn compute(store: &CorrStore, c: &FramedCurve, g: u32) -> Result<Self> {
        let f_direct = free_energy_direct(store, c, g)?;
        let f_shortcut = free_energy_shortcut(store, c, g)?;
        let rhs = conjecture_rhs(g);
        let ratio = &f_direct / &rhs;
        let sign_epsilon = if ratio.abs().is_one() {
            Sign::of(&ratio)
        } else {
            None
        };
        Ok(EnergyReport {
            g,
            f: c.framing(),
            f_direct,
            f_shortcut,
            rhs,
            sign_epsilon,
            conventions: store.conventions(),
        })
    }

    pub fn paths_agree(&self) -> bool {
        self.f_direct == self.f_shortcut
    }

    pub fn magnitude_matches(&self) -> bool {
        self.f_direct.abs() == self.rhs.abs()
    }

    pub fn to_json(&self) -> EnergyReportJson {
        EnergyReportJson {
            g: self.g,
            f: self.f,
            f_direct: format_rational(&self.f_direct),
            f_shortcut: format_rational(&self.f_shortcut),
            abs_f: format_rational(&self.f_direct.abs()),
            rhs: format_rational(&self.rhs),
            sign_epsilon: self.sign_epsilon,
            paths_agree: self.paths_agree(),
            magnitude_matches: self.magnitude_matches(),
            conventions: self.conventions,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyReportJson {
    pub g: u32,
    pub f: i64,
    pub f_direct: String,
    pub f_shortcut: String,
    pub abs_f: String,
    pub rhs: String,
    pub sign_epsilon: Option<Sign>,
    pub paths_agree: bool,
    pub magnitude_matches: bool,
    pub conventions: Conventions,
}

/// The single `ε` shared by every row, if there is one.
pub fn global_epsilon(rows: &[EnergyReport]) -> Option<Sign> {
    let first = rows.first()?.sign_epsilon?;
    rows.iter()
        .all(|r| r.sign_epsilon == Some(first))
        .then_some(first)
}

/// Whether `F^(g)` is identical across framings for every genus in `rows`.
pub fn framing_independent(rows: &[EnergyReport]) -> bool {
    rows.iter().all(|r| {
        rows.iter()
            .filter(|o| o.g == r.g)
            .all(|o| o.f_direct == r.f_direct)
    })
}

impl ThetaSeries {
    pub fn coeff(&self, e: i64) -> Option<LogExt> {
        self.series.coeff(e)
    }

    pub fn valuation(&self) -> Option<i64> {
        self.series.valuation()
    }

    pub fn window_end(&self) -> Option<i64> {
        self.series.window_end()
    }

    /// Whether every known coefficient is free of ℓ.
    pub fn is_rational(&self) -> bool {
        self.series.terms().all(|(_, c)| !c.has_log())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn le(r: Rational, l: Rational) -> LogExt {
        LogExt::new(r, l)
    }

    #[test]
    fn theta_at_f1() {
        let c = FramedCurve::new(1).unwrap();
        let t = theta_series(&c, 6).unwrap();
        assert_eq!(t.valuation(), Some(2));
        assert_eq!(t.coeff(2), Some(le(rat_int(0), rat_int(-4))));
        assert_eq!(t.coeff(3), Some(le(rat(16, 3), rat_int(0))));
        assert_eq!(t.coeff(4), Some(le(rat_int(4), rat_int(-8))));
        assert!(theta_series(&c, 2).is_err());
    }

    #[test]
    fn theta_valuation_is_two() {
        for f in 1..=4 {
            let t = theta_series(&FramedCurve::new(f).unwrap(), 8).unwrap();
            assert_eq!(t.valuation(), Some(2));
            assert!(!t.is_rational());
        }
    }

    #[test]
    fn residue_table() {
        for f in 1..=3 {
            let c = FramedCurve::new(f).unwrap();
            let psi = PsiTable::new(f, 8).unwrap();
            assert_eq!(residue_theta_psi(&c, &psi, 0).unwrap(), rat_int(0));
            assert_eq!(residue_theta_psi(&c, &psi, 1).unwrap(), rat(1, f * (f + 1)));
            for n in 2..=8 {
                assert_eq!(
                    residue_theta_psi(&c, &psi, n).unwrap(),
                    rat_int(0),
                    "n={n} f={f}"
                );
            }
        }
    }
}
