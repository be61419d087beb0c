//! Local expansions at the ramification point shared by every recursion step
//! at one framing, kernel orientation and window.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Zero};

use crate::arith::{Poly, Rational, Series};
use crate::conventions::Sign;
use crate::curve::FramedCurve;
use crate::error::Result;
use crate::psi::PsiTable;

/// A scalar factor of the integrand on one side of the residue.
///
/// On the `q` side `Psi(a)` is `-Ψ̂_a(z)` and `Pow(k)` is `z^k`; on the `q̄`
/// side they are `-Ψ̂_b(s) s'` and `s^k s'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Psi(usize),
    Pow(usize),
}

impl Factor {
    /// Valuation in `z`; exact for both sides since `s` has valuation one.
    pub fn valuation(self) -> i64 {
        match self {
            Factor::Psi(a) => -2 * a as i64 - 2,
            Factor::Pow(k) => k as i64,
        }
    }
}

/// The `q`/`q̄` part of one integrand term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Pair(Factor, Factor),
    /// `B(q, q̄) = s' / (z - s)^2`.
    Bergman,
}

impl Atom {
    /// Atoms whose product with the kernel (valuation -1) has no `z^-1` term.
    pub fn is_residue_free(self) -> bool {
        match self {
            Atom::Pair(a, b) => a.valuation() + b.valuation() > 0,
            Atom::Bergman => false,
        }
    }
}

pub struct LocalData {
    window: i64,
    s: Series<Rational>,
    ds: Series<Rational>,
    s_inv: Series<Rational>,
    kernel: Series<Poly>,
    q_side: Mutex<HashMap<Factor, Series<Rational>>>,
    qbar_side: Mutex<HashMap<Factor, Series<Rational>>>,
    residues: Mutex<HashMap<Atom, Poly>>,
}

impl LocalData {
    pub fn new(c: &FramedCurve, window: i64, sign: Sign) -> Result<Self> {
        let inv = c.conjugate_series(window)?;
        let kernel = c.kernel_from(&inv, sign)?.in_inverse_powers().clone();
        let s = inv.series().clone();
        let ds = s.derive();
        let s_inv = s.inverse()?;
        Ok(LocalData {
            window,
            s,
            ds,
            s_inv,
            kernel,
            q_side: Mutex::new(HashMap::new()),
            qbar_side: Mutex::new(HashMap::new()),
            residues: Mutex::new(HashMap::new()),
        })
    }

    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn kernel(&self) -> &Series<Poly> {
        &self.kernel
    }

    fn q_factor(&self, x: Factor, psi: &PsiTable) -> Series<Rational> {
        if let Some(v) = self.q_side.lock().expect("poisoned").get(&x) {
            return v.clone();
        }
        let v = match x {
            Factor::Psi(a) => psi.form(a).scalar_z.neg(),
            Factor::Pow(k) => Series::monomial(Rational::one(), k as i64),
        };
        self.q_side.lock().expect("poisoned").insert(x, v.clone());
        v
    }

    fn qbar_factor(&self, x: Factor, psi: &PsiTable) -> Series<Rational> {
        if let Some(v) = self.qbar_side.lock().expect("poisoned").get(&x) {
            return v.clone();
        }
        let v = match x {
            Factor::Psi(b) => {
                // Σ_e c_e s^e over the negative exponents of Ψ̂_b
                let form = &psi.form(b).scalar_z;
                let lowest = -form.valuation().expect("nonzero form");
                let mut acc = Series::zero(None);
                let mut power = Series::constant(Rational::one());
                for e in 1..=lowest {
                    power = power.mul(&self.s_inv);
                    if let Some(c) = form.coeff(-e).filter(|c| !c.is_zero()) {
                        acc = acc.add(&power.scale(&c));
                    }
                }
                acc.mul(&self.ds).neg()
            }
            Factor::Pow(k) => self.s.pow(k as u32).mul(&self.ds),
        };
        self.qbar_side
            .lock()
            .expect("poisoned")
            .insert(x, v.clone());
        v
    }

    fn bergman_qqbar(&self) -> Result<Series<Rational>> {
        let z = Series::monomial(Rational::one(), 1);
        let diff = z.sub(&self.s);
        Ok(self.ds.mul(&diff.mul(&diff).inverse()?))
    }

    /// `Res_{z=0} K(w; z) · atom(z) dz` as a polynomial in `u = 1/w`.
    pub fn residue(&self, atom: Atom, psi: &PsiTable) -> Result<Poly> {
        if atom.is_residue_free() {
            return Ok(Poly::default());
        }
        if let Some(v) = self.residues.lock().expect("poisoned").get(&atom) {
            return Ok(v.clone());
        }
        let integrand = match atom {
            Atom::Pair(a, b) => self.q_factor(a, psi).mul(&self.qbar_factor(b, psi)),
            Atom::Bergman => self.bergman_qqbar()?,
        };
        let v = pair_residue(&self.kernel, &integrand)?;
        self.residues
            .lock()
            .expect("poisoned")
            .insert(atom, v.clone());
        Ok(v)
    }
}

/// `Σ_e K_{-1-e} S_e`, requiring every needed coefficient to be known.
fn pair_residue(kernel: &Series<Poly>, s: &Series<Rational>) -> Result<Poly> {
    let mut acc = Poly::default();
    for e in s.valuation_bound().min(1)..=0 {
        let se = s.coeff_checked(e)?;
        if se.is_zero() {
            continue;
        }
        acc = &acc + &kernel.coeff_checked(-1 - e)?.scale(&se);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn bergman_residue_at_f1() {
        // K·B(q,q̄) at f=1: u^4/128 - u^2/24 under σ=+1
        let c = FramedCurve::new(1).unwrap();
        let psi = PsiTable::new(1, 2).unwrap();
        let l = LocalData::new(&c, 14, Sign::Plus).unwrap();
        let r = l.residue(Atom::Bergman, &psi).unwrap();
        let expected = &Poly::monomial(rat(1, 128), 4) + &Poly::monomial(rat(-1, 24), 2);
        assert_eq!(r, expected);
    }

    #[test]
    fn valuation_filter() {
        assert!(Atom::Pair(Factor::Pow(3), Factor::Psi(0)).is_residue_free());
        assert!(!Atom::Pair(Factor::Pow(2), Factor::Psi(0)).is_residue_free());
        assert!(!Atom::Pair(Factor::Pow(0), Factor::Pow(0)).is_residue_free());
    }

    #[test]
    fn small_window_is_reported() {
        let c = FramedCurve::new(2).unwrap();
        let psi = PsiTable::new(2, 6).unwrap();
        let l = LocalData::new(&c, 4, Sign::Plus).unwrap();
        let r = l.residue(Atom::Pair(Factor::Psi(6), Factor::Psi(6)), &psi);
        assert!(matches!(r, Err(crate::Error::WindowTooSmall { .. })));
    }
}
