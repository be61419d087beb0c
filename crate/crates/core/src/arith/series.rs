//! Truncated Laurent series with an explicit window of known coefficients.
//!
//! A series knows its coefficients for every exponent below `prec`; anything
//! at or above `prec` is unknown. `prec == None` marks an exact Laurent
//! polynomial. Every operation propagates the tightest window it can prove,
//! and asking for an unknown coefficient yields `None` rather than zero.

use std::fmt;

use super::{rat_int, Rational, Ring};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Series<R> {
    /// Exponent of `coeffs[0]`; equals the valuation when `coeffs` is nonempty.
    start: i64,
    coeffs: Vec<R>,
    prec: Option<i64>,
}

/// Stand-in for "+infinity" in valuation bounds of exact zero series.
const INF: i64 = i64::MAX / 4;

impl<R: Ring> Series<R> {
    fn build(start: i64, coeffs: Vec<R>, prec: Option<i64>) -> Self {
        let mut s = Series {
            start,
            coeffs,
            prec,
        };
        if let Some(p) = prec {
            let keep = (p - s.start).clamp(0, s.coeffs.len() as i64) as usize;
            s.coeffs.truncate(keep);
        }
        while s.coeffs.last().is_some_and(|c| c.is_zero()) {
            s.coeffs.pop();
        }
        let lead = s.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            s.coeffs.drain(..lead);
            s.start += lead as i64;
        }
        if s.coeffs.is_empty() {
            s.start = 0;
        }
        s
    }

    /// Series with coefficients `coeffs[i]` at `z^(start + i)`, known below `z^prec`.
    pub fn new(start: i64, coeffs: Vec<R>, prec: i64) -> Self {
        Self::build(start, coeffs, Some(prec))
    }

    /// Exact Laurent polynomial.
    pub fn exact(start: i64, coeffs: Vec<R>) -> Self {
        Self::build(start, coeffs, None)
    }

    pub fn zero(prec: Option<i64>) -> Self {
        Series {
            start: 0,
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn monomial(c: R, exponent: i64) -> Self {
        Self::exact(exponent, vec![c])
    }

    pub fn constant(c: R) -> Self {
        Self::monomial(c, 0)
    }

    /// Exclusive bound of the known window; `None` when exact.
    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    /// Largest exponent whose coefficient is known.
    pub fn window_end(&self) -> Option<i64> {
        self.prec.map(|p| p - 1)
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Exponent of the first nonzero known coefficient.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    /// Every coefficient below this exponent is known to vanish.
    pub fn valuation_bound(&self) -> i64 {
        match (self.valuation(), self.prec) {
            (Some(v), _) => v,
            (None, Some(p)) => p,
            (None, None) => INF,
        }
    }

    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// Last exponent with a stored (nonzero) coefficient.
    pub fn last_exponent(&self) -> Option<i64> {
        self.valuation().map(|v| v + self.coeffs.len() as i64 - 1)
    }

    /// Coefficient of `z^e`, or `None` if it lies outside the known window.
    pub fn coeff(&self, e: i64) -> Option<R> {
        if self.prec.is_some_and(|p| e >= p) {
            return None;
        }
        let i = e - self.start;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Some(R::zero())
        } else {
            Some(self.coeffs[i as usize].clone())
        }
    }

    /// Coefficient of `z^e`, erroring outside the known window.
    pub fn coeff_checked(&self, e: i64) -> Result<R> {
        self.coeff(e).ok_or(Error::WindowTooSmall {
            exponent: e,
            precision: self.prec.unwrap_or(INF),
        })
    }

    /// `(exponent, coefficient)` pairs of the stored nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &R)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.start + i as i64, c))
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let p = self.prec.map_or(prec, |q| q.min(prec));
        Self::build(self.start, self.coeffs.clone(), Some(p))
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Series<S> {
        Series::build(self.start, self.coeffs.iter().map(f).collect(), self.prec)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map(|c| c.scale(r))
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    fn combine(&self, o: &Self, f: impl Fn(&R, &R) -> R) -> Self {
        let prec = match (self.prec, o.prec) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let lo = match (self.valuation(), o.valuation()) {
            (Some(a), Some(b)) => a.min(b),
            (a, b) => a.or(b).unwrap_or(0),
        };
        let hi = self
            .last_exponent()
            .into_iter()
            .chain(o.last_exponent())
            .max()
            .unwrap_or(lo - 1);
        let hi = prec.map_or(hi, |p| hi.min(p - 1));
        let zero = R::zero();
        let coeffs = (lo..=hi)
            .map(|e| {
                let a = self.coeff(e).unwrap_or_else(|| zero.clone());
                let b = o.coeff(e).unwrap_or_else(|| zero.clone());
                f(&a, &b)
            })
            .collect();
        Self::build(lo, coeffs, prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, |a, b| a.sub(b))
    }

    pub fn mul(&self, o: &Self) -> Self {
        convolve(self, o, |a, b| a.mul(b))
    }

    /// Multiplies by a series with rational coefficients.
    pub fn mul_rational(&self, o: &Series<Rational>) -> Self {
        convolve(self, o, |a, b| a.scale(b))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Series::constant(R::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse. The input must be truncated; its leading
    /// coefficient must be known and invertible.
    pub fn inverse(&self) -> Result<Self> {
        let p = self
            .prec
            .expect("inverse of an exact Laurent polynomial needs an explicit truncation");
        let v = self.valuation().ok_or(Error::NotInvertible)?;
        let lead_inv = self.coeffs[0].try_inverse().ok_or(Error::NotInvertible)?;
        let rel = (p - v) as usize;
        let mut out: Vec<R> = Vec::with_capacity(rel);
        out.push(lead_inv.clone());
        for j in 1..rel {
            let mut acc = R::zero();
            for i in 1..=j.min(self.coeffs.len() - 1) {
                acc = acc.add(&self.coeffs[i].mul(&out[j - i]));
            }
            out.push(acc.mul(&lead_inv).neg());
        }
        Ok(Self::build(-v, out, Some(-v + rel as i64)))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inverse()?))
    }

    /// Formal `d/dz`.
    pub fn derive(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&rat_int(self.start + i as i64)))
            .collect();
        Self::build(self.start - 1, coeffs, self.prec.map(|p| p - 1))
    }

    /// Antiderivative with zero constant term.
    pub fn antiderive(&self) -> Result<Self> {
        let c = self.coeff_checked(-1)?;
        if !c.is_zero() {
            return Err(Error::LogarithmicTerm);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let e = self.start + i as i64;
                if e == -1 {
                    R::zero()
                } else {
                    c.scale(&rat_int(e + 1).recip())
                }
            })
            .collect();
        Ok(Self::build(
            self.start + 1,
            coeffs,
            self.prec.map(|p| p + 1),
        ))
    }

    /// `self(inner(z))` for a power series `self` and `inner` of valuation >= 1.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let vi = inner.valuation_bound();
        if vi < 1 {
            return Err(Error::BadComposition(vi));
        }
        if self.valuation().is_some_and(|v| v < 0) {
            return Err(Error::BadComposition(vi));
        }
        let n = self.last_exponent().unwrap_or(-1);
        let mut acc: Series<R> = Series::zero(None);
        for k in (0..=n).rev() {
            acc = acc
                .mul(inner)
                .add(&Series::constant(self.coeff(k).expect("known")));
        }
        Ok(match self.prec {
            Some(po) if vi < INF => acc.truncate(po.saturating_mul(vi)),
            _ => acc,
        })
    }

    /// `log(1 + u)` for `u` of valuation >= 1, known below `z^prec`,
    /// computed as the antiderivative of `u' / (1 + u)`.
    pub fn log1p(&self, prec: i64) -> Result<Self> {
        let p = self.prec.map_or(prec, |q| q.min(prec));
        let u = self.truncate(p);
        match u.valuation() {
            None => return Ok(Series::zero(Some(p))),
            Some(v) if v < 1 => return Err(Error::BadLogArgument(v)),
            Some(_) => {}
        }
        let one_plus = Series::constant(R::one()).add(&u);
        let out = u.derive().mul(&one_plus.inverse()?).antiderive()?;
        Ok(out.truncate(p))
    }

    /// The known coefficients read as an exact Laurent polynomial.
    pub fn to_exact(&self) -> Self {
        Self::build(self.start, self.coeffs.clone(), None)
    }

    /// Coefficient of `z^-1`.
    pub fn residue(&self) -> Result<R> {
        self.coeff_checked(-1)
    }
}

fn convolve<A: Ring, B: Ring, R: Ring>(
    a: &Series<A>,
    b: &Series<B>,
    f: impl Fn(&A, &B) -> R,
) -> Series<R> {
    if a.is_known_zero() || b.is_known_zero() {
        return Series::zero(None);
    }
    let va = a.valuation_bound();
    let vb = b.valuation_bound();
    let prec = match (a.prec, b.prec) {
        (None, None) => None,
        (Some(pa), None) => Some(pa.saturating_add(vb)),
        (None, Some(pb)) => Some(pb.saturating_add(va)),
        (Some(pa), Some(pb)) => Some((pa.saturating_add(vb)).min(pb.saturating_add(va))),
    }
    .map(|p| p.min(INF));
    if a.coeffs.is_empty() || b.coeffs.is_empty() {
        return Series::zero(prec);
    }
    let start = a.start + b.start;
    let mut len = a.coeffs.len() + b.coeffs.len() - 1;
    if let Some(p) = prec {
        len = len.min((p - start).max(0) as usize);
    }
    let mut out = vec![R::zero(); len];
    for (i, x) in a.coeffs.iter().enumerate() {
        if i >= len || x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&f(x, y));
            }
        }
    }
    Series::build(start, out, prec)
}

/// Checks `Res g df + Res f dg = 0`.
pub fn ibp_residue_check<R: Ring>(f: &Series<R>, g: &Series<R>) -> Result<bool> {
    let lhs = g.mul(&f.derive()).residue()?;
    let rhs = f.mul(&g.derive()).residue()?;
    Ok(lhs.add(&rhs).is_zero())
}

impl<R: Ring + fmt::Display> fmt::Display for Series<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*z^{e}")?;
        }
        match self.prec {
            Some(p) if first => write!(f, "O(z^{p})"),
            Some(p) => write!(f, " + O(z^{p})"),
            None if first => write!(f, "0"),
            None => Ok(()),
        }
    }
}

impl<R: Ring + fmt::Display> fmt::Debug for Series<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, LogExt};

    fn ex(start: i64, c: &[(i64, i64)]) -> Series<Rational> {
        Series::exact(start, c.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn difference_of_squares() {
        let a = ex(0, &[(1, 1), (1, 1)]);
        let b = ex(0, &[(1, 1), (-1, 1)]);
        assert_eq!(a.mul(&b), ex(0, &[(1, 1), (0, 1), (-1, 1)]));
    }

    #[test]
    fn antiderive_rejects_logarithm() {
        let s = ex(-1, &[(1, 1), (1, 1)]);
        assert_eq!(s.antiderive(), Err(Error::LogarithmicTerm));
    }

    #[test]
    fn antiderive_of_log_extended_series() {
        // -8ℓz + 16z^2  ->  -4ℓz^2 + (16/3)z^3
        let s = Series::exact(
            1,
            vec![
                LogExt::new(rat_int(0), rat_int(-8)),
                LogExt::rational(rat_int(16)),
            ],
        );
        let a = s.antiderive().unwrap();
        assert_eq!(a.coeff(2), Some(LogExt::new(rat_int(0), rat_int(-4))));
        assert_eq!(a.coeff(3), Some(LogExt::rational(rat(16, 3))));
        assert_eq!(a.coeff(0), Some(LogExt::zero()));
        assert_eq!(a.valuation(), Some(2));
    }

    #[test]
    fn window_propagation_in_products() {
        // (1 + z + O(z^3)) * (z^-2 + O(z^1)) is known below z^1
        let a = Series::new(0, vec![rat_int(1), rat_int(1)], 3);
        let b = Series::new(-2, vec![rat_int(1)], 1);
        let c = a.mul(&b);
        assert_eq!(c.prec(), Some(1));
        assert_eq!(c.coeff(-1), Some(rat_int(1)));
        assert_eq!(c.coeff(0), Some(rat_int(0)));
        assert_eq!(c.coeff(1), None);
    }

    #[test]
    fn inverse_of_geometric() {
        let a = Series::new(0, vec![rat_int(1), rat_int(-1)], 6);
        let inv = a.inverse().unwrap();
        for e in 0..6 {
            assert_eq!(inv.coeff(e), Some(rat_int(1)));
        }
        assert_eq!(inv.coeff(6), None);
        let unknown_lead: Series<Rational> = Series::zero(Some(2));
        assert!(unknown_lead.inverse().is_err());
    }

    #[test]
    fn log1p_expansions() {
        let u = ex(1, &[(-2, 1)]);
        let l = u.log1p(5).unwrap();
        assert_eq!(l.coeff(1), Some(rat_int(-2)));
        assert_eq!(l.coeff(2), Some(rat_int(-2)));
        assert_eq!(l.coeff(3), Some(rat(-8, 3)));
        assert_eq!(l.coeff(4), Some(rat_int(-4)));
        assert_eq!(l.coeff(5), None);

        let zero: Series<Rational> = Series::zero(None);
        let l0 = zero.log1p(6).unwrap();
        assert_eq!(l0.coeff(3), Some(rat_int(0)));

        let sq = ex(2, &[(1, 1)]);
        let l2 = sq.log1p(7).unwrap();
        assert_eq!(l2.coeff(2), Some(rat_int(1)));
        assert_eq!(l2.coeff(3), Some(rat_int(0)));
        assert_eq!(l2.coeff(4), Some(rat(-1, 2)));
        assert_eq!(l2.coeff(6), Some(rat(1, 3)));

        assert_eq!(ex(0, &[(1, 1)]).log1p(4), Err(Error::BadLogArgument(0)));
    }

    #[test]
    fn residue_reads_the_inverse_power() {
        assert_eq!(
            ex(-4, &[(-3, 32), (0, 1), (1, 8)]).residue(),
            Ok(rat_int(0))
        );
        assert_eq!(ex(-1, &[(5, 1), (3, 1)]).residue(), Ok(rat_int(5)));
        let short = Series::new(-3, vec![rat_int(1)], -1);
        assert!(matches!(short.residue(), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn residue_of_theta_times_psi_hat_one() {
        // θ̃ = -4ℓz^2 + (16/3)z^3 + ..., Ψ̂₁ = 1/(8z^2) - 3/(32z^4) at f = 1
        let theta = Series::new(
            2,
            vec![
                LogExt::new(rat_int(0), rat_int(-4)),
                LogExt::rational(rat(16, 3)),
            ],
            4,
        );
        let psi = Series::exact(
            -4,
            vec![
                LogExt::rational(rat(-3, 32)),
                LogExt::zero(),
                LogExt::rational(rat(1, 8)),
            ],
        );
        assert_eq!(theta.mul(&psi).residue(), Ok(LogExt::rational(rat(-1, 2))));
    }

    #[test]
    fn ibp_on_monomials() {
        assert_eq!(
            ibp_residue_check(&ex(-1, &[(1, 1)]), &ex(1, &[(1, 1)])),
            Ok(true)
        );
        assert_eq!(
            ibp_residue_check(&ex(2, &[(1, 1)]), &ex(3, &[(1, 1)])),
            Ok(true)
        );
        let g_res = ex(1, &[(1, 1)])
            .mul(&ex(-1, &[(1, 1)]).derive())
            .residue()
            .unwrap();
        assert_eq!(g_res, rat_int(-1));
    }

    #[test]
    fn composition_and_derivative() {
        // (1 + t)^2 at t = z + z^2
        let outer = ex(0, &[(1, 1), (2, 1), (1, 1)]);
        let inner = ex(1, &[(1, 1), (1, 1)]);
        let c = outer.compose(&inner).unwrap();
        assert_eq!(c, ex(0, &[(1, 1), (2, 1), (3, 1), (2, 1), (1, 1)]));
        assert!(outer.compose(&ex(0, &[(1, 1)])).is_err());
        assert_eq!(c.derive(), ex(0, &[(2, 1), (6, 1), (6, 1), (4, 1)]));
        let t = Series::new(0, vec![rat_int(1), rat_int(1)], 3);
        assert_eq!(t.compose(&inner).unwrap().prec(), Some(3));
    }

    #[test]
    fn truncation_marks_unknowns() {
        let s = ex(-2, &[(1, 1), (2, 1), (3, 1)]).truncate(-1);
        assert_eq!(s.coeff(-2), Some(rat_int(1)));
        assert_eq!(s.coeff(-1), None);
        assert_eq!(s.window_end(), Some(-2));
    }
}
