//! Hodge brackets read off `W^(g,1)`, the λ-class algebra of the top-degree
//! part of `Λ∨(1)Λ∨(-f-1)Λ∨(f)`, and the Bernoulli-number closed forms.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, rat_int, Poly, Rational};
use crate::conventions::Conventions;
use crate::error::{Error, Result};
use crate::recursion::{CorrDiff, TermJson};

/// `bracket[n] = ⟨τ_n Λ∨(1)Λ∨(-f-1)Λ∨(f)⟩_g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeTable {
    pub g: u32,
    pub f: i64,
    pub bracket: BTreeMap<usize, Rational>,
}

impl HodgeTable {
    pub fn bracket(&self, n: usize) -> Rational {
        self.bracket.get(&n).cloned().unwrap_or_else(Rational::zero)
    }

    /// `bracket[1] / (f(f+1))`, independent of `f` when the factorization holds.
    pub fn normalized_dilaton(&self) -> Rational {
        self.bracket(1) / rat_int(self.f * (self.f + 1))
    }

    pub fn to_json(&self, conventions: Conventions) -> HodgeTableJson {
        let dilaton_expected = (self.g >= 2)
            .then(|| format_rational(&(rat_int(2 * self.g as i64 - 2) * lambda_triple(self.g))));
        HodgeTableJson {
            g: self.g,
            f: self.f,
            conventions,
            bracket: self
                .bracket
                .iter()
                .map(|(n, c)| TermJson {
                    n: vec![*n],
                    c: format_rational(c),
                })
                .collect(),
            normalized_dilaton: format_rational(&self.normalized_dilaton()),
            dilaton_expected_magnitude: dilaton_expected,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeTableJson {
    pub g: u32,
    pub f: i64,
    pub conventions: Conventions,
    pub bracket: Vec<TermJson>,
    /// `bracket[1] / (f(f+1))`
    pub normalized_dilaton: String,
    /// `(2g-2) ⟨λ_g λ_{g-1} λ_{g-2}⟩_g` for `g >= 2`.
    pub dilaton_expected_magnitude: Option<String>,
}

/// `bracket[n] = (-1)^(g+1) · coeffs[(n)]`.
pub fn hodge_extract(w: &CorrDiff) -> Result<HodgeTable> {
    if w.h != 1 {
        return Err(Error::Inconsistent(format!(
            "hodge extraction needs h=1, got {}",
            w.h
        )));
    }
    let sign = if w.g % 2 == 1 {
        rat_int(1)
    } else {
        rat_int(-1)
    };
    Ok(HodgeTable {
        g: w.g,
        f: w.f,
        bracket: w.coeffs.iter().map(|(k, c)| (k[0], c * &sign)).collect(),
    })
}

/// Formal combination of monomials `λ_g^a λ_{g-1}^b λ_{g-2}^c` with
/// coefficients polynomial in `f`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LambdaWord {
    pub terms: BTreeMap<(u32, u32, u32), Poly>,
}

impl LambdaWord {
    fn add(&mut self, m: (u32, u32, u32), c: Poly) {
        let e = self.terms.entry(m).or_default();
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Applies `λ_g² → 0` and `λ_{g-1}² → 2 λ_g λ_{g-2}` until nothing changes.
    pub fn normalize(&self) -> LambdaWord {
        let mut cur = self.clone();
        loop {
            let mut next = LambdaWord::default();
            let mut changed = false;
            for (&(a, b, c), coeff) in &cur.terms {
                if a >= 2 {
                    changed = true;
                } else if b >= 2 {
                    changed = true;
                    next.add((a + 1, b - 2, c + 1), coeff.scale(&rat_int(2)));
                } else {
                    next.add((a, b, c), coeff.clone());
                }
            }
            if !changed {
                return next;
            }
            cur = next;
        }
    }
}

/// The degree-`(3g-3)` part of `Λ∨(1)Λ∨(-f-1)Λ∨(f)` restricted to
/// `λ_g, λ_{g-1}, λ_{g-2}` (one class from each factor), before rewriting.
pub fn top_degree_word(g: u32) -> LambdaWord {
    // coefficient of λ_{g-i} in Λ∨(t) is (-1)^(g-i) t^i
    let t = [
        Poly::from_ints(&[1]),
        Poly::from_ints(&[-1, -1]),
        Poly::from_ints(&[0, 1]),
    ];
    let mut w = LambdaWord::default();
    for i1 in 0..=2u32 {
        for i2 in 0..=2u32 {
            for i3 in 0..=2u32 {
                if i1 + i2 + i3 != 3 {
                    continue;
                }
                let mut coeff = Poly::constant(Rational::one());
                let mut mono = (0, 0, 0);
                for (k, &i) in [i1, i2, i3].iter().enumerate() {
                    let sign = if (g - i).is_multiple_of(2) { 1 } else { -1 };
                    let mut term = Poly::constant(rat_int(sign));
                    for _ in 0..i {
                        term = &term * &t[k];
                    }
                    coeff = &coeff * &term;
                    match i {
                        0 => mono.0 += 1,
                        1 => mono.1 += 1,
                        _ => mono.2 += 1,
                    }
                }
                w.add(mono, coeff);
            }
        }
    }
    w
}

/// Coefficient of `λ_g λ_{g-1} λ_{g-2}` after rewriting, as a polynomial in `f`.
pub fn lambda_top_coefficient(g: u32) -> Result<Poly> {
    if g < 2 {
        return Err(Error::InvalidGenus(g.into()));
    }
    let n = top_degree_word(g).normalize();
    let mut out = Poly::default();
    for (m, c) in &n.terms {
        if *m != (1, 1, 1) {
            return Err(Error::Inconsistent(format!(
                "monomial {m:?} survived rewriting"
            )));
        }
        out = c.clone();
    }
    Ok(out)
}

/// `B_m` from `Σ_{k<=m} C(m+1, k) B_k = 0`, `B_0 = 1`.
pub fn bernoulli(m: usize) -> Rational {
    let mut b = vec![Rational::one()];
    // C(j+1, k) for k = 0..=j+1
    let mut binom = vec![Rational::one(), Rational::one()];
    for j in 1..=m {
        binom = std::iter::once(Rational::one())
            .chain(binom.windows(2).map(|w| &w[0] + &w[1]))
            .chain(std::iter::once(Rational::one()))
            .collect();
        let s: Rational = (0..j).map(|k| &binom[k] * &b[k]).sum();
        b.push(-s / &binom[j]);
    }
    b.swap_remove(m)
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).map(rat_int).product()
}

/// `⟨λ_g λ_{g-1} λ_{g-2}⟩_g = 1/(2(2g-2)!) · |B_{2g-2}|/(2g-2) · |B_{2g}|/(2g)`.
pub fn lambda_triple(g: u32) -> Rational {
    assert!(g >= 2, "λ-triple needs g >= 2");
    let m = 2 * g as usize;
    let b2g = bernoulli(m).abs();
    let b2g2 = bernoulli(m - 2).abs();
    (rat_int(2) * factorial(2 * g - 2)).recip()
        * (b2g2 / rat_int(m as i64 - 2))
        * (b2g / rat_int(m as i64))
}

/// `(1/2) (-1)^g |B_{2g}| |B_{2g-2}| / (2g (2g-2) (2g-2)!)`.
pub fn conjecture_rhs(g: u32) -> Rational {
    assert!(g >= 2, "closed form needs g >= 2");
    let m = 2 * g as usize;
    let sign = if g.is_multiple_of(2) {
        rat_int(1)
    } else {
        rat_int(-1)
    };
    let num = bernoulli(m).abs() * bernoulli(m - 2).abs();
    let den = rat_int(2 * m as i64 * (m as i64 - 2)) * factorial(2 * g - 2);
    sign * num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rat_int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(6), rat(1, 42));
        assert_eq!(bernoulli(8), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        assert_eq!(bernoulli(7), rat_int(0));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(lambda_triple(2), rat(1, 5760));
        assert_eq!(lambda_triple(3), rat(1, 1451520));
        assert_eq!(conjecture_rhs(2), rat(1, 5760));
        assert_eq!(conjecture_rhs(3), rat(-1, 1451520));
        for g in 2..=6 {
            assert_eq!(conjecture_rhs(g).abs(), lambda_triple(g));
        }
    }

    #[test]
    fn top_coefficient_small_genus() {
        let ff1 = Poly::from_ints(&[0, 1, 1]);
        assert_eq!(lambda_top_coefficient(2).unwrap(), -&ff1);
        assert_eq!(lambda_top_coefficient(3).unwrap(), ff1);
        assert!(lambda_top_coefficient(1).is_err());
    }

    #[test]
    fn rewriting_reaches_a_fixed_point() {
        let mut w = LambdaWord::default();
        w.add((0, 3, 0), Poly::from_ints(&[1]));
        w.add((2, 0, 1), Poly::from_ints(&[5]));
        let n = w.normalize();
        assert_eq!(n.terms.len(), 1);
        assert_eq!(n.terms[&(1, 1, 1)], Poly::from_ints(&[2]));
    }

    #[test]
    fn extraction_sign() {
        let w = crate::recursion::golden::w21(1);
        let t = hodge_extract(&w).unwrap();
        assert_eq!(t.bracket(1), rat(-1, 1440));
        assert_eq!(t.bracket(0), rat_int(0));
        let t1 = hodge_extract(&crate::recursion::golden::w11(2)).unwrap();
        assert_eq!(t1.bracket(0), rat(7, 24));
    }
}
