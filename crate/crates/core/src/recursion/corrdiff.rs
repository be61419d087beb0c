use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, parse_rational, Rational};
use crate::conventions::Conventions;
use crate::error::{Error, Result};

/// `W^(g,h)` as a symmetric tensor in the Ψ basis:
/// `W = Σ coeffs[n₁..n_h] Ψ_{n₁}(p₁) ⋯ Ψ_{n_h}(p_h)` summed over all orderings,
/// so every ordered monomial carries the coefficient of its sorted key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrDiff {
    pub g: u32,
    pub h: u32,
    pub f: i64,
    pub coeffs: BTreeMap<Vec<usize>, Rational>,
}

/// `3g - 3 + h`, the largest admissible total index.
pub fn moduli_dimension(g: u32, h: u32) -> i64 {
    3 * g as i64 - 3 + h as i64
}

/// `2g - 2 + h >= 1`; excludes `(0,1)` and `(0,2)`.
pub fn is_stable(g: u32, h: u32) -> bool {
    h >= 1 && 2 * g as i64 - 2 + h as i64 >= 1
}

impl CorrDiff {
    /// Validates sorted keys of length `h`, drops zero entries and checks the
    /// moduli-dimension bound.
    pub fn new(g: u32, h: u32, f: i64, coeffs: BTreeMap<Vec<usize>, Rational>) -> Result<Self> {
        if !is_stable(g, h) {
            return Err(Error::UnstableCorrelator {
                g: g.into(),
                h: h.into(),
            });
        }
        let dim = moduli_dimension(g, h);
        let mut out = BTreeMap::new();
        for (k, c) in coeffs {
            if c.is_zero() {
                continue;
            }
            if k.len() != h as usize || !k.windows(2).all(|w| w[0] <= w[1]) {
                return Err(Error::Inconsistent(format!(
                    "bad multi-index {k:?} for h={h}"
                )));
            }
            let total: usize = k.iter().sum();
            if total as i64 > dim {
                return Err(Error::Inconsistent(format!(
                    "W({g},{h}) index {k:?} exceeds the dimension bound {dim}"
                )));
            }
            out.insert(k, c);
        }
        Ok(CorrDiff {
            g,
            h,
            f,
            coeffs: out,
        })
    }

    /// Coefficient of the ordered monomial `idx` (any ordering).
    pub fn coeff(&self, idx: &[usize]) -> Rational {
        let mut k = idx.to_vec();
        k.sort_unstable();
        self.coeffs.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn neg(&self) -> CorrDiff {
        CorrDiff {
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), -c)).collect(),
            ..self.clone()
        }
    }

    /// Every ordered monomial with its coefficient.
    pub fn ordered_terms(&self) -> Vec<(Vec<usize>, Rational)> {
        let mut out = Vec::new();
        for (k, c) in &self.coeffs {
            for p in distinct_permutations(k) {
                out.push((p, c.clone()));
            }
        }
        out
    }

    pub fn to_json(&self, conventions: Conventions) -> CorrDiffJson {
        CorrDiffJson {
            g: self.g,
            h: self.h,
            f: self.f,
            conventions,
            terms: self
                .coeffs
                .iter()
                .map(|(n, c)| TermJson {
                    n: n.clone(),
                    c: format_rational(c),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &CorrDiffJson) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for t in &j.terms {
            if coeffs.insert(t.n.clone(), parse_rational(&t.c)?).is_some() {
                return Err(Error::Parse(format!("duplicate multi-index {:?}", t.n)));
            }
        }
        CorrDiff::new(j.g, j.h, j.f, coeffs)
    }
}

impl fmt::Display for CorrDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W({},{}) f={}:", self.g, self.h, self.f)?;
        if self.coeffs.is_empty() {
            return write!(f, " 0");
        }
        for (k, c) in &self.coeffs {
            write!(f, " {k:?}:{}", format_rational(c))?;
        }
        Ok(())
    }
}

/// Serialized form; rationals are `"p/q"` strings, keys sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrDiffJson {
    pub g: u32,
    pub h: u32,
    pub f: i64,
    pub conventions: Conventions,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub n: Vec<usize>,
    pub c: String,
}

/// All distinct orderings of `k`, lexicographically.
pub fn distinct_permutations(k: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = k.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("pivot");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
