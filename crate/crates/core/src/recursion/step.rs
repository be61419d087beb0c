//! One application of the recursion: assemble the bracketed integrand from
//! lower correlators, take the residue at the ramification point against the
//! kernel, and peel every slot back into the Ψ basis.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use super::corrdiff::{distinct_permutations, moduli_dimension, CorrDiff};
use super::local::{Atom, Factor, LocalData};
use crate::arith::{rat_int, Poly, Rational};
use crate::error::{Error, Result};
use crate::psi::PsiTable;

/// What a fixed slot carries before peeling: a Ψ index from a lower
/// correlator, or `u^(k+2)` from a Bergman factor `B(q, p_j)` / `B(q̄, p_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Psi(usize),
    Raw(usize),
}

/// `fixed slots → (atom → coefficient)`; slot `j` of a key is `p_{j+1}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Integrand {
    pub g: u32,
    pub h: u32,
    pub terms: BTreeMap<Vec<Slot>, BTreeMap<Atom, Rational>>,
}

impl Integrand {
    fn add(&mut self, key: Vec<Slot>, atom: Atom, c: Rational) {
        if atom.is_residue_free() || c.is_zero() {
            return;
        }
        let e = self
            .terms
            .entry(key)
            .or_default()
            .entry(atom)
            .or_insert_with(Rational::zero);
        *e += c;
    }

    pub fn atom_count(&self) -> usize {
        self.terms.values().map(BTreeMap::len).sum()
    }
}

/// Counters from one recursion step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub keys: usize,
    pub atoms: usize,
    /// Laurent polynomials peeled to a zero remainder.
    pub peels: usize,
}

/// One side of a quadratic term: its factor at `q` or `q̄`, the slots it fills,
/// and its coefficient.
type SideOption = (Factor, Vec<Slot>, Rational);

fn side_options<F>(lower: &F, g: u32, h: u32, kmax: usize) -> Result<Vec<SideOption>>
where
    F: Fn(u32, u32) -> Result<Arc<CorrDiff>>,
{
    if (g, h) == (0, 2) {
        // B(·, p) = Σ_k (k+1) t^k w^(-k-2)
        return Ok((0..=kmax)
            .map(|k| (Factor::Pow(k), vec![Slot::Raw(k)], rat_int(k as i64 + 1)))
            .collect());
    }
    Ok(lower(g, h)?
        .ordered_terms()
        .into_iter()
        .map(|(idx, c)| {
            (
                Factor::Psi(idx[0]),
                idx[1..].iter().map(|&n| Slot::Psi(n)).collect(),
                c,
            )
        })
        .collect())
}

/// Builds the integrand of `W^(g,h)` with free slot `p_0` and fixed slots
/// `p_1..p_{h-1}`; `lower` supplies already computed correlators.
pub fn assemble_integrand<F>(lower: &F, g: u32, h: u32) -> Result<Integrand>
where
    F: Fn(u32, u32) -> Result<Arc<CorrDiff>>,
{
    let fixed = h as usize - 1;
    let mut out = Integrand {
        g,
        h,
        ..Default::default()
    };
    // A Bergman factor paired with Ψ_b only survives for k <= 2b + 2.
    let kmax = 2 * moduli_dimension(g, h).max(0) as usize + 2;

    if g >= 1 {
        if (g - 1, h + 1) == (0, 2) {
            out.add(Vec::new(), Atom::Bergman, rat_int(1));
        } else {
            for (idx, c) in lower(g - 1, h + 1)?.ordered_terms() {
                let key = idx[2..].iter().map(|&n| Slot::Psi(n)).collect();
                out.add(key, Atom::Pair(Factor::Psi(idx[0]), Factor::Psi(idx[1])), c);
            }
        }
    }

    for l in 0..=g {
        for mask in 0u32..(1 << fixed) {
            let size = mask.count_ones();
            let (g1, h1) = (g - l, size + 1);
            let (g2, h2) = (l, fixed as u32 - size + 1);
            if (g1, h1) == (0, 1) || (g2, h2) == (0, 1) {
                continue;
            }
            let left = side_options(lower, g1, h1, kmax)?;
            let right = side_options(lower, g2, h2, kmax)?;
            for (a, slots_a, ca) in &left {
                for (b, slots_b, cb) in &right {
                    let atom = Atom::Pair(*a, *b);
                    if atom.is_residue_free() {
                        continue;
                    }
                    let (mut ia, mut ib) = (slots_a.iter(), slots_b.iter());
                    let key = (0..fixed)
                        .map(|j| {
                            if mask & (1 << j) != 0 {
                                *ia.next().expect("slot count")
                            } else {
                                *ib.next().expect("slot count")
                            }
                        })
                        .collect();
                    out.add(key, atom, ca * cb);
                }
            }
        }
    }
    Ok(out)
}

/// Takes the residue of every integrand term, peels the free slot and then
/// each Bergman slot, and folds the result into a symmetric tensor.
///
/// Every ordered monomial must agree with its sorted key; the free slot is
/// thereby checked against slots filled by lower correlators.
pub fn residue_and_peel(
    integrand: &Integrand,
    local: &LocalData,
    psi: &PsiTable,
    f: i64,
) -> Result<(CorrDiff, StepStats)> {
    let mut stats = StepStats {
        keys: integrand.terms.len(),
        atoms: integrand.atom_count(),
        peels: 0,
    };
    let mut current: BTreeMap<Vec<Slot>, Rational> = BTreeMap::new();
    for (key, atoms) in &integrand.terms {
        let mut poly = Poly::default();
        for (atom, c) in atoms {
            poly = &poly + &local.residue(*atom, psi)?.scale(c);
        }
        if poly.is_zero() {
            continue;
        }
        stats.peels += 1;
        for (n, c) in psi.peel_inverse_powers(&poly)? {
            let mut full = vec![Slot::Psi(n)];
            full.extend_from_slice(key);
            // Ψ_n = -Ψ̂_n dw
            accumulate(&mut current, full, -c);
        }
    }

    for j in 1..integrand.h as usize {
        let mut next = BTreeMap::new();
        let mut groups: BTreeMap<Vec<Slot>, Poly> = BTreeMap::new();
        for (key, c) in current {
            match key[j] {
                Slot::Psi(_) => accumulate(&mut next, key, c),
                Slot::Raw(k) => {
                    let mut rest = key;
                    rest[j] = Slot::Raw(usize::MAX);
                    let g = groups.entry(rest).or_default();
                    *g = &*g + &Poly::monomial(c, k + 2);
                }
            }
        }
        for (rest, poly) in groups {
            if poly.is_zero() {
                continue;
            }
            stats.peels += 1;
            for (n, c) in psi.peel_inverse_powers(&poly)? {
                let mut key = rest.clone();
                key[j] = Slot::Psi(n);
                accumulate(&mut next, key, -c);
            }
        }
        current = next;
    }

    let mut ordered = BTreeMap::new();
    for (key, c) in current {
        if c.is_zero() {
            continue;
        }
        let idx = key
            .iter()
            .map(|s| match s {
                Slot::Psi(n) => Ok(*n),
                Slot::Raw(_) => Err(Error::Peel("unpeeled Bergman slot".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        ordered.insert(idx, c);
    }
    let w = symmetric_fold(integrand.g, integrand.h, f, &ordered)?;
    Ok((w, stats))
}

fn accumulate<K: Ord>(m: &mut BTreeMap<K, Rational>, k: K, c: Rational) {
    let e = m.entry(k).or_insert_with(Rational::zero);
    *e += c;
}

fn symmetric_fold(
    g: u32,
    h: u32,
    f: i64,
    ordered: &BTreeMap<Vec<usize>, Rational>,
) -> Result<CorrDiff> {
    let mut sym: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for (idx, c) in ordered {
        let mut k = idx.clone();
        k.sort_unstable();
        if let Some(prev) = sym.get(&k) {
            if prev != c {
                return Err(Error::Inconsistent(format!(
                    "W({g},{h}) not symmetric: {idx:?} has {c}, another ordering has {prev}"
                )));
            }
        } else {
            sym.insert(k, c.clone());
        }
    }
    for k in sym.keys() {
        for p in distinct_permutations(k) {
            if !ordered.contains_key(&p) {
                return Err(Error::Inconsistent(format!(
                    "W({g},{h}) not symmetric: ordering {p:?} of {k:?} is missing"
                )));
            }
        }
    }
    CorrDiff::new(g, h, f, sym)
}
