//! Closed forms of the low correlators as polynomials in the framing.

use std::collections::BTreeMap;

use crate::arith::{rat_int, Rational};
use crate::recursion::CorrDiff;

fn ff1(f: i64) -> Rational {
    rat_int(f * (f + 1))
}

fn tri(f: i64) -> Rational {
    rat_int(1 + f + f * f)
}

fn build(g: u32, h: u32, f: i64, terms: Vec<(Vec<usize>, Rational)>) -> CorrDiff {
    CorrDiff::new(g, h, f, terms.into_iter().collect::<BTreeMap<_, _>>()).expect("valid golden")
}

/// `-(f(f+1))² Ψ₀Ψ₀Ψ₀`
pub fn w03(f: i64) -> CorrDiff {
    let a = ff1(f);
    build(0, 3, f, vec![(vec![0, 0, 0], -(&a * &a))])
}

/// `(f(f+1))³ Σ_i Ψ₁(y_i) Π_{j≠i} Ψ₀(y_j)`
pub fn w04(f: i64) -> CorrDiff {
    let a = ff1(f);
    build(0, 4, f, vec![(vec![0, 0, 0, 1], &a * &a * &a)])
}

/// `((1+f+f²)Ψ₀ - f(f+1)Ψ₁) / 24`
pub fn w11(f: i64) -> CorrDiff {
    let d = rat_int(24);
    build(
        1,
        1,
        f,
        vec![(vec![0], tri(f) / &d), (vec![1], -ff1(f) / &d)],
    )
}

/// The four Ψ₁..Ψ₄ coefficients over 5760.
pub fn w21(f: i64) -> CorrDiff {
    let d = rat_int(5760);
    let t = tri(f);
    let a = ff1(f);
    build(
        2,
        1,
        f,
        vec![
            (vec![1], rat_int(2) * &a / &d),
            (vec![2], rat_int(-7) * &t * &t / &d),
            (
                vec![3],
                rat_int(12 * f * (1 + 2 * f + 2 * f * f + f * f * f)) / &d,
            ),
            (vec![4], rat_int(-5) * &a * &a / &d),
        ],
    )
}

/// Readings of the genus-one two-point display
/// `1/24 (-(1+f+f²)Ψ₀Ψ₁ + f(1+f)Ψ₀Ψ₂ + (y₁↔y₂) + f(1+f)Ψ₁Ψ₁)`, which has no
/// equals sign and an ambiguous extent for the swap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct W12Reading {
    /// The swap applies to everything around it, so `Ψ₁Ψ₁` appears twice;
    /// otherwise it symmetrizes the two mixed terms only.
    pub swap_all: bool,
    /// Multiplies by `f(f+1)`, the `(f(f+1))^(h-1)` prefactor every other
    /// multi-point display carries.
    pub with_prefactor: bool,
}

impl W12Reading {
    pub const ALL: [W12Reading; 4] = [
        W12Reading {
            swap_all: false,
            with_prefactor: false,
        },
        W12Reading {
            swap_all: true,
            with_prefactor: false,
        },
        W12Reading {
            swap_all: false,
            with_prefactor: true,
        },
        W12Reading {
            swap_all: true,
            with_prefactor: true,
        },
    ];

    pub fn name(self) -> String {
        format!(
            "{}{}",
            if self.swap_all {
                "swap-all-terms"
            } else {
                "swap-mixed-terms"
            },
            if self.with_prefactor {
                "+f(f+1)-prefactor"
            } else {
                ""
            }
        )
    }
}

pub fn w12(f: i64, reading: W12Reading) -> CorrDiff {
    let a = ff1(f);
    let d = if reading.with_prefactor {
        rat_int(24) / &a
    } else {
        rat_int(24)
    };
    let diag = if reading.swap_all {
        rat_int(2) * &a
    } else {
        a.clone()
    };
    build(
        1,
        2,
        f,
        vec![
            (vec![0, 1], -tri(f) / &d),
            (vec![0, 2], &a / &d),
            (vec![1, 1], diag / &d),
        ],
    )
}

/// Readings of the `W^(1,2)` display equal to `w`.
pub fn matching_w12_readings(w: &CorrDiff) -> Vec<W12Reading> {
    W12Reading::ALL
        .into_iter()
        .filter(|r| w12(w.f, *r) == *w)
        .collect()
}

/// The golden value for `(g, h)` if one exists (not `W^(1,2)`).
pub fn golden(g: u32, h: u32, f: i64) -> Option<CorrDiff> {
    match (g, h) {
        (0, 3) => Some(w03(f)),
        (0, 4) => Some(w04(f)),
        (1, 1) => Some(w11(f)),
        (2, 1) => Some(w21(f)),
        _ => None,
    }
}
