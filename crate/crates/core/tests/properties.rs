use std::collections::BTreeMap;

use num_traits::Zero;
use proptest::prelude::*;

use c3tr::arith::{
    format_rational, ibp_residue_check, parse_rational, rat, LogExt, Rational, Series,
};
use c3tr::conventions::{Conventions, Sign};
use c3tr::curve::FramedCurve;
use c3tr::psi::{psi_form, psi_shift_recursion_step, PsiExpansion, PsiTable};
use c3tr::recursion::{distinct_permutations, CorrDiff, CorrDiffJson, CorrStore, WindowPolicy};

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=15).prop_map(|(n, d)| rat(n, d))
}

fn laurent(
    min_start: i64,
    max_start: i64,
    max_len: usize,
) -> impl Strategy<Value = Series<Rational>> {
    (
        min_start..=max_start,
        prop::collection::vec(rational(), 0..max_len),
    )
        .prop_map(|(start, cs)| Series::exact(start, cs))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rationals_round_trip_through_strings(r in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn ibp_holds_for_rational_pairs(a in laurent(-8, 3, 10), b in laurent(-8, 3, 10)) {
        prop_assert!(ibp_residue_check(&a, &b).unwrap());
    }

    #[test]
    fn ibp_holds_over_the_log_extension(
        a in laurent(-6, 2, 8), b in laurent(-6, 2, 8), la in laurent(-6, 2, 8)
    ) {
        // a + ℓ·la keeps ℓ as an opaque constant
        let lifted = a.map(|r| LogExt::rational(r.clone())).add(&la.map(|r| LogExt::new(Rational::zero(), r.clone())));
        let other = b.map(|r| LogExt::rational(r.clone()));
        prop_assert!(ibp_residue_check(&lifted, &other).unwrap());
    }

    #[test]
    fn product_with_inverse_is_one(a in laurent(-4, 4, 6), window in 4i64..12) {
        prop_assume!(a.valuation().is_some());
        let v = a.valuation().unwrap();
        let truncated = a.truncate(v + window);
        let one = truncated.mul(&truncated.inverse().unwrap());
        prop_assert_eq!(one.coeff(0), Some(rat(1, 1)));
        for e in 1..window {
            prop_assert_eq!(one.coeff(e), Some(Rational::zero()));
        }
    }

    #[test]
    fn peel_round_trips(f in 1i64..=4, cs in prop::collection::btree_map(0usize..=6, rational(), 0..5)) {
        let table = PsiTable::new(f, 6).unwrap();
        let e = PsiExpansion { coeffs: cs.into_iter().filter(|(_, c)| !c.is_zero()).collect() };
        let form = table.reconstruct(&e);
        prop_assert_eq!(table.psi_peel(&form).unwrap(), e);
    }

    #[test]
    fn shift_recursion_reproduces_operator_definition(f in 1i64..=6, n in 1usize..=6) {
        let prev = psi_form(n - 1, f).unwrap();
        let next = psi_shift_recursion_step(&prev, Sign::Plus).unwrap();
        prop_assert_eq!(&next.scalar_z, &psi_form(n, f).unwrap().scalar_z);
        let flipped = psi_shift_recursion_step(&prev, Sign::Minus).unwrap();
        prop_assert_eq!(flipped.scalar_z, next.scalar_z.neg());
    }

    #[test]
    fn corrdiff_json_round_trips(
        h in 1u32..=3,
        entries in prop::collection::vec((prop::collection::vec(0usize..=2, 3), rational()), 0..4)
    ) {
        let mut coeffs = BTreeMap::new();
        for (mut k, c) in entries {
            k.truncate(h as usize);
            k.sort();
            coeffs.insert(k, c);
        }
        let w = CorrDiff::new(2, h, 1, coeffs).unwrap();
        let conv = Conventions::new(Sign::Minus, Sign::Plus);
        let text = serde_json::to_string(&w.to_json(conv)).unwrap();
        let back: CorrDiffJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(CorrDiff::from_json(&back).unwrap(), w);
    }

    #[test]
    fn multi_indices_over_the_bound_are_rejected(g in 0u32..=2, h in 1u32..=3, extra in 1usize..4) {
        prop_assume!(2 * g as i64 - 2 + h as i64 >= 1);
        let dim = (3 * g as i64 - 3 + h as i64) as usize;
        let mut k = vec![0; h as usize];
        k[h as usize - 1] = dim + extra;
        let coeffs = BTreeMap::from([(k, rat(1, 1))]);
        prop_assert!(CorrDiff::new(g, h, 1, coeffs).is_err());
    }

    #[test]
    fn permutations_are_distinct_and_complete(k in prop::collection::vec(0usize..3, 1..5)) {
        let mut sorted = k.clone();
        sorted.sort();
        let perms = distinct_permutations(&sorted);
        let mut uniq = perms.clone();
        uniq.sort();
        uniq.dedup();
        prop_assert_eq!(uniq.len(), perms.len());
        prop_assert!(perms.contains(&k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn involution_is_an_involution_on_the_fiber(f in 1i64..=8, window in 3i64..=24) {
        let c = FramedCurve::new(f).unwrap();
        let s = c.conjugate_series(window).unwrap();
        prop_assert!(s.verify(&c).is_ok());
    }

    #[test]
    fn correlators_are_stable_under_wider_windows(f in 1i64..=5, gh in prop::sample::select(vec![(0u32, 3u32), (1, 1), (0, 4), (1, 2), (2, 1)]), margin in 0i64..=6) {
        let conv = Conventions::new(Sign::Minus, Sign::Plus);
        let base = CorrStore::new(conv, WindowPolicy::default(), None);
        let wide = CorrStore::new(conv, WindowPolicy::default().widened(margin), None);
        let c = FramedCurve::new(f).unwrap();
        let (g, h) = gh;
        let a = base.correlator(&c, g, h).unwrap();
        let b = wide.correlator(&c, g, h).unwrap();
        prop_assert_eq!(&*a, &*b);
        for w in base.computed() {
            let dim = 3 * w.g as i64 - 3 + w.h as i64;
            prop_assert!(w.coeffs.keys().all(|k| k.iter().sum::<usize>() as i64 <= dim));
        }
    }
}
