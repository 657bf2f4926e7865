mod common;

use common::semilinear_maps;
use noohi::counterexamples::{
    borel_obstruction, build_interval_gset, frobenius_obstruction, propagate, FrobeniusOutcome, IntervalGSet, Side,
};
use noohi::padics::{borel_mul, psi_word, twisted_word, unit_generator, BorelElement, PsiLetter};
use proptest::prelude::*;

fn check_actions(s: &IntervalGSet) -> Result<(), TestCaseError> {
    for side in [Side::A, Side::B] {
        for (i, iv) in s.intervals(side).iter().enumerate() {
            let odd = side == Side::A;
            prop_assert_eq!(iv.level % 2 == 1, odd);
            prop_assert_eq!(iv.size, (s.ell as usize).pow(iv.level));
            if i > 0 {
                prop_assert_eq!(iv.level, s.intervals(side)[i - 1].level + 2);
            }
            if !iv.complete {
                continue;
            }
            let image: Vec<usize> = (iv.start..iv.start + iv.size).map(|p| s.act(side, 1, p).unwrap()).collect();
            let mut sorted = image.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (iv.start..iv.start + iv.size).collect::<Vec<_>>());
            let orbit: Vec<usize> = (0..iv.size as i128).map(|k| s.act(side, k, iv.start).unwrap()).collect();
            let mut orbit_sorted = orbit.clone();
            orbit_sorted.sort_unstable();
            orbit_sorted.dedup();
            prop_assert_eq!(orbit_sorted.len(), iv.size);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn interval_actions_are_transitive_permutations(ell in prop::sample::select(vec![3u64, 5]), depth in 3u32..5) {
        prop_assume!(ell == 3 || depth == 3);
        let s = build_interval_gset(ell, depth).unwrap();
        check_actions(&s)?;
        prop_assert!(s.overlaps().iter().all(|&(_, n)| n >= 2));
    }

    #[test]
    fn conflicts_persist_with_depth(k in 1u64..40) {
        let q = 1 + 3 * k;
        let shallow = build_interval_gset(3, 3).unwrap();
        let deep = build_interval_gset(3, 4).unwrap();
        if let FrobeniusOutcome::Conflict(r) = frobenius_obstruction(&shallow, q).unwrap() {
            let FrobeniusOutcome::Conflict(r2) = frobenius_obstruction(&deep, q).unwrap() else {
                return Err(TestCaseError::fail(format!("q = {q}: conflict lost at depth 4")));
            };
            prop_assert_eq!((r.q, r.level), (r2.q, r2.level));
        }
    }

    #[test]
    fn twisted_words_follow_the_displayed_identities(
        ell in prop::sample::select(vec![3u64, 5, 7]),
        p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]),
        n in 1i64..6,
    ) {
        prop_assume!(p != ell);
        let u1 = unit_generator(ell, 12).unwrap();
        // t1ᵖ t3ᵖ t1⁻ᵖ = t3^{p·u1ᵖ}, so the inner product is t3^{p(u1ᵖ − u1)}
        let conj = psi_word(&[PsiLetter::int(1, p as i64), PsiLetter::int(3, p as i64), PsiLetter::int(1, -(p as i64))], &u1, 1).unwrap();
        let upper = conj.b.with_prec(10);
        let expected = noohi::padics::PadicScalar::from_int(ell, p as i128, 12).mul(&u1.pow(p as i64).to_scalar());
        prop_assert!(upper.agrees_with(&expected.with_prec(10)));
        let full = psi_word(&twisted_word(p as i64, n, &u1), &u1, 1).unwrap();
        let shrink = psi_word(&[PsiLetter::int(4, -n)], &u1, 1).unwrap();
        let grow = psi_word(&[PsiLetter::int(4, n)], &u1, 1).unwrap();
        let inner = psi_word(&twisted_word(p as i64, 0, &u1), &u1, 1).unwrap();
        let rebuilt: BorelElement = borel_mul(&borel_mul(&shrink, &inner, 1).unwrap(), &grow, 1).unwrap();
        prop_assert!(full.b.agrees_with(&rebuilt.b));
        let rep = borel_obstruction(ell, p, n, 12).unwrap();
        prop_assert_eq!(rep.twisted_valuation, Some(rep.predicted_valuation));
        prop_assert!(rep.untwisted_in_integral);
    }
}

#[test]
fn propagation_is_forced_by_every_solution() {
    let s = build_interval_gset(3, 3).unwrap();
    for q in [28u64, 55, 82] {
        let sols = semilinear_maps(&s, q);
        assert!(!sols.is_empty(), "q = {q}");
        let forced = propagate(&s, q as u128, 2).expect("no clash below level 3");
        for (x, f) in forced.iter().enumerate() {
            if let Some(y) = f {
                assert!(sols.iter().all(|phi| phi[x] == Some(*y)), "q = {q}: point {x}");
            }
        }
    }
}
