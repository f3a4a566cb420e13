mod common;

use std::collections::{BTreeSet, HashSet};

use common::{arb_category, corpus, endofunctors};
use proptest::prelude::*;
use tangent_display_core::fincat::{
    enumerate_idempotents, enumerate_monos, enumerate_retract_pairs, functor_orbit, inverse,
    is_iso, iterate_functor, split_idempotent, validate_category, FinCategory, MorId,
};

fn laws_hold(cat: &FinCategory) -> bool {
    let ms: Vec<MorId> = cat.morphisms().collect();
    let units = ms.iter().all(|&f| {
        cat.then(cat.id(cat.dom(f)), f) == Some(f) && cat.then(f, cat.id(cat.cod(f))) == Some(f)
    });
    let assoc = ms.iter().all(|&f| {
        ms.iter().all(|&g| {
            ms.iter().all(|&h| match (cat.then(f, g), cat.then(g, h)) {
                (Some(fg), Some(gh)) => cat.then(fg, h) == cat.then(f, gh),
                _ => true,
            })
        })
    });
    let typed = ms.iter().all(|&f| {
        ms.iter().all(|&g| {
            let c = cat.then(f, g);
            if cat.cod(f) != cat.dom(g) {
                c.is_none()
            } else {
                c.is_some_and(|h| cat.dom(h) == cat.dom(f) && cat.cod(h) == cat.cod(g))
            }
        })
    });
    units && assoc && typed
}

/// Monos by the cancellation property: post-composition with `f` is
/// injective on every hom-set into its domain.
fn brute_force_monos(cat: &FinCategory) -> BTreeSet<MorId> {
    cat.morphisms()
        .filter(|&f| {
            cat.objects().all(|x| {
                let hom = cat.hom(x, cat.dom(f));
                let images: HashSet<_> = hom.iter().map(|&a| cat.then(a, f)).collect();
                images.len() == hom.len()
            })
        })
        .collect()
}

#[test]
fn bundled_categories_are_valid() {
    for (name, cat, _) in corpus() {
        assert!(validate_category(&cat).is_valid(), "{name}");
        assert!(laws_hold(&cat), "{name}");
    }
}

#[test]
fn empty_category_enumerations_are_empty() {
    let cat = FinCategory::empty();
    assert!(enumerate_monos(&cat).is_empty());
    assert!(enumerate_idempotents(&cat).is_empty());
    assert_eq!(endofunctors(&cat, 4).len(), 1);
}

#[test]
fn monos_match_cancellation_on_corpus() {
    for (name, cat, _) in corpus() {
        assert_eq!(enumerate_monos(&cat), brute_force_monos(&cat), "{name}");
    }
}

#[test]
fn orbit_of_a_transposition_has_period_two() {
    let cat = common::closed_poset(2, &[false]);
    let swaps: Vec<_> = endofunctors(&cat, 16)
        .into_iter()
        .filter(|f| !f.is_identity() && f.obj_map()[0] != f.obj_map()[1])
        .collect();
    assert_eq!(swaps.len(), 1);
    let orbit = functor_orbit(&swaps[0]);
    assert_eq!((orbit.preperiod, orbit.period), (0, 2));
}

fn check_orbit(cat: &FinCategory) -> Result<(), TestCaseError> {
    for f in endofunctors(cat, 40) {
        let orbit = functor_orbit(&f);
        let (pre, per) = (orbit.preperiod, orbit.period);
        prop_assert!(per >= 1);
        prop_assert_eq!(iterate_functor(&f, pre + per), iterate_functor(&f, pre));
        // the first repeated power is at pre + per, repeating pre
        let powers: Vec<_> = (0..pre + per).map(|k| iterate_functor(&f, k)).collect();
        for j in 0..powers.len() {
            for i in 0..j {
                prop_assert_ne!(&powers[i], &powers[j]);
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn valid_categories_satisfy_laws(cat in arb_category()) {
        prop_assert!(validate_category(&cat).is_valid());
        prop_assert!(laws_hold(&cat));
    }

    #[test]
    fn monos_sound_and_complete(cat in arb_category()) {
        prop_assert_eq!(enumerate_monos(&cat), brute_force_monos(&cat));
    }

    #[test]
    fn orbit_is_exact_and_minimal(cat in arb_category()) {
        check_orbit(&cat)?;
    }

    #[test]
    fn inverses_are_two_sided(cat in arb_category()) {
        for f in cat.morphisms() {
            match inverse(&cat, f) {
                Some(g) => {
                    prop_assert_eq!(cat.then(f, g), Some(cat.id(cat.dom(f))));
                    prop_assert_eq!(cat.then(g, f), Some(cat.id(cat.cod(f))));
                }
                None => prop_assert!(!is_iso(&cat, f)),
            }
        }
    }

    #[test]
    fn retract_pairs_and_splittings(cat in arb_category()) {
        for o in cat.objects() {
            for pair in enumerate_retract_pairs(&cat, o) {
                prop_assert_eq!(cat.cod(pair.section), o);
                let sr = cat.then(pair.section, pair.retraction);
                prop_assert_eq!(sr, Some(cat.id(cat.dom(pair.section))));
            }
        }
        for e in enumerate_idempotents(&cat) {
            prop_assert_eq!(cat.then(e, e), Some(e));
            if let Some(pair) = split_idempotent(&cat, e) {
                prop_assert_eq!(cat.then(pair.retraction, pair.section), Some(e));
            }
        }
    }
}
