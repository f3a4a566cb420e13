mod common;

use std::collections::{BTreeSet, HashSet};

use common::{arb_category, corpus, retracts, trivial};
use proptest::prelude::*;
use tangent_display_core::constructions::fibration::transfer_counterexamples;
use tangent_display_core::constructions::{
    karoubi_condition_comparison, karoubi_envelope, open_subobjects, par_category,
    slice_tangent_category, term_slice_unit_counit, ConstructionError,
};
use tangent_display_core::display::{commuting_squares, Classifier};
use tangent_display_core::fincat::{
    enumerate_idempotents, is_iso, samples, validate_category, validate_functor, FinCategory,
    MorId,
};
use tangent_display_core::limits::{is_pullback_square, Square};
use tangent_display_core::tangent::{check_negatives, TangentStructure};

fn check_karoubi(cat: &FinCategory, ts: &TangentStructure) -> Result<(), TestCaseError> {
    let k = karoubi_envelope(cat, ts).unwrap();
    prop_assert!(k.verified());
    let sc = &k.split_cat;
    prop_assert!(validate_category(sc).is_valid());
    for e in enumerate_idempotents(sc) {
        let split = retracts(sc, sc.objects().next().unwrap(), sc.dom(e))
            .into_iter()
            .chain(sc.objects().flat_map(|o| retracts(sc, o, sc.dom(e))))
            .any(|(s, r)| sc.then(r, s) == Some(e));
        prop_assert!(split, "idempotent {} does not split", sc.mor_name(e));
    }
    let emb = &k.embedding;
    prop_assert!(validate_functor(cat, sc, emb).is_valid());
    for a in cat.objects() {
        for b in cat.objects() {
            let images: HashSet<MorId> = cat.hom(a, b).iter().map(|&f| emb.mor(f)).collect();
            prop_assert_eq!(images.len(), cat.hom(a, b).len());
            prop_assert_eq!(images.len(), sc.hom(emb.obj(a), emb.obj(b)).len());
        }
    }
    for (i, &(m, e)) in k.provenance.iter().enumerate() {
        prop_assert_eq!(cat.then(e, e), Some(e));
        prop_assert_eq!(cat.dom(e), m);
        let o = tangent_display_core::fincat::ObjId(i as u32);
        prop_assert_eq!(k.morphism_source[sc.id(o).index()], e);
    }
    for f in sc.morphisms() {
        let (a, b) = (sc.dom(f), sc.cod(f));
        let (e, e2) = (k.provenance[a.index()].1, k.provenance[b.index()].1);
        let u = k.morphism_source[f.index()];
        prop_assert_eq!(cat.path(&[e, u, e2]), Some(u));
    }
    let sts = &k.split_ts;
    for m in cat.objects() {
        let em = emb.obj(m);
        prop_assert_eq!(sts.t(em), emb.obj(ts.t(m)));
        for (x, y) in [
            (sts.p(em), ts.p(m)),
            (sts.z(em), ts.z(m)),
            (sts.l(em), ts.l(m)),
            (sts.c(em), ts.c(m)),
        ] {
            prop_assert_eq!(x, emb.mor(y));
        }
    }
    for f in cat.morphisms() {
        prop_assert_eq!(sts.tm(emb.mor(f)), emb.mor(ts.tm(f)));
    }
    let src = Classifier::new(cat, ts);
    let tgt = Classifier::new(sc, sts);
    for q in cat.morphisms() {
        if src.is_t_display(q) {
            prop_assert!(tgt.is_t_display(emb.mor(q)));
        }
    }
    Ok(())
}

fn check_slices(cat: &FinCategory, ts: &TangentStructure) -> Result<usize, TestCaseError> {
    let cls = Classifier::new(cat, ts);
    let mut built = 0;
    for base in cat.objects() {
        let sl = match slice_tangent_category(cat, ts, base) {
            Ok(sl) => sl,
            Err(e) => return Err(TestCaseError::fail(format!("slice over {}: {e}", cat.obj_name(base)))),
        };
        built += 1;
        prop_assert!(sl.verified(), "{:?} {:?}", sl.axioms.failing().collect::<Vec<_>>(), sl.product_failure);
        prop_assert!(validate_category(&sl.slice_cat).is_valid());
        let expected: BTreeSet<MorId> = cat
            .into_object(base)
            .filter(|&q| cls.is_t_display(q))
            .collect();
        let got: BTreeSet<MorId> = sl.object_source.iter().copied().collect();
        prop_assert_eq!(got.len(), sl.object_source.len());
        prop_assert_eq!(got, expected);
        let terminal = sl.terminal.unwrap();
        prop_assert_eq!(sl.object_source[terminal.index()], cat.id(base));
        for c in sl.slice_cat.morphisms() {
            let h = sl.morphism_source[c.index()];
            let (a, b) = (sl.slice_cat.dom(c), sl.slice_cat.cod(c));
            prop_assert_eq!(cat.then(h, sl.object_source[b.index()]), Some(sl.object_source[a.index()]));
        }
        if check_negatives(cat, ts).is_ok_and(|r| r.passes()) {
            prop_assert!(sl.negatives.as_ref().is_some_and(|r| r.passes()));
        }
        prop_assert_eq!(transfer_counterexamples(cat, ts, &sl), vec![]);
    }
    match term_slice_unit_counit(cat, ts) {
        Ok(report) => prop_assert!(report.holds(), "{:?}", report.failures),
        Err(ConstructionError::NoTerminal) => {
            prop_assert!(tangent_display_core::limits::compute_terminal(cat).is_none())
        }
        Err(ConstructionError::NotCartesian(_)) => {
            let t = tangent_display_core::limits::compute_terminal(cat).unwrap();
            let bangs = cat.objects().map(|m| tangent_display_core::limits::bang(cat, m, t));
            prop_assert!(!bangs.into_iter().all(|b| cls.is_t_display(b)));
        }
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    }
    Ok(built)
}

/// Union of every family of monics (isomorphisms included) meeting the
/// defining clauses, scanned directly.
fn scan_maximal_monics(cat: &FinCategory, ts: &TangentStructure) -> Option<BTreeSet<MorId>> {
    let cls = Classifier::new(cat, ts);
    let mono = |f: MorId| {
        cat.objects().all(|x| {
            let hom = cat.hom(x, cat.dom(f));
            hom.iter().map(|&a| cat.then(a, f)).collect::<HashSet<_>>().len() == hom.len()
        })
    };
    let isos: BTreeSet<MorId> = cat.morphisms().filter(|&f| is_iso(cat, f)).collect();
    let pool: Vec<MorId> = cat
        .morphisms()
        .filter(|&f| !isos.contains(&f) && mono(f))
        .collect();
    if pool.len() > 12 {
        return None;
    }
    let squares = commuting_squares(cat);
    let pullbacks: Vec<Square> = squares
        .into_iter()
        .filter(|s| is_pullback_square(cat, s).unwrap().holds())
        .collect();
    let good = |m: MorId| mono(m) && cls.is_t_display(m) && cls.etale(m).holds();
    let mut union = BTreeSet::new();
    for mask in 0u32..(1 << pool.len()) {
        let mut s = isos.clone();
        s.extend((0..pool.len()).filter(|i| mask & (1 << i) != 0).map(|i| pool[i]));
        let ok = s.iter().all(|&m| {
            good(m)
                && s.contains(&ts.tm(m))
                && cat.into_object(cat.cod(m)).all(|f| {
                    pullbacks
                        .iter()
                        .any(|sq| sq.bottom == f && sq.rightv == m && s.contains(&sq.leftv))
                })
                && s.iter().all(|&n| cat.then(m, n).is_none_or(|mn| s.contains(&mn)))
        });
        if ok {
            union.extend(s);
        }
    }
    Some(union)
}

fn restriction_oracle(cat: &FinCategory, r: &[MorId]) -> Result<(), String> {
    let r = |f: MorId| r[f.index()];
    let t = |f: MorId, g: MorId| cat.then(f, g).unwrap();
    for f in cat.morphisms() {
        if t(r(f), f) != f {
            return Err(format!("R1 at {}", cat.mor_name(f)));
        }
        if r(r(f)) != r(f) || t(r(f), r(f)) != r(f) {
            return Err(format!("restriction idempotent at {}", cat.mor_name(f)));
        }
        for g in cat.morphisms().filter(|&g| cat.dom(g) == cat.dom(f)) {
            if t(r(f), r(g)) != t(r(g), r(f)) {
                return Err("R2".into());
            }
            if r(t(r(f), g)) != t(r(f), r(g)) {
                return Err("R3".into());
            }
        }
        for g in cat.morphisms().filter(|&g| cat.dom(g) == cat.cod(f)) {
            if t(f, r(g)) != t(r(t(f, g)), f) {
                return Err("R4".into());
            }
        }
    }
    Ok(())
}

fn check_open_and_par(cat: &FinCategory, ts: &TangentStructure) -> Result<(), TestCaseError> {
    let open = open_subobjects(cat, ts);
    if let Some(scan) = scan_maximal_monics(cat, ts) {
        prop_assert_eq!(&open.monics, &scan);
        prop_assert_eq!(open.is_maximal(), Some(true));
    }
    prop_assert!(open.system_of_monics.is_ok(), "{:?}", open.system_of_monics);
    for (&(i, j), meet) in &open.meets {
        let sq = meet.certificate.square;
        prop_assert!(is_pullback_square(cat, &sq).unwrap().holds());
        let (mi, mj) = (open.elements[i].mor, open.elements[j].mor);
        prop_assert_eq!(BTreeSet::from([sq.bottom, sq.rightv]), BTreeSet::from([mi, mj]));
        let diag = cat.then(sq.leftv, sq.bottom).unwrap();
        prop_assert_eq!(open.element_of(cat, diag), Some(meet.meet));
        // the meet lies below both
        prop_assert!(open.order.contains(&(meet.meet, i)) && open.order.contains(&(meet.meet, j)));
    }
    let par = par_category(cat, ts, &open.monics).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(par.checks.passes(), "{:?}", par.checks);
    let pc = &par.par_cat;
    prop_assert!(validate_category(pc).is_valid());
    restriction_oracle(pc, &par.restriction).map_err(TestCaseError::fail)?;
    for &(m, _) in &par.span_reps {
        prop_assert!(open.monics.contains(&m));
    }
    for f in pc.morphisms() {
        for g in pc.morphisms() {
            if let Some(fg) = pc.then(f, g) {
                if par.is_total(f) && par.is_total(g) {
                    prop_assert!(par.is_total(fg));
                }
            }
        }
    }
    // totals are exactly the spans with an identity left leg
    for (i, &(m, _)) in par.span_reps.iter().enumerate() {
        let f = MorId(i as u32);
        prop_assert_eq!(par.is_total(f), is_iso(cat, m));
    }
    Ok(())
}

#[test]
fn karoubi_on_corpus() {
    for (name, cat, ts) in corpus() {
        check_karoubi(&cat, &ts).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn karoubi_of_idempotent_monoid_splits_e() {
    let (_, cat, ts) = trivial("", samples::idempotent_monoid());
    let k = karoubi_envelope(&cat, &ts).unwrap();
    assert_eq!(k.split_cat.object_count(), 2);
    assert_eq!(k.split_cat.morphism_count(), 5);
    let cmp = karoubi_condition_comparison(&cat);
    assert_eq!(cmp.standard_cells, 5);
    assert!(!cmp.agree);
}

#[test]
fn karoubi_conditions_agree_on_posets() {
    for cat in [samples::diamond(), samples::vee(), common::closed_poset(4, &[true, false, true])] {
        let cmp = karoubi_condition_comparison(&cat);
        assert!(cmp.agree && cmp.commuting_is_category, "{cmp:?}");
        assert_eq!(cmp.standard_cells, cat.morphism_count());
    }
}

#[test]
fn slices_on_corpus() {
    let mut built = 0;
    for (name, cat, ts) in corpus() {
        built += check_slices(&cat, &ts).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    assert!(built >= 20);
}

#[test]
fn open_and_par_on_corpus() {
    for (name, cat, ts) in corpus() {
        check_open_and_par(&cat, &ts).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn karoubi_invariants(cat in arb_category()) {
        let ts = tangent_display_core::tangent::trivial_tangent(&cat).unwrap();
        check_karoubi(&cat, &ts)?;
    }

    #[test]
    fn slice_invariants(cat in arb_category()) {
        let ts = tangent_display_core::tangent::trivial_tangent(&cat).unwrap();
        check_slices(&cat, &ts)?;
    }

    #[test]
    fn open_and_par_invariants(cat in arb_category()) {
        let ts = tangent_display_core::tangent::trivial_tangent(&cat).unwrap();
        check_open_and_par(&cat, &ts)?;
    }
}
