//! Partial maps `Par(X, M)` over a tangent display system of monics.
//!
//! A morphism `A ⇀ B` is an isomorphism class of spans `A <-m- D -f-> B`
//! with `m` in the system. Composition pulls the second monic back along
//! the first map and the restriction of `(m, f)` is `(m, m)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Assembler, ConstructionError};
use crate::display::{check_display_system_with, Classifier};
use crate::fincat::{
    is_iso, is_mono, split_idempotent, validate_functor, validate_nat, FinCategory, Functor, MorId,
    NatTransformation, ObjId,
};
use crate::limits::{compute_pullback, Cospan};
use crate::tangent::TangentStructure;

/// Re-verified properties of the constructed restriction category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParChecks {
    /// `R1`..`R4` with the first failing instance, if any.
    pub equations: Vec<(&'static str, Option<String>)>,
    pub idempotents_split: Option<String>,
    /// `T` lifts to a functor on partial maps.
    pub tangent_functor: Option<String>,
    /// `p`, `z`, `l`, `c` (and `n`) lift to total natural transformations.
    pub structural_total: Option<String>,
}

impl ParChecks {
    pub fn passes(&self) -> bool {
        self.equations.iter().all(|e| e.1.is_none())
            && self.idempotents_split.is_none()
            && self.tangent_functor.is_none()
            && self.structural_total.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct ParOutput {
    pub par_cat: FinCategory,
    /// Restriction of each partial map.
    pub restriction: Vec<MorId>,
    pub monic_system: BTreeSet<MorId>,
    /// Canonical `(m, f)` for each partial map.
    pub span_reps: Vec<(MorId, MorId)>,
    pub tangent: Option<Functor>,
    pub checks: ParChecks,
}

impl ParOutput {
    /// The class of the span `(m, f)`.
    pub fn class_of(&self, m: MorId, f: MorId) -> Option<MorId> {
        self.span_reps
            .iter()
            .position(|&s| s == (m, f))
            .map(|i| MorId(i as u32))
    }

    pub fn is_total(&self, f: MorId) -> bool {
        self.restriction[f.index()] == self.par_cat.id(self.par_cat.dom(f))
    }
}

/// The defining clauses of a tangent display system of monics.
pub fn check_system_of_monics(
    cls: &Classifier<'_>,
    members: &BTreeSet<MorId>,
) -> Result<(), String> {
    let cat = cls.cat();
    for &m in members {
        if !is_mono(cat, m) {
            return Err(format!("monos: {} is not a monomorphism", cat.mor_name(m)));
        }
    }
    for &m in members {
        if !cls.etale(m).holds() {
            return Err(format!("etale: {} is not etale", cat.mor_name(m)));
        }
    }
    let v = check_display_system_with(cls, members, true);
    if !v.is_display_system() {
        let (name, clause) = v
            .clauses()
            .into_iter()
            .find(|(_, c)| !c.holds)
            .expect("some clause fails");
        return Err(format!(
            "tangent display system: {name}: {}",
            clause.counterexample.clone().unwrap_or_default()
        ));
    }
    if let Some(why) = &v.closed_under_composition.counterexample {
        return Err(format!("composition: {why}"));
    }
    for f in cat.morphisms() {
        if is_iso(cat, f) && !members.contains(&f) {
            return Err(format!("isomorphisms: {} is missing", cat.mor_name(f)));
        }
    }
    Ok(())
}

/// Least `(apex name, m name, f name)` over the isomorphism class.
fn canonical(cat: &FinCategory, m: MorId, f: MorId) -> (MorId, MorId) {
    let d = cat.dom(m);
    let key = |(m, f): (MorId, MorId)| (cat.obj_name(cat.dom(m)), cat.mor_name(m), cat.mor_name(f));
    let mut best = (m, f);
    for x in cat.objects() {
        for &u in cat.hom(x, d) {
            if !is_iso(cat, u) {
                continue;
            }
            let cand = (
                cat.then(u, m).expect("composable"),
                cat.then(u, f).expect("composable"),
            );
            if key(cand) < key(best) {
                best = cand;
            }
        }
    }
    best
}

pub fn par_category(
    cat: &FinCategory,
    ts: &TangentStructure,
    monic_system: &BTreeSet<MorId>,
) -> Result<ParOutput, ConstructionError> {
    let cls = Classifier::new(cat, ts);
    check_system_of_monics(&cls, monic_system).map_err(ConstructionError::Precondition)?;

    let mut asm = Assembler::new();
    for o in cat.objects() {
        asm.object(cat.obj_name(o));
    }
    let mut span_reps = Vec::new();
    let mut index = BTreeMap::new();
    for a in cat.objects() {
        for b in cat.objects() {
            let mut reps = BTreeSet::new();
            for &m in monic_system.iter().filter(|&&m| cat.cod(m) == a) {
                for &f in cat.hom(cat.dom(m), b) {
                    reps.insert(canonical(cat, m, f));
                }
            }
            for (m, f) in reps {
                let name = format!("({},{})", cat.mor_name(m), cat.mor_name(f));
                let id = asm.morphism(&name, a, b);
                index.insert((m, f), id);
                span_reps.push((m, f));
            }
        }
    }
    for a in cat.objects() {
        let i = cat.id(a);
        asm.identity(a, index[&canonical(cat, i, i)]);
    }
    let compose = |x: MorId, y: MorId| -> Option<MorId> {
        let (m, f) = span_reps[x.index()];
        let (m2, g) = span_reps[y.index()];
        let cert = compute_pullback(cat, Cospan { left: f, right: m2 })?;
        let mm = cat.then(cert.proj_left(), m)?;
        let gg = cat.then(cert.proj_right(), g)?;
        index.get(&canonical(cat, mm, gg)).copied()
    };
    let par_cat = asm.finish(compose)?;
    let restriction: Vec<MorId> = span_reps
        .iter()
        .map(|&(m, _)| index[&canonical(cat, m, m)])
        .collect();

    let checks_eq = restriction_equations(&par_cat, &restriction);
    let idempotents_split = restriction
        .iter()
        .find(|&&e| split_idempotent(&par_cat, e).is_none())
        .map(|&e| format!("{} does not split", par_cat.mor_name(e)));

    // T on spans is (Tm, Tf)
    let t = ts.functor();
    let lift_span = |(m, f): (MorId, MorId)| index.get(&canonical(cat, t.mor(m), t.mor(f))).copied();
    let t_par = span_reps
        .iter()
        .map(|&s| lift_span(s))
        .collect::<Option<Vec<_>>>()
        .map(|mors| Functor::new(cat.objects().map(|o| t.obj(o)).collect(), mors));
    let (tangent_functor, structural_total) = match &t_par {
        None => (Some("T does not preserve the system".into()), Some("T is undefined".into())),
        Some(tp) => {
            let r = validate_functor(&par_cat, &par_cat, tp);
            let tf = r.violations.first().map(|v| format!("{v}"));
            (tf, structural(cat, ts, &par_cat, &index, &restriction, tp))
        }
    };

    Ok(ParOutput {
        par_cat,
        restriction,
        monic_system: monic_system.clone(),
        span_reps,
        tangent: t_par,
        checks: ParChecks {
            equations: checks_eq,
            idempotents_split,
            tangent_functor,
            structural_total,
        },
    })
}

fn structural(
    cat: &FinCategory,
    ts: &TangentStructure,
    par: &FinCategory,
    index: &BTreeMap<(MorId, MorId), MorId>,
    restriction: &[MorId],
    t: &Functor,
) -> Option<String> {
    let total = |f: MorId| {
        let d = cat.dom(f);
        index.get(&canonical(cat, cat.id(d), f)).copied()
    };
    let ident = Functor::identity(par);
    let tt = t.then(t);
    let (p, z, l, c) = (|m| ts.p(m), |m| ts.z(m), |m| ts.l(m), |m| ts.c(m));
    let mut list: Vec<(&str, &dyn Fn(ObjId) -> MorId, &Functor, &Functor)> = alloc::vec![
        ("p", &p, t, &ident),
        ("z", &z, &ident, t),
        ("l", &l, t, &tt),
        ("c", &c, &tt, &tt),
    ];
    let neg = |m| ts.n(m).expect("present");
    if ts.data.negation.is_some() {
        list.push(("n", &neg, t, t));
    }
    for (name, comp, src, tgt) in list {
        let Some(cs) = cat.objects().map(|m| total(comp(m))).collect::<Option<Vec<_>>>() else {
            return Some(format!("{name} has no total lift"));
        };
        if let Some(&c) = cs.iter().find(|&&c| restriction[c.index()] != par.id(par.dom(c))) {
            return Some(format!("{name} component {} is not total", par.mor_name(c)));
        }
        let r = validate_nat(par, par, src, tgt, &NatTransformation::new(cs));
        if let Some(v) = r.violations.first() {
            return Some(format!("{name}: {v}"));
        }
    }
    None
}

/// `R1`..`R4` in diagrammatic order, with `r(f)` the restriction:
/// `r(f);f = f`, `r(f);r(g) = r(g);r(f)`, `r(r(f);g) = r(f);r(g)`,
/// `f;r(g) = r(f;g);f`.
pub fn restriction_equations(
    cat: &FinCategory,
    restriction: &[MorId],
) -> Vec<(&'static str, Option<String>)> {
    let r = |f: MorId| restriction[f.index()];
    let t = |f: MorId, g: MorId| cat.then(f, g).expect("composable");
    let n = |f: MorId| cat.mor_name(f);
    let mut r1 = None;
    let mut r2 = None;
    let mut r3 = None;
    let mut r4 = None;
    for f in cat.morphisms() {
        if r1.is_none() && t(r(f), f) != f {
            r1 = Some(format!("f = {}", n(f)));
        }
        for g in cat.out_of_object(cat.dom(f)) {
            if r2.is_none() && t(r(f), r(g)) != t(r(g), r(f)) {
                r2 = Some(format!("f = {}, g = {}", n(f), n(g)));
            }
            if r3.is_none() && r(t(r(f), g)) != t(r(f), r(g)) {
                r3 = Some(format!("f = {}, g = {}", n(f), n(g)));
            }
        }
        for g in cat.out_of_object(cat.cod(f)) {
            if r4.is_none() && t(f, r(g)) != t(r(t(f, g)), f) {
                r4 = Some(format!("f = {}, g = {}", n(f), n(g)));
            }
        }
    }
    alloc::vec![("R1", r1), ("R2", r2), ("R3", r3), ("R4", r4)]
}
