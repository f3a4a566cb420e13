//! The display slice over a base `M` and the unit and counit of Term ⊣ Slice.
//!
//! Objects are the tangent display maps into `M`. For an object `q: E -> M`
//! the tangent bundle `T^M(q)` is the canonical pullback of `Tq` along `z_M`,
//! written `(V_q, q^M, iota_q)`. Every other component is a mediator into
//! such a pullback.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{require_axioms, Assembler, ConstructionError};
use crate::display::Classifier;
use crate::fincat::{FinCategory, Functor, MorId, NatTransformation, ObjId};
use crate::limits::{
    bang, compute_pullback, compute_terminal, is_pullback_square, is_t_pullback, Cospan,
    PullbackCertificate,
};
use crate::tangent::{
    check_negatives, check_tangent_axioms, AxiomReport, TangentData, TangentStructure,
};

/// Which source mediator defined a structural component at a slice object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSource {
    pub component: &'static str,
    pub object: ObjId,
    pub source: MorId,
}

#[derive(Clone, Debug)]
pub struct SliceOutput {
    pub slice_cat: FinCategory,
    pub slice_ts: TangentStructure,
    pub base: ObjId,
    /// The display map each slice object stands for.
    pub object_source: Vec<MorId>,
    pub morphism_source: Vec<MorId>,
    /// `(V_q, q^M, iota_q)` for each slice object.
    pub vertical: Vec<PullbackCertificate>,
    pub components: Vec<ComponentSource>,
    pub axioms: AxiomReport,
    pub negatives: Option<AxiomReport>,
    /// The slice object of `id_M`, when it is terminal.
    pub terminal: Option<ObjId>,
    /// First failure of "binary products exist and are T-pullbacks".
    pub product_failure: Option<String>,
}

impl SliceOutput {
    pub fn object_of(&self, q: MorId) -> Option<ObjId> {
        self.object_source
            .iter()
            .position(|&x| x == q)
            .map(|i| ObjId(i as u32))
    }

    /// The slice morphism with underlying `h` from `a` to `b`.
    pub fn cell(&self, h: MorId, a: ObjId, b: ObjId) -> Option<MorId> {
        self.slice_cat
            .hom(a, b)
            .iter()
            .copied()
            .find(|&c| self.morphism_source[c.index()] == h)
    }

    pub fn is_cartesian(&self) -> bool {
        self.terminal.is_some() && self.product_failure.is_none()
    }

    pub fn verified(&self) -> bool {
        self.axioms.passes()
            && self.negatives.as_ref().is_none_or(AxiomReport::passes)
            && self.is_cartesian()
    }
}

fn missing(diagram: &'static str, cat: &FinCategory, q: MorId) -> ConstructionError {
    ConstructionError::MissingMediator {
        diagram,
        object: cat.mor_name(q).to_string(),
    }
}

pub fn slice_tangent_category(
    cat: &FinCategory,
    ts: &TangentStructure,
    base: ObjId,
) -> Result<SliceOutput, ConstructionError> {
    require_axioms(&check_tangent_axioms(cat, ts))?;
    if base.index() >= cat.object_count() {
        return Err(ConstructionError::Precondition(format!(
            "no object {}",
            base.0
        )));
    }
    let cls = Classifier::new(cat, ts);
    let object_source: Vec<MorId> = cat
        .into_object(base)
        .filter(|&q| cls.is_t_display(q))
        .collect();
    let obj_of: BTreeMap<MorId, ObjId> = object_source
        .iter()
        .enumerate()
        .map(|(i, &q)| (q, ObjId(i as u32)))
        .collect();

    let mut asm = Assembler::new();
    for &q in &object_source {
        asm.object(&format!("[{}]", cat.mor_name(q)));
    }
    let mut morphism_source = Vec::new();
    let mut under = Vec::new();
    let mut cells = BTreeMap::new();
    for (ai, &q1) in object_source.iter().enumerate() {
        for (bi, &q2) in object_source.iter().enumerate() {
            for &h in cat.hom(cat.dom(q1), cat.dom(q2)) {
                if cat.then(h, q2) != Some(q1) {
                    continue;
                }
                let (a, b) = (ObjId(ai as u32), ObjId(bi as u32));
                let c = asm.morphism(cat.mor_name(h), a, b);
                morphism_source.push(h);
                under.push((a, b));
                cells.insert((h, a, b), c);
                if a == b && h == cat.id(cat.dom(q1)) {
                    asm.identity(a, c);
                }
            }
        }
    }
    let slice_cat = asm.finish(|x, y| {
        let h = cat.then(morphism_source[x.index()], morphism_source[y.index()])?;
        cells
            .get(&(h, under[x.index()].0, under[y.index()].1))
            .copied()
    })?;
    let cell = |h: MorId, a: ObjId, b: ObjId| {
        cells.get(&(h, a, b)).copied().ok_or_else(|| {
            ConstructionError::NotClosed(format!(
                "{} is not a slice morphism",
                cat.mor_name(h)
            ))
        })
    };

    let zm = ts.z(base);
    let vertical = object_source
        .iter()
        .map(|&q| {
            compute_pullback(
                cat,
                Cospan {
                    left: zm,
                    right: ts.tm(q),
                },
            )
            .ok_or_else(|| missing("vertical bundle", cat, q))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let t_obj = vertical
        .iter()
        .map(|v| {
            obj_of.get(&v.proj_left()).copied().ok_or_else(|| {
                ConstructionError::NotClosed(format!(
                    "{} is not a tangent display map",
                    cat.mor_name(v.proj_left())
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let src = |o: ObjId| object_source[o.index()];
    let iota = |o: ObjId| vertical[o.index()].proj_right();
    let q_m = |o: ObjId| vertical[o.index()].proj_left();

    let mut components = Vec::new();
    let mut record = |component, object, source| {
        components.push(ComponentSource {
            component,
            object,
            source,
        })
    };

    let t_mor = slice_cat
        .morphisms()
        .map(|c| {
            let (a, b) = under[c.index()];
            let h = morphism_source[c.index()];
            let right = cat.then(iota(a), ts.tm(h)).expect("composable");
            let m = vertical[b.index()]
                .mediator(q_m(a), right)
                .ok_or_else(|| missing("T^M on morphisms", cat, h))?;
            cell(m, t_obj[a.index()], t_obj[b.index()])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let functor = Functor::new(t_obj.clone(), t_mor);
    let objs: Vec<ObjId> = slice_cat.objects().collect();

    let mut projection = Vec::new();
    let mut zero = Vec::new();
    for &a in &objs {
        let q = src(a);
        let e = cat.dom(q);
        let p = cat.then(iota(a), ts.p(e)).expect("composable");
        record("p", a, p);
        projection.push(cell(p, t_obj[a.index()], a)?);
        let z = vertical[a.index()]
            .mediator(q, ts.z(e))
            .ok_or_else(|| missing("zero", cat, q))?;
        record("z", a, z);
        zero.push(cell(z, a, t_obj[a.index()])?);
    }

    // T^M_2 witnesses are pullbacks in the slice itself
    let mut explicit = BTreeMap::new();
    let mut sum = Vec::new();
    for &a in &objs {
        let pa = projection[a.index()];
        let w = compute_pullback(&slice_cat, Cospan { left: pa, right: pa })
            .ok_or_else(|| missing("T^M_2", cat, src(a)))?;
        let apex = w.apex(&slice_cat);
        let (u1, u2) = (
            morphism_source[w.proj_left().index()],
            morphism_source[w.proj_right().index()],
        );
        let e = cat.dom(src(a));
        let x = cat.then(u1, iota(a)).expect("composable");
        let y = cat.then(u2, iota(a)).expect("composable");
        let pair = ts.pair(e, x, y).ok_or_else(|| missing("sum pairing", cat, src(a)))?;
        let right = cat.then(pair, ts.s(e)).expect("composable");
        let s = vertical[a.index()]
            .mediator(src(apex), right)
            .ok_or_else(|| missing("sum", cat, src(a)))?;
        record("s", a, s);
        sum.push(cell(s, apex, t_obj[a.index()])?);
        explicit.insert(a, w.square);
    }

    // X -> V_{q^M} from a base map x0: X -> M and y: X -> T^2 E
    let into_tt = |a: ObjId, x0: MorId, y: MorId, diagram| -> Result<MorId, ConstructionError> {
        let q = src(a);
        let timg = is_pullback_square(cat, &vertical[a.index()].square.map(ts.functor()))
            .ok()
            .and_then(|v| v.certificate())
            .ok_or_else(|| missing(diagram, cat, q))?;
        let left = cat.then(x0, zm).expect("composable");
        let b = timg.mediator(left, y).ok_or_else(|| missing(diagram, cat, q))?;
        vertical[t_obj[a.index()].index()]
            .mediator(x0, b)
            .ok_or_else(|| missing(diagram, cat, q))
    };
    let mut lift = Vec::new();
    let mut flip = Vec::new();
    for &a in &objs {
        let e = cat.dom(src(a));
        let ta = t_obj[a.index()];
        let tta = t_obj[ta.index()];
        let y = cat.then(iota(a), ts.l(e)).expect("composable");
        let l = into_tt(a, q_m(a), y, "vertical lift")?;
        record("l", a, l);
        lift.push(cell(l, ta, tta)?);
        let y = cat
            .path(&[iota(ta), ts.tm(iota(a)), ts.c(e)])
            .expect("composable");
        let c = into_tt(a, q_m(ta), y, "canonical flip")?;
        record("c", a, c);
        flip.push(cell(c, tta, tta)?);
    }
    let negation = match ts.data.negation {
        None => None,
        Some(_) => {
            let mut v = Vec::new();
            for &a in &objs {
                let e = cat.dom(src(a));
                let right = cat.then(iota(a), ts.n(e).expect("present")).expect("composable");
                let n = vertical[a.index()]
                    .mediator(q_m(a), right)
                    .ok_or_else(|| missing("negation", cat, src(a)))?;
                record("n", a, n);
                v.push(cell(n, t_obj[a.index()], t_obj[a.index()])?);
            }
            Some(NatTransformation::new(v))
        }
    };

    let slice_ts = TangentStructure::new(
        &slice_cat,
        TangentData {
            functor,
            projection: NatTransformation::new(projection),
            zero: NatTransformation::new(zero),
            sum: NatTransformation::new(sum),
            lift: NatTransformation::new(lift),
            flip: NatTransformation::new(flip),
            negation,
        },
        &explicit,
        ts.witness_bound(),
    )?;

    let axioms = check_tangent_axioms(&slice_cat, &slice_ts);
    let negatives = slice_ts
        .data
        .negation
        .as_ref()
        .map(|_| check_negatives(&slice_cat, &slice_ts).expect("negation present"));
    let terminal = obj_of
        .get(&cat.id(base))
        .copied()
        .filter(|&t| slice_cat.objects().all(|x| slice_cat.hom(x, t).len() == 1));
    let product_failure = match terminal {
        None => Some("id of the base is not terminal".into()),
        Some(t) => products_preserved(&slice_cat, &slice_ts, t),
    };
    Ok(SliceOutput {
        slice_cat,
        slice_ts,
        base,
        object_source,
        morphism_source,
        vertical,
        components,
        axioms,
        negatives,
        terminal,
        product_failure,
    })
}

/// Binary products exist, `T` keeps the terminal terminal, and every product
/// square over the terminal is a T-pullback.
fn products_preserved(cat: &FinCategory, ts: &TangentStructure, t: ObjId) -> Option<String> {
    for k in 0..ts.powers().bound() {
        let tk = ts.powers().power(k).obj(t);
        if !cat.objects().all(|x| cat.hom(x, tk).len() == 1) {
            return Some(format!("T^{k} of the terminal is not terminal"));
        }
    }
    for a in cat.objects() {
        for b in cat.objects() {
            let cospan = Cospan {
                left: bang(cat, a, t),
                right: bang(cat, b, t),
            };
            let Some(cert) = compute_pullback(cat, cospan) else {
                return Some(format!(
                    "no product of {} and {}",
                    cat.obj_name(a),
                    cat.obj_name(b)
                ));
            };
            match is_t_pullback(cat, ts.powers(), &cert.square) {
                Ok(v) if v.holds() => {}
                _ => {
                    return Some(format!(
                        "product of {} and {} is not preserved",
                        cat.obj_name(a),
                        cat.obj_name(b)
                    ))
                }
            }
        }
    }
    None
}

/// Instance checks for the unit `(U, eta)` and counit `(C, iota)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermSliceReport {
    pub terminal: ObjId,
    /// `U` is bijective on objects and on every hom-set.
    pub unit_is_isomorphism: bool,
    /// `eta_M` and `iota_{!M}` are mutually inverse.
    pub eta_invertible: bool,
    pub first_triangle: bool,
    pub second_triangle: bool,
    /// Bases whose slice was checked for the second triangle.
    pub bases_checked: usize,
    pub failures: Vec<String>,
}

impl TermSliceReport {
    pub fn holds(&self) -> bool {
        self.unit_is_isomorphism && self.eta_invertible && self.first_triangle && self.second_triangle
    }
}

/// `U` into the slice over a terminal object, with `eta` and both triangle
/// composites, checked on every object and morphism.
fn unit_checks(
    cat: &FinCategory,
    ts: &TangentStructure,
    sl: &SliceOutput,
    terminal: ObjId,
    failures: &mut Vec<String>,
) -> (bool, bool, bool) {
    let mut iso = true;
    let mut eta_ok = true;
    let mut triangle = true;
    let mut u_obj = BTreeMap::new();
    for m in cat.objects() {
        let b = bang(cat, m, terminal);
        match sl.object_of(b) {
            Some(o) => {
                u_obj.insert(m, o);
            }
            None => {
                iso = false;
                failures.push(format!("{} is not a slice object", cat.mor_name(b)));
            }
        }
    }
    if u_obj.len() != sl.slice_cat.object_count() {
        iso = false;
    }
    for f in cat.morphisms() {
        let (Some(&a), Some(&b)) = (u_obj.get(&cat.dom(f)), u_obj.get(&cat.cod(f))) else {
            continue;
        };
        match sl.cell(f, a, b) {
            // C(U(f)) is the underlying morphism again
            Some(c) if sl.morphism_source[c.index()] == f => {}
            _ => {
                triangle = false;
                failures.push(format!("U({}) is missing", cat.mor_name(f)));
            }
        }
    }
    let homs: usize = u_obj
        .values()
        .flat_map(|&a| u_obj.values().map(move |&b| (a, b)))
        .map(|(a, b)| sl.slice_cat.hom(a, b).len())
        .sum();
    if homs != sl.slice_cat.morphism_count() || sl.slice_cat.morphism_count() != cat.morphism_count()
    {
        iso = false;
        failures.push("U is not bijective on morphisms".into());
    }
    for (&m, &o) in &u_obj {
        if cat.dom(sl.object_source[o.index()]) != m {
            triangle = false;
            failures.push(format!("C(U({})) differs", cat.obj_name(m)));
        }
        let tm = ts.t(m);
        let v = &sl.vertical[o.index()];
        let Some(eta) = v.mediator(bang(cat, tm, terminal), cat.id(tm)) else {
            eta_ok = false;
            failures.push(format!("no eta at {}", cat.obj_name(m)));
            continue;
        };
        let iota = v.proj_right();
        if cat.then(eta, iota) != Some(cat.id(tm)) {
            triangle = false;
            failures.push(format!("eta;iota is not the identity at {}", cat.obj_name(m)));
        }
        if cat.then(iota, eta) != Some(cat.id(v.apex(cat))) {
            eta_ok = false;
            failures.push(format!("iota;eta is not the identity at {}", cat.obj_name(m)));
        }
    }
    (iso, eta_ok, triangle)
}

pub fn term_slice_unit_counit(
    cat: &FinCategory,
    ts: &TangentStructure,
) -> Result<TermSliceReport, ConstructionError> {
    let terminal = compute_terminal(cat).ok_or(ConstructionError::NoTerminal)?;
    // binary products are the pullbacks over the terminal, preserved by T
    let cls = Classifier::new(cat, ts);
    if let Some(m) = cat
        .objects()
        .find(|&m| !cls.is_t_display(bang(cat, m, terminal)))
    {
        return Err(ConstructionError::NotCartesian(format!(
            "the map from {} to the terminal is not tangent display",
            cat.obj_name(m)
        )));
    }
    let sl = slice_tangent_category(cat, ts, terminal)?;
    let mut failures = Vec::new();
    let (unit_is_isomorphism, eta_invertible, first_triangle) =
        unit_checks(cat, ts, &sl, terminal, &mut failures);
    if !sl.is_cartesian() {
        failures.push(format!(
            "slice over the terminal is not cartesian: {}",
            sl.product_failure.clone().unwrap_or_default()
        ));
    }

    // For each base M, U on X/M lands in (X/M)/id_M and C takes it back.
    let mut second_triangle = true;
    let mut bases_checked = 0;
    for m in cat.objects() {
        let s = slice_tangent_category(cat, ts, m)?;
        let Some(top) = s.terminal else {
            second_triangle = false;
            failures.push(format!("id_{} is not terminal in its slice", cat.obj_name(m)));
            continue;
        };
        let s2 = slice_tangent_category(&s.slice_cat, &s.slice_ts, top)?;
        let mut inner = Vec::new();
        let (iso, eta, tri) = unit_checks(&s.slice_cat, &s.slice_ts, &s2, top, &mut inner);
        for a in s.slice_cat.objects() {
            let u = bang(&s.slice_cat, a, top);
            // the underlying map of U(a) is the display map a stands for
            if s.morphism_source[u.index()] != s.object_source[a.index()] {
                second_triangle = false;
                inner.push(format!("U([{}]) has the wrong underlying map", a.0));
            }
        }
        if !(iso && eta && tri) {
            second_triangle = false;
        }
        failures.extend(
            inner
                .into_iter()
                .map(|f| format!("over {}: {f}", cat.obj_name(m))),
        );
        bases_checked += 1;
    }

    Ok(TermSliceReport {
        terminal,
        unit_is_isomorphism,
        eta_invertible,
        first_triangle: first_triangle && sl.is_cartesian(),
        second_triangle,
        bases_checked,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::samples::*;
    use crate::fincat::validate_category;
    use crate::tangent::samples::z2_central;
    use crate::tangent::trivial_tangent;

    #[test]
    fn diamond_slice_over_top() {
        let c = diamond();
        let ts = trivial_tangent(&c).unwrap();
        let top = c.object_named("top").unwrap();
        let s = slice_tangent_category(&c, &ts, top).unwrap();
        assert_eq!(s.slice_cat.object_count(), 4);
        assert!(validate_category(&s.slice_cat).is_valid());
        assert!(s.verified(), "{:?}", s.axioms.failing().collect::<Vec<_>>());
        let t = s.terminal.unwrap();
        assert_eq!(s.object_source[t.index()], c.id(top));
    }

    #[test]
    fn identity_object_is_fixed_by_t() {
        let c = diamond();
        let ts = trivial_tangent(&c).unwrap();
        for m in c.objects() {
            let s = slice_tangent_category(&c, &ts, m).unwrap();
            let o = s.object_of(c.id(m)).unwrap();
            assert_eq!(s.object_source[s.slice_ts.t(o).index()], c.id(m));
        }
    }

    #[test]
    fn zero_then_projection_is_identity() {
        let (c, ts) = z2_central();
        let s = slice_tangent_category(&c, &ts, ObjId(0)).unwrap();
        for a in s.slice_cat.objects() {
            let zp = s.slice_cat.then(s.slice_ts.z(a), s.slice_ts.p(a));
            assert_eq!(zp, Some(s.slice_cat.id(a)));
        }
        assert!(s.verified());
        assert!(s.components.iter().any(|k| k.component == "c"));
    }

    #[test]
    fn term_slice_on_diamond_and_point() {
        let c = diamond();
        let ts = trivial_tangent(&c).unwrap();
        let r = term_slice_unit_counit(&c, &ts).unwrap();
        assert!(r.holds(), "{:?}", r.failures);
        assert_eq!(r.bases_checked, 4);
        let one = discrete(&["*"]);
        let ts = trivial_tangent(&one).unwrap();
        assert!(term_slice_unit_counit(&one, &ts).unwrap().holds());
    }

    #[test]
    fn no_terminal_is_refused() {
        let c = vee();
        let c2 = discrete(&["a", "b"]);
        let ts = trivial_tangent(&c2).unwrap();
        assert_eq!(
            term_slice_unit_counit(&c2, &ts).unwrap_err(),
            ConstructionError::NoTerminal
        );
        // vee has a terminal but no product of a and b
        let ts = trivial_tangent(&c).unwrap();
        assert!(matches!(
            term_slice_unit_counit(&c, &ts),
            Err(ConstructionError::NotCartesian(_))
        ));
    }
}
