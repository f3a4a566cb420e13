//! The Karoubi envelope `Split(X)` with its lifted tangent structure.
//!
//! Objects are pairs `(M, e)` with `e` idempotent. A morphism
//! `(M, e) -> (M', e')` is a source morphism `f` with `e;f;e' = f`, and the
//! identity of `(M, e)` is `e`. Each transformation `alpha: F => G` lifts to
//! `F(e);alpha_M`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use super::{require_axioms, Assembler, ConstructionError};
use crate::display::Classifier;
use crate::fincat::{
    enumerate_idempotents, split_idempotent, FinCategory, Functor, MorId, NatTransformation, ObjId,
};
use crate::limits::Square;
use crate::tangent::{check_tangent_axioms, AxiomReport, TangentData, TangentStructure};

#[derive(Clone, Debug)]
pub struct SplitOutput {
    pub split_cat: FinCategory,
    pub split_ts: TangentStructure,
    pub embedding: Functor,
    /// Each new object's source object and idempotent.
    pub provenance: Vec<(ObjId, MorId)>,
    /// Each new morphism's underlying source morphism.
    pub morphism_source: Vec<MorId>,
    pub axioms: AxiomReport,
    pub all_idempotents_split: bool,
    pub fully_faithful: bool,
    /// Source t-display maps whose image is not t-display.
    pub lost_display: Vec<MorId>,
}

impl SplitOutput {
    pub fn verified(&self) -> bool {
        self.axioms.passes()
            && self.all_idempotents_split
            && self.fully_faithful
            && self.lost_display.is_empty()
    }
}

struct Cells {
    objects: BTreeMap<(ObjId, MorId), ObjId>,
    cells: BTreeMap<(MorId, ObjId, ObjId), MorId>,
}

impl Cells {
    fn obj(&self, m: ObjId, e: MorId) -> Result<ObjId, ConstructionError> {
        self.objects.get(&(m, e)).copied().ok_or_else(|| {
            ConstructionError::NotClosed(format!("no object for idempotent cell {}", e.0))
        })
    }

    fn cell(&self, f: MorId, a: ObjId, b: ObjId) -> Result<MorId, ConstructionError> {
        self.cells
            .get(&(f, a, b))
            .copied()
            .ok_or_else(|| ConstructionError::NotClosed(format!("morphism {} is not a cell", f.0)))
    }
}

pub fn karoubi_envelope(
    cat: &FinCategory,
    ts: &TangentStructure,
) -> Result<SplitOutput, ConstructionError> {
    require_axioms(&check_tangent_axioms(cat, ts))?;
    let mut asm = Assembler::new();
    let mut cells = Cells {
        objects: BTreeMap::new(),
        cells: BTreeMap::new(),
    };
    let mut provenance = Vec::new();
    let idempotents = enumerate_idempotents(cat);
    for m in cat.objects() {
        let id = cat.id(m);
        let mut es: Vec<MorId> = idempotents
            .iter()
            .copied()
            .filter(|&e| cat.dom(e) == m && e != id)
            .collect();
        es.insert(0, id);
        for e in es {
            let name = if e == id {
                cat.obj_name(m).into()
            } else {
                format!("({},{})", cat.obj_name(m), cat.mor_name(e))
            };
            let o = asm.object(&name);
            cells.objects.insert((m, e), o);
            provenance.push((m, e));
        }
    }
    let mut morphism_source = Vec::new();
    let mut under = Vec::new();
    for (ai, &(m, e)) in provenance.iter().enumerate() {
        for (bi, &(n, e2)) in provenance.iter().enumerate() {
            for &f in cat.hom(m, n) {
                if cat.path(&[e, f, e2]) != Some(f) {
                    continue;
                }
                let (a, b) = (ObjId(ai as u32), ObjId(bi as u32));
                let name = if e == cat.id(m) && e2 == cat.id(n) {
                    cat.mor_name(f).into()
                } else {
                    format!("{}[{};{}]", cat.mor_name(f), cat.mor_name(e), cat.mor_name(e2))
                };
                let c = asm.morphism(&name, a, b);
                cells.cells.insert((f, a, b), c);
                morphism_source.push(f);
                under.push((a, b));
                if f == e && m == n && e == e2 {
                    asm.identity(a, c);
                }
            }
        }
    }
    let split_cat = asm.finish(|x, y| {
        let h = cat.then(morphism_source[x.index()], morphism_source[y.index()])?;
        cells.cells.get(&(h, under[x.index()].0, under[y.index()].1)).copied()
    })?;

    let t = ts.functor();
    let obj_map = provenance
        .iter()
        .map(|&(m, e)| cells.obj(t.obj(m), t.mor(e)))
        .collect::<Result<Vec<_>, _>>()?;
    let mor_map = split_cat
        .morphisms()
        .map(|c| {
            let (a, b) = under[c.index()];
            cells.cell(
                t.mor(morphism_source[c.index()]),
                obj_map[a.index()],
                obj_map[b.index()],
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let functor = Functor::new(obj_map, mor_map);

    // alpha lifted at (M, e) is F(e);alpha_M : F(M, e) -> G(M, e)
    let t2 = ts.t2_functor(cat).ok_or_else(|| ConstructionError::MissingMediator {
        diagram: "T_2 on morphisms",
        object: "source".into(),
    })?;
    let tt = t.then(t);
    let ident = Functor::identity(cat);
    let lift = |fe: &Functor, comp: &dyn Fn(ObjId) -> MorId, ge: &Functor| {
        provenance
            .iter()
            .map(|&(m, e)| {
                let d = cells.obj(fe.obj(m), fe.mor(e))?;
                let c = cells.obj(ge.obj(m), ge.mor(e))?;
                let f = cat.then(fe.mor(e), comp(m)).expect("composable");
                cells.cell(f, d, c)
            })
            .collect::<Result<Vec<_>, ConstructionError>>()
            .map(NatTransformation::new)
    };
    let projection = lift(t, &|m| ts.p(m), &ident)?;
    let zero = lift(&ident, &|m| ts.z(m), t)?;
    let sum = lift(&t2, &|m| ts.s(m), t)?;
    let vlift = lift(t, &|m| ts.l(m), &tt)?;
    let flip = lift(&tt, &|m| ts.c(m), &tt)?;
    let negation = match ts.data.negation {
        Some(_) => Some(lift(t, &|m| ts.n(m).expect("present"), t)?),
        None => None,
    };

    let mut explicit = BTreeMap::new();
    for (i, &(m, e)) in provenance.iter().enumerate() {
        let apex = cells.obj(t2.obj(m), t2.mor(e))?;
        let tm = cells.obj(t.obj(m), t.mor(e))?;
        let leg = |pi| cells.cell(cat.then(t2.mor(e), pi).expect("composable"), apex, tm);
        let p = projection.at(ObjId(i as u32));
        explicit.insert(
            ObjId(i as u32),
            Square {
                top: leg(ts.pi2(m))?,
                leftv: leg(ts.pi1(m))?,
                rightv: p,
                bottom: p,
            },
        );
    }
    let split_ts = TangentStructure::new(
        &split_cat,
        TangentData {
            functor,
            projection,
            zero,
            sum,
            lift: vlift,
            flip,
            negation,
        },
        &explicit,
        ts.witness_bound(),
    )?;

    let embedding = Functor::new(
        cat.objects()
            .map(|m| cells.obj(m, cat.id(m)))
            .collect::<Result<_, _>>()?,
        cat.morphisms()
            .map(|f| {
                let a = cells.obj(cat.dom(f), cat.id(cat.dom(f)))?;
                let b = cells.obj(cat.cod(f), cat.id(cat.cod(f)))?;
                cells.cell(f, a, b)
            })
            .collect::<Result<_, _>>()?,
    );

    let axioms = check_tangent_axioms(&split_cat, &split_ts);
    let all_idempotents_split = enumerate_idempotents(&split_cat)
        .into_iter()
        .all(|e| split_idempotent(&split_cat, e).is_some());
    let fully_faithful = cat.objects().all(|a| {
        cat.objects().all(|b| {
            let image: BTreeSet<MorId> =
                cat.hom(a, b).iter().map(|&f| embedding.mor(f)).collect();
            let target = split_cat.hom(embedding.obj(a), embedding.obj(b));
            image.len() == cat.hom(a, b).len() && image.iter().copied().eq(target.iter().copied())
        })
    });
    let source = Classifier::new(cat, ts);
    let target = Classifier::new(&split_cat, &split_ts);
    let lost_display = cat
        .morphisms()
        .filter(|&q| source.is_t_display(q) && !target.is_t_display(embedding.mor(q)))
        .collect();

    Ok(SplitOutput {
        split_cat,
        split_ts,
        embedding,
        provenance,
        morphism_source,
        axioms,
        all_idempotents_split,
        fully_faithful,
        lost_display,
    })
}

/// Hom-set sizes under the standard condition `e;f;e' = f` and under the
/// commuting condition `f;e' = e;f`, the latter with identity `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KaroubiComparison {
    pub standard_cells: usize,
    pub commuting_cells: usize,
    /// Whether the commuting variant with identity `e` satisfies the
    /// identity laws, so that both variants are categories.
    pub commuting_is_category: bool,
    pub agree: bool,
}

pub fn karoubi_condition_comparison(cat: &FinCategory) -> KaroubiComparison {
    let idem = enumerate_idempotents(cat);
    let mut standard = BTreeSet::new();
    let mut commuting = BTreeSet::new();
    for &e in &idem {
        for &e2 in &idem {
            for &f in cat.hom(cat.cod(e), cat.dom(e2)) {
                if cat.path(&[e, f, e2]) == Some(f) {
                    standard.insert((e, f, e2));
                }
                if cat.then(f, e2) == cat.then(e, f) {
                    commuting.insert((e, f, e2));
                }
            }
        }
    }
    let commuting_is_category = commuting
        .iter()
        .all(|&(e, f, e2)| cat.then(e, f) == Some(f) && cat.then(f, e2) == Some(f));
    KaroubiComparison {
        standard_cells: standard.len(),
        commuting_cells: commuting.len(),
        commuting_is_category,
        agree: standard == commuting,
    }
}
