#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use tangent_display_core::constructions::karoubi_envelope;
use tangent_display_core::fincat::samples::{self, monoid, poset};
use tangent_display_core::fincat::{validate_functor, FinCategory, Functor, MorId, ObjId};
use tangent_display_core::limits::Square;
use tangent_display_core::tangent::{samples::z2_central, trivial_tangent, TangentStructure};

pub type Example = (String, FinCategory, TangentStructure);

/// Poset on `0..n` from the strict relation bits, transitively closed.
pub fn closed_poset(n: usize, bits: &[bool]) -> FinCategory {
    let mut rel = BTreeSet::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits[k % bits.len().max(1)] {
                rel.insert((i, j));
            }
            k += 1;
        }
    }
    loop {
        let extra: Vec<_> = rel
            .iter()
            .flat_map(|&(a, b)| rel.iter().filter(move |&&(c, _)| c == b).map(move |&(_, d)| (a, d)))
            .filter(|p| !rel.contains(p))
            .collect();
        if extra.is_empty() {
            break;
        }
        rel.extend(extra);
    }
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let objs: Vec<&str> = names.iter().map(String::as_str).collect();
    let pairs: Vec<(&str, &str)> = rel.iter().map(|&(a, b)| (objs[a], objs[b])).collect();
    poset(&objs, &pairs)
}

/// Submonoid of the maps `{0,1,2} -> {0,1,2}` generated by `gens`.
pub fn transformation_monoid(gens: &[[u8; 3]]) -> FinCategory {
    let id = [0u8, 1, 2];
    let mut elems = vec![id];
    let mut frontier: Vec<[u8; 3]> = gens.to_vec();
    while let Some(x) = frontier.pop() {
        if elems.contains(&x) {
            continue;
        }
        elems.push(x);
        for y in elems.clone() {
            for z in [then(x, y), then(y, x)] {
                if !elems.contains(&z) {
                    frontier.push(z);
                }
            }
        }
    }
    let names: Vec<String> = elems
        .iter()
        .map(|e| e.iter().map(|d| char::from(b'0' + d)).collect())
        .collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    monoid(&refs, |i, j| {
        let z = then(elems[i], elems[j]);
        elems.iter().position(|&e| e == z).unwrap()
    })
}

fn then(x: [u8; 3], y: [u8; 3]) -> [u8; 3] {
    [y[x[0] as usize], y[x[1] as usize], y[x[2] as usize]]
}

pub fn trivial(name: &str, cat: FinCategory) -> Example {
    let ts = trivial_tangent(&cat).unwrap();
    (name.to_string(), cat, ts)
}

/// Fixed examples: posets, monoids, a discrete category, the empty
/// category, a Karoubi envelope and the central tangent structure on Z/2.
pub fn corpus() -> Vec<Example> {
    let mut out = vec![
        trivial("diamond", samples::diamond()),
        trivial("vee", samples::vee()),
        trivial("chain3", closed_poset(3, &[true])),
        trivial("z2", samples::z2()),
        trivial("idempotent", samples::idempotent_monoid()),
        trivial("discrete", samples::discrete(&["x", "y"])),
        trivial("empty", FinCategory::empty()),
        trivial("maps2", transformation_monoid(&[[1, 0, 2], [0, 0, 2]])),
        trivial("const", transformation_monoid(&[[0, 0, 0], [1, 1, 1]])),
    ];
    let (c, ts) = z2_central();
    out.push(("z2-central".into(), c, ts));
    let (_, c, ts) = trivial("", samples::idempotent_monoid());
    let k = karoubi_envelope(&c, &ts).unwrap();
    out.push(("split-idempotent".into(), k.split_cat, k.split_ts));
    let (_, c, ts) = trivial("", transformation_monoid(&[[0, 0, 2]]));
    let k = karoubi_envelope(&c, &ts).unwrap();
    out.push(("split-maps".into(), k.split_cat, k.split_ts));
    out
}

/// Small categories with trivial tangent structure, drawn from posets,
/// transformation monoids and their Karoubi envelopes.
pub fn arb_category() -> impl Strategy<Value = FinCategory> {
    let posets = (1usize..=5, prop::collection::vec(any::<bool>(), 10))
        .prop_map(|(n, bits)| closed_poset(n, &bits));
    let gen = prop::array::uniform3(0u8..3);
    let monoids = prop::collection::vec(gen, 1..=2)
        .prop_map(|g| transformation_monoid(&g))
        .prop_filter("small monoid", |c| c.morphism_count() <= 8);
    let split = monoids.clone().prop_map(|c| {
        let ts = trivial_tangent(&c).unwrap();
        karoubi_envelope(&c, &ts).unwrap().split_cat
    });
    prop_oneof![posets, monoids, split.prop_filter("small", |c| c.morphism_count() <= 16)]
}

/// Every composable `a ; b` with both sides a commuting square.
pub fn rectangles(cat: &FinCategory) -> Vec<(Square, Square, Square)> {
    let squares = tangent_display_core::display::commuting_squares(cat);
    let mut out = Vec::new();
    // left square's right side is the right square's left side
    for l in &squares {
        for r in &squares {
            if r.leftv != l.rightv {
                continue;
            }
            let outer = Square {
                top: cat.then(l.top, r.top).unwrap(),
                leftv: l.leftv,
                rightv: r.rightv,
                bottom: cat.then(l.bottom, r.bottom).unwrap(),
            };
            out.push((*l, *r, outer));
        }
    }
    out
}

/// Up to `cap` endofunctors, found by backtracking over object maps and
/// then morphism images.
pub fn endofunctors(cat: &FinCategory, cap: usize) -> Vec<Functor> {
    let n = cat.object_count();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Functor::identity(cat));
        return out;
    }
    let mut obj = vec![ObjId(0); n];
    loop {
        let mut mor = vec![MorId(0); cat.morphism_count()];
        assign(cat, &obj, &mut mor, 0, cap, &mut out);
        if out.len() >= cap {
            break;
        }
        // next object map in lexicographic order
        let mut i = 0;
        while i < n && obj[i].0 as usize == n - 1 {
            obj[i] = ObjId(0);
            i += 1;
        }
        if i == n {
            break;
        }
        obj[i] = ObjId(obj[i].0 + 1);
    }
    out
}

fn assign(
    cat: &FinCategory,
    obj: &[ObjId],
    mor: &mut Vec<MorId>,
    i: usize,
    cap: usize,
    out: &mut Vec<Functor>,
) {
    if out.len() >= cap {
        return;
    }
    if i == mor.len() {
        let f = Functor::new(obj.to_vec(), mor.clone());
        if validate_functor(cat, cat, &f).is_valid() {
            out.push(f);
        }
        return;
    }
    let m = MorId(i as u32);
    let (a, b) = (obj[cat.dom(m).index()], obj[cat.cod(m).index()]);
    let candidates: Vec<MorId> = if cat.is_identity(m) {
        vec![cat.id(a)]
    } else {
        cat.hom(a, b).to_vec()
    };
    for c in candidates {
        mor[i] = c;
        let ok = (0..=i).all(|j| {
            let x = MorId(j as u32);
            let fwd = cat.then(x, m).filter(|h| h.index() <= i);
            let bwd = cat.then(m, x).filter(|h| h.index() <= i);
            fwd.is_none_or(|h| cat.then(mor[j], c) == Some(mor[h.index()]))
                && bwd.is_none_or(|h| cat.then(c, mor[j]) == Some(mor[h.index()]))
        });
        if ok {
            assign(cat, obj, mor, i + 1, cap, out);
        }
    }
}

/// Section-retraction pairs `(s: small -> big, r: big -> small)`.
pub fn retracts(cat: &FinCategory, small: ObjId, big: ObjId) -> Vec<(MorId, MorId)> {
    let mut out = Vec::new();
    for &s in cat.hom(small, big) {
        for &r in cat.hom(big, small) {
            if cat.then(s, r) == Some(cat.id(small)) {
                out.push((s, r));
            }
        }
    }
    out
}

/// Corner pairs `[P, E, N, M]` exhibiting `small` as a retract of `big`,
/// compatible with both faces of the cube.
pub fn retract_configuration(
    cat: &FinCategory,
    big: &Square,
    small: &Square,
) -> Option<[(MorId, MorId); 4]> {
    let c = |x: MorId, y: MorId| cat.then(x, y);
    // (s, r) on an edge x1 -> y1 retracting to x2 -> y2
    let edge = |e1: MorId, e2: MorId, dom: (MorId, MorId), cod: (MorId, MorId)| {
        c(e1, cod.1) == c(dom.1, e2) && c(dom.0, e1) == c(e2, cod.0)
    };
    let corner = |s: MorId, b: MorId| retracts(cat, cat.dom(s), cat.dom(b));
    let m_pairs = retracts(cat, cat.cod(small.rightv), cat.cod(big.rightv));
    for &pm in &m_pairs {
        for pe in corner(small.rightv, big.rightv) {
            if !edge(big.rightv, small.rightv, pe, pm) {
                continue;
            }
            for pn in corner(small.bottom, big.bottom) {
                if !edge(big.bottom, small.bottom, pn, pm) {
                    continue;
                }
                for pp in corner(small.top, big.top) {
                    if edge(big.top, small.top, pp, pe) && edge(big.leftv, small.leftv, pp, pn) {
                        return Some([pp, pe, pn, pm]);
                    }
                }
            }
        }
    }
    None
}
