//! Open subobjects: tangent monic display étale maps, their poset of
//! isomorphism classes with meets by pullback, and the induced restriction
//! category of partial maps.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::par::{check_system_of_monics, par_category, ParOutput};
use super::ConstructionError;
use crate::display::{check_display_system_with, Classifier, SystemVerdict};
use crate::fincat::{is_iso, is_mono, FinCategory, MorId, ObjId};
use crate::limits::{compute_pullback, Cospan, PullbackCertificate};
use crate::tangent::TangentStructure;

/// Non-iso candidates beyond which the brute-force maximality scan is skipped.
pub const BRUTE_FORCE_LIMIT: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenElement {
    /// Least-named representative of the isomorphism class.
    pub mor: MorId,
    pub codomain: ObjId,
}

#[derive(Clone, Debug)]
pub struct OpenMeet {
    pub meet: usize,
    pub certificate: PullbackCertificate,
}

#[derive(Clone, Debug)]
pub struct OpenPoset {
    /// Every morphism that is tangent monic, tangent display and étale.
    pub monics: BTreeSet<MorId>,
    pub elements: Vec<OpenElement>,
    /// `(i, j)` when element `i` factors through element `j`.
    pub order: BTreeSet<(usize, usize)>,
    pub meets: BTreeMap<(usize, usize), OpenMeet>,
    pub system: SystemVerdict,
    /// The clauses of a tangent display system of monics.
    pub system_of_monics: Result<(), alloc::string::String>,
    /// Union of all tangent display systems of monics, found by scanning
    /// subsets of monomorphisms; `None` past [`BRUTE_FORCE_LIMIT`].
    pub brute_force_maximal: Option<BTreeSet<MorId>>,
    pub par: Result<ParOutput, ConstructionError>,
}

impl OpenPoset {
    pub fn element_of(&self, cat: &FinCategory, m: MorId) -> Option<usize> {
        self.elements.iter().position(|e| {
            e.codomain == cat.cod(m) && factors(cat, m, e.mor) && factors(cat, e.mor, m)
        })
    }

    pub fn is_maximal(&self) -> Option<bool> {
        self.brute_force_maximal.as_ref().map(|b| *b == self.monics)
    }
}

/// Does `m` factor through `n` (both into the same object)?
fn factors(cat: &FinCategory, m: MorId, n: MorId) -> bool {
    cat.hom(cat.dom(m), cat.dom(n))
        .iter()
        .any(|&u| cat.then(u, n) == Some(m))
}

/// Union of every subset of monomorphisms that, together with the
/// isomorphisms, is a tangent display system of monics.
pub fn brute_force_maximal_monics(cls: &Classifier<'_>) -> Option<BTreeSet<MorId>> {
    let cat = cls.cat();
    let isos: BTreeSet<MorId> = cat.morphisms().filter(|&f| is_iso(cat, f)).collect();
    let pool: Vec<MorId> = cat
        .morphisms()
        .filter(|&f| !isos.contains(&f) && is_mono(cat, f))
        .collect();
    if pool.len() > BRUTE_FORCE_LIMIT {
        return None;
    }
    let mut union = BTreeSet::new();
    for mask in 0u32..(1 << pool.len()) {
        let mut s = isos.clone();
        s.extend(
            pool.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &f)| f),
        );
        if check_system_of_monics(cls, &s).is_ok() {
            union.extend(s);
        }
    }
    Some(union)
}

pub fn open_subobjects(cat: &FinCategory, ts: &TangentStructure) -> OpenPoset {
    let cls = Classifier::new(cat, ts);
    let monics: BTreeSet<MorId> = cat
        .morphisms()
        .filter(|&m| {
            cls.is_t_monic(m).is_ok() && cls.is_t_display(m) && cls.etale(m).holds()
        })
        .collect();
    let mut by_name: Vec<MorId> = monics.iter().copied().collect();
    by_name.sort_by_key(|&m| (cat.cod(m), cat.obj_name(cat.dom(m)), cat.mor_name(m)));
    let mut elements: Vec<OpenElement> = Vec::new();
    for m in by_name {
        let dup = elements.iter().any(|e| {
            e.codomain == cat.cod(m) && factors(cat, m, e.mor) && factors(cat, e.mor, m)
        });
        if !dup {
            elements.push(OpenElement {
                mor: m,
                codomain: cat.cod(m),
            });
        }
    }
    let mut order = BTreeSet::new();
    let mut meets = BTreeMap::new();
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            if a.codomain != b.codomain {
                continue;
            }
            if factors(cat, a.mor, b.mor) {
                order.insert((i, j));
            }
            let Some(cert) = compute_pullback(
                cat,
                Cospan {
                    left: a.mor,
                    right: b.mor,
                },
            ) else {
                continue;
            };
            let diag = cat.then(cert.proj_left(), a.mor).expect("composable");
            let found = elements.iter().position(|e| {
                e.codomain == a.codomain && factors(cat, diag, e.mor) && factors(cat, e.mor, diag)
            });
            if let Some(k) = found {
                meets.insert(
                    (i, j),
                    OpenMeet {
                        meet: k,
                        certificate: cert,
                    },
                );
            }
        }
    }
    let system = check_display_system_with(&cls, &monics, true);
    let system_of_monics = check_system_of_monics(&cls, &monics);
    let brute_force_maximal = brute_force_maximal_monics(&cls);
    let par = par_category(cat, ts, &monics);
    OpenPoset {
        monics,
        elements,
        order,
        meets,
        system,
        system_of_monics,
        brute_force_maximal,
        par,
    }
}
