//! Pullbacks, weak pullbacks, terminal objects and tangent pullbacks.
//!
//! A [`Square`] is drawn as
//!
//! ```text
//!   P --top--> E
//!   |          |
//! leftv      rightv
//!   v          v
//!   N --bottom-> M
//! ```
//!
//! and commutes when `top ; rightv = leftv ; bottom`. Its cospan is
//! `(bottom, rightv)`: the square is "the pullback of `rightv` along
//! `bottom`". A cone over that cospan is a pair `(x: X -> N, y: X -> E)`
//! with `x ; bottom = y ; rightv`.
//!
//! All checks scan every cone exhaustively.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::fincat::{FinCategory, Functor, FunctorOrbit, FunctorPowers, MorId, ObjId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error("square does not commute: {0}")]
    NotCommuting(String),
    #[error("cospan legs {0} and {1} do not share a codomain")]
    NotACospan(String, String),
    #[error("not a cone over the certified cospan: {0}")]
    NotACone(String),
    #[error("n-fold pullback needs n >= 1")]
    ZeroFold,
}

/// `left: N -> M` and `right: E -> M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cospan {
    pub left: MorId,
    pub right: MorId,
}

impl Cospan {
    pub fn new(cat: &FinCategory, left: MorId, right: MorId) -> Result<Self, LimitError> {
        if cat.cod(left) != cat.cod(right) {
            return Err(LimitError::NotACospan(cat.describe(left), cat.describe(right)));
        }
        Ok(Self { left, right })
    }

    pub fn map(&self, f: &Functor) -> Cospan {
        Cospan {
            left: f.mor(self.left),
            right: f.mor(self.right),
        }
    }
}

/// Legs `left: X -> N` and `right: X -> E` of a cone over a cospan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cone {
    pub left: MorId,
    pub right: MorId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Square {
    pub top: MorId,
    pub leftv: MorId,
    pub rightv: MorId,
    pub bottom: MorId,
}

impl Square {
    pub fn cospan(&self) -> Cospan {
        Cospan {
            left: self.bottom,
            right: self.rightv,
        }
    }

    /// The square as a cone over its own cospan.
    pub fn apex_cone(&self) -> Cone {
        Cone {
            left: self.leftv,
            right: self.top,
        }
    }

    pub fn apex(&self, cat: &FinCategory) -> ObjId {
        cat.dom(self.top)
    }

    pub fn commutes(&self, cat: &FinCategory) -> bool {
        cat.cod(self.top) == cat.dom(self.rightv)
            && cat.cod(self.leftv) == cat.dom(self.bottom)
            && cat.dom(self.top) == cat.dom(self.leftv)
            && cat.cod(self.rightv) == cat.cod(self.bottom)
            && cat.then(self.top, self.rightv).is_some()
            && cat.then(self.top, self.rightv) == cat.then(self.leftv, self.bottom)
    }

    pub fn map(&self, f: &Functor) -> Square {
        Square {
            top: f.mor(self.top),
            leftv: f.mor(self.leftv),
            rightv: f.mor(self.rightv),
            bottom: f.mor(self.bottom),
        }
    }

    /// Reflect across the diagonal, swapping the two legs.
    pub fn transpose(&self) -> Square {
        Square {
            top: self.leftv,
            leftv: self.top,
            rightv: self.bottom,
            bottom: self.rightv,
        }
    }

    pub fn describe(&self, cat: &FinCategory) -> String {
        format!(
            "[top {}, left {}, right {}, bottom {}]",
            cat.mor_name(self.top),
            cat.mor_name(self.leftv),
            cat.mor_name(self.rightv),
            cat.mor_name(self.bottom)
        )
    }

    fn require_commutes(&self, cat: &FinCategory) -> Result<(), LimitError> {
        if self.commutes(cat) {
            Ok(())
        } else {
            Err(LimitError::NotCommuting(self.describe(cat)))
        }
    }
}

/// A pullback square with its full mediator table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackCertificate {
    pub square: Square,
    pub mediators: BTreeMap<Cone, MorId>,
}

impl PullbackCertificate {
    pub fn apex(&self, cat: &FinCategory) -> ObjId {
        self.square.apex(cat)
    }

    pub fn cospan(&self) -> Cospan {
        self.square.cospan()
    }

    /// Leg of the apex over the cospan's left morphism.
    pub fn proj_left(&self) -> MorId {
        self.square.leftv
    }

    /// Leg of the apex over the cospan's right morphism.
    pub fn proj_right(&self) -> MorId {
        self.square.top
    }

    pub fn mediator(&self, left: MorId, right: MorId) -> Option<MorId> {
        self.mediators.get(&Cone { left, right }).copied()
    }
}

/// A cone with zero or several mediators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeCounterexample {
    pub cone: Cone,
    pub mediators: Vec<MorId>,
}

impl ConeCounterexample {
    pub fn describe(&self, cat: &FinCategory) -> String {
        let names: Vec<&str> = self.mediators.iter().map(|&m| cat.mor_name(m)).collect();
        format!(
            "cone ({}, {}) from {} has {} mediators {:?}",
            cat.mor_name(self.cone.left),
            cat.mor_name(self.cone.right),
            cat.obj_name(cat.dom(self.cone.left)),
            self.mediators.len(),
            names
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PullbackVerdict {
    Holds(PullbackCertificate),
    Fails(ConeCounterexample),
}

impl PullbackVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PullbackVerdict::Holds(_))
    }

    pub fn certificate(self) -> Option<PullbackCertificate> {
        match self {
            PullbackVerdict::Holds(c) => Some(c),
            PullbackVerdict::Fails(_) => None,
        }
    }

    pub fn counterexample(&self) -> Option<&ConeCounterexample> {
        match self {
            PullbackVerdict::Holds(_) => None,
            PullbackVerdict::Fails(c) => Some(c),
        }
    }
}

/// Every cone over `cospan`, ordered by apex index then leg indices.
pub fn cones(cat: &FinCategory, cospan: Cospan) -> Vec<Cone> {
    let n = cat.dom(cospan.left);
    let e = cat.dom(cospan.right);
    let mut out = Vec::new();
    for x in cat.objects() {
        let rights = cat.hom(x, e);
        for &l in cat.hom(x, n) {
            let Some(target) = cat.then(l, cospan.left) else {
                continue;
            };
            for &r in rights {
                if cat.then(r, cospan.right) == Some(target) {
                    out.push(Cone { left: l, right: r });
                }
            }
        }
    }
    out
}

/// Every `u` with `u ; leftv = cone.left` and `u ; top = cone.right`.
pub fn factorizations(cat: &FinCategory, square: &Square, cone: Cone) -> Vec<MorId> {
    let x = cat.dom(cone.left);
    let p = square.apex(cat);
    cat.hom(x, p)
        .iter()
        .copied()
        .filter(|&u| {
            cat.then(u, square.leftv) == Some(cone.left) && cat.then(u, square.top) == Some(cone.right)
        })
        .collect()
}

fn scan(cat: &FinCategory, square: &Square, all: &[Cone], weak: bool) -> PullbackVerdict {
    let mut mediators = BTreeMap::new();
    for &cone in all {
        let us = factorizations(cat, square, cone);
        let ok = if weak { !us.is_empty() } else { us.len() == 1 };
        if !ok {
            return PullbackVerdict::Fails(ConeCounterexample {
                cone,
                mediators: us,
            });
        }
        let best = us
            .into_iter()
            .min_by(|&a, &b| cat.mor_name(a).cmp(cat.mor_name(b)))
            .expect("nonempty");
        mediators.insert(cone, best);
    }
    PullbackVerdict::Holds(PullbackCertificate {
        square: *square,
        mediators,
    })
}

pub fn is_pullback_square(cat: &FinCategory, square: &Square) -> Result<PullbackVerdict, LimitError> {
    square.require_commutes(cat)?;
    Ok(scan(cat, square, &cones(cat, square.cospan()), false))
}

/// Existence of mediators only; the certificate records the least one.
pub fn is_weak_pullback_square(
    cat: &FinCategory,
    square: &Square,
) -> Result<PullbackVerdict, LimitError> {
    square.require_commutes(cat)?;
    Ok(scan(cat, square, &cones(cat, square.cospan()), true))
}

/// Pullback certificates for every distinct iterate of a functor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPullbackCertificate {
    pub orbit: FunctorOrbit,
    /// `certs[k]` certifies the image under `T^k`, for `k < orbit.bound()`.
    pub certs: Vec<PullbackCertificate>,
}

impl TPullbackCertificate {
    pub fn base(&self) -> &PullbackCertificate {
        &self.certs[0]
    }

    pub fn at(&self, k: usize) -> &PullbackCertificate {
        &self.certs[self.orbit.reduce(k)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPullbackFailure {
    /// Least iterate whose image square is not a (weak) pullback.
    pub k: usize,
    pub square: Square,
    pub counterexample: ConeCounterexample,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TPullbackVerdict {
    Holds(TPullbackCertificate),
    Fails(TPullbackFailure),
}

impl TPullbackVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, TPullbackVerdict::Holds(_))
    }

    pub fn certificate(self) -> Option<TPullbackCertificate> {
        match self {
            TPullbackVerdict::Holds(c) => Some(c),
            TPullbackVerdict::Fails(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&TPullbackFailure> {
        match self {
            TPullbackVerdict::Holds(_) => None,
            TPullbackVerdict::Fails(f) => Some(f),
        }
    }
}

fn t_scan(
    cat: &FinCategory,
    powers: &FunctorPowers,
    square: &Square,
    weak: bool,
) -> Result<TPullbackVerdict, LimitError> {
    square.require_commutes(cat)?;
    let orbit = powers.orbit();
    let mut certs = Vec::with_capacity(orbit.bound());
    for k in 0..orbit.bound() {
        let image = square.map(powers.power(k));
        match scan(cat, &image, &cones(cat, image.cospan()), weak) {
            PullbackVerdict::Holds(c) => certs.push(c),
            PullbackVerdict::Fails(counterexample) => {
                return Ok(TPullbackVerdict::Fails(TPullbackFailure {
                    k,
                    square: image,
                    counterexample,
                }))
            }
        }
    }
    Ok(TPullbackVerdict::Holds(TPullbackCertificate { orbit, certs }))
}

/// Is the square a pullback under every iterate `T^k`, `k >= 0`?
pub fn is_t_pullback(
    cat: &FinCategory,
    powers: &FunctorPowers,
    square: &Square,
) -> Result<TPullbackVerdict, LimitError> {
    t_scan(cat, powers, square, false)
}

pub fn is_weak_t_pullback(
    cat: &FinCategory,
    powers: &FunctorPowers,
    square: &Square,
) -> Result<TPullbackVerdict, LimitError> {
    t_scan(cat, powers, square, true)
}

/// Only the iterates `T^k` with `1 <= k <= bound` are examined.
pub fn is_t_pullback_positive(
    cat: &FinCategory,
    powers: &FunctorPowers,
    square: &Square,
) -> Result<bool, LimitError> {
    square.require_commutes(cat)?;
    Ok((1..=powers.bound()).all(|k| {
        let image = square.map(powers.power(k));
        scan(cat, &image, &cones(cat, image.cospan()), false).holds()
    }))
}

/// The canonical pullback of `cospan.right` along `cospan.left`.
///
/// Among all pullback squares the one with the least apex name wins, then
/// the least left leg name, then the least right leg name.
pub fn compute_pullback(cat: &FinCategory, cospan: Cospan) -> Option<PullbackCertificate> {
    if cat.cod(cospan.left) != cat.cod(cospan.right) {
        return None;
    }
    let all = cones(cat, cospan);
    let mut candidates = all.clone();
    candidates.sort_by(|a, b| {
        let ka = (
            cat.obj_name(cat.dom(a.left)),
            cat.mor_name(a.left),
            cat.mor_name(a.right),
        );
        let kb = (
            cat.obj_name(cat.dom(b.left)),
            cat.mor_name(b.left),
            cat.mor_name(b.right),
        );
        ka.cmp(&kb)
    });
    for cand in candidates {
        let square = Square {
            top: cand.right,
            leftv: cand.left,
            rightv: cospan.right,
            bottom: cospan.left,
        };
        if let PullbackVerdict::Holds(cert) = scan(cat, &square, &all, false) {
            return Some(cert);
        }
    }
    None
}

pub fn mediating_morphism(
    cat: &FinCategory,
    cert: &PullbackCertificate,
    cone: Cone,
) -> Result<MorId, LimitError> {
    cert.mediators.get(&cone).copied().ok_or_else(|| {
        LimitError::NotACone(format!(
            "({}, {})",
            cat.mor_name(cone.left),
            cat.mor_name(cone.right)
        ))
    })
}

/// The object with exactly one morphism from every object; least name wins.
pub fn compute_terminal(cat: &FinCategory) -> Option<ObjId> {
    cat.objects_by_name()
        .into_iter()
        .find(|&t| cat.objects().all(|x| cat.hom(x, t).len() == 1))
}

/// The unique morphism into a terminal object.
pub fn bang(cat: &FinCategory, x: ObjId, terminal: ObjId) -> MorId {
    cat.hom(x, terminal)[0]
}

/// Wide pullback of `n` copies of a morphism into a common base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NFoldPullback {
    pub base: ObjId,
    pub apex: ObjId,
    pub map: MorId,
    pub projections: Vec<MorId>,
    /// Stage `i` is the pullback of `map` along the composite apex of
    /// stage `i - 1` into the base; there are `n - 1` stages.
    pub stages: Vec<PullbackCertificate>,
}

impl NFoldPullback {
    /// The mediator `X -> apex` with the given projections.
    pub fn mediator(&self, cat: &FinCategory, legs: &[MorId]) -> Option<MorId> {
        if legs.len() != self.projections.len() {
            return None;
        }
        let mut acc = legs[0];
        for (stage, &leg) in self.stages.iter().zip(&legs[1..]) {
            acc = stage.mediator(acc, leg)?;
        }
        // a failed cone at an earlier stage makes lookup fail above
        let _ = cat;
        Some(acc)
    }

    /// The composite from the apex to the base.
    pub fn to_base(&self, cat: &FinCategory) -> MorId {
        cat.then(self.projections[0], self.map)
            .expect("projection composes with the map")
    }
}

pub fn compute_nfold_pullback(
    cat: &FinCategory,
    map: MorId,
    n: usize,
) -> Result<Option<NFoldPullback>, LimitError> {
    if n == 0 {
        return Err(LimitError::ZeroFold);
    }
    let e = cat.dom(map);
    let mut apex = e;
    let mut projections = alloc::vec![cat.id(e)];
    let mut to_base = map;
    let mut stages = Vec::new();
    for _ in 1..n {
        let Some(cert) = compute_pullback(
            cat,
            Cospan {
                left: to_base,
                right: map,
            },
        ) else {
            return Ok(None);
        };
        let down = cert.proj_left();
        projections = projections
            .iter()
            .map(|&pr| cat.then(down, pr).expect("projection composes"))
            .collect();
        projections.push(cert.proj_right());
        apex = cert.apex(cat);
        to_base = cat.then(down, to_base).expect("composes");
        stages.push(cert);
    }
    Ok(Some(NFoldPullback {
        base: cat.cod(map),
        apex,
        map,
        projections,
        stages,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::samples::*;
    use crate::fincat::CategoryBuilder;
    use alloc::string::ToString;

    fn m(cat: &FinCategory, name: &str) -> MorId {
        cat.morphism_named(name).unwrap()
    }

    #[test]
    fn diamond_meet_is_pullback() {
        let c = diamond();
        let cert = compute_pullback(&c, Cospan::new(&c, m(&c, "a<top"), m(&c, "b<top")).unwrap())
            .unwrap();
        assert_eq!(c.obj_name(cert.apex(&c)), "bot");
        assert_eq!(cert.proj_left(), m(&c, "bot<a"));
        assert_eq!(cert.proj_right(), m(&c, "bot<b"));
    }

    #[test]
    fn vee_has_no_pullback() {
        let c = vee();
        assert!(compute_pullback(&c, Cospan::new(&c, m(&c, "a<c"), m(&c, "b<c")).unwrap()).is_none());
    }

    #[test]
    fn pullback_along_identity() {
        let c = diamond();
        for f in c.morphisms() {
            let cert = compute_pullback(
                &c,
                Cospan {
                    left: f,
                    right: c.id(c.cod(f)),
                },
            )
            .unwrap();
            assert_eq!(cert.apex(&c), c.dom(f));
            assert_eq!(cert.proj_left(), c.id(c.dom(f)));
            assert_eq!(cert.proj_right(), f);
        }
    }

    #[test]
    fn identity_square_is_pullback() {
        let c = z2();
        let one = m(&c, "1");
        let sq = Square {
            top: one,
            leftv: one,
            rightv: one,
            bottom: one,
        };
        let cert = is_pullback_square(&c, &sq).unwrap().certificate().unwrap();
        assert_eq!(cert.mediator(one, one), Some(one));
    }

    #[test]
    fn top_apex_over_meet_cospan_fails() {
        // (a<top, b<top) from top does not type, so take apex bot over the
        // cospan (a<top, a<top): the cone (id_a, id_a) cannot factor through bot
        let c = diamond();
        let sq = Square {
            top: m(&c, "bot<a"),
            leftv: m(&c, "bot<a"),
            rightv: m(&c, "a<top"),
            bottom: m(&c, "a<top"),
        };
        let v = is_pullback_square(&c, &sq).unwrap();
        let cex = v.counterexample().unwrap();
        assert!(cex.mediators.is_empty());
        assert_eq!(c.obj_name(c.dom(cex.cone.left)), "a");
    }

    #[test]
    fn non_commuting_square_is_an_error() {
        let c = z2();
        let sq = Square {
            top: m(&c, "g"),
            leftv: m(&c, "1"),
            rightv: m(&c, "1"),
            bottom: m(&c, "1"),
        };
        assert!(matches!(
            is_pullback_square(&c, &sq),
            Err(LimitError::NotCommuting(_))
        ));
    }

    #[test]
    fn z2_square_of_isos_is_pullback() {
        let c = z2();
        let (one, g) = (m(&c, "1"), m(&c, "g"));
        let sq = Square {
            top: one,
            leftv: one,
            rightv: g,
            bottom: g,
        };
        assert!(is_weak_pullback_square(&c, &sq).unwrap().holds());
        assert!(is_pullback_square(&c, &sq).unwrap().holds());
    }

    #[test]
    fn weak_but_not_strict() {
        // T is a retract of P: k;! = id_T, !;k = e. Over (id_T, id_T) the
        // square with both legs ! admits the mediators id_P and e for its own cone
        let mut b = CategoryBuilder::new();
        let p = b.object("P").unwrap();
        let t = b.object("T").unwrap();
        let bang = b.morphism("!", p, t).unwrap();
        let k = b.morphism("k", t, p).unwrap();
        let e = b.morphism("e", p, p).unwrap();
        let id_p = b.morphism("id_P", p, p).unwrap();
        let id_t = b.morphism("id_T", t, t).unwrap();
        b.identity(p, id_p).unwrap();
        b.identity(t, id_t).unwrap();
        b.then(k, bang, id_t).unwrap();
        b.then(bang, k, e).unwrap();
        b.then(e, e, e).unwrap();
        b.then(e, bang, bang).unwrap();
        b.then(k, e, k).unwrap();
        let c = b.build();
        assert!(crate::fincat::validate_category(&c).is_valid());
        let sq = Square {
            top: bang,
            leftv: bang,
            rightv: id_t,
            bottom: id_t,
        };
        assert!(is_weak_pullback_square(&c, &sq).unwrap().holds());
        let v = is_pullback_square(&c, &sq).unwrap();
        let cex = v.counterexample().unwrap();
        assert_eq!(cex.mediators.len(), 2);
        assert_eq!(cex.cone, sq.apex_cone());
    }

    #[test]
    fn vacuous_weak_pullback() {
        // a commuting square whose cospan admits only its own cone factors weakly
        let c = vee();
        let id_a = c.id(c.object_named("a").unwrap());
        let ac = m(&c, "a<c");
        let sq = Square {
            top: ac,
            leftv: id_a,
            rightv: c.id(c.object_named("c").unwrap()),
            bottom: ac,
        };
        assert!(is_weak_pullback_square(&c, &sq).unwrap().holds());
    }

    /// `u, v: A -> B`, `a1, a2: C -> D`, `w: D -> E` with `a1;w = a2;w = h`,
    /// and `T` sending `u, v` to `w` and the rest of the category to `E`.
    fn collapsing() -> (FinCategory, Functor) {
        let mut b = CategoryBuilder::new();
        let oa = b.object("A").unwrap();
        let ob = b.object("B").unwrap();
        let oc = b.object("C").unwrap();
        let od = b.object("D").unwrap();
        let oe = b.object("E").unwrap();
        b.morphism("u", oa, ob).unwrap();
        b.morphism("v", oa, ob).unwrap();
        let a1 = b.morphism("a1", oc, od).unwrap();
        let a2 = b.morphism("a2", oc, od).unwrap();
        let w = b.morphism("w", od, oe).unwrap();
        let h = b.morphism("h", oc, oe).unwrap();
        b.then(a1, w, h).unwrap();
        b.then(a2, w, h).unwrap();
        let c = b.build();
        let id_e = c.id(oe);
        let objs = alloc::vec![od, oe, oe, oe, oe];
        let mors = c
            .morphisms()
            .map(|f| match c.mor_name(f) {
                "u" | "v" => w,
                "id_A" => c.id(od),
                _ => id_e,
            })
            .collect();
        (c, Functor::new(objs, mors))
    }

    #[test]
    fn collapsing_functor_breaks_t_pullback() {
        let (c, t) = collapsing();
        assert!(crate::fincat::validate_category(&c).is_valid());
        assert!(crate::fincat::validate_functor(&c, &c, &t).is_valid());
        let powers = FunctorPowers::new(&t);
        let id_a = c.id(c.object_named("A").unwrap());
        let u = m(&c, "u");
        // u is mono, so it is its own kernel pair
        let sq = Square {
            top: id_a,
            leftv: id_a,
            rightv: u,
            bottom: u,
        };
        assert!(is_pullback_square(&c, &sq).unwrap().holds());
        let v = is_t_pullback(&c, &powers, &sq).unwrap();
        let fail = v.failure().unwrap();
        assert_eq!(fail.k, 1);
        assert_eq!(fail.counterexample.cone.left, m(&c, "a1"));
        assert!(!is_t_pullback_positive(&c, &powers, &sq).unwrap());
    }

    #[test]
    fn identity_square_under_any_functor() {
        let (c, t) = collapsing();
        let powers = FunctorPowers::new(&t);
        for o in c.objects() {
            let i = c.id(o);
            let sq = Square {
                top: i,
                leftv: i,
                rightv: i,
                bottom: i,
            };
            let cert = is_t_pullback(&c, &powers, &sq).unwrap().certificate().unwrap();
            assert_eq!(cert.certs.len(), powers.bound());
        }
    }

    #[test]
    fn terminal_and_nfold() {
        let c = diamond();
        assert_eq!(c.obj_name(compute_terminal(&c).unwrap()), "top");
        assert_eq!(compute_terminal(&vee()).map(|o| vee().obj_name(o).to_string()), Some("c".into()));
        assert!(compute_terminal(&z2()).is_none());
        assert_eq!(compute_terminal(&idempotent_monoid()), None);
        assert!(compute_terminal(&discrete(&["x", "y"])).is_none());
        for o in c.objects() {
            let np = compute_nfold_pullback(&c, c.id(o), 3).unwrap().unwrap();
            assert_eq!(np.apex, o);
            assert!(np.projections.iter().all(|&pr| pr == c.id(o)));
            assert_eq!(np.stages.len(), 2);
            assert_eq!(np.mediator(&c, &[c.id(o); 3]), Some(c.id(o)));
        }
        assert!(compute_nfold_pullback(&c, c.id(ObjId(0)), 0).is_err());
    }

    #[test]
    fn mediating_morphism_of_apex_cone_is_identity() {
        let c = diamond();
        let cert = compute_pullback(&c, Cospan::new(&c, m(&c, "a<top"), m(&c, "b<top")).unwrap())
            .unwrap();
        let apex = cert.apex(&c);
        assert_eq!(
            mediating_morphism(&c, &cert, cert.square.apex_cone()).unwrap(),
            c.id(apex)
        );
        assert!(mediating_morphism(
            &c,
            &cert,
            Cone {
                left: m(&c, "a<top"),
                right: m(&c, "b<top")
            }
        )
        .is_err());
    }
}
