//! Display maps, tangent display maps, submersions and étale maps, and the
//! properties of families of morphisms built from them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::fincat::{enumerate_retract_pairs, is_iso, mono_counterexample, FinCategory, MorId};
use crate::limits::{
    compute_pullback, cones, is_pullback_square, is_t_pullback, is_weak_t_pullback, Cospan,
    PullbackCertificate, Square, TPullbackCertificate, TPullbackFailure, TPullbackVerdict,
};
use crate::tangent::{check_differential_bundle, DifferentialBundleData, TangentStructure};

/// Evidence attached to a classification flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Every cospan examined had the required pullback.
    AllPullbacks { cospans: usize },
    NoPullback { n: usize, cospan: Cospan },
    NotTPullback {
        n: usize,
        cospan: Cospan,
        failure: TPullbackFailure,
    },
    Square(TPullbackCertificate),
    SquareFails(TPullbackFailure),
    Monic { iterates: usize },
    NotMono { k: usize, pair: (MorId, MorId) },
}

impl Witness {
    pub fn describe(&self, cat: &FinCategory) -> String {
        let cs = |c: &Cospan| format!("({}, {})", cat.mor_name(c.left), cat.mor_name(c.right));
        match self {
            Witness::AllPullbacks { cospans } => format!("{cospans} cospans certified"),
            Witness::NoPullback { n, cospan } => {
                format!("no pullback of T^{n} along {}", cs(cospan))
            }
            Witness::NotTPullback { n, cospan, failure } => format!(
                "pullback over {} for T^{n} is not preserved by T^{}: {}",
                cs(cospan),
                failure.k,
                failure.counterexample.describe(cat)
            ),
            Witness::Square(c) => format!("square certified for {} iterates", c.certs.len()),
            Witness::SquareFails(f) => format!(
                "square fails under T^{}: {}",
                f.k,
                f.counterexample.describe(cat)
            ),
            Witness::Monic { iterates } => format!("{iterates} iterates are mono"),
            Witness::NotMono { k, pair } => format!(
                "T^{k} identifies {} and {}",
                cat.mor_name(pair.0),
                cat.mor_name(pair.1)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisplayVerdict {
    pub mor: MorId,
    pub is_display: bool,
    pub is_t_display: bool,
    pub is_submersion: bool,
    pub is_etale: bool,
    pub is_t_monic: bool,
    pub witnesses: BTreeMap<&'static str, Witness>,
}

/// The square `(p_E, Tq, q, p_M)` whose pullback properties define
/// submersions and étale maps.
pub fn projection_square(cat: &FinCategory, ts: &TangentStructure, q: MorId) -> Square {
    Square {
        top: ts.p(cat.dom(q)),
        leftv: ts.tm(q),
        rightv: q,
        bottom: ts.p(cat.cod(q)),
    }
}

/// Naturality squares of `q` with `z`, `s`, `l` and `c`, each oriented with
/// the component on top. `None` where `T_2 q` has no pairing.
pub fn structural_squares(
    cat: &FinCategory,
    ts: &TangentStructure,
    q: MorId,
) -> Vec<(&'static str, Option<Square>)> {
    let (e, m) = (cat.dom(q), cat.cod(q));
    let tq = ts.tm(q);
    let ttq = ts.tm(tq);
    alloc::vec![
        (
            "z",
            Some(Square {
                top: ts.z(e),
                leftv: q,
                rightv: tq,
                bottom: ts.z(m),
            }),
        ),
        (
            "s",
            ts.t2_mor(cat, q).map(|t2q| Square {
                top: ts.s(e),
                leftv: t2q,
                rightv: tq,
                bottom: ts.s(m),
            }),
        ),
        (
            "l",
            Some(Square {
                top: ts.l(e),
                leftv: tq,
                rightv: ttq,
                bottom: ts.l(m),
            }),
        ),
        (
            "c",
            Some(Square {
                top: ts.c(e),
                leftv: ttq,
                rightv: ttq,
                bottom: ts.c(m),
            }),
        ),
    ]
}

/// Memoizing classifier for one tangent category.
pub struct Classifier<'a> {
    cat: &'a FinCategory,
    ts: &'a TangentStructure,
    pullbacks: RefCell<BTreeMap<Cospan, Option<Rc<PullbackCertificate>>>>,
    t_pullbacks: RefCell<BTreeMap<Cospan, Option<TPullbackFailure>>>,
    admits: RefCell<BTreeMap<MorId, Result<usize, (Cospan, Option<TPullbackFailure>)>>>,
}

impl<'a> Classifier<'a> {
    pub fn new(cat: &'a FinCategory, ts: &'a TangentStructure) -> Self {
        Self {
            cat,
            ts,
            pullbacks: RefCell::new(BTreeMap::new()),
            t_pullbacks: RefCell::new(BTreeMap::new()),
            admits: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn cat(&self) -> &'a FinCategory {
        self.cat
    }

    pub fn tangent(&self) -> &'a TangentStructure {
        self.ts
    }

    /// Canonical pullback of `cospan.right` along `cospan.left`.
    pub fn pullback(&self, cospan: Cospan) -> Option<Rc<PullbackCertificate>> {
        if let Some(hit) = self.pullbacks.borrow().get(&cospan) {
            return hit.clone();
        }
        let v = compute_pullback(self.cat, cospan).map(Rc::new);
        self.pullbacks.borrow_mut().insert(cospan, v.clone());
        v
    }

    /// `None` when the canonical pullback exists and is a T-pullback.
    fn t_pullback_failure(&self, cospan: Cospan) -> Result<(), Option<TPullbackFailure>> {
        let Some(cert) = self.pullback(cospan) else {
            return Err(None);
        };
        if let Some(hit) = self.t_pullbacks.borrow().get(&cospan) {
            return match hit {
                None => Ok(()),
                Some(f) => Err(Some(f.clone())),
            };
        }
        let v = match is_t_pullback(self.cat, self.ts.powers(), &cert.square) {
            Ok(TPullbackVerdict::Holds(_)) => None,
            Ok(TPullbackVerdict::Fails(f)) => Some(f),
            Err(_) => unreachable!("certified squares commute"),
        };
        self.t_pullbacks.borrow_mut().insert(cospan, v.clone());
        match v {
            None => Ok(()),
            Some(f) => Err(Some(f)),
        }
    }

    /// Does every pullback of `q` exist and is it preserved by all `T^k`?
    pub fn admits_t_pullbacks(&self, q: MorId) -> Result<usize, (Cospan, Option<TPullbackFailure>)> {
        if let Some(hit) = self.admits.borrow().get(&q) {
            return hit.clone();
        }
        let cat = self.cat;
        let mut count = 0;
        let mut result = Ok(0);
        for f in cat.into_object(cat.cod(q)) {
            let cospan = Cospan { left: f, right: q };
            count += 1;
            if let Err(fail) = self.t_pullback_failure(cospan) {
                result = Err((cospan, fail));
                break;
            }
        }
        if result.is_ok() {
            result = Ok(count);
        }
        self.admits.borrow_mut().insert(q, result.clone());
        result
    }

    pub fn is_display(&self, q: MorId) -> Result<usize, Cospan> {
        let cat = self.cat;
        let mut count = 0;
        for f in cat.into_object(cat.cod(q)) {
            let cospan = Cospan { left: f, right: q };
            if self.pullback(cospan).is_none() {
                return Err(cospan);
            }
            count += 1;
        }
        Ok(count)
    }

    pub fn t_display(&self, q: MorId) -> Result<usize, Witness> {
        let powers = self.ts.powers();
        let mut total = 0;
        for n in 0..powers.bound() {
            let tq = powers.power(n).mor(q);
            match self.admits_t_pullbacks(tq) {
                Ok(c) => total += c,
                Err((cospan, None)) => return Err(Witness::NoPullback { n, cospan }),
                Err((cospan, Some(failure))) => {
                    return Err(Witness::NotTPullback { n, cospan, failure })
                }
            }
        }
        Ok(total)
    }

    pub fn is_t_display(&self, q: MorId) -> bool {
        self.t_display(q).is_ok()
    }

    /// The variant with both the iterate index of `q` and of the square
    /// restricted to `1..=bound`.
    pub fn is_t_display_positive(&self, q: MorId) -> bool {
        let cat = self.cat;
        let powers = self.ts.powers();
        (1..=powers.bound()).all(|n| {
            let tq = powers.power(n).mor(q);
            cat.into_object(cat.cod(tq)).all(|f| {
                let cospan = Cospan { left: f, right: tq };
                if let Some(cert) = self.pullback(cospan) {
                    if crate::limits::is_t_pullback_positive(cat, powers, &cert.square)
                        .unwrap_or(false)
                    {
                        return true;
                    }
                }
                // any square over the cospan whose positive iterates are pullbacks
                cones(cat, cospan).into_iter().any(|cone| {
                    let sq = Square {
                        top: cone.right,
                        leftv: cone.left,
                        rightv: tq,
                        bottom: f,
                    };
                    crate::limits::is_t_pullback_positive(cat, powers, &sq).unwrap_or(false)
                })
            })
        })
    }

    pub fn is_t_monic(&self, q: MorId) -> Result<usize, Witness> {
        let powers = self.ts.powers();
        for k in 0..powers.bound() {
            if let Some(pair) = mono_counterexample(self.cat, powers.power(k).mor(q)) {
                return Err(Witness::NotMono { k, pair });
            }
        }
        Ok(powers.bound())
    }

    pub fn submersion(&self, q: MorId) -> TPullbackVerdict {
        let sq = projection_square(self.cat, self.ts, q);
        is_weak_t_pullback(self.cat, self.ts.powers(), &sq).unwrap_or_else(|_| {
            TPullbackVerdict::Fails(not_commuting(self.cat, &sq))
        })
    }

    pub fn etale(&self, q: MorId) -> TPullbackVerdict {
        let sq = projection_square(self.cat, self.ts, q);
        is_t_pullback(self.cat, self.ts.powers(), &sq)
            .unwrap_or_else(|_| TPullbackVerdict::Fails(not_commuting(self.cat, &sq)))
    }

    pub fn classify(&self, q: MorId) -> DisplayVerdict {
        let mut witnesses = BTreeMap::new();
        let is_display = match self.is_display(q) {
            Ok(c) => {
                witnesses.insert("display", Witness::AllPullbacks { cospans: c });
                true
            }
            Err(cospan) => {
                witnesses.insert("display", Witness::NoPullback { n: 0, cospan });
                false
            }
        };
        let is_t_display = match self.t_display(q) {
            Ok(c) => {
                witnesses.insert("t_display", Witness::AllPullbacks { cospans: c });
                true
            }
            Err(w) => {
                witnesses.insert("t_display", w);
                false
            }
        };
        let mut flag = |key, v: TPullbackVerdict| match v {
            TPullbackVerdict::Holds(c) => {
                witnesses.insert(key, Witness::Square(c));
                true
            }
            TPullbackVerdict::Fails(f) => {
                witnesses.insert(key, Witness::SquareFails(f));
                false
            }
        };
        let is_submersion = flag("submersion", self.submersion(q));
        let is_etale = flag("etale", self.etale(q));
        let is_t_monic = match self.is_t_monic(q) {
            Ok(n) => {
                witnesses.insert("t_monic", Witness::Monic { iterates: n });
                true
            }
            Err(w) => {
                witnesses.insert("t_monic", w);
                false
            }
        };
        DisplayVerdict {
            mor: q,
            is_display,
            is_t_display,
            is_submersion,
            is_etale,
            is_t_monic,
            witnesses,
        }
    }

    /// Legs `u;pi1` of every pullback of `q` along `f`, if one exists.
    fn pulled_back_legs(&self, cospan: Cospan) -> Option<Vec<MorId>> {
        let cert = self.pullback(cospan)?;
        let cat = self.cat;
        let p = cert.apex(cat);
        let mut legs = Vec::new();
        for x in cat.objects() {
            for &u in cat.hom(x, p) {
                if is_iso(cat, u) {
                    legs.push(cat.then(u, cert.proj_left()).expect("composable"));
                }
            }
        }
        Some(legs)
    }

    pub fn maximal_system(&self) -> BTreeSet<MorId> {
        self.cat
            .morphisms()
            .filter(|&q| self.is_t_display(q))
            .collect()
    }
}

// A square from a tangent structure that fails to commute can only arise
// from non-natural data; report it as a failure at the base iterate.
fn not_commuting(cat: &FinCategory, sq: &Square) -> TPullbackFailure {
    let _ = cat;
    TPullbackFailure {
        k: 0,
        square: *sq,
        counterexample: crate::limits::ConeCounterexample {
            cone: sq.apex_cone(),
            mediators: Vec::new(),
        },
    }
}

pub fn classify_morphism(cat: &FinCategory, ts: &TangentStructure, q: MorId) -> DisplayVerdict {
    Classifier::new(cat, ts).classify(q)
}

/// Outcome of one defining clause of a system of morphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub holds: bool,
    pub counterexample: Option<String>,
}

impl Clause {
    fn ok() -> Self {
        Self {
            holds: true,
            counterexample: None,
        }
    }

    fn fail(why: String) -> Self {
        Self {
            holds: false,
            counterexample: Some(why),
        }
    }

    fn from(r: Result<(), String>) -> Self {
        match r {
            Ok(()) => Self::ok(),
            Err(e) => Self::fail(e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemVerdict {
    pub members: BTreeSet<MorId>,
    pub tangent: bool,
    pub each_member_display: Clause,
    pub closed_under_pullback: Clause,
    /// Tangent clauses; `None` when checking a plain display system.
    pub admits_t_pullbacks: Option<Clause>,
    pub closed_under_t_pullback: Option<Clause>,
    pub stable_under_t: Option<Clause>,
    pub closed_under_composition: Clause,
    pub retractive: Clause,
}

impl SystemVerdict {
    /// The defining clauses of a (tangent) display system.
    pub fn is_display_system(&self) -> bool {
        self.each_member_display.holds
            && self.closed_under_pullback.holds
            && [
                &self.admits_t_pullbacks,
                &self.closed_under_t_pullback,
                &self.stable_under_t,
            ]
            .iter()
            .all(|c| c.as_ref().is_none_or(|c| c.holds))
    }

    pub fn clauses(&self) -> Vec<(&'static str, &Clause)> {
        let mut out = alloc::vec![
            ("each_member_display", &self.each_member_display),
            ("closed_under_pullback", &self.closed_under_pullback),
        ];
        if let Some(c) = &self.admits_t_pullbacks {
            out.push(("admits_t_pullbacks", c));
        }
        if let Some(c) = &self.closed_under_t_pullback {
            out.push(("closed_under_t_pullback", c));
        }
        if let Some(c) = &self.stable_under_t {
            out.push(("stable_under_t", c));
        }
        out.push(("closed_under_composition", &self.closed_under_composition));
        out.push(("retractive", &self.retractive));
        out
    }
}

fn retractive_clause(cat: &FinCategory, members: &BTreeSet<MorId>) -> Clause {
    for &f in members {
        for pair in enumerate_retract_pairs(cat, cat.dom(f)) {
            let sf = cat.then(pair.section, f).expect("composable");
            if !members.contains(&sf) {
                return Clause::fail(format!(
                    "{} ; {} = {} is missing (retraction {})",
                    cat.mor_name(pair.section),
                    cat.mor_name(f),
                    cat.mor_name(sf),
                    cat.mor_name(pair.retraction)
                ));
            }
        }
    }
    Clause::ok()
}

fn composition_clause(cat: &FinCategory, members: &BTreeSet<MorId>) -> Clause {
    for &a in members {
        for &b in members {
            if let Some(ab) = cat.then(a, b) {
                if !members.contains(&ab) {
                    return Clause::fail(format!(
                        "{} ; {} = {} is missing",
                        cat.mor_name(a),
                        cat.mor_name(b),
                        cat.mor_name(ab)
                    ));
                }
            }
        }
    }
    Clause::ok()
}

/// Check a user-supplied family against the definition of a (tangent)
/// display system, plus composition closure and retractivity.
///
/// A family need not be closed under isomorphism, so a pullback clause is
/// satisfied when some pullback square of the pair has its pulled-back leg
/// in the family.
pub fn check_display_system_with(
    cls: &Classifier<'_>,
    members: &BTreeSet<MorId>,
    tangent: bool,
) -> SystemVerdict {
    let cat = cls.cat();
    let ts = cls.tangent();
    let each_member_display = Clause::from((|| {
        for &q in members {
            if let Err(cospan) = cls.is_display(q) {
                return Err(format!(
                    "{} has no pullback along {}",
                    cat.mor_name(q),
                    cat.mor_name(cospan.left)
                ));
            }
        }
        Ok(())
    })());
    let closed_under_pullback = Clause::from((|| {
        for &q in members {
            for f in cat.into_object(cat.cod(q)) {
                let cospan = Cospan { left: f, right: q };
                if let Some(legs) = cls.pulled_back_legs(cospan) {
                    if !legs.iter().any(|l| members.contains(l)) {
                        return Err(format!(
                            "pullback of {} along {} leaves the family",
                            cat.mor_name(q),
                            cat.mor_name(f)
                        ));
                    }
                }
            }
        }
        Ok(())
    })());
    let (admits_t_pullbacks, closed_under_t_pullback, stable_under_t) = if tangent {
        let admits = Clause::from((|| {
            for &q in members {
                if let Err((cospan, _)) = cls.admits_t_pullbacks(q) {
                    return Err(format!(
                        "{} has no T-pullback along {}",
                        cat.mor_name(q),
                        cat.mor_name(cospan.left)
                    ));
                }
            }
            Ok(())
        })());
        let closed = Clause::from((|| {
            for &q in members {
                for f in cat.into_object(cat.cod(q)) {
                    let cospan = Cospan { left: f, right: q };
                    if cls.t_pullback_failure(cospan).is_err() {
                        continue;
                    }
                    let legs = cls.pulled_back_legs(cospan).expect("exists");
                    if !legs.iter().any(|l| members.contains(l)) {
                        return Err(format!(
                            "T-pullback of {} along {} leaves the family",
                            cat.mor_name(q),
                            cat.mor_name(f)
                        ));
                    }
                }
            }
            Ok(())
        })());
        let stable = Clause::from((|| {
            for &q in members {
                let tq = ts.tm(q);
                if !members.contains(&tq) {
                    return Err(format!(
                        "T({}) = {} is missing",
                        cat.mor_name(q),
                        cat.mor_name(tq)
                    ));
                }
            }
            Ok(())
        })());
        (Some(admits), Some(closed), Some(stable))
    } else {
        (None, None, None)
    };
    SystemVerdict {
        members: members.clone(),
        tangent,
        each_member_display,
        closed_under_pullback,
        admits_t_pullbacks,
        closed_under_t_pullback,
        stable_under_t,
        closed_under_composition: composition_clause(cat, members),
        retractive: retractive_clause(cat, members),
    }
}

pub fn check_display_system(
    cat: &FinCategory,
    ts: &TangentStructure,
    members: &BTreeSet<MorId>,
    tangent: bool,
) -> SystemVerdict {
    check_display_system_with(&Classifier::new(cat, ts), members, tangent)
}

pub fn maximal_tangent_display_system(cat: &FinCategory, ts: &TangentStructure) -> SystemVerdict {
    let cls = Classifier::new(cat, ts);
    let members = cls.maximal_system();
    check_display_system_with(&cls, &members, true)
}

pub fn check_retractive(cat: &FinCategory, members: &BTreeSet<MorId>) -> Clause {
    retractive_clause(cat, members)
}

/// Display submersions and display étale maps.
pub fn display_submersions(cls: &Classifier<'_>) -> (BTreeSet<MorId>, BTreeSet<MorId>) {
    let mut subs = BTreeSet::new();
    let mut etale = BTreeSet::new();
    for q in cls.cat().morphisms() {
        if !cls.is_t_display(q) {
            continue;
        }
        if cls.submersion(q).holds() {
            subs.insert(q);
        }
        if cls.etale(q).holds() {
            etale.insert(q);
        }
    }
    (subs, etale)
}

/// One configuration examined by [`check_split_idempotents_closed`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdempotentInstance {
    pub cospan: Cospan,
    pub section: MorId,
    pub retraction: MorId,
    pub idempotent: MorId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitClosureVerdict {
    pub holds: bool,
    /// Instances where the cone `(p1, g1;r;s)` commutes and `e` was formed.
    pub examined: usize,
    pub failure: Option<IdempotentInstance>,
}

/// For every canonical pullback `(P1, p1, g1)` of `q1` along `f` and every
/// section-retraction pair `(s: E2 -> E1, r: E1 -> E2)` on the domain of
/// `q1`, the idempotent `e` with `e;p1 = p1` and `e;g1 = g1;r;s` must split.
/// Pairs for which `(p1, g1;r;s)` is not a cone induce no `e`.
pub fn check_split_idempotents_closed(cat: &FinCategory) -> SplitClosureVerdict {
    let mut examined = 0;
    for q1 in cat.morphisms() {
        let pairs = enumerate_retract_pairs(cat, cat.dom(q1));
        for f in cat.into_object(cat.cod(q1)) {
            let cospan = Cospan { left: f, right: q1 };
            let Some(cert) = compute_pullback(cat, cospan) else {
                continue;
            };
            let (p1, g1) = (cert.proj_left(), cert.proj_right());
            for pair in &pairs {
                let Some(rs) = cat.then(pair.retraction, pair.section) else {
                    continue;
                };
                let g = cat.then(g1, rs).expect("composable");
                let Some(e) = cert.mediator(p1, g) else {
                    continue;
                };
                examined += 1;
                if crate::fincat::split_idempotent(cat, e).is_none() {
                    return SplitClosureVerdict {
                        holds: false,
                        examined,
                        failure: Some(IdempotentInstance {
                            cospan,
                            section: pair.section,
                            retraction: pair.retraction,
                            idempotent: e,
                        }),
                    };
                }
            }
        }
    }
    SplitClosureVerdict {
        holds: true,
        examined,
        failure: None,
    }
}

/// Is every `p_M` a tangent display map?
pub fn check_well_displayed(cls: &Classifier<'_>) -> Clause {
    let cat = cls.cat();
    let ts = cls.tangent();
    for m in cat.objects() {
        if let Err(w) = cls.t_display(ts.p(m)) {
            return Clause::fail(format!(
                "p at {} is not tangent display: {}",
                cat.obj_name(m),
                w.describe(cat)
            ));
        }
    }
    Clause::ok()
}

pub enum BundleCandidates {
    Supplied(Vec<DifferentialBundleData>),
    /// Search every `(q, z_q, s_q, l_q)` over canonical `E_2`, giving up
    /// when more than `budget` tuples would be examined.
    Enumerate { budget: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FullyDisplayedVerdict {
    Holds { bundles: usize, examined: usize },
    Fails(DifferentialBundleData),
    Inconclusive { required: usize, budget: usize },
}

impl FullyDisplayedVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, FullyDisplayedVerdict::Holds { .. })
    }
}

/// Every candidate `(q, E_2)` pair and the size of its search space.
fn candidate_space(cls: &Classifier<'_>) -> Vec<(MorId, Rc<PullbackCertificate>, usize)> {
    let cat = cls.cat();
    let ts = cls.tangent();
    let mut out = Vec::new();
    for q in cat.morphisms() {
        let Some(e2) = cls.pullback(Cospan { left: q, right: q }) else {
            continue;
        };
        let (e, m) = (cat.dom(q), cat.cod(q));
        let size = cat.hom(m, e).len()
            * cat.hom(e2.apex(cat), e).len()
            * cat.hom(e, ts.t(e)).len();
        out.push((q, e2, size));
    }
    out
}

pub fn check_fully_displayed(
    cls: &Classifier<'_>,
    candidates: BundleCandidates,
) -> FullyDisplayedVerdict {
    let cat = cls.cat();
    let ts = cls.tangent();
    let list: Vec<DifferentialBundleData> = match candidates {
        BundleCandidates::Supplied(v) => v,
        BundleCandidates::Enumerate { budget } => {
            let space = candidate_space(cls);
            let required: usize = space.iter().map(|s| s.2).sum();
            if required > budget {
                return FullyDisplayedVerdict::Inconclusive { required, budget };
            }
            let mut v = Vec::new();
            for (q, e2, _) in space {
                let (e, m) = (cat.dom(q), cat.cod(q));
                for &z in cat.hom(m, e) {
                    for &s in cat.hom(e2.apex(cat), e) {
                        for &l in cat.hom(e, ts.t(e)) {
                            v.push(DifferentialBundleData {
                                q,
                                zero: z,
                                sum: s,
                                lift: l,
                                e2: (*e2).clone(),
                            });
                        }
                    }
                }
            }
            v
        }
    };
    let examined = list.len();
    let mut bundles = 0;
    for db in list {
        let passes = check_differential_bundle(cat, ts, &db).is_ok_and(|r| r.passes());
        if !passes {
            continue;
        }
        bundles += 1;
        if !cls.is_t_display(db.q) {
            return FullyDisplayedVerdict::Fails(db);
        }
    }
    FullyDisplayedVerdict::Holds { bundles, examined }
}

/// Every square `(top, leftv, rightv, bottom)` that commutes, for property
/// scans over small categories.
pub fn commuting_squares(cat: &FinCategory) -> Vec<Square> {
    let mut out = Vec::new();
    for rightv in cat.morphisms() {
        for bottom in cat.into_object(cat.cod(rightv)) {
            for cone in cones(cat, Cospan { left: bottom, right: rightv }) {
                out.push(Square {
                    top: cone.right,
                    leftv: cone.left,
                    rightv,
                    bottom,
                });
            }
        }
    }
    out
}

/// Pullback squares among [`commuting_squares`].
pub fn pullback_squares(cat: &FinCategory) -> Vec<Square> {
    commuting_squares(cat)
        .into_iter()
        .filter(|sq| is_pullback_square(cat, sq).is_ok_and(|v| v.holds()))
        .collect()
}
