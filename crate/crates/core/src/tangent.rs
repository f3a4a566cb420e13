//! Tangent structure data and its axioms, negatives and differential bundles.
//!
//! Components are indexed by object. With `T` the endofunctor, the
//! structural transformations are typed
//!
//! ```text
//! p_M: TM -> M      z_M: M -> TM      s_M: T2M -> TM
//! l_M: TM -> T²M    c_M: T²M -> T²M   n_M: TM -> TM
//! ```
//!
//! where `T2M` is the apex of the chosen pullback of `p_M` along itself,
//! with `pi1` its left leg and `pi2` its right leg. Pairings `<a, b>` into a
//! pullback are mediators read off the certificate, so an equation whose
//! pairing does not exist is reported as failing rather than skipped.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::fincat::{
    validate_functor, validate_nat, FinCategory, Functor, FunctorPowers, MorId,
    NatTransformation, ObjId,
};
use crate::limits::{
    compute_pullback, is_pullback_square, is_t_pullback, Cone, Cospan, NFoldPullback,
    PullbackCertificate, PullbackVerdict, Square,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TangentError {
    #[error("no T_{n} witness exists at {object}")]
    MissingWitness { object: String, n: usize },
    #[error("explicit T_2 witness at {object} is not a pullback of p along p: {detail}")]
    WitnessNotPullback { object: String, detail: String },
    #[error("{what} has {got} entries, expected {expected}")]
    Arity {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("negation is absent")]
    NoNegation,
    #[error("E_2 certificate is not a pullback of {0} along itself")]
    BadBundleWitness(String),
}

/// Components of a tangent structure candidate, before witnesses are fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentData {
    pub functor: Functor,
    pub projection: NatTransformation,
    pub zero: NatTransformation,
    pub sum: NatTransformation,
    pub lift: NatTransformation,
    pub flip: NatTransformation,
    pub negation: Option<NatTransformation>,
}

/// A tangent structure candidate with certified `T_n` witnesses.
///
/// Witnesses and functor powers are fixed at construction from `data.functor`
/// and `data.projection`; the remaining components may be replaced freely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentStructure {
    pub data: TangentData,
    witnesses: BTreeMap<(ObjId, usize), NFoldPullback>,
    witness_bound: usize,
    powers: FunctorPowers,
}

impl TangentStructure {
    /// Fix witnesses: an explicit square is used where given, otherwise the
    /// canonical pullback. `T_n` for `3 <= n <= bound` extends the `T_2`
    /// witness by canonical pullbacks.
    pub fn new(
        cat: &FinCategory,
        data: TangentData,
        explicit: &BTreeMap<ObjId, Square>,
        bound: usize,
    ) -> Result<Self, TangentError> {
        let n_obj = cat.object_count();
        let n_mor = cat.morphism_count();
        let arity = |what, got: usize, expected| {
            if got == expected {
                Ok(())
            } else {
                Err(TangentError::Arity {
                    what,
                    got,
                    expected,
                })
            }
        };
        arity("functor object map", data.functor.obj_map().len(), n_obj)?;
        arity("functor morphism map", data.functor.mor_map().len(), n_mor)?;
        for (what, t) in [
            ("p", &data.projection),
            ("z", &data.zero),
            ("s", &data.sum),
            ("l", &data.lift),
            ("c", &data.flip),
        ] {
            arity(what, t.components().len(), n_obj)?;
        }
        if let Some(n) = &data.negation {
            arity("n", n.components().len(), n_obj)?;
        }
        let bound = bound.max(2);
        let mut witnesses = BTreeMap::new();
        for m in cat.objects() {
            let p = data.projection.at(m);
            let cert = match explicit.get(&m) {
                Some(sq) => {
                    let describe = || cat.obj_name(m).to_string();
                    if sq.bottom != p || sq.rightv != p {
                        return Err(TangentError::WitnessNotPullback {
                            object: describe(),
                            detail: "legs do not lie over p".into(),
                        });
                    }
                    match is_pullback_square(cat, sq) {
                        Ok(PullbackVerdict::Holds(c)) => c,
                        Ok(PullbackVerdict::Fails(cex)) => {
                            return Err(TangentError::WitnessNotPullback {
                                object: describe(),
                                detail: cex.describe(cat),
                            })
                        }
                        Err(e) => {
                            return Err(TangentError::WitnessNotPullback {
                                object: describe(),
                                detail: e.to_string(),
                            })
                        }
                    }
                }
                None => compute_pullback(cat, Cospan { left: p, right: p }).ok_or_else(|| {
                    TangentError::MissingWitness {
                        object: cat.obj_name(m).to_string(),
                        n: 2,
                    }
                })?,
            };
            let mut np = NFoldPullback {
                base: cat.cod(p),
                apex: cert.apex(cat),
                map: p,
                projections: alloc::vec![cert.proj_left(), cert.proj_right()],
                stages: alloc::vec![cert],
            };
            witnesses.insert((m, 2), np.clone());
            for n in 3..=bound {
                let to_base = np.to_base(cat);
                let next = compute_pullback(
                    cat,
                    Cospan {
                        left: to_base,
                        right: p,
                    },
                )
                .ok_or_else(|| TangentError::MissingWitness {
                    object: cat.obj_name(m).to_string(),
                    n,
                })?;
                let down = next.proj_left();
                np.projections = np
                    .projections
                    .iter()
                    .map(|&pr| cat.then(down, pr).expect("composable"))
                    .collect();
                np.projections.push(next.proj_right());
                np.apex = next.apex(cat);
                np.stages.push(next);
                witnesses.insert((m, n), np.clone());
            }
        }
        let powers = FunctorPowers::new(&data.functor);
        Ok(Self {
            data,
            witnesses,
            witness_bound: bound,
            powers,
        })
    }

    pub fn functor(&self) -> &Functor {
        &self.data.functor
    }

    pub fn powers(&self) -> &FunctorPowers {
        &self.powers
    }

    pub fn witness_bound(&self) -> usize {
        self.witness_bound
    }

    pub fn t(&self, m: ObjId) -> ObjId {
        self.data.functor.obj(m)
    }

    pub fn tm(&self, f: MorId) -> MorId {
        self.data.functor.mor(f)
    }

    pub fn p(&self, m: ObjId) -> MorId {
        self.data.projection.at(m)
    }

    pub fn z(&self, m: ObjId) -> MorId {
        self.data.zero.at(m)
    }

    pub fn s(&self, m: ObjId) -> MorId {
        self.data.sum.at(m)
    }

    pub fn l(&self, m: ObjId) -> MorId {
        self.data.lift.at(m)
    }

    pub fn c(&self, m: ObjId) -> MorId {
        self.data.flip.at(m)
    }

    pub fn n(&self, m: ObjId) -> Option<MorId> {
        self.data.negation.as_ref().map(|n| n.at(m))
    }

    pub fn tn(&self, m: ObjId, n: usize) -> Option<&NFoldPullback> {
        self.witnesses.get(&(m, n))
    }

    pub fn witnesses(&self) -> impl Iterator<Item = (&(ObjId, usize), &NFoldPullback)> {
        self.witnesses.iter()
    }

    pub fn t2(&self, m: ObjId) -> &PullbackCertificate {
        &self.witnesses[&(m, 2)].stages[0]
    }

    pub fn pi1(&self, m: ObjId) -> MorId {
        self.t2(m).proj_left()
    }

    pub fn pi2(&self, m: ObjId) -> MorId {
        self.t2(m).proj_right()
    }

    /// `<a, b>: X -> T2M`.
    pub fn pair(&self, m: ObjId, a: MorId, b: MorId) -> Option<MorId> {
        self.t2(m).mediator(a, b)
    }

    /// `T2` on a morphism `f: M -> N`, that is `<pi1;Tf, pi2;Tf>`.
    pub fn t2_mor(&self, cat: &FinCategory, f: MorId) -> Option<MorId> {
        let (a, b) = (cat.dom(f), cat.cod(f));
        let tf = self.tm(f);
        let x = cat.then(self.pi1(a), tf)?;
        let y = cat.then(self.pi2(a), tf)?;
        self.pair(b, x, y)
    }

    /// `T2` as a table, if every pairing exists.
    pub fn t2_functor(&self, cat: &FinCategory) -> Option<Functor> {
        let objs = cat.objects().map(|m| self.t2(m).apex(cat)).collect();
        let mors = cat
            .morphisms()
            .map(|f| self.t2_mor(cat, f))
            .collect::<Option<Vec<_>>>()?;
        Some(Functor::new(objs, mors))
    }
}

/// The identity functor with identity components. `T_2 M` is witnessed by
/// `M` itself, so that `s = id` is typed even when a smaller-named isomorphic
/// object would be the canonical pullback.
pub fn trivial_tangent(cat: &FinCategory) -> Result<TangentStructure, TangentError> {
    let id = Functor::identity(cat);
    let ids = NatTransformation::identity_on(&id, cat);
    let witnesses = cat
        .objects()
        .map(|m| {
            let i = cat.id(m);
            (
                m,
                Square {
                    top: i,
                    leftv: i,
                    rightv: i,
                    bottom: i,
                },
            )
        })
        .collect();
    TangentStructure::new(
        cat,
        TangentData {
            functor: id,
            projection: ids.clone(),
            zero: ids.clone(),
            sum: ids.clone(),
            lift: ids.clone(),
            flip: ids.clone(),
            negation: Some(ids),
        },
        &witnesses,
        2,
    )
}

/// One named equation evaluated at every object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationCheck {
    pub group: String,
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl EquationCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<EquationCheck>,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(EquationCheck::holds)
    }

    pub fn failing(&self) -> impl Iterator<Item = &EquationCheck> {
        self.checks.iter().filter(|c| !c.holds())
    }

    pub fn get(&self, name: &str) -> Option<&EquationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn group_passes(&self, group: &str) -> bool {
        self.checks
            .iter()
            .filter(|c| c.group == group)
            .all(EquationCheck::holds)
    }

    fn entry(&mut self, group: &str, name: &str) -> &mut EquationCheck {
        let pos = self
            .checks
            .iter()
            .position(|c| c.group == group && c.name == name);
        let i = match pos {
            Some(i) => i,
            None => {
                self.checks.push(EquationCheck {
                    group: group.into(),
                    name: name.into(),
                    checked: 0,
                    failures: Vec::new(),
                });
                self.checks.len() - 1
            }
        };
        &mut self.checks[i]
    }

    fn touch(&mut self, group: &str, name: &str) {
        self.entry(group, name);
    }

    fn equation(
        &mut self,
        cat: &FinCategory,
        group: &str,
        name: &str,
        at: &str,
        lhs: Option<MorId>,
        rhs: Option<MorId>,
    ) {
        let e = self.entry(group, name);
        e.checked += 1;
        match (lhs, rhs) {
            (Some(a), Some(b)) if a == b => {}
            _ => {
                let show = |x: Option<MorId>| x.map_or("undefined", |m| cat.mor_name(m)).to_string();
                e.failures
                    .push(format!("at {at}: {} vs {}", show(lhs), show(rhs)));
            }
        }
    }

    fn fact(&mut self, group: &str, name: &str, ok: bool, detail: impl FnOnce() -> String) {
        let e = self.entry(group, name);
        e.checked += 1;
        if !ok {
            e.failures.push(detail());
        }
    }

    fn absorb(&mut self, group: &str, name: &str, report: crate::fincat::ValidationReport) {
        let e = self.entry(group, name);
        e.checked += 1;
        e.failures
            .extend(report.violations.into_iter().map(|v| v.to_string()));
    }
}

fn then2(cat: &FinCategory, a: Option<MorId>, b: Option<MorId>) -> Option<MorId> {
    cat.then(a?, b?)
}

fn path(cat: &FinCategory, ms: &[Option<MorId>]) -> Option<MorId> {
    let ms: Option<Vec<MorId>> = ms.iter().copied().collect();
    cat.path(&ms?)
}

/// Certificate for the image of a pullback square under `T`, if it is one.
fn image_cert(cat: &FinCategory, t: &Functor, cert: &PullbackCertificate) -> Option<PullbackCertificate> {
    is_pullback_square(cat, &cert.square.map(t)).ok()?.certificate()
}

/// Additive bundle equations for `(q, z_q, s_q)` over the given `E_2`.
fn additive_bundle(
    cat: &FinCategory,
    report: &mut AxiomReport,
    group: &str,
    q: MorId,
    zq: MorId,
    sq: MorId,
    e2: &PullbackCertificate,
) {
    let m = cat.obj_name(cat.cod(q)).to_string();
    let (pi1, pi2) = (e2.proj_left(), e2.proj_right());
    let id_e = cat.id(cat.dom(q));
    report.equation(cat, group, "z;q = id", &m, cat.then(zq, q), Some(cat.id(cat.cod(q))));
    report.equation(
        cat,
        group,
        "s;q = pi1;q",
        &m,
        cat.then(sq, q),
        cat.then(pi1, q),
    );
    let unit = cat.then(q, zq).and_then(|qz| e2.mediator(id_e, qz));
    report.equation(cat, group, "<id, q;z>;s = id", &m, then2(cat, unit, Some(sq)), Some(id_e));
    let swap = e2.mediator(pi2, pi1);
    report.equation(cat, group, "<pi2, pi1>;s = s", &m, then2(cat, swap, Some(sq)), Some(sq));
    // associativity on generalized elements a, b, c: X -> E over a common point
    let e = cat.dom(q);
    let mut assoc_fail = None;
    let mut checked = 0usize;
    'outer: for x in cat.objects() {
        let elems = cat.hom(x, e);
        for &a in elems {
            let base = cat.then(a, q);
            for &b in elems {
                if cat.then(b, q) != base {
                    continue;
                }
                for &c in elems {
                    if cat.then(c, q) != base {
                        continue;
                    }
                    checked += 1;
                    let ab = then2(cat, e2.mediator(a, b), Some(sq));
                    let lhs = ab.and_then(|ab| e2.mediator(ab, c)).and_then(|u| cat.then(u, sq));
                    let bc = then2(cat, e2.mediator(b, c), Some(sq));
                    let rhs = bc.and_then(|bc| e2.mediator(a, bc)).and_then(|u| cat.then(u, sq));
                    if lhs.is_none() || lhs != rhs {
                        assoc_fail = Some(format!(
                            "at {m}: elements ({}, {}, {}) from {}",
                            cat.mor_name(a),
                            cat.mor_name(b),
                            cat.mor_name(c),
                            cat.obj_name(x)
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    let entry = report.entry(group, "(a+b)+c = a+(b+c)");
    entry.checked += checked.max(1);
    if let Some(f) = assoc_fail {
        entry.failures.push(f);
    }
}

pub const GROUP_STRUCTURE: &str = "structure";
pub const GROUP_ADDITIVE: &str = "(i) additive bundle";
pub const GROUP_WITNESSES: &str = "(ii) T_n witnesses";
pub const GROUP_BUNDLE_MORPHISMS: &str = "(iii) bundle morphisms";
pub const GROUP_INVOLUTION: &str = "(iv) flip involution";
pub const GROUP_LIFT: &str = "(v) lift coherence";
pub const GROUP_UNIVERSALITY: &str = "(vi) universality of the lift";
pub const GROUP_FLIP: &str = "(vii) flip coherence";
pub const GROUP_NEGATIVES: &str = "negatives";

/// The square `(iota, pi1;p, z_M, Tp_M)` of the universality axiom.
pub fn universality_square(cat: &FinCategory, ts: &TangentStructure, m: ObjId) -> Option<Square> {
    let tm = ts.t(m);
    let w = ts.t2(m);
    let timg = image_cert(cat, ts.functor(), w)?;
    let a = cat.then(ts.pi1(m), ts.l(m))?;
    let b = cat.then(ts.pi2(m), ts.z(tm))?;
    let iota = cat.then(timg.mediator(a, b)?, ts.tm(ts.s(m)))?;
    Some(Square {
        top: iota,
        leftv: cat.then(ts.pi1(m), ts.p(m))?,
        rightv: ts.tm(ts.p(m)),
        bottom: ts.z(m),
    })
}

pub fn check_tangent_axioms(cat: &FinCategory, ts: &TangentStructure) -> AxiomReport {
    let mut r = AxiomReport::default();
    let t = ts.functor();
    let id = Functor::identity(cat);
    let tt = t.then(t);

    r.absorb(GROUP_STRUCTURE, "T is a functor", validate_functor(cat, cat, t));
    let functorial = validate_functor(cat, cat, t).is_valid();
    if functorial {
        r.absorb(GROUP_STRUCTURE, "p: T => Id", validate_nat(cat, cat, t, &id, &ts.data.projection));
        r.absorb(GROUP_STRUCTURE, "z: Id => T", validate_nat(cat, cat, &id, t, &ts.data.zero));
        r.absorb(GROUP_STRUCTURE, "l: T => T^2", validate_nat(cat, cat, t, &tt, &ts.data.lift));
        r.absorb(GROUP_STRUCTURE, "c: T^2 => T^2", validate_nat(cat, cat, &tt, &tt, &ts.data.flip));
        match ts.t2_functor(cat) {
            Some(t2) => {
                r.absorb(GROUP_STRUCTURE, "T_2 is a functor", validate_functor(cat, cat, &t2));
                r.absorb(GROUP_STRUCTURE, "s: T_2 => T", validate_nat(cat, cat, &t2, t, &ts.data.sum));
            }
            None => r.fact(GROUP_STRUCTURE, "T_2 is a functor", false, || {
                "some <pi1;Tf, pi2;Tf> has no mediator".into()
            }),
        }
    }

    for m in cat.objects() {
        let at = cat.obj_name(m).to_string();
        let at = at.as_str();
        let tm = ts.t(m);
        let ttm = ts.t(tm);
        let (p, z, s, l, c) = (ts.p(m), ts.z(m), ts.s(m), ts.l(m), ts.c(m));

        // (i)
        additive_bundle(cat, &mut r, GROUP_ADDITIVE, p, z, s, ts.t2(m));

        // (ii)
        for n in 2..=ts.witness_bound() {
            if let Some(np) = ts.tn(m, n) {
                for (i, stage) in np.stages.iter().enumerate() {
                    let v = is_t_pullback(cat, ts.powers(), &stage.square);
                    let ok = matches!(v, Ok(ref v) if v.holds());
                    r.fact(GROUP_WITNESSES, "T_n witnesses are T-pullbacks", ok, || {
                        let why = match v {
                            Ok(v) => v
                                .failure()
                                .map(|f| format!("fails under T^{}: {}", f.k, f.counterexample.describe(cat)))
                                .unwrap_or_default(),
                            Err(e) => e.to_string(),
                        };
                        format!("T_{n} at {at}, stage {}: {why}", i + 1)
                    });
                }
            }
        }

        // (iii) (l, z) and (c, id) are additive bundle morphisms
        let g = GROUP_BUNDLE_MORPHISMS;
        r.equation(cat, g, "l;Tp = p;z", at, cat.then(l, ts.tm(p)), cat.then(p, z));
        r.equation(cat, g, "z;l = z;Tz", at, cat.then(z, l), cat.then(z, ts.tm(z)));
        let t_of_t2 = image_cert(cat, t, ts.t2(m));
        let lhs = t_of_t2
            .as_ref()
            .and_then(|w| w.mediator(cat.then(ts.pi1(m), l)?, cat.then(ts.pi2(m), l)?));
        r.equation(
            cat,
            g,
            "<pi1;l, pi2;l>;Ts = s;l",
            at,
            then2(cat, lhs, Some(ts.tm(s))),
            cat.then(s, l),
        );
        r.equation(cat, g, "c;p_T = Tp", at, cat.then(c, ts.p(tm)), Some(ts.tm(p)));
        r.equation(cat, g, "Tz;c = z_T", at, cat.then(ts.tm(z), c), Some(ts.z(tm)));
        let (tpi1, tpi2) = (ts.tm(ts.pi1(m)), ts.tm(ts.pi2(m)));
        let pairing = cat
            .then(tpi1, c)
            .zip(cat.then(tpi2, c))
            .and_then(|(a, b)| ts.pair(tm, a, b));
        r.equation(
            cat,
            g,
            "<Tpi1;c, Tpi2;c>;s_T = Ts;c",
            at,
            then2(cat, pairing, Some(ts.s(tm))),
            cat.then(ts.tm(s), c),
        );

        // (iv)
        let g = GROUP_INVOLUTION;
        r.equation(cat, g, "c;c = id", at, cat.then(c, c), Some(cat.id(ttm)));
        r.equation(cat, g, "l;c = l", at, cat.then(l, c), Some(l));

        // (v)
        r.equation(
            cat,
            GROUP_LIFT,
            "l;Tl = l;l_T",
            at,
            cat.then(l, ts.tm(l)),
            cat.then(l, ts.l(tm)),
        );

        // (vi)
        let g = GROUP_UNIVERSALITY;
        match universality_square(cat, ts, m) {
            Some(sq) => {
                let v = is_t_pullback(cat, ts.powers(), &sq);
                let ok = matches!(v, Ok(ref v) if v.holds());
                r.fact(g, "(iota, pi1;p, z, Tp) is a T-pullback", ok, || {
                    let why = match v {
                        Ok(v) => v
                            .failure()
                            .map(|f| format!("fails under T^{}: {}", f.k, f.counterexample.describe(cat)))
                            .unwrap_or_default(),
                        Err(e) => e.to_string(),
                    };
                    format!("at {at}: {why}")
                });
            }
            None => r.fact(g, "(iota, pi1;p, z, Tp) is a T-pullback", false, || {
                format!("at {at}: iota = <pi1;l, pi2;z_T>;Ts is undefined")
            }),
        }

        // (vii)
        let g = GROUP_FLIP;
        let (c_t, tc) = (ts.c(tm), ts.tm(c));
        r.equation(
            cat,
            g,
            "c_T;Tc;c_T = Tc;c_T;Tc",
            at,
            cat.path(&[c_t, tc, c_t]),
            cat.path(&[tc, c_t, tc]),
        );
        r.equation(
            cat,
            g,
            "l_T;Tc;c_T = c;Tl",
            at,
            path(cat, &[Some(ts.l(tm)), Some(tc), Some(c_t)]),
            cat.then(c, ts.tm(l)),
        );
    }
    for g in [
        GROUP_STRUCTURE,
        GROUP_ADDITIVE,
        GROUP_WITNESSES,
        GROUP_BUNDLE_MORPHISMS,
        GROUP_INVOLUTION,
        GROUP_LIFT,
        GROUP_UNIVERSALITY,
        GROUP_FLIP,
    ] {
        if !r.checks.iter().any(|c| c.group == g) {
            r.touch(g, "vacuous");
        }
    }
    r
}

pub fn check_negatives(cat: &FinCategory, ts: &TangentStructure) -> Result<AxiomReport, TangentError> {
    let n = ts.data.negation.as_ref().ok_or(TangentError::NoNegation)?;
    let mut r = AxiomReport::default();
    let t = ts.functor();
    r.absorb(GROUP_NEGATIVES, "n: T => T", validate_nat(cat, cat, t, t, n));
    for m in cat.objects() {
        let at = cat.obj_name(m).to_string();
        let tm = ts.t(m);
        let pair = ts.pair(m, n.at(m), cat.id(tm));
        r.equation(
            cat,
            GROUP_NEGATIVES,
            "<n, id>;s = p;z",
            &at,
            then2(cat, pair, Some(ts.s(m))),
            cat.then(ts.p(m), ts.z(m)),
        );
    }
    Ok(r)
}

/// `(q, z_q, s_q, l_q)` with the certified `E_2` that `s_q` lives on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialBundleData {
    pub q: MorId,
    pub zero: MorId,
    pub sum: MorId,
    pub lift: MorId,
    pub e2: PullbackCertificate,
}

impl DifferentialBundleData {
    /// The tangent bundle `p_M` with the structure's own data.
    pub fn tangent_bundle(ts: &TangentStructure, m: ObjId) -> Self {
        Self {
            q: ts.p(m),
            zero: ts.z(m),
            sum: ts.s(m),
            lift: ts.l(m),
            e2: ts.t2(m).clone(),
        }
    }
}

pub const GROUP_DB_ADDITIVE: &str = "additive bundle";
pub const GROUP_DB_1: &str = "1: (l_q, z) bundle morphism to T";
pub const GROUP_DB_2: &str = "2: (l_q, z_q) bundle morphism to p";
pub const GROUP_DB_3: &str = "3: universality of l_q";
pub const GROUP_DB_4: &str = "4: l_q compatible with l";

/// `iota_q = <pi1;l_q, pi2;z_E>;T(s_q)` and its universality square.
pub fn bundle_universality_square(
    cat: &FinCategory,
    ts: &TangentStructure,
    db: &DifferentialBundleData,
) -> Option<Square> {
    let e = cat.dom(db.q);
    let m = cat.cod(db.q);
    let timg = image_cert(cat, ts.functor(), &db.e2)?;
    let a = cat.then(db.e2.proj_left(), db.lift)?;
    let b = cat.then(db.e2.proj_right(), ts.z(e))?;
    let iota = cat.then(timg.mediator(a, b)?, ts.tm(db.sum))?;
    Some(Square {
        top: iota,
        leftv: cat.then(db.e2.proj_left(), db.q)?,
        rightv: ts.tm(db.q),
        bottom: ts.z(m),
    })
}

pub fn check_differential_bundle(
    cat: &FinCategory,
    ts: &TangentStructure,
    db: &DifferentialBundleData,
) -> Result<AxiomReport, TangentError> {
    let q = db.q;
    let sq = db.e2.square;
    if sq.bottom != q || sq.rightv != q {
        return Err(TangentError::BadBundleWitness(cat.mor_name(q).into()));
    }
    if !matches!(is_pullback_square(cat, &sq), Ok(v) if v.holds()) {
        return Err(TangentError::BadBundleWitness(cat.mor_name(q).into()));
    }
    let mut r = AxiomReport::default();
    let e = cat.dom(q);
    let m = cat.cod(q);
    let at = cat.mor_name(q).to_string();
    let at = at.as_str();
    let (zq, sq_, lq) = (db.zero, db.sum, db.lift);
    let (pi1, pi2) = (db.e2.proj_left(), db.e2.proj_right());

    additive_bundle(cat, &mut r, GROUP_DB_ADDITIVE, q, zq, sq_, &db.e2);

    let g = GROUP_DB_1;
    r.equation(cat, g, "l_q;Tq = q;z", at, cat.then(lq, ts.tm(q)), cat.then(q, ts.z(m)));
    r.equation(cat, g, "z_q;l_q = z;Tz_q", at, cat.then(zq, lq), cat.then(ts.z(m), ts.tm(zq)));
    let t_e2 = image_cert(cat, ts.functor(), &db.e2);
    let pairing = t_e2
        .as_ref()
        .and_then(|w| w.mediator(cat.then(pi1, lq)?, cat.then(pi2, lq)?));
    r.equation(
        cat,
        g,
        "<pi1;l_q, pi2;l_q>;Ts_q = s_q;l_q",
        at,
        then2(cat, pairing, Some(ts.tm(sq_))),
        cat.then(sq_, lq),
    );

    let g = GROUP_DB_2;
    r.equation(cat, g, "l_q;p = q;z_q", at, cat.then(lq, ts.p(e)), cat.then(q, zq));
    r.equation(cat, g, "z_q;l_q = z_q;z", at, cat.then(zq, lq), cat.then(zq, ts.z(e)));
    let pairing = cat
        .then(pi1, lq)
        .zip(cat.then(pi2, lq))
        .and_then(|(a, b)| ts.pair(e, a, b));
    r.equation(
        cat,
        g,
        "<pi1;l_q, pi2;l_q>;s = s_q;l_q",
        at,
        then2(cat, pairing, Some(ts.s(e))),
        cat.then(sq_, lq),
    );

    let g = GROUP_DB_3;
    let name = "(iota_q, pi1;q, z, Tq) is a T-pullback";
    match bundle_universality_square(cat, ts, db) {
        Some(sq) => {
            let v = is_t_pullback(cat, ts.powers(), &sq);
            let ok = matches!(v, Ok(ref v) if v.holds());
            r.fact(g, name, ok, || match v {
                Ok(v) => v
                    .failure()
                    .map(|f| format!("at {at}: fails under T^{}: {}", f.k, f.counterexample.describe(cat)))
                    .unwrap_or_default(),
                Err(e) => format!("at {at}: {e}"),
            });
        }
        None => r.fact(g, name, false, || format!("at {at}: iota_q is undefined")),
    }

    r.equation(
        cat,
        GROUP_DB_4,
        "l_q;l = l_q;Tl_q",
        at,
        cat.then(lq, ts.l(e)),
        cat.then(lq, ts.tm(lq)),
    );
    Ok(r)
}

/// Pullback of `Tq` along `z_M`, with `M` the codomain of `q`.
pub fn compute_vertical_bundle(
    cat: &FinCategory,
    ts: &TangentStructure,
    q: MorId,
) -> Option<(ObjId, PullbackCertificate)> {
    let cert = compute_pullback(
        cat,
        Cospan {
            left: ts.z(cat.cod(q)),
            right: ts.tm(q),
        },
    )?;
    Some((cert.apex(cat), cert))
}

/// Convenience: the mediator of a cone, when the certificate lists it.
pub fn mediate(cert: &PullbackCertificate, left: MorId, right: MorId) -> Option<MorId> {
    cert.mediators.get(&Cone { left, right }).copied()
}

/// Hand-built tangent structures.
pub mod samples {
    use super::*;
    use crate::fincat::samples::*;

    /// ℤ/2 with identity functor and p = z = l = g, s = c = n = 1.
    pub fn z2_central() -> (FinCategory, TangentStructure) {
        let c = z2();
        let g = c.morphism_named("g").unwrap();
        let one = c.morphism_named("1").unwrap();
        let id = Functor::identity(&c);
        let data = TangentData {
            functor: id,
            projection: NatTransformation::new(alloc::vec![g]),
            zero: NatTransformation::new(alloc::vec![g]),
            sum: NatTransformation::new(alloc::vec![one]),
            lift: NatTransformation::new(alloc::vec![g]),
            flip: NatTransformation::new(alloc::vec![one]),
            negation: Some(NatTransformation::new(alloc::vec![one])),
        };
        let ts = TangentStructure::new(&c, data, &BTreeMap::new(), 2).unwrap();
        (c, ts)
    }
}
