//! Finite categories stored as explicit tables.
//!
//! Objects and morphisms are dense indices into name tables, so identifier
//! equality is index equality. Composition is kept in diagrammatic order:
//! `then(f, g)` is "first `f`, then `g`" and is defined exactly when
//! `cod f = dom g` (for a valid table).
//!
//! Nothing in this module assumes the table is lawful; [`validate_category`]
//! reports every broken cell. Operations elsewhere in the crate assume a
//! category that validates cleanly.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Object identifier, local to one [`FinCategory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub u32);

/// Morphism identifier, local to one [`FinCategory`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorId(pub u32);

impl ObjId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl MorId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("duplicate object identifier `{0}`")]
    DuplicateObject(String),
    #[error("duplicate morphism identifier `{0}`")]
    DuplicateMorphism(String),
    #[error("unknown object index {0}")]
    UnknownObject(u32),
    #[error("unknown morphism index {0}")]
    UnknownMorphism(u32),
    #[error("conflicting composite for then({f}, {g}): `{first}` vs `{second}`")]
    ConflictingComposite {
        f: String,
        g: String,
        first: String,
        second: String,
    },
    #[error("object `{0}` already has an identity")]
    DuplicateIdentity(String),
}

/// A category given by finite tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCategory {
    obj_names: Vec<String>,
    mor_names: Vec<String>,
    dom: Vec<ObjId>,
    cod: Vec<ObjId>,
    identity: Vec<MorId>,
    // row-major: compose[f * |mor| + g]
    compose: Vec<Option<MorId>>,
    // hom[a * |obj| + b], ascending MorId
    hom: Vec<Vec<MorId>>,
    obj_lookup: BTreeMap<String, ObjId>,
    mor_lookup: BTreeMap<String, MorId>,
}

impl FinCategory {
    pub fn empty() -> Self {
        CategoryBuilder::new().build()
    }

    pub fn object_count(&self) -> usize {
        self.obj_names.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.mor_names.len()
    }

    pub fn objects(&self) -> impl DoubleEndedIterator<Item = ObjId> + ExactSizeIterator + Clone {
        (0..self.obj_names.len() as u32).map(ObjId)
    }

    pub fn morphisms(&self) -> impl DoubleEndedIterator<Item = MorId> + ExactSizeIterator + Clone {
        (0..self.mor_names.len() as u32).map(MorId)
    }

    /// Objects ordered by identifier string.
    pub fn objects_by_name(&self) -> Vec<ObjId> {
        self.obj_lookup.values().copied().collect()
    }

    /// Morphisms ordered by identifier string.
    pub fn morphisms_by_name(&self) -> Vec<MorId> {
        self.mor_lookup.values().copied().collect()
    }

    pub fn obj_name(&self, o: ObjId) -> &str {
        &self.obj_names[o.index()]
    }

    pub fn mor_name(&self, m: MorId) -> &str {
        &self.mor_names[m.index()]
    }

    pub fn object_named(&self, name: &str) -> Option<ObjId> {
        self.obj_lookup.get(name).copied()
    }

    pub fn morphism_named(&self, name: &str) -> Option<MorId> {
        self.mor_lookup.get(name).copied()
    }

    pub fn dom(&self, m: MorId) -> ObjId {
        self.dom[m.index()]
    }

    pub fn cod(&self, m: MorId) -> ObjId {
        self.cod[m.index()]
    }

    pub fn id(&self, o: ObjId) -> MorId {
        self.identity[o.index()]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identity[self.dom(m).index()] == m
    }

    pub fn is_endo(&self, m: MorId) -> bool {
        self.dom(m) == self.cod(m)
    }

    /// `f ; g`, if the table defines it.
    #[inline]
    pub fn then(&self, f: MorId, g: MorId) -> Option<MorId> {
        self.compose[f.index() * self.mor_names.len() + g.index()]
    }

    /// Composite of a nonempty path, read left to right.
    pub fn path(&self, path: &[MorId]) -> Option<MorId> {
        let (&first, rest) = path.split_first()?;
        rest.iter().try_fold(first, |acc, &m| self.then(acc, m))
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> &[MorId] {
        &self.hom[a.index() * self.obj_names.len() + b.index()]
    }

    pub fn into_object(&self, b: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.objects().flat_map(move |a| self.hom(a, b).iter().copied())
    }

    pub fn out_of_object(&self, a: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.objects().flat_map(move |b| self.hom(a, b).iter().copied())
    }

    /// Describe a morphism as `name: A -> B`.
    pub fn describe(&self, m: MorId) -> String {
        format!(
            "{}: {} -> {}",
            self.mor_name(m),
            self.obj_name(self.dom(m)),
            self.obj_name(self.cod(m))
        )
    }
}

/// Incremental construction of a [`FinCategory`].
///
/// Identities that are not designated explicitly are minted as `id_<obj>`,
/// and composites with identities are filled in where the table is silent.
/// The builder does not check the category laws.
#[derive(Clone, Debug, Default)]
pub struct CategoryBuilder {
    objs: Vec<String>,
    mors: Vec<(String, ObjId, ObjId)>,
    identities: BTreeMap<ObjId, MorId>,
    compose: BTreeMap<(MorId, MorId), MorId>,
    obj_lookup: BTreeMap<String, ObjId>,
    mor_lookup: BTreeMap<String, MorId>,
}

impl CategoryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(&mut self, name: &str) -> Result<ObjId, BuildError> {
        if self.obj_lookup.contains_key(name) {
            return Err(BuildError::DuplicateObject(name.to_string()));
        }
        let id = ObjId(self.objs.len() as u32);
        self.objs.push(name.to_string());
        self.obj_lookup.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn morphism(&mut self, name: &str, dom: ObjId, cod: ObjId) -> Result<MorId, BuildError> {
        if self.mor_lookup.contains_key(name) {
            return Err(BuildError::DuplicateMorphism(name.to_string()));
        }
        for o in [dom, cod] {
            if o.index() >= self.objs.len() {
                return Err(BuildError::UnknownObject(o.0));
            }
        }
        let id = MorId(self.mors.len() as u32);
        self.mors.push((name.to_string(), dom, cod));
        self.mor_lookup.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn object_named(&self, name: &str) -> Option<ObjId> {
        self.obj_lookup.get(name).copied()
    }

    pub fn morphism_named(&self, name: &str) -> Option<MorId> {
        self.mor_lookup.get(name).copied()
    }

    pub fn dom(&self, m: MorId) -> ObjId {
        self.mors[m.index()].1
    }

    pub fn cod(&self, m: MorId) -> ObjId {
        self.mors[m.index()].2
    }

    /// Designate an existing morphism as the identity of `obj`.
    pub fn identity(&mut self, obj: ObjId, mor: MorId) -> Result<(), BuildError> {
        self.check_mor(mor)?;
        if obj.index() >= self.objs.len() {
            return Err(BuildError::UnknownObject(obj.0));
        }
        if self.identities.contains_key(&obj) {
            return Err(BuildError::DuplicateIdentity(self.objs[obj.index()].clone()));
        }
        self.identities.insert(obj, mor);
        Ok(())
    }

    /// Record `then(f, g) = h`.
    pub fn then(&mut self, f: MorId, g: MorId, h: MorId) -> Result<(), BuildError> {
        for m in [f, g, h] {
            self.check_mor(m)?;
        }
        if let Some(&prev) = self.compose.get(&(f, g)) {
            if prev != h {
                return Err(BuildError::ConflictingComposite {
                    f: self.mors[f.index()].0.clone(),
                    g: self.mors[g.index()].0.clone(),
                    first: self.mors[prev.index()].0.clone(),
                    second: self.mors[h.index()].0.clone(),
                });
            }
        }
        self.compose.insert((f, g), h);
        Ok(())
    }

    fn check_mor(&self, m: MorId) -> Result<(), BuildError> {
        if m.index() >= self.mors.len() {
            Err(BuildError::UnknownMorphism(m.0))
        } else {
            Ok(())
        }
    }

    pub fn build(mut self) -> FinCategory {
        for o in 0..self.objs.len() {
            let o = ObjId(o as u32);
            if self.identities.contains_key(&o) {
                continue;
            }
            let mut name = format!("id_{}", self.objs[o.index()]);
            while self.mor_lookup.contains_key(&name) {
                name.push('\'');
            }
            let m = self
                .morphism(&name, o, o)
                .expect("minted identity name is fresh");
            self.identities.insert(o, m);
        }
        for (idx, &(_, d, c)) in self.mors.iter().enumerate() {
            let f = MorId(idx as u32);
            let id_d = self.identities[&d];
            let id_c = self.identities[&c];
            self.compose.entry((id_d, f)).or_insert(f);
            self.compose.entry((f, id_c)).or_insert(f);
        }
        let n_obj = self.objs.len();
        let n_mor = self.mors.len();
        let mut compose = vec![None; n_mor * n_mor];
        for (&(f, g), &h) in &self.compose {
            compose[f.index() * n_mor + g.index()] = Some(h);
        }
        let mut hom = vec![Vec::new(); n_obj * n_obj];
        for (idx, &(_, d, c)) in self.mors.iter().enumerate() {
            hom[d.index() * n_obj + c.index()].push(MorId(idx as u32));
        }
        let identity = (0..n_obj)
            .map(|o| self.identities[&ObjId(o as u32)])
            .collect();
        FinCategory {
            obj_names: self.objs,
            dom: self.mors.iter().map(|m| m.1).collect(),
            cod: self.mors.iter().map(|m| m.2).collect(),
            mor_names: self.mors.into_iter().map(|m| m.0).collect(),
            identity,
            compose,
            hom,
            obj_lookup: self.obj_lookup,
            mor_lookup: self.mor_lookup,
        }
    }
}

/// Produces identifiers that do not collide with ones already handed out.
#[derive(Clone, Debug, Default)]
pub struct NameMinter {
    used: BTreeSet<String>,
}

impl NameMinter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mint(&mut self, base: &str) -> String {
        let mut name = base.to_string();
        while self.used.contains(&name) {
            name.push('\'');
        }
        self.used.insert(name.clone());
        name
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    /// A composite exists but has the wrong domain or codomain.
    Typing,
    MissingComposite,
    /// A composite is recorded for a pair that is not composable.
    SpuriousComposite,
    IdentityTyping,
    LeftIdentity,
    RightIdentity,
    Associativity,
    FunctorTyping,
    FunctorIdentity,
    FunctorComposition,
    ComponentTyping,
    Naturality,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.detail)
    }
}

/// Every violated cell found by a validation pass; empty iff valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    fn push(&mut self, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { kind, detail });
    }
}

pub fn validate_category(cat: &FinCategory) -> ValidationReport {
    let mut report = ValidationReport::default();
    for o in cat.objects() {
        let i = cat.id(o);
        if cat.dom(i) != o || cat.cod(i) != o {
            report.push(
                ViolationKind::IdentityTyping,
                format!("identity of {} is {}", cat.obj_name(o), cat.describe(i)),
            );
        }
    }
    // composites whose typing is already reported are skipped below
    let mut bad = BTreeSet::new();
    for f in cat.morphisms() {
        for g in cat.morphisms() {
            let composable = cat.cod(f) == cat.dom(g);
            match (composable, cat.then(f, g)) {
                (true, None) => {
                    bad.insert((f, g));
                    report.push(
                        ViolationKind::MissingComposite,
                        format!("then({}, {}) undefined", cat.mor_name(f), cat.mor_name(g)),
                    );
                }
                (false, Some(h)) => {
                    bad.insert((f, g));
                    report.push(
                        ViolationKind::SpuriousComposite,
                        format!(
                            "then({}, {}) = {} but {} does not end where {} starts",
                            cat.mor_name(f),
                            cat.mor_name(g),
                            cat.mor_name(h),
                            cat.mor_name(f),
                            cat.mor_name(g)
                        ),
                    );
                }
                (true, Some(h)) => {
                    if cat.dom(h) != cat.dom(f) || cat.cod(h) != cat.cod(g) {
                        bad.insert((f, g));
                        report.push(
                            ViolationKind::Typing,
                            format!(
                                "then({}, {}) = {} should run {} -> {}",
                                cat.mor_name(f),
                                cat.mor_name(g),
                                cat.describe(h),
                                cat.obj_name(cat.dom(f)),
                                cat.obj_name(cat.cod(g))
                            ),
                        );
                    }
                }
                (false, None) => {}
            }
        }
    }
    for f in cat.morphisms() {
        let left = cat.then(cat.id(cat.dom(f)), f);
        if !bad.contains(&(cat.id(cat.dom(f)), f)) && left != Some(f) {
            report.push(
                ViolationKind::LeftIdentity,
                format!("then(id, {}) != {}", cat.mor_name(f), cat.mor_name(f)),
            );
        }
        let right = cat.then(f, cat.id(cat.cod(f)));
        if !bad.contains(&(f, cat.id(cat.cod(f)))) && right != Some(f) {
            report.push(
                ViolationKind::RightIdentity,
                format!("then({}, id) != {}", cat.mor_name(f), cat.mor_name(f)),
            );
        }
    }
    let good = |f: MorId, g: MorId| {
        if bad.contains(&(f, g)) {
            None
        } else {
            cat.then(f, g)
        }
    };
    for f in cat.morphisms() {
        for g in cat.out_of_object(cat.cod(f)) {
            let Some(fg) = good(f, g) else { continue };
            for h in cat.out_of_object(cat.cod(g)) {
                let Some(gh) = good(g, h) else { continue };
                let (Some(l), Some(r)) = (good(fg, h), good(f, gh)) else {
                    continue;
                };
                if l != r {
                    report.push(
                        ViolationKind::Associativity,
                        format!(
                            "({} ; {}) ; {} = {} but {} ; ({} ; {}) = {}",
                            cat.mor_name(f),
                            cat.mor_name(g),
                            cat.mor_name(h),
                            cat.mor_name(l),
                            cat.mor_name(f),
                            cat.mor_name(g),
                            cat.mor_name(h),
                            cat.mor_name(r)
                        ),
                    );
                }
            }
        }
    }
    report
}

/// A functor between finite categories, as object and morphism tables.
///
/// The source and target categories are supplied by the caller wherever they
/// matter; the tables themselves are plain data so that endofunctor powers
/// can be compared and hashed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Functor {
    obj_map: Vec<ObjId>,
    mor_map: Vec<MorId>,
}

impl Functor {
    pub fn new(obj_map: Vec<ObjId>, mor_map: Vec<MorId>) -> Self {
        Self { obj_map, mor_map }
    }

    pub fn identity(cat: &FinCategory) -> Self {
        Self {
            obj_map: cat.objects().collect(),
            mor_map: cat.morphisms().collect(),
        }
    }

    #[inline]
    pub fn obj(&self, o: ObjId) -> ObjId {
        self.obj_map[o.index()]
    }

    #[inline]
    pub fn mor(&self, m: MorId) -> MorId {
        self.mor_map[m.index()]
    }

    pub fn obj_map(&self) -> &[ObjId] {
        &self.obj_map
    }

    pub fn mor_map(&self) -> &[MorId] {
        &self.mor_map
    }

    /// Apply `self` first, then `next`.
    pub fn then(&self, next: &Functor) -> Functor {
        Functor {
            obj_map: self.obj_map.iter().map(|&o| next.obj(o)).collect(),
            mor_map: self.mor_map.iter().map(|&m| next.mor(m)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.obj_map.iter().enumerate().all(|(i, o)| o.index() == i)
            && self.mor_map.iter().enumerate().all(|(i, m)| m.index() == i)
    }

    /// `F^n` for an endofunctor; `F^0` is the identity.
    pub fn iterate(&self, n: usize) -> Functor {
        let mut out = Functor {
            obj_map: (0..self.obj_map.len() as u32).map(ObjId).collect(),
            mor_map: (0..self.mor_map.len() as u32).map(MorId).collect(),
        };
        for _ in 0..n {
            out = out.then(self);
        }
        out
    }
}

pub fn validate_functor(src: &FinCategory, tgt: &FinCategory, f: &Functor) -> ValidationReport {
    let mut report = ValidationReport::default();
    if f.obj_map.len() != src.object_count() || f.mor_map.len() != src.morphism_count() {
        report.push(
            ViolationKind::FunctorTyping,
            format!(
                "tables cover {} objects / {} morphisms, source has {} / {}",
                f.obj_map.len(),
                f.mor_map.len(),
                src.object_count(),
                src.morphism_count()
            ),
        );
        return report;
    }
    if f.obj_map.iter().any(|o| o.index() >= tgt.object_count())
        || f.mor_map.iter().any(|m| m.index() >= tgt.morphism_count())
    {
        report.push(
            ViolationKind::FunctorTyping,
            "image outside the target category".into(),
        );
        return report;
    }
    for m in src.morphisms() {
        let fm = f.mor(m);
        if tgt.dom(fm) != f.obj(src.dom(m)) || tgt.cod(fm) != f.obj(src.cod(m)) {
            report.push(
                ViolationKind::FunctorTyping,
                format!(
                    "F({}) = {} but F sends the ends to {} -> {}",
                    src.describe(m),
                    tgt.describe(fm),
                    tgt.obj_name(f.obj(src.dom(m))),
                    tgt.obj_name(f.obj(src.cod(m)))
                ),
            );
        }
    }
    for o in src.objects() {
        if f.mor(src.id(o)) != tgt.id(f.obj(o)) {
            report.push(
                ViolationKind::FunctorIdentity,
                format!(
                    "F(id {}) = {} is not id {}",
                    src.obj_name(o),
                    tgt.mor_name(f.mor(src.id(o))),
                    tgt.obj_name(f.obj(o))
                ),
            );
        }
    }
    for a in src.morphisms() {
        for b in src.out_of_object(src.cod(a)) {
            let Some(ab) = src.then(a, b) else { continue };
            let image = tgt.then(f.mor(a), f.mor(b));
            if image != Some(f.mor(ab)) {
                report.push(
                    ViolationKind::FunctorComposition,
                    format!(
                        "F({} ; {}) = {} but F({}) ; F({}) = {}",
                        src.mor_name(a),
                        src.mor_name(b),
                        tgt.mor_name(f.mor(ab)),
                        src.mor_name(a),
                        src.mor_name(b),
                        image.map_or("undefined", |m| tgt.mor_name(m))
                    ),
                );
            }
        }
    }
    report
}

/// A natural transformation, one component per source object.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NatTransformation {
    components: Vec<MorId>,
}

impl NatTransformation {
    pub fn new(components: Vec<MorId>) -> Self {
        Self { components }
    }

    pub fn identity_on(f: &Functor, tgt: &FinCategory) -> Self {
        Self {
            components: f.obj_map.iter().map(|&o| tgt.id(o)).collect(),
        }
    }

    #[inline]
    pub fn at(&self, o: ObjId) -> MorId {
        self.components[o.index()]
    }

    pub fn components(&self) -> &[MorId] {
        &self.components
    }
}

/// Check that `alpha: source => target` is well typed and natural.
pub fn validate_nat(
    src: &FinCategory,
    tgt: &FinCategory,
    source: &Functor,
    target: &Functor,
    alpha: &NatTransformation,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    if alpha.components.len() != src.object_count() {
        report.push(
            ViolationKind::ComponentTyping,
            format!(
                "{} components for {} objects",
                alpha.components.len(),
                src.object_count()
            ),
        );
        return report;
    }
    let mut typed = true;
    for o in src.objects() {
        let c = alpha.at(o);
        if c.index() >= tgt.morphism_count()
            || tgt.dom(c) != source.obj(o)
            || tgt.cod(c) != target.obj(o)
        {
            typed = false;
            report.push(
                ViolationKind::ComponentTyping,
                format!(
                    "component at {} should run {} -> {}",
                    src.obj_name(o),
                    tgt.obj_name(source.obj(o)),
                    tgt.obj_name(target.obj(o))
                ),
            );
        }
    }
    if !typed {
        return report;
    }
    for m in src.morphisms() {
        let lhs = tgt.then(alpha.at(src.dom(m)), target.mor(m));
        let rhs = tgt.then(source.mor(m), alpha.at(src.cod(m)));
        if lhs.is_none() || lhs != rhs {
            report.push(
                ViolationKind::Naturality,
                format!("naturality square at {} does not commute", src.describe(m)),
            );
        }
    }
    report
}

/// Eventual periodicity of the powers of an endofunctor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FunctorOrbit {
    pub preperiod: usize,
    pub period: usize,
}

impl FunctorOrbit {
    /// Number of distinct powers: `F^0 .. F^(preperiod + period - 1)`.
    pub fn bound(&self) -> usize {
        self.preperiod + self.period
    }

    /// The exponent in `0..bound()` whose power equals `F^k`.
    pub fn reduce(&self, k: usize) -> usize {
        if k < self.preperiod {
            k
        } else {
            self.preperiod + (k - self.preperiod) % self.period
        }
    }
}

/// The distinct powers of an endofunctor, with its orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorPowers {
    orbit: FunctorOrbit,
    powers: Vec<Functor>,
}

impl FunctorPowers {
    pub fn new(f: &Functor) -> Self {
        let mut seen: BTreeMap<Functor, usize> = BTreeMap::new();
        let mut powers = Vec::new();
        let mut current = f.iterate(0);
        loop {
            if let Some(&first) = seen.get(&current) {
                let orbit = FunctorOrbit {
                    preperiod: first,
                    period: powers.len() - first,
                };
                return Self { orbit, powers };
            }
            seen.insert(current.clone(), powers.len());
            let next = current.then(f);
            powers.push(current);
            current = next;
        }
    }

    pub fn orbit(&self) -> FunctorOrbit {
        self.orbit
    }

    pub fn bound(&self) -> usize {
        self.orbit.bound()
    }

    pub fn power(&self, k: usize) -> &Functor {
        &self.powers[self.orbit.reduce(k)]
    }

    pub fn functor(&self) -> &Functor {
        self.power(1)
    }
}

pub fn iterate_functor(f: &Functor, n: usize) -> Functor {
    f.iterate(n)
}

pub fn functor_orbit(f: &Functor) -> FunctorOrbit {
    FunctorPowers::new(f).orbit()
}

/// A pair of distinct morphisms that `f` fails to tell apart, if any.
pub fn mono_counterexample(cat: &FinCategory, f: MorId) -> Option<(MorId, MorId)> {
    let d = cat.dom(f);
    for x in cat.objects() {
        let maps = cat.hom(x, d);
        for (i, &a) in maps.iter().enumerate() {
            for &b in &maps[i + 1..] {
                if cat.then(a, f) == cat.then(b, f) {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

pub fn is_mono(cat: &FinCategory, f: MorId) -> bool {
    mono_counterexample(cat, f).is_none()
}

pub fn enumerate_monos(cat: &FinCategory) -> BTreeSet<MorId> {
    cat.morphisms().filter(|&f| is_mono(cat, f)).collect()
}

/// A two-sided inverse of `f`, if one exists.
pub fn inverse(cat: &FinCategory, f: MorId) -> Option<MorId> {
    cat.hom(cat.cod(f), cat.dom(f)).iter().copied().find(|&g| {
        cat.then(f, g) == Some(cat.id(cat.dom(f))) && cat.then(g, f) == Some(cat.id(cat.cod(f)))
    })
}

pub fn is_iso(cat: &FinCategory, f: MorId) -> bool {
    inverse(cat, f).is_some()
}

/// Section-retraction pair `(s: E -> P, r: P -> E)` with `s ; r = id_E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RetractPair {
    pub section: MorId,
    pub retraction: MorId,
}

/// All section-retraction pairs exhibiting some object as a retract of `target`.
pub fn enumerate_retract_pairs(cat: &FinCategory, target: ObjId) -> BTreeSet<RetractPair> {
    let mut out = BTreeSet::new();
    for e in cat.objects() {
        for &s in cat.hom(e, target) {
            for &r in cat.hom(target, e) {
                if cat.then(s, r) == Some(cat.id(e)) {
                    out.insert(RetractPair {
                        section: s,
                        retraction: r,
                    });
                }
            }
        }
    }
    out
}

pub fn is_idempotent(cat: &FinCategory, e: MorId) -> bool {
    cat.is_endo(e) && cat.then(e, e) == Some(e)
}

pub fn enumerate_idempotents(cat: &FinCategory) -> BTreeSet<MorId> {
    cat.morphisms().filter(|&e| is_idempotent(cat, e)).collect()
}

/// A splitting `r ; s = e` with `s ; r = id`, where `s` is the section.
pub fn split_idempotent(cat: &FinCategory, e: MorId) -> Option<RetractPair> {
    let p = cat.dom(e);
    enumerate_retract_pairs(cat, p)
        .into_iter()
        .find(|pair| cat.then(pair.retraction, pair.section) == Some(e))
}

/// Small categories used throughout the tests and examples.
pub mod samples {
    use super::*;

    pub fn poset(objects: &[&str], relations: &[(&str, &str)]) -> FinCategory {
        // relations must already be transitively closed
        let mut b = CategoryBuilder::new();
        for o in objects {
            b.object(o).unwrap();
        }
        let mut arrows = BTreeMap::new();
        for &(x, y) in relations {
            let m = b
                .morphism(
                    &format!("{x}<{y}"),
                    b.object_named(x).unwrap(),
                    b.object_named(y).unwrap(),
                )
                .unwrap();
            arrows.insert((x.to_string(), y.to_string()), m);
        }
        for ((x, y), &f) in &arrows {
            for ((y2, z), &g) in &arrows {
                if y == y2 {
                    let h = arrows[&(x.clone(), z.clone())];
                    b.then(f, g, h).unwrap();
                }
            }
        }
        b.build()
    }

    pub fn diamond() -> FinCategory {
        poset(
            &["bot", "a", "b", "top"],
            &[("bot", "a"), ("bot", "b"), ("bot", "top"), ("a", "top"), ("b", "top")],
        )
    }

    pub fn vee() -> FinCategory {
        poset(&["a", "b", "c"], &[("a", "c"), ("b", "c")])
    }

    /// One-object monoid with the given elements; `mul(x, y)` is `x ; y`.
    pub fn monoid(elements: &[&str], mul: impl Fn(usize, usize) -> usize) -> FinCategory {
        let mut b = CategoryBuilder::new();
        let o = b.object("*").unwrap();
        let ms: Vec<_> = elements
            .iter()
            .map(|e| b.morphism(e, o, o).unwrap())
            .collect();
        b.identity(o, ms[0]).unwrap();
        for i in 0..ms.len() {
            for j in 0..ms.len() {
                b.then(ms[i], ms[j], ms[mul(i, j)]).unwrap();
            }
        }
        b.build()
    }

    pub fn z2() -> FinCategory {
        monoid(&["1", "g"], |i, j| (i + j) % 2)
    }

    pub fn idempotent_monoid() -> FinCategory {
        monoid(&["1", "e"], |i, j| i.max(j))
    }

    pub fn discrete(names: &[&str]) -> FinCategory {
        let mut b = CategoryBuilder::new();
        for n in names {
            b.object(n).unwrap();
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;

    #[test]
    fn diamond_is_valid() {
        let c = diamond();
        assert_eq!(c.object_count(), 4);
        assert_eq!(c.morphism_count(), 9);
        assert!(validate_category(&c).is_valid());
    }

    #[test]
    fn z2_is_valid() {
        assert!(validate_category(&z2()).is_valid());
    }

    #[test]
    fn empty_category_is_valid() {
        let c = FinCategory::empty();
        assert!(validate_category(&c).is_valid());
        assert!(enumerate_monos(&c).is_empty());
        assert!(enumerate_idempotents(&c).is_empty());
    }

    #[test]
    fn wrong_codomain_is_one_typing_violation() {
        let mut b = CategoryBuilder::new();
        let x = b.object("A").unwrap();
        let y = b.object("B").unwrap();
        let z = b.object("C").unwrap();
        let f = b.morphism("f", x, y).unwrap();
        let g = b.morphism("g", y, z).unwrap();
        let _h = b.morphism("h", x, z).unwrap();
        b.then(f, g, f).unwrap();
        let report = validate_category(&b.build());
        assert_eq!(report.violations.len(), 1, "{:?}", report.violations);
        assert_eq!(report.count(ViolationKind::Typing), 1);
    }

    #[test]
    fn missing_and_spurious_composites_are_reported() {
        let mut b = CategoryBuilder::new();
        let x = b.object("A").unwrap();
        let y = b.object("B").unwrap();
        let f = b.morphism("f", x, y).unwrap();
        let g = b.morphism("g", y, x).unwrap();
        b.then(g, g, g).unwrap();
        let report = validate_category(&b.build());
        // f;g and g;f are missing, g;g is spurious
        assert_eq!(report.count(ViolationKind::MissingComposite), 2);
        assert_eq!(report.count(ViolationKind::SpuriousComposite), 1);
        let _ = f;
    }

    #[test]
    fn associativity_failure_is_reported() {
        // (a;a);b = b;b = b but a;(a;b) = a;1 = a
        let c = monoid(&["1", "a", "b"], |i, j| match (i, j) {
            (0, k) | (k, 0) => k,
            (1, 1) => 2,
            (1, 2) => 0,
            (2, 1) => 2,
            _ => 2,
        });
        let report = validate_category(&c);
        assert!(report.count(ViolationKind::Associativity) > 0);
    }

    #[test]
    fn identity_functor_and_swap_functor() {
        let c = diamond();
        let id = Functor::identity(&c);
        assert!(validate_functor(&c, &c, &id).is_valid());
        let a = c.object_named("a").unwrap();
        let b = c.object_named("b").unwrap();
        let mut objs: Vec<_> = c.objects().collect();
        objs.swap(a.index(), b.index());
        let bad = Functor::new(objs, c.morphisms().collect());
        let report = validate_functor(&c, &c, &bad);
        assert!(!report.is_valid());
        assert!(report.count(ViolationKind::FunctorTyping) > 0);
    }

    #[test]
    fn identity_transformation_is_natural() {
        let c = diamond();
        let id = Functor::identity(&c);
        let alpha = NatTransformation::identity_on(&id, &c);
        assert!(validate_nat(&c, &c, &id, &id, &alpha).is_valid());
    }

    #[test]
    fn non_central_component_breaks_naturality() {
        // S3 is noncommutative: a constant non-central component is not natural
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let names = ["e", "s01", "s12", "s02", "r1", "r2"];
        let mul = |i: usize, j: usize| {
            // diagrammatic: apply perms[i] then perms[j]
            let p = perms[i];
            let q = perms[j];
            let r = [q[p[0]], q[p[1]], q[p[2]]];
            perms.iter().position(|x| *x == r).unwrap()
        };
        let c = monoid(&names, mul);
        assert!(validate_category(&c).is_valid());
        let id = Functor::identity(&c);
        let alpha = NatTransformation::new(vec![c.morphism_named("s01").unwrap()]);
        let report = validate_nat(&c, &c, &id, &id, &alpha);
        assert!(report.count(ViolationKind::Naturality) > 0);
    }

    #[test]
    fn orbits() {
        let c = diamond();
        assert_eq!(
            functor_orbit(&Functor::identity(&c)),
            FunctorOrbit {
                preperiod: 0,
                period: 1
            }
        );
        let d = discrete(&["x", "y"]);
        let swap = Functor::new(
            vec![ObjId(1), ObjId(0)],
            vec![MorId(1), MorId(0)],
        );
        assert!(validate_functor(&d, &d, &swap).is_valid());
        assert_eq!(
            functor_orbit(&swap),
            FunctorOrbit {
                preperiod: 0,
                period: 2
            }
        );
        // constant functor at top
        let top = c.object_named("top").unwrap();
        let k = Functor::new(vec![top; 4], vec![c.id(top); 9]);
        assert!(validate_functor(&c, &c, &k).is_valid());
        let orbit = functor_orbit(&k);
        assert_eq!(
            orbit,
            FunctorOrbit {
                preperiod: 1,
                period: 1
            }
        );
        assert_eq!(iterate_functor(&k, 1), iterate_functor(&k, 2));
        assert_ne!(iterate_functor(&k, 0), iterate_functor(&k, 1));
    }

    #[test]
    fn diamond_monos_and_retracts() {
        let c = diamond();
        assert_eq!(enumerate_monos(&c).len(), c.morphism_count());
        for o in c.objects() {
            let pairs = enumerate_retract_pairs(&c, o);
            assert_eq!(pairs.len(), 1);
            let pair = pairs.into_iter().next().unwrap();
            assert_eq!(pair.section, c.id(o));
            assert_eq!(pair.retraction, c.id(o));
        }
    }

    #[test]
    fn idempotent_monoid_enumerations() {
        let c = idempotent_monoid();
        let e = c.morphism_named("e").unwrap();
        let one = c.morphism_named("1").unwrap();
        assert_eq!(enumerate_idempotents(&c), [one, e].into_iter().collect());
        assert!(!is_mono(&c, e));
        assert!(split_idempotent(&c, e).is_none());
        assert!(split_idempotent(&c, one).is_some());
    }

    #[test]
    fn minting_avoids_collisions() {
        let mut b = CategoryBuilder::new();
        let x = b.object("X").unwrap();
        b.morphism("id_X", x, x).unwrap();
        let y = b.object("Y").unwrap();
        let c = b.build();
        // X has no designated identity, so `id_X'` is minted
        assert_eq!(c.mor_name(c.id(x)), "id_X'");
        assert_eq!(c.mor_name(c.id(y)), "id_Y");
        assert_eq!(c.morphism_count(), 3);
    }
}
