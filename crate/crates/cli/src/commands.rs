//! Command dispatch. Every run yields one JSON report and an exit status:
//! 0 when all checks pass, 1 when a check fails or is inconclusive, 2 on
//! input errors.

use std::collections::BTreeSet;
use std::time::Instant;

use serde_json::{json, Map, Value};

use tangent_display_core::constructions::{
    karoubi_condition_comparison, karoubi_envelope, open_subobjects, par_category,
    fibration::transfer_counterexamples, slice_tangent_category, term_slice_unit_counit,
    ConstructionError,
};
use tangent_display_core::display::{
    check_fully_displayed, check_well_displayed, BundleCandidates, Classifier, Clause,
    FullyDisplayedVerdict,
};
use tangent_display_core::fincat::{
    enumerate_idempotents, enumerate_monos, functor_orbit, is_iso, FinCategory, MorId,
};
use tangent_display_core::ringcat::{
    self, certify_pushout, check_t_preserves_pushout, enumerate_homs, tensor_over, FiniteAlgebra,
};
use tangent_display_core::tangent::{
    check_differential_bundle, check_negatives, check_tangent_axioms, AxiomReport,
    DifferentialBundleData, TangentStructure,
};

use crate::presentation::{load, Diagnostic, DiagnosticKind, Elaborated};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    TangentCheck,
    Classify,
    MaximalSystem,
    Split,
    Slice,
    Par,
    Open,
    RingDemo,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Validate,
        Command::TangentCheck,
        Command::Classify,
        Command::MaximalSystem,
        Command::Split,
        Command::Slice,
        Command::Par,
        Command::Open,
        Command::RingDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::TangentCheck => "tangent-check",
            Command::Classify => "classify",
            Command::MaximalSystem => "maximal-system",
            Command::Split => "split",
            Command::Slice => "slice",
            Command::Par => "par",
            Command::Open => "open",
            Command::RingDemo => "ring-demo",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub mor: Option<String>,
    pub base: Option<String>,
    pub system: Option<String>,
    pub depth: usize,
    /// Cap on the fully-displayed search.
    pub budget: usize,
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            mor: None,
            base: None,
            system: None,
            depth: 2,
            budget: 100_000,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub exit: i32,
}

impl Outcome {
    /// Pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("json values serialize");
        s.push('\n');
        s
    }
}

enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

type Body = Result<(Verdict, Map<String, Value>), Vec<Diagnostic>>;

fn usage(message: impl Into<String>, kind: DiagnosticKind, token: &str) -> Vec<Diagnostic> {
    vec![Diagnostic {
        kind,
        line: 0,
        column: 0,
        token: token.to_string(),
        message: message.into(),
        related_line: None,
    }]
}

fn diagnostics_json(diags: &[Diagnostic]) -> Value {
    Value::Array(
        diags
            .iter()
            .map(|d| {
                json!({
                    "kind": d.kind.as_str(),
                    "line": d.line,
                    "column": d.column,
                    "token": d.token,
                    "message": d.message,
                    "related_line": d.related_line,
                })
            })
            .collect(),
    )
}

/// Run `cmd` on presentation source `src`; `file` is echoed in the report.
pub fn run(cmd: Command, file: &str, src: &str, opts: &Options) -> Outcome {
    let start = Instant::now();
    let mut flags = Map::new();
    if let Some(m) = &opts.mor {
        flags.insert("mor".into(), json!(m));
    }
    if let Some(b) = &opts.base {
        flags.insert("base".into(), json!(b));
    }
    if let Some(s) = &opts.system {
        flags.insert("system".into(), json!(s));
    }
    match cmd {
        Command::RingDemo => {
            flags.insert("depth".into(), json!(opts.depth));
        }
        Command::Classify => {
            flags.insert("budget".into(), json!(opts.budget));
        }
        _ => {}
    }
    let body: Body = load(src).and_then(|(_, e)| match cmd {
        Command::Validate => Ok(validate(&e)),
        Command::TangentCheck => tangent(&e).map(|ts| tangent_check(&e.cat, ts)),
        Command::Classify => tangent(&e).and_then(|ts| classify(&e.cat, ts, opts)),
        Command::MaximalSystem => tangent(&e).map(|ts| maximal_system(&e.cat, ts)),
        Command::Split => tangent(&e).map(|ts| split(&e.cat, ts)),
        Command::Slice => tangent(&e).and_then(|ts| slice(&e.cat, ts, opts)),
        Command::Par => tangent(&e).and_then(|ts| par(&e, ts, opts)),
        Command::Open => tangent(&e).map(|ts| open(&e.cat, ts)),
        Command::RingDemo => Ok(ring_demo(&e, opts)),
    });
    let (verdict, exit, mut report) = match body {
        Ok((v, m)) => match v {
            Verdict::Pass => ("pass", 0, m),
            Verdict::Fail => ("fail", 1, m),
            Verdict::Inconclusive => ("inconclusive", 1, m),
        },
        Err(d) => {
            let mut m = Map::new();
            m.insert("diagnostics".into(), diagnostics_json(&d));
            ("input-error", 2, m)
        }
    };
    report.insert("format".into(), json!(1));
    report.insert(
        "command".into(),
        json!({ "name": cmd.name(), "file": file, "flags": flags }),
    );
    report.insert("verdict".into(), json!(verdict));
    if opts.timing {
        report.insert("timing_ms".into(), json!(start.elapsed().as_millis() as u64));
    }
    Outcome {
        report: Value::Object(report),
        exit,
    }
}

fn tangent(e: &Elaborated) -> Result<&TangentStructure, Vec<Diagnostic>> {
    e.tangent.as_ref().ok_or_else(|| {
        usage(
            "this command needs a tangent block",
            DiagnosticKind::InvalidTangent,
            "",
        )
    })
}

fn names(cat: &FinCategory, ms: impl IntoIterator<Item = MorId>) -> Value {
    let mut v: Vec<&str> = ms.into_iter().map(|m| cat.mor_name(m)).collect();
    v.sort_unstable();
    json!(v)
}

fn clause(c: &Clause) -> Value {
    json!({ "holds": c.holds, "counterexample": c.counterexample })
}

fn axioms(r: &AxiomReport) -> Value {
    Value::Array(
        r.checks
            .iter()
            .map(|c| {
                json!({
                    "group": c.group,
                    "name": c.name,
                    "checked": c.checked,
                    "failures": c.failures,
                })
            })
            .collect(),
    )
}

fn pass_if(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn validate(e: &Elaborated) -> (Verdict, Map<String, Value>) {
    let cat = &e.cat;
    let mut objects: Vec<&str> = cat.objects().map(|o| cat.obj_name(o)).collect();
    objects.sort_unstable();
    let mut m = Map::new();
    m.insert(
        "category".into(),
        json!({
            "name": e.name,
            "objects": objects,
            "morphisms": names(cat, cat.morphisms()),
            "monos": names(cat, enumerate_monos(cat)),
            "isomorphisms": names(cat, cat.morphisms().filter(|&f| is_iso(cat, f))),
            "idempotents": names(cat, enumerate_idempotents(cat)),
        }),
    );
    m.insert(
        "tangent".into(),
        match &e.tangent {
            None => Value::Null,
            Some(ts) => {
                let o = functor_orbit(ts.functor());
                json!({
                    "orbit": { "preperiod": o.preperiod, "period": o.period },
                    "witness_bound": ts.witness_bound(),
                    "negation": ts.data.negation.is_some(),
                })
            }
        },
    );
    m.insert(
        "systems".into(),
        Value::Object(
            e.systems
                .iter()
                .map(|(k, v)| (k.clone(), names(cat, v.iter().copied())))
                .collect(),
        ),
    );
    m.insert(
        "algebras".into(),
        Value::Object(
            e.algebras
                .iter()
                .map(|(k, a)| (k.clone(), json!({ "p": a.p, "dim": a.dim() })))
                .collect(),
        ),
    );
    (Verdict::Pass, m)
}

fn tangent_check(cat: &FinCategory, ts: &TangentStructure) -> (Verdict, Map<String, Value>) {
    let r = check_tangent_axioms(cat, ts);
    let mut ok = r.passes();
    let mut m = Map::new();
    m.insert("axioms_pass".into(), json!(r.passes()));
    m.insert("axioms".into(), axioms(&r));
    let neg = check_negatives(cat, ts).ok();
    ok &= neg.as_ref().is_none_or(AxiomReport::passes);
    m.insert(
        "negatives".into(),
        neg.map_or(Value::Null, |n| json!({ "pass": n.passes(), "axioms": axioms(&n) })),
    );
    let mut bundles = Map::new();
    for o in cat.objects() {
        let db = DifferentialBundleData::tangent_bundle(ts, o);
        let v = match check_differential_bundle(cat, ts, &db) {
            Ok(b) => {
                ok &= b.passes();
                let failing: Vec<&str> = b.failing().map(|c| c.name.as_str()).collect();
                json!({ "pass": b.passes(), "failing": failing })
            }
            Err(e) => {
                ok = false;
                json!({ "pass": false, "error": e.to_string() })
            }
        };
        bundles.insert(cat.obj_name(o).to_string(), v);
    }
    m.insert("tangent_bundles".into(), Value::Object(bundles));
    (pass_if(ok), m)
}

fn classify(cat: &FinCategory, ts: &TangentStructure, opts: &Options) -> Body {
    let cls = Classifier::new(cat, ts);
    let targets: Vec<MorId> = match &opts.mor {
        Some(name) => vec![cat.morphism_named(name).ok_or_else(|| {
            usage(
                format!("unknown morphism `{name}`"),
                DiagnosticKind::UnknownIdentifier,
                name,
            )
        })?],
        None => cat.morphisms_by_name(),
    };
    let mut rows = Vec::new();
    let mut consistent = true;
    for q in targets {
        let v = cls.classify(q);
        consistent &= (!v.is_etale || v.is_submersion) && (!v.is_t_display || v.is_display);
        let witnesses: Map<String, Value> = v
            .witnesses
            .iter()
            .map(|(k, w)| (k.to_string(), json!(w.describe(cat))))
            .collect();
        rows.push(json!({
            "mor": cat.mor_name(q),
            "dom": cat.obj_name(cat.dom(q)),
            "cod": cat.obj_name(cat.cod(q)),
            "display": v.is_display,
            "t_display": v.is_t_display,
            "submersion": v.is_submersion,
            "etale": v.is_etale,
            "t_monic": v.is_t_monic,
            "witnesses": witnesses,
        }));
    }
    let mut m = Map::new();
    m.insert("morphisms".into(), Value::Array(rows));
    let mut verdict = pass_if(consistent);
    if opts.mor.is_none() {
        m.insert("well_displayed".into(), clause(&check_well_displayed(&cls)));
        let fd = check_fully_displayed(&cls, BundleCandidates::Enumerate { budget: opts.budget });
        let v = match &fd {
            FullyDisplayedVerdict::Holds { bundles, examined } => {
                json!({ "verdict": "holds", "bundles": bundles, "examined": examined })
            }
            FullyDisplayedVerdict::Fails(db) => json!({
                "verdict": "fails",
                "bundle": {
                    "q": cat.mor_name(db.q),
                    "zero": cat.mor_name(db.zero),
                    "sum": cat.mor_name(db.sum),
                    "lift": cat.mor_name(db.lift),
                },
            }),
            FullyDisplayedVerdict::Inconclusive { required, budget } => {
                verdict = Verdict::Inconclusive;
                json!({ "verdict": "inconclusive", "required": required, "budget": budget })
            }
        };
        m.insert("fully_displayed".into(), v);
    }
    Ok((verdict, m))
}

fn maximal_system(cat: &FinCategory, ts: &TangentStructure) -> (Verdict, Map<String, Value>) {
    let cls = Classifier::new(cat, ts);
    let members = cls.maximal_system();
    let sys = tangent_display_core::display::check_display_system_with(&cls, &members, true);
    let mut m = Map::new();
    m.insert("members".into(), names(cat, members.iter().copied()));
    m.insert(
        "clauses".into(),
        Value::Object(
            sys.clauses()
                .into_iter()
                .map(|(k, c)| (k.to_string(), clause(c)))
                .collect(),
        ),
    );
    m.insert("display_system".into(), json!(sys.is_display_system()));
    (
        pass_if(sys.is_display_system() && sys.closed_under_composition.holds),
        m,
    )
}

fn construction_failure(e: &ConstructionError) -> (Verdict, Map<String, Value>) {
    let mut m = Map::new();
    m.insert("error".into(), json!(e.to_string()));
    (Verdict::Fail, m)
}

fn split(cat: &FinCategory, ts: &TangentStructure) -> (Verdict, Map<String, Value>) {
    let out = match karoubi_envelope(cat, ts) {
        Ok(o) => o,
        Err(e) => return construction_failure(&e),
    };
    let sc = &out.split_cat;
    let mut objects: Vec<&str> = sc.objects().map(|o| sc.obj_name(o)).collect();
    objects.sort_unstable();
    let cmp = karoubi_condition_comparison(cat);
    let mut m = Map::new();
    m.insert("objects".into(), json!(objects));
    m.insert("morphisms".into(), names(sc, sc.morphisms()));
    m.insert("all_idempotents_split".into(), json!(out.all_idempotents_split));
    m.insert("fully_faithful".into(), json!(out.fully_faithful));
    m.insert("axioms_pass".into(), json!(out.axioms.passes()));
    m.insert(
        "failing_axioms".into(),
        json!(out.axioms.failing().map(|c| c.name.clone()).collect::<Vec<_>>()),
    );
    m.insert("lost_display".into(), names(cat, out.lost_display.iter().copied()));
    m.insert(
        "hom_condition_comparison".into(),
        json!({
            "standard_cells": cmp.standard_cells,
            "commuting_cells": cmp.commuting_cells,
            "commuting_is_category": cmp.commuting_is_category,
            "agree": cmp.agree,
        }),
    );
    (pass_if(out.verified()), m)
}

fn slice(cat: &FinCategory, ts: &TangentStructure, opts: &Options) -> Body {
    let base = match &opts.base {
        Some(b) => cat.object_named(b).ok_or_else(|| {
            usage(format!("unknown object `{b}`"), DiagnosticKind::UnknownIdentifier, b)
        })?,
        None => {
            return Err(usage(
                "slice needs --base",
                DiagnosticKind::Syntax,
                "",
            ))
        }
    };
    let sl = match slice_tangent_category(cat, ts, base) {
        Ok(s) => s,
        Err(e) => return Ok(construction_failure(&e)),
    };
    let sc = &sl.slice_cat;
    let objects: Vec<Value> = sc
        .objects()
        .map(|o| json!({ "name": sc.obj_name(o), "over": cat.mor_name(sl.object_source[o.index()]) }))
        .collect();
    let transfer = transfer_counterexamples(cat, ts, &sl);
    let mut m = Map::new();
    m.insert("base".into(), json!(cat.obj_name(base)));
    m.insert("objects".into(), Value::Array(objects));
    m.insert("morphisms".into(), json!(sc.morphism_count()));
    m.insert("axioms_pass".into(), json!(sl.axioms.passes()));
    m.insert(
        "failing_axioms".into(),
        json!(sl.axioms.failing().map(|c| c.name.clone()).collect::<Vec<_>>()),
    );
    m.insert(
        "negatives_pass".into(),
        json!(sl.negatives.as_ref().map(AxiomReport::passes)),
    );
    m.insert(
        "terminal".into(),
        json!(sl.terminal.map(|t| sc.obj_name(t).to_string())),
    );
    m.insert("product_failure".into(), check(&sl.product_failure));
    m.insert("transfer_counterexamples".into(), names(sc, transfer.iter().copied()));
    let mut ok = sl.verified() && transfer.is_empty();
    let term = match term_slice_unit_counit(cat, ts) {
        Ok(r) => {
            ok &= r.holds();
            json!({
                "unit_is_isomorphism": r.unit_is_isomorphism,
                "eta_invertible": r.eta_invertible,
                "first_triangle": r.first_triangle,
                "second_triangle": r.second_triangle,
                "bases_checked": r.bases_checked,
                "failures": r.failures,
            })
        }
        Err(e @ ConstructionError::NoTerminal) => json!({ "not_applicable": e.to_string() }),
        Err(e @ ConstructionError::NotCartesian(_)) => json!({ "not_applicable": e.to_string() }),
        Err(e) => {
            ok = false;
            json!({ "error": e.to_string() })
        }
    };
    m.insert("term_slice".into(), term);
    Ok((pass_if(ok), m))
}

/// `"pass"`, or the first failing instance.
fn check(failure: &Option<String>) -> Value {
    match failure {
        None => json!("pass"),
        Some(f) => json!({ "fail": f }),
    }
}

fn par(e: &Elaborated, ts: &TangentStructure, opts: &Options) -> Body {
    let cat = &e.cat;
    let Some(name) = &opts.system else {
        return Err(usage("par needs --system", DiagnosticKind::Syntax, ""));
    };
    let members: &BTreeSet<MorId> = e.systems.get(name).ok_or_else(|| {
        usage(
            format!("unknown system `{name}`"),
            DiagnosticKind::UnknownIdentifier,
            name,
        )
    })?;
    let out = match par_category(cat, ts, members) {
        Ok(o) => o,
        Err(e) => return Ok(construction_failure(&e)),
    };
    let pc = &out.par_cat;
    let mut spans: Vec<Value> = pc
        .morphisms()
        .map(|f| {
            let (mm, ff) = out.span_reps[f.index()];
            json!({
                "class": pc.mor_name(f),
                "m": cat.mor_name(mm),
                "f": cat.mor_name(ff),
                "restriction": pc.mor_name(out.restriction[f.index()]),
                "total": out.is_total(f),
            })
        })
        .collect();
    spans.sort_by(|a, b| a["class"].as_str().cmp(&b["class"].as_str()));
    let equations: Map<String, Value> = out
        .checks
        .equations
        .iter()
        .map(|(k, v)| (k.to_string(), check(v)))
        .collect();
    let mut m = Map::new();
    m.insert("system".into(), json!(name));
    m.insert("members".into(), names(cat, members.iter().copied()));
    m.insert("partial_maps".into(), Value::Array(spans));
    m.insert("equations".into(), Value::Object(equations));
    m.insert("idempotents_split".into(), check(&out.checks.idempotents_split));
    m.insert("tangent_functor".into(), check(&out.checks.tangent_functor));
    m.insert("structural_total".into(), check(&out.checks.structural_total));
    Ok((pass_if(out.checks.passes()), m))
}

fn open(cat: &FinCategory, ts: &TangentStructure) -> (Verdict, Map<String, Value>) {
    let o = open_subobjects(cat, ts);
    let el = |i: usize| cat.mor_name(o.elements[i].mor).to_string();
    let mut m = Map::new();
    m.insert("monics".into(), names(cat, o.monics.iter().copied()));
    m.insert("elements".into(), names(cat, o.elements.iter().map(|e| e.mor)));
    let mut order: Vec<(String, String)> = o.order.iter().map(|&(a, b)| (el(a), el(b))).collect();
    order.sort();
    m.insert("order".into(), json!(order));
    let mut meets: Vec<(String, String, String)> = o
        .meets
        .iter()
        .map(|(&(a, b), mt)| (el(a), el(b), el(mt.meet)))
        .collect();
    meets.sort();
    m.insert("meets".into(), json!(meets));
    m.insert(
        "system_of_monics".into(),
        json!({ "holds": o.system_of_monics.is_ok(), "counterexample": o.system_of_monics.as_ref().err() }),
    );
    m.insert(
        "brute_force_maximal".into(),
        o.brute_force_maximal
            .as_ref()
            .map_or(Value::Null, |b| names(cat, b.iter().copied())),
    );
    m.insert("maximal".into(), json!(o.is_maximal()));
    let par_ok = match &o.par {
        Ok(p) => {
            m.insert("par".into(), json!({ "partial_maps": p.par_cat.morphism_count(), "pass": p.checks.passes() }));
            p.checks.passes()
        }
        Err(e) => {
            m.insert("par".into(), json!({ "error": e.to_string() }));
            false
        }
    };
    let ok = o.system_of_monics.is_ok() && o.is_maximal() != Some(false) && par_ok;
    (pass_if(ok), m)
}

const HOM_LIMIT: u64 = 1 << 16;

/// Every span `N <- M -> E` over the given algebras, with its pushout
/// certified against all cocones into the same algebras and the comparison
/// maps checked to depth `opts.depth`.
fn ring_demo(e: &Elaborated, opts: &Options) -> (Verdict, Map<String, Value>) {
    let algebras: Vec<(String, FiniteAlgebra)> = if e.algebras.is_empty() {
        ringcat::samples::all()
            .into_iter()
            .map(|(n, a)| (n.to_string(), a))
            .collect()
    } else {
        e.algebras.clone()
    };
    let homs = |a: &FiniteAlgebra, b: &FiniteAlgebra| {
        if a.p != b.p {
            return Vec::new();
        }
        enumerate_homs(a, b, HOM_LIMIT).unwrap_or_default()
    };
    let mut cases = Vec::new();
    let mut ok = true;
    for (mn, m) in &algebras {
        for (nn, n) in &algebras {
            for (en, ea) in &algebras {
                let fs = homs(m, n);
                let gs = homs(m, ea);
                for (fi, f) in fs.iter().enumerate() {
                    for (gi, g) in gs.iter().enumerate() {
                        let t = tensor_over(m, n, ea, f, g);
                        let mut family = Vec::new();
                        for (_, c) in &algebras {
                            for h in homs(n, c) {
                                for k in homs(ea, c) {
                                    if f.then(&h, c) == g.then(&k, c) {
                                        family.push((c.clone(), h.clone(), k));
                                    }
                                }
                            }
                        }
                        let certified = certify_pushout(&t, &family);
                        let depths = check_t_preserves_pushout(m, n, ea, f, g, opts.depth);
                        let case_ok = certified.is_ok()
                            && depths.as_ref().is_ok_and(|d| d.iter().all(|c| c.comparison_is_iso));
                        ok &= case_ok;
                        cases.push(json!({
                            "m": mn, "n": nn, "e": en, "f": fi, "g": gi,
                            "pushout_dim": t.algebra.dim(),
                            "pushout_elements": t.algebra.element_count(),
                            "cocones_certified": certified.as_ref().map(Vec::len).ok(),
                            "depths": depths.map(|ds| ds.iter().map(|d| json!({
                                "k": d.k,
                                "image_dim": d.image_dim,
                                "pushout_dim": d.pushout_dim,
                                "iso": d.comparison_is_iso,
                            })).collect::<Vec<_>>()).unwrap_or_default(),
                        }));
                    }
                }
            }
        }
    }
    let mut m = Map::new();
    m.insert(
        "algebras".into(),
        Value::Object(
            algebras
                .iter()
                .map(|(k, a)| (k.clone(), json!({ "p": a.p, "dim": a.dim() })))
                .collect(),
        ),
    );
    m.insert("spans".into(), json!(cases.len()));
    m.insert("cases".into(), Value::Array(cases));
    m.insert("verified_to_depth".into(), json!(opts.depth));
    (pass_if(ok), m)
}
