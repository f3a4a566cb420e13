use std::fs;
use std::path::{Path, PathBuf};

use tangent_display::presentation::{load, parse, serialize, DiagnosticKind};
use tangent_display::{run, Command, Options};

fn dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(sub)
}

fn presentations() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(dir("presentations"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cat"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn source(name: &str) -> String {
    fs::read_to_string(dir("presentations").join(name)).unwrap()
}

/// Runs one command and compares its rendered report with the stored golden
/// file byte for byte. With `TDISP_BLESS=1` the golden file is rewritten.
fn golden(cmd: Command, file: &str, opts: &Options) -> Option<String> {
    let out = run(cmd, file, &source(file), opts).render();
    let mut key = format!("{}.{}", file.trim_end_matches(".cat"), cmd.name());
    for v in [&opts.mor, &opts.base, &opts.system].into_iter().flatten() {
        key.push('.');
        key.push_str(&v.replace('*', "star"));
    }
    let path = dir("tests/golden").join(format!("{key}.json"));
    if std::env::var("TDISP_BLESS").is_ok_and(|v| v == "1") {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &out).unwrap();
        return None;
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    (want != out).then(|| format!("{key}: report differs from golden file\n{out}"))
}

fn opts() -> Options {
    Options::default()
}

fn cases() -> Vec<(Command, &'static str, Options)> {
    let mut v = Vec::new();
    for f in ["chain3.cat", "diamond.cat", "empty.cat", "inj.cat", "monoid-e.cat", "one.cat", "vposet.cat", "z2.cat", "z2-central.cat"] {
        v.push((Command::TangentCheck, f, opts()));
        v.push((Command::Classify, f, opts()));
        v.push((Command::MaximalSystem, f, opts()));
        v.push((Command::Split, f, opts()));
        v.push((Command::Open, f, opts()));
    }
    let with = |f: fn(&mut Options)| {
        let mut o = opts();
        f(&mut o);
        o
    };
    v.push((Command::Classify, "diamond.cat", with(|o| o.mor = Some("bot<a".into()))));
    v.push((Command::Slice, "diamond.cat", with(|o| o.base = Some("top".into()))));
    v.push((Command::Slice, "chain3.cat", with(|o| o.base = Some("2".into()))));
    v.push((Command::Slice, "vposet.cat", with(|o| o.base = Some("a".into()))));
    v.push((Command::Slice, "z2.cat", with(|o| o.base = Some("*".into()))));
    v.push((Command::Par, "diamond.cat", with(|o| o.system = Some("S".into()))));
    v.push((Command::Par, "inj.cat", with(|o| o.system = Some("Incl".into()))));
    v.push((Command::Par, "z2-central.cat", with(|o| o.system = Some("G".into()))));
    v.push((Command::Slice, "diamond.cat", with(|o| o.base = Some("nowhere".into()))));
    v.push((Command::RingDemo, "algebras.cat", with(|o| o.depth = 2)));
    v
}

#[test]
fn round_trip_on_every_parsable_file() {
    let mut parsed = 0;
    for (name, src) in presentations() {
        let Ok(p) = parse(&src) else { continue };
        parsed += 1;
        let text = serialize(&p);
        let q = parse(&text).unwrap_or_else(|d| panic!("{name}: {d:?}"));
        assert_eq!(q, p, "{name}");
        assert_eq!(serialize(&q), text, "{name}");
    }
    assert!(parsed >= 10);
}

#[test]
fn every_diagnostic_class_is_exercised() {
    let mut seen = std::collections::BTreeSet::new();
    for (name, src) in presentations() {
        match load(&src) {
            Ok(_) => assert!(!name.starts_with("bad-"), "{name} should not load"),
            Err(diags) => {
                assert!(name.starts_with("bad-"), "{name}: {diags:?}");
                for d in diags {
                    assert!(d.line >= 1 && d.column >= 1, "{name}: unpositioned diagnostic");
                    seen.insert(d.kind);
                }
            }
        }
    }
    let all = [
        DiagnosticKind::Syntax,
        DiagnosticKind::UnknownIdentifier,
        DiagnosticKind::NonComposable,
        DiagnosticKind::IllTyped,
        DiagnosticKind::Duplicate,
        DiagnosticKind::ConflictingComposite,
        DiagnosticKind::InvalidCategory,
        DiagnosticKind::InvalidTangent,
        DiagnosticKind::WitnessNotPullback,
        DiagnosticKind::InvalidAlgebra,
    ];
    assert_eq!(seen, all.into_iter().collect());
}

#[test]
fn duplicate_diagnostic_names_both_lines() {
    let diags = load(&source("bad-duplicate.cat")).unwrap_err();
    assert_eq!(diags.len(), 1);
    assert_eq!((diags[0].line, diags[0].related_line), (4, Some(2)));
    assert_eq!(diags[0].token, "f");
}

#[test]
fn validate_reports_match_golden_files() {
    let files = presentations();
    assert!(files.len() >= 10);
    let diffs: Vec<String> = files
        .iter()
        .filter_map(|(name, _)| golden(Command::Validate, name, &opts()))
        .collect();
    assert!(diffs.is_empty(), "{}", diffs.join("\n"));
}

#[test]
fn command_reports_match_golden_files() {
    let diffs: Vec<String> = cases()
        .iter()
        .filter_map(|(cmd, file, o)| golden(*cmd, file, o))
        .collect();
    assert!(diffs.is_empty(), "{}", diffs.join("\n"));
}

#[test]
fn reports_are_deterministic() {
    for (cmd, file, o) in cases().into_iter().take(12) {
        let a = run(cmd, file, &source(file), &o);
        let b = run(cmd, file, &source(file), &o);
        assert_eq!(a.render(), b.render(), "{file}");
    }
}

#[test]
fn exit_statuses() {
    for (name, src) in presentations() {
        let out = run(Command::Validate, &name, &src, &opts());
        let want = if name.starts_with("bad-") { 2 } else { 0 };
        assert_eq!(out.exit, want, "{name}");
        assert_eq!(out.report["format"], 1);
    }
    let src = source("diamond.cat");
    let out = run(Command::Slice, "diamond.cat", &src, &Options { base: Some("nowhere".into()), ..opts() });
    assert_eq!(out.exit, 2);
    let out = run(Command::Classify, "diamond.cat", &src, &Options { budget: 0, ..opts() });
    assert_eq!(out.exit, 1);
    assert_eq!(out.report["verdict"], "inconclusive");
}
