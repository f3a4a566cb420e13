//! Line-oriented presentation files.
//!
//! ```text
//! category diamond
//! object bot a b top
//! morphism f : a -> b
//! identity a = id_a
//! then(f, g) = h
//! tangent trivial
//! system S = f g
//! algebra A over 2
//!   basis 1 x
//!   unit 1 0
//!   mul 0 0 0 1
//! end
//! ```
//!
//! An explicit tangent block lists the functor and components:
//!
//! ```text
//! tangent
//!   T identity            # or: T obj A = B / T mor f = g
//!   p A = f               # likewise z, s, l, c and optionally n
//!   witness A = auto      # or: witness A = pi1, pi2
//!   bound 2
//! end
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use tangent_display_core::fincat::{
    validate_category, validate_functor, CategoryBuilder, FinCategory, Functor, MorId,
    NatTransformation, ObjId,
};
use tangent_display_core::limits::Square;
use tangent_display_core::ringcat::FiniteAlgebra;
use tangent_display_core::tangent::{trivial_tangent, TangentData, TangentError, TangentStructure};

/// Source position, 1-based. Positions are not part of a value's identity:
/// two nodes that differ only in where they were written compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismDecl {
    pub name: Name,
    pub dom: Name,
    pub cod: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composite {
    pub f: Name,
    pub g: Name,
    pub h: Name,
}

pub const COMPONENTS: [&str; 6] = ["p", "z", "s", "l", "c", "n"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub which: &'static str,
    pub object: Name,
    pub mor: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessDecl {
    pub object: Name,
    /// `None` for `auto`.
    pub legs: Option<(Name, Name)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TangentSpec {
    pub pos: Pos,
    pub functor_identity: bool,
    pub obj_map: Vec<(Name, Name)>,
    pub mor_map: Vec<(Name, Name)>,
    pub components: Vec<Component>,
    pub witnesses: Vec<WitnessDecl>,
    pub bound: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TangentBlock {
    Trivial(Pos),
    Explicit(TangentSpec),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDecl {
    pub name: Name,
    pub members: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraBlock {
    pub name: Name,
    pub p: u32,
    pub basis: Vec<String>,
    pub unit: Vec<u32>,
    pub mul: Vec<(usize, usize, usize, u32)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Presentation {
    pub category: Option<Name>,
    pub objects: Vec<Name>,
    pub morphisms: Vec<MorphismDecl>,
    pub identities: Vec<(Name, Name)>,
    pub composites: Vec<Composite>,
    pub tangent: Option<TangentBlock>,
    pub systems: Vec<SystemDecl>,
    pub algebras: Vec<AlgebraBlock>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagnosticKind {
    Syntax,
    UnknownIdentifier,
    NonComposable,
    IllTyped,
    Duplicate,
    ConflictingComposite,
    InvalidCategory,
    InvalidTangent,
    WitnessNotPullback,
    InvalidAlgebra,
}

impl DiagnosticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::UnknownIdentifier => "unknown-identifier",
            DiagnosticKind::NonComposable => "non-composable",
            DiagnosticKind::IllTyped => "ill-typed",
            DiagnosticKind::Duplicate => "duplicate",
            DiagnosticKind::ConflictingComposite => "conflicting-composite",
            DiagnosticKind::InvalidCategory => "invalid-category",
            DiagnosticKind::InvalidTangent => "invalid-tangent",
            DiagnosticKind::WitnessNotPullback => "witness-not-pullback",
            DiagnosticKind::InvalidAlgebra => "invalid-algebra",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub line: usize,
    pub column: usize,
    /// The offending token, empty at end of line.
    pub token: String,
    pub message: String,
    /// Earlier line involved, for duplicates and conflicts.
    pub related_line: Option<usize>,
}

impl Diagnostic {
    fn at(kind: DiagnosticKind, pos: Pos, token: &str, message: impl Into<String>) -> Self {
        Self {
            kind,
            line: pos.line,
            column: pos.column,
            token: token.to_string(),
            message: message.into(),
            related_line: None,
        }
    }

    fn related(mut self, line: usize) -> Self {
        self.related_line = Some(line);
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.kind.as_str(), self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Colon,
    Comma,
    LParen,
    RParen,
    Eq,
    Arrow,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::Colon => ":".into(),
            Tok::Comma => ",".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Eq => "=".into(),
            Tok::Arrow => "->".into(),
        }
    }
}

fn punct(c: char) -> Option<Tok> {
    Some(match c {
        ':' => Tok::Colon,
        ',' => Tok::Comma,
        '(' => Tok::LParen,
        ')' => Tok::RParen,
        '=' => Tok::Eq,
        _ => return None,
    })
}

fn lex(line: &str, lineno: usize) -> Vec<(Tok, Pos)> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos {
            line: lineno,
            column: i + 1,
        };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Tok::Arrow, pos));
            i += 2;
        } else if let Some(t) = punct(c) {
            out.push((t, pos));
            i += 1;
        } else {
            let start = i;
            while i < chars.len()
                && !chars[i].is_whitespace()
                && punct(chars[i]).is_none()
                && chars[i] != '#'
                && !(chars[i] == '-' && chars.get(i + 1) == Some(&'>'))
            {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        }
    }
    out
}

/// Cursor over one line's tokens.
struct Line {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Line {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn here(&self) -> (String, Pos) {
        match self.toks.get(self.at) {
            Some((t, p)) => (t.text(), *p),
            None => (String::new(), self.end),
        }
    }

    fn error(&self, what: &str) -> Diagnostic {
        let (tok, pos) = self.here();
        let found = if tok.is_empty() {
            "end of line".to_string()
        } else {
            format!("`{tok}`")
        };
        Diagnostic::at(DiagnosticKind::Syntax, pos, &tok, format!("expected {what}, found {found}"))
    }

    fn ident(&mut self, what: &str) -> Result<Name, Diagnostic> {
        match self.toks.get(self.at) {
            Some((Tok::Ident(s), p)) => {
                let n = Name {
                    text: s.clone(),
                    pos: *p,
                };
                self.at += 1;
                Ok(n)
            }
            _ => Err(self.error(what)),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), Diagnostic> {
        if self.peek() == Some(&t) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.error(&format!("`{}`", t.text())))
        }
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, Diagnostic> {
        let save = self.at;
        let n = self.ident(what)?;
        n.text.parse().map_err(|_| {
            self.at = save;
            self.error(what)
        })
    }

    fn rest(&mut self, what: &str) -> Result<Vec<Name>, Diagnostic> {
        let mut out = Vec::new();
        while self.peek().is_some() {
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    fn done(&self) -> Result<(), Diagnostic> {
        if self.peek().is_some() {
            Err(self.error("end of line"))
        } else {
            Ok(())
        }
    }
}

enum Block {
    Top,
    Tangent(TangentSpec),
    Algebra(AlgebraBlock),
}

pub fn parse(src: &str) -> Result<Presentation, Vec<Diagnostic>> {
    let mut pres = Presentation::default();
    let mut diags = Vec::new();
    let mut block = Block::Top;
    let mut last = Pos::default();
    for (idx, text) in src.lines().enumerate() {
        let lineno = idx + 1;
        let toks = lex(text, lineno);
        if toks.is_empty() {
            continue;
        }
        let end = Pos {
            line: lineno,
            column: text.chars().count() + 1,
        };
        last = end;
        let mut line = Line { toks, at: 0, end };
        let r = match &mut block {
            Block::Top => top_line(&mut line, &mut pres, &mut block),
            Block::Tangent(spec) => {
                if line.peek() == Some(&Tok::Ident("end".into())) {
                    line.at += 1;
                    line.done().map(|()| {
                        let Block::Tangent(spec) = std::mem::replace(&mut block, Block::Top) else {
                            unreachable!()
                        };
                        pres.tangent = Some(TangentBlock::Explicit(spec));
                    })
                } else {
                    tangent_line(&mut line, spec)
                }
            }
            Block::Algebra(alg) => {
                if line.peek() == Some(&Tok::Ident("end".into())) {
                    line.at += 1;
                    line.done().map(|()| {
                        let Block::Algebra(alg) = std::mem::replace(&mut block, Block::Top) else {
                            unreachable!()
                        };
                        pres.algebras.push(alg);
                    })
                } else {
                    algebra_line(&mut line, alg)
                }
            }
        };
        if let Err(d) = r {
            diags.push(d);
        }
    }
    match block {
        Block::Top => {}
        Block::Tangent(_) | Block::Algebra(_) => diags.push(Diagnostic::at(
            DiagnosticKind::Syntax,
            last,
            "",
            "expected `end` before end of file",
        )),
    }
    if diags.is_empty() {
        Ok(pres)
    } else {
        Err(diags)
    }
}

fn top_line(line: &mut Line, pres: &mut Presentation, block: &mut Block) -> Result<(), Diagnostic> {
    let kw = line.ident("a declaration")?;
    match kw.text.as_str() {
        "category" => {
            let n = line.ident("a category name")?;
            line.done()?;
            pres.category = Some(n);
        }
        "object" => {
            let names = line.rest("an object name")?;
            if names.is_empty() {
                return Err(line.error("an object name"));
            }
            pres.objects.extend(names);
        }
        "morphism" => {
            let name = line.ident("a morphism name")?;
            line.expect(Tok::Colon)?;
            let dom = line.ident("a domain")?;
            line.expect(Tok::Arrow)?;
            let cod = line.ident("a codomain")?;
            line.done()?;
            pres.morphisms.push(MorphismDecl { name, dom, cod });
        }
        "identity" => {
            let obj = line.ident("an object name")?;
            line.expect(Tok::Eq)?;
            let mor = line.ident("a morphism name")?;
            line.done()?;
            pres.identities.push((obj, mor));
        }
        "then" => {
            line.expect(Tok::LParen)?;
            let f = line.ident("a morphism name")?;
            line.expect(Tok::Comma)?;
            let g = line.ident("a morphism name")?;
            line.expect(Tok::RParen)?;
            line.expect(Tok::Eq)?;
            let h = line.ident("a morphism name")?;
            line.done()?;
            pres.composites.push(Composite { f, g, h });
        }
        "tangent" => {
            if pres.tangent.is_some() {
                return Err(Diagnostic::at(
                    DiagnosticKind::Duplicate,
                    kw.pos,
                    "tangent",
                    "a second tangent block",
                ));
            }
            if line.peek().is_some() {
                let t = line.ident("`trivial`")?;
                if t.text != "trivial" {
                    line.at -= 1;
                    return Err(line.error("`trivial` or end of line"));
                }
                line.done()?;
                pres.tangent = Some(TangentBlock::Trivial(kw.pos));
            } else {
                *block = Block::Tangent(TangentSpec {
                    pos: kw.pos,
                    ..TangentSpec::default()
                });
            }
        }
        "system" => {
            let name = line.ident("a system name")?;
            line.expect(Tok::Eq)?;
            let members = line.rest("a morphism name")?;
            pres.systems.push(SystemDecl { name, members });
        }
        "algebra" => {
            let name = line.ident("an algebra name")?;
            let over = line.ident("`over`")?;
            if over.text != "over" {
                line.at -= 1;
                return Err(line.error("`over`"));
            }
            let p = line.number("a prime")?;
            line.done()?;
            *block = Block::Algebra(AlgebraBlock {
                name,
                p,
                basis: Vec::new(),
                unit: Vec::new(),
                mul: Vec::new(),
            });
        }
        _ => {
            line.at -= 1;
            return Err(line.error("a declaration"));
        }
    }
    Ok(())
}

fn tangent_line(line: &mut Line, spec: &mut TangentSpec) -> Result<(), Diagnostic> {
    let kw = line.ident("a tangent entry")?;
    match kw.text.as_str() {
        "T" => {
            let what = line.ident("`identity`, `obj` or `mor`")?;
            match what.text.as_str() {
                "identity" => {
                    line.done()?;
                    spec.functor_identity = true;
                }
                "obj" | "mor" => {
                    let a = line.ident("a name")?;
                    line.expect(Tok::Eq)?;
                    let b = line.ident("a name")?;
                    line.done()?;
                    if what.text == "obj" {
                        spec.obj_map.push((a, b));
                    } else {
                        spec.mor_map.push((a, b));
                    }
                }
                _ => {
                    line.at -= 1;
                    return Err(line.error("`identity`, `obj` or `mor`"));
                }
            }
        }
        "witness" => {
            let object = line.ident("an object name")?;
            line.expect(Tok::Eq)?;
            let first = line.ident("`auto` or two legs")?;
            let legs = if first.text == "auto" && line.peek().is_none() {
                None
            } else {
                line.expect(Tok::Comma)?;
                Some((first, line.ident("a morphism name")?))
            };
            line.done()?;
            spec.witnesses.push(WitnessDecl { object, legs });
        }
        "bound" => {
            let n = line.number("a witness bound")?;
            line.done()?;
            spec.bound = Some(n);
        }
        k => match COMPONENTS.iter().find(|c| **c == k) {
            Some(which) => {
                let object = line.ident("an object name")?;
                line.expect(Tok::Eq)?;
                let mor = line.ident("a morphism name")?;
                line.done()?;
                spec.components.push(Component { which, object, mor });
            }
            None => {
                line.at -= 1;
                return Err(line.error("a tangent entry"));
            }
        },
    }
    Ok(())
}

fn algebra_line(line: &mut Line, alg: &mut AlgebraBlock) -> Result<(), Diagnostic> {
    let kw = line.ident("an algebra entry")?;
    match kw.text.as_str() {
        "basis" => {
            alg.basis
                .extend(line.rest("a basis label")?.into_iter().map(|n| n.text));
        }
        "unit" => {
            while line.peek().is_some() {
                alg.unit.push(line.number("a coefficient")?);
            }
        }
        "mul" => {
            let i = line.number("an index")?;
            let j = line.number("an index")?;
            let k = line.number("an index")?;
            let c = line.number("a coefficient")?;
            line.done()?;
            alg.mul.push((i, j, k, c));
        }
        _ => {
            line.at -= 1;
            return Err(line.error("an algebra entry"));
        }
    }
    Ok(())
}

/// Canonical text; `parse(&serialize(p)) == Ok(p)`.
pub fn serialize(p: &Presentation) -> String {
    use fmt::Write;
    let mut s = String::new();
    if let Some(c) = &p.category {
        writeln!(s, "category {}", c.text).unwrap();
    }
    for o in &p.objects {
        writeln!(s, "object {}", o.text).unwrap();
    }
    for m in &p.morphisms {
        writeln!(s, "morphism {} : {} -> {}", m.name.text, m.dom.text, m.cod.text).unwrap();
    }
    for (o, m) in &p.identities {
        writeln!(s, "identity {} = {}", o.text, m.text).unwrap();
    }
    for c in &p.composites {
        writeln!(s, "then({}, {}) = {}", c.f.text, c.g.text, c.h.text).unwrap();
    }
    match &p.tangent {
        None => {}
        Some(TangentBlock::Trivial(_)) => s.push_str("tangent trivial\n"),
        Some(TangentBlock::Explicit(t)) => {
            s.push_str("tangent\n");
            if t.functor_identity {
                s.push_str("  T identity\n");
            }
            for (a, b) in &t.obj_map {
                writeln!(s, "  T obj {} = {}", a.text, b.text).unwrap();
            }
            for (a, b) in &t.mor_map {
                writeln!(s, "  T mor {} = {}", a.text, b.text).unwrap();
            }
            for c in &t.components {
                writeln!(s, "  {} {} = {}", c.which, c.object.text, c.mor.text).unwrap();
            }
            for w in &t.witnesses {
                match &w.legs {
                    None => writeln!(s, "  witness {} = auto", w.object.text).unwrap(),
                    Some((a, b)) => {
                        writeln!(s, "  witness {} = {}, {}", w.object.text, a.text, b.text).unwrap()
                    }
                }
            }
            if let Some(b) = t.bound {
                writeln!(s, "  bound {b}").unwrap();
            }
            s.push_str("end\n");
        }
    }
    for sys in &p.systems {
        s.push_str("system ");
        s.push_str(&sys.name.text);
        s.push_str(" =");
        for m in &sys.members {
            s.push(' ');
            s.push_str(&m.text);
        }
        s.push('\n');
    }
    for a in &p.algebras {
        writeln!(s, "algebra {} over {}", a.name.text, a.p).unwrap();
        writeln!(s, "  basis {}", a.basis.join(" ")).unwrap();
        let unit: Vec<String> = a.unit.iter().map(u32::to_string).collect();
        writeln!(s, "  unit {}", unit.join(" ")).unwrap();
        for (i, j, k, c) in &a.mul {
            writeln!(s, "  mul {i} {j} {k} {c}").unwrap();
        }
        s.push_str("end\n");
    }
    s
}

/// A presentation turned into engine values.
#[derive(Clone, Debug)]
pub struct Elaborated {
    pub name: Option<String>,
    pub cat: FinCategory,
    pub tangent: Option<TangentStructure>,
    pub systems: BTreeMap<String, BTreeSet<MorId>>,
    pub algebras: Vec<(String, FiniteAlgebra)>,
}

struct Scope<'a> {
    builder: &'a CategoryBuilder,
    diags: &'a mut Vec<Diagnostic>,
}

impl Scope<'_> {
    fn obj(&mut self, n: &Name) -> Option<ObjId> {
        let r = self.builder.object_named(&n.text);
        if r.is_none() {
            self.diags.push(Diagnostic::at(
                DiagnosticKind::UnknownIdentifier,
                n.pos,
                &n.text,
                format!("unknown object `{}`", n.text),
            ));
        }
        r
    }

    fn mor(&mut self, n: &Name) -> Option<MorId> {
        let r = self.builder.morphism_named(&n.text);
        if r.is_none() {
            self.diags.push(Diagnostic::at(
                DiagnosticKind::UnknownIdentifier,
                n.pos,
                &n.text,
                format!("unknown morphism `{}`", n.text),
            ));
        }
        r
    }
}

fn duplicate(seen: &mut BTreeMap<String, usize>, n: &Name, what: &str) -> Option<Diagnostic> {
    match seen.get(&n.text) {
        Some(&first) => Some(
            Diagnostic::at(
                DiagnosticKind::Duplicate,
                n.pos,
                &n.text,
                format!(
                    "duplicate {what} `{}` on line {}, first declared on line {first}",
                    n.text, n.pos.line
                ),
            )
            .related(first),
        ),
        None => {
            seen.insert(n.text.clone(), n.pos.line);
            None
        }
    }
}

pub fn elaborate(p: &Presentation) -> Result<Elaborated, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut b = CategoryBuilder::new();
    let mut seen = BTreeMap::new();
    for o in &p.objects {
        match duplicate(&mut seen, o, "object") {
            Some(d) => diags.push(d),
            None => {
                b.object(&o.text).expect("fresh object");
            }
        }
    }
    let mut seen = BTreeMap::new();
    for m in &p.morphisms {
        if let Some(d) = duplicate(&mut seen, &m.name, "morphism") {
            diags.push(d);
            continue;
        }
        let mut sc = Scope {
            builder: &b,
            diags: &mut diags,
        };
        let (d, c) = (sc.obj(&m.dom), sc.obj(&m.cod));
        if let (Some(d), Some(c)) = (d, c) {
            b.morphism(&m.name.text, d, c).expect("fresh morphism");
        }
    }
    let mut seen = BTreeMap::new();
    for (o, m) in &p.identities {
        if let Some(d) = duplicate(&mut seen, o, "identity for object") {
            diags.push(d);
            continue;
        }
        let mut sc = Scope {
            builder: &b,
            diags: &mut diags,
        };
        if let (Some(oid), Some(mid)) = (sc.obj(o), sc.mor(m)) {
            if b.dom(mid) != oid || b.cod(mid) != oid {
                diags.push(Diagnostic::at(
                    DiagnosticKind::IllTyped,
                    m.pos,
                    &m.text,
                    format!("`{}` is not an endomorphism of `{}`", m.text, o.text),
                ));
            } else {
                b.identity(oid, mid).expect("checked above");
            }
        }
    }
    let mut recorded: BTreeMap<(MorId, MorId), (MorId, usize)> = BTreeMap::new();
    for c in &p.composites {
        let mut sc = Scope {
            builder: &b,
            diags: &mut diags,
        };
        let (f, g, h) = (sc.mor(&c.f), sc.mor(&c.g), sc.mor(&c.h));
        let (Some(f), Some(g), Some(h)) = (f, g, h) else {
            continue;
        };
        if b.cod(f) != b.dom(g) {
            diags.push(Diagnostic::at(
                DiagnosticKind::NonComposable,
                c.g.pos,
                &c.g.text,
                format!("`{}` does not start where `{}` ends", c.g.text, c.f.text),
            ));
            continue;
        }
        if b.dom(h) != b.dom(f) || b.cod(h) != b.cod(g) {
            diags.push(Diagnostic::at(
                DiagnosticKind::IllTyped,
                c.h.pos,
                &c.h.text,
                format!("`{}` does not have the type of then({}, {})", c.h.text, c.f.text, c.g.text),
            ));
            continue;
        }
        let line = c.h.pos.line;
        match recorded.get(&(f, g)) {
            Some(&(prev, first)) if prev != h => diags.push(
                Diagnostic::at(
                    DiagnosticKind::ConflictingComposite,
                    c.h.pos,
                    &c.h.text,
                    format!("then({}, {}) was already given on line {first}", c.f.text, c.g.text),
                )
                .related(first),
            ),
            Some(&(_, first)) => diags.push(
                Diagnostic::at(
                    DiagnosticKind::Duplicate,
                    c.f.pos,
                    &c.f.text,
                    format!(
                        "duplicate entry then({}, {}) on line {line}, first given on line {first}",
                        c.f.text, c.g.text
                    ),
                )
                .related(first),
            ),
            None => {
                recorded.insert((f, g), (h, line));
                b.then(f, g, h).expect("checked above");
            }
        }
    }
    let mut seen = BTreeMap::new();
    let mut algebras = Vec::new();
    for a in &p.algebras {
        if let Some(d) = duplicate(&mut seen, &a.name, "algebra") {
            diags.push(d);
            continue;
        }
        match FiniteAlgebra::from_constants(a.p, a.basis.clone(), &a.mul, a.unit.clone()) {
            Ok(alg) => algebras.push((a.name.text.clone(), alg)),
            Err(e) => diags.push(Diagnostic::at(
                DiagnosticKind::InvalidAlgebra,
                a.name.pos,
                &a.name.text,
                format!("algebra `{}`: {e}", a.name.text),
            )),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let cat = b.build();
    let header = p.category.as_ref().map_or(
        Pos { line: 1, column: 1 },
        |n| n.pos,
    );
    let report = validate_category(&cat);
    if !report.is_valid() {
        return Err(report
            .violations
            .iter()
            .map(|v| Diagnostic::at(DiagnosticKind::InvalidCategory, header, "", v.to_string()))
            .collect());
    }
    // systems may name minted identities, so they resolve after the build
    let mut seen = BTreeMap::new();
    let mut systems = BTreeMap::new();
    for s in &p.systems {
        if let Some(d) = duplicate(&mut seen, &s.name, "system") {
            diags.push(d);
            continue;
        }
        let mut members = BTreeSet::new();
        for m in &s.members {
            match cat.morphism_named(&m.text) {
                Some(id) => {
                    members.insert(id);
                }
                None => diags.push(Diagnostic::at(
                    DiagnosticKind::UnknownIdentifier,
                    m.pos,
                    &m.text,
                    format!("unknown morphism `{}`", m.text),
                )),
            }
        }
        systems.insert(s.name.text.clone(), members);
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let tangent = match &p.tangent {
        None => None,
        Some(TangentBlock::Trivial(_)) => Some(trivial_tangent(&cat).map_err(|e| {
            vec![Diagnostic::at(DiagnosticKind::InvalidTangent, header, "", e.to_string())]
        })?),
        Some(TangentBlock::Explicit(spec)) => Some(explicit_tangent(&cat, spec)?),
    };
    Ok(Elaborated {
        name: p.category.as_ref().map(|n| n.text.clone()),
        cat,
        tangent,
        systems,
        algebras,
    })
}

fn explicit_tangent(cat: &FinCategory, spec: &TangentSpec) -> Result<TangentStructure, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let invalid = |pos: Pos, tok: &str, msg: String| {
        Diagnostic::at(DiagnosticKind::InvalidTangent, pos, tok, msg)
    };
    let unknown = |n: &Name, what: &str| {
        Diagnostic::at(
            DiagnosticKind::UnknownIdentifier,
            n.pos,
            &n.text,
            format!("unknown {what} `{}`", n.text),
        )
    };
    let obj = |n: &Name, diags: &mut Vec<Diagnostic>| {
        let r = cat.object_named(&n.text);
        if r.is_none() {
            diags.push(unknown(n, "object"));
        }
        r
    };
    let mor = |n: &Name, diags: &mut Vec<Diagnostic>| {
        let r = cat.morphism_named(&n.text);
        if r.is_none() {
            diags.push(unknown(n, "morphism"));
        }
        r
    };

    let mut obj_map: Vec<Option<ObjId>> = vec![None; cat.object_count()];
    let mut mor_map: Vec<Option<MorId>> = vec![None; cat.morphism_count()];
    if spec.functor_identity {
        obj_map = cat.objects().map(Some).collect();
        mor_map = cat.morphisms().map(Some).collect();
    }
    for (a, b) in &spec.obj_map {
        if let (Some(a), Some(b)) = (obj(a, &mut diags), obj(b, &mut diags)) {
            obj_map[a.index()] = Some(b);
        }
    }
    for (a, b) in &spec.mor_map {
        if let (Some(a), Some(b)) = (mor(a, &mut diags), mor(b, &mut diags)) {
            mor_map[a.index()] = Some(b);
        }
    }
    // implicit identities follow their objects
    for o in cat.objects() {
        if let Some(t) = obj_map[o.index()] {
            mor_map[cat.id(o).index()].get_or_insert(cat.id(t));
        }
    }
    let mut comps: BTreeMap<&str, Vec<Option<MorId>>> = BTreeMap::new();
    let mut seen: BTreeMap<(&str, ObjId), usize> = BTreeMap::new();
    for c in &spec.components {
        if let (Some(o), Some(m)) = (obj(&c.object, &mut diags), mor(&c.mor, &mut diags)) {
            if let Some(&first) = seen.get(&(c.which, o)) {
                diags.push(
                    Diagnostic::at(
                        DiagnosticKind::Duplicate,
                        c.object.pos,
                        &c.object.text,
                        format!(
                            "duplicate component {} at `{}` on line {}, first given on line {first}",
                            c.which, c.object.text, c.object.pos.line
                        ),
                    )
                    .related(first),
                );
                continue;
            }
            seen.insert((c.which, o), c.object.pos.line);
            comps.entry(c.which).or_insert_with(|| vec![None; cat.object_count()])[o.index()] = Some(m);
        }
    }
    let mut explicit = BTreeMap::new();
    let mut witness_line = BTreeMap::new();
    for w in &spec.witnesses {
        let Some(o) = obj(&w.object, &mut diags) else {
            continue;
        };
        witness_line.insert(o, w.object.pos);
        if let Some((a, b)) = &w.legs {
            if let (Some(a), Some(b)) = (mor(a, &mut diags), mor(b, &mut diags)) {
                explicit.insert(o, (a, b));
            }
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    for o in cat.objects() {
        if obj_map[o.index()].is_none() {
            diags.push(invalid(spec.pos, "", format!("T has no image for object `{}`", cat.obj_name(o))));
        }
    }
    for m in cat.morphisms() {
        if mor_map[m.index()].is_none() {
            diags.push(invalid(spec.pos, "", format!("T has no image for morphism `{}`", cat.mor_name(m))));
        }
    }
    let required = ["p", "z", "s", "l", "c"];
    let has_n = comps.contains_key("n");
    for which in required.iter().copied().chain(has_n.then_some("n")) {
        for o in cat.objects() {
            if comps.get(which).is_none_or(|v| v[o.index()].is_none()) {
                diags.push(invalid(
                    spec.pos,
                    "",
                    format!("component {which} is missing at `{}`", cat.obj_name(o)),
                ));
            }
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let functor = Functor::new(
        obj_map.into_iter().map(Option::unwrap).collect(),
        mor_map.into_iter().map(Option::unwrap).collect(),
    );
    let report = validate_functor(cat, cat, &functor);
    if !report.is_valid() {
        return Err(report
            .violations
            .iter()
            .map(|v| invalid(spec.pos, "", format!("T is not a functor: {v}")))
            .collect());
    }
    let nat = |w: &str| NatTransformation::new(comps[w].iter().map(|m| m.unwrap()).collect());
    let data = TangentData {
        functor,
        projection: nat("p"),
        zero: nat("z"),
        sum: nat("s"),
        lift: nat("l"),
        flip: nat("c"),
        negation: has_n.then(|| nat("n")),
    };
    // typing of the components that witnesses depend on
    let t = |o: ObjId| data.functor.obj(o);
    for o in cat.objects() {
        let typed = |m: MorId, d: ObjId, c: ObjId| cat.dom(m) == d && cat.cod(m) == c;
        let checks = [
            ("p", typed(data.projection.at(o), t(o), o)),
            ("z", typed(data.zero.at(o), o, t(o))),
            ("l", typed(data.lift.at(o), t(o), t(t(o)))),
            ("c", typed(data.flip.at(o), t(t(o)), t(t(o)))),
            ("s", cat.cod(data.sum.at(o)) == t(o)),
            ("n", data.negation.as_ref().is_none_or(|n| typed(n.at(o), t(o), t(o)))),
        ];
        for (which, ok) in checks {
            if !ok {
                diags.push(invalid(
                    spec.pos,
                    "",
                    format!("component {which} at `{}` has the wrong type", cat.obj_name(o)),
                ));
            }
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let squares = explicit
        .iter()
        .map(|(&o, &(pi1, pi2))| {
            let p = data.projection.at(o);
            (
                o,
                Square {
                    top: pi2,
                    leftv: pi1,
                    rightv: p,
                    bottom: p,
                },
            )
        })
        .collect();
    let ts = TangentStructure::new(cat, data, &squares, spec.bound.unwrap_or(2)).map_err(|e| {
        let pos_of = |name: &str| {
            cat.object_named(name)
                .and_then(|o| witness_line.get(&o).copied())
                .unwrap_or(spec.pos)
        };
        let d = match &e {
            TangentError::WitnessNotPullback { object, .. } => Diagnostic::at(
                DiagnosticKind::WitnessNotPullback,
                pos_of(object),
                object,
                e.to_string(),
            ),
            TangentError::MissingWitness { object, .. } => {
                invalid(pos_of(object), object, e.to_string())
            }
            _ => invalid(spec.pos, "", e.to_string()),
        };
        vec![d]
    })?;
    for o in cat.objects() {
        if cat.dom(ts.s(o)) != ts.t2(o).apex(cat) {
            diags.push(invalid(
                spec.pos,
                "",
                format!("component s at `{}` does not start at T_2", cat.obj_name(o)),
            ));
        }
    }
    if diags.is_empty() {
        Ok(ts)
    } else {
        Err(diags)
    }
}

pub fn load(src: &str) -> Result<(Presentation, Elaborated), Vec<Diagnostic>> {
    let p = parse(src)?;
    let e = elaborate(&p)?;
    Ok((p, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIAMOND: &str = "\
category diamond
object bot a b top
morphism f : bot -> a
morphism g : a -> top
morphism h : bot -> top
then(f, g) = h
tangent trivial
system S = f g
";

    #[test]
    fn parses_and_elaborates() {
        let (p, e) = load(DIAMOND).unwrap();
        assert_eq!(p.objects.len(), 4);
        assert_eq!(e.cat.morphism_count(), 7);
        assert!(e.tangent.is_some());
        assert_eq!(e.systems["S"].len(), 2);
    }

    #[test]
    fn round_trip() {
        let p = parse(DIAMOND).unwrap();
        assert_eq!(parse(&serialize(&p)).unwrap(), p);
    }

    #[test]
    fn arrow_needs_no_spaces() {
        let p = parse("object A B\nmorphism f:A->B\n").unwrap();
        assert_eq!(p.morphisms[0].cod.text, "B");
    }

    #[test]
    fn syntax_error_is_positioned() {
        let d = parse("object A\nmorphism f A -> A\n").unwrap_err();
        assert_eq!(d[0].kind, DiagnosticKind::Syntax);
        assert_eq!((d[0].line, d[0].column), (2, 12));
        assert_eq!(d[0].token, "A");
    }

    #[test]
    fn duplicate_names_both_lines() {
        let d = load("object A\nmorphism f : A -> A\nmorphism f : A -> A\n").unwrap_err();
        assert_eq!(d[0].kind, DiagnosticKind::Duplicate);
        assert_eq!(d[0].line, 3);
        assert_eq!(d[0].related_line, Some(2));
        assert!(d[0].message.contains("line 2") && d[0].message.contains("line 3"));
    }

    #[test]
    fn non_composable() {
        let d = load("object A B\nmorphism f : A -> B\nthen(f, f) = f\n").unwrap_err();
        assert_eq!(d[0].kind, DiagnosticKind::NonComposable);
    }

    #[test]
    fn missing_composite_is_invalid_category() {
        let d = load("object A\nmorphism f : A -> A\n").unwrap_err();
        assert!(d.iter().all(|d| d.kind == DiagnosticKind::InvalidCategory));
    }

    #[test]
    fn explicit_identity_tangent() {
        let src = "object A\ntangent\n  T identity\n  p A = id_A\n  z A = id_A\n  s A = id_A\n  l A = id_A\n  c A = id_A\n  witness A = id_A, id_A\nend\n";
        // minted identities are in scope for the tangent block
        let (_, e) = load(src).unwrap();
        assert_eq!(e.tangent.unwrap().t2(ObjId(0)).apex(&e.cat), ObjId(0));
        let d = load(&src.replace("c A = id_A", "c A = q")).unwrap_err();
        assert_eq!(d[0].kind, DiagnosticKind::UnknownIdentifier);
        assert_eq!(d[0].token, "q");
    }
}
