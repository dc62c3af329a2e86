//! Line-oriented structure files.
//!
//! ```text
//! manifold dim=3 coords=x1,x2,x3 nonvanishing="1+x1^2"
//! define f = "1 + x1^2"
//! bivector P { [1,2] = "f" }
//! endo A { [1,1]="x3" [2,2]="x3" [3,3]="x3" }
//! form phi deg=3 { [1,2,3]="2*x3/f" }
//! gauge B { [2,3]="1" }
//! reduction { q=q1,q2 s=s1 c=c1 c0=0 }
//! policy { seed=42 points=16 tol=1e-9 }
//! ```
//!
//! Indices are 1-based. Alternating tensors take strictly increasing index
//! tuples only; the loader fills in the rest by antisymmetry.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use pqnb_core::expr::{Expr, SamplingPolicy, Scalar};
use pqnb_core::reduction::{AdaptedReductionSetup, ReductionError};
use pqnb_core::structures::{GcStructure, PqnbStructure};
use pqnb_core::tensor::{Alternating, Chart, Endo, Form, Multivector, Variance};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Poisson,
    Pn,
    Pqn,
    Pqnb,
    Gc,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Poisson => "poisson",
            Kind::Pn => "pn",
            Kind::Pqn => "pqn",
            Kind::Pqnb => "pqnb",
            Kind::Gc => "gc",
        }
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "poisson" => Kind::Poisson,
            "pn" => Kind::Pn,
            "pqn" => Kind::Pqn,
            "pqnb" => Kind::Pqnb,
            "gc" => Kind::Gc,
            _ => return Err(format!("unknown structure kind `{s}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tensor {
    Bivector(Multivector),
    Endo(Endo),
    Form(Form),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionBlock {
    pub q: Vec<String>,
    pub s: Vec<String>,
    pub c: Vec<String>,
    pub c0: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureFile {
    pub chart: Chart,
    pub kind: Option<Kind>,
    pub tensors: Vec<(String, Tensor)>,
    pub gauges: Vec<(String, Form)>,
    pub reduction: Option<ReductionBlock>,
    pub policy: SamplingPolicy,
}

// ---- tokens ----

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Eq,
    Comma,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '-' | '+' | '/')
}

fn lex(src: &str) -> Result<Vec<Token>, FormatError> {
    let mut out = Vec::new();
    for (ln, text) in src.lines().enumerate() {
        let line = ln + 1;
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let simple = match c {
                '#' => break,
                c if c.is_whitespace() => {
                    i += 1;
                    continue;
                }
                '=' => Some(Tok::Eq),
                ',' => Some(Tok::Comma),
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                '[' => Some(Tok::LBracket),
                ']' => Some(Tok::RBracket),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Token { tok, line, col });
                i += 1;
            } else if c == '"' {
                let start = i + 1;
                let end = chars[start..]
                    .iter()
                    .position(|&d| d == '"')
                    .map(|p| start + p)
                    .ok_or_else(|| FormatError { line, col, message: "unterminated string".into() })?;
                out.push(Token { tok: Tok::Str(chars[start..end].iter().collect()), line, col });
                i = end + 1;
            } else if is_word(c) {
                let start = i;
                while i < chars.len() && is_word(chars[i]) {
                    i += 1;
                }
                out.push(Token { tok: Tok::Word(chars[start..i].iter().collect()), line, col });
            } else {
                return Err(FormatError { line, col, message: format!("unexpected character `{c}`") });
            }
        }
    }
    Ok(out)
}

// ---- parser ----

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    chart: Option<Chart>,
    defs: Vec<(String, Expr)>,
}

type Entry = (Vec<usize>, String, usize, usize);

impl Parser {
    fn err_at(&self, t: Option<&Token>, message: impl Into<String>) -> FormatError {
        let (line, col) = match t.or_else(|| self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        };
        FormatError { line, col, message: message.into() }
    }

    fn err(&self, message: impl Into<String>) -> FormatError {
        self.err_at(self.toks.get(self.pos), message)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, FormatError> {
        match self.toks.get(self.pos) {
            Some(t) if t.tok == want => {
                self.pos += 1;
                Ok(t.clone())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn word(&mut self, what: &str) -> Result<String, FormatError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn string(&mut self, what: &str) -> Result<(String, usize, usize), FormatError> {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Str(s), line, col }) => {
                let out = (s.clone(), *line, *col);
                self.pos += 1;
                Ok(out)
            }
            _ => Err(self.err(format!("expected quoted {what}"))),
        }
    }

    /// `key=value` pairs while the lookahead is `WORD =`. Values are a
    /// string or a comma-separated list of words.
    fn key_values(&mut self) -> Result<Vec<(String, Vec<String>, Token)>, FormatError> {
        let mut out = Vec::new();
        while matches!(self.peek(), Some(Tok::Word(_))) && self.peek2() == Some(&Tok::Eq) {
            let at = self.toks[self.pos].clone();
            let key = self.word("key")?;
            self.expect(Tok::Eq, "`=`")?;
            let mut vals = Vec::new();
            match self.peek() {
                Some(Tok::Str(_)) => vals.push(self.string("value")?.0),
                Some(Tok::Word(_)) => {
                    vals.push(self.word("value")?);
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        vals.push(self.word("list item")?);
                    }
                }
                _ => return Err(self.err(format!("expected a value for `{key}`"))),
            }
            out.push((key, vals, at));
        }
        Ok(out)
    }

    fn chart(&self, at: &Token) -> Result<&Chart, FormatError> {
        self.chart
            .as_ref()
            .ok_or_else(|| self.err_at(Some(at), "the manifold line must come first"))
    }

    fn scalar(&self, text: &str, line: usize, col: usize) -> Result<Scalar, FormatError> {
        let chart = self.chart.as_ref().expect("checked by caller");
        chart
            .scalar_with(text, &self.defs)
            .map_err(|e| FormatError { line, col, message: format!("in \"{text}\": {e}") })
    }

    fn entries(&mut self) -> Result<Vec<Entry>, FormatError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut out = Vec::new();
        while self.peek() != Some(&Tok::RBrace) {
            let open = self.expect(Tok::LBracket, "`[` or `}`")?;
            let mut idx = Vec::new();
            loop {
                let w = self.word("index")?;
                let i: usize = w
                    .parse()
                    .ok()
                    .filter(|&i| i >= 1)
                    .ok_or_else(|| self.err_at(Some(&open), format!("index `{w}` is not a positive integer")))?;
                idx.push(i - 1);
                match self.next().map(|t| t.tok) {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RBracket) => break,
                    _ => return Err(self.err_at(Some(&open), "expected `,` or `]` in index")),
                }
            }
            self.expect(Tok::Eq, "`=`")?;
            let (text, line, col) = self.string("expression")?;
            out.push((idx, text, line, col));
        }
        self.pos += 1;
        Ok(out)
    }

    fn check_index(&self, at: &Token, idx: &[usize], arity: usize, increasing: bool) -> Result<(), FormatError> {
        let n = self.chart(at)?.dim();
        if idx.len() != arity {
            return Err(self.err_at(Some(at), format!("expected {arity} indices, found {}", idx.len())));
        }
        if let Some(&i) = idx.iter().find(|&&i| i >= n) {
            return Err(self.err_at(Some(at), format!("index {} exceeds dimension {n}", i + 1)));
        }
        if increasing && idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(self.err_at(Some(at), "indices must be strictly increasing"));
        }
        Ok(())
    }

    fn alternating<K: Variance>(&mut self, at: &Token, degree: usize) -> Result<Alternating<K>, FormatError> {
        let n = self.chart(at)?.dim();
        let mut w = Alternating::<K>::zero(n, degree);
        let mut seen = Vec::new();
        for (idx, text, line, col) in self.entries()? {
            let here = Token { tok: Tok::LBracket, line, col };
            self.check_index(&here, &idx, degree, true)?;
            if seen.contains(&idx) {
                return Err(self.err_at(Some(&here), "component assigned twice"));
            }
            w.set(&idx, self.scalar(&text, line, col)?);
            seen.push(idx);
        }
        Ok(w)
    }

    fn manifold(&mut self, at: &Token) -> Result<(), FormatError> {
        if self.chart.is_some() {
            return Err(self.err_at(Some(at), "a second manifold line"));
        }
        let mut dim = None;
        let mut coords = None;
        let mut nonvanishing = Vec::new();
        for (key, vals, kt) in self.key_values()? {
            match key.as_str() {
                "dim" => {
                    dim = Some(vals[0].parse::<usize>().map_err(|_| self.err_at(Some(&kt), "dim must be a number"))?)
                }
                "coords" => coords = Some(vals),
                "nonvanishing" => nonvanishing.push((vals, kt)),
                _ => return Err(self.err_at(Some(&kt), format!("unknown manifold key `{key}`"))),
            }
        }
        let coords = match (coords, dim) {
            (Some(c), Some(d)) if c.len() != d => {
                return Err(self.err_at(Some(at), format!("dim={d} but {} coordinates", c.len())))
            }
            (Some(c), _) => c,
            (None, Some(d)) => (1..=d).map(|i| format!("x{i}")).collect(),
            (None, None) => return Err(self.err_at(Some(at), "manifold needs dim or coords")),
        };
        let chart = Chart::new(coords).map_err(|e| self.err_at(Some(at), e.to_string()))?;
        self.chart = Some(chart);
        for (vals, kt) in nonvanishing {
            for v in vals {
                let f = self.scalar(&v, kt.line, kt.col)?;
                self.chart.as_mut().expect("set above").declare_nonvanishing(f);
            }
        }
        Ok(())
    }

    fn coord_list(&self, at: &Token, names: &[String]) -> Result<Vec<String>, FormatError> {
        let chart = self.chart(at)?;
        for n in names {
            if !chart.coords().contains(n) {
                return Err(self.err_at(Some(at), format!("`{n}` is not a coordinate")));
            }
        }
        Ok(names.to_vec())
    }

    fn file(mut self) -> Result<StructureFile, FormatError> {
        let mut kind = None;
        let mut tensors: Vec<(String, Tensor)> = Vec::new();
        let mut gauges: Vec<(String, Form)> = Vec::new();
        let mut reduction = None;
        let mut policy = SamplingPolicy::default();
        while let Some(at) = self.next() {
            let kw = match &at.tok {
                Tok::Word(w) => w.clone(),
                _ => return Err(self.err_at(Some(&at), "expected a block keyword")),
            };
            if kw != "manifold" {
                self.chart(&at)?;
            }
            match kw.as_str() {
                "manifold" => self.manifold(&at)?,
                "kind" => {
                    let w = self.word("structure kind")?;
                    kind = Some(w.parse().map_err(|e: String| self.err_at(Some(&at), e))?);
                }
                "define" => {
                    let name = self.word("name")?;
                    self.expect(Tok::Eq, "`=`")?;
                    let (text, line, col) = self.string("expression")?;
                    let chart = self.chart(&at)?;
                    if chart.coords().contains(&name) {
                        return Err(self.err_at(Some(&at), format!("`{name}` shadows a coordinate")));
                    }
                    let e = pqnb_core::expr::parse_expr_with(&text, chart.coords(), &self.defs)
                        .map_err(|e| FormatError { line, col, message: format!("in \"{text}\": {e}") })?;
                    self.defs.push((name, e));
                }
                "bivector" | "endo" | "form" | "gauge" => {
                    let name = self.word("tensor name")?;
                    let kvs = self.key_values()?;
                    let tensor = match kw.as_str() {
                        "bivector" => Tensor::Bivector(self.alternating(&at, 2)?),
                        "gauge" => Tensor::Form(self.alternating(&at, 2)?),
                        "form" => {
                            let deg = kvs
                                .iter()
                                .find(|(k, _, _)| k == "deg")
                                .and_then(|(_, v, _)| v[0].parse::<usize>().ok())
                                .ok_or_else(|| self.err_at(Some(&at), "form needs deg=<k>"))?;
                            Tensor::Form(self.alternating(&at, deg)?)
                        }
                        _ => {
                            let n = self.chart(&at)?.dim();
                            let mut a = Endo::zero(n);
                            let mut seen = Vec::new();
                            for (idx, text, line, col) in self.entries()? {
                                let here = Token { tok: Tok::LBracket, line, col };
                                self.check_index(&here, &idx, 2, false)?;
                                if seen.contains(&idx) {
                                    return Err(self.err_at(Some(&here), "component assigned twice"));
                                }
                                a.set(idx[0], idx[1], self.scalar(&text, line, col)?);
                                seen.push(idx);
                            }
                            Tensor::Endo(a)
                        }
                    };
                    if let Some((k, _, kt)) = kvs.iter().find(|(k, _, _)| !(kw == "form" && k == "deg")) {
                        return Err(self.err_at(Some(kt), format!("unknown key `{k}`")));
                    }
                    if tensors.iter().any(|(n, _)| *n == name) || gauges.iter().any(|(n, _)| *n == name) {
                        return Err(self.err_at(Some(&at), format!("`{name}` defined twice")));
                    }
                    match (kw.as_str(), tensor) {
                        ("gauge", Tensor::Form(b)) => gauges.push((name, b)),
                        (_, t) => tensors.push((name, t)),
                    }
                }
                "reduction" => {
                    self.expect(Tok::LBrace, "`{`")?;
                    let mut block = ReductionBlock { q: vec![], s: vec![], c: vec![], c0: vec![] };
                    for (key, vals, kt) in self.key_values()? {
                        match key.as_str() {
                            "q" => block.q = self.coord_list(&kt, &vals)?,
                            "s" => block.s = self.coord_list(&kt, &vals)?,
                            "c" => block.c = self.coord_list(&kt, &vals)?,
                            "c0" => {
                                block.c0 = vals
                                    .iter()
                                    .map(|v| parse_rational(v).ok_or_else(|| self.err_at(Some(&kt), format!("`{v}` is not a rational"))))
                                    .collect::<Result<_, _>>()?
                            }
                            _ => return Err(self.err_at(Some(&kt), format!("unknown reduction key `{key}`"))),
                        }
                    }
                    self.expect(Tok::RBrace, "`}`")?;
                    reduction = Some(block);
                }
                "policy" => {
                    self.expect(Tok::LBrace, "`{`")?;
                    for (key, vals, kt) in self.key_values()? {
                        let v = &vals[0];
                        let bad = || self.err_at(Some(&kt), format!("bad value `{v}` for `{key}`"));
                        match key.as_str() {
                            "seed" => policy.seed = parse_u64(v).ok_or_else(bad)?,
                            "points" => policy.points = v.parse().map_err(|_| bad())?,
                            "tol" => policy.tolerance = v.parse().map_err(|_| bad())?,
                            "guard" => policy.guard = v.parse().map_err(|_| bad())?,
                            _ => return Err(self.err_at(Some(&kt), format!("unknown policy key `{key}`"))),
                        }
                    }
                    self.expect(Tok::RBrace, "`}`")?;
                    policy.validate().map_err(|e| self.err_at(Some(&at), e.to_string()))?;
                }
                other => return Err(self.err_at(Some(&at), format!("unknown block `{other}`"))),
            }
        }
        let chart = self.chart.ok_or(FormatError { line: 1, col: 1, message: "empty file: no manifold line".into() })?;
        Ok(StructureFile { chart, kind, tensors, gauges, reduction, policy })
    }
}

fn parse_u64(v: &str) -> Option<u64> {
    match v.strip_prefix("0x") {
        Some(h) => u64::from_str_radix(&h.replace('_', ""), 16).ok(),
        None => v.replace('_', "").parse().ok(),
    }
}

fn parse_rational(v: &str) -> Option<BigRational> {
    match v.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n.parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(v.parse().ok()?)),
    }
}

pub fn parse_file(src: &str) -> Result<StructureFile, FormatError> {
    let toks = lex(src)?;
    Parser { toks, pos: 0, chart: None, defs: Vec::new() }.file()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LoadError {
    #[error("missing `{0}` block")]
    Missing(String),
    #[error("`{name}` is a {found}, expected a {expected}")]
    WrongType { name: String, expected: &'static str, found: &'static str },
    #[error("`{name}` has degree {found}, expected {expected}")]
    WrongDegree { name: String, expected: usize, found: usize },
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

impl Tensor {
    fn kind_name(&self) -> &'static str {
        match self {
            Tensor::Bivector(_) => "bivector",
            Tensor::Endo(_) => "endo",
            Tensor::Form(_) => "form",
        }
    }
}

impl StructureFile {
    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn bivector(&self, name: &str) -> Result<Option<&Multivector>, LoadError> {
        match self.get(name) {
            None => Ok(None),
            Some(Tensor::Bivector(p)) => Ok(Some(p)),
            Some(t) => Err(LoadError::WrongType { name: name.into(), expected: "bivector", found: t.kind_name() }),
        }
    }

    pub fn endo(&self, name: &str) -> Result<Option<&Endo>, LoadError> {
        match self.get(name) {
            None => Ok(None),
            Some(Tensor::Endo(a)) => Ok(Some(a)),
            Some(t) => Err(LoadError::WrongType { name: name.into(), expected: "endo", found: t.kind_name() }),
        }
    }

    pub fn form(&self, name: &str, degree: usize) -> Result<Option<&Form>, LoadError> {
        match self.get(name) {
            None => Ok(None),
            Some(Tensor::Form(w)) if w.degree() == degree => Ok(Some(w)),
            Some(Tensor::Form(w)) => Err(LoadError::WrongDegree { name: name.into(), expected: degree, found: w.degree() }),
            Some(t) => Err(LoadError::WrongType { name: name.into(), expected: "form", found: t.kind_name() }),
        }
    }

    pub fn gauge(&self, name: Option<&str>) -> Result<&Form, LoadError> {
        match name {
            Some(n) => self.gauges.iter().find(|(g, _)| g == n).map(|(_, b)| b),
            None => self.gauges.first().map(|(_, b)| b),
        }
        .ok_or_else(|| LoadError::Missing(format!("gauge {}", name.unwrap_or(""))))
    }

    /// Declared kind, else the richest kind the tensors present allow.
    pub fn inferred_kind(&self) -> Kind {
        if let Some(k) = self.kind {
            return k;
        }
        if self.get("sigma").is_some() {
            Kind::Gc
        } else if self.get("H").is_some() {
            Kind::Pqnb
        } else if self.get("phi").is_some() {
            Kind::Pqn
        } else if self.get("A").is_some() {
            Kind::Pn
        } else {
            Kind::Poisson
        }
    }

    /// `(P, A, φ, H)`; every tensor but `P` defaults to zero.
    pub fn pqnb(&self) -> Result<PqnbStructure, LoadError> {
        let n = self.chart.dim();
        let p = self.bivector("P")?.ok_or_else(|| LoadError::Missing("bivector P".into()))?.clone();
        let a = self.endo("A")?.cloned().unwrap_or_else(|| Endo::zero(n));
        let phi = self.form("phi", 3)?.cloned().unwrap_or_else(|| Form::zero(n, 3));
        let h = self.form("H", 3)?.cloned().unwrap_or_else(|| Form::zero(n, 3));
        Ok(PqnbStructure::new(self.chart.clone(), p, a, phi, h))
    }

    /// `(A, P, σ)` with background `H`; missing tensors are zero.
    pub fn gc(&self) -> Result<GcStructure, LoadError> {
        let n = self.chart.dim();
        let p = self.bivector("P")?.cloned().unwrap_or_else(|| Multivector::zero(n, 2));
        let a = self.endo("A")?.cloned().unwrap_or_else(|| Endo::zero(n));
        let sigma = self.form("sigma", 2)?.cloned().unwrap_or_else(|| Form::zero(n, 2));
        let h = self.form("H", 3)?.cloned().unwrap_or_else(|| Form::zero(n, 3));
        Ok(GcStructure::new(self.chart.clone(), a, p, sigma, h))
    }

    pub fn reduction_setup(&self) -> Result<AdaptedReductionSetup, LoadError> {
        let block = self.reduction.as_ref().ok_or_else(|| LoadError::Missing("reduction".into()))?;
        let index = |names: &[String]| -> Vec<usize> {
            names.iter().map(|n| self.chart.coords().iter().position(|c| c == n).expect("validated")).collect()
        };
        Ok(AdaptedReductionSetup::new(
            self.chart.clone(),
            index(&block.q),
            index(&block.s),
            index(&block.c),
            block.c0.clone(),
        )?)
    }

    /// A file holding just `s`, with the given kind.
    pub fn from_pqnb(s: &PqnbStructure, kind: Kind, policy: &SamplingPolicy) -> StructureFile {
        let mut tensors = vec![("P".to_string(), Tensor::Bivector(s.p.clone()))];
        if kind != Kind::Poisson {
            tensors.push(("A".into(), Tensor::Endo(s.a.clone())));
        }
        if matches!(kind, Kind::Pqn | Kind::Pqnb) {
            tensors.push(("phi".into(), Tensor::Form(s.phi.clone())));
        }
        if kind == Kind::Pqnb {
            tensors.push(("H".into(), Tensor::Form(s.h.clone())));
        }
        StructureFile {
            chart: s.chart.clone(),
            kind: Some(kind),
            tensors,
            gauges: Vec::new(),
            reduction: None,
            policy: policy.clone(),
        }
    }

    pub fn from_gc(j: &GcStructure, policy: &SamplingPolicy) -> StructureFile {
        StructureFile {
            chart: j.chart.clone(),
            kind: Some(Kind::Gc),
            tensors: vec![
                ("P".into(), Tensor::Bivector(j.p.clone())),
                ("A".into(), Tensor::Endo(j.a.clone())),
                ("sigma".into(), Tensor::Form(j.sigma.clone())),
                ("H".into(), Tensor::Form(j.h.clone())),
            ],
            gauges: Vec::new(),
            reduction: None,
            policy: policy.clone(),
        }
    }
}

// ---- emitter ----

fn quote(chart: &Chart, s: &Scalar) -> String {
    format!("\"{}\"", chart.display(s))
}

fn one_based(idx: &[usize]) -> String {
    idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn emit_entries<'a>(
    out: &mut String,
    chart: &Chart,
    entries: impl Iterator<Item = (Vec<usize>, &'a Scalar)>,
) -> fmt::Result {
    let mut any = false;
    for (idx, v) in entries.filter(|(_, v)| !v.is_zero()) {
        write!(out, "\n  [{}] = {}", one_based(&idx), quote(chart, v))?;
        any = true;
    }
    out.push_str(if any { "\n}\n" } else { " }\n" });
    Ok(())
}

impl fmt::Display for StructureFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ch = &self.chart;
        let mut out = String::new();
        write!(out, "manifold dim={} coords={}", ch.dim(), ch.coords().join(","))?;
        for g in ch.nonvanishing() {
            write!(out, " nonvanishing={}", quote(ch, g))?;
        }
        out.push('\n');
        if let Some(k) = self.kind {
            writeln!(out, "kind {}", k.name())?;
        }
        for (name, t) in &self.tensors {
            match t {
                Tensor::Bivector(p) => {
                    write!(out, "bivector {name} {{")?;
                    emit_entries(&mut out, ch, p.indexed())?;
                }
                Tensor::Endo(a) => {
                    write!(out, "endo {name} {{")?;
                    let n = ch.dim();
                    let items = (0..n).flat_map(|i| (0..n).map(move |j| (vec![i, j], a.get(i, j))));
                    emit_entries(&mut out, ch, items)?;
                }
                Tensor::Form(w) => {
                    write!(out, "form {name} deg={} {{", w.degree())?;
                    emit_entries(&mut out, ch, w.indexed())?;
                }
            }
        }
        for (name, b) in &self.gauges {
            write!(out, "gauge {name} {{")?;
            emit_entries(&mut out, ch, b.indexed())?;
        }
        if let Some(r) = &self.reduction {
            let c0: Vec<String> = r.c0.iter().map(|v| v.to_string()).collect();
            write!(out, "reduction {{ q={}", r.q.join(","))?;
            if !r.s.is_empty() {
                write!(out, " s={}", r.s.join(","))?;
            }
            if !r.c.is_empty() {
                write!(out, " c={} c0={}", r.c.join(","), c0.join(","))?;
            }
            out.push_str(" }\n");
        }
        let p = &self.policy;
        writeln!(
            out,
            "policy {{ seed={:#x} points={} tol={:e} guard={:e} }}",
            p.seed, p.points, p.tolerance, p.guard
        )?;
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = r#"
# rescaled identity on R^3
manifold dim=3 coords=x1,x2,x3 nonvanishing="1+x1^2"
define f = "1 + x1^2"
bivector P { [1,2] = "f" }
endo A { [1,1]="x3" [2,2]="x3" [3,3]="x3" }
form H deg=3 { [1,2,3] = "-1/f" }
form phi deg=3 { [1,2,3] = "2*x3/f" }
"#;

    #[test]
    fn parses_and_infers_kind() {
        let f = parse_file(EX1).unwrap();
        assert_eq!(f.inferred_kind(), Kind::Pqnb);
        let s = f.pqnb().unwrap();
        assert_eq!(s.p.get(&[1, 0]), f.chart.scalar("-1 - x1^2").unwrap());
        assert_eq!(f.chart.nonvanishing().len(), 1);
    }

    #[test]
    fn emit_parse_is_stable() {
        let f = parse_file(EX1).unwrap();
        let once = f.to_string();
        let again = parse_file(&once).unwrap().to_string();
        assert_eq!(once, again);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_file("").unwrap_err();
        assert!(e.message.contains("empty"));
        let e = parse_file("manifold dim=2\nbivector P { [2,1] = \"1\" }").unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (2, "indices must be strictly increasing"));
        let e = parse_file("manifold dim=2\nbivector P { [1,3] = \"1\" }").unwrap_err();
        assert!(e.message.contains("exceeds"));
        let e = parse_file("manifold dim=2\nbivector P { [1,2] = \"x9\" }").unwrap_err();
        assert_eq!((e.line, e.col), (2, 22));
        let e = parse_file("manifold dim=2\nbivector P { [1,2] = \"1\" [1,2] = \"2\" }").unwrap_err();
        assert!(e.message.contains("twice"));
        let e = parse_file("bivector P { }").unwrap_err();
        assert!(e.message.contains("first"));
    }

    #[test]
    fn reduction_and_policy_blocks() {
        let src = "manifold coords=q1,q2,s1,c1\nbivector P { [1,2]=\"1\" }\nreduction { q=q1,q2 s=s1 c=c1 c0=1/2 }\npolicy { seed=42 points=8 tol=1e-10 }";
        let f = parse_file(src).unwrap();
        let r = f.reduction.as_ref().unwrap();
        assert_eq!(r.c0, vec![BigRational::new(1.into(), 2.into())]);
        assert_eq!((f.policy.seed, f.policy.points), (42, 8));
        let su = f.reduction_setup().unwrap();
        assert_eq!(su.c, vec![3]);
        assert_eq!(parse_file(&f.to_string()).unwrap(), f);
    }
}
