//! Program text: lexer, parser, and the indexed program with its program
//! points.
//!
//! Clauses are numbered `1..=n` in textual order and query directives
//! `n+1..` after them. A program point `(i, j)` sits immediately before the
//! `j`-th body literal of unit `i`; `(i, m[i]+1)` is the exit point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::domain::{AbstractDomain, AnnotationError};
use crate::term::{Atom, Expr, Literal, Term, Var, VarSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: unsupported feature: {feature}")]
    Unsupported { pos: Pos, feature: String },
    #[error("{pos}: variable name `{name}` is reserved")]
    ReservedVariable { pos: Pos, name: String },
    #[error("{pos}: duplicate query name `{name}`")]
    DuplicateQuery { pos: Pos, name: String },
    #[error("no clauses")]
    NoClauses,
}

impl ParseError {
    fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::Syntax { pos, message: message.into() }
    }

    fn unsupported(pos: Pos, feature: impl Into<String>) -> Self {
        ParseError::Unsupported { pos, feature: feature.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Name(String),
    Quoted(String),
    Int(String),
    Var(String),
    Punct(&'static str),
    /// `(` immediately following a name, opening an argument list.
    OpenArgs,
    Symbol(String),
    End,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(s) | Tok::Int(s) | Tok::Var(s) | Tok::Symbol(s) => write!(f, "`{s}`"),
            Tok::Quoted(s) => write!(f, "`'{s}'`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::OpenArgs => f.write_str("`(`"),
            Tok::End => f.write_str("end of clause"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut name_end: Option<usize> = None;
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                { let ch = chars[i]; advance(&mut i, &mut line, &mut col, ch); }
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            return Err(ParseError::unsupported(pos, "block comments"));
        }
        let start = i;
        let follows_name = name_end == Some(i);
        name_end = None;
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                { let ch = chars[i]; advance(&mut i, &mut line, &mut col, ch); }
            }
            let word: String = chars[start..i].iter().collect();
            let tok = if c.is_ascii_uppercase() || c == '_' {
                Tok::Var(word)
            } else {
                name_end = Some(i);
                Tok::Name(word)
            };
            out.push((tok, pos));
            continue;
        }
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                { let ch = chars[i]; advance(&mut i, &mut line, &mut col, ch); }
            }
            if i < chars.len() && (chars[i] == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                return Err(ParseError::unsupported(pos, "floating-point numbers"));
            }
            out.push((Tok::Int(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c == '\'' {
            advance(&mut i, &mut line, &mut col, c);
            let mut name = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(ParseError::syntax(pos, "unterminated quoted atom")),
                    Some('\'') if chars.get(i + 1) == Some(&'\'') => {
                        name.push('\'');
                        advance(&mut i, &mut line, &mut col, '\'');
                        advance(&mut i, &mut line, &mut col, '\'');
                    }
                    Some('\'') => {
                        advance(&mut i, &mut line, &mut col, '\'');
                        break;
                    }
                    Some('\\') if i + 1 < chars.len() => {
                        name.push(chars[i + 1]);
                        advance(&mut i, &mut line, &mut col, '\\');
                        { let ch = chars[i]; advance(&mut i, &mut line, &mut col, ch); }
                    }
                    Some(&d) => {
                        name.push(d);
                        advance(&mut i, &mut line, &mut col, d);
                    }
                }
            }
            out.push((Tok::Quoted(name), pos));
            name_end = Some(i);
            continue;
        }
        if c == '"' {
            return Err(ParseError::unsupported(pos, "string literals"));
        }
        let punct = match c {
            '(' => Some("("),
            ')' => Some(")"),
            '[' => Some("["),
            ']' => Some("]"),
            '|' => Some("|"),
            ',' => Some(","),
            '!' => Some("!"),
            ';' => Some(";"),
            '{' => Some("{"),
            '}' => Some("}"),
            _ => None,
        };
        if let Some(p) = punct {
            advance(&mut i, &mut line, &mut col, c);
            let tok = if p == "(" && follows_name { Tok::OpenArgs } else { Tok::Punct(p) };
            out.push((tok, pos));
            continue;
        }
        if SYMBOL_CHARS.contains(c) {
            while i < chars.len() && SYMBOL_CHARS.contains(chars[i]) {
                { let ch = chars[i]; advance(&mut i, &mut line, &mut col, ch); }
            }
            let sym: String = chars[start..i].iter().collect();
            let at_end = chars.get(i).is_none_or(|d| d.is_whitespace() || *d == '%');
            let tok = match sym.as_str() {
                "." if at_end => Tok::End,
                ":-" => Tok::Punct(":-"),
                "\\+" => Tok::Punct("\\+"),
                _ => Tok::Symbol(sym),
            };
            out.push((tok, pos));
            continue;
        }
        return Err(ParseError::syntax(pos, format!("unexpected character `{c}`")));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// A raw parse tree; conjunctions and negations are ordinary structures
/// (`','/2` and `'\+'/1`) until they are turned into literals.
#[derive(Debug, Clone)]
pub(crate) struct Parsed {
    pub term: Term,
    pub pos: Pos,
}

pub(crate) struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    anon: usize,
}

/// Anonymous variables become `_GA0, _GA1, ...`, numbered per file.
const ANON_PREFIX: &str = "_GA";

const CONJ: &str = ",";
const NEG: &str = "\\+";

impl Parser {
    pub(crate) fn new(toks: Vec<(Tok, Pos)>) -> Self {
        Parser { toks, at: 0, anon: 0 }
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub(crate) fn expect_punct(&mut self, p: &'static str) -> Result<(), ParseError> {
        if *self.peek() == Tok::Punct(p) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    pub(crate) fn expect_end(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected("`.`"))
        }
    }

    /// Error for the current token, naming unsupported syntax where the token
    /// makes that clear.
    pub(crate) fn unexpected(&self, expected: &str) -> ParseError {
        let pos = self.pos();
        match self.peek() {
            Tok::Punct("!") => ParseError::unsupported(pos, "cut (`!`)"),
            Tok::Punct(";") => ParseError::unsupported(pos, "disjunction (`;`)"),
            Tok::Punct("{") | Tok::Punct("}") => ParseError::unsupported(pos, "curly-brace terms"),
            Tok::Symbol(s) if s == "-->" => ParseError::unsupported(pos, "DCG rules (`-->`)"),
            Tok::Symbol(s) => ParseError::unsupported(pos, format!("operator `{s}`")),
            Tok::Name(s) if OPERATOR_WORDS.contains(&s.as_str()) => {
                ParseError::unsupported(pos, format!("operator `{s}`"))
            }
            other => ParseError::syntax(pos, format!("expected {expected}, found {other}")),
        }
    }

    fn var(&mut self, name: String, pos: Pos) -> Result<Term, ParseError> {
        if name == "_" {
            let v = format!("{ANON_PREFIX}{}", self.anon);
            self.anon += 1;
            return Ok(Term::var(v));
        }
        if Var::new(&name).is_reserved() {
            return Err(ParseError::ReservedVariable { pos, name });
        }
        Ok(Term::var(name))
    }

    /// A term in argument position.
    pub(crate) fn term(&mut self) -> Result<Parsed, ParseError> {
        let (tok, pos) = self.bump();
        let term = match tok {
            Tok::Var(name) => self.var(name, pos)?,
            Tok::Int(n) => Term::constant(n),
            Tok::Name(name) | Tok::Quoted(name) => {
                if *self.peek() == Tok::OpenArgs {
                    self.bump();
                    let mut args = vec![self.term()?.term];
                    while *self.peek() == Tok::Punct(",") {
                        self.bump();
                        args.push(self.term()?.term);
                    }
                    self.expect_punct(")")?;
                    Term::compound(name, args)
                } else {
                    Term::constant(name)
                }
            }
            Tok::Punct("[") => {
                if *self.peek() == Tok::Punct("]") {
                    self.bump();
                    Term::nil()
                } else {
                    let mut items = vec![self.term()?.term];
                    while *self.peek() == Tok::Punct(",") {
                        self.bump();
                        items.push(self.term()?.term);
                    }
                    let tail = if *self.peek() == Tok::Punct("|") {
                        self.bump();
                        Some(self.term()?.term)
                    } else {
                        None
                    };
                    self.expect_punct("]")?;
                    Term::list(items, tail)
                }
            }
            Tok::Punct("(") | Tok::OpenArgs => {
                let inner = self.conjunction()?;
                self.expect_punct(")")?;
                inner.term
            }
            Tok::Punct("\\+") => {
                let inner = self.term()?;
                Term::compound(NEG, vec![inner.term])
            }
            _ => {
                self.at -= 1;
                return Err(self.unexpected("a term"));
            }
        };
        Ok(Parsed { term, pos })
    }

    /// `t1, t2, ..., tn` as a right-nested `','/2` structure.
    pub(crate) fn conjunction(&mut self) -> Result<Parsed, ParseError> {
        let first = self.term()?;
        if *self.peek() == Tok::Punct(",") {
            self.bump();
            let rest = self.conjunction()?;
            Ok(Parsed { term: Term::compound(CONJ, vec![first.term, rest.term]), pos: first.pos })
        } else {
            Ok(first)
        }
    }
}

const OPERATOR_WORDS: &[&str] = &["is", "mod", "rem", "xor"];

/// Predicates that a Prolog system would treat as built-in. A body literal
/// calling one of these is rejected unless the program defines it.
const BUILTINS: &[(&str, usize)] = &[
    ("true", 0),
    ("fail", 0),
    ("false", 0),
    ("call", 1),
    ("call", 2),
    ("call", 3),
    ("findall", 3),
    ("bagof", 3),
    ("setof", 3),
    ("assert", 1),
    ("asserta", 1),
    ("assertz", 1),
    ("retract", 1),
    ("write", 1),
    ("writeln", 1),
    ("print", 1),
    ("nl", 0),
    ("is", 2),
    ("var", 1),
    ("nonvar", 1),
    ("atom", 1),
    ("number", 1),
    ("atomic", 1),
    ("functor", 3),
    ("arg", 3),
    ("copy_term", 2),
    ("once", 1),
    ("not", 1),
];

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProgramPoint {
    pub unit: usize,
    pub pos: usize,
}

impl ProgramPoint {
    /// `(0,0)`, the dummy point execution starts from.
    pub const DUMMY: ProgramPoint = ProgramPoint { unit: 0, pos: 0 };

    pub const fn new(unit: usize, pos: usize) -> Self {
        ProgramPoint { unit, pos }
    }

    pub fn is_dummy(self) -> bool {
        self == Self::DUMMY
    }
}

impl fmt::Display for ProgramPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.unit, self.pos)
    }
}

impl fmt::Debug for ProgramPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub index: usize,
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Expr for Clause {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var)) {
        self.head.visit_vars(f);
        self.body.visit_vars(f);
    }

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Term) -> Self {
        Clause { index: self.index, head: self.head.map_vars(f), body: self.body.map_vars(f) }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            write_body(f, &self.body)?;
        }
        f.write_str(".")
    }
}

fn write_body(f: &mut fmt::Formatter<'_>, body: &[Literal]) -> fmt::Result {
    for (n, l) in body.iter().enumerate() {
        if n > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

/// A query description `:- query(Goal, Annotation).`: a goal plus a
/// domain-interpreted description of the substitutions it is called with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub index: usize,
    pub name: Option<String>,
    pub body: Vec<Literal>,
    pub annotation: Term,
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(":- query(")?;
        if let Some(name) = &self.name {
            crate::term::write_functor(f, name)?;
            f.write_str(", ")?;
        }
        f.write_str("(")?;
        write_body(f, &self.body)?;
        write!(f, "), {}).", self.annotation)
    }
}

/// A parsed program with clause/query indices and program points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    clauses: Vec<Clause>,
    queries: Vec<Query>,
    vars: Vec<VarSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("program point {0} does not exist")]
    Unknown(ProgramPoint),
    #[error("program point {0} is an exit point and carries no literal")]
    ExitPoint(ProgramPoint),
}

impl Program {
    pub fn new(clauses: Vec<Clause>, queries: Vec<Query>) -> Self {
        let mut vars = vec![VarSet::new()];
        for (n, c) in clauses.iter().enumerate() {
            debug_assert_eq!(c.index, n + 1);
            vars.push(c.vars());
        }
        for (n, q) in queries.iter().enumerate() {
            debug_assert_eq!(q.index, clauses.len() + n + 1);
            vars.push(q.body.vars());
        }
        Program { clauses, queries, vars }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn queries(&self) -> &[Query] {
        &self.queries
    }

    pub fn clause_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.clauses.iter().map(|c| c.index)
    }

    pub fn query_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.queries.iter().map(|q| q.index)
    }

    pub fn unit_count(&self) -> usize {
        self.clauses.len() + self.queries.len()
    }

    pub fn is_clause(&self, i: usize) -> bool {
        (1..=self.clauses.len()).contains(&i)
    }

    pub fn is_query(&self, i: usize) -> bool {
        i > self.clauses.len() && i <= self.unit_count()
    }

    pub fn clause(&self, i: usize) -> Option<&Clause> {
        i.checked_sub(1).and_then(|n| self.clauses.get(n))
    }

    pub fn query(&self, k: usize) -> Option<&Query> {
        k.checked_sub(self.clauses.len() + 1).and_then(|n| self.queries.get(n))
    }

    /// Finds a query by its name or, for a numeric key, by its index.
    pub fn find_query(&self, key: &str) -> Option<&Query> {
        if let Ok(k) = key.parse::<usize>() {
            return self.query(k);
        }
        self.queries.iter().find(|q| q.name.as_deref() == Some(key))
    }

    pub fn head(&self, i: usize) -> Option<&Atom> {
        self.clause(i).map(|c| &c.head)
    }

    pub fn body(&self, i: usize) -> &[Literal] {
        if let Some(c) = self.clause(i) {
            &c.body
        } else if let Some(q) = self.query(i) {
            &q.body
        } else {
            &[]
        }
    }

    /// `m[i]`.
    pub fn body_len(&self, i: usize) -> usize {
        self.body(i).len()
    }

    /// `V_i`, the variables of clause or query `i`.
    pub fn vars_of(&self, i: usize) -> &VarSet {
        &self.vars[i]
    }

    pub fn entry(&self, i: usize) -> ProgramPoint {
        ProgramPoint::new(i, 1)
    }

    pub fn exit(&self, i: usize) -> ProgramPoint {
        ProgramPoint::new(i, self.body_len(i) + 1)
    }

    pub fn contains_point(&self, p: ProgramPoint) -> bool {
        p.unit >= 1 && p.unit <= self.unit_count() && p.pos >= 1 && p.pos <= self.body_len(p.unit) + 1
    }

    /// All program points `N_P`, ordered by `(i, j)`.
    pub fn points(&self) -> Vec<ProgramPoint> {
        (1..=self.unit_count())
            .flat_map(|i| (1..=self.body_len(i) + 1).map(move |j| ProgramPoint::new(i, j)))
            .collect()
    }

    /// `p⁺`, defined when `p` is not an exit point.
    pub fn next(&self, p: ProgramPoint) -> Option<ProgramPoint> {
        (self.contains_point(p) && p.pos <= self.body_len(p.unit)).then(|| ProgramPoint::new(p.unit, p.pos + 1))
    }

    /// `p⁻`, defined when `p` is not an entry point.
    pub fn prev(&self, p: ProgramPoint) -> Option<ProgramPoint> {
        (self.contains_point(p) && p.pos >= 2).then(|| ProgramPoint::new(p.unit, p.pos - 1))
    }

    pub fn is_exit(&self, p: ProgramPoint) -> bool {
        self.contains_point(p) && p.pos == self.body_len(p.unit) + 1
    }

    /// `L_p`.
    pub fn literal_at(&self, p: ProgramPoint) -> Result<&Literal, PointError> {
        if !self.contains_point(p) {
            return Err(PointError::Unknown(p));
        }
        self.body(p.unit).get(p.pos - 1).ok_or(PointError::ExitPoint(p))
    }

    /// Source text that parses back to this program.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for c in &self.clauses {
            out.push_str(&render_anon(&c.to_string()));
            out.push('\n');
        }
        for q in &self.queries {
            out.push_str(&render_anon(&q.to_string()));
            out.push('\n');
        }
        out
    }
}

/// Anonymous variables print as `_`; they are renumbered identically when
/// the text is parsed again.
fn render_anon(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut quoted = false;
    while i < bytes.len() {
        let c = bytes[i];
        if c == '\'' {
            quoted = !quoted;
        }
        let boundary = i == 0 || !(bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == '_');
        if !quoted && boundary && bytes[i..].starts_with(&ANON_PREFIX.chars().collect::<Vec<_>>()) {
            let mut j = i + 3;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > i + 3 && !(j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == '_')) {
                out.push('_');
                i = j;
                continue;
            }
        }
        out.push(c);
        i += 1;
    }
    out
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_source())
    }
}

fn body_literals(parsed: &Parsed, out: &mut Vec<(Literal, Pos)>) -> Result<(), ParseError> {
    match &parsed.term {
        Term::Struct { functor, args } if &**functor == CONJ && args.len() == 2 => {
            for a in args {
                body_literals(&Parsed { term: a.clone(), pos: parsed.pos }, out)?;
            }
            Ok(())
        }
        Term::Struct { functor, args } if &**functor == NEG && args.len() == 1 => {
            let atom = to_atom(&args[0], parsed.pos)?;
            out.push((Literal::neg(atom), parsed.pos));
            Ok(())
        }
        t => {
            out.push((Literal::pos(to_atom(t, parsed.pos)?), parsed.pos));
            Ok(())
        }
    }
}

fn to_atom(t: &Term, pos: Pos) -> Result<Atom, ParseError> {
    match t {
        Term::Var(_) => Err(ParseError::unsupported(pos, "variable goals (meta-call)")),
        Term::Struct { functor, .. } if &**functor == NEG => {
            Err(ParseError::unsupported(pos, "nested negation"))
        }
        Term::Struct { functor, .. } if &**functor == CONJ => {
            Err(ParseError::unsupported(pos, "conjunction in this position"))
        }
        Term::Struct { functor, .. } if functor.chars().all(|c| c.is_ascii_digit()) => {
            Err(ParseError::syntax(pos, format!("number `{functor}` is not a goal")))
        }
        Term::Struct { functor, args } if &**functor == crate::term::LIST_CONS || &**functor == crate::term::LIST_NIL => {
            let _ = args;
            Err(ParseError::unsupported(pos, "list goals (consult)"))
        }
        Term::Struct { functor, args } => Ok(Atom::new(&**functor, args.clone())),
    }
}

enum Item {
    Clause(Atom, Vec<(Literal, Pos)>),
    Query(Option<(String, Pos)>, Vec<(Literal, Pos)>, Term),
}

/// Parses a program in the Edinburgh-style subset described in the README.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(lex(text)?);
    let mut items = Vec::new();
    while *p.peek() != Tok::Eof {
        if *p.peek() == Tok::Punct(":-") {
            let pos = p.pos();
            p.bump();
            items.push(directive(&mut p, pos)?);
            continue;
        }
        let head = p.term()?;
        let head_atom = match &head.term {
            Term::Struct { functor, .. } if &**functor == NEG || &**functor == CONJ => {
                return Err(ParseError::syntax(head.pos, "a clause head must be an atom"))
            }
            t => to_atom(t, head.pos).map_err(|_| ParseError::syntax(head.pos, "a clause head must be an atom"))?,
        };
        let mut body = Vec::new();
        if *p.peek() == Tok::Punct(":-") {
            p.bump();
            let b = p.conjunction()?;
            p.expect_end()?;
            body_literals(&b, &mut body)?;
        } else {
            p.expect_end()?;
        }
        items.push(Item::Clause(head_atom, body));
    }

    let mut clauses = Vec::new();
    let mut queries_raw = Vec::new();
    for item in items {
        match item {
            Item::Clause(head, body) => clauses.push((head, body)),
            Item::Query(name, body, ann) => queries_raw.push((name, body, ann)),
        }
    }
    if clauses.is_empty() {
        return Err(ParseError::NoClauses);
    }

    let defined: BTreeSet<(String, usize)> =
        clauses.iter().map(|(h, _)| (h.predicate.to_string(), h.arity())).collect();
    let check_builtin = |body: &[(Literal, Pos)]| -> Result<(), ParseError> {
        for (lit, pos) in body {
            let key = (lit.atom.predicate.to_string(), lit.atom.arity());
            if BUILTINS.iter().any(|(n, a)| *n == key.0 && *a == key.1) && !defined.contains(&key) {
                return Err(ParseError::unsupported(*pos, format!("built-in predicate {}/{}", key.0, key.1)));
            }
        }
        Ok(())
    };

    let n = clauses.len();
    let mut out_clauses = Vec::with_capacity(n);
    for (idx, (head, body)) in clauses.into_iter().enumerate() {
        check_builtin(&body)?;
        out_clauses.push(Clause { index: idx + 1, head, body: body.into_iter().map(|(l, _)| l).collect() });
    }
    let mut names: BTreeMap<String, Pos> = BTreeMap::new();
    let mut out_queries = Vec::new();
    for (k, (name, body, annotation)) in queries_raw.into_iter().enumerate() {
        check_builtin(&body)?;
        if let Some((name, pos)) = &name {
            if names.insert(name.clone(), *pos).is_some() {
                return Err(ParseError::DuplicateQuery { pos: *pos, name: name.clone() });
            }
        }
        out_queries.push(Query {
            index: n + k + 1,
            name: name.map(|(s, _)| s),
            body: body.into_iter().map(|(l, _)| l).collect(),
            annotation,
        });
    }
    Ok(Program::new(out_clauses, out_queries))
}

fn directive(p: &mut Parser, pos: Pos) -> Result<Item, ParseError> {
    match p.peek().clone() {
        Tok::Name(name) if name == "query" && *p.peek_at(1) == Tok::OpenArgs => {
            p.bump();
            p.bump();
            let mut args = vec![p.term()?];
            while *p.peek() == Tok::Punct(",") {
                p.bump();
                args.push(p.term()?);
            }
            p.expect_punct(")")?;
            p.expect_end()?;
            let (name, goal, annotation) = match args.len() {
                2 => (None, &args[0], args[1].term.clone()),
                3 => {
                    let name = match &args[0].term {
                        Term::Struct { functor, args: a } if a.is_empty() => functor.to_string(),
                        _ => return Err(ParseError::syntax(args[0].pos, "query name must be an atom")),
                    };
                    (Some((name, args[0].pos)), &args[1], args[2].term.clone())
                }
                _ => return Err(ParseError::syntax(pos, "query/2 or query/3 expected")),
            };
            let mut body = Vec::new();
            body_literals(goal, &mut body)?;
            Ok(Item::Query(name, body, annotation))
        }
        _ => Err(ParseError::unsupported(pos, "directives other than query/2 and query/3")),
    }
}

/// Interprets a query's annotation as the abstract description of its
/// calling substitutions.
pub fn interpret_annotation<D: AbstractDomain>(
    domain: &D,
    program: &Program,
    query: &Query,
) -> Result<D::Elem, AnnotationError> {
    domain.parse_annotation(&query.annotation, program.vars_of(query.index))
}

/// One `sample(Key, Var = Term, ...)` entry of a sample fixture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSample {
    /// Query index or query name.
    pub key: String,
    pub bindings: Vec<(Var, Term)>,
    pub pos: Pos,
}

/// Reads a sample fixture. The `=` sign is accepted only here.
pub fn parse_samples(text: &str) -> Result<Vec<RawSample>, ParseError> {
    let mut p = Parser::new(lex(text)?);
    let mut out = Vec::new();
    while *p.peek() != Tok::Eof {
        let pos = p.pos();
        match p.peek() {
            Tok::Name(n) if n == "sample" && *p.peek_at(1) == Tok::OpenArgs => {
                p.bump();
                p.bump();
            }
            _ => return Err(p.unexpected("`sample(`")),
        }
        let key_pos = p.pos();
        let key = match p.bump().0 {
            Tok::Int(s) | Tok::Name(s) | Tok::Quoted(s) if *p.peek() != Tok::OpenArgs => s,
            _ => return Err(ParseError::syntax(key_pos, "sample key must be a query index or name")),
        };
        let mut bindings = Vec::new();
        while *p.peek() == Tok::Punct(",") {
            p.bump();
            let var_pos = p.pos();
            let var = match p.bump().0 {
                Tok::Var(name) if name != "_" => match p.var(name, var_pos)? {
                    Term::Var(v) => v,
                    _ => unreachable!("named variables parse as variables"),
                },
                _ => return Err(ParseError::syntax(var_pos, "expected `Variable = Term`")),
            };
            if *p.peek() != Tok::Symbol("=".into()) {
                return Err(ParseError::syntax(p.pos(), "expected `=`"));
            }
            p.bump();
            bindings.push((var, p.term()?.term));
        }
        p.expect_punct(")")?;
        p.expect_end()?;
        out.push(RawSample { key, bindings, pos });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::var_set;

    pub(crate) const DIFF: &str = "
        diff(X, L, K) :- member(X, L), \\+ member(X, K).
        diff(X, L, K) :- member(X, K), \\+ member(X, L).
        member(X, [X|L]).
        member(X, [H|L]) :- member(X, L).
        :- query(diff(X, Y, Z), [Y, Z]).
    ";

    #[test]
    fn diff_program_indices_and_points() {
        let p = parse_program(DIFF).unwrap();
        assert_eq!(p.clause_indices().collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert_eq!(p.query_indices().collect::<Vec<_>>(), vec![5]);
        assert_eq!(p.points().len(), 11);
        assert_eq!(p.vars_of(1), &var_set(["X", "L", "K"]));
        assert_eq!(p.vars_of(5), &var_set(["X", "Y", "Z"]));
        assert_eq!(p.exit(3), ProgramPoint::new(3, 1));
        assert_eq!(p.exit(1), ProgramPoint::new(1, 3));
    }

    #[test]
    fn literal_lookup() {
        let p = parse_program(DIFF).unwrap();
        assert_eq!(p.literal_at(ProgramPoint::new(1, 2)).unwrap().to_string(), "\\+ member(X,K)");
        assert_eq!(p.literal_at(ProgramPoint::new(1, 1)).unwrap().to_string(), "member(X,L)");
        assert_eq!(p.literal_at(ProgramPoint::new(1, 3)), Err(PointError::ExitPoint(ProgramPoint::new(1, 3))));
        assert_eq!(p.literal_at(ProgramPoint::new(9, 1)), Err(PointError::Unknown(ProgramPoint::new(9, 1))));
    }

    #[test]
    fn point_arithmetic() {
        let p = parse_program(DIFF).unwrap();
        for pt in p.points() {
            if let Some(n) = p.next(pt) {
                assert_eq!(p.prev(n), Some(pt));
            }
            if let Some(m) = p.prev(pt) {
                assert_eq!(p.next(m), Some(pt));
            }
        }
        assert_eq!(p.next(ProgramPoint::new(1, 3)), None);
        assert_eq!(p.prev(ProgramPoint::new(1, 1)), None);
    }

    #[test]
    fn empty_text_has_no_clauses() {
        assert_eq!(parse_program(""), Err(ParseError::NoClauses));
        assert_eq!(parse_program("% only a comment\n"), Err(ParseError::NoClauses));
    }

    #[test]
    fn negation_without_queries() {
        let p = parse_program("p :- \\+ q.\nq.\n").unwrap();
        assert_eq!(p.queries().len(), 0);
        assert!(!p.literal_at(ProgramPoint::new(1, 1)).unwrap().positive);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_program("p(X) :- q(X)\nq(a).") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos.line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_program("p(_G1).") {
            Err(ParseError::ReservedVariable { name, .. }) => assert_eq!(name, "_G1"),
            other => panic!("unexpected {other:?}"),
        }
        let dup = "p.\n:- query(a, p, []).\n:- query(a, p, []).\n";
        assert!(matches!(parse_program(dup), Err(ParseError::DuplicateQuery { .. })));
    }

    #[test]
    fn unsupported_features_are_named() {
        let cases = [
            ("p(X) :- X is 1.", "operator `is`"),
            ("p(X) :- q(X), !.\nq(a).", "cut"),
            ("p(X) :- X = a.", "operator `=`"),
            ("p :- q ; r.\nq.\nr.", "disjunction"),
            ("p :- true.", "built-in predicate true/0"),
            ("p :- call(q).\nq.", "built-in predicate call/1"),
            (":- dynamic(p).\np.", "directives"),
        ];
        for (src, needle) in cases {
            match parse_program(src) {
                Err(e @ ParseError::Unsupported { .. }) => assert!(e.to_string().contains(needle), "{src}: {e}"),
                other => panic!("{src}: unexpected {other:?}"),
            }
        }
        // A program may define a predicate that shares a builtin's name.
        assert!(parse_program("p :- true.\ntrue.").is_ok());
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let p = parse_program("p(_, _).").unwrap();
        assert_eq!(p.vars_of(1).len(), 2);
    }

    #[test]
    fn round_trip_preserves_program() {
        let srcs = [
            DIFF,
            "p(_, [a|_]) :- \\+ q('Hello world', _).\nq(X, f(X)).\n:- query(named, (p(A, B), \\+ q(A, B)), [A]).\n",
            "app([], L, L).\napp([H|T], L, [H|R]) :- app(T, L, R).\n:- query(app(X, Y, [1,2]), [Z]).\n",
        ];
        for src in srcs {
            let p = parse_program(src).unwrap();
            let again = parse_program(&p.to_source()).unwrap();
            assert_eq!(p, again, "{}", p.to_source());
        }
    }

    #[test]
    fn spacing_between_name_and_paren_matters() {
        // `f (a)` is not a compound term.
        assert!(parse_program("p :- f (a).").is_err());
        assert!(parse_program("p :- f(a).\nf(a).").is_ok());
    }

    #[test]
    fn sample_fixtures() {
        let s = parse_samples("% fixture\nsample(5, Y = [2,1], Z = [3,1]).\nsample(main, X = f(W, _)).\nsample(5).\n").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].key, "5");
        assert_eq!(s[0].bindings[0], (Var::new("Y"), Term::list(vec![Term::constant("2"), Term::constant("1")], None)));
        assert_eq!(s[1].key, "main");
        assert_eq!(s[1].bindings[0].1.to_string(), "f(W,_GA0)");
        assert!(s[2].bindings.is_empty());
        assert!(matches!(parse_samples("sample(5, Y).").unwrap_err(), ParseError::Syntax { .. }));
        assert!(matches!(parse_samples("sample(5, _G1 = a).").unwrap_err(), ParseError::ReservedVariable { .. }));
        assert!(matches!(parse_samples("other(5).").unwrap_err(), ParseError::Syntax { .. }));
    }
}
