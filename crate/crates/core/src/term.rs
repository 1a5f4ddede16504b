//! First-order terms, atoms, literals and substitutions.
//!
//! Everything here is immutable; the only stateful piece is [`FreshVars`],
//! which callers pass explicitly wherever a renaming apart is needed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// Prefix of variable names produced by [`FreshVars`]. User programs may not
/// use variables starting with it.
pub const RESERVED_PREFIX: &str = "_G";

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl AsRef<str>) -> Self {
        Var(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Var {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

pub type VarSet = BTreeSet<Var>;

/// Builds a variable set from names; mostly a convenience for tests.
pub fn var_set<I, S>(names: I) -> VarSet
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    names.into_iter().map(Var::new).collect()
}

pub const LIST_CONS: &str = ".";
pub const LIST_NIL: &str = "[]";

/// A first-order term. Constants are functors with no arguments, so the
/// arity of a structure is always `args.len()`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Struct { functor: Arc<str>, args: Vec<Term> },
}

impl Term {
    pub fn var(name: impl AsRef<str>) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: impl AsRef<str>) -> Term {
        Term::Struct { functor: Arc::from(name.as_ref()), args: Vec::new() }
    }

    pub fn compound(functor: impl AsRef<str>, args: Vec<Term>) -> Term {
        Term::Struct { functor: Arc::from(functor.as_ref()), args }
    }

    pub fn nil() -> Term {
        Term::constant(LIST_NIL)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::compound(LIST_CONS, vec![head, tail])
    }

    /// `[a, b | tail]`; pass `None` for a proper list.
    pub fn list(items: Vec<Term>, tail: Option<Term>) -> Term {
        items
            .into_iter()
            .rev()
            .fold(tail.unwrap_or_else(Term::nil), |acc, item| Term::cons(item, acc))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Struct { .. } => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Struct { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Struct { args, .. } => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Struct { args, .. } => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }
}

fn is_plain_atom(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(c) if c.is_ascii_digit() => name.chars().all(|c| c.is_ascii_digit()),
        _ => name == LIST_NIL,
    }
}

pub(crate) fn write_functor(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_plain_atom(name) {
        f.write_str(name)
    } else {
        write!(f, "'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Struct { functor, args } if &**functor == LIST_CONS && args.len() == 2 => {
                f.write_str("[")?;
                write!(f, "{}", args[0])?;
                let mut tail = &args[1];
                loop {
                    match tail {
                        Term::Struct { functor, args } if &**functor == LIST_CONS && args.len() == 2 => {
                            write!(f, ",{}", args[0])?;
                            tail = &args[1];
                        }
                        Term::Struct { functor, args } if &**functor == LIST_NIL && args.is_empty() => break,
                        other => {
                            write!(f, "|{other}")?;
                            break;
                        }
                    }
                }
                f.write_str("]")
            }
            Term::Struct { functor, args } => {
                write_functor(f, functor)?;
                write_args(f, args)
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (n, a) in args.iter().enumerate() {
        if n > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

/// `p(t1, ..., tn)`. Predicate symbols live in their own namespace: an atom
/// never unifies with a term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Arc<str>,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl AsRef<str>, args: Vec<Term>) -> Self {
        Atom { predicate: Arc::from(predicate.as_ref()), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn same_predicate(&self, other: &Atom) -> bool {
        self.predicate == other.predicate && self.args.len() == other.args.len()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_functor(f, &self.predicate)?;
        write_args(f, &self.args)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { positive: true, atom }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { positive: false, atom }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("\\+ ")?;
        }
        write!(f, "{}", self.atom)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Anything that contains variables: terms, atoms, literals, clauses and
/// sequences of those.
pub trait Expr: Sized {
    /// Visits every variable occurrence, left to right.
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var));

    /// Replaces every variable occurrence simultaneously.
    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Term) -> Self;

    fn vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    /// Distinct variables in order of first occurrence.
    fn vars_in_order(&self) -> Vec<Var> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.visit_vars(&mut |v| {
            if seen.insert(v) {
                out.push(v.clone());
            }
        });
        out
    }

    fn apply(&self, theta: &Substitution) -> Self {
        self.map_vars(&mut |v| theta.lookup(v))
    }

    /// Renames variables to `v0, v1, ...` in order of first occurrence, so two
    /// expressions are variants exactly when their canonical forms are equal.
    fn canonicalize(&self) -> Self {
        let order = self.vars_in_order();
        let names: HashMap<Var, Term> = order
            .into_iter()
            .enumerate()
            .map(|(n, v)| (v, Term::var(format!("v{n}"))))
            .collect();
        self.map_vars(&mut |v| names[v].clone())
    }

    fn variant_eq(&self, other: &Self) -> bool
    where
        Self: PartialEq,
    {
        self.canonicalize() == other.canonicalize()
    }
}

impl Expr for Term {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var)) {
        match self {
            Term::Var(v) => f(v),
            Term::Struct { args, .. } => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Term) -> Self {
        match self {
            Term::Var(v) => f(v),
            Term::Struct { functor, args } => Term::Struct {
                functor: functor.clone(),
                args: args.iter().map(|a| a.map_vars(f)).collect(),
            },
        }
    }
}

impl Expr for Atom {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var)) {
        self.args.iter().for_each(|a| a.visit_vars(f))
    }

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Term) -> Self {
        Atom { predicate: self.predicate.clone(), args: self.args.iter().map(|a| a.map_vars(f)).collect() }
    }
}

impl Expr for Literal {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var)) {
        self.atom.visit_vars(f)
    }

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Term) -> Self {
        Literal { positive: self.positive, atom: self.atom.map_vars(f) }
    }
}

impl<T: Expr> Expr for Vec<T> {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var)) {
        self.iter().for_each(|e| e.visit_vars(f))
    }

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Term) -> Self {
        self.iter().map(|e| e.map_vars(f)).collect()
    }
}

impl<A: Expr, B: Expr> Expr for (A, B) {
    fn visit_vars<'a>(&'a self, f: &mut dyn FnMut(&'a Var)) {
        self.0.visit_vars(f);
        self.1.visit_vars(f);
    }

    fn map_vars(&self, f: &mut dyn FnMut(&Var) -> Term) -> Self {
        (self.0.map_vars(f), self.1.map_vars(f))
    }
}

/// Atoms are treated as terms for unification; the predicate symbol gets a
/// prefix that no functor can carry.
pub(crate) fn atom_as_term(a: &Atom) -> Term {
    Term::Struct { functor: Arc::from(format!("\u{0}{}", a.predicate)), args: a.args.clone() }
}

/// A finite set of equations `l = r`.
pub type EquationSet = Vec<(Term, Term)>;

/// Equation set for `a = b` between two atoms.
pub fn atom_equation(a: &Atom, b: &Atom) -> EquationSet {
    vec![(atom_as_term(a), atom_as_term(b))]
}

/// A finite map from variables to terms, kept in idempotent solved form by
/// every constructor in this module.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn empty() -> Self {
        Substitution(BTreeMap::new())
    }

    /// Builds a substitution from bindings, dropping identity bindings.
    /// Does not check solved form; see [`Substitution::is_solved`].
    pub fn from_bindings<I: IntoIterator<Item = (Var, Term)>>(bindings: I) -> Self {
        Substitution(bindings.into_iter().filter(|(v, t)| t.as_var() != Some(v)).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    /// `v` under this substitution.
    pub fn lookup(&self, v: &Var) -> Term {
        self.0.get(v).cloned().unwrap_or_else(|| Term::Var(v.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> VarSet {
        self.0.keys().cloned().collect()
    }

    pub fn range_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        for t in self.0.values() {
            t.visit_vars(&mut |v| {
                out.insert(v.clone());
            });
        }
        out
    }

    /// No bound variable occurs in any right-hand side.
    pub fn is_solved(&self) -> bool {
        self.0.values().all(|t| {
            let mut ok = true;
            t.visit_vars(&mut |v| ok &= !self.0.contains_key(v));
            ok
        })
    }

    /// `self` followed by `other`: `e.apply(&a.compose(&b)) == e.apply(&a).apply(&b)`.
    ///
    /// The result is in solved form whenever both inputs are and no variable
    /// bound by `self` occurs in `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = BTreeMap::new();
        for (v, t) in &self.0 {
            let t = t.apply(other);
            if t.as_var() != Some(v) {
                out.insert(v.clone(), t);
            }
        }
        for (v, t) in &other.0 {
            if !self.0.contains_key(v) {
                out.insert(v.clone(), t.clone());
            }
        }
        Substitution(out)
    }

    /// `{X/t ∈ self | X ∈ vars}`.
    pub fn restrict(&self, vars: &VarSet) -> Substitution {
        Substitution(self.0.iter().filter(|(v, _)| vars.contains(*v)).map(|(v, t)| (v.clone(), t.clone())).collect())
    }

    /// Canonical representative of this substitution's action on `vars`.
    ///
    /// Two substitutions give the same result exactly when they instantiate
    /// `vars` identically up to a renaming of the remaining variables. An
    /// unbound variable of `vars` keeps its own name where possible; all other
    /// variables become `v0, v1, ...` in first-occurrence order.
    pub fn canonical_on(&self, vars: &VarSet) -> Substitution {
        let images: Vec<(&Var, Term)> = vars.iter().map(|v| (v, self.lookup(v))).collect();
        let mut names: HashMap<Var, Var> = HashMap::new();
        let mut taken: BTreeSet<Var> = BTreeSet::new();
        for (v, img) in &images {
            if let Term::Var(w) = img {
                if !names.contains_key(w) {
                    names.insert(w.clone(), (*v).clone());
                    taken.insert((*v).clone());
                }
            }
        }
        let mut counter = 0usize;
        let mut out = BTreeMap::new();
        for (v, img) in &images {
            let renamed = img.map_vars(&mut |w| {
                let name = names.entry(w.clone()).or_insert_with(|| loop {
                    let candidate = Var::new(format!("v{counter}"));
                    counter += 1;
                    if !vars.contains(&candidate) && !taken.contains(&candidate) {
                        taken.insert(candidate.clone());
                        break candidate;
                    }
                });
                Term::Var(name.clone())
            });
            if renamed.as_var() != Some(*v) {
                out.insert((*v).clone(), renamed);
            }
        }
        Substitution(out)
    }

    /// Equivalence modulo renaming, observed on `vars`.
    pub fn variant_eq_on(&self, other: &Substitution, vars: &VarSet) -> bool {
        self.canonical_on(vars) == other.canonical_on(vars)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, (v, t)) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}/{t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Substitution::from_bindings(iter)
    }
}

/// Most general unifier of an equation set, with occur check.
///
/// Equations are processed left to right and arguments pairwise in order.
/// When both sides are distinct variables the right-hand one is bound, so
/// the result is fully deterministic. `None` means not unifiable.
pub fn mgu(equations: &[(Term, Term)]) -> Option<Substitution> {
    let mut theta = Substitution::empty();
    let mut pending: Vec<(Term, Term)> = equations.iter().rev().cloned().collect();
    while let Some((l, r)) = pending.pop() {
        let l = l.apply(&theta);
        let r = r.apply(&theta);
        if l == r {
            continue;
        }
        match (l, r) {
            (l, Term::Var(v)) => bind(&mut theta, v, l)?,
            (Term::Var(v), r) => bind(&mut theta, v, r)?,
            (Term::Struct { functor: f, args: xs }, Term::Struct { functor: g, args: ys }) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                pending.extend(xs.into_iter().zip(ys).rev());
            }
        }
    }
    Some(theta)
}

fn bind(theta: &mut Substitution, v: Var, t: Term) -> Option<()> {
    if t.occurs(&v) {
        return None;
    }
    let single = Substitution(BTreeMap::from([(v.clone(), t.clone())]));
    for range in theta.0.values_mut() {
        if range.occurs(&v) {
            *range = range.apply(&single);
        }
    }
    theta.0.insert(v, t);
    Some(())
}

pub fn mgu_atoms(a: &Atom, b: &Atom) -> Option<Substitution> {
    if !a.same_predicate(b) {
        return None;
    }
    mgu(&atom_equation(a, b))
}

/// Source of fresh variable names `_G0, _G1, ...`.
///
/// Kept as an explicit value rather than global state so separate analyses
/// (or threads) never share a counter.
#[derive(Debug, Clone, Default)]
pub struct FreshVars {
    next: u64,
}

impl FreshVars {
    pub fn new() -> Self {
        FreshVars { next: 0 }
    }

    pub fn starting_at(next: u64) -> Self {
        FreshVars { next }
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var::new(format!("{RESERVED_PREFIX}{}", self.next));
        self.next += 1;
        v
    }

    pub fn issued(&self) -> u64 {
        self.next
    }
}

/// An injective variable-to-variable map.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Renaming(BTreeMap<Var, Var>);

impl Renaming {
    /// Panics if the map is not injective.
    pub fn new(map: BTreeMap<Var, Var>) -> Self {
        let range: BTreeSet<&Var> = map.values().collect();
        assert_eq!(range.len(), map.len(), "renaming must be injective");
        Renaming(map)
    }

    /// Maps each of `vars` to a fresh variable not in `avoid`.
    pub fn fresh_for(vars: impl IntoIterator<Item = Var>, avoid: &VarSet, fresh: &mut FreshVars) -> Self {
        let mut map = BTreeMap::new();
        for v in vars {
            if map.contains_key(&v) {
                continue;
            }
            let w = loop {
                let w = fresh.fresh();
                if !avoid.contains(&w) {
                    break w;
                }
            };
            map.insert(v, w);
        }
        Renaming(map)
    }

    pub fn get(&self, v: &Var) -> Option<&Var> {
        self.0.get(v)
    }

    pub fn domain(&self) -> VarSet {
        self.0.keys().cloned().collect()
    }

    pub fn as_substitution(&self) -> Substitution {
        Substitution::from_bindings(self.0.iter().map(|(v, w)| (v.clone(), Term::Var(w.clone()))))
    }

    pub fn rename_var(&self, v: &Var) -> Var {
        self.0.get(v).cloned().unwrap_or_else(|| v.clone())
    }

    pub fn rename<E: Expr>(&self, e: &E) -> E {
        e.map_vars(&mut |v| Term::Var(self.rename_var(v)))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Renames every variable of `e` to a fresh one, so the result shares no
/// variable with `avoid`.
pub fn rename_apart<E: Expr>(e: &E, avoid: &VarSet, fresh: &mut FreshVars) -> (E, Renaming) {
    let renaming = Renaming::fresh_for(e.vars_in_order(), avoid, fresh);
    (renaming.rename(e), renaming)
}

/// `unify(A, θ, B, ω)`: rename `Aθ` apart from `Bω`, then return
/// `ω ∘ mgu(Aθρ, Bω)`, or `None` when the atoms do not unify.
///
/// Only the restriction of the result to `vars(B)` is independent of the
/// fresh names chosen for `ρ`.
pub fn unify_open(
    a: &Atom,
    theta: &Substitution,
    b: &Atom,
    omega: &Substitution,
    fresh: &mut FreshVars,
) -> Option<Substitution> {
    if !a.same_predicate(b) {
        return None;
    }
    let b_inst = b.apply(omega);
    let mut avoid = b_inst.vars();
    avoid.extend(omega.domain());
    let (a_inst, _) = rename_apart(&a.apply(theta), &avoid, fresh);
    let m = mgu(&atom_equation(&a_inst, &b_inst))?;
    Some(omega.compose(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn f(n: &str, args: Vec<Term>) -> Term {
        Term::compound(n, args)
    }
    fn ints(xs: &[&str]) -> Term {
        Term::list(xs.iter().map(|x| c(x)).collect(), None)
    }
    fn subst(pairs: Vec<(&str, Term)>) -> Substitution {
        pairs.into_iter().map(|(n, t)| (Var::new(n), t)).collect()
    }

    #[test]
    fn vars_of_member_head() {
        let a = Atom::new("member", vec![v("X"), Term::list(vec![v("X")], Some(v("L")))]);
        assert_eq!(a.vars(), var_set(["X", "L"]));
        assert!(c("a").vars().is_empty());
    }

    #[test]
    fn apply_examples() {
        let a = Atom::new("member", vec![v("X"), v("K")]);
        assert_eq!(a.apply(&subst(vec![("X", c("2"))])).to_string(), "member(2,K)");
        let theta = subst(vec![("X1", v("X")), ("L", ints(&["2", "1"])), ("K", ints(&["3", "1"]))]);
        let b = Atom::new("member", vec![v("X"), v("L")]);
        assert_eq!(b.apply(&theta).to_string(), "member(X,[2,1])");
        assert_eq!(b.apply(&Substitution::empty()), b);
    }

    #[test]
    fn compose_examples() {
        let sigma = subst(vec![("Y", c("a"))]);
        assert_eq!(Substitution::empty().compose(&sigma), sigma);
        let composed = subst(vec![("X", v("Y"))]).compose(&sigma);
        assert_eq!(composed, subst(vec![("X", c("a")), ("Y", c("a"))]));
        assert!(composed.is_solved());
    }

    #[test]
    fn restrict_examples() {
        let theta = subst(vec![
            ("X", c("2")),
            ("X1", c("2")),
            ("L", ints(&["2", "1"])),
            ("K", ints(&["3", "1"])),
        ]);
        let r = theta.restrict(&var_set(["X", "L", "K"]));
        assert_eq!(r, subst(vec![("X", c("2")), ("L", ints(&["2", "1"])), ("K", ints(&["3", "1"]))]));
        assert!(theta.restrict(&VarSet::new()).is_empty());
    }

    #[test]
    fn mgu_examples() {
        let m = mgu_atoms(&Atom::new("p", vec![v("X")]), &Atom::new("p", vec![c("a")])).unwrap();
        assert_eq!(m, subst(vec![("X", c("a"))]));

        let a = Atom::new(
            "g",
            vec![v("U0"), f("f", vec![v("V0"), f("f", vec![v("W0"), v("W0")])]), v("V0")],
        );
        let b = Atom::new("g", vec![f("f", vec![v("X"), v("Y")]), v("Z"), v("X")]);
        let m = mgu_atoms(&a, &b).unwrap();
        assert_eq!(
            m,
            subst(vec![
                ("U0", f("f", vec![v("V0"), v("Y")])),
                ("Z", f("f", vec![v("V0"), f("f", vec![v("W0"), v("W0")])])),
                ("X", v("V0")),
            ])
        );
        assert!(m.is_solved());

        assert!(mgu(&[(v("X"), f("f", vec![v("X")]))]).is_none());
        assert!(mgu(&[(f("f", vec![v("X")]), f("g", vec![v("X")]))]).is_none());
        assert!(mgu_atoms(&Atom::new("p", vec![v("X")]), &Atom::new("q", vec![v("X")])).is_none());
        assert!(mgu_atoms(&Atom::new("p", vec![v("X")]), &Atom::new("p", vec![v("X"), v("Y")])).is_none());
    }

    #[test]
    fn rename_apart_examples() {
        let mut fresh = FreshVars::new();
        let a = Atom::new("member", vec![v("X"), v("L")]);
        let avoid = var_set(["X"]);
        let (renamed, rho) = rename_apart(&a, &avoid, &mut fresh);
        assert!(renamed.vars().is_disjoint(&avoid));
        assert!(renamed.vars().is_disjoint(&a.vars()));
        assert_eq!(rho.domain(), a.vars());
        assert!(a.variant_eq(&renamed));

        let (same, rho) = rename_apart(&c("a"), &avoid, &mut fresh);
        assert_eq!(same, c("a"));
        assert!(rho.is_empty());
    }

    #[test]
    fn unify_open_member_example() {
        let mut fresh = FreshVars::new();
        let call = Atom::new("member", vec![v("X"), v("L")]);
        let head = Atom::new("member", vec![v("X"), Term::list(vec![v("X")], Some(v("L")))]);
        let theta = subst(vec![("L", ints(&["2", "1"]))]);
        let eta = unify_open(&call, &theta, &head, &Substitution::empty(), &mut fresh).unwrap();
        let restricted = eta.restrict(&head.vars());
        assert_eq!(restricted, subst(vec![("X", c("2")), ("L", ints(&["1"]))]));

        let other = Atom::new("member", vec![c("a"), Term::nil()]);
        assert!(unify_open(&other, &Substitution::empty(), &head, &Substitution::empty(), &mut fresh).is_none());
    }

    #[test]
    fn variant_and_canonicalize() {
        let pxy = Atom::new("p", vec![v("X"), v("Y")]);
        let puv = Atom::new("p", vec![v("U"), v("V")]);
        let pxx = Atom::new("p", vec![v("X"), v("X")]);
        assert!(pxy.variant_eq(&puv));
        assert!(!pxx.variant_eq(&puv));
        let t = f("p", vec![v("Y"), v("X"), v("Y")]);
        assert_eq!(t.canonicalize(), f("p", vec![v("v0"), v("v1"), v("v0")]));
        assert_eq!(t.canonicalize().canonicalize(), t.canonicalize());
    }

    #[test]
    fn canonical_on_keeps_unbound_names() {
        let vars = var_set(["X", "Y"]);
        let a = subst(vec![("X", v("Y"))]);
        let b = subst(vec![("Y", v("X"))]);
        assert!(a.variant_eq_on(&b, &vars));
        let c1 = a.canonical_on(&vars);
        assert!(c1.is_solved());
        assert_eq!(c1.len(), 1);

        let g = subst(vec![("X", f("f", vec![v("_G7")]))]);
        let h = subst(vec![("X", f("f", vec![v("Q")]))]);
        assert!(g.variant_eq_on(&h, &vars));
        assert!(!g.variant_eq_on(&subst(vec![("X", f("f", vec![v("Y")]))]), &vars));
        assert_eq!(Substitution::empty().canonical_on(&vars), Substitution::empty());
    }

    #[test]
    fn display_lists() {
        assert_eq!(Term::list(vec![c("1"), c("2")], None).to_string(), "[1,2]");
        assert_eq!(Term::list(vec![v("H")], Some(v("T"))).to_string(), "[H|T]");
        assert_eq!(Term::nil().to_string(), "[]");
        assert_eq!(c("Hello").to_string(), "'Hello'");
    }
}
