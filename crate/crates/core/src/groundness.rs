//! Groundness: an abstract substitution over `V` is the subset of `V`
//! known to be bound to ground terms.
//!
//! The lattice is `℘(V)` ordered by `⊇`: bottom is `V`, top is `∅`, join is
//! intersection and meet is union.

use std::fmt;

use serde::Serialize;

use crate::domain::{AbstractDomain, AnnotationError};
use crate::term::{mgu_atoms, Atom, Expr, FreshVars, Renaming, Substitution, Term, Var, VarSet};

#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroundSet {
    universe: VarSet,
    ground: VarSet,
}

impl GroundSet {
    /// Panics if `ground` is not a subset of `universe`.
    pub fn new(universe: VarSet, ground: VarSet) -> Self {
        assert!(ground.is_subset(&universe), "ground set {ground:?} exceeds universe {universe:?}");
        GroundSet { universe, ground }
    }

    pub fn universe(&self) -> &VarSet {
        &self.universe
    }

    pub fn ground(&self) -> &VarSet {
        &self.ground
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.ground.contains(v)
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, v) in self.ground.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} ⊆ {:?}", self.universe)
    }
}

/// `θ♭ ∪ ⋃ {vars(t) | (X = t) ∈ E, X ∈ θ♭}`.
pub fn downwards(e: &Substitution, set: &VarSet) -> VarSet {
    let mut out = set.clone();
    for (x, t) in e.iter() {
        if set.contains(x) {
            out.extend(t.vars());
        }
    }
    out
}

/// `θ♭ ∪ {X | (X = t) ∈ E, vars(t) ⊆ θ♭}`.
pub fn upwards(e: &Substitution, set: &VarSet) -> VarSet {
    let mut out = set.clone();
    for (x, t) in e.iter() {
        if t.vars().is_subset(set) {
            out.insert(x.clone());
        }
    }
    out
}

/// Intermediate values of one abstract unification, for inspection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnifyTrace {
    pub renaming: Renaming,
    /// `θ♭Ψ ∪ σ♭`.
    pub combined: VarSet,
    /// `mgu(AΨ, B)` in solved form, or `None` on failure.
    pub solved: Option<Substitution>,
    pub after_downwards: VarSet,
    pub after_upwards: VarSet,
    pub result: GroundSet,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Groundness;

impl Groundness {
    /// Abstract unification, recording every step.
    pub fn unify_traced(
        &self,
        a: &Atom,
        a_val: &GroundSet,
        b: &Atom,
        b_val: &GroundSet,
        fresh: &mut FreshVars,
    ) -> UnifyTrace {
        let v = b_val.universe();
        let mut avoid = v.clone();
        avoid.extend(b.vars());
        let mut scope = a_val.universe().clone();
        scope.extend(a.vars());
        let psi = Renaming::fresh_for(scope, &avoid, fresh);
        let a_renamed = psi.rename(a);
        let mut combined: VarSet = a_val.ground().iter().map(|x| psi.rename_var(x)).collect();
        combined.extend(b_val.ground().iter().cloned());

        match mgu_atoms(&a_renamed, b) {
            None => UnifyTrace {
                renaming: psi,
                after_downwards: combined.clone(),
                after_upwards: combined.clone(),
                combined,
                solved: None,
                result: GroundSet::new(v.clone(), v.clone()),
            },
            Some(e0) => {
                let down = downwards(&e0, &combined);
                let up = upwards(&e0, &down);
                let result = GroundSet::new(v.clone(), up.intersection(v).cloned().collect());
                UnifyTrace {
                    renaming: psi,
                    combined,
                    solved: Some(e0),
                    after_downwards: down,
                    after_upwards: up,
                    result,
                }
            }
        }
    }
}

impl AbstractDomain for Groundness {
    type Elem = GroundSet;

    fn name(&self) -> &str {
        "groundness"
    }

    fn bottom(&self, vars: &VarSet) -> GroundSet {
        GroundSet::new(vars.clone(), vars.clone())
    }

    fn top(&self, vars: &VarSet) -> GroundSet {
        GroundSet::new(vars.clone(), VarSet::new())
    }

    fn identity(&self, vars: &VarSet) -> GroundSet {
        self.top(vars)
    }

    fn leq(&self, a: &GroundSet, b: &GroundSet) -> bool {
        debug_assert_eq!(a.universe, b.universe);
        a.ground.is_superset(&b.ground)
    }

    fn join(&self, a: &GroundSet, b: &GroundSet) -> GroundSet {
        debug_assert_eq!(a.universe, b.universe);
        GroundSet { universe: a.universe.clone(), ground: a.ground.intersection(&b.ground).cloned().collect() }
    }

    fn meet(&self, a: &GroundSet, b: &GroundSet) -> GroundSet {
        debug_assert_eq!(a.universe, b.universe);
        GroundSet { universe: a.universe.clone(), ground: a.ground.union(&b.ground).cloned().collect() }
    }

    fn unify(&self, a: &Atom, a_val: &GroundSet, b: &Atom, b_val: &GroundSet, fresh: &mut FreshVars) -> GroundSet {
        self.unify_traced(a, a_val, b, b_val, fresh).result
    }

    fn gamma_contains(&self, elem: &GroundSet, theta: &Substitution) -> bool {
        elem.ground.iter().all(|x| theta.lookup(x).is_ground())
    }

    fn height(&self, vars: &VarSet) -> usize {
        vars.len() + 1
    }

    /// A list of variables asserted ground, e.g. `[Y, Z]`.
    fn parse_annotation(&self, payload: &Term, vars: &VarSet) -> Result<GroundSet, AnnotationError> {
        let malformed = || AnnotationError::Malformed {
            found: payload.to_string(),
            expected: "a list of variables".to_string(),
        };
        let mut ground = VarSet::new();
        let mut cur = payload;
        loop {
            match cur {
                Term::Struct { functor, args } if &**functor == crate::term::LIST_NIL && args.is_empty() => break,
                Term::Struct { functor, args } if &**functor == crate::term::LIST_CONS && args.len() == 2 => {
                    let v = args[0].as_var().ok_or_else(malformed)?;
                    if !vars.contains(v) {
                        return Err(AnnotationError::UnknownVariable(v.to_string()));
                    }
                    ground.insert(v.clone());
                    cur = &args[1];
                }
                _ => return Err(malformed()),
            }
        }
        Ok(GroundSet::new(vars.clone(), ground))
    }

    fn render(&self, elem: &GroundSet) -> String {
        elem.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::var_set;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn f(n: &str, args: Vec<Term>) -> Term {
        Term::compound(n, args)
    }
    fn gs(universe: &[&str], ground: &[&str]) -> GroundSet {
        GroundSet::new(var_set(universe.iter().copied()), var_set(ground.iter().copied()))
    }

    #[test]
    fn gamma_examples() {
        let d = Groundness;
        let theta: Substitution = [
            (Var::new("Y"), Term::list(vec![Term::constant("2"), Term::constant("1")], None)),
            (Var::new("Z"), Term::list(vec![Term::constant("3"), Term::constant("1")], None)),
        ]
        .into_iter()
        .collect();
        assert!(d.gamma_contains(&gs(&["X", "Y", "Z"], &["Y", "Z"]), &theta));
        let nonground: Substitution = [(Var::new("Y"), f("f", vec![v("W")]))].into_iter().collect();
        assert!(!d.gamma_contains(&gs(&["Y"], &["Y"]), &nonground));
        assert!(d.gamma_contains(&gs(&["Y"], &[]), &nonground));
    }

    fn e0() -> Substitution {
        [
            (Var::new("U0"), f("f", vec![v("V0"), v("Y")])),
            (Var::new("Z"), f("f", vec![v("V0"), f("f", vec![v("W0"), v("W0")])])),
            (Var::new("X"), v("V0")),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn downwards_upwards_examples() {
        let down = downwards(&e0(), &var_set(["U0", "Z"]));
        assert_eq!(down, var_set(["U0", "Z", "V0", "Y", "W0"]));
        let up = upwards(&e0(), &down);
        assert_eq!(up, var_set(["U0", "Z", "V0", "Y", "W0", "X"]));

        let some = var_set(["A"]);
        assert_eq!(downwards(&Substitution::empty(), &some), some);
        assert_eq!(downwards(&e0(), &VarSet::new()), VarSet::new());
        assert_eq!(upwards(&Substitution::empty(), &some), some);
        let xa: Substitution = [(Var::new("X"), Term::constant("a"))].into_iter().collect();
        assert_eq!(upwards(&xa, &VarSet::new()), var_set(["X"]));
    }

    #[test]
    fn worked_unification() {
        let a = Atom::new("g", vec![v("U"), f("f", vec![v("V"), f("f", vec![v("W"), v("W")])]), v("V")]);
        let b = Atom::new("g", vec![f("f", vec![v("X"), v("Y")]), v("Z"), v("X")]);
        let trace =
            Groundness.unify_traced(&a, &gs(&["U", "V", "W"], &["U"]), &b, &gs(&["X", "Y", "Z"], &["Z"]), &mut FreshVars::new());
        assert_eq!(trace.result, gs(&["X", "Y", "Z"], &["X", "Y", "Z"]));
        // With the first fresh names standing in for U₀, V₀, W₀.
        let renamed = |n: &str| trace.renaming.rename_var(&Var::new(n)).to_string();
        assert_eq!(renamed("U"), "_G0");
        assert_eq!(renamed("V"), "_G1");
        assert_eq!(renamed("W"), "_G2");
        assert_eq!(trace.solved.unwrap().to_string(), "{X/_G1, Z/f(_G1,f(_G2,_G2)), _G0/f(_G1,Y)}");
        assert_eq!(trace.after_downwards, var_set(["_G0", "Z", "_G1", "Y", "_G2"]));
        assert_eq!(trace.after_upwards, var_set(["_G0", "Z", "_G1", "Y", "_G2", "X"]));
    }

    #[test]
    fn failure_returns_bottom() {
        let a = Atom::new("p", vec![Term::constant("a")]);
        let b = Atom::new("p", vec![Term::constant("b")]);
        let r = Groundness.unify(&a, &gs(&[], &[]), &b, &gs(&["X"], &[]), &mut FreshVars::new());
        assert_eq!(r, gs(&["X"], &["X"]));
    }

    #[test]
    fn member_entry() {
        let call = Atom::new("member", vec![v("X"), v("L")]);
        let head = Atom::new("member", vec![v("X"), Term::list(vec![v("X")], Some(v("L")))]);
        let r = Groundness.unify(&call, &gs(&["X", "L"], &["L"]), &head, &gs(&["X", "L"], &[]), &mut FreshVars::new());
        assert_eq!(r, gs(&["X", "L"], &["X", "L"]));
    }

    #[test]
    fn fresh_names_do_not_matter() {
        let call = Atom::new("member", vec![v("X"), v("L")]);
        let head = Atom::new("member", vec![v("X"), Term::list(vec![v("H")], Some(v("L")))]);
        let a_val = gs(&["X", "L", "K"], &["L"]);
        let b_val = gs(&["X", "H", "L"], &[]);
        let r1 = Groundness.unify(&call, &a_val, &head, &b_val, &mut FreshVars::new());
        let r2 = Groundness.unify(&call, &a_val, &head, &b_val, &mut FreshVars::starting_at(9_000));
        assert_eq!(r1, r2);
        assert_eq!(r1, gs(&["X", "H", "L"], &["H", "L"]));
    }

    #[test]
    fn annotations() {
        let d = Groundness;
        let vars = var_set(["X", "Y", "Z"]);
        let list = Term::list(vec![v("Y"), v("Z")], None);
        assert_eq!(d.parse_annotation(&list, &vars).unwrap(), gs(&["X", "Y", "Z"], &["Y", "Z"]));
        assert_eq!(d.parse_annotation(&Term::nil(), &vars).unwrap(), d.top(&vars));
        assert_eq!(
            d.parse_annotation(&Term::list(vec![v("W")], None), &vars),
            Err(AnnotationError::UnknownVariable("W".into()))
        );
        assert!(matches!(d.parse_annotation(&Term::constant("a"), &vars), Err(AnnotationError::Malformed { .. })));
    }

    #[test]
    fn render_is_sorted() {
        assert_eq!(Groundness.render(&gs(&["X", "L", "K"], &["X", "L", "K"])), "{K, L, X}");
        assert_eq!(Groundness.render(&gs(&["X"], &[])), "{}");
    }

    #[test]
    fn chain_length_bounded_by_height() {
        let vars = var_set(["A", "B", "C"]);
        let d = Groundness;
        // Walk from bottom to top removing one variable at a time.
        let mut cur = d.bottom(&vars);
        let mut chain = vec![cur.clone()];
        for x in vars.iter() {
            let mut g = cur.ground().clone();
            g.remove(x);
            let next = GroundSet::new(vars.clone(), g);
            assert!(d.leq(&cur, &next) && cur != next);
            chain.push(next.clone());
            cur = next;
        }
        assert_eq!(cur, d.top(&vars));
        assert_eq!(chain.len(), d.height(&vars));
    }
}
