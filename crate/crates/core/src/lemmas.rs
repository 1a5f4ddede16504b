//! Randomized checks of the renaming, restriction and composition
//! properties that unification relies on.
//!
//! Each check draws small atoms or equation sets over a bounded universe of
//! symbols and variables and reports the first counterexample it finds.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::sampling::TermSampler;
use crate::term::{mgu, mgu_atoms, Atom, Expr, Renaming, Substitution, Term, Var, VarSet};

pub const RENAMING_UNIFIABILITY: &str = "unifiability is invariant under renaming";
pub const RENAMING_CALLER: &str = "caller bindings are invariant under renaming";
pub const RENAMING_CALLEE: &str = "callee bindings are invariant under renaming";
pub const RENAMING_UNRENAMED: &str = "renamed and unrenamed unification agree";
pub const COMPOSE_RESTRICT: &str = "restriction distributes over composition";
pub const MGU_COMPOSITION: &str = "mgu of a union composes";

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lemma: &'static str,
    pub trials: usize,
    /// Trials whose premises held.
    pub effective: usize,
    pub counterexamples: usize,
    pub first_counterexample: Option<String>,
}

impl LemmaReport {
    fn new(lemma: &'static str) -> Self {
        LemmaReport { lemma, trials: 0, effective: 0, counterexamples: 0, first_counterexample: None }
    }

    fn record(&mut self, premise: bool, holds: bool, describe: impl FnOnce() -> String) {
        self.trials += 1;
        if premise {
            self.effective += 1;
            if !holds {
                self.counterexamples += 1;
                self.first_counterexample.get_or_insert_with(describe);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples == 0
    }
}

/// Shapes of the random inputs.
#[derive(Debug, Clone)]
pub struct Universe {
    pub terms: TermSampler,
    pub left: Vec<Var>,
    pub right: Vec<Var>,
    pub spare: Vec<Var>,
}

impl Default for Universe {
    fn default() -> Self {
        let vars = |names: &[&str]| names.iter().map(Var::new).collect::<Vec<_>>();
        Universe {
            terms: TermSampler {
                constants: vec!["a", "b"],
                functors: vec![("f", 1), ("g", 2)],
                max_depth: 2,
                var_weight: 0.7,
            },
            left: vars(&["X", "Y", "Z"]),
            right: vars(&["U", "V", "W"]),
            spare: vars(&["R1", "R2", "R3", "R4", "R5", "R6"]),
        }
    }
}

impl Universe {
    fn atom<R: Rng>(&self, vars: &[Var], rng: &mut R) -> Atom {
        self.terms.atom("p", 2, vars, rng)
    }

    fn all_vars(&self) -> Vec<Var> {
        self.left.iter().chain(&self.right).chain(&self.spare).cloned().collect()
    }

    /// A renaming of `domain` into variables outside `avoid`.
    fn renaming<R: Rng>(&self, domain: &VarSet, avoid: &VarSet, rng: &mut R) -> Renaming {
        let mut targets: Vec<Var> = self.all_vars().into_iter().filter(|v| !avoid.contains(v)).collect();
        targets.shuffle(rng);
        assert!(targets.len() >= domain.len(), "variable pool too small");
        Renaming::new(domain.iter().cloned().zip(targets).collect::<BTreeMap<_, _>>())
    }

    fn substitution<R: Rng>(&self, rng: &mut R) -> Substitution {
        let pool = self.all_vars();
        let mut dom = pool.clone();
        dom.shuffle(rng);
        dom.truncate(rng.gen_range(0..=4));
        dom.into_iter().map(|v| (v, self.terms.term(&pool, rng))).collect()
    }

    fn equations<R: Rng>(&self, rng: &mut R) -> Vec<(Term, Term)> {
        let pool: Vec<Var> = self.left.iter().chain(&self.right).cloned().collect();
        (0..rng.gen_range(1..=2)).map(|_| (self.terms.term(&pool, rng), self.terms.term(&pool, rng))).collect()
    }
}

fn compose_renaming(rho: &Renaming, m: &Substitution) -> Substitution {
    rho.as_substitution().compose(m)
}

fn show(s: &Option<Substitution>) -> String {
    s.as_ref().map_or_else(|| "fail".to_string(), |s| s.to_string())
}

/// Runs every check `trials` times.
pub fn check_all<R: Rng>(universe: &Universe, trials: usize, rng: &mut R) -> Vec<LemmaReport> {
    let mut unifiable = LemmaReport::new(RENAMING_UNIFIABILITY);
    let mut caller = LemmaReport::new(RENAMING_CALLER);
    let mut callee = LemmaReport::new(RENAMING_CALLEE);
    let mut unrenamed = LemmaReport::new(RENAMING_UNRENAMED);
    let mut restrict = LemmaReport::new(COMPOSE_RESTRICT);
    let mut composed = LemmaReport::new(MGU_COMPOSITION);
    let shared: Vec<Var> = universe.left.iter().chain(&universe.right).cloned().collect();

    for _ in 0..trials {
        // Two renamings of B with a common domain and ranges avoiding vars(A).
        let a = universe.atom(&shared, rng);
        let b = universe.atom(&shared, rng);
        let mut domain = b.vars();
        if let Some(extra) = universe.spare.choose(rng) {
            if rng.gen_bool(0.3) {
                domain.insert(extra.clone());
            }
        }
        let avoid = a.vars();
        let r1 = universe.renaming(&domain, &avoid, rng);
        let r2 = universe.renaming(&domain, &avoid, rng);
        let m1 = mgu_atoms(&a, &r1.rename(&b));
        let m2 = mgu_atoms(&a, &r2.rename(&b));
        let context = || format!("A = {a}, B = {b}, ρ1 = {}, ρ2 = {}", r1.as_substitution(), r2.as_substitution());
        unifiable.record(true, m1.is_some() == m2.is_some(), || format!("{}: {} vs {}", context(), show(&m1), show(&m2)));
        if let (Some(m1), Some(m2)) = (&m1, &m2) {
            let va = a.vars();
            caller.record(true, m1.variant_eq_on(m2, &va), || format!("{}: {m1} vs {m2}", context()));
            let c1 = compose_renaming(&r1, m1);
            let c2 = compose_renaming(&r2, m2);
            callee.record(true, c1.variant_eq_on(&c2, &domain), || format!("{}: {c1} vs {c2}", context()));
        } else {
            caller.record(false, true, String::new);
            callee.record(false, true, String::new);
        }

        // Unrenamed B against a renamed copy, with A apart from both.
        let a = universe.atom(&universe.left, rng);
        let b = universe.atom(&universe.right, rng);
        let mut avoid = a.vars();
        avoid.extend(universe.left.iter().cloned());
        let rho = universe.renaming(&b.vars(), &avoid, rng);
        let direct = mgu_atoms(&a, &b);
        let renamed = mgu_atoms(&a, &rho.rename(&b));
        let holds = match (&direct, &renamed) {
            (None, None) => true,
            (Some(d), Some(r)) => d.variant_eq_on(&compose_renaming(&rho, r), &b.vars()),
            _ => false,
        };
        unrenamed.record(true, holds, || {
            format!("A = {a}, B = {b}, ρ = {}: {} vs {}", rho.as_substitution(), show(&direct), show(&renamed))
        });

        // Restriction and composition.
        let t1 = universe.substitution(rng);
        let t2 = universe.substitution(rng);
        let v: VarSet = universe.all_vars().into_iter().filter(|_| rng.gen_bool(0.5)).collect();
        let lhs = t1.compose(&t2).restrict(&v);
        let rhs = t1.restrict(&v).compose(&t2).restrict(&v);
        restrict.record(true, lhs == rhs, || format!("θ1 = {t1}, θ2 = {t2}, V = {v:?}: {lhs} vs {rhs}"));

        // mgu(E1 ∪ E2) from mgu(E1) and mgu(E2 θ1).
        let e1 = universe.equations(rng);
        let e2 = universe.equations(rng);
        let union: Vec<(Term, Term)> = e1.iter().chain(&e2).cloned().collect();
        let whole = mgu(&union);
        match mgu(&e1) {
            None => composed.record(false, true, String::new),
            Some(t1) => {
                let e2t: Vec<(Term, Term)> = e2.iter().map(|(l, r)| (l.apply(&t1), r.apply(&t1))).collect();
                let t2 = mgu(&e2t);
                let vars = union.vars();
                let holds = match (&t2, &whole) {
                    (None, None) => true,
                    (Some(t2), Some(w)) => t1.compose(t2).variant_eq_on(w, &vars),
                    _ => false,
                };
                composed.record(true, holds, || {
                    format!("E1 = {e1:?}, E2 = {e2:?}: θ1 = {t1}, θ2 = {}, mgu(E1 ∪ E2) = {}", show(&t2), show(&whole))
                });
            }
        }
    }
    vec![unifiable, caller, callee, unrenamed, restrict, composed]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_lemmas_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in check_all(&Universe::default(), 1_000, &mut rng) {
            assert!(r.passed(), "{}: {:?}", r.lemma, r.first_counterexample);
            assert!(r.effective * 10 >= r.trials, "{} rarely exercised: {}/{}", r.lemma, r.effective, r.trials);
        }
    }
}
