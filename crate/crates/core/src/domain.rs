//! The abstract-domain interface and a conformance harness for it.
//!
//! A domain supplies, for every finite variable set `V`, a complete lattice
//! of abstract substitutions with a concretization given as a membership
//! test, an abstract identity, and an abstract unification. The generic
//! semantics are sound for any domain meeting four conditions:
//!
//! * C1: the elements over `V` form a complete lattice;
//! * C2: concretization is monotone;
//! * C3: the empty substitution belongs to the concretization of the
//!   abstract identity;
//! * C4: abstract unification over-approximates concrete unification of
//!   every pair of described substitutions.
//!
//! [`conformance_suite`] checks all four on random samples.

use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::term::{unify_open, Atom, FreshVars, Substitution, Term, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotationError {
    #[error("unknown variable `{0}` in annotation")]
    UnknownVariable(String),
    #[error("malformed annotation `{found}`: {expected}")]
    Malformed { found: String, expected: String },
}

pub trait AbstractDomain: Sync {
    /// An abstract substitution. Elements know the variable set they range
    /// over.
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    fn name(&self) -> &str;

    fn bottom(&self, vars: &VarSet) -> Self::Elem;
    fn top(&self, vars: &VarSet) -> Self::Elem;
    /// The least element whose concretization contains the empty
    /// substitution.
    fn identity(&self, vars: &VarSet) -> Self::Elem;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Abstract unification of `a` described by `a_val` (over some `U`) with
    /// `b` described by `b_val` (over `V`); the result ranges over `V`.
    fn unify(&self, a: &Atom, a_val: &Self::Elem, b: &Atom, b_val: &Self::Elem, fresh: &mut FreshVars) -> Self::Elem;

    /// Concretization as a membership test.
    fn gamma_contains(&self, elem: &Self::Elem, theta: &Substitution) -> bool;

    /// Number of elements in the longest strictly increasing chain over
    /// `vars`.
    fn height(&self, vars: &VarSet) -> usize;

    fn parse_annotation(&self, payload: &Term, vars: &VarSet) -> Result<Self::Elem, AnnotationError>;

    fn render(&self, elem: &Self::Elem) -> String;
}

/// Random inputs for the conformance suite.
pub trait DomainSampler<D: AbstractDomain> {
    fn universe<R: Rng>(&mut self, rng: &mut R) -> VarSet;
    fn element<R: Rng>(&mut self, domain: &D, vars: &VarSet, rng: &mut R) -> D::Elem;
    /// An atom whose variables are drawn from `vars`.
    fn atom<R: Rng>(&mut self, vars: &VarSet, rng: &mut R) -> Atom;
    /// A substitution the sampler believes lies in the concretization of
    /// `elem`. The suite re-checks membership and skips the trial if not.
    fn concretize<R: Rng>(&mut self, domain: &D, elem: &D::Elem, rng: &mut R) -> Substitution;
    /// Any substitution over `vars`.
    fn substitution<R: Rng>(&mut self, vars: &VarSet, rng: &mut R) -> Substitution;
}

#[derive(Debug, Clone, Serialize)]
pub struct LawResult {
    pub law: &'static str,
    pub trials: usize,
    /// Trials where the law's premise held, so the check was not vacuous.
    pub effective: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl LawResult {
    fn new(law: &'static str) -> Self {
        LawResult { law, trials: 0, effective: 0, failures: 0, counterexample: None }
    }

    fn record(&mut self, premise: bool, holds: bool, describe: impl FnOnce() -> String) {
        self.trials += 1;
        if premise {
            self.effective += 1;
            if !holds {
                self.failures += 1;
                if self.counterexample.is_none() {
                    self.counterexample = Some(describe());
                }
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformanceReport {
    pub domain: String,
    pub laws: Vec<LawResult>,
}

impl ConformanceReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(LawResult::passed)
    }

    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.law == name)
    }

    pub fn failed_laws(&self) -> Vec<&'static str> {
        self.laws.iter().filter(|l| !l.passed()).map(|l| l.law).collect()
    }
}

pub const LAW_BOUNDS: &str = "C1 bounds";
pub const LAW_REFLEXIVE: &str = "C1 reflexivity";
pub const LAW_ANTISYMMETRY: &str = "C1 antisymmetry";
pub const LAW_TRANSITIVE: &str = "C1 transitivity";
pub const LAW_JOIN_UPPER: &str = "C1 join is an upper bound";
pub const LAW_JOIN_LEAST: &str = "C1 join is least";
pub const LAW_MEET_LOWER: &str = "C1 meet is a lower bound";
pub const LAW_MEET_GREATEST: &str = "C1 meet is greatest";
pub const LAW_COMMUTATIVE: &str = "C1 commutativity";
pub const LAW_ASSOCIATIVE: &str = "C1 associativity";
pub const LAW_IDEMPOTENT: &str = "C1 idempotence";
pub const LAW_ABSORPTION: &str = "C1 absorption";
pub const LAW_GAMMA_MONOTONE: &str = "C2 gamma monotone";
pub const LAW_IDENTITY: &str = "C3 identity";
pub const LAW_UNIFY_SOUND: &str = "C4 unify sound";
pub const LAW_UNIFY_MONOTONE: &str = "unify monotone";

/// Runs every law `trials` times on random samples.
pub fn conformance_suite<D, S, R>(domain: &D, sampler: &mut S, trials: usize, rng: &mut R) -> ConformanceReport
where
    D: AbstractDomain,
    S: DomainSampler<D>,
    R: Rng,
{
    let names = [
        LAW_BOUNDS,
        LAW_REFLEXIVE,
        LAW_ANTISYMMETRY,
        LAW_TRANSITIVE,
        LAW_JOIN_UPPER,
        LAW_JOIN_LEAST,
        LAW_MEET_LOWER,
        LAW_MEET_GREATEST,
        LAW_COMMUTATIVE,
        LAW_ASSOCIATIVE,
        LAW_IDEMPOTENT,
        LAW_ABSORPTION,
        LAW_GAMMA_MONOTONE,
        LAW_IDENTITY,
        LAW_UNIFY_SOUND,
        LAW_UNIFY_MONOTONE,
    ];
    let mut laws: Vec<LawResult> = names.iter().map(|n| LawResult::new(n)).collect();
    let idx = |name: &str| names.iter().position(|n| *n == name).unwrap();
    let mut fresh = FreshVars::new();

    for _ in 0..trials {
        let vars = sampler.universe(rng);
        let x = sampler.element(domain, &vars, rng);
        let y = sampler.element(domain, &vars, rng);
        let z = sampler.element(domain, &vars, rng);
        let bot = domain.bottom(&vars);
        let top = domain.top(&vars);
        let d = |e: &D::Elem| domain.render(e);

        laws[idx(LAW_BOUNDS)].record(true, domain.leq(&bot, &x) && domain.leq(&x, &top), || {
            format!("x = {}", d(&x))
        });
        laws[idx(LAW_REFLEXIVE)].record(true, domain.leq(&x, &x), || format!("x = {}", d(&x)));
        let both = domain.leq(&x, &y) && domain.leq(&y, &x);
        laws[idx(LAW_ANTISYMMETRY)].record(both, x == y, || format!("x = {}, y = {}", d(&x), d(&y)));
        let chain = domain.leq(&x, &y) && domain.leq(&y, &z);
        laws[idx(LAW_TRANSITIVE)].record(chain, domain.leq(&x, &z), || {
            format!("x = {}, y = {}, z = {}", d(&x), d(&y), d(&z))
        });

        let j = domain.join(&x, &y);
        let m = domain.meet(&x, &y);
        laws[idx(LAW_JOIN_UPPER)].record(true, domain.leq(&x, &j) && domain.leq(&y, &j), || {
            format!("x = {}, y = {}, x ⊔ y = {}", d(&x), d(&y), d(&j))
        });
        let z_above = domain.leq(&x, &z) && domain.leq(&y, &z);
        laws[idx(LAW_JOIN_LEAST)].record(z_above, domain.leq(&j, &z), || {
            format!("x = {}, y = {}, z = {}", d(&x), d(&y), d(&z))
        });
        laws[idx(LAW_MEET_LOWER)].record(true, domain.leq(&m, &x) && domain.leq(&m, &y), || {
            format!("x = {}, y = {}, x ⊓ y = {}", d(&x), d(&y), d(&m))
        });
        let z_below = domain.leq(&z, &x) && domain.leq(&z, &y);
        laws[idx(LAW_MEET_GREATEST)].record(z_below, domain.leq(&z, &m), || {
            format!("x = {}, y = {}, z = {}", d(&x), d(&y), d(&z))
        });
        laws[idx(LAW_COMMUTATIVE)].record(true, j == domain.join(&y, &x) && m == domain.meet(&y, &x), || {
            format!("x = {}, y = {}", d(&x), d(&y))
        });
        let assoc = domain.join(&j, &z) == domain.join(&x, &domain.join(&y, &z))
            && domain.meet(&m, &z) == domain.meet(&x, &domain.meet(&y, &z));
        laws[idx(LAW_ASSOCIATIVE)].record(true, assoc, || format!("x = {}, y = {}, z = {}", d(&x), d(&y), d(&z)));
        laws[idx(LAW_IDEMPOTENT)].record(true, domain.join(&x, &x) == x && domain.meet(&x, &x) == x, || {
            format!("x = {}", d(&x))
        });
        let absorb = domain.join(&x, &domain.meet(&x, &y)) == x && domain.meet(&x, &domain.join(&x, &y)) == x;
        laws[idx(LAW_ABSORPTION)].record(true, absorb, || format!("x = {}, y = {}", d(&x), d(&y)));

        let theta = if rng.gen_bool(0.5) {
            sampler.concretize(domain, &x, rng)
        } else {
            sampler.substitution(&vars, rng)
        };
        let premise = domain.leq(&x, &y) && domain.gamma_contains(&x, &theta);
        laws[idx(LAW_GAMMA_MONOTONE)].record(premise, domain.gamma_contains(&y, &theta), || {
            format!("x = {}, y = {}, θ = {theta}", d(&x), d(&y))
        });
        let id = domain.identity(&vars);
        laws[idx(LAW_IDENTITY)].record(true, domain.gamma_contains(&id, &Substitution::empty()), || {
            format!("identity = {}", d(&id))
        });

        // C4: concrete unification of described substitutions lands in the
        // concretization of the abstract result.
        let u_vars = sampler.universe(rng);
        let a = sampler.atom(&u_vars, rng);
        let b = sampler.atom(&vars, rng);
        let a_val = sampler.element(domain, &u_vars, rng);
        let theta = sampler.concretize(domain, &a_val, rng);
        let omega = sampler.concretize(domain, &x, rng);
        let abstract_result = domain.unify(&a, &a_val, &b, &x, &mut fresh);
        let described = domain.gamma_contains(&a_val, &theta) && domain.gamma_contains(&x, &omega);
        let concrete = if described { unify_open(&a, &theta, &b, &omega, &mut fresh) } else { None };
        let holds = concrete.as_ref().is_none_or(|eta| domain.gamma_contains(&abstract_result, eta));
        laws[idx(LAW_UNIFY_SOUND)].record(concrete.is_some(), holds, || {
            format!(
                "A = {a}, θ♭ = {}, θ = {theta}, B = {b}, σ♭ = {}, ω = {omega}, result = {}, η = {}",
                d(&a_val),
                d(&x),
                d(&abstract_result),
                concrete.as_ref().map(|e| e.to_string()).unwrap_or_default()
            )
        });

        // Monotonicity in both abstract arguments.
        let a_up = domain.join(&a_val, &sampler.element(domain, &u_vars, rng));
        let x_up = domain.join(&x, &y);
        let lifted = domain.unify(&a, &a_up, &b, &x_up, &mut fresh);
        laws[idx(LAW_UNIFY_MONOTONE)].record(true, domain.leq(&abstract_result, &lifted), || {
            format!(
                "A = {a}, B = {b}: unify({}, {}) = {} but unify({}, {}) = {}",
                d(&a_val),
                d(&x),
                d(&abstract_result),
                d(&a_up),
                d(&x_up),
                d(&lifted)
            )
        });
    }

    ConformanceReport { domain: domain.name().to_string(), laws }
}
