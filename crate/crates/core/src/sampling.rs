//! Random terms, atoms and substitutions for property tests and the domain
//! conformance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::domain::DomainSampler;
use crate::groundness::{GroundSet, Groundness};
use crate::term::{Atom, Substitution, Term, Var, VarSet};

/// Shape parameters for random terms.
#[derive(Debug, Clone)]
pub struct TermSampler {
    pub constants: Vec<&'static str>,
    pub functors: Vec<(&'static str, usize)>,
    pub max_depth: usize,
    /// Probability of choosing a variable at a leaf, when one is available.
    pub var_weight: f64,
}

impl Default for TermSampler {
    fn default() -> Self {
        TermSampler {
            constants: vec!["a", "b", "[]"],
            functors: vec![("f", 1), ("g", 2), (".", 2)],
            max_depth: 3,
            var_weight: 0.5,
        }
    }
}

impl TermSampler {
    pub fn term<R: Rng>(&self, vars: &[Var], rng: &mut R) -> Term {
        self.term_at(vars, self.max_depth, rng)
    }

    fn term_at<R: Rng>(&self, vars: &[Var], depth: usize, rng: &mut R) -> Term {
        let leaf = depth == 0 || rng.gen_bool(0.45);
        if leaf {
            if !vars.is_empty() && rng.gen_bool(self.var_weight) {
                Term::Var(vars.choose(rng).unwrap().clone())
            } else {
                Term::constant(self.constants.choose(rng).unwrap())
            }
        } else {
            let (name, arity) = *self.functors.choose(rng).unwrap();
            Term::compound(name, (0..arity).map(|_| self.term_at(vars, depth - 1, rng)).collect())
        }
    }

    pub fn ground_term<R: Rng>(&self, rng: &mut R) -> Term {
        self.term(&[], rng)
    }

    pub fn atom<R: Rng>(&self, predicate: &str, arity: usize, vars: &[Var], rng: &mut R) -> Atom {
        Atom::new(predicate, (0..arity).map(|_| self.term(vars, rng)).collect())
    }
}

/// Samples for the groundness domain.
///
/// Universes are drawn from a small pool so that random atoms unify often.
/// Substitution ranges use a separate pool, which keeps them idempotent.
#[derive(Debug, Clone)]
pub struct GroundnessSampler {
    pub terms: TermSampler,
    pub pool: Vec<Var>,
    pub range_pool: Vec<Var>,
    pub max_universe: usize,
}

impl Default for GroundnessSampler {
    fn default() -> Self {
        GroundnessSampler {
            terms: TermSampler { max_depth: 2, ..TermSampler::default() },
            pool: ["X", "Y", "Z", "U", "V", "W"].iter().map(Var::new).collect(),
            range_pool: ["R1", "R2", "R3"].iter().map(Var::new).collect(),
            max_universe: 4,
        }
    }
}

impl GroundnessSampler {
    fn subset<R: Rng>(vars: &VarSet, rng: &mut R) -> VarSet {
        vars.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
    }
}

impl DomainSampler<Groundness> for GroundnessSampler {
    fn universe<R: Rng>(&mut self, rng: &mut R) -> VarSet {
        let n = rng.gen_range(1..=self.max_universe.min(self.pool.len()));
        self.pool.choose_multiple(rng, n).cloned().collect()
    }

    fn element<R: Rng>(&mut self, _domain: &Groundness, vars: &VarSet, rng: &mut R) -> GroundSet {
        GroundSet::new(vars.clone(), Self::subset(vars, rng))
    }

    fn atom<R: Rng>(&mut self, vars: &VarSet, rng: &mut R) -> Atom {
        let vs: Vec<Var> = vars.iter().cloned().collect();
        self.terms.atom("p", 2, &vs, rng)
    }

    fn concretize<R: Rng>(&mut self, _domain: &Groundness, elem: &GroundSet, rng: &mut R) -> Substitution {
        let mut bindings = Vec::new();
        for x in elem.universe() {
            if elem.contains(x) {
                bindings.push((x.clone(), self.terms.ground_term(rng)));
            } else if rng.gen_bool(0.6) {
                let mut t = self.terms.term(&self.range_pool, rng);
                if t.is_ground() {
                    t = Term::Var(self.range_pool.choose(rng).unwrap().clone());
                }
                bindings.push((x.clone(), t));
            }
        }
        Substitution::from_bindings(bindings)
    }

    fn substitution<R: Rng>(&mut self, vars: &VarSet, rng: &mut R) -> Substitution {
        let mut bindings = Vec::new();
        for x in vars {
            if rng.gen_bool(0.7) {
                bindings.push((x.clone(), self.terms.term(&self.range_pool, rng)));
            }
        }
        Substitution::from_bindings(bindings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{conformance_suite, AbstractDomain};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn concretize_lands_in_gamma() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut s = GroundnessSampler::default();
        for _ in 0..200 {
            let vars = s.universe(&mut rng);
            let e = s.element(&Groundness, &vars, &mut rng);
            let theta = s.concretize(&Groundness, &e, &mut rng);
            assert!(Groundness.gamma_contains(&e, &theta));
            assert!(theta.is_solved());
        }
    }

    #[test]
    fn groundness_conforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let report = conformance_suite(&Groundness, &mut GroundnessSampler::default(), 500, &mut rng);
        assert!(report.passed(), "{:?}", report.failed_laws());
        for law in &report.laws {
            assert!(law.effective > 0, "law {} never exercised", law.law);
        }
    }
}
