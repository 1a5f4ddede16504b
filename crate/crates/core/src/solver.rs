//! Least fixed points of equation systems over finite-height domains.
//!
//! The main solver is a dependency-driven worklist: every index starts at
//! bottom and is queued; when an index changes, the equations reading it
//! are queued again. A round-based (Jacobi) solver that re-evaluates every
//! equation against the previous round serves as a reference and as the
//! parallel mode.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domain::AbstractDomain;
use crate::equations::EquationSystem;
use crate::term::FreshVars;

/// Worklist discipline. Results do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WorklistOrder {
    /// Smallest index first.
    #[default]
    Ordered,
    Fifo,
    Lifo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolverOptions {
    pub order: WorklistOrder,
    /// Overrides the default update limit `Σ height + #indices`.
    pub max_updates: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("update limit of {limit} exceeded; the domain is not monotone or not of the declared height")]
    LimitExceeded { limit: usize },
    #[error("value at index {index} moved from {old} to {new}, which is not an ascent")]
    NotAscending { index: usize, old: String, new: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    /// Right-hand-side evaluations.
    pub evaluations: usize,
    /// Evaluations that changed a value.
    pub updates: usize,
    /// Rounds, for the round-based solver; worklist pops otherwise.
    pub iterations: usize,
    pub updates_per_index: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Solution<E> {
    pub values: Vec<E>,
    pub stats: SolveStats,
}

/// `Σ height(V_n) + #indices`.
pub fn default_limit<D: AbstractDomain>(system: &EquationSystem<D::Elem>, domain: &D) -> usize {
    system.equations().iter().map(|eq| domain.height(&eq.universe)).sum::<usize>() + system.len()
}

fn bottoms<D: AbstractDomain>(system: &EquationSystem<D::Elem>, domain: &D) -> Vec<D::Elem> {
    system.equations().iter().map(|eq| domain.bottom(&eq.universe)).collect()
}

fn check_ascent<D: AbstractDomain>(domain: &D, index: usize, old: &D::Elem, new: &D::Elem) -> Result<(), SolveError> {
    if domain.leq(old, new) {
        Ok(())
    } else {
        Err(SolveError::NotAscending { index, old: domain.render(old), new: domain.render(new) })
    }
}

enum Worklist {
    Ordered(BTreeSet<usize>),
    Queue(VecDeque<usize>, Vec<bool>, bool),
}

impl Worklist {
    fn new(order: WorklistOrder, n: usize) -> Self {
        match order {
            WorklistOrder::Ordered => Worklist::Ordered((0..n).collect()),
            WorklistOrder::Fifo | WorklistOrder::Lifo => {
                Worklist::Queue((0..n).collect(), vec![true; n], order == WorklistOrder::Lifo)
            }
        }
    }

    fn pop(&mut self) -> Option<usize> {
        match self {
            Worklist::Ordered(set) => set.pop_first(),
            Worklist::Queue(q, queued, lifo) => {
                let n = if *lifo { q.pop_back() } else { q.pop_front() }?;
                queued[n] = false;
                Some(n)
            }
        }
    }

    fn push(&mut self, n: usize) {
        match self {
            Worklist::Ordered(set) => {
                set.insert(n);
            }
            Worklist::Queue(q, queued, _) => {
                if !queued[n] {
                    queued[n] = true;
                    q.push_back(n);
                }
            }
        }
    }
}

/// Worklist solver.
pub fn solve<D: AbstractDomain>(
    system: &EquationSystem<D::Elem>,
    domain: &D,
    options: SolverOptions,
) -> Result<Solution<D::Elem>, SolveError> {
    let limit = options.max_updates.unwrap_or_else(|| default_limit(system, domain));
    let mut values = bottoms(system, domain);
    let mut stats = SolveStats { updates_per_index: vec![0; system.len()], ..SolveStats::default() };
    let mut work = Worklist::new(options.order, system.len());
    let mut fresh = FreshVars::new();
    while let Some(n) = work.pop() {
        stats.iterations += 1;
        stats.evaluations += 1;
        let new = system.evaluate(domain, n, &values, &mut fresh);
        if new == values[n] {
            continue;
        }
        check_ascent(domain, n, &values[n], &new)?;
        stats.updates += 1;
        stats.updates_per_index[n] += 1;
        if stats.updates > limit {
            return Err(SolveError::LimitExceeded { limit });
        }
        values[n] = new;
        for &d in system.dependents(n) {
            work.push(d);
        }
    }
    Ok(Solution { values, stats })
}

/// Round-based solver: each round evaluates every equation against the
/// previous round's values. With `parallel`, a round's evaluations run
/// concurrently.
pub fn solve_rounds<D: AbstractDomain>(
    system: &EquationSystem<D::Elem>,
    domain: &D,
    parallel: bool,
) -> Result<Solution<D::Elem>, SolveError> {
    let limit = default_limit(system, domain);
    let mut values = bottoms(system, domain);
    let mut stats = SolveStats { updates_per_index: vec![0; system.len()], ..SolveStats::default() };
    loop {
        stats.iterations += 1;
        if stats.iterations > limit {
            return Err(SolveError::LimitExceeded { limit });
        }
        let next: Vec<D::Elem> = if parallel {
            (0..system.len())
                .into_par_iter()
                .map(|n| system.evaluate(domain, n, &values, &mut FreshVars::new()))
                .collect()
        } else {
            let mut fresh = FreshVars::new();
            (0..system.len()).map(|n| system.evaluate(domain, n, &values, &mut fresh)).collect()
        };
        stats.evaluations += system.len();
        let mut changed = false;
        for (n, (old, new)) in values.iter().zip(&next).enumerate() {
            if old != new {
                check_ascent(domain, n, old, new)?;
                changed = true;
                stats.updates += 1;
                stats.updates_per_index[n] += 1;
            }
        }
        if !changed {
            return Ok(Solution { values, stats });
        }
        values = next;
    }
}

/// Evaluates every equation once; true when nothing changes.
pub fn verify_fixpoint<D: AbstractDomain>(system: &EquationSystem<D::Elem>, domain: &D, values: &[D::Elem]) -> bool {
    let mut fresh = FreshVars::new();
    values.len() == system.len() && (0..system.len()).all(|n| system.evaluate(domain, n, values, &mut fresh) == values[n])
}
