//! Glue from a parsed program to solved equation systems and soundness
//! reports.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::domain::{AbstractDomain, AnnotationError};
use crate::equations::{EquationError, EquationSystem, SemanticsKind};
use crate::graph::ProgramGraph;
use crate::oracle::{soundness_check, Exploration, Limits, Samples, TransitionSystem, Violation};
use crate::solver::{solve, Solution, SolveError, SolverOptions};
use crate::syntax::{interpret_annotation, Program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("query {query}: {source}")]
    Annotation { query: usize, source: AnnotationError },
    #[error(transparent)]
    Equations(#[from] EquationError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Calling descriptions of every query, by query index.
pub fn annotations<D: AbstractDomain>(domain: &D, program: &Program) -> Result<BTreeMap<usize, D::Elem>, AnalysisError> {
    program
        .queries()
        .iter()
        .map(|q| {
            interpret_annotation(domain, program, q)
                .map(|e| (q.index, e))
                .map_err(|source| AnalysisError::Annotation { query: q.index, source })
        })
        .collect()
}

/// A solved equation system.
#[derive(Debug, Clone)]
pub struct Analysis<E> {
    pub system: EquationSystem<E>,
    pub solution: Solution<E>,
}

pub fn analyze<D: AbstractDomain>(
    domain: &D,
    graph: &ProgramGraph,
    kind: SemanticsKind,
    options: SolverOptions,
) -> Result<Analysis<D::Elem>, AnalysisError> {
    let ann = annotations(domain, graph.program())?;
    let system = EquationSystem::build(kind, graph, domain, &ann)?;
    let solution = solve(&system, domain, options)?;
    Ok(Analysis { system, solution })
}

/// Explores from `samples` and checks the projection against `analysis`.
pub fn check<D: AbstractDomain>(
    domain: &D,
    graph: &ProgramGraph,
    analysis: &Analysis<D::Elem>,
    exploration: &Exploration,
) -> Vec<Violation> {
    soundness_check(graph, &exploration.project_edges(), &analysis.system, &analysis.solution.values, domain)
}

pub fn explore(graph: &ProgramGraph, samples: &Samples, limits: Limits) -> Exploration {
    TransitionSystem::new(graph).explore(samples, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::DIFF;
    use crate::groundness::Groundness;
    use crate::syntax::parse_program;

    #[test]
    fn diff_end_to_end() {
        let p = parse_program(DIFF).unwrap();
        let g = ProgramGraph::build(&p);
        let samples = Samples::parse("sample(5, Y = [2,1], Z = [3,1]).", &p).unwrap();
        let ex = explore(&g, &samples, Limits::default());
        for kind in [SemanticsKind::Flat, SemanticsKind::Diamond] {
            let a = analyze(&Groundness, &g, kind, SolverOptions::default()).unwrap();
            assert!(check(&Groundness, &g, &a, &ex).is_empty());
        }
    }

    #[test]
    fn bad_annotation_names_its_query() {
        let p = parse_program("p(X).\n:- query(p(X), [Y]).").unwrap();
        let err = annotations(&Groundness, &p).unwrap_err();
        assert!(matches!(err, AnalysisError::Annotation { query: 2, .. }), "{err}");
    }
}
