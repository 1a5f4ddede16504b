//! Forward abstract interpretation of normal logic programs.
//!
//! A program is parsed into clauses and query descriptions, turned into a
//! program graph, and analysed by solving an equation system over an
//! abstract domain, either per edge (flat) or per program point (diamond).
//! A bounded concrete executor checks the results for soundness.

pub mod domain;
pub mod equations;
pub mod graph;
pub mod groundness;
pub mod lemmas;
pub mod oracle;
pub mod pipeline;
pub mod sampling;
pub mod solver;
pub mod syntax;
pub mod term;

pub use domain::{conformance_suite, AbstractDomain, AnnotationError, ConformanceReport, DomainSampler};
pub use equations::{EquationError, EquationSystem, Operand, SemanticsKind, Slot};
pub use graph::{Edge, EdgeClass, EdgeId, GraphStats, PointClass, ProgramGraph};
pub use groundness::{GroundSet, Groundness};
pub use oracle::{Exploration, Limits, SampleError, Samples, State, StateKind, TransitionSystem, Violation};
pub use solver::{solve, solve_rounds, verify_fixpoint, Solution, SolveError, SolveStats, SolverOptions, WorklistOrder};
pub use syntax::{parse_program, Clause, ParseError, Program, ProgramPoint, Query};
pub use term::{mgu, unify_open, Atom, Expr, FreshVars, Literal, Substitution, Term, Var, VarSet};
pub use lemmas::LemmaReport;
pub use oracle::soundness_check;
pub use pipeline::{analyze, annotations, Analysis, AnalysisError};
