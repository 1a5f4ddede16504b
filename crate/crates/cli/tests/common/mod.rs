#![allow(dead_code)]

use std::path::{Path, PathBuf};

use nlpabs_core::domain::AnnotationError;
use nlpabs_core::{AbstractDomain, Atom, FreshVars, GroundSet, Groundness, Substitution, Term, VarSet};

pub fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub fn corpus() -> Vec<(String, PathBuf, PathBuf)> {
    let dir = tests_dir().join("corpus");
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .expect("corpus directory")
        .filter_map(|e| {
            let path = e.ok()?.path();
            (path.extension()? == "pl").then(|| {
                let name = path.file_stem().unwrap().to_string_lossy().into_owned();
                let samples = path.with_extension("samples");
                (name, path, samples)
            })
        })
        .collect();
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Unification claims every variable ground.
    UnifyClaimsGround,
    /// Join returns its left operand.
    JoinKeepsLeft,
}

/// Groundness with one operation broken.
pub struct Sabotaged(pub Fault);

impl AbstractDomain for Sabotaged {
    type Elem = GroundSet;

    fn name(&self) -> &str {
        "sabotaged"
    }
    fn bottom(&self, vars: &VarSet) -> GroundSet {
        Groundness.bottom(vars)
    }
    fn top(&self, vars: &VarSet) -> GroundSet {
        Groundness.top(vars)
    }
    fn identity(&self, vars: &VarSet) -> GroundSet {
        Groundness.identity(vars)
    }
    fn leq(&self, a: &GroundSet, b: &GroundSet) -> bool {
        Groundness.leq(a, b)
    }
    fn join(&self, a: &GroundSet, b: &GroundSet) -> GroundSet {
        match self.0 {
            Fault::JoinKeepsLeft => a.clone(),
            _ => Groundness.join(a, b),
        }
    }
    fn meet(&self, a: &GroundSet, b: &GroundSet) -> GroundSet {
        Groundness.meet(a, b)
    }
    fn unify(&self, a: &Atom, av: &GroundSet, b: &Atom, bv: &GroundSet, fresh: &mut FreshVars) -> GroundSet {
        match self.0 {
            Fault::UnifyClaimsGround => Groundness.bottom(bv.universe()),
            _ => Groundness.unify(a, av, b, bv, fresh),
        }
    }
    fn gamma_contains(&self, e: &GroundSet, theta: &Substitution) -> bool {
        Groundness.gamma_contains(e, theta)
    }
    fn height(&self, vars: &VarSet) -> usize {
        Groundness.height(vars)
    }
    fn parse_annotation(&self, payload: &Term, vars: &VarSet) -> Result<GroundSet, AnnotationError> {
        Groundness.parse_annotation(payload, vars)
    }
    fn render(&self, e: &GroundSet) -> String {
        Groundness.render(e)
    }
}
