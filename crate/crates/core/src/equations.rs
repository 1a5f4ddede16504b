//! Equation systems over an abstract domain: one equation per edge for the
//! flat semantics, one per program point for the diamond semantics.
//!
//! Each right-hand side is a join of operands; the empty join is bottom.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::domain::AbstractDomain;
use crate::graph::{Edge, EdgeClass, PointClass, ProgramGraph};
use crate::syntax::ProgramPoint;
use crate::term::{Atom, FreshVars, VarSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticsKind {
    Flat,
    Diamond,
}

impl fmt::Display for SemanticsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemanticsKind::Flat => "flat",
            SemanticsKind::Diamond => "diamond",
        })
    }
}

/// What an equation is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Edge(Edge),
    Point(ProgramPoint, PointClass),
}

impl Slot {
    /// The point whose clause or query owns the value.
    pub fn point(&self) -> ProgramPoint {
        match self {
            Slot::Edge(e) => e.to,
            Slot::Point(p, _) => *p,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Slot::Edge(e) => e.class.to_string(),
            Slot::Point(_, c) => c.to_string(),
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Edge(e) => write!(f, "{e}"),
            Slot::Point(p, _) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand<E> {
    Const(E),
    /// `unify(call, X[arg], head, identity)`: entering a clause.
    UnifyEntry { call: Atom, arg: usize, head: Atom, identity: E },
    /// `unify(head, X[arg], call, X[context])`: returning to a caller.
    UnifyExit { head: Atom, arg: usize, call: Atom, context: usize },
    Copy(usize),
}

impl<E> Operand<E> {
    pub fn reads(&self) -> Vec<usize> {
        match self {
            Operand::Const(_) => vec![],
            Operand::UnifyEntry { arg, .. } => vec![*arg],
            Operand::UnifyExit { arg, context, .. } => vec![*arg, *context],
            Operand::Copy(r) => vec![*r],
        }
    }

    pub fn is_unify(&self) -> bool {
        matches!(self, Operand::UnifyEntry { .. } | Operand::UnifyExit { .. })
    }

    fn name(&self) -> &'static str {
        match self {
            Operand::Const(_) => "const",
            Operand::UnifyEntry { .. } => "unify_entry",
            Operand::UnifyExit { .. } => "unify_exit",
            Operand::Copy(_) => "copy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation<E> {
    pub slot: Slot,
    /// Variables of the clause or query owning the slot.
    pub universe: VarSet,
    pub operands: Vec<Operand<E>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquationError {
    #[error("no calling description for query {0}")]
    MissingAnnotation(usize),
}

#[derive(Debug, Clone)]
pub struct EquationSystem<E> {
    kind: SemanticsKind,
    equations: Vec<Equation<E>>,
    /// Indices whose equations read index `n`.
    dependents: Vec<Vec<usize>>,
    points: BTreeMap<ProgramPoint, usize>,
}

impl<E: Clone> EquationSystem<E> {
    /// A system from explicit equations. Operands must read valid indices.
    pub fn from_equations(kind: SemanticsKind, equations: Vec<Equation<E>>) -> Self {
        let mut dependents: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); equations.len()];
        for (n, eq) in equations.iter().enumerate() {
            for op in &eq.operands {
                for r in op.reads() {
                    dependents[r].insert(n);
                }
            }
        }
        let points = match kind {
            SemanticsKind::Diamond => equations.iter().enumerate().map(|(n, eq)| (eq.slot.point(), n)).collect(),
            SemanticsKind::Flat => BTreeMap::new(),
        };
        EquationSystem {
            kind,
            equations,
            dependents: dependents.into_iter().map(|s| s.into_iter().collect()).collect(),
            points,
        }
    }

    /// One equation per edge, indexed like [`ProgramGraph::edges`].
    pub fn build_flat<D>(
        graph: &ProgramGraph,
        domain: &D,
        annotations: &BTreeMap<usize, E>,
    ) -> Result<Self, EquationError>
    where
        D: AbstractDomain<Elem = E>,
    {
        let program = graph.program();
        let preds = |q: ProgramPoint| graph.predecessors(q).expect("graph point");
        let mut equations = Vec::with_capacity(graph.edges().len());
        for e in graph.edges() {
            let universe = program.vars_of(e.to.unit).clone();
            let operands = match e.class {
                EdgeClass::E0 => {
                    let k = e.to.unit;
                    vec![Operand::Const(annotations.get(&k).cloned().ok_or(EquationError::MissingAnnotation(k))?)]
                }
                EdgeClass::E1 => {
                    let call = &program.literal_at(e.from).expect("body point").atom;
                    let head = program.head(e.to.unit).expect("clause entry");
                    let identity = domain.identity(&universe);
                    preds(e.from)
                        .iter()
                        .map(|&u| Operand::UnifyEntry {
                            call: call.clone(),
                            arg: u,
                            head: head.clone(),
                            identity: identity.clone(),
                        })
                        .collect()
                }
                EdgeClass::E2 => {
                    let pm = program.prev(e.to).expect("E2 destination has a predecessor point");
                    let call = &program.literal_at(pm).expect("body point").atom;
                    let head = program.head(e.from.unit).expect("clause exit");
                    let mut ops = Vec::new();
                    for &u in preds(e.from) {
                        for &v in preds(pm) {
                            ops.push(Operand::UnifyExit { head: head.clone(), arg: u, call: call.clone(), context: v });
                        }
                    }
                    ops
                }
                EdgeClass::E3 => preds(e.from).iter().map(|&u| Operand::Copy(u)).collect(),
            };
            equations.push(Equation { slot: Slot::Edge(*e), universe, operands });
        }
        Ok(Self::from_equations(SemanticsKind::Flat, equations))
    }

    /// One equation per program point, in `(i, j)` order.
    pub fn build_diamond<D>(
        graph: &ProgramGraph,
        domain: &D,
        annotations: &BTreeMap<usize, E>,
    ) -> Result<Self, EquationError>
    where
        D: AbstractDomain<Elem = E>,
    {
        let program = graph.program();
        let points = program.points();
        let index: BTreeMap<ProgramPoint, usize> = points.iter().enumerate().map(|(n, &p)| (p, n)).collect();
        let mut equations = Vec::with_capacity(points.len());
        for &p in &points {
            let universe = program.vars_of(p.unit).clone();
            let class = graph.point_class(p).expect("graph point");
            let incoming = graph.predecessors(p).expect("graph point");
            let operands = match class {
                PointClass::N0 => {
                    let k = p.unit;
                    vec![Operand::Const(annotations.get(&k).cloned().ok_or(EquationError::MissingAnnotation(k))?)]
                }
                PointClass::N1 => {
                    let head = program.head(p.unit).expect("clause entry");
                    let identity = domain.identity(&universe);
                    incoming
                        .iter()
                        .map(|&id| {
                            let q = graph.edge(id).from;
                            Operand::UnifyEntry {
                                call: program.literal_at(q).expect("body point").atom.clone(),
                                arg: index[&q],
                                head: head.clone(),
                                identity: identity.clone(),
                            }
                        })
                        .collect()
                }
                PointClass::N2 => {
                    let pm = program.prev(p).expect("N2 point has a predecessor point");
                    let call = &program.literal_at(pm).expect("body point").atom;
                    incoming
                        .iter()
                        .map(|&id| {
                            let q = graph.edge(id).from;
                            Operand::UnifyExit {
                                head: program.head(q.unit).expect("clause exit").clone(),
                                arg: index[&q],
                                call: call.clone(),
                                context: index[&pm],
                            }
                        })
                        .collect()
                }
                PointClass::N3 => {
                    let pm = program.prev(p).expect("N3 point has a predecessor point");
                    vec![Operand::Copy(index[&pm])]
                }
                PointClass::None => vec![],
            };
            equations.push(Equation { slot: Slot::Point(p, class), universe, operands });
        }
        Ok(Self::from_equations(SemanticsKind::Diamond, equations))
    }

    pub fn build<D>(
        kind: SemanticsKind,
        graph: &ProgramGraph,
        domain: &D,
        annotations: &BTreeMap<usize, E>,
    ) -> Result<Self, EquationError>
    where
        D: AbstractDomain<Elem = E>,
    {
        match kind {
            SemanticsKind::Flat => Self::build_flat(graph, domain, annotations),
            SemanticsKind::Diamond => Self::build_diamond(graph, domain, annotations),
        }
    }
}

impl<E: Clone> EquationSystem<E> {
    pub fn kind(&self) -> SemanticsKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn equations(&self) -> &[Equation<E>] {
        &self.equations
    }

    pub fn equation(&self, n: usize) -> &Equation<E> {
        &self.equations[n]
    }

    pub fn dependents(&self, n: usize) -> &[usize] {
        &self.dependents[n]
    }

    /// Index of the equation for point `p` in a diamond system.
    pub fn point_index(&self, p: ProgramPoint) -> Option<usize> {
        self.points.get(&p).copied()
    }

    /// Total number of abstract unifications on the right-hand sides.
    pub fn count_unify_ops(&self) -> usize {
        self.equations.iter().flat_map(|eq| &eq.operands).filter(|op| op.is_unify()).count()
    }

    /// Evaluates the right-hand side of equation `n` in `env`.
    pub fn evaluate<D>(&self, domain: &D, n: usize, env: &[E], fresh: &mut FreshVars) -> E
    where
        D: AbstractDomain<Elem = E>,
    {
        let eq = &self.equations[n];
        let mut acc = domain.bottom(&eq.universe);
        for op in &eq.operands {
            let value = match op {
                Operand::Const(c) => c.clone(),
                Operand::UnifyEntry { call, arg, head, identity } => {
                    domain.unify(call, &env[*arg], head, identity, fresh)
                }
                Operand::UnifyExit { head, arg, call, context } => {
                    domain.unify(head, &env[*arg], call, &env[*context], fresh)
                }
                Operand::Copy(r) => env[*r].clone(),
            };
            acc = domain.join(&acc, &value);
        }
        acc
    }

    /// Debugging dump: each equation with its operands and the indices they read.
    pub fn to_json<D>(&self, domain: &D) -> serde_json::Value
    where
        D: AbstractDomain<Elem = E>,
    {
        let label = |n: usize| self.equations[n].slot.to_string();
        let eqs: Vec<_> = self
            .equations
            .iter()
            .enumerate()
            .map(|(n, eq)| {
                let ops: Vec<_> = eq
                    .operands
                    .iter()
                    .map(|op| {
                        let mut o = serde_json::json!({
                            "op": op.name(),
                            "reads": op.reads().into_iter().map(label).collect::<Vec<_>>(),
                        });
                        match op {
                            Operand::Const(c) => o["value"] = domain.render(c).into(),
                            Operand::UnifyEntry { call, head, .. } => {
                                o["call"] = call.to_string().into();
                                o["head"] = head.to_string().into();
                            }
                            Operand::UnifyExit { head, call, .. } => {
                                o["head"] = head.to_string().into();
                                o["call"] = call.to_string().into();
                            }
                            Operand::Copy(_) => {}
                        }
                        o
                    })
                    .collect();
                serde_json::json!({ "index": n, "slot": label(n), "class": eq.slot.tag(), "operands": ops })
            })
            .collect();
        serde_json::json!({
            "schema": 1,
            "semantics": self.kind,
            "unify_ops": self.count_unify_ops(),
            "equations": eqs,
        })
    }
}
