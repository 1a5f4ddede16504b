//! A bounded executor for the transition system over concrete sample
//! queries, used to check abstract results for soundness.
//!
//! A state is a stack of items `⟨p ← q, θ⟩`, top last. Each item's
//! substitution is restricted to the variables of the clause or query owning
//! `p` and put in canonical form, so states that differ only by renaming are
//! identical.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::domain::AbstractDomain;
use crate::equations::{EquationSystem, SemanticsKind};
use crate::graph::{EdgeClass, EdgeId, ProgramGraph};
use crate::syntax::{parse_samples, ParseError, Pos, Program};
use crate::term::{unify_open, Expr, FreshVars, Renaming, Substitution, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{pos}: no query `{key}`")]
    UnknownQuery { pos: Pos, key: String },
    #[error("{pos}: variable {var} does not occur in query {query}")]
    UnknownVariable { pos: Pos, var: String, query: usize },
    #[error("{pos}: variable {var} is bound twice")]
    DuplicateBinding { pos: Pos, var: String },
    #[error("{pos}: sample {sample} for query {query} is not described by {annotation}")]
    NotDescribed { pos: Pos, query: usize, sample: String, annotation: String },
}

/// Concrete calling substitutions per query.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Samples {
    by_query: BTreeMap<usize, Vec<(Substitution, Pos)>>,
}

impl Samples {
    /// Reads a fixture and resolves its query keys and variables.
    ///
    /// Variables on the right of `=` are local to their sample; they are
    /// renamed so they never clash with query variables.
    pub fn parse(text: &str, program: &Program) -> Result<Self, SampleError> {
        let mut by_query: BTreeMap<usize, Vec<(Substitution, Pos)>> = BTreeMap::new();
        for raw in parse_samples(text)? {
            let query = program
                .find_query(&raw.key)
                .ok_or_else(|| SampleError::UnknownQuery { pos: raw.pos, key: raw.key.clone() })?;
            let vars = program.vars_of(query.index);
            let mut locals = Vec::new();
            for (_, t) in &raw.bindings {
                locals.extend(t.vars_in_order());
            }
            let renaming = Renaming::new(
                locals
                    .into_iter()
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .enumerate()
                    .map(|(n, v)| (v, Var::new(format!("_GS{n}"))))
                    .collect(),
            );
            let mut bindings = BTreeMap::new();
            for (v, t) in &raw.bindings {
                if !vars.contains(v) {
                    return Err(SampleError::UnknownVariable { pos: raw.pos, var: v.to_string(), query: query.index });
                }
                if bindings.insert(v.clone(), renaming.rename(t)).is_some() {
                    return Err(SampleError::DuplicateBinding { pos: raw.pos, var: v.to_string() });
                }
            }
            let theta = Substitution::from_bindings(bindings).canonical_on(vars);
            by_query.entry(query.index).or_default().push((theta, raw.pos));
        }
        Ok(Samples { by_query })
    }

    pub fn from_substitutions(by_query: BTreeMap<usize, Vec<Substitution>>) -> Self {
        let origin = Pos { line: 0, col: 0 };
        Samples {
            by_query: by_query.into_iter().map(|(k, v)| (k, v.into_iter().map(|s| (s, origin)).collect())).collect(),
        }
    }

    /// Rejects samples that the query's calling description does not cover.
    pub fn check_described<D: AbstractDomain>(
        &self,
        domain: &D,
        annotations: &BTreeMap<usize, D::Elem>,
    ) -> Result<(), SampleError> {
        for (&k, list) in &self.by_query {
            let Some(ann) = annotations.get(&k) else { continue };
            for (theta, pos) in list {
                if !domain.gamma_contains(ann, theta) {
                    return Err(SampleError::NotDescribed {
                        pos: *pos,
                        query: k,
                        sample: theta.to_string(),
                        annotation: domain.render(ann),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn for_query(&self, k: usize) -> impl Iterator<Item = &Substitution> {
        self.by_query.get(&k).into_iter().flatten().map(|(s, _)| s)
    }

    pub fn len(&self) -> usize {
        self.by_query.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn queries(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_query.keys().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Item {
    pub edge: EdgeId,
    pub theta: Substitution,
}

/// A stack of items; the last item is the top.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub Vec<Item>);

impl State {
    pub fn top(&self) -> &Item {
        self.0.last().expect("states are never empty")
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn display<'a>(&'a self, graph: &'a ProgramGraph) -> impl fmt::Display + 'a {
        StateDisplay { state: self, graph }
    }
}

struct StateDisplay<'a> {
    state: &'a State,
    graph: &'a ProgramGraph,
}

impl fmt::Display for StateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in self.state.0.iter().rev() {
            write!(f, "|{} {}| . ", self.graph.edge(item.edge), item.theta)?;
        }
        f.write_str("$")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    /// Enter a clause for a positive literal, pushing an item.
    EnterPositive,
    /// Enter a clause for a negative literal in a fresh single-item stack.
    EnterNegative,
    /// Return from a clause exit to the caller.
    Exit,
    /// Step over a negative literal.
    Negation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    /// A query exit on an otherwise empty stack.
    Final,
    /// A clause exit on an otherwise empty stack; left by negative entries.
    Dead,
    /// No rule applies, e.g. a call no clause head unifies with.
    Stuck,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Breadth-first levels to expand; 0 keeps only the initial states.
    pub depth: usize,
    pub max_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { depth: 10_000, max_states: 100_000 }
    }
}

/// The transition rules over one program graph.
pub struct TransitionSystem<'g> {
    graph: &'g ProgramGraph,
}

impl<'g> TransitionSystem<'g> {
    pub fn new(graph: &'g ProgramGraph) -> Self {
        TransitionSystem { graph }
    }

    fn program(&self) -> &Program {
        self.graph.program()
    }

    fn item(&self, edge: EdgeId, theta: &Substitution) -> Item {
        let owner = self.graph.edge(edge).to.unit;
        Item { edge, theta: theta.canonical_on(self.program().vars_of(owner)) }
    }

    /// One single-item state per query start edge and sample.
    pub fn initial_states(&self, samples: &Samples) -> Vec<State> {
        let mut out = Vec::new();
        for (id, e) in self.graph.edges_of_class(EdgeClass::E0) {
            for theta in samples.for_query(e.to.unit) {
                out.push(State(vec![self.item(id, theta)]));
            }
        }
        out
    }

    pub fn classify(&self, state: &State) -> StateKind {
        let p = self.graph.edge(state.top().edge).to;
        if state.depth() == 1 && self.program().is_exit(p) {
            if self.program().is_query(p.unit) {
                StateKind::Final
            } else {
                StateKind::Dead
            }
        } else if self.step(state).is_empty() {
            StateKind::Stuck
        } else {
            StateKind::Open
        }
    }

    /// All successors of `state`, each tagged with the rule producing it.
    pub fn step(&self, state: &State) -> Vec<(Rule, State)> {
        let program = self.program();
        let mut fresh = FreshVars::new();
        let top = state.top();
        let q = self.graph.edge(top.edge).to;
        let mut out = Vec::new();

        if let Ok(lit) = program.literal_at(q) {
            for &id in self.graph.successors(q).expect("graph point") {
                let e = self.graph.edge(id);
                match e.class {
                    EdgeClass::E1 => {
                        let head = program.head(e.to.unit).expect("clause entry");
                        let Some(theta) = unify_open(&lit.atom, &top.theta, head, &Substitution::empty(), &mut fresh)
                        else {
                            continue;
                        };
                        let item = self.item(id, &theta);
                        if lit.positive {
                            let mut stack = state.0.clone();
                            stack.push(item);
                            out.push((Rule::EnterPositive, State(stack)));
                        } else {
                            out.push((Rule::EnterNegative, State(vec![item])));
                        }
                    }
                    EdgeClass::E3 => {
                        let mut stack = state.0.clone();
                        *stack.last_mut().unwrap() = self.item(id, &top.theta);
                        out.push((Rule::Negation, State(stack)));
                    }
                    EdgeClass::E0 | EdgeClass::E2 => {}
                }
            }
        } else if state.depth() >= 2 && program.is_clause(q.unit) {
            let below = &state.0[state.depth() - 2];
            let pm = self.graph.edge(below.edge).to;
            let Some(p) = program.next(pm) else { return out };
            let Some(id) = self.graph.edge_id(p, q).filter(|&id| self.graph.edge(id).class == EdgeClass::E2) else {
                return out;
            };
            let head = program.head(q.unit).expect("clause exit");
            let call = &program.literal_at(pm).expect("body point").atom;
            if let Some(theta) = unify_open(head, &top.theta, call, &below.theta, &mut fresh) {
                let mut stack = state.0[..state.depth() - 2].to_vec();
                stack.push(self.item(id, &theta));
                out.push((Rule::Exit, State(stack)));
            }
        }
        out
    }

    /// Breadth-first closure of `step` from the initial states.
    pub fn explore(&self, samples: &Samples, limits: Limits) -> Exploration {
        let mut states: Vec<State> = Vec::new();
        let mut origins: Vec<Option<(usize, Rule)>> = Vec::new();
        let mut seen: HashMap<State, usize> = HashMap::new();
        let mut truncated = false;

        for s in self.initial_states(samples) {
            if seen.contains_key(&s) {
                continue;
            }
            if states.len() >= limits.max_states {
                truncated = true;
                break;
            }
            seen.insert(s.clone(), states.len());
            states.push(s);
            origins.push(None);
        }

        let mut frontier: Vec<usize> = (0..states.len()).collect();
        let mut level = 0;
        'levels: while !frontier.is_empty() {
            if level == limits.depth {
                truncated |= frontier.iter().any(|&n| self.step(&states[n]).iter().any(|(_, s)| !seen.contains_key(s)));
                break;
            }
            level += 1;
            let mut next = Vec::new();
            for &n in &frontier {
                for (rule, s) in self.step(&states[n]) {
                    if seen.contains_key(&s) {
                        continue;
                    }
                    if states.len() >= limits.max_states {
                        truncated = true;
                        break 'levels;
                    }
                    seen.insert(s.clone(), states.len());
                    next.push(states.len());
                    states.push(s);
                    origins.push(Some((n, rule)));
                }
            }
            frontier = next;
        }

        let kinds = states.iter().map(|s| self.classify(s)).collect();
        Exploration { states, origins, kinds, truncated, levels: level }
    }
}

/// The outcome of a bounded exploration.
#[derive(Debug, Clone)]
pub struct Exploration {
    pub states: Vec<State>,
    /// Parent state and rule for each non-initial state.
    pub origins: Vec<Option<(usize, Rule)>>,
    pub kinds: Vec<StateKind>,
    /// A limit cut the exploration short.
    pub truncated: bool,
    pub levels: usize,
}

impl Exploration {
    pub fn count(&self, kind: StateKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    /// Every substitution seen on each edge, from items at any stack depth.
    pub fn project_edges(&self) -> BTreeMap<EdgeId, BTreeSet<Substitution>> {
        let mut out: BTreeMap<EdgeId, BTreeSet<Substitution>> = BTreeMap::new();
        for s in &self.states {
            for item in &s.0 {
                out.entry(item.edge).or_default().insert(item.theta.clone());
            }
        }
        out
    }

    /// Answer substitutions of final states, per query.
    pub fn answers(&self, graph: &ProgramGraph) -> BTreeMap<usize, BTreeSet<Substitution>> {
        let mut out: BTreeMap<usize, BTreeSet<Substitution>> = BTreeMap::new();
        for (s, kind) in self.states.iter().zip(&self.kinds) {
            if *kind == StateKind::Final {
                let item = s.top();
                out.entry(graph.edge(item.edge).to.unit).or_default().insert(item.theta.clone());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// `(p)<-(q)` for the flat semantics, `(p)` for the diamond one.
    pub slot: String,
    pub substitution: String,
    #[serde(rename = "abstract")]
    pub abstract_value: String,
}

/// Checks every projected substitution against the abstract value of its
/// edge (flat) or of the edge's destination point (diamond).
pub fn soundness_check<D: AbstractDomain>(
    graph: &ProgramGraph,
    projection: &BTreeMap<EdgeId, BTreeSet<Substitution>>,
    system: &EquationSystem<D::Elem>,
    values: &[D::Elem],
    domain: &D,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for (&id, bucket) in projection {
        let e = graph.edge(id);
        let (slot, n) = match system.kind() {
            SemanticsKind::Flat => (e.to_string(), id),
            SemanticsKind::Diamond => (e.to.to_string(), system.point_index(e.to).expect("point equation")),
        };
        for theta in bucket {
            if !domain.gamma_contains(&values[n], theta) {
                out.push(Violation {
                    slot: slot.clone(),
                    substitution: theta.to_string(),
                    abstract_value: domain.render(&values[n]),
                });
            }
        }
    }
    out
}
