//! The program graph: program points plus the dummy point `(0,0)`, with
//! edges `⟨p ← q⟩` meaning control may pass from `q` to `p`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::syntax::{PointError, Program, ProgramPoint};
use crate::term::{mgu_atoms, rename_apart, Expr, FreshVars};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EdgeClass {
    /// Query start, from the dummy point.
    E0,
    /// Procedure entry, from a body literal to a clause entry.
    E1,
    /// Procedure exit, from a clause exit back to the caller.
    E2,
    /// Negation, across a negative literal.
    E3,
}

impl EdgeClass {
    pub const ALL: [EdgeClass; 4] = [EdgeClass::E0, EdgeClass::E1, EdgeClass::E2, EdgeClass::E3];
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Class of a point, from the class of its incoming edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PointClass {
    N0,
    N1,
    N2,
    N3,
    /// No incoming edges.
    None,
}

impl From<EdgeClass> for PointClass {
    fn from(c: EdgeClass) -> Self {
        match c {
            EdgeClass::E0 => PointClass::N0,
            EdgeClass::E1 => PointClass::N1,
            EdgeClass::E2 => PointClass::N2,
            EdgeClass::E3 => PointClass::N3,
        }
    }
}

impl fmt::Display for PointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointClass::None => f.write_str("none"),
            c => write!(f, "{c:?}"),
        }
    }
}

/// `⟨to ← from⟩`. Ordered by destination, then source, then class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub to: ProgramPoint,
    pub from: ProgramPoint,
    pub class: EdgeClass,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<-{}", self.to, self.from)
    }
}

/// Position of an edge in [`ProgramGraph::edges`].
pub type EdgeId = usize;

#[derive(Debug, Clone)]
pub struct ProgramGraph {
    program: Program,
    nodes: Vec<ProgramPoint>,
    edges: Vec<Edge>,
    by_endpoints: BTreeMap<(ProgramPoint, ProgramPoint), EdgeId>,
    preds: BTreeMap<ProgramPoint, Vec<EdgeId>>,
    succs: BTreeMap<ProgramPoint, Vec<EdgeId>>,
}

impl ProgramGraph {
    pub fn build(program: &Program) -> Self {
        let mut edges = Vec::new();
        let mut fresh = FreshVars::new();

        for k in program.query_indices() {
            edges.push(Edge { to: program.entry(k), from: ProgramPoint::DUMMY, class: EdgeClass::E0 });
        }

        // E1: each body literal to every clause whose head it unifies with.
        let mut entries: BTreeMap<ProgramPoint, Vec<usize>> = BTreeMap::new();
        for q in program.points() {
            let Ok(lit) = program.literal_at(q) else { continue };
            for i in program.clause_indices() {
                let head = program.head(i).expect("clause index");
                if !lit.atom.same_predicate(head) {
                    continue;
                }
                let (renamed, _) = rename_apart(&lit.atom, &head.vars(), &mut fresh);
                if mgu_atoms(&renamed, head).is_some() {
                    edges.push(Edge { to: program.entry(i), from: q, class: EdgeClass::E1 });
                    entries.entry(q).or_default().push(i);
                }
            }
        }

        for p in program.points() {
            let Some(pm) = program.prev(p) else { continue };
            let lit = program.literal_at(pm).expect("body point");
            if lit.positive {
                for &i in entries.get(&pm).map(Vec::as_slice).unwrap_or(&[]) {
                    edges.push(Edge { to: p, from: program.exit(i), class: EdgeClass::E2 });
                }
            } else {
                edges.push(Edge { to: p, from: pm, class: EdgeClass::E3 });
            }
        }

        edges.sort();
        let mut nodes = vec![ProgramPoint::DUMMY];
        nodes.extend(program.points());
        let mut by_endpoints = BTreeMap::new();
        let mut preds: BTreeMap<ProgramPoint, Vec<EdgeId>> = nodes.iter().map(|&n| (n, Vec::new())).collect();
        let mut succs = preds.clone();
        for (id, e) in edges.iter().enumerate() {
            let dup = by_endpoints.insert((e.to, e.from), id);
            debug_assert!(dup.is_none(), "edge {e} has two classes");
            preds.get_mut(&e.to).expect("known destination").push(id);
            succs.get_mut(&e.from).expect("known source").push(id);
        }

        let g = ProgramGraph { program: program.clone(), nodes, edges, by_endpoints, preds, succs };
        debug_assert!(g.e2_witnessed());
        g
    }

    /// Every E2 edge `⟨p ← exit(i)⟩` has an E1 edge `⟨entry(i) ← p⁻⟩` with a
    /// positive literal at `p⁻`.
    fn e2_witnessed(&self) -> bool {
        self.edges.iter().filter(|e| e.class == EdgeClass::E2).all(|e| {
            let Some(pm) = self.program.prev(e.to) else { return false };
            let positive = self.program.literal_at(pm).map(|l| l.positive).unwrap_or(false);
            positive
                && self
                    .edge_id(self.program.entry(e.from.unit), pm)
                    .is_some_and(|id| self.edges[id].class == EdgeClass::E1)
        })
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    /// `(0,0)` followed by the program points in order.
    pub fn nodes(&self) -> &[ProgramPoint] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edge_id(&self, to: ProgramPoint, from: ProgramPoint) -> Option<EdgeId> {
        self.by_endpoints.get(&(to, from)).copied()
    }

    pub fn edges_of_class(&self, class: EdgeClass) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.class == class)
    }

    pub fn count(&self, class: EdgeClass) -> usize {
        self.edges_of_class(class).count()
    }

    /// Edges `⟨q ← u⟩` into `q`.
    pub fn predecessors(&self, q: ProgramPoint) -> Result<&[EdgeId], PointError> {
        self.preds.get(&q).map(Vec::as_slice).ok_or(PointError::Unknown(q))
    }

    /// Edges `⟨u ← q⟩` out of `q`.
    pub fn successors(&self, q: ProgramPoint) -> Result<&[EdgeId], PointError> {
        self.succs.get(&q).map(Vec::as_slice).ok_or(PointError::Unknown(q))
    }

    /// Largest number of incoming edges at any point.
    pub fn pmax(&self) -> usize {
        self.preds.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn point_class(&self, p: ProgramPoint) -> Result<PointClass, PointError> {
        let preds = self.predecessors(p)?;
        let Some(&first) = preds.first() else { return Ok(PointClass::None) };
        let class = self.edges[first].class;
        debug_assert!(preds.iter().all(|&id| self.edges[id].class == class), "point {p} has mixed classes");
        Ok(class.into())
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph program {\n");
        for n in &self.nodes {
            let shape = if n.is_dummy() { "box" } else { "ellipse" };
            writeln!(out, "  \"{n}\" [shape={shape}];").unwrap();
        }
        for e in &self.edges {
            let style = match e.class {
                EdgeClass::E0 => "bold",
                EdgeClass::E1 => "solid",
                EdgeClass::E2 => "dashed",
                EdgeClass::E3 => "dotted",
            };
            writeln!(out, "  \"{}\" -> \"{}\" [label=\"{}\", style={style}];", e.from, e.to, e.class).unwrap();
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<_> = self.nodes.iter().map(|n| serde_json::json!({ "i": n.unit, "j": n.pos })).collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                serde_json::json!({
                    "p": [e.to.unit, e.to.pos],
                    "q": [e.from.unit, e.from.pos],
                    "class": e.class.to_string(),
                })
            })
            .collect();
        serde_json::json!({ "schema": 1, "nodes": nodes, "edges": edges })
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            nodes: self.nodes.len(),
            edges: self.edges.len(),
            e0: self.count(EdgeClass::E0),
            e1: self.count(EdgeClass::E1),
            e2: self.count(EdgeClass::E2),
            e3: self.count(EdgeClass::E3),
            pmax: self.pmax(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub e0: usize,
    pub e1: usize,
    pub e2: usize,
    pub e3: usize,
    pub pmax: usize,
}
