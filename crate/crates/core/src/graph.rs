//! The dynamic knowledge graph: a labeled directed multigraph whose edges
//! remember every frame interval in which they were observed.
//!
//! The graph only grows. Each union adds missing nodes and edges and
//! appends the triggering interval to edges that already exist; overlapping
//! or adjacent intervals on one edge are merged.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::command::{CommandLanguage, TokenKind};
use crate::dot::quote;
use crate::ontology::{ConceptGraph, LogicalConstraint, Restriction};

/// Inclusive frame-index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeInterval {
    pub start: u64,
    pub end: u64,
}

impl TimeInterval {
    /// # Panics
    /// If `start > end`.
    pub fn new(start: u64, end: u64) -> Self {
        assert!(start <= end, "interval start {start} exceeds end {end}");
        TimeInterval { start, end }
    }

    pub fn frames(&self) -> u64 {
        self.end - self.start + 1
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

/// Inserts `iv` into a sorted, merged interval list, coalescing any
/// intervals it overlaps or touches.
pub fn merge_interval(list: &mut Vec<TimeInterval>, iv: TimeInterval) {
    let mut merged = iv;
    let mut out = Vec::with_capacity(list.len() + 1);
    let mut placed = false;
    for &cur in list.iter() {
        if cur.end.saturating_add(1) < merged.start {
            out.push(cur);
        } else if merged.end.saturating_add(1) < cur.start {
            if !placed {
                out.push(merged);
                placed = true;
            }
            out.push(cur);
        } else {
            merged = TimeInterval::new(merged.start.min(cur.start), merged.end.max(cur.end));
        }
    }
    if !placed {
        out.push(merged);
    }
    *list = out;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Entity,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KgNode {
    pub name: String,
    pub kind: NodeKind,
    pub first_seen: TimeInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Command,
    Ontology,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Command => "command",
            Origin::Ontology => "ontology",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KgEdge {
    pub subject: String,
    pub relation: String,
    pub object: String,
    pub restriction: Option<Restriction>,
    /// Origin of the first union that introduced the edge.
    pub origin: Origin,
    /// Sorted, pairwise disjoint and non-adjacent.
    pub observations: Vec<TimeInterval>,
}

impl KgEdge {
    pub fn key(&self) -> LogicalConstraint {
        LogicalConstraint::new(
            &self.subject,
            &self.relation,
            &self.object,
            self.restriction.clone(),
        )
    }
}

/// Counts of what one union added.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UnionDelta {
    pub nodes: usize,
    pub edges: usize,
}

impl std::ops::AddAssign for UnionDelta {
    fn add_assign(&mut self, rhs: Self) {
        self.nodes += rhs.nodes;
        self.edges += rhs.edges;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DynamicKnowledgeGraph {
    nodes: BTreeMap<String, KgNode>,
    edges: BTreeMap<LogicalConstraint, KgEdge>,
    horizon: Option<u64>,
}

impl DynamicKnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &KgNode> {
        self.nodes.values()
    }

    /// Edges sorted by `(subject, relation, object, restriction)`.
    pub fn edges(&self) -> impl Iterator<Item = &KgEdge> {
        self.edges.values()
    }

    pub fn node(&self, name: &str) -> Option<&KgNode> {
        self.nodes.get(name)
    }

    pub fn edge(&self, key: &LogicalConstraint) -> Option<&KgEdge> {
        self.edges.get(key)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Latest frame index covered by any union, if any.
    pub fn horizon(&self) -> Option<u64> {
        self.horizon
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn touch(&mut self, span: TimeInterval) {
        self.horizon = Some(self.horizon.map_or(span.end, |h| h.max(span.end)));
    }

    fn add_node(&mut self, name: &str, kind: NodeKind, span: TimeInterval) -> bool {
        match self.nodes.get_mut(name) {
            Some(node) => {
                if node.kind == NodeKind::Unresolved && kind == NodeKind::Entity {
                    node.kind = NodeKind::Entity;
                }
                false
            }
            None => {
                self.nodes.insert(
                    name.to_string(),
                    KgNode {
                        name: name.to_string(),
                        kind,
                        first_seen: span,
                    },
                );
                true
            }
        }
    }

    fn add_edge(&mut self, c: &LogicalConstraint, origin: Origin, span: TimeInterval) -> bool {
        match self.edges.get_mut(c) {
            Some(edge) => {
                merge_interval(&mut edge.observations, span);
                false
            }
            None => {
                self.edges.insert(
                    c.clone(),
                    KgEdge {
                        subject: c.subject.clone(),
                        relation: c.relation.clone(),
                        object: c.object.clone(),
                        restriction: c.restriction.clone(),
                        origin,
                        observations: vec![span],
                    },
                );
                true
            }
        }
    }

    /// Adds a command's entities as nodes and its chain as edges.
    pub fn union_command(&mut self, cmd: &CommandLanguage) -> UnionDelta {
        let span = cmd.span();
        self.touch(span);
        let mut delta = UnionDelta::default();
        for token in cmd.entities() {
            let kind = if token.kind == TokenKind::Unresolved {
                NodeKind::Unresolved
            } else {
                NodeKind::Entity
            };
            delta.nodes += usize::from(self.add_node(&token.name, kind, span));
        }
        for c in cmd.to_edges() {
            delta.edges += usize::from(self.add_edge(&c, Origin::Command, span));
        }
        delta
    }

    /// Adds a queried concept graph, stamping its edges with `span`.
    pub fn union_concept(&mut self, concept: &ConceptGraph, span: TimeInterval) -> UnionDelta {
        self.touch(span);
        let mut delta = UnionDelta::default();
        for name in &concept.nodes {
            delta.nodes += usize::from(self.add_node(name, NodeKind::Entity, span));
        }
        for c in &concept.edges {
            for end in [&c.subject, &c.object] {
                delta.nodes += usize::from(self.add_node(end, NodeKind::Entity, span));
            }
            delta.edges += usize::from(self.add_edge(c, Origin::Ontology, span));
        }
        delta
    }

    /// Graphviz DOT rendering. Command edges are solid, ontology edges
    /// dashed, unresolved nodes dotted. Output depends only on graph
    /// contents.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dkg {\n  rankdir=LR;\n  node [shape=box];\n");
        for node in self.nodes.values() {
            match node.kind {
                NodeKind::Entity => {
                    let _ = writeln!(out, "  {};", quote(&node.name));
                }
                NodeKind::Unresolved => {
                    let _ = writeln!(out, "  {} [style=dotted];", quote(&node.name));
                }
            }
        }
        for edge in self.edges.values() {
            let mut label = edge.relation.clone();
            if let Some(r) = &edge.restriction {
                let _ = write!(label, " {r}");
            }
            for iv in &edge.observations {
                let _ = write!(label, " {iv}");
            }
            let style = match edge.origin {
                Origin::Command => "style=solid, color=black",
                Origin::Ontology => "style=dashed, color=gray40",
            };
            let _ = writeln!(
                out,
                "  {} -> {} [label={}, {}];",
                quote(&edge.subject),
                quote(&edge.object),
                quote(&label),
                style
            );
        }
        out.push_str("}\n");
        out
    }

    /// One line per edge: `subject relation object origin [s,e] ...`, with
    /// restrictions folded into the relation as `rel[some]`.
    pub fn to_triples(&self) -> String {
        let mut out = String::new();
        for edge in self.edges.values() {
            let _ = write!(
                out,
                "{} {} {} {}",
                edge.subject,
                edge.key().label(),
                edge.object,
                edge.origin
            );
            for iv in &edge.observations {
                let _ = write!(out, " {iv}");
            }
            out.push('\n');
        }
        out
    }
}
