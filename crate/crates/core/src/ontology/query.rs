use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use super::{LogicalConstraint, Ontology, IS_A};
use crate::dot::quote;
use crate::error::OntologyError;

pub const DEFAULT_QUERY_DEPTH: usize = 3;

/// The labeled directed graph around one concept: its `isA` ancestry and
/// the relational constraints attached to it and its ancestors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConceptGraph {
    pub root: String,
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<LogicalConstraint>,
}

impl ConceptGraph {
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph concept {\n  rankdir=BT;\n  node [shape=box];\n");
        for n in &self.nodes {
            if *n == self.root {
                let _ = writeln!(out, "  {} [style=bold];", quote(n));
            } else {
                let _ = writeln!(out, "  {};", quote(n));
            }
        }
        for e in &self.edges {
            let label = match &e.restriction {
                Some(r) => format!("{} {}", e.relation, r),
                None => e.relation.clone(),
            };
            let style = if e.relation == IS_A {
                "dashed"
            } else {
                "solid"
            };
            let _ = writeln!(
                out,
                "  {} -> {} [label={}, style={}];",
                quote(&e.subject),
                quote(&e.object),
                quote(&label),
                style
            );
        }
        out.push_str("}\n");
        out
    }
}

impl Ontology {
    /// Collects `entity`, its `isA` ancestors up to `depth` hops, every
    /// non-hierarchical constraint whose subject is one of those, and the
    /// objects of those constraints.
    pub fn query_concept(&self, entity: &str, depth: usize) -> Result<ConceptGraph, OntologyError> {
        if !self.entities.contains_key(entity) {
            return Err(OntologyError::Lookup(entity.to_string()));
        }
        let mut dist = BTreeMap::from([(entity, 0usize)]);
        let mut queue = VecDeque::from([entity]);
        let mut graph = ConceptGraph {
            root: entity.to_string(),
            ..ConceptGraph::default()
        };
        while let Some(node) = queue.pop_front() {
            let d = dist[node];
            if d >= depth {
                continue;
            }
            for parent in self.parents(node) {
                graph
                    .edges
                    .insert(LogicalConstraint::new(node, IS_A, parent, None));
                if !dist.contains_key(parent) {
                    dist.insert(parent, d + 1);
                    queue.push_back(parent);
                }
            }
        }
        for &node in dist.keys() {
            graph.nodes.insert(node.to_string());
            for c in self.constraints_of(node).filter(|c| !c.is_hierarchical()) {
                graph.nodes.insert(c.object.clone());
                graph.edges.insert(c.clone());
            }
        }
        Ok(graph)
    }

    /// Every declared entity and every constraint except `disjointWith`,
    /// as one graph rooted nowhere.
    pub fn full_graph(&self) -> ConceptGraph {
        ConceptGraph {
            root: String::new(),
            nodes: self.entities.keys().cloned().collect(),
            edges: self
                .constraints
                .iter()
                .filter(|c| c.relation != super::DISJOINT_WITH)
                .cloned()
                .collect(),
        }
    }
}
