use std::collections::BTreeSet;
use std::fmt;

use super::{LogicalConstraint, Ontology};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// `entity` is subsumed by two classes declared disjoint.
    Disjoint {
        entity: String,
        first: String,
        second: String,
    },
    /// Entities that are mutual `isA` ancestors, sorted.
    Cycle { members: Vec<String> },
    /// A stored constraint names something that was never declared.
    Undeclared {
        constraint: LogicalConstraint,
        name: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Disjoint {
                entity,
                first,
                second,
            } => write!(
                f,
                "disjointness: {entity} is subsumed by disjoint classes {first} and {second}"
            ),
            Violation::Cycle { members } => write!(f, "isA cycle: {}", members.join(" -> ")),
            Violation::Undeclared { constraint, name } => {
                write!(f, "undeclared: `{name}` in `{constraint}`")
            }
        }
    }
}

impl Ontology {
    /// Reports every disjointness clash, `isA` cycle, and dangling
    /// reference. An empty list means the ontology is consistent.
    pub fn check_consistency(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        for (entity, ancestors) in &self.ancestors {
            for (a, b) in &self.disjoint {
                if a <= b && ancestors.contains(a) && ancestors.contains(b) {
                    out.push(Violation::Disjoint {
                        entity: entity.clone(),
                        first: a.clone(),
                        second: b.clone(),
                    });
                }
            }
        }

        let mut reported = BTreeSet::new();
        for (entity, ancestors) in &self.ancestors {
            if reported.contains(entity) {
                continue;
            }
            let members: Vec<String> = ancestors
                .iter()
                .filter(|a| *a == entity || self.ancestors[*a].contains(entity))
                .cloned()
                .collect();
            let self_loop = self.parents.get(entity).is_some_and(|p| p.contains(entity));
            if members.len() > 1 || self_loop {
                reported.extend(members.iter().cloned());
                out.push(Violation::Cycle { members });
            }
        }

        for c in &self.constraints {
            let names = [
                (&c.subject, self.entities.contains_key(&c.subject)),
                (&c.relation, self.relations.contains_key(&c.relation)),
                (&c.object, self.entities.contains_key(&c.object)),
            ];
            for (name, declared) in names {
                if !declared {
                    out.push(Violation::Undeclared {
                        constraint: c.clone(),
                        name: name.clone(),
                    });
                }
            }
        }
        out
    }
}
