//! Static manipulation-domain knowledge: classes, individuals, and
//! restricted binary relations between them.
//!
//! An [`Ontology`] is immutable once built. Loading precomputes the
//! reflexive-transitive `isA` closure so subsumption checks are a set
//! lookup. Individuals join the hierarchy through `memberOf`, which counts
//! as a single `isA` hop.

mod consistency;
mod parse;
mod query;
mod resolve;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::OntologyError;

pub use consistency::Violation;
pub use parse::load_ontology;
pub use query::{ConceptGraph, DEFAULT_QUERY_DEPTH};
pub use resolve::{normalize, word_bag};

pub const IS_A: &str = "isA";
pub const DISJOINT_WITH: &str = "disjointWith";

pub(crate) const RESERVED: &[&str] = &[
    "class",
    "individual",
    "relation",
    "memberOf",
    IS_A,
    DISJOINT_WITH,
    "some",
    "only",
    "exactly",
    "min",
    "max",
    "value",
];

/// A bundled ontology covering the manipulation examples used throughout
/// the docs and tests.
pub const SAMPLE_ONTOLOGY: &str = include_str!("../../data/sample.onto");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Class,
    Individual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationCategory {
    Hierarchical,
    Action,
    Attribute,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Restriction {
    Some,
    Only,
    Exactly(u32),
    Min(u32),
    Max(u32),
    /// The constraint's object is the required individual.
    HasValue,
}

impl Restriction {
    /// Whitespace-free rendering, e.g. `some` or `exactly=2`.
    pub fn compact(&self) -> String {
        match self {
            Restriction::Exactly(n) => format!("exactly={n}"),
            Restriction::Min(n) => format!("min={n}"),
            Restriction::Max(n) => format!("max={n}"),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Restriction::Some => f.write_str("some"),
            Restriction::Only => f.write_str("only"),
            Restriction::Exactly(n) => write!(f, "exactly {n}"),
            Restriction::Min(n) => write!(f, "min {n}"),
            Restriction::Max(n) => write!(f, "max {n}"),
            Restriction::HasValue => f.write_str("value"),
        }
    }
}

/// One `subject --relation[restriction]--> object` edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LogicalConstraint {
    pub subject: String,
    pub relation: String,
    pub object: String,
    pub restriction: Option<Restriction>,
}

impl LogicalConstraint {
    pub fn new(
        subject: impl Into<String>,
        relation: impl Into<String>,
        object: impl Into<String>,
        restriction: Option<Restriction>,
    ) -> Self {
        LogicalConstraint {
            subject: subject.into(),
            relation: relation.into(),
            object: object.into(),
            restriction,
        }
    }

    pub fn is_hierarchical(&self) -> bool {
        self.relation == IS_A || self.relation == DISJOINT_WITH
    }

    /// Relation label with its restriction, e.g. `canHold[some]`.
    pub fn label(&self) -> String {
        match &self.restriction {
            Some(r) => format!("{}[{}]", self.relation, r.compact()),
            None => self.relation.clone(),
        }
    }
}

impl fmt::Display for LogicalConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.restriction {
            Some(r) => write!(
                f,
                "{} {} {} {}",
                self.subject, self.relation, r, self.object
            ),
            None => write!(f, "{} {} {}", self.subject, self.relation, self.object),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Ontology {
    entities: BTreeMap<String, EntityKind>,
    relations: BTreeMap<String, RelationCategory>,
    constraints: Vec<LogicalConstraint>,
    parents: BTreeMap<String, BTreeSet<String>>,
    ancestors: BTreeMap<String, BTreeSet<String>>,
    disjoint: BTreeSet<(String, String)>,
    by_subject: BTreeMap<String, Vec<usize>>,
}

impl Ontology {
    pub fn entity_kind(&self, name: &str) -> Option<EntityKind> {
        self.entities.get(name).copied()
    }

    pub fn relation_category(&self, name: &str) -> Option<RelationCategory> {
        self.relations.get(name).copied()
    }

    pub fn entities(&self) -> impl Iterator<Item = (&str, EntityKind)> {
        self.entities.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Declared relations, including the built-in hierarchical ones.
    pub fn relations(&self) -> impl Iterator<Item = (&str, RelationCategory)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// All constraints in declaration order. `memberOf` declarations appear
    /// as `isA` constraints.
    pub fn constraints(&self) -> &[LogicalConstraint] {
        &self.constraints
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty() && self.constraints.is_empty()
    }

    /// Direct `isA` parents.
    pub fn parents(&self, name: &str) -> impl Iterator<Item = &str> {
        self.parents
            .get(name)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    /// Reflexive-transitive `isA` ancestors.
    pub fn ancestors(&self, name: &str) -> Result<&BTreeSet<String>, OntologyError> {
        self.ancestors
            .get(name)
            .ok_or_else(|| OntologyError::Lookup(name.to_string()))
    }

    /// True iff `b` is reachable from `a` over zero or more `isA` edges.
    pub fn is_subclass(&self, a: &str, b: &str) -> Result<bool, OntologyError> {
        if !self.entities.contains_key(b) {
            return Err(OntologyError::Lookup(b.to_string()));
        }
        Ok(self.ancestors(a)?.contains(b))
    }

    /// Declared disjoint pairs, each stored in both orders.
    pub fn disjoint_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.disjoint.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub(crate) fn constraints_of(&self, subject: &str) -> impl Iterator<Item = &LogicalConstraint> {
        self.by_subject
            .get(subject)
            .into_iter()
            .flat_map(move |ix| ix.iter().map(move |&i| &self.constraints[i]))
    }
}

/// Incremental construction of an [`Ontology`] with the same validation
/// rules as the text loader. Names must be declared before they are used.
#[derive(Debug, Default)]
pub struct OntologyBuilder {
    onto: Ontology,
    seen: BTreeSet<LogicalConstraint>,
    statement: usize,
}

impl OntologyBuilder {
    pub fn new() -> Self {
        let mut b = OntologyBuilder::default();
        b.onto
            .relations
            .insert(IS_A.to_string(), RelationCategory::Hierarchical);
        b.onto
            .relations
            .insert(DISJOINT_WITH.to_string(), RelationCategory::Hierarchical);
        b
    }

    fn next_line(&mut self) -> usize {
        self.statement += 1;
        self.statement
    }

    pub fn class(&mut self, name: &str) -> Result<&mut Self, OntologyError> {
        let line = self.next_line();
        self.declare_entity(name, EntityKind::Class, line)?;
        Ok(self)
    }

    /// Declares an individual and its membership in `class`.
    pub fn individual(&mut self, name: &str, class: &str) -> Result<&mut Self, OntologyError> {
        let line = self.next_line();
        self.declare_entity(name, EntityKind::Individual, line)?;
        self.add_constraint(LogicalConstraint::new(name, IS_A, class, None), line)?;
        Ok(self)
    }

    pub fn relation(
        &mut self,
        name: &str,
        category: RelationCategory,
    ) -> Result<&mut Self, OntologyError> {
        let line = self.next_line();
        self.declare_relation(name, category, line)?;
        Ok(self)
    }

    pub fn constraint(&mut self, c: LogicalConstraint) -> Result<&mut Self, OntologyError> {
        let line = self.next_line();
        self.add_constraint(c, line)?;
        Ok(self)
    }

    pub fn build(self) -> Ontology {
        let mut onto = self.onto;
        onto.ancestors = closure(&onto.entities, &onto.parents);
        onto
    }

    pub(crate) fn declare_entity(
        &mut self,
        name: &str,
        kind: EntityKind,
        line: usize,
    ) -> Result<(), OntologyError> {
        check_name(name, line)?;
        if self.onto.entities.contains_key(name) || self.onto.relations.contains_key(name) {
            return Err(OntologyError::Duplicate {
                line,
                name: name.to_string(),
            });
        }
        self.onto.entities.insert(name.to_string(), kind);
        Ok(())
    }

    pub(crate) fn declare_relation(
        &mut self,
        name: &str,
        category: RelationCategory,
        line: usize,
    ) -> Result<(), OntologyError> {
        check_name(name, line)?;
        if category == RelationCategory::Hierarchical {
            return Err(OntologyError::Kind {
                line,
                message: format!("`{name}`: only isA and disjointWith are hierarchical"),
            });
        }
        if self.onto.entities.contains_key(name) || self.onto.relations.contains_key(name) {
            return Err(OntologyError::Duplicate {
                line,
                name: name.to_string(),
            });
        }
        self.onto.relations.insert(name.to_string(), category);
        Ok(())
    }

    pub(crate) fn add_constraint(
        &mut self,
        c: LogicalConstraint,
        line: usize,
    ) -> Result<(), OntologyError> {
        let kind_of = |name: &str| {
            self.onto
                .entities
                .get(name)
                .copied()
                .ok_or_else(|| OntologyError::Undeclared {
                    line,
                    name: name.to_string(),
                })
        };
        let subject_kind = kind_of(&c.subject)?;
        let object_kind = kind_of(&c.object)?;
        let category = self
            .onto
            .relations
            .get(&c.relation)
            .copied()
            .ok_or_else(|| OntologyError::Undeclared {
                line,
                name: c.relation.clone(),
            })?;
        let kind_err = |message: String| OntologyError::Kind { line, message };

        if category == RelationCategory::Hierarchical {
            if c.restriction.is_some() {
                return Err(kind_err(format!("{} takes no restriction", c.relation)));
            }
            if object_kind != EntityKind::Class {
                return Err(kind_err(format!("`{}` is not a class", c.object)));
            }
            if c.relation == DISJOINT_WITH && subject_kind != EntityKind::Class {
                return Err(kind_err(format!("`{}` is not a class", c.subject)));
            }
        } else if c.restriction == Some(Restriction::HasValue)
            && object_kind != EntityKind::Individual
        {
            return Err(kind_err(format!(
                "value restriction needs an individual, `{}` is a class",
                c.object
            )));
        }

        let key = if c.relation == DISJOINT_WITH && c.object < c.subject {
            LogicalConstraint::new(&c.object, DISJOINT_WITH, &c.subject, None)
        } else {
            c.clone()
        };
        if !self.seen.insert(key) {
            return Err(OntologyError::Duplicate {
                line,
                name: c.to_string(),
            });
        }

        if c.relation == IS_A {
            self.onto
                .parents
                .entry(c.subject.clone())
                .or_default()
                .insert(c.object.clone());
        } else if c.relation == DISJOINT_WITH {
            self.onto
                .disjoint
                .insert((c.subject.clone(), c.object.clone()));
            self.onto
                .disjoint
                .insert((c.object.clone(), c.subject.clone()));
        }
        let index = self.onto.constraints.len();
        self.onto
            .by_subject
            .entry(c.subject.clone())
            .or_default()
            .push(index);
        self.onto.constraints.push(c);
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn push_unchecked(&mut self, c: LogicalConstraint) {
        self.onto.constraints.push(c);
    }
}

fn check_name(name: &str, line: usize) -> Result<(), OntologyError> {
    let valid = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if !valid {
        return Err(OntologyError::Syntax {
            line,
            message: format!("`{name}` is not a valid name"),
        });
    }
    if RESERVED.contains(&name) {
        return Err(OntologyError::Reserved {
            line,
            name: name.to_string(),
        });
    }
    Ok(())
}

fn closure(
    entities: &BTreeMap<String, EntityKind>,
    parents: &BTreeMap<String, BTreeSet<String>>,
) -> BTreeMap<String, BTreeSet<String>> {
    entities
        .keys()
        .map(|start| {
            let mut seen = BTreeSet::from([start.clone()]);
            let mut queue = VecDeque::from([start.as_str()]);
            while let Some(node) = queue.pop_front() {
                for p in parents.get(node).into_iter().flatten() {
                    if seen.insert(p.clone()) {
                        queue.push_back(p);
                    }
                }
            }
            (start.clone(), seen)
        })
        .collect()
}
