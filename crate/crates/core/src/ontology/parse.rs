//! Line-based ontology text format.
//!
//! ```text
//! class <Name>
//! individual <Name> memberOf <Class>
//! relation <Name> action|attribute
//! <A> isA <B>
//! <A> disjointWith <B>
//! <Subj> <rel> some|only <Obj>
//! <Subj> <rel> exactly|min|max <n> <Obj>
//! <Subj> <rel> value <Individual>
//! ```
//!
//! `#` starts a comment. Declarations may appear anywhere in the file; the
//! loader reads them before resolving any constraint.

use super::{
    EntityKind, LogicalConstraint, Ontology, OntologyBuilder, RelationCategory, Restriction, IS_A,
};
use crate::error::OntologyError;

enum Statement<'a> {
    Class(&'a str),
    Individual { name: &'a str, class: &'a str },
    Relation(&'a str, RelationCategory),
    Constraint(LogicalConstraint),
}

pub fn load_ontology(source: &str) -> Result<Ontology, OntologyError> {
    let mut statements = Vec::new();
    for (n, raw) in source.lines().enumerate() {
        let line = n + 1;
        let text = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = text.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        statements.push((line, parse_statement(&words, line)?));
    }

    let mut builder = OntologyBuilder::new();
    for (line, stmt) in &statements {
        match stmt {
            Statement::Class(name) => builder.declare_entity(name, EntityKind::Class, *line)?,
            Statement::Individual { name, .. } => {
                builder.declare_entity(name, EntityKind::Individual, *line)?
            }
            Statement::Relation(name, category) => {
                builder.declare_relation(name, *category, *line)?
            }
            Statement::Constraint(_) => {}
        }
    }
    for (line, stmt) in statements {
        match stmt {
            Statement::Individual { name, class } => {
                builder.add_constraint(LogicalConstraint::new(name, IS_A, class, None), line)?
            }
            Statement::Constraint(c) => builder.add_constraint(c, line)?,
            _ => {}
        }
    }
    Ok(builder.build())
}

fn parse_statement<'a>(words: &[&'a str], line: usize) -> Result<Statement<'a>, OntologyError> {
    let syntax = |message: &str| OntologyError::Syntax {
        line,
        message: message.to_string(),
    };
    match words {
        ["class", name] => Ok(Statement::Class(name)),
        ["class", ..] => Err(syntax("expected `class <Name>`")),
        ["individual", name, "memberOf", class] => Ok(Statement::Individual { name, class }),
        ["individual", ..] => Err(syntax("expected `individual <Name> memberOf <Class>`")),
        ["relation", name, category] => {
            let category = match *category {
                "action" => RelationCategory::Action,
                "attribute" => RelationCategory::Attribute,
                _ => return Err(syntax("relation category must be `action` or `attribute`")),
            };
            Ok(Statement::Relation(name, category))
        }
        ["relation", ..] => Err(syntax("expected `relation <Name> action|attribute`")),
        [a, rel @ ("isA" | "disjointWith"), b] => Ok(Statement::Constraint(
            LogicalConstraint::new(*a, *rel, *b, None),
        )),
        [_, "isA" | "disjointWith", ..] => {
            Err(syntax("hierarchical statements take no restriction"))
        }
        [s, rel, quantifier @ ("some" | "only" | "value"), o] => {
            let r = match *quantifier {
                "some" => Restriction::Some,
                "only" => Restriction::Only,
                _ => Restriction::HasValue,
            };
            Ok(Statement::Constraint(LogicalConstraint::new(
                *s,
                *rel,
                *o,
                Some(r),
            )))
        }
        [s, rel, card @ ("exactly" | "min" | "max"), n, o] => {
            let n: u32 = n
                .parse()
                .map_err(|_| syntax(&format!("`{n}` is not a non-negative integer")))?;
            let r = match *card {
                "exactly" => Restriction::Exactly(n),
                "min" => Restriction::Min(n),
                _ => Restriction::Max(n),
            };
            Ok(Statement::Constraint(LogicalConstraint::new(
                *s,
                *rel,
                *o,
                Some(r),
            )))
        }
        _ => Err(syntax("unrecognised statement")),
    }
}
