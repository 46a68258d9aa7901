//! Command languages: alternating entity/relation chains such as
//! `WAM grasp PlasticBottle pour GlassCup`.
//!
//! Odd positions (1-based) hold entities and even positions hold relations,
//! so every valid chain starts and ends with an entity. A lone entity is a
//! valid command with no edges.

use std::fmt;

use crate::error::CommandError;
use crate::graph::TimeInterval;
use crate::ontology::{LogicalConstraint, Ontology};

pub const MAX_COMMAND_TOKENS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Entity,
    Relation,
    /// An entity slot whose text matched nothing in the ontology.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CommandToken {
    /// The token as written.
    pub text: String,
    /// Canonical ontology name, or `text` itself when unresolved.
    pub name: String,
    pub kind: TokenKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandLanguage {
    tokens: Vec<CommandToken>,
    span: TimeInterval,
}

impl CommandLanguage {
    pub fn tokens(&self) -> &[CommandToken] {
        &self.tokens
    }

    pub fn span(&self) -> TimeInterval {
        self.span
    }

    /// Entity and unresolved tokens, in order.
    pub fn entities(&self) -> impl Iterator<Item = &CommandToken> {
        self.tokens.iter().step_by(2)
    }

    /// `(e1, a1, e2), (e2, a2, e3), ...` with no restrictions.
    pub fn to_edges(&self) -> Vec<LogicalConstraint> {
        self.tokens
            .windows(3)
            .step_by(2)
            .map(|w| LogicalConstraint::new(&w[0].name, &w[1].name, &w[2].name, None))
            .collect()
    }

    /// Token texts in order; parsing them again reproduces `self`.
    pub fn render(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.text.clone()).collect()
    }
}

impl fmt::Display for CommandLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render().join(" "))
    }
}

fn lookup_relation<'o>(onto: &'o Ontology, token: &str) -> Option<&'o str> {
    if let Some((name, _)) = onto.relations().find(|(name, _)| *name == token) {
        return Some(name);
    }
    let lower = token.to_lowercase();
    onto.relations()
        .find(|(name, _)| name.to_lowercase() == lower)
        .map(|(name, _)| name)
}

/// Exact or case-insensitive entity match, without the fuzzier stages.
fn is_plain_entity(onto: &Ontology, token: &str) -> bool {
    let lower = token.to_lowercase();
    onto.entity_kind(token).is_some() || onto.entities().any(|(n, _)| n.to_lowercase() == lower)
}

/// Classifies and validates a token list against the ontology vocabulary.
pub fn parse_command<S: AsRef<str>>(
    tokens: &[S],
    onto: &Ontology,
    span: TimeInterval,
) -> Result<CommandLanguage, CommandError> {
    if tokens.is_empty() {
        return Err(CommandError::Empty);
    }
    if tokens.len() > MAX_COMMAND_TOKENS {
        return Err(CommandError::TooLong {
            len: tokens.len(),
            max: MAX_COMMAND_TOKENS,
        });
    }
    let mut parsed = Vec::with_capacity(tokens.len());
    for (i, raw) in tokens.iter().enumerate() {
        let text = raw.as_ref();
        let position = i + 1;
        let token = if i % 2 == 0 {
            if !is_plain_entity(onto, text) && lookup_relation(onto, text).is_some() {
                return Err(CommandError::Alternation {
                    position,
                    token: text.to_string(),
                    expected: "an entity",
                });
            }
            match onto.resolve_entity(text) {
                Some(name) => CommandToken {
                    text: text.to_string(),
                    name: name.to_string(),
                    kind: TokenKind::Entity,
                },
                None => CommandToken {
                    text: text.to_string(),
                    name: text.to_string(),
                    kind: TokenKind::Unresolved,
                },
            }
        } else {
            match lookup_relation(onto, text) {
                Some(name) => CommandToken {
                    text: text.to_string(),
                    name: name.to_string(),
                    kind: TokenKind::Relation,
                },
                None if is_plain_entity(onto, text) => {
                    return Err(CommandError::Alternation {
                        position,
                        token: text.to_string(),
                        expected: "a relation",
                    })
                }
                None => {
                    return Err(CommandError::UnknownRelation {
                        position,
                        token: text.to_string(),
                    })
                }
            }
        };
        parsed.push(token);
    }
    if parsed.len() % 2 == 0 {
        let last = parsed.len();
        return Err(CommandError::Alternation {
            position: last,
            token: parsed[last - 1].text.clone(),
            expected: "followed by an entity",
        });
    }
    Ok(CommandLanguage {
        tokens: parsed,
        span,
    })
}

/// Splits a whitespace-delimited command line and parses it.
pub fn parse_command_line(
    line: &str,
    onto: &Ontology,
    span: TimeInterval,
) -> Result<CommandLanguage, CommandError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    parse_command(&tokens, onto, span)
}
