//! Close matching of free-form tokens onto declared entity names.
//!
//! Stages run in order and the first one with any candidate decides:
//!
//! 1. exact match
//! 2. case-insensitive match
//! 3. word-bag overlap (camel case, `_`, `-` and digit boundaries split
//!    words), Jaccard similarity of at least [`MIN_BAG_OVERLAP`]
//! 4. Levenshtein distance of at most [`MAX_EDIT_DISTANCE`] between the
//!    lowercase alphanumeric forms
//!
//! Within a stage the best score wins and ties go to the alphabetically
//! first name.

use std::collections::BTreeMap;

use super::Ontology;

pub const MIN_BAG_OVERLAP: f64 = 0.5;
pub const MAX_EDIT_DISTANCE: usize = 2;

/// Lowercase alphanumeric form of `token`.
pub fn normalize(token: &str) -> String {
    token
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Splits an identifier into lowercase words.
///
/// ```
/// use streamkg::ontology::word_bag;
/// assert_eq!(word_bag("CentricMug"), ["centric", "mug"]);
/// assert_eq!(word_bag("centric_mug"), ["centric", "mug"]);
/// assert_eq!(word_bag("WAMArm2"), ["wam", "arm", "2"]);
/// ```
pub fn word_bag(token: &str) -> Vec<String> {
    let chars: Vec<char> = token.chars().collect();
    let mut words = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
            continue;
        }
        if !current.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            let boundary = (prev.is_lowercase() && c.is_uppercase())
                || (prev.is_uppercase() && c.is_uppercase() && next_lower)
                || (prev.is_ascii_digit() != c.is_ascii_digit());
            if boundary {
                words.push(std::mem::take(&mut current));
            }
        }
        current.extend(c.to_lowercase());
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}

fn bag_similarity(a: &[String], b: &[String]) -> f64 {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for w in a {
        counts.entry(w).or_default().0 += 1;
    }
    for w in b {
        counts.entry(w).or_default().1 += 1;
    }
    let (inter, union) = counts
        .values()
        .fold((0, 0), |(i, u), &(x, y)| (i + x.min(y), u + x.max(y)));
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

impl Ontology {
    /// Maps `token` to a declared entity name, or `None` if nothing is
    /// close enough.
    pub fn resolve_entity(&self, token: &str) -> Option<&str> {
        if let Some((name, _)) = self.entities.get_key_value(token) {
            return Some(name);
        }
        let names = || self.entities.keys().map(String::as_str);

        let lower = token.to_lowercase();
        if let Some(name) = names().find(|n| n.to_lowercase() == lower) {
            return Some(name);
        }

        let bag = word_bag(token);
        if !bag.is_empty() {
            let mut best: Option<(f64, &str)> = None;
            for name in names() {
                let score = bag_similarity(&bag, &word_bag(name));
                if score >= MIN_BAG_OVERLAP && best.is_none_or(|(s, _)| score > s) {
                    best = Some((score, name));
                }
            }
            if let Some((_, name)) = best {
                return Some(name);
            }
        }

        let norm = normalize(token);
        if norm.is_empty() {
            return None;
        }
        let mut best: Option<(usize, &str)> = None;
        for name in names() {
            let d = strsim::levenshtein(&norm, &normalize(name));
            if d <= MAX_EDIT_DISTANCE && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, name));
            }
        }
        best.map(|(_, name)| name)
    }
}
