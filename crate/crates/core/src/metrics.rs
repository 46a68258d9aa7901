//! Corpus-level BLEU-4 and ROUGE-L for scoring generated command languages
//! against references.
//!
//! BLEU is the classic unsmoothed form: uniform weights over clipped 1- to
//! 4-gram precisions, brevity penalty `exp(1 - r/c)` when `c <= r`, with
//! `r` summed over the closest reference length per candidate (shorter
//! reference on ties). Any zero precision makes the score 0.
//!
//! ROUGE-L averages the per-pair LCS F-measure with `beta = 1.2`, keeping
//! the best reference for each candidate.

use std::collections::HashMap;

use crate::error::MetricsError;

pub const ROUGE_BETA: f64 = 1.2;
const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredPair {
    pub candidate: Vec<String>,
    pub references: Vec<Vec<String>>,
}

impl ScoredPair {
    pub fn new<S: AsRef<str>>(candidate: &str, references: &[S]) -> Self {
        let split = |s: &str| s.split_whitespace().map(str::to_string).collect::<Vec<_>>();
        ScoredPair {
            candidate: split(candidate),
            references: references.iter().map(|r| split(r.as_ref())).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScoredCorpus {
    pub pairs: Vec<ScoredPair>,
}

impl ScoredCorpus {
    pub fn new(pairs: Vec<ScoredPair>) -> Self {
        ScoredCorpus { pairs }
    }

    fn validate(&self) -> Result<(), MetricsError> {
        if self.pairs.is_empty() {
            return Err(MetricsError::EmptyCorpus);
        }
        for (i, p) in self.pairs.iter().enumerate() {
            if p.references.is_empty() {
                return Err(MetricsError::NoReferences(i));
            }
            if p.candidate.is_empty() || p.references.iter().any(Vec::is_empty) {
                return Err(MetricsError::EmptySentence(i));
            }
        }
        Ok(())
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

pub fn bleu4(corpus: &ScoredCorpus) -> Result<f64, MetricsError> {
    corpus.validate()?;
    let mut matched = [0usize; MAX_ORDER];
    let mut total = [0usize; MAX_ORDER];
    let mut cand_len = 0usize;
    let mut ref_len = 0usize;

    for pair in &corpus.pairs {
        let c = pair.candidate.len();
        cand_len += c;
        ref_len += pair
            .references
            .iter()
            .map(Vec::len)
            .min_by_key(|&r| (r.abs_diff(c), r))
            .unwrap_or(0);

        for n in 1..=MAX_ORDER {
            let cand = ngram_counts(&pair.candidate, n);
            let mut max_ref: HashMap<&[String], usize> = HashMap::new();
            for r in &pair.references {
                for (gram, count) in ngram_counts(r, n) {
                    let e = max_ref.entry(gram).or_insert(0);
                    *e = (*e).max(count);
                }
            }
            for (gram, count) in &cand {
                matched[n - 1] += (*count).min(max_ref.get(gram).copied().unwrap_or(0));
            }
            total[n - 1] += c.saturating_sub(n - 1);
        }
    }

    if matched.contains(&0) {
        return Ok(0.0);
    }
    let log_precision: f64 = matched
        .iter()
        .zip(&total)
        .map(|(&m, &t)| (m as f64 / t as f64).ln())
        .sum::<f64>()
        / MAX_ORDER as f64;
    let brevity = if cand_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / cand_len as f64).exp()
    };
    Ok(brevity * log_precision.exp())
}

/// Length of the longest common subsequence.
pub fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn lcs_f(candidate: &[String], reference: &[String]) -> f64 {
    let lcs = lcs_len(candidate, reference) as f64;
    if lcs == 0.0 {
        return 0.0;
    }
    let p = lcs / candidate.len() as f64;
    let r = lcs / reference.len() as f64;
    let b2 = ROUGE_BETA * ROUGE_BETA;
    (1.0 + b2) * p * r / (r + b2 * p)
}

pub fn rouge_l(corpus: &ScoredCorpus) -> Result<f64, MetricsError> {
    corpus.validate()?;
    let sum: f64 = corpus
        .pairs
        .iter()
        .map(|p| {
            p.references
                .iter()
                .map(|r| lcs_f(&p.candidate, r))
                .fold(0.0, f64::max)
        })
        .sum();
    Ok(sum / corpus.pairs.len() as f64)
}
