//! Brute-force oracles and generators shared by the integration tests.
//! Nothing in here calls the library's closure, query or union code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use streamkg::error::CaptionError;
use streamkg::ontology::{LogicalConstraint, Ontology};
use streamkg::pipeline::{CaptionResult, Captioner};
use streamkg::sampler::Clip;

pub const JUNK: [&str; 3] = ["zzqxvy_k7", "wobblefritz99", "qqplonk_zz"];

// ---------------------------------------------------------------- ontologies

/// A random class hierarchy written in the native text format, plus the raw
/// edge lists it was built from.
pub struct RandomOntology {
    pub text: String,
    pub classes: Vec<String>,
    pub is_a: BTreeSet<(usize, usize)>,
    pub disjoint: BTreeSet<(usize, usize)>,
}

pub fn random_ontology(rng: &mut ChaCha8Rng, max_classes: usize) -> RandomOntology {
    let n = rng.gen_range(1..=max_classes);
    let classes: Vec<String> = (0..n).map(|i| format!("C{i}")).collect();
    let mut is_a = BTreeSet::new();
    let edges = rng.gen_range(0..=2 * n);
    // mostly downward edges so deep hierarchies appear, with a few back
    // edges for cycles and self-loops
    for _ in 0..edges {
        let a = rng.gen_range(0..n);
        let b = if rng.gen_bool(0.9) && a > 0 {
            rng.gen_range(0..a)
        } else {
            rng.gen_range(0..n)
        };
        is_a.insert((a, b));
    }
    let mut disjoint = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=n / 4 + 1) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            disjoint.insert((a.min(b), a.max(b)));
        }
    }
    let mut lines: Vec<String> = classes.iter().map(|c| format!("class {c}")).collect();
    lines.extend(is_a.iter().map(|(a, b)| format!("C{a} isA C{b}")));
    lines.extend(disjoint.iter().map(|(a, b)| {
        if rng.gen_bool(0.5) {
            format!("C{a} disjointWith C{b}")
        } else {
            format!("C{b} disjointWith C{a}")
        }
    }));
    lines.shuffle(rng);
    RandomOntology {
        text: lines.join("\n"),
        classes,
        is_a,
        disjoint,
    }
}

/// Every class reachable from `from` along `isA` edges, including itself.
pub fn reachable(is_a: &BTreeSet<(usize, usize)>, from: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        for &(a, b) in is_a {
            if a == x && seen.insert(b) {
                stack.push(b);
            }
        }
    }
    seen
}

pub type Clashes = BTreeSet<(String, String, String)>;
pub type Cycles = BTreeSet<Vec<String>>;

/// Disjointness clashes as `(entity, first, second)` with `first < second`
/// by name, and cycles as sorted member lists.
pub fn brute_violations(r: &RandomOntology) -> (Clashes, Cycles) {
    let n = r.classes.len();
    let reach: Vec<BTreeSet<usize>> = (0..n).map(|i| reachable(&r.is_a, i)).collect();
    let mut clashes = BTreeSet::new();
    for (x, rx) in reach.iter().enumerate() {
        for &(a, b) in &r.disjoint {
            if rx.contains(&a) && rx.contains(&b) {
                let (p, q) = (r.classes[a].clone(), r.classes[b].clone());
                let (first, second) = if p < q { (p, q) } else { (q, p) };
                clashes.insert((r.classes[x].clone(), first, second));
            }
        }
    }
    let mut cycles = BTreeSet::new();
    for x in 0..n {
        let mut members: Vec<String> = (0..n)
            .filter(|&y| reach[x].contains(&y) && reach[y].contains(&x))
            .map(|y| r.classes[y].clone())
            .collect();
        members.sort();
        if members.len() > 1 || r.is_a.contains(&(x, x)) {
            cycles.insert(members);
        }
    }
    (clashes, cycles)
}

// ----------------------------------------------------------- command chains

pub fn entity_names(onto: &Ontology) -> Vec<String> {
    onto.entities().map(|(n, _)| n.to_string()).collect()
}

pub fn relation_names(onto: &Ontology) -> Vec<String> {
    onto.relations().map(|(n, _)| n.to_string()).collect()
}

/// An alternating chain of odd length in `1..=max_len` drawn from exact
/// ontology names, with unresolvable words mixed into entity slots.
pub fn random_chain(rng: &mut ChaCha8Rng, onto: &Ontology, max_len: usize) -> Vec<String> {
    let entities = entity_names(onto);
    let relations = relation_names(onto);
    let len = 2 * rng.gen_range(0..max_len.div_ceil(2)) + 1;
    (0..len)
        .map(|i| {
            if i % 2 == 1 {
                relations.choose(rng).unwrap().clone()
            } else if rng.gen_bool(0.15) {
                JUNK.choose(rng).unwrap().to_string()
            } else {
                entities.choose(rng).unwrap().clone()
            }
        })
        .collect()
}

/// Replays a fixed list of captions, one per clip, in order.
pub struct Scripted {
    pub captions: Vec<Vec<String>>,
    pub next: usize,
}

impl Captioner for Scripted {
    fn caption(&mut self, _clip: &Clip) -> Result<CaptionResult, CaptionError> {
        let tokens = self.captions[self.next].clone();
        self.next += 1;
        Ok(CaptionResult {
            tokens,
            attention: None,
        })
    }
}

// -------------------------------------------------------------------- demo

/// Worked by hand from the annotations and the sample ontology.
///
/// Clip [0,29] is 20 frames of grasp against 10 of hold/pour, clip [15,44]
/// is 5 against 25, and clip [30,59] is a 15/15 tie that goes to release.
/// Each named entity contributes its ancestors within three hops and the
/// restricted relations declared on them.
pub const DEMO_EDGES: [&str; 14] = [
    "WAM grasp PlasticBottle command [0,29]",
    "WAM hold PlasticBottle command [15,44]",
    "PlasticBottle pour GlassCup command [15,44]",
    "WAM release PlasticBottle command [30,59]",
    "WAM isA Manipulator ontology [0,59]",
    "WAM canPour[some] ColdMilk ontology [0,59]",
    "PlasticBottle isA Bottle ontology [0,59]",
    "Bottle isA Container ontology [0,59]",
    "PlasticBottle isGraspableBy[some] HumanHand ontology [0,59]",
    "Bottle canHold[min=1] Liquid ontology [0,59]",
    "GlassCup isA Cup ontology [15,44]",
    "Cup isA Container ontology [15,44]",
    "GlassCup canHold[some] HotWater ontology [15,44]",
    "Cup canHold[only] Liquid ontology [15,44]",
];

// ------------------------------------------------------------- union oracle

#[derive(Debug, Default, PartialEq, Eq)]
pub struct OracleGraph {
    /// name -> unresolved?
    pub nodes: BTreeMap<String, bool>,
    /// (subject, relation, object, restriction) -> (from command?, frames)
    pub edges: BTreeMap<Key, (bool, BTreeSet<u64>)>,
}

pub type Key = (String, String, String, Option<String>);

fn key(c: &LogicalConstraint) -> Key {
    (
        c.subject.clone(),
        c.relation.clone(),
        c.object.clone(),
        c.restriction.as_ref().map(|r| r.to_string()),
    )
}

impl OracleGraph {
    fn node(&mut self, name: &str, unresolved: bool) {
        let e = self.nodes.entry(name.to_string()).or_insert(unresolved);
        *e &= unresolved;
    }

    fn edge(&mut self, k: Key, command: bool, start: u64, end: u64) {
        let e = self.edges.entry(k).or_insert((command, BTreeSet::new()));
        e.1.extend(start..=end);
    }

    /// Applies one clip: the chain's own edges, then the concept graph of
    /// every distinct exact-name entity in it.
    pub fn apply(
        &mut self,
        onto: &Ontology,
        tokens: &[String],
        start: u64,
        end: u64,
        depth: usize,
    ) {
        let declared: BTreeSet<&str> = onto.entities().map(|(n, _)| n).collect();
        let constraints = onto.constraints();
        for (i, t) in tokens.iter().enumerate().step_by(2) {
            self.node(t, !declared.contains(t.as_str()));
            if i + 2 < tokens.len() {
                let k = (
                    t.clone(),
                    tokens[i + 1].clone(),
                    tokens[i + 2].clone(),
                    None,
                );
                self.edge(k, true, start, end);
            }
        }
        let mut queried = BTreeSet::new();
        for t in tokens.iter().step_by(2) {
            if !declared.contains(t.as_str()) || !queried.insert(t.clone()) {
                continue;
            }
            // ancestors within `depth` hops, by repeated relaxation
            let mut dist: BTreeMap<String, usize> = BTreeMap::from([(t.clone(), 0)]);
            for _ in 0..depth {
                let frontier: Vec<(String, usize)> =
                    dist.iter().map(|(k, v)| (k.clone(), *v)).collect();
                for (x, d) in frontier {
                    for c in constraints
                        .iter()
                        .filter(|c| c.relation == "isA" && c.subject == x)
                    {
                        let nd = d + 1;
                        if nd <= depth {
                            let cur = dist.entry(c.object.clone()).or_insert(nd);
                            *cur = (*cur).min(nd);
                        }
                    }
                }
            }
            for (x, d) in &dist {
                self.node(x, false);
                for c in constraints.iter().filter(|c| &c.subject == x) {
                    match c.relation.as_str() {
                        "isA" if *d < depth => {
                            self.node(&c.object, false);
                            self.edge(key(c), false, start, end);
                        }
                        "isA" | "disjointWith" => {}
                        _ => {
                            self.node(&c.object, false);
                            self.edge(key(c), false, start, end);
                        }
                    }
                }
            }
        }
    }
}

/// Maximal runs of consecutive integers.
pub fn runs(frames: &BTreeSet<u64>) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for &f in frames {
        match out.last_mut() {
            Some((_, e)) if *e + 1 == f => *e = f,
            _ => out.push((f, f)),
        }
    }
    out
}

/// Compares the library graph against the oracle, returning the first
/// difference found.
pub fn diff_graph(
    graph: &streamkg::graph::DynamicKnowledgeGraph,
    oracle: &OracleGraph,
) -> Option<String> {
    use streamkg::graph::{NodeKind, Origin};
    let nodes: BTreeMap<String, bool> = graph
        .nodes()
        .map(|n| (n.name.clone(), n.kind == NodeKind::Unresolved))
        .collect();
    if nodes != oracle.nodes {
        return Some(format!(
            "nodes differ:\n  got  {nodes:?}\n  want {:?}",
            oracle.nodes
        ));
    }
    let edges: BTreeMap<Key, (bool, Vec<(u64, u64)>)> = graph
        .edges()
        .map(|e| {
            (
                key(&e.key()),
                (
                    e.origin == Origin::Command,
                    e.observations.iter().map(|iv| (iv.start, iv.end)).collect(),
                ),
            )
        })
        .collect();
    let want: BTreeMap<Key, (bool, Vec<(u64, u64)>)> = oracle
        .edges
        .iter()
        .map(|(k, (cmd, frames))| (k.clone(), (*cmd, runs(frames))))
        .collect();
    if edges != want {
        return Some(format!("edges differ:\n  got  {edges:?}\n  want {want:?}"));
    }
    None
}

// ------------------------------------------------------------------ metrics

fn count(hay: &[&str], gram: &[&str]) -> usize {
    (0..hay.len())
        .filter(|&i| i + gram.len() <= hay.len() && &hay[i..i + gram.len()] == gram)
        .count()
}

/// Corpus BLEU-4 straight from the textbook definition.
pub fn bleu_oracle(pairs: &[(Vec<&str>, Vec<Vec<&str>>)]) -> f64 {
    let mut p = [(0usize, 0usize); 4];
    let (mut c_len, mut r_len) = (0usize, 0usize);
    for (cand, refs) in pairs {
        c_len += cand.len();
        let mut best = refs[0].len();
        for r in refs {
            let d = (r.len() as i64 - cand.len() as i64).abs();
            let bd = (best as i64 - cand.len() as i64).abs();
            if d < bd || (d == bd && r.len() < best) {
                best = r.len();
            }
        }
        r_len += best;
        for n in 1..=4 {
            let mut seen: Vec<&[&str]> = Vec::new();
            for i in 0..cand.len().saturating_sub(n - 1) {
                let g = &cand[i..i + n];
                p[n - 1].1 += 1;
                if seen.contains(&g) {
                    continue;
                }
                seen.push(g);
                let max_ref = refs.iter().map(|r| count(r, g)).max().unwrap();
                p[n - 1].0 += count(cand, g).min(max_ref);
            }
        }
    }
    if p.iter().any(|&(m, _)| m == 0) {
        return 0.0;
    }
    let geo: f64 = p
        .iter()
        .map(|&(m, t)| (m as f64 / t as f64).ln())
        .sum::<f64>()
        / 4.0;
    let bp = if c_len > r_len {
        1.0
    } else {
        (1.0 - r_len as f64 / c_len as f64).exp()
    };
    bp * geo.exp()
}

fn is_subsequence(sub: &[&str], of: &[&str]) -> bool {
    let mut it = of.iter();
    sub.iter().all(|s| it.any(|o| o == s))
}

/// LCS length by enumerating every subsequence of `a`.
pub fn lcs_oracle(a: &[&str], b: &[&str]) -> usize {
    assert!(a.len() <= 12);
    (0u32..1 << a.len())
        .filter_map(|mask| {
            let sub: Vec<&str> = (0..a.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| a[i])
                .collect();
            is_subsequence(&sub, b).then_some(sub.len())
        })
        .max()
        .unwrap_or(0)
}

pub fn rouge_oracle(pairs: &[(Vec<&str>, Vec<Vec<&str>>)]) -> f64 {
    let beta2 = 1.2f64 * 1.2;
    let total: f64 = pairs
        .iter()
        .map(|(c, refs)| {
            refs.iter()
                .map(|r| {
                    let l = lcs_oracle(c, r) as f64;
                    if l == 0.0 {
                        return 0.0;
                    }
                    let (p, rc) = (l / c.len() as f64, l / r.len() as f64);
                    (1.0 + beta2) * p * rc / (rc + beta2 * p)
                })
                .fold(0.0, f64::max)
        })
        .sum();
    total / pairs.len() as f64
}
