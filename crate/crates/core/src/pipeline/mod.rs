//! Stream → clips → captions → dynamic knowledge graph.
//!
//! For every clip the sampler emits, the captioner produces a command
//! language. The command is unioned into the graph, then every resolved
//! entity in it is looked up in the ontology and its concept graph is
//! unioned too. Unresolved entities become `unresolved` nodes and are not
//! queried.
//!
//! [`run_stream`] is the reference, strictly sequential driver.
//! [`run_stream_pipelined`] samples and captions on a worker thread while
//! the caller's thread applies unions in emission order; both produce the
//! same graph.

mod caption;
mod external;
mod replay;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use log::warn;

use crate::command::{parse_command, TokenKind};
use crate::error::{CaptionError, PipelineError};
use crate::graph::{DynamicKnowledgeGraph, TimeInterval, UnionDelta};
use crate::ontology::{Ontology, DEFAULT_QUERY_DEPTH};
use crate::sampler::{Clip, Frame, Sampler};

pub use caption::{
    validate_attention, AttentionMap, CaptionResult, Captioner, ATTENTION_TOLERANCE,
};
pub use external::{decode_response, encode_request, ExternalCaptioner};
pub use replay::{caption_replay, AnnotationEntry, AnnotationTrack, ReplayCaptioner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailurePolicy {
    /// Log the failing clip and continue.
    #[default]
    Skip,
    /// Stop at the first failing clip.
    Halt,
}

impl std::str::FromStr for FailurePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skip" => Ok(FailurePolicy::Skip),
            "halt" => Ok(FailurePolicy::Halt),
            other => Err(format!(
                "unknown failure policy `{other}` (expected skip or halt)"
            )),
        }
    }
}

/// How clips get captioned.
#[derive(Debug, Clone)]
pub enum CaptionerBinding {
    Replay(AnnotationTrack),
    /// A shell command line speaking the JSON-lines protocol.
    External {
        command: String,
        timeout: Duration,
    },
}

impl CaptionerBinding {
    pub fn connect(self) -> Result<Box<dyn Captioner + Send>, CaptionError> {
        Ok(match self {
            CaptionerBinding::Replay(track) => Box::new(ReplayCaptioner::new(track)),
            CaptionerBinding::External { command, timeout } => {
                Box::new(ExternalCaptioner::spawn(&command, timeout)?)
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub depth: usize,
    pub policy: FailurePolicy,
    /// Record a DOT snapshot of the graph after every clip.
    pub snapshots: bool,
    /// Caption the trailing partial window at end of stream.
    pub flush_partial: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            depth: DEFAULT_QUERY_DEPTH,
            policy: FailurePolicy::Skip,
            snapshots: false,
            flush_partial: false,
        }
    }
}

/// What happened to one clip.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipEvent {
    pub span: TimeInterval,
    pub tokens: Vec<String>,
    pub delta: UnionDelta,
    pub attention: Option<Vec<AttentionMap>>,
    /// Set when the clip was skipped.
    pub error: Option<String>,
}

impl fmt::Display for ClipEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.error {
            None => write!(
                f,
                "{} -> {} -> +{}/+{}",
                self.span,
                self.tokens.join(" "),
                self.delta.nodes,
                self.delta.edges
            ),
            Some(e) => write!(f, "{} -> !skipped: {} -> +0/+0", self.span, e),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub graph: DynamicKnowledgeGraph,
    pub events: Vec<ClipEvent>,
    /// DOT text after each clip, when requested.
    pub snapshots: Vec<String>,
}

impl RunOutput {
    /// The event log, one line per clip.
    pub fn event_log(&self) -> String {
        self.events.iter().map(|e| format!("{e}\n")).collect()
    }
}

fn span_of(clip: &Clip) -> TimeInterval {
    TimeInterval::new(clip.start_index(), clip.end_index())
}

struct Accumulator<'a> {
    onto: &'a Ontology,
    opts: &'a RunOptions,
    out: RunOutput,
}

impl Accumulator<'_> {
    fn apply(
        &mut self,
        span: TimeInterval,
        caption: Result<CaptionResult, CaptionError>,
    ) -> Result<(), PipelineError> {
        let result = caption
            .map_err(|source| PipelineError::Caption {
                start: span.start,
                end: span.end,
                source,
            })
            .and_then(|c| {
                parse_command(&c.tokens, self.onto, span)
                    .map(|cmd| (cmd, c))
                    .map_err(|source| PipelineError::Command {
                        start: span.start,
                        end: span.end,
                        source,
                    })
            });
        let (cmd, caption) = match result {
            Ok(ok) => ok,
            Err(e) => {
                if self.opts.policy == FailurePolicy::Halt {
                    return Err(e);
                }
                warn!("skipping clip: {e}");
                self.out.events.push(ClipEvent {
                    span,
                    tokens: Vec::new(),
                    delta: UnionDelta::default(),
                    attention: None,
                    error: Some(e.to_string()),
                });
                self.snapshot();
                return Ok(());
            }
        };

        let graph = &mut self.out.graph;
        let mut delta = graph.union_command(&cmd);
        let mut queried = BTreeSet::new();
        for token in cmd.entities().filter(|t| t.kind == TokenKind::Entity) {
            if !queried.insert(token.name.as_str()) {
                continue;
            }
            let concept = self
                .onto
                .query_concept(&token.name, self.opts.depth)
                .expect("resolved entities are declared");
            delta += graph.union_concept(&concept, span);
        }
        self.out.events.push(ClipEvent {
            span,
            tokens: caption.tokens,
            delta,
            attention: caption.attention,
            error: None,
        });
        self.snapshot();
        Ok(())
    }

    fn snapshot(&mut self) {
        if self.opts.snapshots {
            self.out.snapshots.push(self.out.graph.to_dot());
        }
    }
}

fn clips<'a, I: Iterator<Item = Frame> + 'a>(
    mut frames: I,
    sampler: &'a mut Sampler,
    flush_partial: bool,
) -> impl Iterator<Item = Clip> + 'a {
    let mut done = false;
    std::iter::from_fn(move || loop {
        if done {
            return None;
        }
        match frames.next() {
            Some(frame) => match sampler.push(frame) {
                Ok(Some(clip)) => return Some(clip),
                Ok(None) => {}
                Err(e) => warn!("{e}"),
            },
            None => {
                done = true;
                return if flush_partial {
                    sampler.flush_partial()
                } else {
                    None
                };
            }
        }
    })
}

/// Runs the whole stream sequentially and returns the final graph with the
/// per-clip event log.
pub fn run_stream<I, C>(
    frames: I,
    sampler: &mut Sampler,
    captioner: &mut C,
    onto: &Ontology,
    opts: &RunOptions,
) -> Result<RunOutput, PipelineError>
where
    I: IntoIterator<Item = Frame>,
    C: Captioner + ?Sized,
{
    let mut acc = Accumulator {
        onto,
        opts,
        out: RunOutput::default(),
    };
    for clip in clips(frames.into_iter(), sampler, opts.flush_partial) {
        let caption = captioner.caption(&clip);
        acc.apply(span_of(&clip), caption)?;
    }
    Ok(acc.out)
}

/// Like [`run_stream`], but sampling and captioning run on a worker thread
/// that hands results through a queue of at most `bound` clips.
pub fn run_stream_pipelined<I, C>(
    frames: I,
    sampler: &mut Sampler,
    captioner: &mut C,
    onto: &Ontology,
    opts: &RunOptions,
    bound: usize,
) -> Result<RunOutput, PipelineError>
where
    I: IntoIterator<Item = Frame>,
    I::IntoIter: Send,
    C: Captioner + Send + ?Sized,
{
    let (tx, rx) = mpsc::sync_channel(bound.max(1));
    let flush_partial = opts.flush_partial;
    let frames = frames.into_iter();
    thread::scope(|scope| {
        let worker = scope.spawn(move || {
            for clip in clips(frames, sampler, flush_partial) {
                let caption = captioner.caption(&clip);
                if tx.send((span_of(&clip), caption)).is_err() {
                    break;
                }
            }
        });
        let mut acc = Accumulator {
            onto,
            opts,
            out: RunOutput::default(),
        };
        let mut result = Ok(());
        for (span, caption) in rx.iter() {
            if let Err(e) = acc.apply(span, caption) {
                result = Err(e);
                break;
            }
        }
        drop(rx);
        worker.join().map_err(|_| PipelineError::Worker)?;
        result.map(|()| acc.out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{load_ontology, SAMPLE_ONTOLOGY};
    use crate::sampler::DEFAULT_FPS;

    fn frames(n: u64) -> Vec<Frame> {
        (0..n).map(|i| Frame::new(i, DEFAULT_FPS, "")).collect()
    }

    fn replay(text: &str) -> ReplayCaptioner {
        ReplayCaptioner::new(AnnotationTrack::parse(text).unwrap())
    }

    #[test]
    fn short_stream_yields_empty_graph() {
        let o = load_ontology(SAMPLE_ONTOLOGY).unwrap();
        let mut s = Sampler::new(30, None).unwrap();
        let out = run_stream(
            frames(29),
            &mut s,
            &mut replay("0 28 WAM"),
            &o,
            &RunOptions::default(),
        )
        .unwrap();
        assert!(out.graph.is_empty());
        assert!(out.events.is_empty());
    }

    #[test]
    fn unknown_entity_becomes_unresolved_node() {
        let o = load_ontology(SAMPLE_ONTOLOGY).unwrap();
        let mut s = Sampler::new(30, None).unwrap();
        let out = run_stream(
            frames(30),
            &mut s,
            &mut replay("0 29 WAM grasp mystery"),
            &o,
            &RunOptions::default(),
        )
        .unwrap();
        let node = out.graph.node("mystery").unwrap();
        assert_eq!(node.kind, crate::graph::NodeKind::Unresolved);
        assert!(out
            .graph
            .edges()
            .filter(|e| e.subject == "mystery" || e.object == "mystery")
            .all(|e| e.origin == crate::graph::Origin::Command));
        assert_eq!(out.event_log().lines().count(), 1);
    }

    #[test]
    fn failure_policies() {
        let o = load_ontology(SAMPLE_ONTOLOGY).unwrap();
        let text = "0 29 grasp WAM\n30 59 WAM grasp Cup\n";
        let mut s = Sampler::new(30, Some(30)).unwrap();
        let out = run_stream(
            frames(60),
            &mut s,
            &mut replay(text),
            &o,
            &RunOptions::default(),
        )
        .unwrap();
        assert_eq!(out.events.len(), 2);
        assert!(out.events[0].error.is_some());
        assert!(out.events[0].to_string().starts_with("[0,29] -> !skipped:"));
        assert!(out.graph.node("Cup").is_some());

        let halt = RunOptions {
            policy: FailurePolicy::Halt,
            ..RunOptions::default()
        };
        let mut s = Sampler::new(30, Some(30)).unwrap();
        let err = run_stream(frames(60), &mut s, &mut replay(text), &o, &halt).unwrap_err();
        assert!(matches!(
            err,
            PipelineError::Command {
                start: 0,
                end: 29,
                ..
            }
        ));

        let mut s = Sampler::new(30, Some(30)).unwrap();
        let err =
            run_stream_pipelined(frames(60), &mut s, &mut replay(text), &o, &halt, 1).unwrap_err();
        assert!(matches!(
            err,
            PipelineError::Command {
                start: 0,
                end: 29,
                ..
            }
        ));
    }

    #[test]
    fn coverage_error_is_a_caption_failure() {
        let o = load_ontology(SAMPLE_ONTOLOGY).unwrap();
        let halt = RunOptions {
            policy: FailurePolicy::Halt,
            ..RunOptions::default()
        };
        let mut s = Sampler::new(30, None).unwrap();
        let err = run_stream(frames(30), &mut s, &mut replay("0 9 WAM"), &o, &halt).unwrap_err();
        assert!(matches!(err, PipelineError::Caption { .. }));
    }

    #[test]
    fn flush_partial_captions_tail() {
        let o = load_ontology(SAMPLE_ONTOLOGY).unwrap();
        let opts = RunOptions {
            flush_partial: true,
            ..RunOptions::default()
        };
        let mut s = Sampler::new(30, None).unwrap();
        let out = run_stream(frames(40), &mut s, &mut replay("0 39 WAM"), &o, &opts).unwrap();
        let spans: Vec<_> = out.events.iter().map(|e| e.span.to_string()).collect();
        assert_eq!(spans, ["[0,29]", "[10,39]"]);
    }

    #[test]
    fn gaps_in_frames_are_tolerated() {
        let o = load_ontology(SAMPLE_ONTOLOGY).unwrap();
        let mut fs = frames(20);
        fs.extend((100..130).map(|i| Frame::new(i, DEFAULT_FPS, "")));
        let mut s = Sampler::new(30, None).unwrap();
        let out = run_stream(
            fs,
            &mut s,
            &mut replay("default WAM"),
            &o,
            &RunOptions::default(),
        )
        .unwrap();
        let spans: Vec<_> = out.events.iter().map(|e| e.span.to_string()).collect();
        assert_eq!(spans, ["[100,129]"]);
    }

    #[test]
    fn snapshots_track_each_clip() {
        let o = load_ontology(SAMPLE_ONTOLOGY).unwrap();
        let opts = RunOptions {
            snapshots: true,
            ..RunOptions::default()
        };
        let mut s = Sampler::new(30, None).unwrap();
        let out = run_stream(
            frames(60),
            &mut s,
            &mut replay("default WAM grasp Cup"),
            &o,
            &opts,
        )
        .unwrap();
        assert_eq!(out.snapshots.len(), 3);
        assert_eq!(out.snapshots.last().unwrap(), &out.graph.to_dot());
    }
}
