//! Replays frame-range annotations as captions.
//!
//! File format, one entry per line, `#` comments:
//!
//! ```text
//! <start_index> <end_index> <command tokens...>
//! default <command tokens...>
//! ```
//!
//! Entries must be sorted and non-overlapping. Frames outside every entry
//! take the `default` command if one is declared.

use std::fs;
use std::path::Path;

use super::caption::{CaptionResult, Captioner};
use crate::error::{AnnotationError, CaptionError, SourceError};
use crate::sampler::Clip;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationEntry {
    pub start: u64,
    pub end: u64,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotationTrack {
    entries: Vec<AnnotationEntry>,
    default: Option<Vec<String>>,
}

impl AnnotationTrack {
    pub fn new(
        entries: Vec<AnnotationEntry>,
        default: Option<Vec<String>>,
    ) -> Result<Self, AnnotationError> {
        for (i, e) in entries.iter().enumerate() {
            if e.start > e.end || e.tokens.is_empty() {
                return Err(AnnotationError::Syntax {
                    line: i + 1,
                    message: "entry needs start <= end and at least one token".into(),
                });
            }
            if i > 0 && entries[i - 1].end >= e.start {
                return Err(AnnotationError::Order { line: i + 1 });
            }
        }
        Ok(AnnotationTrack { entries, default })
    }

    pub fn parse(text: &str) -> Result<Self, AnnotationError> {
        let mut entries: Vec<AnnotationEntry> = Vec::new();
        let mut default = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("");
            let words: Vec<&str> = body.split_whitespace().collect();
            let syntax = |message: &str| AnnotationError::Syntax {
                line,
                message: message.to_string(),
            };
            match words.as_slice() {
                [] => continue,
                ["default"] => return Err(syntax("default needs at least one token")),
                ["default", tokens @ ..] => {
                    if default.is_some() {
                        return Err(syntax("default declared twice"));
                    }
                    default = Some(tokens.iter().map(|s| s.to_string()).collect());
                }
                [start, end, tokens @ ..] if !tokens.is_empty() => {
                    let start: u64 = start.parse().map_err(|_| syntax("bad start index"))?;
                    let end: u64 = end.parse().map_err(|_| syntax("bad end index"))?;
                    if start > end {
                        return Err(syntax("start index exceeds end index"));
                    }
                    if entries.last().is_some_and(|prev| prev.end >= start) {
                        return Err(AnnotationError::Order { line });
                    }
                    entries.push(AnnotationEntry {
                        start,
                        end,
                        tokens: tokens.iter().map(|s| s.to_string()).collect(),
                    });
                }
                _ => return Err(syntax("expected `<start> <end> <tokens...>`")),
            }
        }
        Ok(AnnotationTrack { entries, default })
    }

    pub fn load(path: &Path) -> Result<Self, SourceError> {
        let text = fs::read_to_string(path).map_err(|source| SourceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text).map_err(|e| SourceError::Manifest {
            path: path.display().to_string(),
            line: match e {
                AnnotationError::Syntax { line, .. } | AnnotationError::Order { line } => line,
            },
            message: e.to_string(),
        })
    }

    pub fn entries(&self) -> &[AnnotationEntry] {
        &self.entries
    }

    pub fn default_tokens(&self) -> Option<&[String]> {
        self.default.as_deref()
    }

    /// The command covering most of the frames in `[start, end]`. Ties go
    /// to the later segment; uncovered runs count as separate segments
    /// labeled with the default command.
    pub fn majority(&self, start: u64, end: u64) -> Result<&[String], CaptionError> {
        let gap = |from: u64, to: u64| match &self.default {
            Some(d) => Ok((to - from + 1, d.as_slice())),
            None => Err(CaptionError::Coverage {
                start: from,
                end: to,
            }),
        };
        let mut segments: Vec<(u64, &[String])> = Vec::new();
        let mut pos = start;
        for e in self
            .entries
            .iter()
            .filter(|e| e.end >= start && e.start <= end)
        {
            if e.start > pos {
                segments.push(gap(pos, e.start - 1)?);
            }
            let lo = e.start.max(start);
            let hi = e.end.min(end);
            segments.push((hi - lo + 1, e.tokens.as_slice()));
            pos = hi + 1;
        }
        if pos <= end {
            segments.push(gap(pos, end)?);
        }
        let mut best: Option<(u64, &[String])> = None;
        for (count, tokens) in segments {
            if best.is_none_or(|(c, _)| count >= c) {
                best = Some((count, tokens));
            }
        }
        Ok(best.expect("non-empty range yields a segment").1)
    }
}

/// Ground-truth captioner backed by an [`AnnotationTrack`].
#[derive(Debug, Clone)]
pub struct ReplayCaptioner {
    track: AnnotationTrack,
}

impl ReplayCaptioner {
    pub fn new(track: AnnotationTrack) -> Self {
        ReplayCaptioner { track }
    }
}

/// Caption for `clip` by majority annotation coverage.
pub fn caption_replay(track: &AnnotationTrack, clip: &Clip) -> Result<CaptionResult, CaptionError> {
    let tokens = track.majority(clip.start_index(), clip.end_index())?;
    Ok(CaptionResult {
        tokens: tokens.to_vec(),
        attention: None,
    })
}

impl Captioner for ReplayCaptioner {
    fn caption(&mut self, clip: &Clip) -> Result<CaptionResult, CaptionError> {
        caption_replay(&self.track, clip)
    }
}
