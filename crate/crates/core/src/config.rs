//! Flat `key = value` run configuration.
//!
//! ```text
//! # streamkg.conf
//! window = 30
//! hop = 15
//! fps = 30
//! depth = 3
//! policy = skip
//! flush_partial = false
//! captioner = python3 my_model.py
//! timeout_ms = 10000
//! ```
//!
//! Unknown keys are errors. Every key is optional.

use std::time::Duration;

use crate::ontology::DEFAULT_QUERY_DEPTH;
use crate::pipeline::{FailurePolicy, RunOptions};
use crate::sampler::DEFAULT_FPS;

pub const DEFAULT_WINDOW: usize = 30;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub window: usize,
    /// `None` means half the window.
    pub hop: Option<usize>,
    pub fps: f64,
    pub depth: usize,
    pub policy: FailurePolicy,
    pub flush_partial: bool,
    /// Shell command line for an external captioner.
    pub captioner: Option<String>,
    pub timeout: Duration,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            window: DEFAULT_WINDOW,
            hop: None,
            fps: DEFAULT_FPS,
            depth: DEFAULT_QUERY_DEPTH,
            policy: FailurePolicy::Skip,
            flush_partial: false,
            captioner: None,
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

fn number<T: std::str::FromStr>(value: &str, line: usize) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError {
        line,
        message: format!("`{value}` is not a valid number"),
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let err = |message: String| ConfigError { line, message };
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let value = value.trim();
            match key.trim() {
                "window" => cfg.window = number(value, line)?,
                "hop" => cfg.hop = Some(number(value, line)?),
                "fps" => cfg.fps = number(value, line)?,
                "depth" => cfg.depth = number(value, line)?,
                "policy" => cfg.policy = value.parse().map_err(err)?,
                "flush_partial" => {
                    cfg.flush_partial = value
                        .parse()
                        .map_err(|_| err(format!("`{value}` is not true or false")))?
                }
                "captioner" => cfg.captioner = Some(value.to_string()),
                "timeout_ms" => cfg.timeout = Duration::from_millis(number(value, line)?),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            depth: self.depth,
            policy: self.policy,
            snapshots: false,
            flush_partial: self.flush_partial,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let cfg = RunConfig::parse(
            "# comment\nwindow = 20\nhop=5\nfps = 25\ndepth = 1\npolicy = halt\n\
             flush_partial = true\ncaptioner = ./model --gpu\ntimeout_ms = 250\n",
        )
        .unwrap();
        assert_eq!(cfg.window, 20);
        assert_eq!(cfg.hop, Some(5));
        assert_eq!(cfg.fps, 25.0);
        assert_eq!(cfg.depth, 1);
        assert_eq!(cfg.policy, FailurePolicy::Halt);
        assert!(cfg.flush_partial);
        assert_eq!(cfg.captioner.as_deref(), Some("./model --gpu"));
        assert_eq!(cfg.timeout, Duration::from_millis(250));
    }

    #[test]
    fn empty_is_default() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert_eq!(RunConfig::parse("\nwidow = 3").unwrap_err().line, 2);
        assert_eq!(RunConfig::parse("window 3").unwrap_err().line, 1);
        assert_eq!(RunConfig::parse("window = x").unwrap_err().line, 1);
        assert_eq!(RunConfig::parse("policy = maybe").unwrap_err().line, 1);
    }
}
