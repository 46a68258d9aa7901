//! Captioning through an external process speaking newline-delimited JSON.
//!
//! Request, one line per clip:
//!
//! ```text
//! {"clip":{"start":30,"end":59,"frames":["f30.png", ...]}}
//! ```
//!
//! Response, one line:
//!
//! ```text
//! {"tokens":["WAM","pour","GlassCup"],"attention":[[...], ...]}
//! ```
//!
//! `attention` is optional; when present it carries one flattened grid per
//! frame. A process may answer `{"error":"..."}` instead. Only one request
//! is in flight at a time.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::caption::{validate_attention, CaptionResult, Captioner};
use crate::command::MAX_COMMAND_TOKENS;
use crate::error::CaptionError;
use crate::sampler::Clip;

#[derive(Serialize)]
struct ClipMessage<'a> {
    start: u64,
    end: u64,
    frames: Vec<&'a str>,
}

#[derive(Serialize)]
struct Request<'a> {
    clip: ClipMessage<'a>,
}

#[derive(Deserialize)]
struct Response {
    tokens: Option<Vec<String>>,
    attention: Option<Vec<Vec<f64>>>,
    error: Option<String>,
}

/// The request line for `clip`, without the trailing newline.
pub fn encode_request(clip: &Clip) -> String {
    let req = Request {
        clip: ClipMessage {
            start: clip.start_index(),
            end: clip.end_index(),
            frames: clip.frames().iter().map(|f| f.payload.as_str()).collect(),
        },
    };
    serde_json::to_string(&req).expect("request serialization cannot fail")
}

/// Parses and validates one response line for `clip`.
pub fn decode_response(line: &str, clip: &Clip) -> Result<CaptionResult, CaptionError> {
    let resp: Response =
        serde_json::from_str(line).map_err(|e| CaptionError::Malformed(e.to_string()))?;
    if let Some(message) = resp.error {
        return Err(CaptionError::Remote(message));
    }
    let tokens = resp
        .tokens
        .ok_or_else(|| CaptionError::Malformed("missing `tokens`".into()))?;
    if tokens.len() > MAX_COMMAND_TOKENS {
        return Err(CaptionError::TooLong {
            len: tokens.len(),
            max: MAX_COMMAND_TOKENS,
        });
    }
    let attention = resp
        .attention
        .map(|rows| validate_attention(rows, clip))
        .transpose()?;
    Ok(CaptionResult { tokens, attention })
}

/// A long-running captioner process driven over stdin/stdout.
pub struct ExternalCaptioner {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl ExternalCaptioner {
    /// Starts `command_line` under `sh -c`.
    pub fn spawn(command_line: &str, timeout: Duration) -> Result<Self, CaptionError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command_line)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ExternalCaptioner {
            child,
            stdin,
            lines: rx,
            timeout,
        })
    }

    fn shutdown(&mut self) {
        self.stdin = None;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Captioner for ExternalCaptioner {
    fn caption(&mut self, clip: &Clip) -> Result<CaptionResult, CaptionError> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| CaptionError::Malformed("captioner process is gone".into()))?;
        let mut request = encode_request(clip);
        request.push('\n');
        stdin.write_all(request.as_bytes())?;
        stdin.flush()?;
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => decode_response(&line, clip),
            Ok(Err(e)) => Err(CaptionError::Io(e)),
            Err(RecvTimeoutError::Timeout) => {
                self.shutdown();
                Err(CaptionError::Timeout(self.timeout))
            }
            Err(RecvTimeoutError::Disconnected) => {
                self.shutdown();
                Err(CaptionError::Malformed(
                    "captioner closed its output".into(),
                ))
            }
        }
    }
}

impl Drop for ExternalCaptioner {
    fn drop(&mut self) {
        self.shutdown();
    }
}
