//! Overlapping observation windows over a frame stream.
//!
//! A [`Sampler`] keeps a queue of at most `window` frames. It emits a
//! [`Clip`] the first time the queue fills, and again every time `hop`
//! newer frames have pushed older ones out. With the default hop of
//! `window / 2` consecutive clips share half their frames.
//!
//! ```
//! use streamkg::sampler::{Frame, Sampler};
//!
//! let mut sampler = Sampler::new(4, None).unwrap();
//! let clips: Vec<_> = (0..8)
//!     .filter_map(|i| sampler.push(Frame::new(i, 30.0, "")).unwrap())
//!     .map(|c| (c.start_index(), c.end_index()))
//!     .collect();
//! assert_eq!(clips, vec![(0, 3), (2, 5), (4, 7)]);
//! ```

use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use crate::error::{SamplerError, SourceError};

pub const DEFAULT_FPS: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub index: u64,
    pub timestamp: f64,
    /// Opaque reference: an image path, a feature handle, or an annotation token.
    pub payload: String,
}

impl Frame {
    pub fn new(index: u64, fps: f64, payload: impl Into<String>) -> Self {
        Frame {
            index,
            timestamp: index as f64 / fps,
            payload: payload.into(),
        }
    }
}

/// A contiguous run of frames emitted by the sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    frames: Vec<Frame>,
}

impl Clip {
    /// Builds a clip from contiguous frames. Returns `None` if `frames` is
    /// empty or the indices are not consecutive.
    pub fn from_frames(frames: Vec<Frame>) -> Option<Self> {
        if frames.is_empty() || frames.windows(2).any(|w| w[1].index != w[0].index + 1) {
            return None;
        }
        Some(Clip { frames })
    }

    pub fn start_index(&self) -> u64 {
        self.frames[0].index
    }

    pub fn end_index(&self) -> u64 {
        self.frames[self.frames.len() - 1].index
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Sampler {
    window_len: usize,
    hop: usize,
    window: VecDeque<Frame>,
    frames_since_emit: usize,
    emitted_once: bool,
    last_index: Option<u64>,
}

impl Sampler {
    /// `hop` defaults to `window / 2`.
    pub fn new(window: usize, hop: Option<usize>) -> Result<Self, SamplerError> {
        if window < 2 {
            return Err(SamplerError::WindowTooShort(window));
        }
        let hop = hop.unwrap_or(window / 2);
        if hop == 0 || hop > window {
            return Err(SamplerError::HopOutOfRange { window, hop });
        }
        Ok(Sampler {
            window_len: window,
            hop,
            window: VecDeque::with_capacity(window),
            frames_since_emit: 0,
            emitted_once: false,
            last_index: None,
        })
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    /// Number of frames currently queued.
    pub fn queued(&self) -> usize {
        self.window.len()
    }

    /// Pushes the next frame. At most one clip is emitted per push.
    ///
    /// A frame whose index does not follow the previous one resets the
    /// window; the offending frame becomes the first frame of the new
    /// window and a [`SamplerError::StreamGap`] is returned.
    pub fn push(&mut self, frame: Frame) -> Result<Option<Clip>, SamplerError> {
        if let Some(last) = self.last_index {
            if frame.index != last + 1 {
                let expected = last + 1;
                let got = frame.index;
                self.reset();
                self.accept(frame);
                return Err(SamplerError::StreamGap { expected, got });
            }
        }
        Ok(self.accept(frame))
    }

    fn accept(&mut self, frame: Frame) -> Option<Clip> {
        self.last_index = Some(frame.index);
        if self.window.len() == self.window_len {
            self.window.pop_front();
        }
        self.window.push_back(frame);
        if self.window.len() < self.window_len {
            return None;
        }
        if self.emitted_once {
            self.frames_since_emit += 1;
            if self.frames_since_emit < self.hop {
                return None;
            }
        }
        self.emitted_once = true;
        self.frames_since_emit = 0;
        Some(Clip {
            frames: self.window.iter().cloned().collect(),
        })
    }

    /// Returns the queued frames that no emitted clip has covered yet, as a
    /// short clip. Used only for diagnostics at end of stream; the clip may
    /// hold fewer than `window` frames.
    pub fn flush_partial(&mut self) -> Option<Clip> {
        let pending = if self.emitted_once {
            self.frames_since_emit
        } else {
            self.window.len()
        };
        if pending == 0 {
            return None;
        }
        let frames: Vec<Frame> = self.window.iter().cloned().collect();
        self.frames_since_emit = 0;
        self.emitted_once = true;
        Some(Clip { frames })
    }

    pub fn reset(&mut self) {
        self.window.clear();
        self.frames_since_emit = 0;
        self.emitted_once = false;
        self.last_index = None;
    }
}

/// Number of clips a `frames`-long stream yields.
pub fn clip_count(frames: u64, window: u64, hop: u64) -> u64 {
    if frames < window {
        0
    } else {
        1 + (frames - window) / hop
    }
}

/// Reads a newline-delimited manifest: `index timestamp payload` per line.
/// Blank lines and `#` comments are skipped. Timestamps must equal
/// `index / fps` to within 1e-6 seconds.
pub fn read_manifest(path: &Path, fps: f64) -> Result<Vec<Frame>, SourceError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| SourceError::Io {
        path: display.clone(),
        source,
    })?;
    parse_manifest(&text, fps).map_err(|(line, message)| SourceError::Manifest {
        path: display,
        line,
        message,
    })
}

pub fn parse_manifest(text: &str, fps: f64) -> Result<Vec<Frame>, (usize, String)> {
    let mut frames = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(3, char::is_whitespace);
        let index: u64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or((line_no, "bad frame index".to_string()))?;
        let timestamp: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or((line_no, "bad timestamp".to_string()))?;
        let payload = parts.next().unwrap_or("").trim().to_string();
        let frame = Frame::new(index, fps, payload);
        if (frame.timestamp - timestamp).abs() > 1e-6 {
            return Err((
                line_no,
                format!("timestamp {timestamp} does not match index {index} at {fps} fps"),
            ));
        }
        frames.push(frame);
    }
    Ok(frames)
}

/// Lists a directory of frame files sorted by the first run of digits in
/// each file name. Frames are numbered by position, starting at 0.
pub fn read_frame_dir(dir: &Path, fps: f64) -> Result<Vec<Frame>, SourceError> {
    let io_err = |source| SourceError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        if !entry.file_type().map_err(io_err)?.is_file() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(number) = leading_number(&name) else {
            continue;
        };
        files.push((number, name, entry.path()));
    }
    files.sort();
    Ok(files
        .into_iter()
        .enumerate()
        .map(|(i, (_, _, path))| Frame::new(i as u64, fps, path.display().to_string()))
        .collect())
}

fn leading_number(name: &str) -> Option<u64> {
    let start = name.find(|c: char| c.is_ascii_digit())?;
    let digits: String = name[start..]
        .chars()
        .take_while(|c| c.is_ascii_digit())
        .collect();
    digits.parse().ok()
}

/// Loads frames from either a manifest file or a directory of frame files.
pub fn load_frames(path: &Path, fps: f64) -> Result<Vec<Frame>, SourceError> {
    if path.is_dir() {
        read_frame_dir(path, fps)
    } else {
        read_manifest(path, fps)
    }
}
