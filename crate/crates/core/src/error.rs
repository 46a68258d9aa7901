use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SamplerError {
    #[error("window length must be at least 2, got {0}")]
    WindowTooShort(usize),
    #[error("hop must lie in 1..={window}, got {hop}")]
    HopOutOfRange { window: usize, hop: usize },
    #[error("fps must be positive and finite")]
    BadFps,
    #[error("stream gap: expected frame {expected}, got {got}; window reset")]
    StreamGap { expected: u64, got: u64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OntologyError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: undeclared name `{name}`")]
    Undeclared { line: usize, name: String },
    #[error("line {line}: duplicate declaration of `{name}`")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: `{name}` is a reserved word")]
    Reserved { line: usize, name: String },
    #[error("line {line}: {message}")]
    Kind { line: usize, message: String },
    #[error("unknown name `{0}`")]
    Lookup(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CommandError {
    #[error("empty command")]
    Empty,
    #[error("command has {len} tokens, limit is {max}")]
    TooLong { len: usize, max: usize },
    #[error("token {position} (`{token}`) must be {expected}")]
    Alternation {
        position: usize,
        token: String,
        expected: &'static str,
    },
    #[error("token {position} (`{token}`) is not a known relation")]
    UnknownRelation { position: usize, token: String },
}

#[derive(Debug, Error)]
pub enum CaptionError {
    #[error("frames {start}..={end} are not covered by any annotation and no default is declared")]
    Coverage { start: u64, end: u64 },
    #[error("captioner timed out after {0:?}")]
    Timeout(std::time::Duration),
    #[error("malformed captioner response: {0}")]
    Malformed(String),
    #[error("captioner returned {len} tokens, limit is {max}")]
    TooLong { len: usize, max: usize },
    #[error("attention for frame {frame}: {message}")]
    Attention { frame: u64, message: String },
    #[error("captioner reported an error: {0}")]
    Remote(String),
    #[error("captioner process: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: entry overlaps or precedes the previous entry")]
    Order { line: usize },
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("clip [{start},{end}]: {source}")]
    Caption {
        start: u64,
        end: u64,
        #[source]
        source: CaptionError,
    },
    #[error("clip [{start},{end}]: {source}")]
    Command {
        start: u64,
        end: u64,
        #[source]
        source: CommandError,
    },
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("pipeline worker terminated unexpectedly")]
    Worker,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("pair {0} has no references")]
    NoReferences(usize),
    #[error("pair {0} contains an empty sentence")]
    EmptySentence(usize),
}

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Manifest {
        path: String,
        line: usize,
        message: String,
    },
}
