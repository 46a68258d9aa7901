use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use streamkg::config::RunConfig;
use streamkg::demo;
use streamkg::error::PipelineError;
use streamkg::metrics::{bleu4, rouge_l, ScoredCorpus, ScoredPair};
use streamkg::ontology::{load_ontology, Ontology, SAMPLE_ONTOLOGY};
use streamkg::pipeline::{run_stream, AnnotationTrack, CaptionerBinding, FailurePolicy};
use streamkg::sampler::{load_frames, Frame, Sampler};

const EXIT_FINDINGS: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_HALT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "streamkg",
    version,
    about = "Dynamic knowledge graphs from frame streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the clips the sampler emits for a frame source.
    Sample {
        /// Manifest file or directory of frame files.
        source: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Build the dynamic knowledge graph for a stream.
    Run(Box<RunArgs>),
    /// Print the concept graph around one entity as DOT.
    Query {
        entity: String,
        #[command(flatten)]
        onto: OntologyArg,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Check an ontology for disjointness clashes, cycles and undeclared names.
    Check {
        #[command(flatten)]
        onto: OntologyArg,
    },
    /// Score candidate commands against references with BLEU-4 and ROUGE-L.
    Eval {
        /// One candidate sentence per line.
        candidates: PathBuf,
        /// Tab-separated references, one line per candidate.
        references: PathBuf,
    },
    /// Dump the whole ontology.
    Export {
        #[command(flatten)]
        onto: OntologyArg,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Triples,
}

#[derive(Args)]
struct OntologyArg {
    /// Ontology file; the bundled sample ontology when omitted.
    #[arg(long)]
    ontology: Option<PathBuf>,
}

#[derive(Args)]
struct WindowArgs {
    /// Flat key=value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    hop: Option<usize>,
    #[arg(long)]
    fps: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    /// Manifest file or directory of frame files.
    #[arg(required_unless_present = "demo")]
    source: Option<PathBuf>,
    /// Use the bundled 60-frame demo stream and annotations.
    #[arg(long, conflicts_with_all = ["source", "annotations"])]
    demo: bool,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    onto: OntologyArg,
    /// Replay captions from an annotation file.
    #[arg(long, conflicts_with = "captioner")]
    annotations: Option<PathBuf>,
    /// Shell command of an external captioner speaking JSON lines.
    #[arg(long)]
    captioner: Option<String>,
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(FailurePolicy))]
    policy: Option<FailurePolicy>,
    /// Caption the trailing partial window.
    #[arg(long)]
    flush_partial: bool,
    /// Final graph as DOT; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-clip event log; stderr when omitted.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Final graph as triples.
    #[arg(long)]
    triples: Option<PathBuf>,
    /// Directory for one DOT snapshot per clip.
    #[arg(long)]
    snapshots: Option<PathBuf>,
    /// Directory for per-clip attention maps, when the captioner sends them.
    #[arg(long)]
    attention_dir: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.to_string(),
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Sample { source, window } => cmd_sample(&source, &window),
        Cmd::Run(args) => cmd_run(&args),
        Cmd::Query {
            entity,
            onto,
            depth,
        } => cmd_query(&entity, &onto, depth),
        Cmd::Check { onto } => cmd_check(&onto),
        Cmd::Eval {
            candidates,
            references,
        } => cmd_eval(&candidates, &references),
        Cmd::Export { onto, format } => cmd_export(&onto, format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("streamkg: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<(), Failure> {
    fs::create_dir_all(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn ontology(arg: &OntologyArg) -> Result<Ontology, Failure> {
    match &arg.ontology {
        None => load_ontology(SAMPLE_ONTOLOGY).map_err(input_error),
        Some(path) => {
            load_ontology(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
        }
    }
}

fn config(window: &WindowArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &window.config {
        Some(path) => RunConfig::parse(&read(path)?)
            .map_err(|e| input_error(format!("{}: {e}", path.display())))?,
        None => RunConfig::default(),
    };
    if let Some(w) = window.window {
        cfg.window = w;
    }
    if window.hop.is_some() {
        cfg.hop = window.hop;
    }
    if let Some(fps) = window.fps {
        cfg.fps = fps;
    }
    if !(cfg.fps.is_finite() && cfg.fps > 0.0) {
        return Err(input_error("fps must be positive"));
    }
    Ok(cfg)
}

fn sampler(cfg: &RunConfig) -> Result<Sampler, Failure> {
    Sampler::new(cfg.window, cfg.hop).map_err(input_error)
}

fn cmd_sample(source: &Path, window: &WindowArgs) -> CmdResult {
    let cfg = config(window)?;
    let mut sampler = sampler(&cfg)?;
    let frames = load_frames(source, cfg.fps).map_err(input_error)?;
    for frame in frames {
        match sampler.push(frame) {
            Ok(Some(clip)) => println!("[{},{}]", clip.start_index(), clip.end_index()),
            Ok(None) => {}
            Err(e) => log::warn!("{e}"),
        }
    }
    Ok(0)
}

fn cmd_run(args: &RunArgs) -> CmdResult {
    let mut cfg = config(&args.window)?;
    if let Some(d) = args.depth {
        cfg.depth = d;
    }
    if let Some(p) = args.policy {
        cfg.policy = p;
    }
    if let Some(ms) = args.timeout_ms {
        cfg.timeout = Duration::from_millis(ms);
    }
    if args.captioner.is_some() {
        cfg.captioner = args.captioner.clone();
    }
    cfg.flush_partial |= args.flush_partial;

    let onto = ontology(&args.onto)?;
    let mut sampler = sampler(&cfg)?;
    let (frames, binding): (Vec<Frame>, CaptionerBinding) = if args.demo {
        (demo::frames(), CaptionerBinding::Replay(demo::track()))
    } else {
        let source = args.source.as_deref().expect("clap enforces a source");
        let frames = load_frames(source, cfg.fps).map_err(input_error)?;
        let binding = match (&args.annotations, &cfg.captioner) {
            (Some(path), _) => {
                CaptionerBinding::Replay(AnnotationTrack::load(path).map_err(input_error)?)
            }
            (None, Some(command)) => CaptionerBinding::External {
                command: command.clone(),
                timeout: cfg.timeout,
            },
            (None, None) => return Err(input_error("need --annotations or --captioner")),
        };
        (frames, binding)
    };
    let mut captioner = binding.connect().map_err(input_error)?;

    let mut opts = cfg.run_options();
    opts.snapshots = args.snapshots.is_some();
    info!(
        "running {} frames, window {}, hop {}",
        frames.len(),
        sampler.window_len(),
        sampler.hop()
    );
    let out = match run_stream(frames, &mut sampler, &mut captioner, &onto, &opts) {
        Ok(out) => out,
        Err(e @ (PipelineError::Caption { .. } | PipelineError::Command { .. })) => {
            return Err(Failure {
                code: EXIT_HALT,
                message: format!("halted: {e}"),
            })
        }
        Err(e) => return Err(input_error(e)),
    };

    let dot = out.graph.to_dot();
    match &args.out {
        Some(path) => write(path, &dot)?,
        None => print!("{dot}"),
    }
    match &args.events {
        Some(path) => write(path, &out.event_log())?,
        None => eprint!("{}", out.event_log()),
    }
    if let Some(path) = &args.triples {
        write(path, &out.graph.to_triples())?;
    }
    if let Some(dir) = &args.snapshots {
        create_dir(dir)?;
        for (i, snap) in out.snapshots.iter().enumerate() {
            write(&dir.join(format!("clip_{i:03}.dot")), snap)?;
        }
    }
    if let Some(dir) = &args.attention_dir {
        create_dir(dir)?;
        for ev in &out.events {
            let Some(maps) = &ev.attention else { continue };
            let csv: String = maps
                .iter()
                .map(|m| {
                    let row: Vec<String> = m.weights.iter().map(f64::to_string).collect();
                    row.join(",") + "\n"
                })
                .collect();
            write(
                &dir.join(format!("clip_{}_{}.csv", ev.span.start, ev.span.end)),
                &csv,
            )?;
        }
    }
    Ok(0)
}

fn cmd_query(entity: &str, onto: &OntologyArg, depth: Option<usize>) -> CmdResult {
    let onto = ontology(onto)?;
    let depth = depth.unwrap_or(streamkg::ontology::DEFAULT_QUERY_DEPTH);
    let graph = onto.query_concept(entity, depth).map_err(input_error)?;
    print!("{}", graph.to_dot());
    Ok(0)
}

fn cmd_check(onto: &OntologyArg) -> CmdResult {
    let onto = ontology(onto)?;
    let violations = onto.check_consistency();
    for v in &violations {
        println!("{v}");
    }
    println!("{} violations", violations.len());
    Ok(if violations.is_empty() {
        0
    } else {
        EXIT_FINDINGS
    })
}

fn cmd_eval(candidates: &Path, references: &Path) -> CmdResult {
    let cands = read(candidates)?;
    let refs = read(references)?;
    let cands: Vec<&str> = cands.lines().collect();
    let refs: Vec<&str> = refs.lines().collect();
    if cands.len() != refs.len() {
        return Err(input_error(format!(
            "{} candidates but {} reference lines",
            cands.len(),
            refs.len()
        )));
    }
    let corpus = ScoredCorpus::new(
        cands
            .iter()
            .zip(&refs)
            .map(|(c, r)| ScoredPair::new(c, &r.split('\t').collect::<Vec<_>>()))
            .collect(),
    );
    let bleu = bleu4(&corpus).map_err(input_error)?;
    let rouge = rouge_l(&corpus).map_err(input_error)?;
    println!("metric\tscore");
    println!("BLEU-4\t{bleu:.6}");
    println!("ROUGE-L\t{rouge:.6}");
    Ok(0)
}

fn cmd_export(onto: &OntologyArg, format: Format) -> CmdResult {
    let onto = ontology(onto)?;
    match format {
        Format::Dot => print!("{}", onto.full_graph().to_dot()),
        Format::Triples => {
            for c in onto.constraints() {
                println!("{c}");
            }
        }
    }
    Ok(0)
}
