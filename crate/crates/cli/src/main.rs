use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use patcher_core::backends::remote::{RemoteBackend, RemoteConfig, ENDPOINT_ENV};
use patcher_core::backends::sim::{SimWorld, SimWorldConfig};
use patcher_core::backends::Backends;
use patcher_core::dataset::{
    coco80, compose_multiobject, emit_report, evaluate, generate_tbp, import_annotations, load_dataset,
    save_dataset, write_dataset, Judge, Method, PromptRecord, ReportFormat, SimJudge, Source, TbpVocabulary,
};
use patcher_core::detection::calibrate_threshold;
use patcher_core::domain::{Prompt, RepairOutcome, RepairStatus};
use patcher_core::enhancement::wordnet::WORDNET_DIR_ENV;
use patcher_core::enhancement::WordNet;
use patcher_core::extraction::{ExtractionConfig, ExtractionMode, Extractor};
use patcher_core::lexicon::Lexicon;
use patcher_core::orchestrator::{repair_batch, Mode, PipelineConfig, RepairEnv, SeedPolicy};
use serde_json::json;

#[derive(Parser)]
#[command(name = "patcher", version, about = "Repair text-to-image prompts whose objects go missing from the image")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repair one prompt or a JSONL dataset of prompts.
    Repair(RepairArgs),
    /// Run repair methods over a dataset and write a correct-rate report.
    Eval(EvalArgs),
    /// Generate a prompt dataset.
    GenDataset(GenArgs),
    /// Pick a neglect threshold from labeled similarity scores.
    Calibrate(CalibrateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Sim,
    Remote,
}

#[derive(Args)]
struct BackendArgs {
    #[arg(long, value_enum, default_value = "sim")]
    backend: BackendKind,
    /// Model server URL for the remote backend (PATCHER_ENDPOINT takes precedence).
    #[arg(long)]
    endpoint: Option<String>,
    /// Directory holding WordNet's index.noun and data.noun.
    #[arg(long, env = WORDNET_DIR_ENV)]
    wordnet_dir: Option<PathBuf>,
    /// Simulator world file (JSON); the bundled world when unset.
    #[arg(long)]
    world: Option<PathBuf>,
    /// Use the model server's parser instead of the builtin chunker.
    #[arg(long)]
    remote_parser: bool,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value_t = 0.5)]
    prune_threshold: f64,
    #[arg(long, default_value = "full")]
    mode: Mode,
    /// Base seed mixed with each prompt id.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
    /// Disable attention guidance (plain breadth-first hyponym search).
    #[arg(long)]
    no_guidance: bool,
}

#[derive(Args)]
struct RepairArgs {
    /// Prompt text; use --input for a dataset file.
    text: Option<String>,
    #[arg(long, conflicts_with = "text")]
    input: Option<PathBuf>,
    /// Write outcome lines here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    backend: BackendArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "patcher_full")]
    method: Vec<Method>,
    /// Human annotations CSV (prompt_id,annotator,verdict); simulator ground truth when unset.
    #[arg(long)]
    annotations: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "markdown")]
    format: ReportFormat,
    /// Also write one JSON line per (record, method) here.
    #[arg(long)]
    records: Option<PathBuf>,
    #[command(flatten)]
    backend: BackendArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct GenArgs {
    /// Template prompts; optionally a vocabulary JSON file.
    #[arg(long, num_args = 0..=1, default_missing_value = "", conflicts_with = "compose")]
    tbp: Option<String>,
    /// Compose prompts with 2 or 3 objects from the 80 single-object names.
    #[arg(long)]
    compose: Option<usize>,
    #[arg(long, default_value_t = 3160)]
    limit: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct CalibrateArgs {
    /// CSV with header `similarity,present`.
    #[arg(long)]
    labeled: PathBuf,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

enum Stack {
    Sim(SimWorld),
    Remote(RemoteBackend),
}

struct Runtime {
    stack: Stack,
    extractor: Extractor,
    wordnet: WordNet,
}

impl Runtime {
    fn new(args: &BackendArgs) -> Result<Self> {
        let wordnet = match &args.wordnet_dir {
            Some(dir) => WordNet::open(dir).with_context(|| format!("loading WordNet from {}", dir.display()))?,
            None => WordNet::bundled(),
        };
        let endpoint = RemoteConfig::resolve(args.endpoint.as_deref());
        let stack = match args.backend {
            BackendKind::Sim => {
                let cfg = match &args.world {
                    Some(path) => SimWorldConfig::load(path)
                        .with_context(|| format!("loading world {}", path.display()))?,
                    None => SimWorldConfig::bundled(),
                };
                Stack::Sim(SimWorld::new(cfg, Arc::new(Lexicon::bundled()), Some((&wordnet, 6)))?)
            }
            BackendKind::Remote => {
                let Some(cfg) = endpoint.clone() else {
                    bail!("the remote backend needs a server URL: pass --endpoint or set {ENDPOINT_ENV}");
                };
                let url = cfg.endpoint.clone();
                let backend = RemoteBackend::connect(cfg).with_context(|| format!("connecting to {url}"))?;
                log::info!("connected to {url} (model {})", backend.model());
                Stack::Remote(backend)
            }
        };
        let extractor = if args.remote_parser {
            let Some(cfg) = endpoint else {
                bail!("--remote-parser needs a server URL: pass --endpoint or set {ENDPOINT_ENV}");
            };
            Extractor::new(&ExtractionConfig {
                mode: ExtractionMode::RemoteParser,
                lexicon_path: None,
                endpoint: Some(cfg.endpoint),
            })?
        } else {
            match &stack {
                Stack::Sim(world) => world.extractor().clone(),
                Stack::Remote(_) => Extractor::new(&ExtractionConfig::default())?,
            }
        };
        Ok(Runtime { stack, extractor, wordnet })
    }

    fn backends(&self) -> Backends<'_> {
        match &self.stack {
            Stack::Sim(w) => Backends::uniform(w),
            Stack::Remote(r) => Backends::uniform(r),
        }
    }

    fn env(&self) -> RepairEnv<'_> {
        RepairEnv { backends: self.backends(), extractor: &self.extractor, wordnet: Some(&self.wordnet) }
    }
}

fn pipeline_config(args: &PipelineArgs) -> Result<PipelineConfig> {
    if !(args.threshold > 0.0 && args.threshold < 1.0) {
        bail!("--threshold must be in (0, 1), got {}", args.threshold);
    }
    if args.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let mut cfg = PipelineConfig {
        threshold: args.threshold,
        mode: args.mode,
        seed_policy: SeedPolicy::PerPrompt { base: args.seed },
        ..PipelineConfig::default()
    };
    cfg.enhancement.prune_similarity_threshold = args.prune_threshold;
    cfg.enhancement.guidance = !args.no_guidance;
    Ok(cfg)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn status_name(s: RepairStatus) -> &'static str {
    match s {
        RepairStatus::AlreadyCorrect => "already_correct",
        RepairStatus::Repaired => "repaired",
        RepairStatus::BestEffort => "best_effort",
    }
}

fn outcome_line(original: &Prompt, o: &RepairOutcome) -> serde_json::Value {
    json!({
        "id": original.id,
        "prompt": original.text,
        "status": status_name(o.status),
        "final_prompt": o.final_prompt.text,
        "attempts": o.attempts,
        "final_att_diff": o.final_att_diff,
        "trail": o.trail,
    })
}

fn cmd_repair(args: RepairArgs) -> Result<ExitCode> {
    let cfg = pipeline_config(&args.pipeline)?;
    let rt = Runtime::new(&args.backend)?;
    let lexicon = rt.extractor.lexicon();
    let prompts: Vec<Prompt> = match (&args.text, &args.input) {
        (Some(text), None) => vec![Prompt::new("prompt", text.clone(), lexicon)],
        (None, Some(path)) => load_dataset(path)
            .with_context(|| format!("reading {}", path.display()))?
            .into_iter()
            .map(|r| Prompt::new(r.id, r.prompt, lexicon))
            .collect(),
        _ => bail!("give a prompt text or --input FILE"),
    };
    let results = repair_batch(&prompts, &rt.env(), &cfg, args.pipeline.jobs);
    let mut out = output(args.out.as_deref())?;
    let mut counts = [0usize; 3];
    let mut attempts = 0;
    for (p, r) in prompts.iter().zip(&results) {
        let o = match r {
            Ok(o) => o,
            Err(e) => bail!("prompt {}: {e}", p.id),
        };
        serde_json::to_writer(&mut out, &outcome_line(p, o))?;
        writeln!(out)?;
        counts[match o.status {
            RepairStatus::AlreadyCorrect => 0,
            RepairStatus::Repaired => 1,
            RepairStatus::BestEffort => 2,
        }] += 1;
        attempts += o.attempts;
    }
    out.flush()?;
    let [already, repaired, best] = counts;
    eprintln!(
        "{} prompts: {repaired} repaired, {already} already correct, {best} best effort; mean attempts {:.2}",
        prompts.len(),
        attempts as f64 / prompts.len().max(1) as f64
    );
    Ok(if best > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode> {
    let cfg = pipeline_config(&args.pipeline)?;
    let records = load_dataset(&args.dataset).with_context(|| format!("reading {}", args.dataset.display()))?;
    let rt = Runtime::new(&args.backend)?;
    let annotations = match &args.annotations {
        Some(path) => Some(import_annotations(path).with_context(|| format!("reading {}", path.display()))?),
        None => None,
    };
    let sim_judge;
    let judge: &dyn Judge = match (&annotations, &rt.stack) {
        (Some(a), _) => a,
        (None, Stack::Sim(world)) => {
            sim_judge = SimJudge { world };
            &sim_judge
        }
        (None, Stack::Remote(_)) => bail!("the remote backend has no ground truth: pass --annotations"),
    };
    let mut methods = args.method.clone();
    methods.dedup();
    let report = evaluate(&records, &methods, &rt.env(), &cfg, judge, args.pipeline.jobs)?;
    let mut out = output(args.out.as_deref())?;
    out.write_all(emit_report(&report, args.format).as_bytes())?;
    out.flush()?;
    if let Some(path) = &args.records {
        let mut w = output(Some(path))?;
        for r in &report.records {
            serde_json::to_writer(&mut w, r)?;
            writeln!(w)?;
        }
        w.flush()?;
    }
    for row in &report.rows {
        eprintln!(
            "{} {}: CR {:.1}% ({}/{}), mean attempts {:.2}",
            row.dataset,
            row.method,
            100.0 * row.cr,
            row.correct,
            row.total,
            row.mean_attempts
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen_dataset(args: GenArgs) -> Result<ExitCode> {
    let records: Vec<PromptRecord> = match (&args.tbp, args.compose) {
        (Some(vocab), None) => {
            let vocab = if vocab.is_empty() {
                TbpVocabulary::bundled()
            } else {
                let text = std::fs::read_to_string(vocab).with_context(|| format!("reading {vocab}"))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {vocab}"))?
            };
            generate_tbp(&vocab)?
        }
        (None, Some(n)) => {
            let rt = Runtime::new(&args.backend)?;
            let backends = rt.backends();
            let result =
                compose_multiobject(&coco80(), n, Some(backends.suggester), &rt.extractor, args.limit, args.seed)?;
            if result.fallbacks > 0 {
                log::warn!(
                    "{} of {} prompts fell back to the plain \"a X and a Y\" form (no usable suggestion)",
                    result.fallbacks,
                    result.records.len()
                );
            }
            result.records
        }
        _ => bail!("give exactly one of --tbp or --compose N"),
    };
    match &args.out {
        Some(path) => save_dataset(&records, path)?,
        None => write_dataset(&records, BufWriter::new(io::stdout().lock()))?,
    }
    let mut per_source: Vec<(Source, usize)> = Vec::new();
    for r in &records {
        match per_source.iter_mut().find(|(s, _)| *s == r.source) {
            Some((_, n)) => *n += 1,
            None => per_source.push((r.source, 1)),
        }
    }
    let parts: Vec<String> = per_source.iter().map(|(s, n)| format!("{n} {s}")).collect();
    eprintln!("{} prompts ({})", records.len(), parts.join(", "));
    Ok(ExitCode::SUCCESS)
}

fn parse_present(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" => Some(true),
        "0" | "false" | "no" => Some(false),
        _ => None,
    }
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<ExitCode> {
    let path = &args.labeled;
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut rdr = csv_reader(file);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h.trim() == name).with_context(|| format!("{} has no {name:?} column", path.display()))
    };
    let (sim_col, present_col) = (col("similarity")?, col("present")?);
    let mut labeled = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let sim: f64 = rec
            .get(sim_col)
            .and_then(|s| s.trim().parse().ok())
            .with_context(|| format!("line {line}: bad similarity"))?;
        let present = rec.get(present_col).and_then(parse_present).with_context(|| format!("line {line}: bad present flag"))?;
        labeled.push((sim, present));
    }
    let cal = calibrate_threshold(&labeled)?;
    println!("{}", serde_json::to_string(&cal)?);
    eprintln!("threshold {:.4} (balanced accuracy {:.3})", cal.threshold, cal.balanced_accuracy);
    if cal.low_confidence {
        log::warn!("the labeled scores do not separate well; treat this threshold with care");
    }
    Ok(ExitCode::SUCCESS)
}

fn csv_reader<R: io::Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Repair(a) => cmd_repair(a),
        Command::Eval(a) => cmd_eval(a),
        Command::GenDataset(a) => cmd_gen_dataset(a),
        Command::Calibrate(a) => cmd_calibrate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
