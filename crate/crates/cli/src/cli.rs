use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use elastika::cost::ExponentSetName;
use elastika::tuning::TunedKind;
use serde_json::Value;

use crate::classifier::ClassifierId;
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "elastika",
    version,
    args_override_self = true,
    about = "Elastic-distance experiments: tuning, sweeps, noise studies, proximity forests and reports",
    after_help = "Any subcommand accepts `--config FILE`: a JSON object whose keys are flag \
                  names. Its flags are inserted where `--config` appears, so flags given after \
                  it take precedence. Set ELASTIKA_THREADS to cap worker threads."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tune a nearest-neighbour classifier on one dataset and score it on the test split.
    Tune(TuneArgs),
    /// Run classifiers over many datasets, skipping runs already recorded.
    Sweep(SweepArgs),
    /// Write noisy copies of datasets, then sweep over them.
    Noise(NoiseArgs),
    /// Train and score a proximity forest.
    Pf(PfArgs),
    /// Score a saved model on a dataset's test split.
    Predict(PredictArgs),
    /// Render comparison reports from result files.
    #[command(subcommand)]
    Report(ReportCommand),
    /// Generate the bundled synthetic datasets.
    Synth(SynthArgs),
    /// Measure pointwise cost throughput for the fast paths and the general power.
    Timing(TimingArgs),
}

fn parse_kind(s: &str) -> std::result::Result<TunedKind, String> {
    s.parse().map_err(|e: elastika::Error| e.to_string())
}

fn parse_set(s: &str) -> std::result::Result<ExponentSetName, String> {
    s.parse().map_err(|e: elastika::Error| e.to_string())
}

fn parse_id(s: &str) -> std::result::Result<ClassifierId, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    /// Directory laid out as <dir>/<name>/<name>_TRAIN.tsv and _TEST.tsv.
    #[arg(long)]
    pub data_dir: PathBuf,
    #[arg(long)]
    pub dataset: String,
    /// dtw, adtw or dtwf (unwindowed DTW).
    #[arg(long, value_parser = parse_kind)]
    pub distance: TunedKind,
    /// Exponent set a, b or c; defaults to a unless --gamma is given.
    #[arg(long, value_parser = parse_set, conflicts_with = "gamma")]
    pub set: Option<ExponentSetName>,
    /// Fix the cost exponent instead of tuning it.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Windows or penalties evaluated per exponent.
    #[arg(long, default_value_t = 100)]
    pub per_gamma: usize,
    #[arg(long)]
    pub seed: u64,
    /// JSON-lines result file to append to.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the trained model as JSON.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DatasetSelection {
    #[arg(long)]
    pub data_dir: PathBuf,
    /// Comma-separated dataset names.
    #[arg(long, value_delimiter = ',')]
    pub datasets: Vec<String>,
    /// File with one dataset name per line; `#` starts a comment.
    #[arg(long, conflicts_with = "datasets")]
    pub list: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ForestOptions {
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    #[arg(long, default_value_t = 5)]
    pub candidates: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepOptions {
    /// Classifier ids such as dtw+a, adtw^2_500, pf+ (repeatable or comma-separated).
    #[arg(long = "classifier", required = true, value_delimiter = ',', value_parser = parse_id)]
    pub classifiers: Vec<ClassifierId>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Failure manifest; defaults to the result file with a `.failures.jsonl` suffix.
    #[arg(long)]
    pub failures: Option<PathBuf>,
    #[command(flatten)]
    pub forest: ForestOptions,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub selection: DatasetSelection,
    #[command(flatten)]
    pub sweep: SweepOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoisySplits {
    Both,
    Train,
    Test,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub selection: DatasetSelection,
    /// Noise scale relative to each series' standard deviation.
    #[arg(long)]
    pub scale: f64,
    /// Where the noisy dataset copies are written.
    #[arg(long)]
    pub work_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = NoisySplits::Both)]
    pub splits: NoisySplits,
    #[command(flatten)]
    pub sweep: SweepOptions,
}

#[derive(Debug, Args)]
pub struct PfArgs {
    #[arg(long)]
    pub data_dir: PathBuf,
    #[arg(long)]
    pub dataset: String,
    /// Sample the cost exponent from set a at every node.
    #[arg(long)]
    pub plus: bool,
    #[command(flatten)]
    pub forest: ForestOptions,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the forest as JSON.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub data_dir: PathBuf,
    #[arg(long)]
    pub dataset: String,
    /// A model written by `tune --model-out` or `pf --model-out`.
    #[arg(long)]
    pub model: PathBuf,
    /// Write one predicted label per test series to this file.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Pairwise accuracy scatter plot with win/tie/loss and Wilcoxon p.
    Scatter(ScatterArgs),
    /// Critical-difference diagram over several classifiers.
    Cd(CdArgs),
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    /// Result files (repeatable).
    #[arg(long, required = true)]
    pub results: Vec<PathBuf>,
    /// Classifier on the x axis.
    #[arg(long)]
    pub a: String,
    /// Classifier on the y axis.
    #[arg(long)]
    pub b: String,
    /// Output stem; writes <stem>.csv and <stem>.svg.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CdArgs {
    #[arg(long, required = true)]
    pub results: Vec<PathBuf>,
    /// Classifiers to rank; defaults to every id in the results.
    #[arg(long, value_delimiter = ',')]
    pub classifiers: Vec<String>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    /// Elements per measurement.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    /// Repetitions; the fastest is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Replaces `--config FILE` (or `--config=FILE`) with the flags stored in FILE.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut out = Vec::with_capacity(args.len());
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let path = match arg.to_str() {
            Some("--config") => match iter.next() {
                Some(p) => PathBuf::from(p),
                None => return Err(CliError::usage("--config needs a file")),
            },
            Some(s) if s.starts_with("--config=") => PathBuf::from(&s["--config=".len()..]),
            _ => {
                out.push(arg);
                continue;
            }
        };
        out.extend(config_flags(&path)?);
    }
    Ok(out)
}

fn config_flags(path: &PathBuf) -> Result<Vec<OsString>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let Value::Object(map) = doc else {
        return Err(CliError::usage(format!(
            "{}: config must be a JSON object",
            path.display()
        )));
    };
    let mut flags = Vec::new();
    for (key, value) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        let scalar = |v: &Value| -> Result<String> {
            match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                other => Err(CliError::usage(format!(
                    "config key {key:?}: unsupported value {other}"
                ))),
            }
        };
        match &value {
            Value::Bool(true) => flags.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                for item in items {
                    flags.push(flag.clone().into());
                    flags.push(scalar(item)?.into());
                }
            }
            v => {
                flags.push(flag.into());
                flags.push(scalar(v)?.into());
            }
        }
    }
    Ok(flags)
}
