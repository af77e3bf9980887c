use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qinterf",
    version,
    about = "Random quantum algorithm ensembles: sampling, interference statistics and convergence scans"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact interference moments of a circular ensemble.
    Moments(MomentsArgs),
    /// Per-realization interference values or level spacings.
    Sample(SampleArgs),
    /// Histogram of one numeric column of a CSV file.
    Hist(HistArgs),
    /// Distance between a histogram and a reference histogram or law.
    Distance(DistanceArgs),
    /// Distance-versus-gate-count curve and its rate fit.
    Converge(ConvergeArgs),
    /// Fitted convergence rate as a function of the single-qubit gate probability.
    Pscan(PscanArgs),
    /// Re-run the command recorded in the `# key=value` header of an output file.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnsembleArg {
    Cue,
    Hoe,
    Uce,
    Oce,
}

impl EnsembleArg {
    pub fn name(self) -> &'static str {
        match self {
            Self::Cue => "cue",
            Self::Hoe => "hoe",
            Self::Uce => "uce",
            Self::Oce => "oce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObservableArg {
    Interference,
    Spacings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawArg {
    /// Wigner surmise on [0, 5].
    Wigner,
    /// Two-dimensional CUE interference law.
    Cue2,
    /// Two-dimensional HOE interference law.
    Hoe2,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Workers {
    /// Worker threads; results do not depend on this value.
    #[arg(long, default_value_t = default_threads())]
    pub threads: usize,
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, value_enum)]
    pub ensemble: EnsembleArg,
    /// Matrix dimension N.
    #[arg(long)]
    pub dim: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub ensemble: EnsembleArg,
    /// Matrix dimension N (cue, hoe).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of qubits n (uce, oce).
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Gate count n_g (uce, oce).
    #[arg(long, value_delimiter = ',')]
    pub gates: Vec<usize>,
    /// Probability of a single-qubit gate (uce, oce).
    #[arg(long, value_delimiter = ',')]
    pub prob: Vec<f64>,
    #[arg(long)]
    pub realizations: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "interference")]
    pub observable: ObservableArg,
    #[command(flatten)]
    pub workers: Workers,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct HistArgs {
    /// CSV input; `-` reads standard input.
    #[arg(long)]
    pub input: PathBuf,
    /// Zero-based column to histogram; defaults to the last column.
    #[arg(long)]
    pub column: Option<usize>,
    #[arg(long, default_value_t = qinterf::convergence::DEFAULT_BINS)]
    pub bins: usize,
    /// Lower range bound; defaults to the smallest value.
    #[arg(long, allow_hyphen_values = true)]
    pub lower: Option<f64>,
    /// Upper range bound; defaults to the largest value.
    #[arg(long, allow_hyphen_values = true)]
    pub upper: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    /// Histogram CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Reference histogram CSV with identical binning.
    #[arg(long, conflicts_with = "law", required_unless_present = "law")]
    pub reference: Option<PathBuf>,
    /// Analytic reference law, integrated exactly over each bin.
    #[arg(long, value_enum)]
    pub law: Option<LawArg>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum)]
    pub ensemble: EnsembleArg,
    #[arg(long)]
    pub qubits: usize,
    /// Gate counts n_g, comma separated, at least two.
    #[arg(long, value_delimiter = ',', required = true)]
    pub gates: Vec<usize>,
    /// Circuits per gate count.
    #[arg(long)]
    pub realizations: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "spacings")]
    pub observable: ObservableArg,
    #[arg(long, default_value_t = qinterf::convergence::DEFAULT_BINS)]
    pub bins: usize,
    /// Reference interference histogram CSV; generated from the circular
    /// ensemble when absent.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Circular-ensemble draws for a generated reference; default ten times
    /// `--realizations`.
    #[arg(long)]
    pub reference_realizations: Option<usize>,
    /// Directory caching generated reference histograms.
    #[arg(long, default_value = ".qinterf-cache")]
    pub cache_dir: PathBuf,
    /// Neither read nor write the reference cache.
    #[arg(long)]
    pub no_cache: bool,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[arg(long)]
    pub prob: f64,
    #[command(flatten)]
    pub output: Output,
    /// Rate-fit CSV; defaults to `<out>.fit.csv`, or follows the curve on
    /// standard output.
    #[arg(long)]
    pub fit_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PscanArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    /// Probabilities in (0, 1), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub prob: Vec<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    /// File whose header records the command.
    #[arg(long)]
    pub from: PathBuf,
    /// Overrides the worker count of the recorded run.
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}
