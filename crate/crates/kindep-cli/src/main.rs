mod describe;
mod experiments;
mod rows;

use clap::{Args, Parser, Subcommand};
use rows::Format;
use std::process::ExitCode;

/// Experiments on randomized algorithms under limited independence:
/// min-wise hashing, instrumented quicksort, balls-into-buckets, and exact
/// independence verification, with reproducible CSV/JSON output.
#[derive(Parser)]
#[command(name = "kindep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate Pr(min h(X) = x_target) over keys x_0..x_n
    Minwise(MinwiseArgs),
    /// Comparison-counting quicksort runs with pre-computed pivot streams
    Quicksort(QuicksortArgs),
    /// Balls-into-buckets max load, tail probabilities, histogram
    Buckets(BucketsArgs),
    /// Enumerate a small polynomial family and report its exact deviation
    /// from k-independence
    VerifyIndependence(VerifyArgs),
    /// Falling-factorial moment of bucket loads against its analytic mean
    Moments(MomentsArgs),
    /// Sweep an experiment over an n-list and fit a scaling law
    Scaling(ScalingArgs),
    /// Print an experiment's purpose, constraints, defaults, and statistics
    Describe(DescribeArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Master seed; falls back to KINDEP_SEED, then 1
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per parameter point
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Output format on stdout
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (0 = all cores); results are identical for any value
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    /// Record wall-clock milliseconds per parameter point. Off by default:
    /// without it, identical configs produce byte-identical output
    #[arg(long, default_value_t = false)]
    timing: bool,
}

impl CommonArgs {
    fn seed(&self) -> u64 {
        self.seed
            .or_else(|| {
                std::env::var("KINDEP_SEED")
                    .ok()
                    .and_then(|s| s.parse().ok())
            })
            .unwrap_or(1)
    }
}

#[derive(Args, Debug, Clone)]
struct MinwiseArgs {
    /// Keys are x_0..x_n: n ordinary keys plus the target candidate
    #[arg(long, default_value_t = 100)]
    n: u64,
    /// Independence order of the polynomial family
    #[arg(long, default_value_t = 5)]
    k: u32,
    /// Hash family: full-random | poly | adv-minwise2
    #[arg(long, default_value = "full-random")]
    family: String,
    /// Key whose minimum probability is estimated
    #[arg(long, default_value_t = 0)]
    target: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
struct QuicksortArgs {
    /// Pivot model: 1 = index stream with cleanup, 2 = rank-order labels
    #[arg(long, default_value_t = 1)]
    setting: u8,
    #[arg(long, default_value_t = 1024)]
    n: u64,
    #[arg(long, default_value_t = 4)]
    k: u32,
    /// Setting 1: poly | full-random | adv-bucket;
    /// Setting 2: poly | full-random | adv-minwise2
    #[arg(long, default_value = "poly")]
    family: String,
    /// Target bucket size for adv-bucket
    #[arg(long)]
    m: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
struct BucketsArgs {
    /// Balls and buckets (n balls into n buckets)
    #[arg(long, default_value_t = 1024)]
    n: u64,
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Hash family: full-random | poly | adv-bucket
    #[arg(long, default_value = "full-random")]
    family: String,
    /// Tail threshold parameter; enables the Pr(max >= m+k) vs n/m^k rows
    /// and is required by adv-bucket
    #[arg(long)]
    m: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
struct VerifyArgs {
    /// Field prime
    #[arg(long, default_value_t = 5)]
    p: u64,
    /// Independence order (number of coefficients)
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Probe points, comma separated; defaults to 0..k-1
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<u64>>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
struct MomentsArgs {
    #[arg(long, default_value_t = 64)]
    n: u64,
    /// Moment order; also the family's independence for poly
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Hash family: full-random | poly
    #[arg(long, default_value = "full-random")]
    family: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
struct ScalingArgs {
    /// Experiment to sweep: minwise | quicksort | buckets
    #[arg(long)]
    experiment: String,
    /// At least 4 values spanning at least 3 doublings
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    n_list: Vec<u64>,
    /// Fit model: pow (c*n^alpha) | nlog (c*n*(log2 n)^beta)
    #[arg(long, default_value = "pow")]
    model: String,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value = "full-random")]
    family: String,
    #[arg(long, default_value_t = 1)]
    setting: u8,
    #[arg(long, default_value_t = 0)]
    target: u64,
    #[arg(long)]
    m: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
struct DescribeArgs {
    /// minwise | quicksort | buckets | verify-independence | moments | scaling
    experiment: String,
}

/// Configuration errors exit 2, experiment-level errors exit 3.
#[derive(Debug)]
enum CliError {
    Config(String),
    Experiment(kindep::Error),
}

impl From<kindep::Error> for CliError {
    fn from(e: kindep::Error) -> Self {
        CliError::Experiment(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let (result, common) = match cli.command {
        Command::Describe(args) => {
            return match describe::describe(&args.experiment) {
                Ok(text) => {
                    println!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            };
        }
        Command::Minwise(args) => {
            let c = args.common.clone();
            (run_in_pool(&c, move || experiments::minwise(&args)), c)
        }
        Command::Quicksort(args) => {
            let c = args.common.clone();
            (run_in_pool(&c, move || experiments::quicksort(&args)), c)
        }
        Command::Buckets(args) => {
            let c = args.common.clone();
            (run_in_pool(&c, move || experiments::buckets(&args)), c)
        }
        Command::VerifyIndependence(args) => {
            let c = args.common.clone();
            (run_in_pool(&c, move || experiments::verify_independence(&args)), c)
        }
        Command::Moments(args) => {
            let c = args.common.clone();
            (run_in_pool(&c, move || experiments::moments(&args)), c)
        }
        Command::Scaling(args) => {
            let c = args.common.clone();
            (run_in_pool(&c, move || experiments::scaling(&args)), c)
        }
    };

    match result {
        Ok(rows) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = rows::write_rows(&mut stdout, common.format, &rows) {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Experiment(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

/// Execute inside a rayon pool of the requested width; result rows are
/// independent of the width.
fn run_in_pool<F>(common: &CommonArgs, f: F) -> Result<Vec<rows::ResultRow>, CliError>
where
    F: FnOnce() -> Result<Vec<rows::ResultRow>, CliError> + Send,
    Vec<rows::ResultRow>: Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.parallel)
        .build()
        .map_err(|e| CliError::Config(format!("--parallel: {e}")))?;
    pool.install(f)
}
