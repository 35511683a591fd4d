mod commands;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ilo", version, about = "Littlewood-Offord containers and sign-matrix experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Master seed; every random choice derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// `paper`, `desk` or `file:<path>` (JSON).
    #[arg(long, global = true, default_value = "desk")]
    pub profile: String,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact rho and rho_1/2 for every vector in a file.
    Rho { file: PathBuf },
    /// Audit the Halasz bound chain for every vector in a file.
    Halasz {
        file: PathBuf,
        /// Single threshold; default is every integer in 1..=|v|/64.
        #[arg(long)]
        ell: Option<String>,
    },
    /// Build and independently verify a container certificate per vector.
    Container { file: PathBuf },
    /// Run and audit the fibre iteration per vector.
    Fibre {
        file: PathBuf,
        /// Also write the full traces (canonical JSON).
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Singularity probability of random symmetric sign matrices.
    Singularity {
        #[arg(long, conflicts_with_all = ["mc", "q"])]
        exact: bool,
        #[arg(long, conflicts_with = "q")]
        mc: bool,
        /// Exact q_n(beta) by joint enumeration.
        #[arg(long)]
        q: bool,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Prime for the F_p side of the report.
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value = "4/5")]
        beta: String,
    },
    /// Exact identity and rank suites, plus a sampled rank profile.
    Identities {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// The full acceptance suite.
    VerifyAll {
        /// Trials per dimension for the interval checks.
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Trials per dimension for the decay trend.
        #[arg(long, default_value_t = 100_000)]
        trend_trials: u64,
        /// Run only these criteria (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.global.workers.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => return record::usage_error(&e.to_string()),
    };
    pool.install(|| commands::dispatch(&cli))
}
