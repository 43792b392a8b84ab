//! `dqi`: batch experiment driver.
//!
//! Exit codes: 0 success, 2 input error, 3 invariant violation, 4 budget exceeded.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use report::Format;

#[derive(Parser, Debug)]
#[command(
    name = "dqi",
    version,
    about = "Decoded quantum interferometry experiments on small codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the instance comes from and where the report goes.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Instance file: "m n", m rows of n bits, optional target line of m bits.
    #[arg(long, value_name = "PATH", conflicts_with = "generate")]
    instance: Option<PathBuf>,
    /// Generator spec: repetition:m | hamming74 | simplex:r | ldpc:m,n,rowweight.
    #[arg(long, value_name = "SPEC")]
    generate: Option<String>,
    /// Target vector v as an m-bit string; defaults to the file's target or a seeded draw.
    #[arg(long, value_name = "BITS")]
    target: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-ell exact value, tridiagonal eigenvalue, Kravchuk root and sampled mean.
    Semicircle {
        #[command(flatten)]
        common: Common,
        /// Largest ell to report; defaults to the decoding radius (at most 3).
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        shots: usize,
    },
    /// Primal, dual and transformed weight distributions with their defects.
    Macwilliams {
        #[command(flatten)]
        common: Common,
        /// Sweep the built-in corpus (m <= 16) instead of one code.
        #[arg(long)]
        corpus: bool,
        /// Move one word of the primal profile from weight 0 to weight 1 first.
        #[arg(long)]
        corrupt_profile: bool,
        /// Random targets per code for the generalized identity.
        #[arg(long, default_value_t = 100)]
        shots: usize,
    },
    /// Covering-radius certificates and slice checks.
    Bounds {
        #[command(flatten)]
        common: Common,
        /// Only this ell; otherwise every valid one.
        #[arg(long)]
        ell: Option<usize>,
        /// Also emit slice certificates for even ell.
        #[arg(long)]
        slices: bool,
    },
    /// Codewords inside the semicircle band.
    Census {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        /// For ldpc specs: repeat for every m up to this value, scaling n with m.
        #[arg(long, value_name = "M")]
        sweep_to: Option<usize>,
    },
    /// Orthonormality and ladder-action defects of the obfuscated oscillator.
    Oscillator {
        #[command(flatten)]
        common: Common,
    },
    /// Measurement shots from the optimal degree-ell DQI state.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long, default_value_t = 1000)]
        shots: usize,
    },
    /// Chain-rule sampling of the DQI output distribution with multiplicative error.
    Stockmeyer {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        shots: usize,
        /// Use discretized counts with seeded counting error.
        #[arg(long)]
        randomized: bool,
    },
    /// Heavy outcomes of the DQI state found through its Hadamard transform.
    Peaks {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long)]
        threshold: f64,
        /// JSON-lines trace of every prefix decision.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Output distribution of the discrete-logarithm circuit.
    Shor {
        #[command(flatten)]
        common: Common,
        /// Group order N.
        #[arg(long)]
        order: u64,
        /// The discrete logarithm alpha.
        #[arg(long)]
        log_value: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("dqi: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
