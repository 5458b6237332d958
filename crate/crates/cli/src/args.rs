use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ricalc",
    version,
    about = "Random integral mappings on infinitely divisible laws",
    long_about = "Coefficient families, closed-form time-change laws r_A, Lévy-Khintchine triple transforms, \
                  identity verification and path simulation for composed random integral mappings.\n\n\
                  Exit status: 0 on success, 1 when a verification or comparison fails, 2 on invalid input."
)]
pub struct Cli {
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for randomized commands. When omitted a seed is generated and printed to stderr.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Arithmetic for exponent-level computations.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Float)]
    pub mode: Mode,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Float,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Mc,
    Compose,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients C_j and c_j for distinct exponents, with the sum of the C_j.
    Coeffs {
        /// Distinct positive exponents (rationals like 1/3 are accepted in exact mode).
        #[arg(required = true, allow_negative_numbers = true)]
        betas: Vec<String>,
    },
    /// Density and CDF of the product law of a multiset, or samples from it.
    Law {
        /// Multiset such as "1,2,3" or "2x3" (value x multiplicity).
        multiset: String,
        /// Evaluate at a single point.
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["grid", "sample"])]
        eval: Option<f64>,
        /// Grid "start,end,count" with count >= 2 and start < end [default: 0.01,1,100].
        #[arg(long, allow_hyphen_values = true, conflicts_with = "sample")]
        grid: Option<String>,
        /// Draw this many samples instead of tabulating.
        #[arg(long, value_name = "N")]
        sample: Option<usize>,
    },
    /// Transform a triple under the composed mapping over a multiset.
    Transform {
        /// Triple document (JSON).
        #[arg(long, value_name = "FILE")]
        triple: PathBuf,
        /// Multiset of exponents.
        #[arg(long)]
        betas: String,
        /// Radii of ball complements {|x| > radius} to evaluate the transformed measure on.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        /// Compare against the sum_j C_j J^{beta_j} decomposition (distinct exponents only).
        #[arg(long)]
        check: bool,
    },
    /// Run identity, Monte Carlo and composition checks.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Sample size of each Monte Carlo law check.
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Simulate the random integral and compare its empirical cf with the quadrature log-cf.
    Simulate {
        /// Triple document (JSON) with a finite atomic measure.
        #[arg(long, value_name = "FILE")]
        triple: PathBuf,
        /// Multiset of exponents.
        #[arg(long)]
        betas: String,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        /// Number of time cells on (0, 1].
        #[arg(long, default_value_t = 512)]
        grid: usize,
        /// Argument grid "start,end,count" along the direction.
        #[arg(long, default_value = "-3,3,21", allow_hyphen_values = true)]
        y_grid: String,
        /// Direction of the argument grid [default: first coordinate axis].
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        direction: Vec<f64>,
        /// Standardized deviation threshold.
        #[arg(long, default_value_t = 4.0)]
        z: f64,
        /// Also write the simulated values as CSV.
        #[arg(long, value_name = "PATH")]
        samples_csv: Option<PathBuf>,
    },
}
