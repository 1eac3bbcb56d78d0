use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecx_core::complexity::Constraint;
use ecx_core::rational::parse_rational;
use ecx_core::{BitString, Mode, ProcessModel, Rational};

#[derive(Debug, Parser)]
#[command(name = "ecx", version, about = "Effective complexity experiments over a computable description scheme")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads (default: one per core). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// File of `key = value` lines using the long flag names; flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to a file instead of standard output.
    #[arg(long, short = 'o', global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Largest length whose typical sets are enumerated.
    #[arg(long, global = true, default_value_t = ecx_core::typical_sets::DEFAULT_N_MAX)]
    pub n_max: usize,
    /// Largest dyadic precision of i.i.d. and Markov members.
    #[arg(long, global = true, default_value_t = ecx_core::complexity::DEFAULT_M_MAX)]
    pub m_max: u32,
    /// Comma-separated rates for uniform-typical members (default k/64 and k/8 grid).
    #[arg(long, global = true, value_name = "RATES")]
    pub r_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Process in compact form, e.g. `markov:flip=1/10`.
    #[arg(long, value_parser = parse_model)]
    pub model: Option<ProcessModel>,
    /// Process as a key/value document.
    #[arg(long, value_name = "PATH", conflicts_with = "model")]
    pub model_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample strings from a process.
    Gen {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Print strings as `hex:<len>:<digits>`.
        #[arg(long)]
        hex: bool,
    },
    /// LZ78 code lengths, encoding and decoding.
    Lz {
        #[arg(long, value_parser = parse_bits)]
        x: Option<BitString>,
        /// Decode an encoded stream instead.
        #[arg(long, value_parser = parse_bits, conflicts_with = "x")]
        decode: Option<BitString>,
        /// Add the encoded stream to the output.
        #[arg(long)]
        encode: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "n", alias = "n-list", value_delimiter = ',')]
        n_list: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Per-length medians instead of per-sample rows.
        #[arg(long)]
        summary: bool,
    },
    /// Typical sets T(r, n): exact cardinalities, members, or empirical probability.
    Typical {
        #[arg(long = "r", value_parser = parse_rational, value_delimiter = ',', required = true)]
        r: Vec<Rational>,
        #[arg(long = "n", alias = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// List the members instead of counting them.
        #[arg(long)]
        list: bool,
    },
    /// Two-part code length K̂(x).
    Khat {
        #[arg(long, value_parser = parse_bits, required = true)]
        x: Vec<BitString>,
        #[arg(long, value_parser = parse_mode, default_value = "exact")]
        mode: Mode,
    },
    /// Effective complexity reports.
    Ec {
        #[arg(long, value_parser = parse_bits)]
        x: Option<BitString>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "n", alias = "n-list", value_delimiter = ',')]
        n_list: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_rational, default_value = "0")]
        delta: Rational,
        /// Tolerance in bits.
        #[arg(long = "Delta", value_parser = parse_rational, conflicts_with = "eps")]
        big_delta: Option<Rational>,
        /// Tolerance as eps * n.
        #[arg(long, value_parser = parse_rational)]
        eps: Option<Rational>,
        #[arg(long, value_parser = parse_mode, default_value = "exact")]
        mode: Mode,
        /// e.g. `tags=iid,markov-q;m=1..3;r=1/2..1`
        #[arg(long, value_parser = parse_constraint)]
        constraint: Option<Constraint>,
    },
    /// Coarse effective complexity.
    CoarseEc {
        #[arg(long, value_parser = parse_bits, required = true)]
        x: Vec<BitString>,
        #[arg(long, value_parser = parse_rational, default_value = "0")]
        delta: Rational,
        #[arg(long, value_parser = parse_mode, default_value = "exact")]
        mode: Mode,
    },
    /// Budget check of uniform typical-set ensembles on sampled strings.
    #[command(name = "sweep-theorem1")]
    SweepTheorem1 {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_rational)]
        eps: Rational,
        #[arg(long, value_parser = parse_rational, default_value = "1/4")]
        delta: Rational,
        #[arg(long = "n-list", alias = "n", value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Also write per-sample rows here.
        #[arg(long, value_name = "PATH")]
        rows: Option<PathBuf>,
    },
    /// Exhaustive coarse effective complexity over all strings of a length.
    ScanMaxCoarse {
        #[arg(long = "n", alias = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, value_parser = parse_rational, default_value = "0")]
        delta: Rational,
        /// Emit the value histogram instead of the summary.
        #[arg(long)]
        histogram: bool,
    },
    /// Exhaustive small-n invariant suites.
    Selftest {
        /// Smaller sizes.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_model(s: &str) -> Result<ProcessModel, ecx_core::Error> {
    s.parse()
}

fn parse_bits(s: &str) -> Result<BitString, ecx_core::Error> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<Mode, ecx_core::Error> {
    s.parse()
}

fn parse_constraint(s: &str) -> Result<Constraint, ecx_core::Error> {
    s.parse()
}
