use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hoaa::apps::{AfSelect, CaseStudy};
use hoaa::cells::CellKind;
use hoaa::chains::{Mode, P1aVariant};
use hoaa::metrics::Method;

/// Reproducible experiments on the plus-one adder cell and the hybrid
/// overestimating adder.
#[derive(Debug, Parser)]
#[command(name = "hoaa", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Operand width N in bits.
    #[arg(long, global = true, default_value_t = 8)]
    pub width: u32,

    /// Number of switchable LSB cells.
    #[arg(long, global = true, default_value_t = 1)]
    pub m: u32,

    /// Plus-one cell used in the low part: approx-p1a | accurate-p1a.
    #[arg(long, global = true, default_value = "approx-p1a")]
    pub variant: P1aVariant,

    /// Adder mode: overestimate | accurate.
    #[arg(long, global = true, default_value = "overestimate")]
    pub mode: Mode,

    /// Monte Carlo trial count [default: 2^(width+1)].
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Report path. Without it the report goes to `$HOAA_OUTPUT_DIR/<name>`
    /// when that variable is set, otherwise to stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Fixed-point word length for the activation datapath.
    #[arg(long, global = true, default_value_t = 16)]
    pub total_bits: u32,

    /// Fraction bits for the activation datapath.
    #[arg(long, global = true, default_value_t = 12)]
    pub frac_bits: u32,

    /// CORDIC iterations (repeats added automatically).
    #[arg(long, global = true, default_value_t = 12)]
    pub iterations: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export a cell netlist with its structural figures.
    DumpCell {
        /// fa | ha | hadd | accurate-p1a | approx-p1a
        #[arg(long, default_value = "approx-p1a")]
        cell: CellKind,
    },
    /// Print every input row of a cell.
    TruthTable {
        #[arg(long, default_value = "approx-p1a")]
        cell: CellKind,
    },
    /// Error metrics for one case study.
    Metrics(MetricsArgs),
    /// Error metrics over every (m, variant, mode) combination.
    Sweep {
        #[command(flatten)]
        run: MetricsArgs,

        /// Comma-separated m values [default: 0..=min(width, 3)].
        #[arg(long, value_delimiter = ',')]
        m_values: Option<Vec<u32>>,
    },
    /// Two's-complement subtraction of a single operand pair.
    Subtract {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
    },
    /// Round-to-even of `x >> k`.
    Round {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        k: u32,
    },
    /// Fixed-point sigmoid/tanh at one point or over a grid on [-1, 1].
    Af {
        /// Single argument; omit for a grid.
        #[arg(long, allow_negative_numbers = true)]
        z: Option<f64>,

        /// sigmoid | tanh
        #[arg(long, default_value = "sigmoid")]
        sel: AfSelect,

        /// Grid size when no --z is given.
        #[arg(long, default_value_t = 256)]
        points: usize,
    },
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// subtract | round | af | hoaa | loa
    #[arg(long, default_value = "subtract")]
    pub case: CaseStudy,

    /// exhaustive | monte-carlo
    #[arg(long, default_value = "monte-carlo")]
    pub method: Method,

    /// Draw the carry-in as a third operand (hoaa case only).
    #[arg(long)]
    pub include_cin: bool,
}
