use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use facmod::bounds::BoundKind;
use facmod::SequenceKind;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "facmod", version, about = "Exact computations on factorial residues modulo a prime")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Output format for data records
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write data to this file (and a run manifest next to it) instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps; 0 uses every available core
    #[arg(long, default_value_t = 0, global = true)]
    pub jobs: usize,
    /// Suppress the summary lines on stderr
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// `lo,hi`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pair(pub u64, pub u64);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| format!("expected two comma-separated integers, got {s:?}"))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<u64>()
                .map_err(|e| format!("{x:?} is not a nonnegative integer: {e}"))
        };
        Ok(Pair(parse(a)?, parse(b)?))
    }
}

/// `x1,x2,…` (possibly empty)
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct List(pub Vec<u64>);

impl FromStr for List {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().is_empty() {
            return Ok(List(Vec::new()));
        }
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|e| format!("{x:?} is not a nonnegative integer: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumWhich {
    Mult,
    Add,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum CountWhich {
    #[value(name = "F")]
    F,
    #[value(name = "V")]
    V,
    #[value(name = "G")]
    G,
    #[value(name = "D")]
    D,
    #[value(name = "maxF")]
    MaxF,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum MomentWhich {
    #[value(name = "I")]
    I,
    #[value(name = "J")]
    J,
    #[value(name = "T")]
    T,
    #[value(name = "S")]
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum OracleWhich {
    #[value(name = "I")]
    I,
    #[value(name = "J")]
    J,
    #[value(name = "F")]
    F,
    #[value(name = "V")]
    V,
    #[value(name = "G")]
    G,
    #[value(name = "D")]
    D,
    #[value(name = "all")]
    All,
}

fn parse_sequence(s: &str) -> Result<SequenceKind, String> {
    s.parse()
}

fn parse_bound(s: &str) -> Result<BoundKind, String> {
    s.parse()
}

#[derive(Debug, Args, Serialize)]
pub struct WindowArgs {
    #[arg(long)]
    pub p: u64,
    /// Window offset H
    #[arg(long = "H", default_value_t = 0)]
    #[serde(rename = "H")]
    pub h: u64,
    /// Window length N
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: u64,
    /// Sequence: factorial, central-binomial or double-factorial
    #[arg(long, value_parser = parse_sequence, default_value = "factorial")]
    pub sequence: SequenceKind,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Prime context summary: p, smallest primitive root, sequence kind
    Ctx {
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = parse_sequence, default_value = "factorial")]
        kind: SequenceKind,
    },
    /// All multiplicative (T) or additive (S) character sums over a window
    Spectrum {
        #[command(flatten)]
        window: WindowArgs,
        /// Phase polynomial coefficients c0,c1,… (multiplicative only)
        #[arg(long)]
        f: Option<List>,
        #[arg(long, value_enum, default_value_t = SpectrumWhich::Mult)]
        which: SpectrumWhich,
        /// Also dump little-endian (re, im) f64 pairs here
        #[arg(long)]
        binary: Option<PathBuf>,
    },
    /// Moment counts I, J and spectral moments T, S with their bounds
    Moments {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        ell: u32,
        #[arg(long, value_enum)]
        which: MomentWhich,
        /// Phase polynomial coefficients for T
        #[arg(long)]
        f: Option<List>,
    },
    /// Representation counts F, value sets V, fixed-sum counts G, discrepancy D, max F
    Counts {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 1)]
        ell: u32,
        #[arg(long, value_enum)]
        which: CountWhich,
        /// Residue (F, G) or multiplier (D)
        #[arg(long)]
        a: Option<u64>,
        /// Sum N for G (defaults to the window length)
        #[arg(long = "sumN")]
        sum_n: Option<u64>,
        /// Lift the N*ell < p restriction for G
        #[arg(long)]
        allow_large: bool,
    },
    /// Smallest ell-tuple with n_i <= max-n whose factorial product is a
    Repr {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        ell: u32,
        #[arg(long = "max-n")]
        max_n: u64,
    },
    /// Three-factorial witness for a from Wilson's theorem
    Wilson {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u64,
    },
    /// Quadratic-nonresidue spacings and the alternating-sum identity
    Spacings {
        #[arg(long)]
        p: u64,
        #[arg(long = "J")]
        j: u64,
    },
    /// Primitive roots among u(n): counts over a window or smallest n over a prime range
    Primroot {
        #[arg(long, required_unless_present = "range")]
        p: Option<u64>,
        /// Run length m: u(n), …, u(n+m-1) all primitive roots
        #[arg(long, default_value_t = 1)]
        m: u64,
        /// H,N (defaults to the full nonvanishing range)
        #[arg(long)]
        window: Option<Pair>,
        /// lo,hi: smallest n for every prime in the range
        #[arg(long, conflicts_with = "p")]
        range: Option<Pair>,
        #[arg(long, value_parser = parse_sequence, default_value = "factorial")]
        sequence: SequenceKind,
    },
    /// Count of n whose u(n) is a q-th power residue exactly for q in R
    PowerClasses {
        #[command(flatten)]
        window: WindowArgs,
        /// Subset R of the prime divisors of p-1, as q1,q2,… (empty for none)
        #[arg(long = "R", default_value = "")]
        r: List,
    },
    /// Primes in a range whose 2!, …, (p-1)! are pairwise distinct mod p
    ScanDistinct {
        #[arg(long)]
        range: Pair,
    },
    /// Bound ratios across the primes of a range
    Bounds {
        #[arg(long, value_parser = parse_bound)]
        kind: BoundKind,
        #[arg(long)]
        range: Pair,
        #[arg(long)]
        ell: Option<u32>,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long = "J")]
        j: Option<u64>,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
    },
    /// Share of residues attained by n! over a prime range, against 1 - 1/e
    GuyF11 {
        #[arg(long)]
        range: Pair,
    },
    /// Compare fast paths with brute-force oracles
    OracleDiff {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 1)]
        ell: u32,
        #[arg(long, value_enum, default_value_t = OracleWhich::All)]
        which: OracleWhich,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ctx { .. } => "ctx",
            Command::Spectrum { .. } => "spectrum",
            Command::Moments { .. } => "moments",
            Command::Counts { .. } => "counts",
            Command::Repr { .. } => "repr",
            Command::Wilson { .. } => "wilson",
            Command::Spacings { .. } => "spacings",
            Command::Primroot { .. } => "primroot",
            Command::PowerClasses { .. } => "power-classes",
            Command::ScanDistinct { .. } => "scan-distinct",
            Command::Bounds { .. } => "bounds",
            Command::GuyF11 { .. } => "guy-f11",
            Command::OracleDiff { .. } => "oracle-diff",
        }
    }
}
