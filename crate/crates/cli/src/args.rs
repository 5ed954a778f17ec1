use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "tridyn", version, about = "Experiments on triangular rational dynamical systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Experiment configuration (JSON). Flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write data here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Machine-readable output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutFormat>,
    /// Prime, or inclusive range `lo..hi`.
    #[arg(long = "p", global = true)]
    pub p: Option<IntRange>,
    /// Iterate count, or inclusive range `lo..hi`.
    #[arg(long = "k", global = true)]
    pub k: Option<IntRange>,
    /// Orbit window length
    #[arg(long, global = true)]
    pub ell: Option<usize>,
    /// Frequency fraction in (0, 1]
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true, env = "TRIDYN_SEED")]
    pub seed: Option<u64>,
    /// Worker threads for per-prime work; defaults to the logical core count.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

/// `7` or `5..31`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntRange {
    pub lo: u64,
    pub hi: u64,
}

impl IntRange {
    pub fn iter(&self) -> RangeInclusive<u64> {
        self.lo..=self.hi
    }
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("expected an integer, found {t:?}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b)?),
            None => {
                let v = num(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {lo}..{hi}"));
        }
        Ok(IntRange { lo, hi })
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the dominance conditions and print the leading exponents.
    Validate { system: PathBuf },
    /// Compute the k-th iterate with both engines and compare them.
    Iterate { system: PathBuf },
    /// Degree and height growth sweep for k up to the upper end of --k.
    Growth { system: PathBuf },
    /// Periodic-point tables per prime with cross-prime stabilization.
    Periodic { system: PathBuf },
    /// Orbit of one point modulo one prime.
    Orbit {
        system: PathBuf,
        /// Starting point, comma separated, e.g. `0,1`.
        #[arg(long)]
        point: String,
        #[arg(long)]
        maxlen: Option<usize>,
        /// Use Brent's cycle detection (constant memory, no point dump).
        #[arg(long)]
        brent: bool,
    },
    /// Orbit hit frequencies on a variety against eps * ell.
    Variety {
        system: PathBuf,
        #[arg(long)]
        variety: PathBuf,
        /// Starting points sampled per prime.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Evaluate the explicit bound formulas.
    Bounds(BoundsArgs),
    /// Most frequent common gap of an increasing sequence.
    Gap {
        /// Strictly increasing integers, comma separated.
        #[arg(long)]
        seq: String,
        /// Upper end of the ambient interval `[0, N]`.
        #[arg(long = "N")]
        big_n: u64,
    },
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Take n, d and h from this system.
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub d: Option<u64>,
    /// Height (natural log).
    #[arg(long)]
    pub h: Option<f64>,
    /// Number of polynomials defining the variety.
    #[arg(long, default_value_t = 1)]
    pub s: u64,
    /// Degree of the variety.
    #[arg(long = "D", default_value_t = 1)]
    pub big_d: u64,
    /// Height of the variety (natural log).
    #[arg(long = "H", default_value_t = 0.0)]
    pub big_h: f64,
    /// Uniform bound on orbit-variety intersections.
    #[arg(long = "L", default_value_t = 1)]
    pub l: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn ranges() {
        assert_eq!("7".parse::<IntRange>().unwrap(), IntRange { lo: 7, hi: 7 });
        assert_eq!("5..31".parse::<IntRange>().unwrap(), IntRange { lo: 5, hi: 31 });
        assert!("9..3".parse::<IntRange>().is_err());
        assert!("x".parse::<IntRange>().is_err());
    }

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
