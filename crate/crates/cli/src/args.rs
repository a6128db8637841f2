//! Command-line grammar.

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{
    ArgAction, ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum,
};
use hermite_core::space::Frequency;
use hermite_core::DEFAULT_TOL;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "hermite",
    version,
    about = "Cancellation operators and Hermite subdivision schemes"
)]
pub struct Cli {
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Tolerance for checks and divisions.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the cancellation operator of an exponential-polynomial space.
    Annihilator {
        /// Polynomial degree (−1 for no polynomial part).
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        p: i32,
        #[command(flatten)]
        freqs: FreqArgs,
        /// Level n: frequencies are scaled by 2^{-n}.
        #[arg(long, default_value_t = 0)]
        level: u32,
        /// Write the mask as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the spectral or annihilation condition over a range of levels.
    Check {
        #[command(flatten)]
        source: MaskSource,
        #[command(flatten)]
        freqs: FreqArgs,
        /// Polynomial degree of the space (inferred from the mask size if omitted).
        #[arg(long, allow_negative_numbers = true)]
        p: Option<i32>,
        /// Levels as `n` or `a:b`.
        #[arg(long, default_value = "0:5")]
        levels: LevelRange,
        /// Which condition to check.
        #[arg(long, value_enum, default_value_t = CheckMode::Spectral)]
        mode: CheckMode,
        /// Half-width N of the comparison window [−N, N].
        #[arg(long)]
        half_width: Option<usize>,
    },
    /// Factor a mask through the cancellation operator.
    Factorize {
        #[command(flatten)]
        source: MaskSource,
        #[command(flatten)]
        freqs: FreqArgs,
        /// Polynomial degree of the space (inferred from the mask size if omitted).
        #[arg(long, allow_negative_numbers = true)]
        p: Option<i32>,
        /// Level n of the factorization.
        #[arg(long, default_value_t = 0)]
        level: u32,
        /// `scheme` divides H^{[n+1]}A by H^{[n]}(z^2); `convolution` and
        /// `subdivision` divide the mask itself.
        #[arg(long, value_enum, default_value_t = FactorMode::Scheme)]
        mode: FactorMode,
        /// Exponent range `lo:hi` searched for the factor.
        #[arg(long, allow_hyphen_values = true)]
        support: Option<Support>,
        /// Divide without checking the precondition first.
        #[arg(long)]
        skip_precheck: bool,
        /// Write the factor as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate a scheme and write the levels as CSV (and SVG).
    Run {
        #[command(flatten)]
        source: MaskSource,
        #[command(flatten)]
        freqs: FreqArgs,
        /// Number of subdivision steps.
        #[arg(long, default_value_t = 12)]
        iterations: u32,
        /// `delta`, `exp+`, `exp-` or `poly:K`.
        #[arg(long, default_value = "delta")]
        init: Init,
        /// Column of the delta sequence used for `--init delta`.
        #[arg(long, default_value_t = 0)]
        column: usize,
        /// Half-width of the sampled window for sample inits.
        #[arg(long, default_value_t = 8)]
        window: i64,
        /// CSV destination (stdout if omitted).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// SVG plot of the last level, component 0.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Compare det A*(z) of the example schemes with its factored form.
    Det {
        /// Highest derivative order of the example scheme (2 or 3).
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[command(flatten)]
        freqs: FreqArgs,
        /// Levels as `n` or `a:b`.
        #[arg(long, default_value = "0:4")]
        levels: LevelRange,
        /// Use this many seeded random sample points instead of the fixed twelve.
        #[arg(long)]
        random: Option<usize>,
    },
}

/// Either a named scheme or a mask file.
#[derive(Debug, Clone, Args)]
pub struct MaskSource {
    #[arg(long, value_enum, conflicts_with = "mask")]
    pub scheme: Option<SchemeName>,
    /// JSON mask file.
    #[arg(long)]
    pub mask: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FreqArgs {
    /// Frequency magnitude; repeatable. A trailing `i` makes it imaginary.
    #[arg(long = "lambda", value_name = "MAG", allow_hyphen_values = true)]
    pub lambda: Vec<String>,
    /// Marks the preceding --lambda as imaginary.
    #[arg(long, action = ArgAction::Append, num_args = 0, default_missing_value = "true")]
    pub imag: Vec<bool>,
    /// Which lambdas carry `--imag`, resolved from argument positions.
    #[arg(skip)]
    pub imag_at: Vec<bool>,
}

impl FreqArgs {
    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn frequencies(&self) -> CliResult<Vec<Frequency>> {
        self.lambda
            .iter()
            .enumerate()
            .map(|(k, raw)| {
                let (mag, suffix) = match raw.strip_suffix('i') {
                    Some(m) => (m, true),
                    None => (raw.as_str(), false),
                };
                let mag: f64 = mag
                    .parse()
                    .map_err(|_| CliError::Usage(format!("invalid --lambda value `{raw}`")))?;
                let imag = suffix || self.imag_at.get(k).copied().unwrap_or(false);
                let f = if imag {
                    Frequency::imaginary(mag)
                } else {
                    Frequency::real(mag)
                };
                Ok(f?)
            })
            .collect()
    }

    /// Binds each `--imag` to the nearest `--lambda` before it.
    fn resolve(&mut self, m: &ArgMatches) -> CliResult<()> {
        let lam: Vec<usize> = m
            .indices_of("lambda")
            .map(|i| i.collect())
            .unwrap_or_default();
        self.imag_at = vec![false; lam.len()];
        for at in m.indices_of("imag").into_iter().flatten() {
            match lam.iter().rposition(|&l| l < at) {
                Some(k) => self.imag_at[k] = true,
                None => return Err(CliError::Usage("--imag must follow a --lambda".into())),
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeName {
    /// The d = 2 exponential-reproducing scheme.
    Example2,
    /// The d = 3 exponential-reproducing scheme.
    Example3,
    /// Its polynomial limit, d = 2.
    Limit2,
    /// Its polynomial limit, d = 3.
    Limit3,
    /// The factor scheme of example2.
    B2,
    /// The factor scheme of example3.
    B3,
}

impl SchemeName {
    pub fn d(self) -> usize {
        match self {
            SchemeName::Example2 | SchemeName::Limit2 | SchemeName::B2 => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckMode {
    Spectral,
    Annihilation,
    /// `S_C` maps level-n samples to zero.
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FactorMode {
    Scheme,
    Convolution,
    Subdivision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelRange {
    pub first: u32,
    pub last: u32,
}

impl LevelRange {
    pub fn iter(self) -> impl Iterator<Item = u32> {
        self.first..=self.last
    }
}

impl FromStr for LevelRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| format!("bad level `{t}`"))
        };
        let (first, last) = match s.split_once(':') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => (parse(s)?, parse(s)?),
        };
        if first > last {
            return Err(format!("empty level range {s}"));
        }
        Ok(Self { first, last })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Support(pub i64, pub i64);

impl FromStr for Support {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
        let lo = a
            .trim()
            .parse()
            .map_err(|_| format!("bad exponent `{a}`"))?;
        let hi = b
            .trim()
            .parse()
            .map_err(|_| format!("bad exponent `{b}`"))?;
        if lo > hi {
            return Err(format!("empty support {s}"));
        }
        Ok(Self(lo, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Delta,
    ExpPlus,
    ExpMinus,
    Poly(u32),
}

impl FromStr for Init {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "delta" => Ok(Init::Delta),
            "exp+" => Ok(Init::ExpPlus),
            "exp-" => Ok(Init::ExpMinus),
            _ => s
                .strip_prefix("poly:")
                .and_then(|k| k.parse().ok())
                .map(Init::Poly)
                .ok_or_else(|| format!("unknown init `{s}` (delta, exp+, exp-, poly:K)")),
        }
    }
}

/// Parses arguments, resolving per-frequency `--imag` flags.
pub fn parse_from<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = Cli::command().try_get_matches_from(args)?;
    let mut cli = Cli::from_arg_matches(&matches)?;
    if let Some((_, sub)) = matches.subcommand() {
        let freqs = match &mut cli.command {
            Command::Annihilator { freqs, .. }
            | Command::Check { freqs, .. }
            | Command::Factorize { freqs, .. }
            | Command::Run { freqs, .. }
            | Command::Det { freqs, .. } => freqs,
        };
        if let Err(e) = freqs.resolve(sub) {
            return Err(
                Cli::command().error(clap::error::ErrorKind::ArgumentConflict, e.to_string())
            );
        }
    }
    Ok(cli)
}
