use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Uniformly random binary trees, with exhaustive and statistical checks.
#[derive(Debug, Parser)]
#[command(name = "rbt", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one random tree.
    Gen(GenArgs),
    /// List every shape with n internal nodes.
    Enumerate(EnumerateArgs),
    /// Exhaustively check the rotation construction for n = 1..max-n.
    Validate(ValidateArgs),
    /// Sample tree depths and compare the mean with sqrt(2 pi size).
    StatsDepth(StatsDepthArgs),
    /// Chi-square test of shape uniformity.
    StatsUniform(StatsUniformArgs),
    /// Time generation across sizes and fit the log-log slope.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct PrimArgs {
    /// Primitive config file (`name arity` per line).
    #[arg(long, value_name = "FILE", conflicts_with_all = ["terminals", "functions"])]
    pub prims: Option<PathBuf>,
    /// Comma-separated terminal names.
    #[arg(long, value_delimiter = ',', requires = "functions")]
    pub terminals: Option<Vec<String>>,
    /// Comma-separated binary function names.
    #[arg(long, value_delimiter = ',', requires = "terminals")]
    pub functions: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Sexpr,
    Opcodes,
    Dot,
    Summary,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Total node count (odd). Accepts k/M/G suffixes and a `+N` offset, e.g. 1M+1.
    #[arg(long, value_parser = parse_count, required_unless_present = "internal", conflicts_with = "internal")]
    pub size: Option<u64>,
    /// Internal (function) node count; size = 2n + 1.
    #[arg(long, value_parser = parse_count)]
    pub internal: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = parse_seed)]
    pub seed: u64,
    #[command(flatten)]
    pub prims: PrimArgs,
    #[arg(long, value_enum, default_value_t = Format::Sexpr)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Largest tree rendered as dot.
    #[arg(long, default_value_t = randtree::tree::DEFAULT_DOT_LIMIT)]
    pub dot_limit: u64,
    /// Label and measure depth in one pass.
    #[arg(long)]
    pub fuse: bool,
    /// Skip the well-formedness check.
    #[arg(long)]
    pub no_check: bool,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: u64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 6)]
    pub max_n: u64,
}

#[derive(Debug, Args)]
pub struct StatsDepthArgs {
    #[arg(long, value_parser = parse_count)]
    pub size: u64,
    #[arg(long, value_parser = parse_count, default_value = "2000")]
    pub trials: u64,
    #[arg(long, default_value_t = 1, value_parser = parse_seed)]
    pub seed: u64,
    /// Per-trial rows (trial,size,depth).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Fail (exit 2) when the relative error exceeds this.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct StatsUniformArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_parser = parse_count)]
    pub trials: u64,
    #[arg(long, default_value_t = 1, value_parser = parse_seed)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.001)]
    pub alpha: f64,
    /// Repeat with this many base seeds derived from --seed.
    #[arg(long)]
    pub sweep: Option<u64>,
    /// Use the biased control sampler (no rotation).
    #[arg(long)]
    pub control: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated sizes, e.g. 100k+1,1M+1,10M+1.
    #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
    pub sizes: Vec<u64>,
    #[arg(long, default_value_t = 3)]
    pub reps: u32,
    #[arg(long, default_value_t = 1, value_parser = parse_seed)]
    pub seed: u64,
    #[command(flatten)]
    pub prims: PrimArgs,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Refuse sizes above this.
    #[arg(long, value_parser = parse_count, default_value_t = randtree::bench::DEFAULT_MAX_SIZE)]
    pub max_size: u64,
    /// Fail (exit 2) when the slope falls outside [0.85, 1.2].
    #[arg(long)]
    pub check_slope: bool,
}

/// Parses `123`, `100k`, `1M`, `1G`, optionally followed by `+N`.
pub fn parse_count(text: &str) -> Result<u64, String> {
    let text = text.trim();
    let (base, offset) = match text.split_once('+') {
        Some((b, o)) => (b, Some(o)),
        None => (text, None),
    };
    let (digits, mult) = match base.chars().last() {
        Some('k' | 'K') => (&base[..base.len() - 1], 1_000u64),
        Some('M' | 'm') => (&base[..base.len() - 1], 1_000_000),
        Some('G' | 'g') => (&base[..base.len() - 1], 1_000_000_000),
        _ => (base, 1),
    };
    let bad = || format!("invalid count `{text}`");
    let value = digits
        .parse::<u64>()
        .map_err(|_| bad())?
        .checked_mul(mult)
        .ok_or_else(bad)?;
    match offset {
        Some(o) => value
            .checked_add(o.parse::<u64>().map_err(|_| bad())?)
            .ok_or_else(bad),
        None => Ok(value),
    }
}

pub fn parse_seed(text: &str) -> Result<u64, String> {
    let seed: u64 = text.parse().map_err(|_| format!("invalid seed `{text}`"))?;
    let max = randtree::prng::MAX_STATE as u64;
    if seed == 0 || seed > max {
        return Err(format!("seed must be in [1, {max}]"));
    }
    Ok(seed)
}
