//! Flag definitions and the small parsers for seed ranges and budgets.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::CliError;

#[derive(Parser)]
#[command(
    name = "macopt",
    version,
    about = "Derivative-free global optimization: MAC optimizer, baselines, and a benchmark harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// List the 18-function benchmark catalog
    List(ListArgs),
    /// Run one optimizer on one function
    Run(RunArgs),
    /// Run a (functions x methods x seeds) benchmark matrix
    Bench(BenchArgs),
    /// Render per-function convergence plots from bench results
    Plot(PlotArgs),
}

#[derive(Args)]
pub struct ListArgs {
    /// Emit the catalog as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct RunArgs {
    /// Function id (f1..f18) or name
    #[arg(long = "fn")]
    pub function: String,
    /// Optimizer: mac, nelder-mead, pattern-search, simulated-annealing, pso
    #[arg(long, default_value = "mac")]
    pub method: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluation budget; accepts k/m suffixes (e.g. 10k)
    #[arg(long, default_value = "10k")]
    pub budget: String,
    /// MAC stopping tolerance on the mean displacement
    #[arg(long)]
    pub delta: Option<f64>,
    /// MAC initial weight sharpness
    #[arg(long)]
    pub gamma0: Option<f64>,
    /// MAC per-iteration sharpness growth factor
    #[arg(long = "gamma-factor")]
    pub gamma_factor: Option<f64>,
    /// MAC batch growth factor N (iteration n adds n*N points)
    #[arg(long = "batch-growth")]
    pub batch_growth: Option<usize>,
    /// MAC ambient distribution: normal, ball, or truncated:<T>
    #[arg(long)]
    pub ambient: Option<String>,
    /// Write the per-iteration trace as JSON
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Comma-separated function ids, or "all"
    #[arg(long = "fns", alias = "functions")]
    pub functions: Option<String>,
    /// Comma-separated methods, or "all"
    #[arg(long)]
    pub methods: Option<String>,
    /// Seeds: comma list (1,2,3) or inclusive range (1..10)
    #[arg(long)]
    pub seeds: Option<String>,
    /// Evaluation budget per trial; accepts k/m suffixes
    #[arg(long)]
    pub budget: Option<String>,
    /// Output directory for summary.csv and trials.json
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file whose keys mirror these flags; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker pool size (fallback: MAC_BENCH_JOBS environment variable)
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Results JSON produced by `bench`
    #[arg(long, default_value = "results/trials.json")]
    pub results: PathBuf,
    /// Output directory for the SVG files (default: next to the results)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Only plot these comma-separated function ids
    #[arg(long = "functions", alias = "fns")]
    pub functions: Option<String>,
}

/// Parses budgets like `5000`, `10k`, `2m`.
pub fn parse_budget(s: &str) -> Result<usize, CliError> {
    let raw = s.trim().to_ascii_lowercase();
    let (digits, multiplier) = match raw.strip_suffix(['k', 'm']) {
        Some(head) if raw.ends_with('k') => (head, 1_000),
        Some(head) => (head, 1_000_000),
        None => (raw.as_str(), 1),
    };
    digits
        .parse::<usize>()
        .map(|v| v * multiplier)
        .map_err(|_| CliError::usage(format!("invalid budget '{s}' (examples: 5000, 10k, 1m)")))
}

/// Parses seed lists like `7`, `1,2,5`, or the inclusive range `1..10`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::usage(format!("invalid seeds '{s}' (examples: 7 | 1,2,5 | 1..10)"));
    let trimmed = s.trim();
    if let Some((a, b)) = trimmed.split_once("..") {
        let start: u64 = a.trim().parse().map_err(|_| bad())?;
        let end: u64 = b.trim().parse().map_err(|_| bad())?;
        if end < start {
            return Err(bad());
        }
        return Ok((start..=end).collect());
    }
    trimmed
        .split(',')
        .map(|part| part.trim().parse::<u64>().map_err(|_| bad()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets_with_suffixes() {
        assert_eq!(parse_budget("5000").unwrap(), 5000);
        assert_eq!(parse_budget("10k").unwrap(), 10_000);
        assert_eq!(parse_budget("2M").unwrap(), 2_000_000);
        assert!(parse_budget("ten").is_err());
    }

    #[test]
    fn seed_lists_and_ranges() {
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert_eq!(parse_seeds("1,2,5").unwrap(), vec![1, 2, 5]);
        assert_eq!(parse_seeds("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert!(parse_seeds("4..1").is_err());
        assert!(parse_seeds("a..b").is_err());
    }
}
