use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use colf::{CodecKind, Policy, Strategy};
use colf_bench::{ReportFormat, Suite};

#[derive(Debug, Parser)]
#[command(name = "colf", version, about = "Write, inspect, query and benchmark COLF files")]
pub struct Cli {
    /// `key = value` settings applied under explicit flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a CSV file to COLF and print a footer summary.
    Write(WriteArgs),
    /// Print a file's schema, batches and chunk metadata from the footer alone.
    Inspect(InspectArgs),
    /// Filter and project a file; the result goes to stdout as CSV.
    Query(QueryArgs),
    /// Run a benchmark suite and write its report.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct WriteArgs {
    #[arg(long, value_name = "PATH")]
    pub csv: PathBuf,
    /// JSON list of `{"name", "type", "nullable"}` objects.
    #[arg(long, value_name = "PATH")]
    pub schema: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// parquet-like, orc-like, arrow-like or arrow-like-dict.
    #[arg(long)]
    pub policy: Option<Policy>,
    /// store, lz4 or deflate.
    #[arg(long)]
    pub codec: Option<CodecKind>,
    #[arg(long, value_name = "N")]
    pub batch_rows: Option<usize>,
    /// Print the summary as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    pub path: PathBuf,
    /// Comma-separated columns, or `*` for all.
    #[arg(long, value_name = "COLS")]
    pub select: String,
    /// `col OP literal[, ...]`, all of which must hold. OP is one of
    /// = > < >= <= or `BETWEEN lo AND hi`; strings are single-quoted.
    #[arg(long = "where", value_name = "FILTER", default_value = "")]
    pub filter: String,
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// Print decode counters and the load/compute split to stderr.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// compression, selectivity, subexpr or vectors.
    #[arg(long)]
    pub suite: Suite,
    /// Defaults to $COLF_SEED, then the config file, then 42.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// json or csv; defaults to the extension of --out, else json.
    #[arg(long)]
    pub format: Option<ReportFormat>,
    /// One measured run, no warm-up.
    #[arg(long)]
    pub quick: bool,
    /// Override a bench setting, e.g. `--set sales_rows=100000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}
