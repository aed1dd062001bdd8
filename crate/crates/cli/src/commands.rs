use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use colf::exec::parse_where;
use colf::{write_table, ColfFile, Policy, Schema, Strategy, SubexpressionQuery, WriteOptions};
use colf_bench::{emit_report, ingest_csv_path, write_csv, BenchConfig, ReportFormat};

use crate::args::{BenchArgs, Cli, Command, InspectArgs, QueryArgs, WriteArgs};
use crate::error::{CliError, Result};
use crate::inspect::{inspect, render_text, summarize};
use crate::settings::{Settings, SEED_ENV};

fn open_input(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))
}

fn json_line(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("summaries serialize") + "\n"
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let settings = Settings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Write(a) => cmd_write(&a, &settings, out),
        Command::Inspect(a) => cmd_inspect(&a, out),
        Command::Query(a) => cmd_query(&a, &settings, out, err),
        Command::Bench(a) => cmd_bench(&a, &settings, out, err),
    }
}

pub fn cmd_write(a: &WriteArgs, settings: &Settings, out: &mut dyn Write) -> Result<()> {
    open_input(&a.csv)?;
    let text = std::fs::read_to_string(&a.schema)
        .map_err(|e| CliError::usage(format!("cannot open {}: {e}", a.schema.display())))?;
    let schema: Schema =
        serde_json::from_str(&text).map_err(|e| CliError::data(format!("schema {}: {e}", a.schema.display())))?;
    let mut opts = WriteOptions::new(settings.pick(a.policy, "policy")?.unwrap_or(Policy::ParquetLike), colf::CodecKind::Store);
    opts.codec = settings.pick(a.codec, "codec")?.unwrap_or(opts.codec);
    if let Some(n) = settings.pick(a.batch_rows, "batch_rows")? {
        if n == 0 {
            return Err(CliError::usage("--batch-rows must be positive"));
        }
        opts = opts.with_batch_rows(n);
    }
    let table = ingest_csv_path(&a.csv, &schema)?;

    let file = File::create(&a.out).map_err(|e| CliError::usage(format!("cannot create {}: {e}", a.out.display())))?;
    let written = write_table(&schema, &table.columns, &opts, BufWriter::new(file));
    let footer = match written {
        Ok(f) => f,
        Err(e) => {
            let _ = std::fs::remove_file(&a.out);
            return Err(e.into());
        }
    };
    let ins = summarize(footer, std::fs::metadata(&a.out)?.len());
    let text = if a.json { json_line(&ins) } else { render_text(&ins, false) };
    out.write_all(text.as_bytes())?;
    Ok(())
}

pub fn cmd_inspect(a: &InspectArgs, out: &mut dyn Write) -> Result<()> {
    let ins = inspect(&open_input(&a.path)?)?;
    let text = if a.json { json_line(&ins) } else { render_text(&ins, true) };
    out.write_all(text.as_bytes())?;
    Ok(())
}

pub fn cmd_query(a: &QueryArgs, settings: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let strategy = settings.pick(a.strategy, "strategy")?.unwrap_or(Strategy::LazyImDirect);
    let file = ColfFile::open(open_input(&a.path)?)?;
    let schema = &file.footer().schema;
    let projection: Vec<&str> = if a.select.trim() == "*" {
        schema.names().collect()
    } else {
        a.select.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
    };
    if projection.is_empty() {
        return Err(CliError::usage("--select needs at least one column"));
    }
    for c in &projection {
        schema.index_of(c)?;
    }
    let q = SubexpressionQuery::new(&projection, parse_where(&a.filter, schema)?);
    let result = colf::eval_subexpression(&q, &file, strategy)?;
    let mut sink = BufWriter::new(out);
    write_csv(&result.table, &mut sink)?;
    sink.flush()?;
    if a.stats {
        let t = &result.timings;
        let secs = |d: Option<std::time::Duration>| d.map_or("-".to_string(), |d| format!("{:.6}", d.as_secs_f64()));
        let f = result.filter.as_ref();
        writeln!(err, "strategy: {strategy}")?;
        writeln!(err, "rows: {}", result.table.row_count)?;
        writeln!(err, "filter counters: {}", serde_json::to_string(&result.filter_counts).expect("counters serialize"))?;
        writeln!(err, "query counters: {}", serde_json::to_string(&result.counts).expect("counters serialize"))?;
        writeln!(err, "skips: {}, fallbacks: {}", f.map_or(0, |f| f.skips.len()), f.map_or(0, |f| f.fallbacks.len()))?;
        writeln!(err, "load_seconds: {}, compute_seconds: {}, total_seconds: {:.6}", secs(t.load), secs(t.compute), t.total.as_secs_f64())?;
    }
    Ok(())
}

pub fn cmd_bench(a: &BenchArgs, settings: &Settings, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut config = BenchConfig::default();
    for (k, v) in settings.bench_entries() {
        config.set(k, v)?;
    }
    config.seed = settings.seed(None, std::env::var(SEED_ENV).ok().as_deref())?;
    if a.quick {
        config.set("quick", "true")?;
    }
    for kv in &a.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        config.set(k.trim(), v.trim())?;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    let format = a.format.unwrap_or(match a.out.as_ref().and_then(|p| p.extension()) {
        Some(e) if e == "csv" => ReportFormat::Csv,
        _ => ReportFormat::Json,
    });

    writeln!(err, "running {} (seed {})", a.suite.name(), config.seed)?;
    let report = a.suite.run(&config)?;
    let bytes = emit_report(&report, format);
    match &a.out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display())))?,
        None => out.write_all(&bytes)?,
    }
    let failed: Vec<_> = report.failed_checks().collect();
    writeln!(err, "{}: {} cases, {} checks, {} failed", report.suite, report.cases.len(), report.checks.len(), failed.len())?;
    for c in &failed {
        writeln!(err, "  FAILED {}: {}", c.name, c.detail)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::data(format!("{} of {} checks failed", failed.len(), report.checks.len())))
    }
}
