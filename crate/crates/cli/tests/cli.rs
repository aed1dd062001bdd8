use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use colf_bench::gen::{demographics_spec, sales_spec};
use colf_bench::suites::subexpr::{queries, TableKind};
use colf_bench::{gen_table, parse_report, reference_query, render_csv, write_csv};
use tempfile::TempDir;

fn colf(args: &[&str]) -> Output {
    colf_env(args, &[])
}

fn colf_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_colf"));
    c.args(args).env_remove("COLF_SEED");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const SCHEMA: &str = r#"[
  {"name": "id", "type": "int64", "nullable": false},
  {"name": "city", "type": "utf8"},
  {"name": "score", "type": "float64"}
]"#;

const ROWS: &str = "id,city,score\n1,Oslo,2.5\n2,Rome,\n3,Oslo,7\n4,,1\n5,Lima,3.25\n";

/// A small file written through the CLI.
fn small(dir: &TempDir) -> PathBuf {
    let schema = dir.path().join("s.json");
    let csv = dir.path().join("t.csv");
    let out = dir.path().join("t.colf");
    std::fs::write(&schema, SCHEMA).unwrap();
    std::fs::write(&csv, ROWS).unwrap();
    let o = colf(&["write", "--csv", p(&csv), "--schema", p(&schema), "--out", p(&out), "--codec", "lz4", "--batch-rows", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

#[test]
fn write_prints_a_summary_of_every_column() {
    let dir = TempDir::new().unwrap();
    let schema = dir.path().join("s.json");
    let csv = dir.path().join("t.csv");
    std::fs::write(&schema, SCHEMA).unwrap();
    std::fs::write(&csv, ROWS).unwrap();
    let out = dir.path().join("t.colf");
    let o = colf(&["write", "--csv", p(&csv), "--schema", p(&schema), "--out", p(&out), "--json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"], 5);
    let names: Vec<&str> = v["columns"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["id", "city", "score"]);
    assert_eq!(v["columns"][1]["null_count"], 1);
    assert!(v["columns"][0]["encodings"].as_array().is_some_and(|e| !e.is_empty()));
}

#[test]
fn inspect_lists_every_column_and_batch() {
    let dir = TempDir::new().unwrap();
    let f = small(&dir);
    let o = colf(&["inspect", p(&f)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for name in ["id", "city", "score"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from\n{text}");
    }
    assert_eq!(text.lines().filter(|l| l.starts_with("batch ")).count(), 3);
    assert!(text.contains("[Lima, Rome]"), "{text}");

    let o = colf(&["inspect", p(&f), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["batches"], 3);
    assert_eq!(v["codec"], "lz4");
    assert_eq!(v["footer"]["batches"].as_array().unwrap().len(), 3);
}

#[test]
fn inspect_rejects_other_files() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("x.csv");
    std::fs::write(&f, ROWS).unwrap();
    let o = colf(&["inspect", p(&f)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not a COLF file"));
    assert!(o.stdout.is_empty());
    assert_eq!(code(&colf(&["inspect", p(&dir.path().join("missing"))])), 2);
}

#[test]
fn write_errors() {
    let dir = TempDir::new().unwrap();
    let schema = dir.path().join("s.json");
    std::fs::write(&schema, SCHEMA).unwrap();
    let out = dir.path().join("o.colf");

    let o = colf(&["write", "--csv", p(&dir.path().join("missing.csv")), "--schema", p(&schema), "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("missing.csv"));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "id,city,score\n1,Oslo,2\n2,Rome,lots\n").unwrap();
    let o = colf(&["write", "--csv", p(&bad), "--schema", p(&schema), "--out", p(&out)]);
    assert_eq!(code(&o), 1);
    let msg = stderr(&o);
    assert!(msg.contains("row 2") && msg.contains("column 3"), "{msg}");
    assert!(!out.exists(), "no partial output on failure");

    std::fs::write(&bad, "id,town,score\n").unwrap();
    let o = colf(&["write", "--csv", p(&bad), "--schema", p(&schema), "--out", p(&out)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("column 2"), "{}", stderr(&o));

    let o = colf(&["write", "--csv", p(&bad), "--schema", p(&schema), "--out", p(&out), "--policy", "sqlite-like"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&colf(&["write", "--csv", p(&bad)])), 2);
}

#[test]
fn query_writes_csv_to_stdout_only() {
    let dir = TempDir::new().unwrap();
    let f = small(&dir);
    for strat in colf::Strategy::names() {
        let o = colf(&["query", p(&f), "--select", "id,score", "--where", "city = 'Oslo', score > 3", "--strategy", strat, "--stats"]);
        assert_eq!(code(&o), 0, "{strat}: {}", stderr(&o));
        assert_eq!(stdout(&o), "id,score\n3,7\n", "{strat}");
        let err = stderr(&o);
        assert!(err.contains("values_decoded") && err.contains("total_seconds"), "{err}");
    }
    let o = colf(&["query", p(&f), "--select", "*", "--where", "id between 2 and 4"]);
    assert_eq!(stdout(&o), "id,city,score\n2,Rome,\n3,Oslo,7\n4,,1\n");
    assert!(o.stderr.is_empty());
}

#[test]
fn empty_result_is_header_only() {
    let dir = TempDir::new().unwrap();
    let f = small(&dir);
    let o = colf(&["query", p(&f), "--select", "city", "--where", "id > 100"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "city\n");
}

#[test]
fn query_usage_errors() {
    let dir = TempDir::new().unwrap();
    let f = small(&dir);
    let o = colf(&["query", p(&f), "--select", "id", "--strategy", "fastest"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    for name in colf::Strategy::names() {
        assert!(err.contains(name), "{name} not listed in {err}");
    }
    assert_eq!(code(&colf(&["query", p(&f), "--select", "nope"])), 2);
    assert_eq!(code(&colf(&["query", p(&f), "--select", "id", "--where", "id ~ 3"])), 2);
    assert_eq!(code(&colf(&["query", p(&f), "--select", "id", "--where", "city = Oslo"])), 2);
    assert_eq!(code(&colf(&["query", p(&f)])), 2);
}

#[test]
fn corrupt_file_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let f = small(&dir);
    let mut bytes = std::fs::read(&f).unwrap();
    // a data page byte just past the file header
    bytes[8] ^= 0xff;
    std::fs::write(&f, &bytes).unwrap();
    let o = colf(&["query", p(&f), "--select", "*"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

const WHERE: [(&str, &str, &str); 5] = [
    ("Q1", "cs_ship_date_sk,cs_bill_customer_sk", "cs_sold_time_sk = 12032, cs_sold_date_sk = 2452653"),
    ("Q2", "cd_demo_sk,cd_dep_college_count", "cd_gender = 'F', cd_education_status = 'Secondary'"),
    ("Q3", "cd_demo_sk", "cd_gender = 'M', cd_marital_status = 'D', cd_education_status = 'College'"),
    ("Q4", "cs_ext_sales_price,cs_sold_date_sk,cs_item_sk", "cs_wholesale_cost > 80, cs_ext_tax < 500"),
    (
        "Q5",
        "cs_ext_sales_price,cs_sold_date_sk,cs_item_sk,cs_net_paid_inc_tax,cs_net_paid_inc_ship_tax,cs_net_profit",
        "cs_wholesale_cost > 80",
    ),
];

#[test]
fn benchmark_queries_match_the_reference() {
    let dir = TempDir::new().unwrap();
    let mut files = Vec::new();
    for (kind, t) in [
        (TableKind::Sales, gen_table(&sales_spec(60_000, 5)).unwrap()),
        (TableKind::Demographics, gen_table(&demographics_spec(30_000, 5)).unwrap()),
    ] {
        let base = dir.path().join(format!("{kind:?}"));
        let (csv, schema, out) = (base.with_extension("csv"), base.with_extension("json"), base.with_extension("colf"));
        write_csv(&t, std::fs::File::create(&csv).unwrap()).unwrap();
        std::fs::write(&schema, serde_json::to_string(&t.schema).unwrap()).unwrap();
        let o = colf(&["write", "--csv", p(&csv), "--schema", p(&schema), "--out", p(&out), "--codec", "lz4"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        files.push((kind, t, out));
    }
    for (q, (name, select, filter)) in queries().iter().zip(WHERE) {
        assert_eq!(q.name, name);
        let (_, t, path) = files.iter().find(|(k, _, _)| *k == q.table).unwrap();
        let want = reference_query(t, &q.query).unwrap();
        assert!(want.row_count > 0, "{name} selects nothing at this scale");
        for strat in ["plain-full", "lazy-im-direct", "chunk-skip"] {
            let o = colf(&["query", p(path), "--select", select, "--where", filter, "--strategy", strat]);
            assert_eq!(code(&o), 0, "{name} {strat}: {}", stderr(&o));
            assert_eq!(o.stdout, render_csv(&want), "{name} {strat}");
        }
    }
}

#[test]
fn bench_writes_a_valid_report() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bench.conf");
    std::fs::write(&cfg, "# tiny\nvector_count = 200\nvector_dim = 16\nvector_queries = 20\nseed = 3\n").unwrap();
    let out = dir.path().join("r.json");
    let o = colf_env(&["bench", "--suite", "vectors", "--quick", "--config", p(&cfg), "--out", p(&out)], &[("COLF_SEED", "77")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let r = parse_report(&std::fs::read(&out).unwrap()).unwrap();
    assert!(r.passed);
    assert_eq!((r.suite.as_str(), r.seed), ("vectors", 77));
    assert_eq!(r.config["vector_dim"], "16");

    // explicit flags beat the environment and the file; no --out means stdout
    let o = colf_env(
        &["bench", "--suite", "vectors", "--quick", "--config", p(&cfg), "--seed", "5", "--set", "vector_count=100", "--format", "csv"],
        &[("COLF_SEED", "77")],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = stdout(&o);
    assert!(csv.starts_with("suite,case"), "{csv}");
    assert!(csv.lines().nth(1).unwrap().starts_with("vectors,"));

    let o = colf(&["bench", "--suite", "vectors", "--quick", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(parse_report(&std::fs::read(&out).unwrap()).unwrap().seed, 3, "{}", stderr(&o));
}

#[test]
fn bench_usage_errors() {
    assert_eq!(code(&colf(&["bench", "--suite", "speed"])), 2);
    assert_eq!(code(&colf(&["bench", "--suite", "vectors", "--set", "colour=red"])), 2);
    assert_eq!(code(&colf(&["bench", "--suite", "vectors", "--set", "runs"])), 2);
    assert_eq!(code(&colf_env(&["bench", "--suite", "vectors"], &[("COLF_SEED", "many")])), 2);
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "speed = max\n").unwrap();
    assert_eq!(code(&colf(&["bench", "--suite", "vectors", "--config", p(&cfg)])), 2);
    assert_eq!(code(&colf(&["frobnicate"])), 2);
}

#[test]
fn config_file_supplies_write_defaults() {
    let dir = TempDir::new().unwrap();
    let schema = dir.path().join("s.json");
    let csv = dir.path().join("t.csv");
    std::fs::write(&schema, SCHEMA).unwrap();
    std::fs::write(&csv, ROWS).unwrap();
    let cfg = dir.path().join("w.conf");
    std::fs::write(&cfg, "codec = deflate\nbatch_rows = 4\n").unwrap();
    let out = dir.path().join("t.colf");
    let o = colf(&["write", "--csv", p(&csv), "--schema", p(&schema), "--out", p(&out), "--json", "--config", p(&cfg), "--batch-rows", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["codec"], "deflate");
    assert_eq!(v["batches"], 5);
}
