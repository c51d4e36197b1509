use std::path::Path;
use std::process::{Command, Output};

use quantgs::arrowlab::GswfIia;
use quantgs::scfzoo::ScfTable;
use serde_json::Value;

fn quantgs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quantgs")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(out)).unwrap()
}

fn find<'a>(records: &'a Value, metric: &str, indices: &[u64]) -> &'a Value {
    records
        .as_array()
        .unwrap()
        .iter()
        .find(|r| {
            r["metric"] == metric
                && r["indices"].as_array().unwrap().iter().map(|i| i.as_u64().unwrap()).eq(indices.iter().copied())
        })
        .unwrap_or_else(|| panic!("no {metric} {indices:?}"))
}

fn ratio(r: &Value) -> (String, String) {
    (r["num"].as_str().unwrap().to_string(), r["den"].as_str().unwrap().to_string())
}

fn pair(num: &str, den: &str) -> (String, String) {
    (num.to_string(), den.to_string())
}

#[test]
fn plurality_metrics() {
    let recs = json(&quantgs(&["metrics", "--scf", "plurality", "--n", "3", "--exact"]));
    assert_eq!(ratio(find(&recs, "manipulation_power", &[1])), pair("2", "81"));
    assert_eq!(ratio(find(&recs, "mab", &[0, 1])), pair("4", "81"));
    assert_eq!(ratio(find(&recs, "nab", &[0, 2])), pair("1", "9"));
    assert_eq!(ratio(find(&recs, "mab", &[1, 2])), pair("0", "1"));
    assert_eq!(ratio(find(&recs, "dist_to_dictatorship", &[0])), pair("10", "27"));
}

#[test]
fn sampled_metrics_and_csv() {
    let args = ["metrics", "--scf", "borda", "--n", "4", "--samples", "20000", "--seed", "3", "--format", "csv"];
    let out = quantgs(&args);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(quantgs::harness::CSV_HEADER));
    let row = lines.find(|l| l.starts_with("manipulation_power,0,")).unwrap();
    assert!(row.contains(",sampled,,,"), "{row}");
    assert!(row.ends_with(",20000,3"), "{row}");
    assert_eq!(stdout(&quantgs(&args)), text);
}

#[test]
fn worker_count_does_not_change_reports() {
    let run = |w: &str| {
        stdout(&quantgs(&[
            "--workers", w, "metrics", "--scf", "borda", "--n", "5", "--samples", "50000", "--seed", "11",
        ]))
    };
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("8"));
}

#[test]
fn gswf_metrics() {
    let recs = json(&quantgs(&["metrics", "--g", "majority", "--n", "3", "--m", "3", "--exact"]));
    assert_eq!(ratio(find(&recs, "nt", &[])), pair("1", "18"));
    assert_eq!(ratio(find(&recs, "ngcw", &[])), pair("1", "18"));
}

#[test]
fn gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.scf3"), dir.path().join("b.scf3"));
    for p in [&a, &b] {
        let out = quantgs(&["gen", "--scf", "random", "--seed", "5", "--n", "3", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ScfTable::read(&a).unwrap().outputs().len(), 216);

    let g = dir.path().join("g.gswf");
    let out = quantgs(&["gen", "--g", "random", "--seed", "5", "--n", "3", "--m", "4", "--out", g.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(GswfIia::read(&g).unwrap(), GswfIia::random(4, 3, 5).unwrap());
}

#[test]
fn dictatorship_table_round_trips_through_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.scf3");
    let p = path.to_str().unwrap();
    assert!(quantgs(&["gen", "--scf", "dictator(1)", "--n", "2", "--out", p]).status.success());
    let t = ScfTable::read(&path).unwrap();
    assert_eq!(t.outputs().len(), 36);
    let recs = json(&quantgs(&["metrics", "--scf", p, "--n", "2", "--exact"]));
    assert_eq!(ratio(find(&recs, "dist_to_dictatorship", &[1])), pair("0", "1"));
    assert_eq!(ratio(find(&recs, "manipulation_power_total", &[])), pair("0", "1"));
}

#[test]
fn reduce_writes_the_gswf() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.gswf");
    let out = quantgs(&["reduce", "--scf", "plurality", "--n", "3", "--gswf-out", path.to_str().unwrap()]);
    let recs = json(&out);
    assert_eq!(ratio(find(&recs, "nt", &[])), pair("1", "18"));
    assert_eq!(ratio(find(&recs, "chain_holds", &[])), pair("1", "1"));
    let g = GswfIia::read(&path).unwrap();
    let again = quantgs::harness::GswfSpec::parse("scf:plurality", 3, 3).unwrap().build().unwrap();
    assert_eq!(g, again);
}

#[test]
fn verify_exit_codes() {
    let ok = quantgs(&["verify", "--suite", "cauchy", "--trials", "20"]);
    assert_eq!(ok.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert_eq!(r["passed"], r["instances"]);

    // with 200 samples this seed lands outside three standard errors
    let replay = r#"{"kind":"odd","g":{"type":"majority","n":3},"samples":200,"seed":12}"#;
    let bad = quantgs(&["verify", "--suite", "arrow-identity", "--replay", replay]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains("--replay"), "{err}");

    assert_eq!(quantgs(&["verify", "--suite", "nope"]).status.code(), Some(2));
    let over = quantgs(&["metrics", "--scf", "plurality", "--n", "12", "--exact"]);
    assert_eq!(over.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&over.stderr).contains("--samples"));
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = quantgs(&["metrics", "--g", "/nonexistent/x.gswf", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!Path::new("/nonexistent/x.gswf").exists());
}
