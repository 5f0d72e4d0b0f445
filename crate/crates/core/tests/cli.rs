use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvtangent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn cusp_certificate_passes() {
    let o = run(&[
        "check-outgoing",
        path(&fixture("cusp.json")),
        path(&fixture("cusp-cert.json")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["verdict"], true);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(&names[..4], ["a", "b", "c", "d"]);
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true && c["anchor"].is_string()));
}

#[test]
fn witness_then_verify_refutes_every_multiple() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.json");
    let o = run(&[
        "witness",
        path(&fixture("cusp-cert.json")),
        "--n",
        "2",
        "--out",
        path(&pair),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&[
        "verify-witness",
        path(&pair),
        path(&fixture("cusp.json")),
        "--m-max",
        "64",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["crux"]["verdict"], true);
    let refutations = v["refutation"]["refutations"].as_array().unwrap();
    assert_eq!(refutations.len(), 64);
    assert!(refutations
        .iter()
        .enumerate()
        .all(|(i, r)| r["m"] == i as u64 + 1 && r["witness"].is_array()));
}

#[test]
fn non_regular_simplex_exits_one() {
    let o = run(&["check-regular", path(&fixture("bad-simplex.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("non-regular: elementary divisor 2"));
    let o = run(&["check-regular", path(&fixture("unit-square.json"))]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn malformed_input_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        "{\n  \"cells\": [\n    { \"vertices\": [[\"0\", \"x/\"]] }\n  ]\n}\n",
    )
    .unwrap();
    let o = run(&["regularize", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    let o = run(&[
        "check-outgoing",
        path(&fixture("cusp.json")),
        path(&dir.path().join("missing.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let (k, q) = (fixture("unit-square.json"), fixture("segment-square.json"));
    let args = ["subdivide", path(&k), path(&q)];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert_eq!(first.stdout, run(&args).stdout);
}

#[test]
fn plot_of_the_cusp() {
    let o = run(&[
        "plot2d",
        path(&fixture("cusp.json")),
        "--cert",
        path(&fixture("cusp-cert.json")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn zmap_evaluation() {
    let o = run(&["eval", path(&fixture("hat.json")), "1/4", "1/2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["value"], serde_json::json!(["1/4"]));
    assert_eq!(v[1]["value"], serde_json::json!(["1/2"]));
}
