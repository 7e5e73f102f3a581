use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use immersion_cli::experiment::ExperimentReport;
use serde_json::{json, Value};

fn immersion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_immersion")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn generate_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = immersion(&["generate", "--family", "random-k", "--n", "14", "--k", "4", "--extra", "5", "--seed", "11", "--out", arg(p)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(read(&a)["kind"], "graph");
}

#[test]
fn missing_family_parameter_is_an_input_error() {
    let o = immersion(&["generate", "--family", "grid"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn certificate_round_trip_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let k7 = dir.path().join("k7.json");
    let cert = dir.path().join("cert.json");
    assert_eq!(code(&immersion(&["generate", "--family", "complete", "--size", "7", "--out", arg(&k7)])), 0);
    assert_eq!(code(&immersion(&["find-c2r", "--in", arg(&k7), "--r", "5", "--out", arg(&cert)])), 0);
    let ok = immersion(&["verify", "--in", arg(&cert), "--host", arg(&k7)]);
    assert_eq!(code(&ok), 0);
    assert!(String::from_utf8_lossy(&ok.stdout).contains("valid"));

    // the same certificate against a host that lacks its edges
    let small = dir.path().join("small.json");
    assert_eq!(code(&immersion(&["generate", "--family", "cycle-multi", "--t", "1", "--r", "7", "--out", arg(&small)])), 0);
    assert_eq!(code(&immersion(&["verify", "--in", arg(&cert), "--host", arg(&small)])), 2);
}

#[test]
fn impossible_target_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert_eq!(code(&immersion(&["generate", "--family", "cycle-multi", "--t", "2", "--r", "5", "--out", arg(&g)])), 0);
    let o = immersion(&["find-ctr", "--in", arg(&g), "--t", "2", "--r", "6"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("stage search"));
}

#[test]
fn experiment_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    let report = dir.path().join("report.json");
    let certs = dir.path().join("certs");
    let body = json!({
        "seed": 3,
        "instance": { "family": "grid", "size": 7 },
        "trials": 3,
        "t": 2,
        "r": 5,
        "outputDir": certs,
        "dot": true
    });
    fs::write(&config, body.to_string()).unwrap();
    let o = immersion(&["run", "--config", arg(&config), "--jobs", "2", "--out", arg(&report)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let env = read(&report);
    assert_eq!(env["kind"], "experiment-report");
    let parsed: ExperimentReport = serde_json::from_value(env["payload"].clone()).unwrap();
    assert_eq!(parsed.found, 3);
    assert!(certs.join("trial-2.json").exists());
    assert!(certs.join("trial-0.dot").exists());
    assert_eq!(code(&immersion(&["verify", "--in", arg(&report)])), 0);

    // a tampered report no longer verifies
    let mut tampered = env.clone();
    tampered["payload"]["found"] = json!(2);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, tampered.to_string()).unwrap();
    assert_eq!(code(&immersion(&["verify", "--in", arg(&bad)])), 2);
}

#[test]
fn ladder_decomposition_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let (g, td) = (dir.path().join("g.json"), dir.path().join("td.json"));
    let o = immersion(&["generate", "--family", "ladder", "--size", "8", "--td", arg(&td), "--out", arg(&g)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&immersion(&["verify", "--in", arg(&td), "--host", arg(&g)])), 0);
    let o = immersion(&["verify-td", "--in", arg(&g), "--td", arg(&td)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn reduce_writes_a_replayable_script() {
    let dir = tempfile::tempdir().unwrap();
    let (g, s, out) = (dir.path().join("g.json"), dir.path().join("s.json"), dir.path().join("r.json"));
    assert_eq!(code(&immersion(&["generate", "--family", "complete", "--size", "6", "--out", arg(&g)])), 0);
    assert_eq!(code(&immersion(&["reduce", "--in", arg(&g), "--k", "2", "--script", arg(&s), "--out", arg(&out)])), 0);
    assert_eq!(code(&immersion(&["verify", "--in", arg(&s), "--host", arg(&g)])), 0);
    let reduced = read(&out);
    assert_eq!(reduced["kind"], "graph");
}

#[test]
fn oracle_cut_matches_connectivity() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert_eq!(code(&immersion(&["generate", "--family", "grid", "--size", "3", "--out", arg(&g)])), 0);
    let brute = immersion(&["oracle", "cut", "--in", arg(&g), "--a", "0", "--b", "8"]);
    assert_eq!(code(&brute), 0);
    let flow = immersion(&["connectivity", "--in", arg(&g), "--u", "0", "--v", "8"]);
    let brute: Value = serde_json::from_slice(&brute.stdout).unwrap();
    let flow: Value = serde_json::from_slice(&flow.stdout).unwrap();
    let cut_edges = brute["payload"]["cutEdges"].as_array().map(Vec::len);
    assert_eq!(cut_edges, Some(flow["payload"]["lambda"].as_u64().unwrap() as usize));
}

#[test]
fn linegraph_transform_gives_a_minor_of_the_line_graph() {
    let dir = tempfile::tempdir().unwrap();
    let (g, cert, minor) = (dir.path().join("g.json"), dir.path().join("c.json"), dir.path().join("m.json"));
    assert_eq!(code(&immersion(&["generate", "--family", "complete", "--size", "7", "--out", arg(&g)])), 0);
    assert_eq!(code(&immersion(&["find-c2r", "--in", arg(&g), "--r", "5", "--out", arg(&cert)])), 0);
    let o = immersion(&["linegraph", "transform", "--in", arg(&g), "--cert", arg(&cert), "--out", arg(&minor)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&minor)["kind"], "minor-certificate");
}

#[test]
fn impossible_experiment_fails_at_search() {
    let dir = tempfile::tempdir().unwrap();
    let (config, report) = (dir.path().join("config.json"), dir.path().join("report.json"));
    let body = json!({ "seed": 1, "instance": { "family": "cycleMulti", "t": 2, "r": 9 }, "t": 2, "r": 10 });
    fs::write(&config, body.to_string()).unwrap();
    let o = immersion(&["run", "--config", arg(&config), "--out", arg(&report)]);
    assert_eq!(code(&o), 1);
    let parsed: ExperimentReport = serde_json::from_value(read(&report)["payload"].clone()).unwrap();
    assert_eq!(parsed.not_found, 1);
    assert_eq!(parsed.trials[0].stage.as_deref(), Some("search"));
    assert_eq!(code(&immersion(&["verify", "--in", arg(&report)])), 0);
}

#[test]
fn trial_certificates_reverify_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let (config, report, host) = (dir.path().join("config.json"), dir.path().join("report.json"), dir.path().join("host.json"));
    let certs = dir.path().join("certs");
    let body = json!({ "seed": 5, "instance": { "family": "grid", "size": 7 }, "t": 2, "r": 5, "outputDir": certs });
    fs::write(&config, body.to_string()).unwrap();
    assert_eq!(code(&immersion(&["run", "--config", arg(&config), "--out", arg(&report)])), 0);
    let parsed: ExperimentReport = serde_json::from_value(read(&report)["payload"].clone()).unwrap();
    let cert = parsed.trials[0].certificate_path.clone().expect("certificate path");
    assert_eq!(code(&immersion(&["generate", "--family", "grid", "--size", "7", "--out", arg(&host)])), 0);
    let o = immersion(&["verify", "--in", arg(&cert), "--host", arg(&host)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}
