use sofic_core::builder::{build_witness, BuildOptions};
use sofic_core::fixtures::{load_fixture, parse_elements};
use sofic_core::rational::ratio;
use sofic_core::witness::witness_to_json;
use std::path::Path;
use std::process::{Command, Output};

fn sofic(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sofic"))
        .args(args)
        .current_dir(dir)
        .env_remove("SOFIC_GROUND_CAP")
        .env_remove("SOFIC_SEARCH_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn analyze_t2_shows_two_d_classes() {
    let dir = tempfile::tempdir().unwrap();
    let o = sofic(&["analyze", "--fixture", "T2", "--format", "text"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("2 D-class(es)"), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with('D')).count(), 2);

    let o = sofic(&["analyze", "--fixture", "T2", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["d_classes"].as_array().unwrap().len(), 2);
}

#[test]
fn build_then_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = sofic(
        &["build-witness", "--fixture", "T2", "--K", "all", "--eps", "1/5", "--out", "w.json", "--log", "log.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let log: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("log.json")).unwrap()).unwrap();
    assert!(log["N"].as_u64().unwrap() > 0);

    let o = sofic(
        &["check-witness", "--fixture", "T2", "--K", "all", "--eps", "1/5", "--witness", "w.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("PASS"));
}

#[test]
fn failing_check_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    sofic(
        &["build-witness", "--fixture", "T2", "--K", "all", "--eps", "1/5", "--out", "w.json"],
        dir.path(),
    );
    let o = sofic(
        &["check-witness", "--fixture", "T2", "--K", "all", "--eps", "1/1000", "--witness", "w.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).lines().last(), Some("FAIL"));
}

#[test]
fn refusal_exits_with_two_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let o = sofic(
        &["build-witness", "--fixture", "F2xS", "--K", "x,(y,0)", "--eps", "1/4", "--out", "w.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("HypothesesNotMet: orbit quotient declared non-amenable"), "{err}");
    assert!(err.starts_with("error [builder]"), "{err}");
    assert!(!dir.path().join("w.json").exists());
}

#[test]
fn malformed_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"table\": [[0, 1]").unwrap();
    let o = sofic(&["analyze", "--monoid", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("malformed"), "{}", stderr(&o));

    let o = sofic(&["hypotheses", "--fixture", "T2", "--K", "02"], dir.path());
    assert_eq!(o.status.code(), Some(1));

    let o = sofic(
        &["build-witness", "--fixture", "T2", "--K", "all", "--eps", "1/0"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));

    let o = sofic(&["analyze", "--fixture", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cli_and_library_artifacts_match() {
    let dir = tempfile::tempdir().unwrap();
    let k = "{1},{-1},0+2Z,1+3Z";
    let o = sofic(
        &["build-witness", "--fixture", "coset-Z-2-3", "--K", k, "--eps", "1/4", "--out", "w.json", "--log", "log.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let f = load_fixture("coset-Z-2-3").unwrap();
    let kk = parse_elements(f.structured(), k).unwrap();
    let built = build_witness(f.structured(), &kk, &ratio(1, 4), &BuildOptions::default()).unwrap();
    assert_eq!(std::fs::read_to_string(dir.path().join("w.json")).unwrap(), witness_to_json(&built.witness));
    assert_eq!(std::fs::read_to_string(dir.path().join("log.json")).unwrap(), built.log.to_json());
}

#[test]
fn monoid_file_input_matches_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let m = load_fixture("Z2xSL").unwrap().finite().unwrap().clone();
    std::fs::write(dir.path().join("m.json"), m.to_json()).unwrap();
    let from_file = sofic(&["analyze", "--monoid", "m.json", "--format", "json"], dir.path());
    let from_fixture = sofic(&["analyze", "--fixture", "Z2xSL", "--format", "json"], dir.path());
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(stdout(&from_file), stdout(&from_fixture));
}

#[test]
fn ground_cap_from_environment_is_a_refusal() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sofic"))
        .args(["build-witness", "--fixture", "T2", "--K", "all", "--eps", "1/5", "--out", "w.json"])
        .current_dir(dir.path())
        .env("SOFIC_GROUND_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!dir.path().join("w.json").exists());
}

#[test]
fn folner_box_and_search() {
    let dir = tempfile::tempdir().unwrap();
    let o = sofic(
        &["folner", "--group", "Z^2", "--K", "(1,0),(-1,0),(0,1),(0,-1)", "--box", "10", "--format", "json"],
        dir.path(),
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["F_size"], 100);
    assert_eq!(v["quality"], "16/25");

    let o = sofic(&["folner", "--group", "Z", "--K", "1,-1", "--delta", "1/5", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["F_size"], 11);
    assert_eq!(v["quality"], "9/11");
}

#[test]
fn oracle_and_probe_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = sofic(
        &["oracle-witness", "--fixture", "SL", "--K", "0,1", "--eps", "1/10", "--out", "o.json", "--format", "json"],
        dir.path(),
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["power"], 4);
    assert_eq!(v["verdict"], "PASS");
    let o = sofic(
        &["check-witness", "--fixture", "SL", "--K", "0,1", "--eps", "1/10", "--witness", "o.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));

    let o = sofic(
        &["probe-bicyclic", "--n", "100", "--K", "1,qp,p,q", "--format", "json"],
        dir.path(),
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["max_sep_overlap"], "99/100");

    let o = sofic(&["fixtures", "list", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.as_array().unwrap().iter().any(|e| e["name"] == "bicyclic"));
}
