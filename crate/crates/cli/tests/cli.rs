use std::path::Path;
use std::process::{Command, Output};

fn splitquat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitquat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn coeff_prints_canonical_json() {
    let o = splitquat(&["coeff", "--series", "hol", "--twol", "-2", "--twon", "2", "--twom", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["k"], 0);
    assert_eq!(v["terms"][0]["e"], serde_json::json!([-2, 0, 0, 0]));
    let o = splitquat(&["coeff", "--series", "antihol", "--twol", "-2", "--twon", "2", "--twom", "2"]);
    assert_eq!(o.status.code(), Some(2), "index outside the antiholomorphic band");
}

#[test]
fn pair_and_project_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = stdout(&splitquat(&["coeff", "--series", "hol", "--twol", "-3", "--twon", "3", "--twom", "3", "--k", "0"]));
    let f = write(dir.path(), "f.json", &f);
    let o = splitquat(&["project", "--component", "dmm", "--f", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), std::fs::read_to_string(&f).unwrap(), "k = 0 at 2l = -3 lies in D--");
    let o = splitquat(&["project", "--component", "dh-less", "--f", &f]);
    assert_eq!(stdout(&o).trim(), r#"{"k":0,"terms":[]}"#);

    let a = write(dir.path(), "a.json", r#"{"k":0,"terms":[{"e":[-2,0,0,0],"re":"1","im":"0"}]}"#);
    let d = write(dir.path(), "d.json", r#"{"k":0,"terms":[{"e":[0,0,0,-2],"re":"1","im":"0"}]}"#);
    let o = splitquat(&["pair", "--f1", &a, "--f2", &d]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "1"));
    let o = splitquat(&["pair", "--f1", &a, "--f2", &d, "--numeric", "--nt", "40", "--nang", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let re: f64 = stdout(&o).split_whitespace().next().unwrap().parse().unwrap();
    assert!((re - 1.0).abs() < 1e-9, "{re}");
}

#[test]
fn malformed_input_exits_2_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"k\": 0,\n \"terms\": [");
    let o = splitquat(&["project", "--component", "dmm", "--f", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"), "position reported");
    let extra = write(dir.path(), "x.json", r#"{"k":0,"terms":[],"extra":1}"#);
    assert_eq!(splitquat(&["project", "--component", "dmm", "--f", &extra]).status.code(), Some(2));
    assert_eq!(splitquat(&["verify-kernels", "--case", "nope"]).status.code(), Some(2));
    assert_eq!(splitquat(&["verify-kernels", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(splitquat(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn config_file_supplies_flags_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let cfg = write(dir.path(), "c.cfg", &format!("# small run\nseed = 7\njson = {}\n", json.display()));
    let o = splitquat(&["verify-kernels", "--case", "dmm", "--samples", "1", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["seed"], 7);
    let bad = write(dir.path(), "bad.cfg", "colour = red\n");
    assert_eq!(splitquat(&["verify-structure", "--config", &bad]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_and_versioned() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for (p, jobs) in [(&a, "1"), (&b, "2")] {
        let o = splitquat(&[
            "verify-kernels",
            "--case",
            "dh-less",
            "--samples",
            "2",
            "--seed",
            "42",
            "--jobs",
            jobs,
            "--json",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["rng"], "ChaCha8");
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["check_id"].is_string()));
}

#[test]
fn corrupted_fixture_reports_violations() {
    let o = splitquat(&["verify-decomposition", "--min-twol", "-4", "--max-absk", "2", "--corrupt-fixture"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("decomposition.invariance.violation") && out.contains("component\":\"dpp"), "{out}");
}

#[test]
fn decomposition_failures_are_confined_to_the_l_minus_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("dec.json");
    let o = splitquat(&["verify-decomposition", "--json", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let failing: Vec<_> = rows.iter().filter(|r| r["pass"] == false).collect();
    assert!(!failing.is_empty());
    for r in failing {
        let id = r["check_id"].as_str().unwrap();
        let ok = match id {
            "decomposition.invariance" => !matches!(r["inputs"]["component"].as_str(), Some("dmm" | "dpp")),
            _ => r["inputs"]["source"].as_str().is_some_and(|s| s.contains("2l=-2,")),
        };
        assert!(ok, "unexpected failure {r}");
    }
    let details = v["details"].as_array().unwrap();
    assert_eq!(details.len(), 6);
    assert!(details.iter().all(|d| d["checked"].as_u64().unwrap() > 0));
}
