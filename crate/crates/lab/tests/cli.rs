use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mminf-lab")).args(args).env_remove("MMINF_SEED").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn list_prints_every_registry() {
    let o = lab(&["list", "identities"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for tag in ["ABC_SUM", "IPP_BINPOI", "MM1_COMMUT_INF", "ENT_LOC"] {
        assert!(text.contains(tag), "{tag} missing");
    }
    let o = lab(&["list", "inequalities", "--json"]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let tags: Vec<&str> = rows.as_array().unwrap().iter().map(|r| r["tag"].as_str().unwrap()).collect();
    assert!(tags.contains(&"TWO_POINT_A") && tags.contains(&"MMI_LOC_NEW"));
    let o = lab(&["list", "phis"]);
    assert!(stdout(&o).contains("NEG_LOG"));
}

#[test]
fn unknown_tag_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"seed": 1, "inequality_tags": ["POISSON_Q"]}"#);
    let o = lab(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("POISSON_Q") && err.contains("POISSON_A"), "{err}");
}

#[test]
fn missing_seed_and_bad_fields_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.json", r#"{"suites": ["tv"]}"#);
    assert_eq!(lab(&["run", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(dir.path(), "b.json", r#"{"seed": 1, "sweets": []}"#);
    assert_eq!(lab(&["run", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(lab(&["run", "--config", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn identical_seeds_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"seed": 77, "suites": ["identities", "tv", "spectral"], "samples": {"identities": 40, "time_integral": 4}}"#,
    );
    let mut texts = Vec::new();
    for name in ["one.json", "two.json"] {
        let report = dir.path().join(name);
        let o = lab(&["run", "--config", &cfg, "--quiet", "--report", report.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("ALL PASS seed=77"));
        texts.push(fs::read(&report).unwrap());
        let meta: serde_json::Value =
            serde_json::from_slice(&fs::read(report.with_extension("meta.json")).unwrap()).unwrap();
        assert!(meta["generated_unix_seconds"].as_u64().unwrap() > 0);
    }
    assert_eq!(texts[0], texts[1]);
    let parsed: serde_json::Value = serde_json::from_slice(&texts[0]).unwrap();
    assert_eq!(parsed["seed"], 77);
    assert_eq!(parsed["suites"].as_array().unwrap().len(), 3);
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"seed": 1, "suites": ["tv"]}"#);
    let o = Command::new(env!("CARGO_BIN_EXE_mminf-lab"))
        .args(["run", "--config", &cfg, "--quiet"])
        .env("MMINF_SEED", "4242")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("seed=4242"));
}

#[test]
fn rejected_phi_is_an_expected_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"seed": 5, "suites": ["admissibility"], "admissibility_phis": [{"family": "NEG_LOG"}]}"#,
    );
    let o = lab(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("REJECTED"));
}

#[test]
fn curves_are_written_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let curves = dir.path().join("curves");
    let cfg = write_config(dir.path(), "c.json", r#"{"seed": 3, "suites": ["decay", "tv"]}"#);
    let o = lab(&["run", "--config", &cfg, "--quiet", "--curves-dir", curves.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let decay = fs::read_to_string(curves.join("decay.csv")).unwrap();
    assert!(decay.starts_with("lambda,mu,phi,function,t,value,bound\n"));
    assert!(curves.join("tv.csv").exists());
}

#[test]
fn decay_command_tracks_the_quadratic_rate() {
    let o = lab(&["decay", "--phi", "P2", "--a", "0", "--b", "1", "--t-max", "1", "--steps", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        let t: f64 = r[4].parse().unwrap();
        let v: f64 = r[5].parse().unwrap();
        assert!((v - 2.0 * (-2.0 * t).exp()).abs() < 1e-9 * 2.0, "t={t} v={v}");
    }
}

#[test]
fn simulate_and_spectrum_commands() {
    let o = lab(&["simulate", "--lambda", "0", "--mu", "1", "--n0", "3", "--t-max", "50", "--seed", "9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("time,state\n0.0,3\n"), "{text}");
    assert!(text.trim_end().ends_with(",0"));
    let o = lab(&["spectrum", "--lambda", "5", "--mu", "2", "--trunc", "200"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["gap"].as_f64().unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn scaling_command_reports_gaps() {
    let o = lab(&["scaling", "--phi", "P2", "--g", "linear", "--c", "0", "--s", "1", "--grid", "10,100"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n_grid"].as_array().unwrap().len(), 2);
    let o = lab(&["scaling", "--ou", "--grid", "50"]);
    assert!(o.status.success(), "{}", stderr(&o));
}
