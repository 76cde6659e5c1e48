use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_regfman"));
    c.env_remove("REGFMAN_TOL");
    c
}

fn run_with(doc: &Value, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = bin();
    c.arg("run").arg("-").args(args);
    for (k, v) in env {
        c.env(k, v);
    }
    let mut child = c
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(doc.to_string().as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn run(doc: &Value) -> Output {
    run_with(doc, &[], &[])
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "no report ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn samples() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("samples");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    v.sort();
    v
}

#[test]
fn every_sample_passes() {
    let files = samples();
    assert!(files.len() >= 9);
    for f in files {
        let out = bin().arg("run").arg(&f).output().unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}: {}",
            f.display(),
            String::from_utf8_lossy(&out.stdout)
        );
        let r = report(&out);
        assert_eq!(r["pass"], json!(true));
        assert!(
            !r["checks"].as_array().unwrap().is_empty(),
            "{}",
            f.display()
        );
    }
}

#[test]
fn nilpotent_block_is_an_fmanifold() {
    let doc = json!({
        "task": "verify-fmanifold",
        "payload": {"model": {"spectrum": [{"re": 0.0, "size": 2}]}}
    });
    let out = run(&doc);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["failed"], json!([]));
    assert_eq!(r["data"]["dim"], json!(2));
}

#[test]
fn linear_potential_gives_charge_two() {
    let doc = json!({
        "task": "verify-frobenius",
        "payload": {"blocks": [2], "potential": [[[0, 1], [1.0, 0.0]]], "euler": "solve"}
    });
    let out = run(&doc);
    assert_eq!(out.status.code(), Some(0));
    let d = &report(&out)["data"]["d"];
    assert!((d[0].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(d[1].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn unit_dependent_metric_is_rejected() {
    let doc = json!({
        "task": "verify-frobenius",
        "payload": {"blocks": [2], "eta": [[[], [[[0, 0], [1.0, 0.0]], [[1, 1], [1.0, 0.0]]]]]}
    });
    let out = run(&doc);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["pass"], json!(false));
    assert_eq!(r["data"]["frobenius"], json!(false));
    let failed: Vec<&str> = r["failed"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(failed.contains(&"unit_derivative"), "{failed:?}");
}

#[test]
fn malformed_multi_index_is_located() {
    let doc = json!({
        "task": "verify-frobenius",
        "payload": {"blocks": [2], "potential": [[[0, 0], [1.0, 0.0]], [[0, 1, 2], [1.0, 0.0]]]}
    });
    let out = run(&doc);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("payload.potential[1][0]"), "{err}");
}

#[test]
fn unknown_field_is_located() {
    let doc = json!({
        "task": "symmetries",
        "payload": {"m": 3, "eigenvalu": [0.0, 0.0]}
    });
    let out = run(&doc);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("payload.eigenvalu"));
}

#[test]
fn missing_isomorphism_is_a_verdict() {
    let doc = json!({
        "task": "germ-iso",
        "payload": {
            "source": {"spectrum": [{"re": 0.0, "size": 2}]},
            "target": {"spectrum": [{"re": 0.0, "size": 1}, {"re": 1.0, "size": 1}]}
        }
    });
    let out = run(&doc);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(r["error"].as_str().unwrap().contains("no isomorphism"));
}

#[test]
fn invalid_initial_data_is_an_input_error() {
    let doc = json!({
        "task": "extend-metric",
        "settings": {"order": 2},
        "payload": {
            "model": {"spectrum": [{"re": 0.0, "size": 2}]},
            "gp": [[[1.0, 0.0], [2.0, 0.0]], [[2.0, 0.0], [0.0, 0.0]]],
            "vp": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.5, 0.0]]],
            "d": [1.0, 0.0]
        }
    });
    let out = run(&doc);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vp_skewness"));
}

#[test]
fn reports_are_deterministic() {
    let f = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("samples/malgrange-chart.json");
    let a = bin().arg("run").arg(&f).output().unwrap();
    let b = bin().arg("run").arg(&f).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn echoed_settings_reproduce_the_report() {
    let doc = json!({
        "task": "symmetries",
        "payload": {"m": 3}
    });
    let first = run_with(&doc, &["--order", "3", "--tol", "1e-8", "--seed", "7"], &[]);
    let r = report(&first);
    let settings = r["provenance"]["settings"].clone();
    assert_eq!(settings, json!({"order": 3, "tol": 1e-8, "seed": 7}));
    let again = json!({"task": "symmetries", "settings": settings, "payload": {"m": 3}});
    let second = run(&again);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn tolerance_precedence() {
    let base = json!({
        "task": "verify-fmanifold",
        "payload": {"model": {"spectrum": [{"re": 0.0, "size": 1}]}}
    });
    let tol = |out: &Output| {
        report(out)["provenance"]["settings"]["tol"]
            .as_f64()
            .unwrap()
    };
    assert_eq!(tol(&run(&base)), 1e-9);
    assert_eq!(tol(&run_with(&base, &[], &[("REGFMAN_TOL", "1e-6")])), 1e-6);
    let mut with_doc = base.clone();
    with_doc["settings"] = json!({"tol": 1e-5});
    assert_eq!(
        tol(&run_with(&with_doc, &[], &[("REGFMAN_TOL", "1e-6")])),
        1e-5
    );
    assert_eq!(tol(&run_with(&with_doc, &["--tol", "1e-7"], &[])), 1e-7);
    let bad = run_with(&base, &[], &[("REGFMAN_TOL", "tiny")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn report_written_to_file() {
    let dir = std::env::temp_dir().join(format!("regfman-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let f = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("samples/symmetries.json");
    let out = bin()
        .args(["run", "--summary", "--out"])
        .arg(&path)
        .arg(&f)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("symmetries: PASS"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["task"], json!("symmetries"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn explain_describes_every_task() {
    for task in [
        "verify-fmanifold",
        "standard-model",
        "verify-frobenius",
        "symmetries",
        "saito-check",
        "birkhoff-flatness",
        "malgrange-chart",
        "extend-metric",
        "germ-iso",
    ] {
        let out = bin().args(["explain", task]).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(
            text.starts_with(task) && text.contains("\nchecks"),
            "{text}"
        );
    }
}

#[test]
fn explain_rejects_unknown_tasks() {
    let out = bin().args(["explain", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn every_reported_check_is_explained() {
    for f in samples() {
        let out = bin().arg("run").arg(&f).output().unwrap();
        let r = report(&out);
        let task = r["task"].as_str().unwrap();
        let text =
            String::from_utf8(bin().args(["explain", task]).output().unwrap().stdout).unwrap();
        for c in r["checks"].as_array().unwrap() {
            let name = c["name"].as_str().unwrap();
            let (prefix, leaf) = name.rsplit_once('.').unwrap_or(("", name));
            let leaf = if leaf.starts_with("bracket_") {
                "bracket_i_j"
            } else {
                leaf
            };
            assert!(
                text.contains(&format!("  {leaf} ")),
                "{task}: {name} is not explained"
            );
            if !prefix.is_empty() {
                let prefix = if prefix.starts_with('y') {
                    "yk"
                } else {
                    prefix
                };
                assert!(
                    text.contains(&format!("checks prefixed {prefix}.:")),
                    "{task}: group {prefix} is not explained"
                );
            }
        }
    }
}
