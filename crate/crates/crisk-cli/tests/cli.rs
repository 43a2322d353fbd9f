//! End-to-end tests of the `crisk` binary: exit codes, report shapes,
//! name-resolution errors, and the scenario surface.

use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/scenario.json")
}

fn simons_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/simons.json")
}

fn crisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crisk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> (serde_json::Value, i32) {
    let output = crisk(args);
    let code = output.status.code().expect("exit code");
    let stdout = String::from_utf8(output.stdout).expect("utf8 stdout");
    let value = serde_json::from_str(&stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {stdout}\nstderr: {}",
            String::from_utf8_lossy(&output.stderr)
        )
    });
    (value, code)
}

#[test]
fn eval_matches_library() {
    let scenario = scenario_path();
    let (report, code) = run_json(&[
        "eval",
        "--scenario",
        scenario.to_str().unwrap(),
        "--measure",
        "entropic",
        "--position",
        "x",
    ]);
    assert_eq!(code, 0);
    let value = report["results"]["value"].as_array().unwrap();
    let scenario = crisk::scenario::load_scenario(&scenario).unwrap();
    let expected = scenario
        .measure("entropic")
        .unwrap()
        .eval(scenario.position("x").unwrap(), &scenario.space)
        .unwrap();
    for (got, want) in value.iter().zip(expected.values()) {
        assert!((got.as_f64().unwrap() - want).abs() < 1e-15);
    }
}

#[test]
fn unknown_measure_exits_2_and_lists_names() {
    let scenario = scenario_path();
    let output = crisk(&[
        "eval",
        "--scenario",
        scenario.to_str().unwrap(),
        "--measure",
        "nope",
        "--position",
        "x",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("entropic") && stderr.contains("tail"),
        "{stderr}"
    );
}

#[test]
fn missing_scenario_exits_2() {
    let output = crisk(&["eval", "--measure", "entropic", "--position", "x"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn invalid_probabilities_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"atoms": [{"label": "u", "prob": 0.5}, {"label": "d", "prob": 0.4}], "blocks": [[0, 1]]}"#,
    )
    .unwrap();
    let output = crisk(&[
        "eval",
        "--scenario",
        path.to_str().unwrap(),
        "--measure",
        "m",
        "--position",
        "x",
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("atoms.prob"));
}

#[test]
fn conjugate_reports_admissibility_and_extended_values() {
    let scenario = scenario_path();
    // the fixture density is admissible: E[y|F] = -1 on both blocks
    let (report, code) = run_json(&[
        "conjugate",
        "--scenario",
        scenario.to_str().unwrap(),
        "--measure",
        "entropic",
        "--dual",
        "density",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        report["results"]["admissible"],
        serde_json::json!([true, true])
    );
    for value in report["results"]["conjugate"].as_array().unwrap() {
        assert!(value.as_f64().unwrap() >= 0.0);
    }

    // a payoff used as a dual violates both constraints: typed infinities
    let (report, code) = run_json(&[
        "conjugate",
        "--scenario",
        scenario.to_str().unwrap(),
        "--measure",
        "entropic",
        "--dual",
        "x",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        report["results"]["conjugate"],
        serde_json::json!(["inf", "inf"])
    );
}

#[test]
fn represent_then_attain_close_the_gap() {
    let scenario = scenario_path();
    for measure in ["entropic", "tail"] {
        let (report, code) = run_json(&[
            "represent",
            "--scenario",
            scenario.to_str().unwrap(),
            "--measure",
            measure,
            "--position",
            "x",
        ]);
        assert_eq!(code, 0);
        assert_eq!(report["results"]["gap_ok"], serde_json::json!(true));
        for gap in report["results"]["gap"].as_array().unwrap() {
            assert!(gap.as_f64().unwrap() <= 1e-7);
        }

        let (report, code) = run_json(&[
            "attain",
            "--scenario",
            scenario.to_str().unwrap(),
            "--measure",
            measure,
            "--position",
            "x",
        ]);
        assert_eq!(code, 0);
        for attained in report["results"]["attained"].as_array().unwrap() {
            assert_eq!(attained, &serde_json::json!(true));
        }
    }
}

#[test]
fn axioms_are_deterministic_across_reruns() {
    let scenario = scenario_path();
    let run = || {
        let output = crisk(&[
            "axioms",
            "--scenario",
            scenario.to_str().unwrap(),
            "--measure",
            "entropic",
            "--trials",
            "1000",
            "--seed",
            "7",
        ]);
        assert_eq!(output.status.code(), Some(0));
        let mut value: serde_json::Value =
            serde_json::from_slice(&output.stdout).expect("json report");
        value.as_object_mut().unwrap().remove("timing");
        serde_json::to_string(&value).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn james_verdicts() {
    let scenario = scenario_path();
    let (report, code) = run_json(&[
        "james",
        "--scenario",
        scenario.to_str().unwrap(),
        "--polytope",
        "simplex",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        report["results"]["report"]["compact"],
        serde_json::json!(true)
    );
    assert_eq!(
        report["results"]["report"]["verdict_consistent"],
        serde_json::json!(true)
    );

    let (report, code) = run_json(&[
        "james",
        "--scenario",
        scenario.to_str().unwrap(),
        "--polytope",
        "orthant",
    ]);
    assert_eq!(code, 0); // unbounded is data, not an error
    assert_eq!(
        report["results"]["report"]["compact"],
        serde_json::json!(false)
    );
    assert_eq!(
        report["results"]["report"]["verdict_consistent"],
        serde_json::json!(true)
    );

    // vertex representation goes through the weight LP
    let (report, code) = run_json(&[
        "james",
        "--scenario",
        scenario.to_str().unwrap(),
        "--polytope",
        "triangle",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        report["results"]["report"]["compact"],
        serde_json::json!(true)
    );
    assert_eq!(
        report["results"]["report"]["verdict_consistent"],
        serde_json::json!(true)
    );
}

#[test]
fn james_perturbed_kinds() {
    let scenario = scenario_path();
    let (report, code) = run_json(&[
        "james-perturbed",
        "--scenario",
        scenario.to_str().unwrap(),
        "--polytope",
        "simplex",
        "--kind",
        "indicator",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        report["results"]["report"]["consistent"],
        serde_json::json!(true)
    );

    let (report, code) = run_json(&[
        "james-perturbed",
        "--scenario",
        scenario.to_str().unwrap(),
        "--kind",
        "norm1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        report["results"]["report"]["consistent"],
        serde_json::json!(true)
    );
}

#[test]
fn simons_instance_file() {
    let scenario = scenario_path();
    let (report, code) = run_json(&[
        "simons",
        "--scenario",
        scenario.to_str().unwrap(),
        "--instance",
        simons_path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["flag"], serde_json::json!("ok"));
    for residual in report["results"]["equality_residual"].as_array().unwrap() {
        assert_eq!(residual.as_f64().unwrap(), 0.0);
    }
}

#[test]
fn fatou_passes_for_builtins() {
    let scenario = scenario_path();
    let (report, code) = run_json(&[
        "fatou",
        "--scenario",
        scenario.to_str().unwrap(),
        "--measure",
        "tail",
        "--position",
        "hedge",
    ]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["report"]["pass"], serde_json::json!(true));
}

#[test]
fn report_covers_pairs_in_stable_order() {
    let scenario = scenario_path();
    let (report, code) = run_json(&[
        "report",
        "--scenario",
        scenario.to_str().unwrap(),
        "--trials",
        "100",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    let pairs = report["results"]["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 6); // 2 measures x 3 positions
    let keys: Vec<(String, String)> = pairs
        .iter()
        .map(|p| {
            (
                p["measure"].as_str().unwrap().to_string(),
                p["position"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(report["results"]["axioms"].as_array().unwrap().len(), 2);
}

#[test]
fn table_format_renders() {
    let scenario = scenario_path();
    let output = crisk(&[
        "eval",
        "--scenario",
        scenario.to_str().unwrap(),
        "--measure",
        "entropic",
        "--position",
        "x",
        "--format",
        "table",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("value:"));
    assert!(serde_json::from_str::<serde_json::Value>(&stdout).is_err());
}

#[test]
fn out_flag_writes_a_file() {
    let scenario = scenario_path();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let output = crisk(&[
        "eval",
        "--scenario",
        scenario.to_str().unwrap(),
        "--measure",
        "entropic",
        "--position",
        "x",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(output.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_ok());
}

#[test]
fn threads_env_var_is_honored() {
    let scenario = scenario_path();
    let output = Command::new(env!("CARGO_BIN_EXE_crisk"))
        .args([
            "report",
            "--scenario",
            scenario.to_str().unwrap(),
            "--trials",
            "50",
        ])
        .env("CRISK_THREADS", "1")
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(0));
}
