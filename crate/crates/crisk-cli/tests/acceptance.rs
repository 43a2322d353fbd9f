//! Acceptance criterion 9: rerunning the full CLI report with a fixed seed
//! produces byte-identical JSON once the timing object is excluded.  The
//! comparison is repeated across worker counts, since output order must not
//! depend on scheduling.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

fn scenario_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/scenario.json")
}

fn report_without_timing(out: &std::path::Path) -> String {
    let text = std::fs::read_to_string(out).expect("report written");
    let mut value: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    let removed = value.as_object_mut().expect("object").remove("timing");
    assert!(removed.is_some(), "report must carry a timing object");
    serde_json::to_string_pretty(&value).expect("serializable")
}

#[test]
fn criterion_9_determinism() {
    let start = Instant::now();
    let scenario = scenario_path();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let run = |threads: Option<&str>| -> String {
        let mut command = Command::new(env!("CARGO_BIN_EXE_crisk"));
        command.args([
            "report",
            "--scenario",
            scenario.to_str().unwrap(),
            "--trials",
            "500",
            "--seed",
            "7",
            "--tol",
            "1e-8",
            "--out",
            out.to_str().unwrap(),
        ]);
        if let Some(n) = threads {
            command.env("CRISK_THREADS", n);
        }
        let status = command.status().expect("binary runs");
        assert_eq!(status.code(), Some(0));
        report_without_timing(&out)
    };

    let baseline = run(None);
    let repeat = run(None);
    assert_eq!(
        baseline.as_bytes(),
        repeat.as_bytes(),
        "reports differ between reruns"
    );
    for threads in ["1", "4"] {
        let capped = run(Some(threads));
        assert_eq!(
            baseline.as_bytes(),
            capped.as_bytes(),
            "report depends on the worker count ({threads})"
        );
    }
    println!("ACCEPTANCE 9 determinism: PASS ({:?})", start.elapsed());
}
