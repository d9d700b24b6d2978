//! Black-box checks of the command-line surface.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_repeaterforge"))
}

const CONFIG: &str = r#"
name: cli-test
seed: 9
n_runs: 3
topology:
  standard_scenario: true
  nodes: [alice, rep, bob]
  links:
    - station: s1
      segment_a: { length_km: 4.0 }
      segment_b: { length_km: 4.0 }
    - station: s2
      segment_a: { length_km: 6.0 }
      segment_b: { length_km: 6.0 }
hardware:
  baseline: cc-baseline
  overrides:
    detection_prob_zero_distance: 0.9
protocol:
  scheme: { kind: double_click }
  n_pairs: 4
target:
  f_tel: 0.8717
  rate_hz: 0.1
  server_coherence_time: 100.0
"#;

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scenario.yaml");
    std::fs::write(&path, CONFIG).unwrap();
    path
}

#[test]
fn bound_prints_target_values() {
    let out = bin().args(["bound", "0.1", "100"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.8717");
    let out = bin().args(["bound", "0.5", "100"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.8571");
}

#[test]
fn simulate_is_deterministic_given_seed() {
    let dir = std::env::temp_dir().join(format!("repeaterforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = write_config(&dir);
    let run = |sub: &str| {
        let out_dir = dir.join(sub);
        let out = bin()
            .args([
                "simulate",
                "--config",
                config.to_str().unwrap(),
                "--out-dir",
                out_dir.to_str().unwrap(),
            ])
            .env("REPEATERFORGE_THREADS", "2")
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read_to_string(out_dir.join("cli-test.json")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b, "identical seeds must reproduce identical artifacts");
    assert!(a.contains("config_hash"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn invalid_config_yields_json_error_and_nonzero_exit() {
    let dir = std::env::temp_dir().join(format!("repeaterforge-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.yaml");
    std::fs::write(&path, CONFIG.replace("n_runs: 3", "n_runs: 3\nbogus_field: 1")).unwrap();
    let out = bin()
        .args(["simulate", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value =
        serde_json::from_str(stderr.lines().last().unwrap()).expect("stderr carries error JSON");
    assert!(parsed["error"].as_str().unwrap().contains("bogus_field"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_subcommand_reports_pass_counts() {
    let out = bin()
        .args(["validate", "--tuples", "2", "--draws", "10"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "stdout: {stdout}\nstderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout.contains("all oracle suites passed"));
    assert!(stdout.contains("POVM brute force"));
}
