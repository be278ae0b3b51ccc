use std::path::{Path, PathBuf};
use std::process::Command;

use dequant_lab::config::{config_schema, ExperimentConfig, ExperimentId, Params};
use dequant_lab::report::{summary_schema, Table};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dequant-lab"))
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const SMALL_DLP: &str = r#"{"experiment": "dlp", "seed": 3, "params": {"points": 20, "mc_points": 2000}}"#;

#[test]
fn list_prints_every_experiment() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ExperimentId::ALL {
        assert!(text.lines().any(|l| l.starts_with(id.as_str())), "{id} missing");
    }
    assert!(text.contains("sigma_constant: number = 2.25"));
}

#[test]
fn validate_accepts_shipped_configs() {
    for id in ExperimentId::ALL {
        let path = repo_root().join("configs").join(format!("{id}.json"));
        let out = bin().args(["validate", "--config"]).arg(&path).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn unknown_keys_and_bad_ranges_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"experiment": "dlp", "sed": 1}"#, "unknown field `sed`"),
        (r#"{"experiment": "dlp", "params": {"point": 3}}"#, "unknown field `point`"),
        (r#"{"experiment": "kernel-eig", "params": {"trials": 1}}"#, "params.trials"),
        (r#"{"experiment": "dlp", "params": {"qubits": [3]}}"#, "params.qubits"),
        (r#"{"experiment": "nope"}"#, "unknown variant"),
        (r#"{"seed": 1}"#, "missing field `experiment`"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let path = write_config(dir.path(), &format!("c{i}.json"), text);
        for extra in [vec!["validate"], vec!["run", "--out", dir.path().to_str().unwrap()]] {
            let out = bin().args(&extra).arg("--config").arg(&path).output().unwrap();
            let cmd = extra[0];
            assert_eq!(out.status.code(), Some(1), "{cmd} {text}");
            let err = String::from_utf8(out.stderr).unwrap();
            assert!(err.contains(needle), "{err}");
        }
    }
    let out = bin().args(["run", "--config", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["validate", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(bin().arg("--help").output().unwrap().status.success());
}

#[test]
fn run_writes_reproducible_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "dlp.json", SMALL_DLP);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let status = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(out).output().unwrap().status;
        assert_eq!(status.code(), Some(0));
    }
    for name in ["dlp.csv", "summary.json"] {
        let x = std::fs::read(a.join("dlp").join(name)).unwrap();
        let y = std::fs::read(b.join("dlp").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let csv = std::fs::read_to_string(a.join("dlp/dlp.csv")).unwrap();
    assert!(!csv.contains('\r'));
    assert!(csv.starts_with("qubits,modulus,generator,bit,"));
    assert_eq!(csv.lines().count(), 3);
    assert!(a.join("dlp/timing.json").exists());
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "dlp.json", SMALL_DLP);
    let run = |seed: &str, out: &str| {
        let status = bin()
            .args(["run", "--config"])
            .arg(&cfg)
            .args(["--seed", seed, "--out"])
            .arg(dir.path().join(out))
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        std::fs::read_to_string(dir.path().join(out).join("dlp/dlp.csv")).unwrap()
    };
    run("99", "s99");
    let text = std::fs::read_to_string(dir.path().join("s99/dlp/summary.json")).unwrap();
    let summary: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(summary["seed"], 99);
    assert_ne!(run("1", "s1"), run("2", "s2"));
}

#[test]
fn failed_check_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "strict.json",
        r#"{"experiment": "dlp", "params": {"points": 20, "mc_points": 2000, "tol": 0.0}}"#,
    );
    let out = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL expansion_gap"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("dlp/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], false);
}

#[test]
fn output_dir_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from-config");
    let text = format!(
        r#"{{"experiment": "dlp", "output_dir": {}, "params": {{"points": 5, "mc_points": 100}}}}"#,
        serde_json::to_string(&out).unwrap()
    );
    let cfg = write_config(dir.path(), "c.json", &text);
    assert!(bin().args(["run", "--config"]).arg(&cfg).output().unwrap().status.success());
    assert!(out.join("dlp/dlp.csv").exists());
}

#[test]
fn summary_matches_documented_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(repo_root().join("docs/summary.schema.json")).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for id in [ExperimentId::Dlp, ExperimentId::KernelEig, ExperimentId::Separation] {
        let mut cfg = ExperimentConfig::new(id, 5);
        match &mut cfg.params {
            Params::KernelEig(p) => p.trials = 20,
            Params::Separation(p) => p.pairs = 2,
            _ => {}
        }
        dequant_lab::run(&cfg).unwrap().write(dir.path()).unwrap();
        let summary: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(id.as_str()).join("summary.json")).unwrap())
                .unwrap();
        let errors: Vec<String> = validator.iter_errors(&summary).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{id}: {errors:?}");
    }
    let broken = serde_json::json!({"experiment": "dlp"});
    assert!(!validator.is_valid(&broken));
}

#[test]
fn shipped_configs_match_config_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(repo_root().join("docs/config.schema.json")).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for id in ExperimentId::ALL {
        let text = std::fs::read_to_string(repo_root().join("configs").join(format!("{id}.json"))).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(validator.is_valid(&value), "{id}");
        let full = serde_json::json!({
            "experiment": id.as_str(),
            "params": serde_json::to_value(id.default_params()).unwrap(),
        });
        assert!(validator.is_valid(&full), "{id} defaults");
    }
    assert!(!validator.is_valid(&serde_json::json!({"experiment": "dlp", "extra": 1})));
    assert!(!validator.is_valid(&serde_json::json!({"experiment": "dlp", "params": {"bogus": 1}})));
}

/// Regenerate with `UPDATE_SCHEMAS=1 cargo test -p dequant-lab --test cli`.
#[test]
fn schema_documents_are_current() {
    for (name, value) in [("config.schema.json", config_schema()), ("summary.schema.json", summary_schema())] {
        let path = repo_root().join("docs").join(name);
        let text = serde_json::to_string_pretty(&value).unwrap() + "\n";
        if std::env::var("UPDATE_SCHEMAS").is_ok_and(|v| v == "1") {
            std::fs::write(&path, &text).unwrap();
        }
        assert_eq!(std::fs::read_to_string(&path).unwrap(), text, "{name} is stale");
    }
}

#[test]
fn empty_table_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentId::Dlp, 0);
    if let Params::Dlp(p) = &mut cfg.params {
        p.points = 2;
        p.mc_points = 10;
    }
    let mut report = dequant_lab::run(&cfg).unwrap();
    report.tables.push(Table::new("empty", &["metric", "value"]));
    report.write(dir.path()).unwrap();
    assert_eq!(std::fs::read(dir.path().join("dlp/empty.csv")).unwrap(), b"metric,value\n");
}
