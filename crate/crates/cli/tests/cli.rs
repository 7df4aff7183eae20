//! End-to-end checks of the binary: exit codes, the reference CSV, and
//! byte-identical replay under a fixed seed.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_periodlab"))
}

fn out_dir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn shor_dump_reproduces_reference_distribution() {
    let dir = out_dir("shor-figure");
    let status = bin()
        .args(["shor", "--N", "51", "--a", "2", "--q", "12", "--t", "1", "--dump-dist"])
        .args(["--seed", "7", "--out-dir", dir.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(dir.join("shor-dist.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "outcome_decimal,outcome_binary,probability");
    assert_eq!(lines.len(), 1 + (1 << 12));
    let prob = |y: usize| {
        lines[1 + y]
            .rsplit(',')
            .next()
            .unwrap()
            .parse::<f64>()
            .unwrap()
    };
    let expected = [
        (0usize, 0.5),
        (512, 0.0625),
        (1024, 0.125),
        (1536, 0.0625),
        (2048, 0.0),
        (2560, 0.0625),
        (3072, 0.125),
        (3584, 0.0625),
    ];
    for (y, p) in expected {
        assert!((prob(y) - p).abs() < 1e-9, "y = {y}");
    }
    let record = fs::read_to_string(dir.join("shor-record.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&record).unwrap();
    assert_eq!(json["outputs"]["order"], 8);
    assert_eq!(json["qubit_ledger"]["total"], 13);
}

#[test]
fn replay_with_same_seed_is_byte_identical() {
    let mut csvs = Vec::new();
    for name in ["replay-a", "replay-b"] {
        let dir = out_dir(name);
        let status = bin()
            .args(["mosca-ekert", "--N", "15", "--a", "7", "--q", "4"])
            .args(["--samples", "500", "--dump-dist"])
            .args(["--seed", "42", "--out-dir", dir.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
        csvs.push(fs::read(dir.join("mosca-ekert-dist.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn seed_env_var_is_honored() {
    let mut outputs = Vec::new();
    for (name, env_seed, flag_seed) in [
        ("env-seed-a", Some("9"), None),
        ("env-seed-b", None, Some("9")),
    ] {
        let dir = out_dir(name);
        let mut cmd = bin();
        cmd.args(["em-attack", "--n", "6", "--out-dir", dir.to_str().unwrap()]);
        cmd.env_remove("PERIODLAB_SEED");
        if let Some(s) = env_seed {
            cmd.env("PERIODLAB_SEED", s);
        }
        if let Some(s) = flag_seed {
            cmd.args(["--seed", s]);
        }
        assert!(cmd.status().unwrap().success());
        outputs.push(fs::read_to_string(dir.join("em-attack-record.json")).unwrap());
    }
    let a: serde_json::Value = serde_json::from_str(&outputs[0]).unwrap();
    let b: serde_json::Value = serde_json::from_str(&outputs[1]).unwrap();
    assert_eq!(a["params"], b["params"]);
    assert_eq!(a["outputs"], b["outputs"]);
    assert_eq!(a["outputs"]["success"], true);
}

#[test]
fn usage_errors_exit_with_code_2() {
    let status = bin().arg("no-such-subcommand").status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin().args(["shor", "--bogus-flag"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn ekera_end_to_end_exit_code() {
    let dir = out_dir("ekera-run");
    let status = bin()
        .args(["ekera", "--p", "23", "--g", "5", "--d", "3", "--m", "2"])
        .args(["--seed", "3", "--out-dir", dir.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let record = fs::read_to_string(dir.join("ekera-record.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&record).unwrap();
    assert_eq!(json["outputs"]["recovered_d"], 3);
}
