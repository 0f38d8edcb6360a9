//! Black-box tests of the `semiwave` binary: exit codes, report files,
//! and byte-level determinism.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semiwave"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn classification_verdict(out: &Path) -> String {
    let text = std::fs::read_to_string(out.join("classification.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["classification"]["verdict"].as_str().unwrap_or("none").to_string()
}

#[test]
fn analyze_classifies_the_presets() {
    let tmp = tempfile::tempdir().unwrap();
    for (preset, expected) in [
        ("null_demo", "null"),
        ("simplestEx", "positive_real_part"),
        ("LogEx", "nilpotent_log_growth"),
        ("RotEx", "imaginary_rotation"),
    ] {
        let cfg = write_config(
            tmp.path(),
            &format!("{preset}.json"),
            &format!(r#"{{"nonlinearity": "{preset}", "seed": 5}}"#),
        );
        let out = tmp.path().join(format!("out_{preset}"));
        let status = bin()
            .args(["analyze", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success(), "{preset} exited {status}");
        assert_eq!(classification_verdict(&out), expected, "{preset}");
        assert!(out.join("witnesses.csv").exists());
    }
}

#[test]
fn malformed_config_exits_2_with_field_name() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        r#"{"nonlinearity": "simplestEx", "eps": -1.0}"#,
    );
    let out = bin()
        .args(["analyze", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("eps"), "diagnostic should name the field: {msg}");
}

#[test]
fn unknown_preset_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.json", r#"{"nonlinearity": "nope"}"#);
    let out = bin()
        .args(["analyze", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonlinearity"));
}

#[test]
fn compare_without_simulate_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"nonlinearity": "RotEx"}"#);
    let out = bin()
        .args(["compare", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("empty"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn set_overrides_reach_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"nonlinearity": "null_demo", "seed": 1}"#);
    // Override the preset itself.
    let out_dir = tmp.path().join("o");
    let status = bin()
        .args(["analyze", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--set", "nonlinearity=\"RotEx\""])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(classification_verdict(&out_dir), "imaginary_rotation");
}

#[test]
fn identical_seed_gives_byte_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"nonlinearity": "simplestEx", "seed": 42, "classify_samples": 500}"#,
    );
    let mut blobs = Vec::new();
    for run in 0..2 {
        let out = tmp.path().join(format!("o{run}"));
        let status = bin()
            .args(["analyze", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--threads", "2"])
            .status()
            .unwrap();
        assert!(status.success());
        blobs.push((
            std::fs::read(out.join("classification.json")).unwrap(),
            std::fs::read(out.join("witnesses.csv")).unwrap(),
        ));
    }
    assert_eq!(blobs[0], blobs[1]);
}

#[test]
fn simulate_and_compare_small_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sim.json",
        r#"{
            "nonlinearity": "RotEx",
            "data": [
                {"kind": "radial", "phi": {"type": "quartic_bump", "amp": 1.0, "radius": 2.5}, "support_radius": 4.0},
                {"kind": "zero"},
                {"kind": "radial", "psi": {"type": "quartic_bump", "amp": 1.0, "radius": 2.5}, "support_radius": 4.0}
            ],
            "grid": {"l": 12.0, "h": 0.25, "dt": 0.0625, "t_max": 5.0},
            "eps": 0.05,
            "rays": [[0.5, 1.5707963267948966, 0.0], [1.0, 1.5707963267948966, 0.0]],
            "energy_every": 8,
            "seed": 9
        }"#,
    );
    let out = tmp.path().join("run");
    let status = bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    for f in ["energy.csv", "rays.csv", "rays_meta.json", "simulate_summary.json"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    // Free-like energy: constant fit deviation well under 1%.
    let status = bin().args(["compare", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("compare_summary.json")).unwrap())
            .unwrap();
    let mean = summary["energy_fits"]["constant"]["params"][0].as_f64().unwrap();
    let dev = summary["energy_fits"]["constant"]["params"][1].as_f64().unwrap();
    assert!(dev < 0.01 * mean, "energy wandered: dev {dev} vs mean {mean}");
    assert!(out.join("w_profile.csv").exists());
    assert!(out.join("variance.csv").exists());
}
