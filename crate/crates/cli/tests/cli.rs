//! End-to-end tests of the `brown` binary: artifact layout, exit codes,
//! manifest replay reproducibility, and output schemas.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn brown() -> Command {
    Command::new(env!("CARGO_BIN_EXE_brown"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("brown-cli-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn region_writes_csv_svg_and_manifest() {
    let dir = tmp_dir("region");
    let stem = dir.join("r");
    run_ok(brown().args([
        "region",
        "--t",
        "1",
        "--alpha",
        "0.8",
        "--samples",
        "64",
        "--out",
        stem.to_str().unwrap(),
        "--format",
        "svg",
    ]));
    let csv = read(&dir.join("r.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "curve,re,im");
    for name in ["sigma", "omega", "circle_1ma_a", "gamma", "inv_gamma"] {
        assert!(
            csv.lines().any(|l| l.starts_with(&format!("{name},"))),
            "curve {name} missing"
        );
    }
    // 17 significant digits in scientific notation
    let first_num = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    assert!(first_num.contains('e') && first_num.contains('.'));
    assert_eq!(first_num.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);

    let svg = read(&dir.join("r.svg"));
    assert!(svg.starts_with("<svg") && svg.contains("viewBox=\"-3 -3 6 6\""));

    let manifest: serde_json::Value = serde_json::from_str(&read(&dir.join("r.manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "region");
    assert_eq!(manifest["parameters"]["alpha"], 0.8);
    assert!(manifest["artifacts"].as_array().unwrap().len() == 2);
}

#[test]
fn replay_reproduces_outputs_byte_identically() {
    let dir = tmp_dir("replay");
    let stem = dir.join("r");
    run_ok(brown().args([
        "region",
        "--t",
        "2",
        "--alpha",
        "0.3",
        "--samples",
        "64",
        "--out",
        stem.to_str().unwrap(),
    ]));
    let original = read(&dir.join("r.csv"));
    std::fs::remove_file(dir.join("r.csv")).unwrap();
    run_ok(brown().args([
        "replay",
        "--manifest",
        dir.join("r.manifest.json").to_str().unwrap(),
    ]));
    let replayed = read(&dir.join("r.csv"));
    assert_eq!(original, replayed, "replay must be byte-identical");
}

#[test]
fn characteristic_flat_start_and_blowup_status() {
    let dir = tmp_dir("char");
    let stem = dir.join("c");
    // x0 = 0: the x column is identically zero
    let out = run_ok(brown().args([
        "characteristic",
        "--lambda0",
        "2,0.5",
        "--x0",
        "0",
        "--alpha",
        "0.5",
        "--u-max",
        "0.5",
        "--out",
        stem.to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("status: completed"), "{stdout}");
    let csv = read(&dir.join("c.csv"));
    assert!(csv.lines().next().unwrap().starts_with("u,a,b,x,p_a,p_b,p_x,H,K1,K2,xpx2"));
    for line in csv.lines().skip(1) {
        let x: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(x, 0.0);
    }

    // a start that blows up before u_max reports it
    let out = run_ok(brown().args([
        "characteristic",
        "--lambda0",
        "0.5,0.5",
        "--x0",
        "1e-6",
        "--alpha",
        "0.5",
        "--u-max",
        "3",
        "--out",
        dir.join("cb").to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("blew_up"), "{stdout}");
}

#[test]
fn field_emits_masked_grid() {
    let dir = tmp_dir("field");
    let stem = dir.join("f");
    run_ok(brown().env("BROWN_THREADS", "1").args([
        "field",
        "--t",
        "1",
        "--alpha",
        "0.5",
        "--grid",
        "-3:3:21,-3:3:21",
        "--out",
        stem.to_str().unwrap(),
    ]));
    let csv = read(&dir.join("f.csv"));
    assert_eq!(csv.lines().next().unwrap(), "re,im,s_t,laplacian,mask");
    assert_eq!(csv.lines().count(), 1 + 21 * 21);
    for mask in ["outside", "inside", "singular"] {
        assert!(csv.contains(mask), "mask class {mask} missing");
    }
}

#[test]
fn rmt_emits_cloud_and_stats() {
    let dir = tmp_dir("rmt");
    let stem = dir.join("m");
    run_ok(brown().args([
        "rmt", "--n", "24", "--t", "0.4", "--alpha", "0.5", "--steps", "400", "--seed", "7",
        "--reps", "2", "--out",
        stem.to_str().unwrap(),
        "--format", "svg",
    ]));
    let csv = read(&dir.join("m.csv"));
    assert_eq!(csv.lines().next().unwrap(), "re,im,replicate");
    assert_eq!(csv.lines().count(), 1 + 24 * 2);
    let stats: serde_json::Value = serde_json::from_str(&read(&dir.join("m.stats.json"))).unwrap();
    for key in ["n", "alpha", "t", "inside_fraction", "margin", "seed"] {
        assert!(stats.get(key).is_some(), "stats key {key} missing");
    }
    assert!(stats["inside_fraction"].as_f64().unwrap() > 0.9);
    assert!(dir.join("m.svg").exists());
}

#[test]
fn usage_errors_exit_2() {
    // alpha out of range
    let out = brown()
        .args(["region", "--t", "1", "--alpha", "1.5", "--out", "/tmp/x"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // malformed lambda0
    let out = brown()
        .args([
            "characteristic",
            "--lambda0",
            "nope",
            "--x0",
            "0",
            "--alpha",
            "0.5",
            "--out",
            "/tmp/x",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // unknown flag (clap reports usage errors as 2)
    let out = brown().args(["region", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_3() {
    // characteristic starting exactly on an atom with x0 = 0: the initial
    // trace is undefined
    let out = brown()
        .args([
            "characteristic",
            "--lambda0",
            "1,0",
            "--x0",
            "0",
            "--alpha",
            "0.5",
            "--out",
            "/tmp/brown-cli-atom",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
