use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn reference_config() -> String {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/ref1.toml");
    fs::read_to_string(root).unwrap()
}

fn run(cmd: &str, config: &str, dir: &TempDir, extra: &[&str]) -> (Output, PathBuf) {
    let cfg = dir.path().join("config.toml");
    fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_tangency-lab"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    (output, out)
}

fn report(out: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn classify_reports_the_reference_case() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run("classify", &reference_config(), &dir, &[]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["classify"]["label"], "II_{++}");
    assert_eq!(r["results"]["classify"]["adaptability"]["adaptable"], true);
    assert!(out.join("cases.csv").exists());
}

#[test]
fn rects_writes_rows_and_fits() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run("rects", &reference_config(), &dir, &[]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("rects.csv")).unwrap();
    let ns: Vec<u32> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ns, (8..=18).collect::<Vec<_>>());
    let w: f64 = report(&out)["results"]["rects"]["fits"]["w_0n"]["exponent"]
        .as_f64()
        .unwrap();
    assert!((w - 1.5).abs() < 0.05);
    let svg = fs::read_to_string(out.join("rects.svg")).unwrap();
    assert!(svg.contains("slope 1.50"));
}

#[test]
fn missing_ex1_fails_validation() {
    let dir = TempDir::new().unwrap();
    let cfg = reference_config().replace("b = -1.0", "b = 0.0");
    let (o, out) = run("validate", &cfg, &dir, &[]);
    assert_eq!(o.status.code(), Some(1));
    let failed = report(&out)["failed"].to_string();
    assert!(failed.contains("EX1"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("EX1"));
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let cfg = reference_config().replace("[sweep]", "[sweep]\nunknown = 3");
    let (o, out) = run("validate", &cfg, &dir, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let cfg = reference_config().replace("modulus = 0.30", "modulus = -1.0");
    assert_eq!(run("validate", &cfg, &dir, &[]).0.status.code(), Some(2));
    assert_eq!(run("validate", "not toml [", &dir, &[]).0.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let (oa, outa) = run("conjugacy", &reference_config(), &a, &["--seed", "7"]);
    let (ob, outb) = run("conjugacy", &reference_config(), &b, &["--seed", "7"]);
    assert_eq!(oa.status.code(), Some(0));
    assert_eq!(ob.status.code(), Some(0));
    for f in ["report.json", "intersections.csv"] {
        assert_eq!(fs::read(outa.join(f)).unwrap(), fs::read(outb.join(f)).unwrap());
    }
    assert_eq!(report(&outa)["provenance"]["seed"], 7);
}

#[test]
fn tilted_seed_fails_the_c_n_tail() {
    let dir = TempDir::new().unwrap();
    let cfg = reference_config().replace("coeffs = [0.5]", "coeffs = [0.5, 0.15]");
    let (o, out) = run("moduli", &cfg, &dir, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(report(&out)["failed"].to_string().contains("c_n_tail"));
}
