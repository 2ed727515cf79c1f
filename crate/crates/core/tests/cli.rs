use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cosine_bouquet::report::sha256_hex;
use serde_json::Value;

fn bouquet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bouquet"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn render_report_digests_the_image() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("view.conf"), "resolution = 48x32\noverlays = 0R\n").unwrap();
    let out = bouquet(
        dir.path(),
        &["render", "--config", "view.conf", "--out", "img/a.ppm", "--report", "a.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = fs::read(dir.path().join("img/a.ppm")).unwrap();
    let rep = read_json(&dir.path().join("a.json"));
    assert_eq!(rep["outputs"][0]["sha256"], sha256_hex(&bytes));
    assert_eq!(rep["passed"], true);
    assert_eq!(rep["failures"].as_array().unwrap().len(), 0);

    let again = bouquet(
        dir.path(),
        &["render", "--config", "view.conf", "--threads", "4", "--out", "b.ppm", "--report", "b.json"],
    );
    assert!(again.status.success());
    let other = read_json(&dir.path().join("b.json"));
    assert_eq!(rep["outputs_digest"], other["outputs_digest"]);
    assert_eq!(rep["inputs_digest"], other["inputs_digest"]);
}

#[test]
fn report_keys_are_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let out = bouquet(dir.path(), &["poincare", "--orders", "4", "--report", "r.json"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("r.json")).unwrap();
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(dir.path().join("poincare.json").exists());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bouquet(dir.path(), &["render", "--set", "colour=red"]).status.code(), Some(2));
    assert_eq!(bouquet(dir.path(), &["ray", "--address", "9Q", "--t", "1"]).status.code(), Some(2));
    assert_eq!(bouquet(dir.path(), &["ray", "--address", "1R|0R", "--t", "3"]).status.code(), Some(2));
    assert_eq!(bouquet(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn ray_and_model_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = bouquet(dir.path(), &["ray", "--address", "2R,1R|0L", "--t", "2", "--samples", "4", "--landing"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("ray.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let out = bouquet(dir.path(), &["model", "--address", "1R", "--address", "3L", "--samples", "5"]);
    assert!(out.status.success());
    let brush = fs::read_to_string(dir.path().join("brush.csv")).unwrap();
    assert!(brush.starts_with("address,t,verdict\n"));
    assert!(brush.contains("NotInXbar") && brush.contains("InX"));
}

#[test]
fn verify_single_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let out = bouquet(dir.path(), &["verify", "--suite", "expansion"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("PASS criterion 5"), "{stdout}");
    assert_eq!(bouquet(dir.path(), &["verify", "--suite", "nope"]).status.code(), Some(2));
}
