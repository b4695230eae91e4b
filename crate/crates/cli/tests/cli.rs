use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_energy-screen"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn write(path: &Path, body: &str) {
    fs::write(path, body).unwrap();
}

/// Two well separated classes on the first feature, noise elsewhere.
fn separated_csv(swap: bool) -> String {
    let mut s = String::from("label,a,b,c\n");
    for i in 0..12 {
        let noise = (i as f64 * 0.37).sin();
        let (l1, l2) = if swap { (2, 1) } else { (1, 2) };
        s += &format!("{l1},{},{noise},{}\n", -5.0 + 0.01 * i as f64, noise * 0.5);
        s += &format!("{l2},{},{},{noise}\n", 5.0 + 0.01 * i as f64, noise * 0.5);
    }
    s
}

#[test]
fn missing_input_fails_with_path() {
    let out = run(&["screen", "--input", "/nonexistent/data.csv"]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("/nonexistent/data.csv"), "{}", text(&out.stderr));
}

#[test]
fn unknown_method_is_a_usage_error() {
    let out = run(&["screen", "--input", "x.csv", "--method", "bogus"]);
    assert!(!out.status.success());
}

#[test]
fn malformed_row_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    write(&p, "label,a,b\n1,0.5,1\n2,oops,3\n");
    let out = run(&["screen", "--input", p.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = text(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn mixs_on_odd_dimension_notes_padding() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("odd.csv");
    write(&p, &separated_csv(false));
    let out = run(&[
        "screen",
        "--input",
        p.to_str().unwrap(),
        "--method",
        "mixs",
        "--perm-count",
        "40",
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("padding column"), "{}", text(&out.stdout));
}

#[test]
fn too_few_resamples_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.csv");
    write(&p, &separated_csv(false));
    let out = run(&["screen", "--input", p.to_str().unwrap(), "--method", "mixs", "--perm-count", "5"]);
    assert!(!out.status.success());
}

#[test]
fn classify_separated_and_swapped() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    let swapped = dir.path().join("swapped.csv");
    write(&train, &separated_csv(false));
    write(&test, &separated_csv(false));
    write(&swapped, &separated_csv(true));
    let base = ["classify", "--train", train.to_str().unwrap(), "--method", "wos"];

    let out = run(&[&base[..], &["--test", test.to_str().unwrap()]].concat());
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("rate: 0\n"), "{}", text(&out.stdout));

    let out = run(&[&base[..], &["--test", swapped.to_str().unwrap()]].concat());
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("rate: 1\n"), "{}", text(&out.stdout));
}

#[test]
fn classify_dimension_mismatch_fails() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    write(&train, &separated_csv(false));
    write(&test, "label,a,b\n1,0,0\n2,1,1\n");
    let out = run(&["classify", "--train", train.to_str().unwrap(), "--test", test.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("invalid data"), "{}", text(&out.stderr));
}

#[test]
fn simulate_then_screen_recovers_signals() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let out = run(&[
        "simulate",
        "--example",
        "1",
        "--dim",
        "200",
        "--test-n",
        "0",
        "--seed",
        "11",
        "--out",
        sim.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(!sim.join("test.csv").exists());

    let report = dir.path().join("report");
    let out = run(&[
        "--threads",
        "1",
        "screen",
        "--input",
        sim.join("train.csv").to_str().unwrap(),
        "--method",
        "mars",
        "--gamma",
        "g2",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("retained single features: [X1 X2 X3 X4]"), "{}", text(&out.stdout));
    assert!(report.join("report.txt").exists());
    assert!(report.join("energies.csv").exists());
}

#[test]
fn replicate_and_noise_ratio_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("rep");
    let out = run(&[
        "replicate",
        "--example",
        "1",
        "--reps",
        "2",
        "--dim",
        "40",
        "--n1",
        "30",
        "--n2",
        "30",
        "--test-n",
        "20",
        "--method",
        "mars",
        "--gamma",
        "g1,g3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let summary = fs::read_to_string(out_dir.join("misclassification_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);

    let out = run(&["noise-ratio", "--n-grid", "10,20", "--dim", "30", "--reps", "5"]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("noise_ratio"));
}

#[test]
fn zero_threads_rejected() {
    let out = run(&["--threads", "0", "noise-ratio", "--reps", "2"]);
    assert!(!out.status.success());
}
