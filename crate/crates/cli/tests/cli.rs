use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hermite_cli::maskfile::MaskFile;
use hermite_core::annihilator::cancel_level;
use hermite_core::schemes::closed_form_b;
use hermite_core::seqs::{convolve, MatrixMask};
use hermite_core::space::{ExpPolySpace, Frequency};
use hermite_core::{CMatrix, C64};
use serde_json::Value;

fn hermite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermite"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_mask(path: &Path, m: &MatrixMask) {
    fs::write(path, MaskFile::from_mask(m).to_json().unwrap()).unwrap();
}

fn read_mask(path: &Path) -> MatrixMask {
    let f: MaskFile = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    f.to_mask().unwrap()
}

fn csv_rows(text: &str) -> Vec<(u32, i64, f64, usize, f64, f64)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.unwrap()).collect()
}

#[test]
fn annihilator_prints_the_single_frequency_operator() {
    let o = hermite(&[
        "--json",
        "annihilator",
        "--p",
        "0",
        "--lambda",
        "1",
        "--level",
        "0",
    ]);
    assert_eq!(code(&o), 0);
    let f: MaskFile = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((f.dim, f.lo), (3, -1));
    assert!((f.taps[1][0][1][0] + 1.1752012).abs() < 1e-7);
}

#[test]
fn annihilator_without_frequencies_is_the_difference_operator() {
    let o = hermite(&["--json", "annihilator", "--p", "0"]);
    assert_eq!(code(&o), 0);
    let f: MaskFile = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        f.taps,
        vec![vec![vec![[1.0, 0.0]]], vec![vec![[-1.0, 0.0]]]]
    );
}

#[test]
fn duplicate_frequencies_are_usage_errors() {
    let o = hermite(&["annihilator", "--lambda", "1", "--lambda", "1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("duplicate"));
}

#[test]
fn written_annihilator_passes_the_annihilation_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let p = path.to_str().unwrap();
    let o = hermite(&[
        "annihilator",
        "--p",
        "1",
        "--lambda",
        "0.5",
        "--lambda",
        "2",
        "--imag",
        "--out",
        p,
    ]);
    assert_eq!(code(&o), 0);
    let o = hermite(&[
        "check",
        "--mask",
        p,
        "--lambda",
        "0.5",
        "--lambda",
        "2",
        "--imag",
        "--mode",
        "annihilation",
        "--levels",
        "0",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    // Wrong imaginary flag: the same mask no longer annihilates.
    let o = hermite(&[
        "check",
        "--mask",
        p,
        "--lambda",
        "0.5",
        "--lambda",
        "2",
        "--mode",
        "annihilation",
        "--levels",
        "0",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn spectral_check_of_the_example_scheme() {
    let o = hermite(&[
        "--json", "check", "--scheme", "example2", "--lambda", "1", "--levels", "0:5",
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["levels"].as_array().unwrap().len(), 6);
}

#[test]
fn identity_mask_fails_the_spectral_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.json");
    write_mask(&path, &MatrixMask::delta(3));
    let o = hermite(&[
        "check",
        "--mask",
        path.to_str().unwrap(),
        "--lambda",
        "1",
        "--levels",
        "0",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn unreadable_inputs_are_usage_errors() {
    assert_eq!(
        code(&hermite(&["check", "--mask", "/nonexistent/mask.json"])),
        2
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"dim\": 2, \"lo\": 0, \"taps\": [[[[1, 0]]]]}").unwrap();
    assert_eq!(
        code(&hermite(&["check", "--mask", path.to_str().unwrap()])),
        2
    );
    assert_eq!(code(&hermite(&["check", "--scheme", "nonsense"])), 2);
    assert_eq!(
        code(&hermite(&[
            "run", "--scheme", "example2", "--init", "cubic"
        ])),
        2
    );
}

#[test]
fn factorize_reproduces_the_displayed_factor() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    let o = hermite(&[
        "factorize",
        "--scheme",
        "example2",
        "--level",
        "0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let b = read_mask(&path);
    let want = closed_form_b(2, Frequency::real(1.0).unwrap(), 0).unwrap();
    assert!(b.max_abs_diff(&want) <= 1e-9);
}

#[test]
fn factorize_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.json");
    write_mask(&id, &MatrixMask::delta(3));
    let o = hermite(&["factorize", "--mask", id.to_str().unwrap(), "--lambda", "1"]);
    assert_eq!(code(&o), 1);

    // A product B0 * H with one tap dropped is no longer divisible by H.
    let space = ExpPolySpace::single(0, Frequency::real(1.0).unwrap()).unwrap();
    let b0 = MatrixMask::new(
        3,
        0,
        vec![
            CMatrix::from_fn(3, 3, |i, j| C64::new(1.0 + (i * 3 + j) as f64 / 10.0, 0.0)),
            CMatrix::from_fn(3, 3, |i, j| C64::new(((i + 2 * j) % 3) as f64 - 0.5, 0.0)),
        ],
    )
    .unwrap();
    let c = convolve(&b0, cancel_level(&space, 0).unwrap().mask()).unwrap();
    let truncated = MatrixMask::new(3, c.lo(), c.taps()[..c.taps().len() - 1].to_vec()).unwrap();
    let bad = dir.path().join("bad.json");
    write_mask(&bad, &truncated);
    let bad = bad.to_str().unwrap();
    let o = hermite(&[
        "factorize",
        "--mask",
        bad,
        "--lambda",
        "1",
        "--mode",
        "convolution",
        "--skip-precheck",
    ]);
    assert_eq!(code(&o), 3);
    let o = hermite(&[
        "factorize",
        "--mask",
        bad,
        "--lambda",
        "1",
        "--mode",
        "convolution",
    ]);
    assert_eq!(code(&o), 1);

    let good = dir.path().join("good.json");
    write_mask(&good, &c);
    let o = hermite(&[
        "--json",
        "factorize",
        "--mask",
        good.to_str().unwrap(),
        "--lambda",
        "1",
        "--mode",
        "convolution",
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn run_writes_sorted_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let svg = dir.path().join("a.svg");
    let o = hermite(&[
        "run",
        "--scheme",
        "example2",
        "--iterations",
        "12",
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("level,alpha,x,component,value_re,value_im\n"));
    let rows = csv_rows(&text);
    let keys: Vec<_> = rows.iter().map(|r| (r.0, r.1, r.3)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let last: Vec<_> = rows.iter().filter(|r| r.0 == 12).collect();
    assert!(last.iter().all(|r| r.4.is_finite() && r.4.abs() < 10.0));
    // The data lives in the support cone [−2^12, 2^12].
    assert!(last.iter().all(|r| r.2.abs() <= 1.0 + 1e-12));
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));
    // Deterministic output.
    let again = dir.path().join("b.csv");
    hermite(&[
        "run",
        "--scheme",
        "example2",
        "--iterations",
        "12",
        "--csv",
        again.to_str().unwrap(),
    ]);
    assert_eq!(fs::read(&csv).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn zero_iterations_echo_the_initial_data() {
    let o = hermite(&[
        "run",
        "--scheme",
        "example3",
        "--iterations",
        "0",
        "--column",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    let values: Vec<f64> = rows.iter().map(|r| r.4).collect();
    assert_eq!(values, [0.0, 0.0, 1.0, 0.0]);
}

#[test]
fn exponential_samples_are_reproduced() {
    let o = hermite(&[
        "run",
        "--scheme",
        "example3",
        "--init",
        "exp+",
        "--iterations",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    let last: Vec<_> = rows.iter().filter(|r| r.0 == 4 && r.3 == 0).collect();
    assert!(!last.is_empty());
    for r in last {
        assert!(
            (r.4 - r.2.exp()).abs() <= 1e-9 * (1.0 + r.2.exp()),
            "x = {}",
            r.2
        );
    }
}

#[test]
fn exhausted_window_exits_with_failure() {
    let dir = tempfile::tempdir().unwrap();
    let wide = dir.path().join("wide.json");
    write_mask(
        &wide,
        &MatrixMask::new(2, -3, vec![CMatrix::identity(2); 7]).unwrap(),
    );
    let o = hermite(&[
        "run",
        "--mask",
        wide.to_str().unwrap(),
        "--init",
        "poly:1",
        "--window",
        "0",
        "--iterations",
        "2",
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("needs 2 more samples"));
}

#[test]
fn determinant_identity_passes() {
    let o = hermite(&["--json", "det", "--d", "3", "--levels", "0:4"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
    let a = stdout(&hermite(&["--json", "--seed", "9", "det", "--random", "6"]));
    let b = stdout(&hermite(&["--json", "--seed", "9", "det", "--random", "6"]));
    assert_eq!(a, b);
}
