use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qiline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qiline"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SAMPLE: &str = "left_slope: 1\nright_slope: 3\npoints:\n(0, 0)\n(1, 2)\n";

#[test]
fn eval_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.txt", SAMPLE);
    let o = qiline(&["map", "eval", &f, "7/3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "6\n");
    let o = qiline(&["map", "eval", &f, "1/3"]);
    assert_eq!(stdout(&o), "2/3\n");
}

#[test]
fn compose_with_inverse_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.txt", SAMPLE);
    let inv = qiline(&["map", "invert", &f]);
    assert!(inv.status.success());
    let g = write(dir.path(), "g.txt", &stdout(&inv));
    let o = qiline(&["map", "compose", &f, &g]);
    assert_eq!(stdout(&o), "left_slope: 1\nright_slope: 1\nintercept: 0\n");
}

#[test]
fn serialization_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let messy = "# removable knot at 1/2, fields out of order\nright_slope: 3\nleft_slope: 1\npoints: (0, 0) (1/2, 1)\n(1, 2)\n";
    let f = write(dir.path(), "f.txt", messy);
    let first = stdout(&qiline(&["map", "normalize", &f]));
    assert_eq!(first, SAMPLE);
    let g = write(dir.path(), "g.txt", &first);
    let second = stdout(&qiline(&["map", "normalize", &g]));
    assert_eq!(first.as_bytes(), second.as_bytes());
}

#[test]
fn parse_and_invariant_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.txt",
        "left_slope: 1\nright_slope: x\npoints: (0, 0)\n",
    );
    let o = qiline(&["map", "invert", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2, column 14"), "{}", stderr(&o));
    let folded = write(
        dir.path(),
        "folded.txt",
        "left_slope: 1\nright_slope: 1\npoints: (0, 0) (1, -1)\n",
    );
    let o = qiline(&["map", "invert", &folded]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not monotone"), "{}", stderr(&o));
}

#[test]
fn qi_check_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.txt",
        "left_slope: 2\nright_slope: 2\nintercept: 0\n",
    );
    let pairs = write(dir.path(), "pairs.txt", "0 100\n1, 2\n");
    let o = qiline(&["map", "qi-check", &f, "--pairs", &pairs]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "holds with C = 4\n");
    let o = qiline(&["map", "qi-check", &f, "--pairs", &pairs, "--c", "3/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("(0, 100)"));
}

#[test]
fn approximate_identity_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = qiline(&[
        "approximate",
        "--oracle",
        "identity",
        "--c",
        "2",
        "--n",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let grid = fs::read_to_string(out.join("grid.csv")).unwrap();
    let mut lines = grid.lines();
    assert_eq!(lines.next(), Some("k,x_k,y_k,eval_y_k"));
    for (line, k) in lines.zip(-4i64..=4) {
        assert_eq!(line, format!("{k},{k},{},{}", 8 * k, 8 * k));
    }
    let map = fs::read_to_string(out.join("map.txt")).unwrap();
    assert_eq!(map, "left_slope: 1\nright_slope: 1\nintercept: 0\n");
}

#[test]
fn approximate_sqrt_drift_checks_slopes() {
    let o = qiline(&[
        "approximate",
        "--oracle",
        "sqrt-drift",
        "--c",
        "2",
        "--n",
        "50",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("in [1/4, 9/4]"));
}

#[test]
fn missing_table_entry_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.txt", "-1, -1\n0, 0\n1, 1\n");
    let spec = format!("table:{t}");
    let o = qiline(&["approximate", "--oracle", &spec, "--n", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no value at 2"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(
        qiline(&["approximate", "--oracle", "bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qiline(&["approximate", "--oracle", "identity", "--c", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qiline(&["approximate", "--oracle", "block-swap", "--c", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qiline(&["growth", "--word", "y1"]).status.code(), Some(2));
    assert_eq!(
        qiline(&["growth", "--translation", "1", "--digits", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qiline(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn growth_tables() {
    let o = qiline(&["growth", "--word", "1", "--n", "5"]);
    let csv = stdout(&o);
    assert!(csv
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(3) == Some("0")));
    assert_eq!(csv.lines().count(), 6);

    let o = qiline(&["growth", "--translation", "1", "--n", "12"]);
    for (i, line) in stdout(&o).lines().skip(1).enumerate() {
        let n = i as u32 + 1;
        assert_eq!(line.split(',').nth(3).unwrap(), (1u64 << n).to_string());
    }

    let o = qiline(&["growth", "--word", "x0", "--n", "20", "--digits", "8"]);
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 20);
    let approx: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').nth(6).unwrap().parse().unwrap())
        .collect();
    assert!(approx[0] > 0.0);
    assert!(approx.windows(2).all(|w| w[1] >= 2.0 * w[0] * (1.0 - 1e-7)));
}

#[test]
fn growth_from_lift_file() {
    let dir = tempfile::tempdir().unwrap();
    let core = write(
        dir.path(),
        "core.txt",
        "left_slope: 1\nright_slope: 1\npoints:\n(0, 1/4)\n(1/2, 1)\n(1, 5/4)\n",
    );
    let o = qiline(&["growth", "--lift", &core, "--n", "6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 7);
}

#[test]
fn relations_and_word_problem() {
    let o = qiline(&["relations", "--j-max", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "i,j,holds\n");
    let o = qiline(&["relations", "--j-max", "3"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 7);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",pass")));
    let o = qiline(&["word-problem", "--word", "x0 x1 x0^-1 x2^-1"]);
    assert_eq!(stdout(&o), "trivial\n");
    let o = qiline(&["word-problem", "--word", "x0 x1 x0^-1 x1^-1"]);
    assert_eq!(stdout(&o), "nontrivial\n");
}

#[test]
fn runs_are_deterministic() {
    let args = [
        "approximate",
        "--oracle",
        "noise:2",
        "--seed",
        "9",
        "--n",
        "5",
    ];
    assert_eq!(stdout(&qiline(&args)), stdout(&qiline(&args)));
}
