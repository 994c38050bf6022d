use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_string_lossy().into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("biquant-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biquant")).args(args).env("BIQUANT_CACHE_DIR", cache).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn enumerate_prints_both_labelings_of_the_corolla() {
    let dir = scratch("enum");
    let o = run(&["graphs", "enumerate", "--m", "2", "--n", "1", "--s", "1", "--budget", "3"], &dir);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("count 2"));
    assert_eq!(text.matches("# key ").count(), 2);
    // the output validates
    let file = dir.join("graphs.txt");
    std::fs::write(&file, &text).unwrap();
    let v = run(&["graphs", "validate", "--file", file.to_str().unwrap()], &dir);
    assert!(v.status.success());
    assert_eq!(stdout(&v).matches(" ok ").count(), 2);
}

#[test]
fn validate_reports_the_violated_clause() {
    let dir = scratch("validate");
    let file = dir.join("bad.txt");
    std::fs::write(&file, "1 2 1\ni1 d1\nd1 i1\n").unwrap();
    let o = run(&["graphs", "validate", "--file", file.to_str().unwrap()], &dir);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("item 2"));
}

#[test]
fn bialgebra_check_exit_codes() {
    let dir = scratch("bialg");
    let ok = run(&["bialg", "check", "--tensors", &data("example_bialgebra.txt"), "--dim", "2"], &dir);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).matches(" pass ").count(), 3);
    let bad = run(&["bialg", "check", "--tensors", &data("so3_heisenberg_dual.txt"), "--dim", "3"], &dir);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("cocycle fail"));
}

#[test]
fn compiled_bracket_evaluates_the_poisson_bracket() {
    let dir = scratch("op");
    let o = run(
        &[
            "op",
            "compile",
            "--graph",
            &data("bracket_corolla.txt"),
            "--tensors",
            &data("example_bracket.txt"),
            "--dim",
            "2",
            "--eval",
            "x1^2*x2;x2^3",
        ],
        &dir,
    );
    assert!(o.status.success());
    // x2 (∂₁f ∂₂g − ∂₂f ∂₁g) = 6 x1 x2⁴
    assert!(stdout(&o).lines().any(|l| l == "6/1 : 1 4"));
}

#[test]
fn gs_differential_of_the_compiled_bracket_vanishes() {
    let dir = scratch("gs");
    let op =
        run(&["op", "compile", "--graph", &data("bracket_corolla.txt"), "--tensors", &data("example_bracket.txt"), "--dim", "2"], &dir);
    let file = dir.join("bracket.txt");
    std::fs::write(&file, stdout(&op)).unwrap();
    let d = run(&["gs", "d", "--cochain", file.to_str().unwrap()], &dir);
    assert!(d.status.success(), "{}", String::from_utf8_lossy(&d.stderr));
    let records = stdout(&d).lines().filter(|l| !l.starts_with('#') && l.contains(':')).count();
    assert_eq!(records, 0);
    let check = run(&["gs", "d2check", "--arity", "2", "1", "--samples", "5"], &dir);
    assert!(check.status.success());
    assert_eq!(stdout(&check).matches(" zero").count(), 5);
}

#[test]
fn usage_and_input_errors_have_distinct_codes() {
    let dir = scratch("codes");
    assert_eq!(run(&["graphs", "enumerate", "--m", "two"], &dir).status.code(), Some(1));
    assert_eq!(run(&["graphs", "validate", "--file", "/nonexistent/graphs.txt"], &dir).status.code(), Some(2));
    assert_eq!(run(&["--help"], &dir).status.code(), Some(0));
}

#[test]
fn weights_are_identical_across_worker_counts() {
    let dir = scratch("workers");
    let args = |w: &'static str| ["weight", "--graph", "", "--samples", "30000", "--workers", w];
    let graph = data("bracket_corolla.txt");
    let mut outs = Vec::new();
    for w in ["1", "3"] {
        let mut a = args(w);
        a[2] = &graph;
        // separate caches so the second run recomputes
        let o = run(&a, &dir.join(w));
        assert!(o.status.success());
        outs.push(o.stdout);
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn first_order_quantization_report() {
    let dir = scratch("quantize");
    let report = dir.join("report.txt");
    let o = run(
        &[
            "quantize",
            "--tensors",
            &data("example_bialgebra.txt"),
            "--dim",
            "2",
            "--caps",
            "1",
            "0",
            "--samples",
            "20000",
            "--report",
            report.to_str().unwrap(),
        ],
        &dir,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("# profile biquant-prop-v1"));
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|l| l.contains("exact-zero")), "{text}");
}
