use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_timobeam");

const HEADER: &str = "level,n,dofs,h,err_u,err_M,proj_u,proj_M,trace_u,trace_M,residual";

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

#[test]
fn mini_study_produces_expected_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mini.csv");
    let o = run(&[
        "study",
        "--n0",
        "4",
        "--levels",
        "3",
        "--p",
        "0",
        "--t",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], HEADER);
    for (row, (n, dofs)) in lines[1..].iter().zip([(4, 24), (8, 48), (16, 96)]) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 11);
        assert_eq!(cols[1], n.to_string());
        assert_eq!(cols[2], dofs.to_string());
    }
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("estimated rates"), "stdout: {stdout}");
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let args = [
        "study", "--n0", "8", "--levels", "2", "--p", "1", "--t", "1,0",
    ];
    let o = run(&[&args[..], &["--out", out_a.to_str().unwrap()]].concat());
    assert!(o.status.success());
    let o = run(&[&args[..], &["--out", out_b.to_str().unwrap()]].concat());
    assert!(o.status.success());
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn zero_load_gives_zero_error_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero.csv");
    let o = run(&[
        "study",
        "--load",
        "zero",
        "--n0",
        "4",
        "--levels",
        "2",
        "--p",
        "1",
        "--t",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    for row in csv.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        for c in &cols[4..] {
            assert_eq!(c.parse::<f64>().unwrap(), 0.0, "row: {row}");
        }
    }
}

#[test]
fn bad_arguments_exit_with_code_1() {
    for args in [
        &["study", "--bc", "xq"][..],
        &["study", "--p", "3"],
        &["study", "--t", "1.5"],
        &["study", "--t", "abc"],
        &["study", "--levels", "0"],
        &["study", "--n0", "0"],
        &["study", "--load", "cos"],
        &["nonsense"],
        &[],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "args: {args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["--version"], &["study", "--help"]] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "args: {args:?}");
    }
}

#[test]
fn gnuplot_flag_writes_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("study.csv");
    let o = run(&[
        "study",
        "--n0",
        "4",
        "--levels",
        "2",
        "--p",
        "0",
        "--t",
        "1",
        "--gnuplot",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let script = std::fs::read_to_string(dir.path().join("study.gp")).unwrap();
    assert!(script.contains("set logscale xy"));
    assert!(script.contains("study.csv"));
}

#[test]
fn solve_prints_error_summary() {
    let o = run(&["solve", "--bc", "cc", "--t", "0", "--p", "2", "--n", "8"]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("dofs=80"), "stdout: {stdout}");
    assert!(stdout.contains("err_u"));
    assert!(stdout.contains("residual"));
}
