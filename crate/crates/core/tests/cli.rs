use std::path::Path;
use std::process::{Command, Output};

use tpc::attacks::attack_oblivious_transfer;
use tpc::cli::matrix_file_text;
use tpc::discrim::HonestPovmFamily;
use tpc::funcspec::canonicalize_3x3;
use tpc::qmat::ComplexMatrix;
use tpc::report::ReportDocument;

fn tpc(args: &[&str]) -> Output {
    tpc_env(args, None)
}

fn tpc_env(args: &[&str], overrides: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tpc"));
    cmd.args(args).env_remove("TPC_TOL_OVERRIDE");
    if let Some(o) = overrides {
        cmd.env("TPC_TOL_OVERRIDE", o);
    }
    cmd.output().expect("run tpc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"));
    line.split_whitespace().next().unwrap().parse().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ot_demo_values() {
    let o = tpc(&["ot-demo"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(value(&s, "p_honest"), 0.75);
    assert!((value(&s, "p_attack") - (0.5 + 3f64.sqrt() / 4.0)).abs() < 1e-10);
    assert!((value(&s, "explicit E0 success") - (0.5 + 3f64.sqrt() / 4.0)).abs() < 1e-10);
    assert!(s.contains("explicit E0 certified: true"));
}

#[test]
fn analyze_counterexample_at_half() {
    let o = tpc(&["analyze", "@counterexample", "--q0", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(value(&stdout(&o), "advantage") <= 1e-9);
}

#[test]
fn analyze_writes_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("neq3.txt");
    let o = tpc(&["analyze", "@neq3", "--optimize", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let doc = ReportDocument::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.reports.len(), 1);
    assert!((doc.reports[0].advantage - 7.0 / 27.0).abs() < 1e-12);
    assert!(doc.reports[0].p_optimized.is_some());
}

#[test]
fn four_by_four_is_out_of_scope() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.txt");
    std::fs::write(
        &f,
        "type: deterministic\nsided: two\ninputs: 4 4\noutcomes: 2\n0 1 1 0\n1 0 1 1\n1 1 0 1\n0 1 1 0\n",
    )
    .unwrap();
    let o = tpc(&["analyze", path_str(&f)]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("larger alphabets"));
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(tpc(&["analyze", "/nonexistent/file"]).status.code(), Some(1));
    assert_eq!(tpc(&["analyze", "@nothing"]).status.code(), Some(1));
    assert_eq!(tpc(&["analyze", "@neq3", "--superposition", "1,x,0"]).status.code(), Some(1));
    assert_eq!(tpc_env(&["ot-demo"], Some("CERT_TOL=abc")).status.code(), Some(1));
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let oa = tpc(&["sweep3x3", "--workers", "1", "--out", path_str(&a)]);
    let ob = tpc(&["sweep3x3", "--workers", "8", "--out", path_str(&b)]);
    assert_eq!(oa.status.code(), Some(0));
    assert_eq!(ob.status.code(), Some(0));
    assert_eq!(stdout(&oa), stdout(&ob));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(stdout(&oa).contains("functions=18 "));
}

#[test]
fn sweep_failure_exits_three() {
    let o = tpc_env(&["sweep3x3", "--workers", "2"], Some("ADV_MIN=1"));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("det-two-3x3:"));
}

#[test]
fn overrides_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.txt");
    let o = tpc_env(&["ot-demo", "--out", path_str(&out)], Some("CERT_TOL=1e-7"));
    assert_eq!(o.status.code(), Some(0));
    let doc = ReportDocument::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc.environment.cert, 1e-7);
    assert_eq!(doc.environment.herm, tpc::tol::TOL_HERM);
}

#[test]
fn certify_explicit_ot_measurement() {
    let (_, check) = attack_oblivious_transfer().unwrap();
    let e1 = &ComplexMatrix::identity(check.element.rows()) - &check.element;
    let dir = tempfile::tempdir().unwrap();
    let povm = dir.path().join("povm.txt");
    std::fs::write(&povm, matrix_file_text(&[check.element.clone(), e1])).unwrap();
    let o = tpc(&["certify", "@ot", "--povm", path_str(&povm)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!((value(&stdout(&o), "success") - (0.5 + 3f64.sqrt() / 4.0)).abs() < 1e-10);
}

#[test]
fn certify_rejects_honest_measurement() {
    let form = canonicalize_3x3(&tpc::builtin::neq3()).unwrap();
    let povm = HonestPovmFamily::new([0.5; 5]).unwrap().povm(&form).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.txt");
    let p = dir.path().join("povm.txt");
    std::fs::write(&f, form.base.to_file_text()).unwrap();
    std::fs::write(&p, matrix_file_text(povm.elements())).unwrap();
    let o = tpc(&["certify", path_str(&f), "--povm", path_str(&p), "--superposition", "1,1,0"]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
    assert!((value(&stdout(&o), "success") - 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn certify_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let states = dir.path().join("states.txt");
    let povm = dir.path().join("povm.txt");
    std::fs::write(&states, "dim: 2\n1 0\n0 0\n\n0 0\n0 1\n").unwrap();
    std::fs::write(&povm, "dim: 2\n1 0\n0 0\n\n0 0\n0 1\n").unwrap();
    let o = tpc(&["certify", path_str(&states), "--povm", path_str(&povm)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "success"), 1.0);
    // swapped guesses are a valid but poor measurement
    std::fs::write(&povm, "dim: 2\n0 0\n0 1\n\n1 0\n0 0\n").unwrap();
    assert_eq!(tpc(&["certify", path_str(&states), "--povm", path_str(&povm)]).status.code(), Some(4));
}

#[test]
fn certify_incomplete_povm_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let povm = dir.path().join("povm.txt");
    std::fs::write(&povm, "dim: 3\n1 0 0\n0 0 0\n0 0 0\n\n0 0 0\n0 0 0\n0 0 0\n").unwrap();
    let o = tpc(&["certify", "@ot", "--povm", path_str(&povm)]);
    assert_eq!(o.status.code(), Some(1));
}
