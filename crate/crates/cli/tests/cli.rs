use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn hskernel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hskernel")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn fig1(dir: &TempDir) -> String {
    let out = hskernel(&["gen", "fig1"]);
    assert!(out.status.success());
    write(dir, "fig1.hg", &stdout(&out))
}

#[test]
fn random_generator_matches_golden_file() {
    let out = hskernel(&["gen", "random", "--n", "10", "--m", "6", "--dmax", "3", "--seed", "1"]);
    assert!(out.status.success());
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/random_n10_m6_d3_s1.hg");
    assert_eq!(stdout(&out), fs::read_to_string(golden).unwrap());
}

#[test]
fn every_algorithm_produces_an_equivalent_kernel() {
    let dir = TempDir::new().unwrap();
    let input = fig1(&dir);
    for algo in ["sequential", "cores", "pseudo"] {
        for shrink in [false, true] {
            let mut args = vec!["kernelize", "--algo", algo, "--k", "2", "--no-size-guard", &input];
            if shrink {
                args.push("--shrink");
            }
            let out = hskernel(&args);
            assert!(out.status.success(), "{algo}");
            let text = stdout(&out);
            assert!(text.contains(&format!("# algorithm: {algo}")));
            assert!(text.contains("# edges_in: 10"));
            let kernel = write(&dir, &format!("{algo}-{shrink}.hg"), &text);
            let check = hskernel(&["verify", "--k", "2", &input, &kernel]);
            assert_eq!(check.status.code(), Some(0), "{algo} shrink={shrink}: {}", stdout(&check));
        }
    }
}

#[test]
fn cores_kernel_of_worked_example() {
    let dir = TempDir::new().unwrap();
    let input = fig1(&dir);
    let out = hskernel(&["kernelize", "--algo", "cores", "--k", "2", "--no-size-guard", "--emit-chain", &input]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# rounds: 3"));
    assert!(text.contains("# edges_out: 2"));
    assert!(text.contains("# layer 1: {a,b,c} {a,b,d} {a,b,e}"));
    assert!(text.contains("# layer 2: {a,b}"));
    assert!(text.ends_with("e a b\ne u v w\n"));
}

#[test]
fn size_guard_keeps_small_inputs() {
    let dir = TempDir::new().unwrap();
    let input = fig1(&dir);
    let out = hskernel(&["kernelize", "--algo", "cores", "--k", "2", &input]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("# edges_out: 10"));
}

#[test]
fn verify_reports_counterexample() {
    let dir = TempDir::new().unwrap();
    let input = fig1(&dir);
    let wrong = write(&dir, "wrong.hg", "p hg 2 1\nv a b\ne a b\n");
    let out = hskernel(&["verify", "--k", "2", &input, &wrong]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "counterexample: {a}\n");
}

#[test]
fn solve_finds_smallest_hitting_set() {
    let dir = TempDir::new().unwrap();
    let input = fig1(&dir);
    let out = hskernel(&["solve", "--k", "2", &input]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "hitting set: {a,u}\n");
    let out = hskernel(&["solve", "--k", "1", &input]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pseudo_test_prints_table() {
    let dir = TempDir::new().unwrap();
    let input = fig1(&dir);
    let out = hskernel(&["pseudo-test", "--core", "a,b", "--k", "2", "--level", "2", &input]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 10);
    assert!(text.contains("leaf 3.3: {a,b} | {d} | {k,q,t,w}"));
    let out = hskernel(&["pseudo-test", "--core", "u", "--k", "2", "--level", "1", &input]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tree_and_family_generators() {
    let out = hskernel(&["gen", "tree", "--l", "1", "--d", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("p hg 7 4\n"));
    let out = hskernel(&["gen", "family", "--n", "3", "--k", "2", "--c", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let tables: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(tables.iter().all(|t| t.split(' ').count() == 3));
    assert!(!tables.is_empty());
}

#[test]
fn errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.hg", "garbage\n");
    assert_eq!(hskernel(&["solve", "--k", "1", &bad]).status.code(), Some(2));
    let input = fig1(&dir);
    assert_eq!(hskernel(&["kernelize", "--algo", "bogus", "--k", "1", &input]).status.code(), Some(2));
    assert_eq!(hskernel(&["pseudo-test", "--core", "zz", "--k", "1", "--level", "1", &input]).status.code(), Some(2));
    assert_eq!(hskernel(&["solve", "--k", "1", "/nonexistent/file.hg"]).status.code(), Some(2));
    assert_eq!(hskernel(&["gen", "tree", "--l", "0", "--d", "2"]).status.code(), Some(2));
}
