use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn gauss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gauss")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "corpus", name].iter().collect();
    p.to_str().unwrap().to_string()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const THREE: &str = "exact 3 4\n1 2 1 3\n1 1 2 9\n2 1 1 16\n";

#[test]
fn solve_prints_each_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "three.txt", THREE);
    for method in ["schoolbook", "fraction-free", "rolle", "ldu", "crout", "dwyer"] {
        let o = gauss(&["solve", "--method", method, &f]);
        assert_eq!(o.status.code(), Some(0), "{method}");
        assert_eq!(stdout(&o), "x = 9\ny = -4\nz = 2\n", "{method}");
    }
}

#[test]
fn pivoting_rescues_a_zero_pivot() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "swap.txt", "exact 2 3\n0 1 2\n1 1 3\n");
    assert_eq!(gauss(&["solve", "--method", "ldu", &f]).status.code(), Some(1));
    let o = gauss(&["solve", "--method", "ldu", "--pivot", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x = 1\ny = 2\n");
}

#[test]
fn trace_shows_each_stage() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "three.txt", THREE);
    let out = stdout(&gauss(&["trace", "--method", "schoolbook", &f]));
    assert!(out.contains("original system"));
    assert!(out.contains("−3y − z = 10"));
    assert!(out.contains("−4z = −8"));
}

#[test]
fn dwyer_trace_matches_golden() {
    let golden = fs::read_to_string(corpus("dwyer.golden")).unwrap();
    let out = stdout(&gauss(&["trace", "--method", "dwyer", &corpus("dwyer.txt")]));
    assert!(out.starts_with(&golden), "{out}");
}

#[test]
fn precision_override_and_refinement() {
    let plain = stdout(&gauss(&["solve", "--method", "dwyer", &corpus("dwyer.txt")]));
    assert!(plain.contains("w = 1.1748"));
    let o = gauss(&["solve", "--method", "doolittle", "--precision", "sig=3", "--refine", "1", &corpus("dwyer.txt")]);
    assert_eq!(o.status.code(), Some(0));
    assert_ne!(stdout(&o), stdout(&gauss(&["solve", "--method", "doolittle", "--precision", "sig=3", &corpus("dwyer.txt")])));
}

#[test]
fn lsq_line_fit() {
    let o = gauss(&["lsq", "--case", "1", "--method", "bracket", &corpus("line-fit.txt")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(9/10, 19/10)\n");
    let chol = gauss(&["lsq", "--case", "1", "--method", "cholesky", &corpus("line-fit.txt")]);
    assert_eq!(stdout(&chol), stdout(&o));
}

#[test]
fn corpus_by_id() {
    let o = gauss(&["corpus", "--id", "buteo"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1 of 1 corpus problems pass"));
    assert_eq!(gauss(&["corpus", "--id", "nosuch"]).status.code(), Some(2));
}

#[test]
fn verify_agrees_on_a_regular_system() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "three.txt", THREE);
    let o = gauss(&["verify", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("PASS\n"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.txt", "exact 2 3\n1 2\n");
    assert_eq!(gauss(&["solve", "--method", "nope", &bad]).status.code(), Some(2));
    assert_eq!(gauss(&["solve", "--method", "ldu", &bad]).status.code(), Some(2));
    assert_eq!(gauss(&["solve", "--method", "ldu", "/no/such/file"]).status.code(), Some(2));
    assert_eq!(gauss(&["lsq", "--case", "3", "--method", "bracket", &bad]).status.code(), Some(2));
}
