#![cfg(unix)]

use std::fs;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};

use sumlogic::encodings::{EncodingKind, Manifest, ManifestEntry, Role};
use sumlogic::harness::{run, run_matrix, MatchStatus, Matrix, SolverConfig, SolverVerdict};

fn fake_solver(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, format!("#!/bin/sh\n{body}\n")).unwrap();
    fs::set_permissions(&p, fs::Permissions::from_mode(0o755)).unwrap();
    p
}

/// Answers `unsat` when the script mentions `false`, `sat` otherwise.
fn grep_solver(dir: &Path) -> SolverConfig {
    let p = fake_solver(dir, "grepsolver", "if grep -q false \"$1\"; then echo unsat; else echo sat; fi");
    SolverConfig::new("grep", &[p.to_str().unwrap(), "{file}"]).with_timeout(10.0)
}

fn script(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn entry(id: &str, expected: &str) -> ManifestEntry {
    ManifestEntry {
        id: id.into(),
        file: format!("{id}.smt2"),
        role: Role::Goal,
        expected: expected.into(),
        transition: None,
        kind: EncodingKind::Int,
        surj: false,
        total: false,
        related: vec![],
    }
}

#[test]
fn trivial_scripts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = grep_solver(dir.path());
    let f = script(dir.path(), "f.smt2", "(assert false)(check-sat)");
    let t = script(dir.path(), "t.smt2", "(assert true)(check-sat)");
    assert_eq!(run("f", &f, &cfg).verdict, SolverVerdict::Unsat);
    assert_eq!(run("t", &t, &cfg).verdict, SolverVerdict::Sat);
}

#[test]
fn timeout_is_reported_after_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    let p = fake_solver(dir.path(), "sleeper", "exec sleep 30");
    let cfg = SolverConfig::new("sleeper", &[p.to_str().unwrap(), "{file}"]).with_timeout(1.0);
    let f = script(dir.path(), "f.smt2", "(check-sat)");
    let r = run("f", &f, &cfg);
    assert_eq!(r.verdict, SolverVerdict::Timeout);
    assert!(r.time_s >= 1.0);
    assert!(r.time_s < 10.0);
}

#[test]
fn missing_executable_and_crashes_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let f = script(dir.path(), "f.smt2", "(check-sat)");
    let missing = SolverConfig::new("nope", &["definitely-not-a-solver-xyz", "{file}"]);
    let r = run("f", &f, &missing);
    assert_eq!(r.verdict, SolverVerdict::Error);
    assert!(r.reason.unwrap().contains("not found"));
    let p = fake_solver(dir.path(), "crash", "echo boom >&2; exit 3");
    let crash = SolverConfig::new("crash", &[p.to_str().unwrap(), "{file}"]);
    assert_eq!(run("f", &f, &crash).verdict, SolverVerdict::Error);
    let p = fake_solver(dir.path(), "quiet", "exit 0");
    let quiet = SolverConfig::new("quiet", &[p.to_str().unwrap(), "{file}"]);
    assert_eq!(run("f", &f, &quiet).verdict, SolverVerdict::Unknown);
}

#[test]
fn matrix_rows_and_mismatch_flag() {
    let dir = tempfile::tempdir().unwrap();
    script(dir.path(), "a.smt2", "(assert false)(check-sat)");
    script(dir.path(), "b.smt2", "(assert true)(check-sat)");
    let manifest = Manifest { benchmarks: vec![entry("a", "UNSAT"), entry("b", "UNSAT")] };
    let g = grep_solver(dir.path());
    let mut g2 = g.clone();
    g2.name = "grep2".into();
    let m = run_matrix(&manifest, dir.path(), &[g, g2], 3);
    assert_eq!(m.rows.len(), 4);
    assert_eq!(m.mismatches(), 2);
    assert!(m.rows.iter().all(|r| (r.benchmark == "b") == (r.status == MatchStatus::Mismatch)));
    let csv = m.to_csv().unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("benchmark,solver,verdict,time_s,expected,match\n"));
    assert!(csv.contains("b,grep,SAT,"));
    assert!(csv.contains(",UNSAT,MISMATCH"));
    let md = m.to_markdown(false);
    assert!(md.contains("| b         | UNSAT    | SAT !"));
}

#[test]
fn empty_manifest() {
    let m = run_matrix(&Manifest::default(), Path::new("."), &[], 4);
    assert!(m.rows.is_empty());
    assert_eq!(m.to_csv().unwrap(), "benchmark,solver,verdict,time_s,expected,match\n");
}

#[test]
fn reporting_ignores_completion_order() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..6 {
        script(dir.path(), &format!("s{i}.smt2"), if i % 2 == 0 { "(assert false)" } else { "(assert true)" });
    }
    let manifest = Manifest { benchmarks: (0..6).map(|i| entry(&format!("s{i}"), "UNSAT")).collect() };
    let cfg = grep_solver(dir.path());
    let a = run_matrix(&manifest, dir.path(), std::slice::from_ref(&cfg), 1);
    let b = run_matrix(&manifest, dir.path(), &[cfg], 6);
    let strip = |m: &Matrix| m.rows.iter().map(|r| (r.benchmark.clone(), r.verdict, r.status)).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
    let mut rev = a.rows.clone();
    rev.reverse();
    assert_eq!(Matrix::from_rows(rev).to_markdown(false), a.to_markdown(false));
}
