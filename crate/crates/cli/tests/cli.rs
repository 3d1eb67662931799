use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sumlogic"));
    c.env_remove("SUMLOGIC_SOLVER_CONFIG");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn run_stdin(args: &[&str], dir: &Path, input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .current_dir(dir)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn decide_examples_and_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "sat.sl", "vocab l=0 m=1 d=0\nassert s1 = 0\n");
    write(d.path(), "unsat.sl", "vocab l=1 m=1 d=0\nassert s1 = 0 & b1(a1) = 1\n");
    write(d.path(), "m2.sl", "vocab l=0 m=2 d=0\nassert s1 = 0\n");
    write(d.path(), "bad.sl", "vocab l=0 m=1 d=0\nassert s1 = = 0\n");

    let o = run(&["decide", "sat.sl"], d.path());
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("SAT"));
    let o = run(&["decide", "unsat.sl"], d.path());
    assert_eq!((code(&o), stdout(&o).lines().next()), (0, Some("UNSAT")));
    let o = run(&["decide", "m2.sl"], d.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("fragment"));
    assert_eq!(code(&run(&["decide", "bad.sl"], d.path())), 2);
    assert_eq!(code(&run(&["decide", "missing.sl"], d.path())), 2);

    let o = run(&["decide", "unsat.sl", "--oracle-check", "--no-external", "--verbose"], d.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("oracle-check: agree"));
    assert!(stdout(&o).contains("kappa 11"));

    let o = run(&["--json", "decide", "sat.sl"], d.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "Sat");
}

#[test]
fn decide_output_is_stable() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "f.sl", "vocab l=2 m=1 d=1\nassert (forall x. b1(x) = c1) & !(a1 = a2) & s1 = 2\n");
    let a = run(&["decide", "f.sl", "-v"], d.path());
    let b = run(&["--sequential", "decide", "f.sl", "-v"], d.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn check_and_search() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "f.sl", "vocab l=0 m=1 d=0\nassert (forall x. b1(x) = 1) & s1 = 2\n");
    let o = run(&["check", "f.sl"], d.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("well-formed"));
    let o = run(&["search", "f.sl", "--max-addresses", "3"], d.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("model found (2 addresses)"));
    write(d.path(), "open.sl", "vocab l=0 m=1 d=0\nassert b1(x) = 1\n");
    assert_eq!(code(&run(&["check", "open.sl"], d.path())), 2);
}

#[test]
fn encode_family_single_and_errors() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["encode", "--all", "-o", "fam"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let top = fs::read_dir(d.path().join("fam"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "smt2"))
        .count();
    assert_eq!(top, 31);
    assert!(stdout(&o).starts_with("31 goal scripts"));

    let o = run(&["encode", "mint1", "int", "--total", "-o", "one"], d.path());
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(d.path().join("one/mint1_int_total.smt2")).unwrap();
    assert!(text.lines().any(|l| l == "(assert (distinct new-sum new-total) )"));
    assert!(d.path().join("one/manifest.json").is_file());

    assert_eq!(code(&run(&["encode", "transfer1", "id", "--surj-full"], d.path())), 2);
    assert_eq!(code(&run(&["encode", "mint1"], d.path())), 2);
    assert_eq!(code(&run(&["encode", "deltas", "uf", "--deltas=1,-1"], d.path())), 2);

    let a = run(&["encode", "deltas", "int", "--deltas=5,-3,-1", "--stdout"], d.path());
    let b = run(&["encode", "deltas", "int", "--deltas=5,-3,-1", "--stdout"], d.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("(assert (distinct (+ old-sum 1) new-sum) )"));
}

#[cfg(unix)]
fn fake_solver(dir: &Path, name: &str, answer: &str) -> String {
    use std::os::unix::fs::PermissionsExt;
    let p = dir.join(name);
    fs::write(&p, format!("#!/bin/sh\necho {answer}\n")).unwrap();
    fs::set_permissions(&p, fs::Permissions::from_mode(0o755)).unwrap();
    format!("[[solver]]\nname = \"{name}\"\ncommand = [\"{}\", \"{{file}}\"]\ntimeout_s = 10\n", p.display())
}

#[cfg(unix)]
#[test]
fn bench_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["encode", "mint1", "int", "-o", "b"], d.path())), 0);
    write(d.path(), "unsat.toml", &fake_solver(d.path(), "always-unsat", "unsat"));
    write(d.path(), "sat.toml", &fake_solver(d.path(), "always-sat", "sat"));
    write(d.path(), "none.toml", "[[solver]]\nname = \"ghost\"\ncommand = [\"no-such-solver-here\", \"{file}\"]\n");

    let o = run(&["--config", "unsat.toml", "bench", "b", "--quiet-times"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("| mint1_int | UNSAT    | UNSAT"));
    let csv = fs::read_to_string(d.path().join("b/results.csv")).unwrap();
    assert!(csv.starts_with("benchmark,solver,verdict,time_s,expected,match\nmint1_int,always-unsat,UNSAT,"));

    let o = run(&["--config", "sat.toml", "bench", "b/manifest.json", "--csv", "out.csv"], d.path());
    assert_eq!(code(&o), 1);
    assert!(fs::read_to_string(d.path().join("out.csv")).unwrap().contains("MISMATCH"));

    let o =
        bin().args(["bench", "b"]).current_dir(d.path()).env("SUMLOGIC_SOLVER_CONFIG", "none.toml").output().unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no solver available"));
}

#[test]
fn check_world_reports() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "cx.w", "addr a1 a2\ncoin c1 c2\nactive c1 c2\nhas a1 c2\nhas a2 c2\n");
    write(d.path(), "ok.w", "addr a1 a2\ncoin c1 c2\nactive c1\nhas a2 c1\n");
    write(d.path(), "minted.w", "addr a1 a2\ncoin c1 c2\nactive c1 c2\nhas a2 c1\nhas a1 c2\n");
    write(d.path(), "bad.w", "addr a1\nhas a1 c9\n");

    let o = run(&["check-world", "cx.w"], d.path());
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("inv: false, in_f: false, V<=1, V>=1"));
    let o = run(&["check-world", "ok.w"], d.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("inv: true"));
    let o = run(&["check-world", "ok.w", "minted.w", "--mint1", "a1", "c2"], d.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("mint1: true, sum +1"));
    let o = run(&["check-world", "ok.w", "minted.w", "--mint1", "a2", "c2"], d.path());
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("mint1: false"));
    assert_eq!(code(&run(&["check-world", "bad.w"], d.path())), 2);
    assert_eq!(code(&run(&["check-world", "ok.w", "--mint1", "a1", "c2"], d.path())), 2);
}

#[test]
fn two_counter_machine_tools() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "trivial.m", "1: halt\n");
    write(d.path(), "loop.m", "1: inc c1 -> 1\n2: halt\n");
    write(d.path(), "broken.m", "1: jump 3\n");

    let o = run(&["2cm", "simulate", "trivial.m"], d.path());
    assert_eq!((code(&o), stdout(&o).trim()), (0, "HALT at step 0"));
    let o = run(&["2cm", "witness", "trivial.m", "0"], d.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("model OK (4 addresses)\n"));
    let o = run(&["2cm", "witness", "loop.m", "2"], d.path());
    assert_eq!(code(&o), 1);
    assert_eq!(code(&run(&["2cm", "simulate", "broken.m"], d.path())), 2);

    let reduced = run(&["2cm", "reduce", "loop.m"], d.path());
    assert_eq!(code(&reduced), 0);
    assert!(stdout(&reduced).contains("# phi3: l(a0) = 3"));
    let o = run_stdin(&["decide", "-"], d.path(), &reduced.stdout);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("m = 3"));
    let o = run_stdin(&["check", "-"], d.path(), &reduced.stdout);
    assert_eq!(code(&o), 0);

    let o = run(&["2cm", "search", "trivial.m", "--max-addresses", "4", "--max-value", "3"], d.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("model found"));
}
