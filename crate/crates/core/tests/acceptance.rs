//! Acceptance run: one line per criterion. Runs without the libtest harness
//! so the lines always reach the output.
//!
//! The process fails when a criterion fails that is not in `KNOWN_FAILURES`,
//! or when a known failure starts passing.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sumlogic::cm2::{
    build_grouped_reduction, build_reduction, parse_machine, reduction_vocabulary, simulate, witness_model, Outcome,
};
use sumlogic::coin::{
    all_worlds, check_inv, check_mint1_soundness, check_mint_n_soundness, derived_balances, in_f, is_mint1,
    is_mint_n_trace, mint1_successors, parse_world, CoinWorld,
};
use sumlogic::crosscheck::cross_check;
use sumlogic::encodings::{
    generate, generate_consistency, write_family, EncodingKind, Role, TransitionSpec, VariantFlags,
};
use sumlogic::exec::Execution;
use sumlogic::gen::{fragment_corpus, random_formula, random_structure, FormulaShape};
use sumlogic::harness::{run, SmtOracle, SolverVerdict};
use sumlogic::lia::{check_model, LiaModel, PresVar};
use sumlogic::reduction::{
    enumerate_partitions, partition_query, presburger_model_of, structure_from_presburger, InternalOracle, Partition,
    PresburgerOracle, Verdict,
};
use sumlogic::search::{find_model_opts, SearchBounds, SearchOptions};
use sumlogic::sl::{is_sl_model, Vocabulary};

/// Criterion 7 asks for no model of the self-loop reduction within 12
/// addresses; the formula has one with 5.
const KNOWN_FAILURES: &[u32] = &[7];

const CORPUS_SEED: u64 = 2024;
const FIDELITY_SEED: u64 = 77;

struct Report {
    pass: bool,
    detail: String,
}

fn report(pass: bool, detail: String) -> Report {
    Report { pass, detail }
}

fn within(t: Duration, limit_s: u64) -> bool {
    t <= Duration::from_secs(limit_s)
}

fn criterion_1() -> Report {
    let start = Instant::now();
    let corpus = fragment_corpus(CORPUS_SEED, 500, 3, 2, FormulaShape::default());
    let external = SmtOracle::from_env();
    let ext: Option<&dyn PresburgerOracle> = external.as_ref().map(|o| o as &dyn PresburgerOracle);
    let internal = InternalOracle::default();
    let (mut sat, mut unsat, mut bad, mut found, mut ext_answers) = (0, 0, 0, 0, 0);
    for (v, f) in &corpus {
        let c = match cross_check(f, v, &internal, ext, 5, Execution::Parallel) {
            Ok(c) => c,
            Err(e) => return report(false, format!("`{f}`: {e}")),
        };
        match c.decision.verdict {
            Verdict::Sat => sat += 1,
            Verdict::Unsat => unsat += 1,
        }
        found += c.search_model.is_some() as usize;
        ext_answers += c.external.iter().flatten().flatten().count();
        if !c.agrees() {
            bad += 1;
            eprintln!("  disagreement on `{f}`: {:?}", c.problems);
        }
    }
    let t = start.elapsed();
    let backend = match &external {
        Some(o) => format!("{} answered {ext_answers} partition queries", o.name()),
        None => "no external solver".into(),
    };
    report(
        bad == 0 && within(t, 120),
        format!(
            "500 formulas: {sat} SAT ({found} confirmed by search), {unsat} UNSAT, {bad} disagreements; {backend}; {:.1}s (limit 120s)",
            t.as_secs_f64()
        ),
    )
}

/// Direct reading of the three invariants, independent of the library.
fn inv_oracle(w: &CoinWorld) -> bool {
    let (na, nc) = (w.n_addresses(), w.n_coins());
    (0..nc).all(|c| {
        let owners = (0..na).filter(|&a| w.has_coin(a, c)).count();
        (owners == 0 || w.is_active(c)) && (!w.is_active(c) || owners >= 1) && owners <= 1
    })
}

fn sum_matches(w: &CoinWorld) -> bool {
    let sum = (0..w.n_coins()).filter(|&c| w.is_active(c)).count();
    let total: usize = (0..w.n_addresses()).map(|a| (0..w.n_coins()).filter(|&c| w.has_coin(a, c)).count()).sum();
    sum == total
}

fn criterion_2() -> Report {
    let start = Instant::now();
    let (mut worlds, mut soundness_bad, mut completeness_bad, mut oracle_bad, mut in_f_count) = (0u64, 0, 0, 0, 0);
    for na in 0..=3 {
        for nc in 0..=4 {
            for w in all_worlds(na, nc) {
                worlds += 1;
                let inv = check_inv(&w).all();
                if inv != inv_oracle(&w) {
                    oracle_bad += 1;
                }
                let matches = sum_matches(&w);
                if inv && !matches {
                    soundness_bad += 1;
                }
                if in_f(&w, &derived_balances(&w)) {
                    in_f_count += 1;
                    if matches != inv {
                        completeness_bad += 1;
                    }
                }
            }
        }
    }
    let cx = parse_world("addr a1 a2\ncoin c1 c2\nactive c1 c2\nhas a1 c2\nhas a2 c2\n")
        .expect("counterexample parses")
        .world;
    let cx_ok = sum_matches(&cx) && !check_inv(&cx).all() && !in_f(&cx, &derived_balances(&cx));
    let t = start.elapsed();
    report(
        soundness_bad == 0 && completeness_bad == 0 && oracle_bad == 0 && cx_ok && within(t, 60),
        format!(
            "{worlds} worlds: (a) {soundness_bad} exceptions, (b) {completeness_bad} exceptions over {in_f_count} worlds in f, \
             (c) counterexample {}; invariant oracle disagreements {oracle_bad}; {:.1}s (limit 60s)",
            if cx_ok { "as stated" } else { "WRONG" },
            t.as_secs_f64()
        ),
    )
}

fn criterion_3() -> Report {
    let (mut pairs, mut bad) = (0u64, 0u64);
    // the successor construction is complete where brute force is cheap
    let mut enum_bad = 0u64;
    for na in 0..=2 {
        for nc in 0..=3 {
            let all: Vec<CoinWorld> = all_worlds(na, nc).collect();
            for old in &all {
                let succ: HashSet<(usize, usize, CoinWorld)> = mint1_successors(old).into_iter().collect();
                for new in &all {
                    for a in 0..na {
                        for c in 0..nc {
                            if is_mint1(old, new, a, c).unwrap() != succ.contains(&(a, c, new.clone())) {
                                enum_bad += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut traces = 0u64;
    for na in 1..=3 {
        for nc in 0..=4 {
            for old in all_worlds(na, nc) {
                for (a, c, new) in mint1_successors(&old) {
                    pairs += 1;
                    let ok = is_mint1(&old, &new, a, c).unwrap()
                        && check_mint1_soundness(&old, &new, a, c).unwrap()
                        && check_inv(&old).all() == check_inv(&new).all();
                    bad += !ok as u64;
                }
                for a in 0..na {
                    let mut frontier = vec![vec![old.clone()]];
                    for _ in 0..3 {
                        let mut next = Vec::new();
                        for tr in &frontier {
                            for (b, _, w) in mint1_successors(tr.last().unwrap()) {
                                if b == a {
                                    let mut t2 = tr.clone();
                                    t2.push(w);
                                    traces += 1;
                                    let ok =
                                        is_mint_n_trace(&t2, a).unwrap() && check_mint_n_soundness(&t2, a).unwrap();
                                    bad += !ok as u64;
                                    next.push(t2);
                                }
                            }
                        }
                        frontier = next;
                    }
                }
            }
        }
    }
    report(
        bad == 0 && enum_bad == 0 && pairs > 0,
        format!("{pairs} mint1 pairs and {traces} mint traces (n <= 3): {bad} exceptions; pair enumeration mismatches {enum_bad}"),
    )
}

fn criterion_4() -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(FIDELITY_SEED);
    let v = Vocabulary::new(2, 1, 1);
    let formulas: Vec<_> = (0..50).map(|_| random_formula(&mut rng, &v, FormulaShape::default())).collect();
    let structures: Vec<_> = (0..200).map(|_| random_structure(&mut rng, &v, 6, 4, true)).collect();
    let identity = Partition::from_rgs((0..v.l).collect()).expect("identity is a growth string");
    let (mut checked, mut bad, mut true_count) = (0u64, 0u64, 0u64);
    for f in &formulas {
        let (q, pv) = partition_query(f, &v, &identity).expect("fragment formula");
        for s in &structures {
            let sl = is_sl_model(s, f).expect("closed formula");
            let pm = presburger_model_of(s, &pv).expect("structure fits the slots");
            let pres = check_model(&q, &pm).expect("total model");
            let back = structure_from_presburger(&pm, &pv, v.l).expect("model reads back");
            let sl_back = is_sl_model(&back, f).expect("closed formula");
            let same_shape = back.domain().len() == s.domain().len() && back.sums() == s.sums();
            checked += 1;
            true_count += sl as u64;
            bad += !(sl == pres && sl_back == sl && same_shape) as u64;
        }
        // and from the Presburger side: random models of eta
        for _ in 0..200 {
            let z = rng.gen_range(v.l..=pv.kt);
            let mut m = LiaModel::new();
            for i in 1..=pv.kt {
                let active = i <= z;
                m.insert(PresVar::Indicator(i), if active { rng.gen_range(1..=3) } else { 0 });
                m.insert(PresVar::Balance(i, 1), if active { rng.gen_range(0..=4) } else { 0 });
            }
            m.insert(PresVar::Nat(1), rng.gen_range(0..=4));
            let pres = check_model(&q, &m).expect("total model");
            let s = structure_from_presburger(&m, &pv, v.l).expect("model reads back");
            checked += 1;
            bad += (pres != is_sl_model(&s, f).expect("closed formula")) as u64;
        }
    }
    report(
        bad == 0,
        format!("50 formulas x (200 structures + 200 Presburger models): {checked} pairs, {true_count} satisfied structures, {bad} disagreements"),
    )
}

/// Set partitions of `{1..n}` by inserting each element into an existing
/// block or a new one.
fn partitions_oracle(n: usize) -> BTreeSet<Vec<Vec<usize>>> {
    let mut acc: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for e in 1..=n {
        let mut next = Vec::new();
        for p in &acc {
            for i in 0..p.len() {
                let mut q = p.clone();
                q[i].push(e);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![e]);
            next.push(q);
        }
        acc = next;
    }
    acc.into_iter().collect()
}

fn criterion_5() -> Report {
    const BELL: [usize; 7] = [1, 1, 2, 5, 15, 52, 203];
    let mut counts = Vec::new();
    let mut ok = true;
    for (l, &expected) in BELL.iter().enumerate() {
        let got = enumerate_partitions(l);
        let blocks: BTreeSet<Vec<Vec<usize>>> = got.iter().map(|p| p.blocks()).collect();
        let oracle = partitions_oracle(l);
        ok &= got.len() == expected && oracle.len() == expected && blocks == oracle;
        counts.push(got.len().to_string());
    }
    report(ok, format!("l=0..6: {} (independent enumeration agrees: {ok})", counts.join(",")))
}

const MINT1_INT_TOTAL_LINES: &[&str] = &[
    "(assert (= old-sum old-total) )",
    "(assert (distinct new-sum new-total) )",
    "   (= (new-bal a0) (+ (old-bal a0) 1))",
];

const DELTAS_LINES: &[&str] = &[
    "(assert (exists ((C Coin)) (= (ind C a0) (+(old-bal a0) 5))))",
    "   (= (new-bal a0) (+ (old-bal a0) 5))",
    "   (= (old-bal a1) (+ (new-bal a1) 3))",
    "(assert (distinct (+ old-sum 1) new-sum) )",
];

fn has_lines(path: &Path, lines: &[&str]) -> usize {
    let bytes = std::fs::read(path).unwrap_or_default();
    lines.iter().filter(|l| bytes.split(|b| *b == b'\n').any(|x| x == l.as_bytes())).count()
}

fn criterion_6() -> Report {
    let dir = tempfile::tempdir().expect("temp dir");
    let m = match write_family(dir.path()) {
        Ok(m) => m,
        Err(e) => return report(false, e.to_string()),
    };
    let top = std::fs::read_dir(dir.path())
        .expect("listing")
        .filter(|e| e.as_ref().is_ok_and(|e| e.path().extension().is_some_and(|x| x == "smt2")))
        .count();
    let mint = has_lines(&dir.path().join("mint1_int_total.smt2"), MINT1_INT_TOTAL_LINES);
    let deltas = has_lines(&dir.path().join("deltas_p5_m3_m1_int.smt2"), DELTAS_LINES);
    let roles_ok = m.benchmarks.iter().all(|e| match e.role {
        Role::Goal | Role::Lemma => e.expected == "UNSAT",
        Role::Consistency => e.expected == "SAT",
    });
    report(
        top == 31 && mint == MINT1_INT_TOTAL_LINES.len() && deltas == DELTAS_LINES.len() && roles_ok,
        format!(
            "{top} scripts; verbatim lines {mint}/{} (mint1 int total), {deltas}/{} (+5,-3,-1); manifest roles {}",
            MINT1_INT_TOTAL_LINES.len(),
            DELTAS_LINES.len(),
            if roles_ok { "ok" } else { "WRONG" }
        ),
    )
}

fn criterion_7() -> Report {
    let start = Instant::now();
    let halt = parse_machine("1: halt\n").expect("machine");
    let two = parse_machine("1: inc c1 -> 2\n2: halt\n").expect("machine");
    let lp = parse_machine("1: inc c1 -> 1\n2: halt\n").expect("machine");
    let mut witnesses = true;
    for (m, k, n) in [(&halt, 0, 4), (&two, 1, 8)] {
        let w = witness_model(m, k).expect("halting run");
        witnesses &= w.domain().len() == n && is_sl_model(&w, &build_reduction(m)).expect("closed");
    }
    let looping = simulate(&lp, 10_000) == Outcome::Running && witness_model(&lp, 3).is_err();
    let v = reduction_vocabulary();
    let bounds = SearchBounds::new(12, 14);
    let plain = find_model_opts(&build_reduction(&lp), &v, bounds, SearchOptions::default(), Execution::Parallel);
    let plain_ok = plain.as_ref().is_some_and(|s| is_sl_model(s, &build_reduction(&lp)).unwrap_or(false));
    let sym = SearchOptions { distinct: false, symmetry_breaking: true };
    let grouped = find_model_opts(&build_grouped_reduction(&lp), &v, bounds, sym, Execution::Parallel);
    let t = start.elapsed();
    let negative = plain.is_none();
    let found = match &plain {
        Some(s) => format!("model with {} addresses found (verified: {plain_ok})", s.domain().len()),
        None => "no model up to 12 addresses".into(),
    };
    let strengthened = match &grouped {
        Some(s) => format!("{} addresses", s.domain().len()),
        None => "none up to 12 addresses".into(),
    };
    report(
        witnesses && looping && negative && within(t, 180),
        format!(
            "witnesses {}; self-loop: {found}; with separator constraints: {strengthened}; {:.1}s (limit 180s)",
            if witnesses { "OK" } else { "FAILED" },
            t.as_secs_f64()
        ),
    )
}

fn criterion_8() -> Option<Report> {
    let oracle = SmtOracle::from_env()?;
    let mut solver = oracle.solver;
    solver.timeout_s = 60.0;
    let dir = tempfile::tempdir().expect("temp dir");
    let script = |name: &str, text: String| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).expect("write script");
        run(name, &p, &solver)
    };
    let mint = TransitionSpec::mint1();
    let plain = script("mint1_int.smt2", generate(&mint, EncodingKind::Int, VariantFlags::default()).unwrap().render());
    let total = script(
        "mint1_int_total.smt2",
        generate(&mint, EncodingKind::Int, VariantFlags::new(false, true)).unwrap().render(),
    );
    let cons = script("consistency_int.smt2", generate_consistency(EncodingKind::Int).render());
    let ok = plain.verdict == SolverVerdict::Unsat
        && plain.time_s <= 60.0
        && cons.verdict == SolverVerdict::Sat
        && cons.time_s <= 60.0
        && total.verdict == plain.verdict;
    Some(report(
        ok,
        format!(
            "{}: mint1_int {} ({:.2}s), consistency_int {} ({:.2}s), mint1_int_total {} (same verdict: {})",
            solver.name,
            plain.verdict,
            plain.time_s,
            cons.verdict,
            cons.time_s,
            total.verdict,
            total.verdict == plain.verdict
        ),
    ))
}

fn main() {
    type Run = Box<dyn Fn() -> Option<Report>>;
    let runs: Vec<(u32, Run)> = vec![
        (1, Box::new(|| Some(criterion_1()))),
        (2, Box::new(|| Some(criterion_2()))),
        (3, Box::new(|| Some(criterion_3()))),
        (4, Box::new(|| Some(criterion_4()))),
        (5, Box::new(|| Some(criterion_5()))),
        (6, Box::new(|| Some(criterion_6()))),
        (7, Box::new(|| Some(criterion_7()))),
        (8, Box::new(criterion_8)),
    ];
    let mut unexpected = Vec::new();
    for (n, f) in runs {
        match f() {
            None => println!("criterion {n}: SKIP (no SMT solver available)"),
            Some(o) => {
                let known = KNOWN_FAILURES.contains(&n);
                let tag = match (o.pass, known) {
                    (true, _) => "PASS",
                    (false, true) => "FAIL (known)",
                    (false, false) => "FAIL",
                };
                println!("criterion {n}: {tag}: {}", o.detail);
                if o.pass == known {
                    unexpected.push(n);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("criteria with unexpected results: {unexpected:?}");
        std::process::exit(1);
    }
}
