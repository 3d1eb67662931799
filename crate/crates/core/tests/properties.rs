use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sumlogic::cm2::{build_pi, step, Config, Counter, Instr, TwoCounterMachine, PI_VARS};
use sumlogic::coin::{
    all_worlds, build_counting, build_counting_pair, check_explicit_axioms, check_inv, derived_balances, error_metrics,
    mint1_successors, CoinWorld,
};
use sumlogic::exec::Execution;
use sumlogic::gen::{random_formula, FormulaShape};
use sumlogic::lia::{check_model, solve, LiaModel, LiaResult, LinExpr, PresFormula, PresVar, SolveOptions};
use sumlogic::parser::{parse_formula, print_formula};
use sumlogic::reduction::{apply_partition, decide, enumerate_partitions, InternalOracle};
use sumlogic::search::{find_model, find_model_with, search_size_opts, SearchBounds, SearchOptions};
use sumlogic::sl::{is_sl_model, well_formed, Formula, Vocabulary};

fn formula_from_seed(seed: u64, l: usize, m: usize, d: usize) -> (Vocabulary, Formula) {
    let v = Vocabulary::new(l, m, d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_formula(&mut rng, &v, FormulaShape { max_length: 10, ..FormulaShape::default() });
    (v, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>(), l in 0usize..=3, m in 1usize..=2, d in 0usize..=2) {
        let (v, f) = formula_from_seed(seed, l, m, d);
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text, &v).unwrap(), f);
    }

    #[test]
    fn partitioning_stays_in_the_fragment(seed in any::<u64>(), l in 0usize..=3, d in 0usize..=2) {
        let (v, f) = formula_from_seed(seed, l, 1, d);
        for p in enumerate_partitions(l) {
            let vp = Vocabulary { l: p.num_blocks(), ..v };
            prop_assert!(well_formed(&vp, &apply_partition(&f, &p)).is_ok());
        }
    }

    #[test]
    fn identity_partition_changes_nothing(seed in any::<u64>(), l in 0usize..=3) {
        let (_, f) = formula_from_seed(seed, l, 1, 1);
        let finest = enumerate_partitions(l).pop().unwrap();
        prop_assert_eq!(finest.num_blocks(), l);
        prop_assert_eq!(apply_partition(&f, &finest), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A model exists iff some partitioned formula has a distinct one.
    #[test]
    fn models_come_from_distinct_models(seed in any::<u64>(), l in 0usize..=3) {
        let (v, f) = formula_from_seed(seed, l, 1, 1);
        let bounds = SearchBounds::new(3, 4);
        let direct = find_model_with(&f, &v, bounds, false, Execution::Sequential).is_some();
        let via = enumerate_partitions(l).iter().any(|p| {
            let vp = Vocabulary { l: p.num_blocks(), ..v };
            find_model_with(&apply_partition(&f, p), &vp, bounds, true, Execution::Sequential).is_some()
        });
        prop_assert_eq!(direct, via);
    }

    #[test]
    fn search_returns_models_within_bounds_and_is_monotone(seed in any::<u64>(), l in 0usize..=2) {
        let (v, f) = formula_from_seed(seed, l, 1, 1);
        let small = SearchBounds::new(2, 3);
        if let Some(s) = find_model(&f, &v, small) {
            prop_assert!(is_sl_model(&s, &f).unwrap());
            prop_assert!(s.domain().len() <= 2);
            prop_assert!(s.nat_consts().iter().all(|c| *c <= 3));
            prop_assert!((1..=v.m).all(|j| s.balance_table(j).unwrap().iter().all(|b| *b <= 3)));
            prop_assert!(find_model(&f, &v, SearchBounds::new(3, 4)).is_some());
        }
    }

    #[test]
    fn symmetry_breaking_keeps_satisfiability(seed in any::<u64>(), l in 0usize..=3, n in 0usize..=3) {
        let (v, f) = formula_from_seed(seed, l, 1, 1);
        let plain = search_size_opts(&f, &v, n, 3, SearchOptions::default());
        let sym = search_size_opts(&f, &v, n, 3, SearchOptions { distinct: false, symmetry_breaking: true });
        prop_assert_eq!(plain.is_some(), sym.is_some());
        if let Some(s) = sym {
            prop_assert!(is_sl_model(&s, &f).unwrap());
        }
    }

    #[test]
    fn execution_modes_agree(seed in any::<u64>(), l in 0usize..=3) {
        let (v, f) = formula_from_seed(seed, l, 1, 2);
        let o = InternalOracle::default();
        prop_assert_eq!(decide(&f, &v, &o, Execution::Sequential).unwrap(), decide(&f, &v, &o, Execution::Parallel).unwrap());
    }
}

const LIA_VARS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

fn lin(nv: usize) -> impl Strategy<Value = LinExpr> {
    (proptest::collection::vec(-8i64..=8, nv), -8i64..=8).prop_map(|(cs, k)| {
        let coeffs: BTreeMap<PresVar, i64> =
            LIA_VARS.iter().zip(cs).filter(|(_, c)| *c != 0).map(|(n, c)| (PresVar::Named(n.to_string()), c)).collect();
        LinExpr { coeffs, constant: k }
    })
}

fn atom(nv: usize) -> impl Strategy<Value = PresFormula> {
    (lin(nv), any::<bool>(), any::<bool>()).prop_map(|(e, eq, neg)| {
        let a = if eq { PresFormula::eq(e, LinExpr::constant(0)) } else { PresFormula::le(e, LinExpr::constant(0)) };
        if neg {
            PresFormula::not(a)
        } else {
            a
        }
    })
}

fn lia_formula(nv: usize) -> impl Strategy<Value = PresFormula> {
    proptest::collection::vec(proptest::collection::vec(atom(nv), 1..=3), 1..=3)
        .prop_map(|ds| PresFormula::Or(ds.into_iter().map(PresFormula::And).collect()))
}

fn exhaustive(f: &PresFormula, m: &mut LiaModel, vars: &[&str], max: u64) -> bool {
    let Some((first, rest)) = vars.split_first() else {
        return check_model(f, m).unwrap();
    };
    (0..=max).any(|val| {
        m.insert(PresVar::Named(first.to_string()), val);
        exhaustive(f, m, rest, max)
    })
}

/// Soundness always; completeness wherever enumeration finds a solution.
fn agrees_with_enumeration(f: &PresFormula, nv: usize, max: u64) -> Result<(), TestCaseError> {
    match solve(f, &SolveOptions::default()).unwrap() {
        LiaResult::Sat(mut m) => {
            for n in &LIA_VARS[..nv] {
                m.entry(PresVar::Named(n.to_string())).or_insert(0);
            }
            prop_assert!(check_model(f, &m).unwrap());
        }
        LiaResult::Unsat => prop_assert!(!exhaustive(f, &mut LiaModel::new(), &LIA_VARS[..nv], max)),
        LiaResult::Incomplete(r) => prop_assert!(false, "budget exhausted: {}", r),
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn lia_agrees_with_enumeration(f in lia_formula(3)) {
        agrees_with_enumeration(&f, 3, 64)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lia_agrees_with_enumeration_six_constants(f in lia_formula(6)) {
        agrees_with_enumeration(&f, 6, 5)?;
    }
}

fn machine() -> impl Strategy<Value = TwoCounterMachine> {
    (1usize..=4).prop_flat_map(|n| {
        let instr = (0u8..2, any::<bool>(), 1..=n, 1..=n).prop_map(|(k, c2, a, b)| {
            let c = if c2 { Counter::C2 } else { Counter::C1 };
            if k == 0 {
                Instr::Inc(c, a)
            } else {
                Instr::DecOrJz(c, a, b)
            }
        });
        (proptest::collection::vec(instr, n), 0..n).prop_map(|(mut is, h)| {
            is[h] = Instr::Halt;
            TwoCounterMachine::new(is).unwrap()
        })
    })
}

fn pinned(vars: &[&str], vals: [u64; 3]) -> Vec<PresFormula> {
    vars.iter()
        .zip(vals)
        .map(|(n, v)| PresFormula::eq(LinExpr::var(PresVar::Named(n.to_string())), LinExpr::constant(v as i64)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// With the pre-state pinned, the solver's post-state is exactly one step
    /// (a stutter at the halting line).
    #[test]
    fn transition_formula_is_the_step_relation(m in machine()) {
        let pi = build_pi(&m);
        let lines = m.instructions().len();
        for pc in 1..=lines {
            for c1 in 0..=3u64 {
                for c2 in 0..=3u64 {
                    let pre = Config { pc, c1, c2 };
                    let post = step(&m, pre).unwrap_or(pre);
                    let mut parts = vec![pi.clone()];
                    parts.extend(pinned(&PI_VARS[..3], [c1 + 1, c2 + 1, pc as u64]));
                    let q = PresFormula::And(parts.clone());
                    let LiaResult::Sat(model) = solve(&q, &SolveOptions::default()).unwrap() else {
                        return Err(TestCaseError::fail("no successor"));
                    };
                    let got = |n: &str| model[&PresVar::Named(n.to_string())];
                    prop_assert_eq!((got("c1'"), got("c2'"), got("p'")), (post.c1 + 1, post.c2 + 1, post.pc as u64));
                    parts.push(PresFormula::not(PresFormula::And(pinned(&PI_VARS[3..], [post.c1 + 1, post.c2 + 1, post.pc as u64]))));
                    prop_assert_eq!(solve(&PresFormula::And(parts), &SolveOptions::default()).unwrap(), LiaResult::Unsat);
                }
            }
        }
    }
}

fn small_worlds() -> impl Iterator<Item = CoinWorld> {
    (0..=3).flat_map(|na| (0..=4).flat_map(move |nc| all_worlds(na, nc)))
}

#[test]
fn counting_functions_satisfy_the_axioms() {
    let mut n = 0;
    for w in small_worlds().filter(|w| check_inv(w).all()) {
        let bs = derived_balances(&w);
        let cf = build_counting(&w, &bs).unwrap();
        assert!(check_explicit_axioms(&w, &bs, &cf).unwrap().holds());
        n += 1;
    }
    assert_eq!(n, 498);
}

#[test]
fn one_numbering_serves_both_sides_of_a_mint() {
    for w in small_worlds().filter(|w| check_inv(w).all() && w.n_addresses() <= 2) {
        for (_, _, new) in mint1_successors(&w) {
            let cf = build_counting_pair(&w, &new).unwrap();
            for x in [&w, &new] {
                assert!(check_explicit_axioms(x, &derived_balances(x), &cf).unwrap().holds());
            }
        }
    }
}

#[test]
fn balance_identity_when_errors_are_one_sided() {
    for w in small_worlds() {
        let m = error_metrics(&w);
        if m.v_leq == 0 || m.v_geq == 0 {
            let bs = derived_balances(&w);
            let total: u64 = bs.bal.iter().sum();
            assert_eq!(total as i64, bs.sum as i64 + m.v_geq as i64 - m.v_leq as i64, "{w:?}");
        }
    }
}
