use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sumlogic::coin::{check_inv, derived_balances, find_world};
use sumlogic::exec::Execution;
use sumlogic::gen::{fragment_corpus, FormulaShape};
use sumlogic::parser::parse_formula;
use sumlogic::reduction::{decide, InternalOracle, Verdict};
use sumlogic::search::{find_model_with, SearchBounds};
use sumlogic::sl::Vocabulary;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn decide_corpus(c: &mut Criterion) {
    let corpus = fragment_corpus(7, 40, 3, 2, FormulaShape::default());
    let oracle = InternalOracle::default();
    let mut g = c.benchmark_group("decide");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("corpus40", name), &exec, |b, &exec| {
            b.iter(|| {
                corpus.iter().filter(|(v, f)| decide(f, v, &oracle, exec).unwrap().verdict == Verdict::Sat).count()
            })
        });
    }
    g.finish();
}

fn coin_worlds(c: &mut Criterion) {
    let mut g = c.benchmark_group("coin_worlds");
    g.sample_size(10);
    for (name, exec) in MODES {
        // No world satisfies this, so the whole space is visited.
        g.bench_with_input(BenchmarkId::new("exhaustive_3x4", name), &exec, |b, &exec| {
            b.iter(|| {
                find_world(3, 4, exec, |w| {
                    let bs = derived_balances(w);
                    check_inv(w).all() && bs.bal.iter().sum::<u64>() != bs.sum
                })
            })
        });
    }
    g.finish();
}

fn model_search(c: &mut Criterion) {
    let v = Vocabulary::new(2, 1, 1);
    // No model within the bounds: 7 cannot be spread evenly over 2..=4 addresses.
    let f = parse_formula("(forall x. b1(x) = c1) & !(a1 = a2) & s1 = 7", &v).unwrap();
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new("four_addresses", name), &exec, |b, &exec| {
            b.iter(|| find_model_with(black_box(&f), &v, SearchBounds::new(4, 4), false, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, decide_corpus, coin_worlds, model_search);
criterion_main!(benches);
