use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kframe::experiment::{run_suite, ExperimentConfig};
use kframe::formula::parse;
use kframe::semantics::{refuting_valuation_with, valid_on_frame_with};
use kframe::{Exec, Frame, Relation};

const EXECS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

// Strict order on n worlds: transitive, so the formula below is valid and
// the search has to visit every valuation.
fn order(n: usize) -> Frame {
    Frame::unimodal("a", Relation::from_fn(n, |x, y| x < y))
}

fn validity(c: &mut Criterion) {
    let phi = parse("<a>(p0 & <a>p1) -> <a>p1").unwrap();
    let mut g = c.benchmark_group("valid_on_frame");
    g.sample_size(10);
    for n in [7, 9] {
        let f = order(n);
        for (name, exec) in EXECS {
            g.bench_with_input(BenchmarkId::new(name, n), &f, |b, f| {
                b.iter(|| assert!(valid_on_frame_with(f, &phi, 22, exec).unwrap()))
            });
        }
    }
    g.finish();

    // the refutation lives near the end of the search order
    let phi = parse("p0 & p1 -> [a]p0").unwrap();
    let f = order(9);
    let mut g = c.benchmark_group("refuting_valuation");
    g.sample_size(10);
    for (name, exec) in EXECS {
        g.bench_function(name, |b| b.iter(|| refuting_valuation_with(&f, &phi, 22, exec).unwrap()));
    }
    g.finish();
}

fn suites(c: &mut Criterion) {
    let cfg = ExperimentConfig {
        frame_count: 40,
        ..ExperimentConfig::default()
    };
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    for suite in ["refinement", "correspondence", "sums"] {
        for (name, exec) in EXECS {
            g.bench_with_input(BenchmarkId::new(name, suite), &suite, |b, s| {
                b.iter(|| assert!(run_suite(s, &cfg, exec).unwrap().passed))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, validity, suites);
criterion_main!(benches);
