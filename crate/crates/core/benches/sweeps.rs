use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rug::Rational;
use transfinite::evaluator::{eval_many, LogPolar};
use transfinite::ordinal::Ordinal;
use transfinite::par::Strategy;
use transfinite::pointset::Arc;
use transfinite::probe::{condition_m_sweep, DilationRule, ProbePoint};
use transfinite::schedule::{build_finite_schedule, ZeroSchedule};

const PREC: u32 = 200;
const STRATEGIES: [(&str, Strategy); 2] = [("parallel", Strategy::Parallel), ("sequential", Strategy::Sequential)];

fn schedule() -> ZeroSchedule {
    let host = Arc::new(Rational::from((1, 8)), Rational::from((1, 32))).unwrap();
    build_finite_schedule(&Ordinal::finite(3), 1, &host, 12).unwrap()
}

fn annulus(samples: u32) -> Vec<LogPolar> {
    (0..samples)
        .map(|i| {
            LogPolar::from_log_turn(
                Rational::from((3 * samples + 2 * i, samples)),
                Rational::from((i, samples)),
                PREC,
            )
        })
        .collect()
}

fn grid_eval(c: &mut Criterion) {
    let s = schedule();
    let mut group = c.benchmark_group("grid_eval");
    for samples in [64u32, 512] {
        let pts = annulus(samples);
        for (name, strategy) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, samples), &pts, |b, pts| {
                b.iter(|| black_box(eval_many(&s, pts, 12, strategy)))
            });
        }
    }
    group.finish();
}

fn condition_m(c: &mut Criterion) {
    let s = schedule();
    let r = Rational::from((1, 2));
    let rule = DilationRule::RatioPlus { r: r.clone() };
    let c1 = s.sources()[0].set.enumerate_points(1).unwrap().remove(0);
    let points = [
        ProbePoint { turn: c1, r: r.clone() },
        ProbePoint {
            turn: Rational::from((5, 8)),
            r,
        },
    ];
    let js = |n: usize| rule.j(s.radii(), n);
    let mut group = c.benchmark_group("condition_m_sweep");
    group.sample_size(10);
    for (name, strategy) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(condition_m_sweep(&s, &points, &js, 5..=9, 12, PREC, strategy).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, grid_eval, condition_m);
criterion_main!(benches);
