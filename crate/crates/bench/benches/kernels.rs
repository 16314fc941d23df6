use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use hybridburst::seed;
use hybridburst::{dwt_logscale, fgn_generate, solve_pi11, synthesize, OnOffParams, ParetoDist, SessionParams, StartMode};

fn pareto_sampling(c: &mut Criterion) {
    let dist = ParetoDist::from_mean(100.0, 1.4).unwrap();
    c.bench_function("pareto_sample_1e5", |b| {
        b.iter_batched(
            || seed::stream(7),
            |mut rng| {
                let mut acc = 0.0;
                for _ in 0..100_000 {
                    acc += dist.sample(&mut rng);
                }
                black_box(acc)
            },
            BatchSize::SmallInput,
        )
    });
}

fn renewal_solver(c: &mut Criterion) {
    let oo = OnOffParams::from_means(1.4, 100.0, 1.4, 100.0).unwrap();
    let dt = oo.default_dt();
    c.bench_function("solve_pi11_horizon_1e4", |b| b.iter(|| black_box(solve_pi11(&oo, dt, 1e4).unwrap())));
}

fn logscale(c: &mut Criterion) {
    let x = fgn_generate(0.8, 1 << 18, 1).unwrap();
    c.bench_function("dwt_logscale_2p18_db3", |b| b.iter(|| black_box(dwt_logscale(&x, 3, 14).unwrap())));
}

fn synthesis(c: &mut Criterion) {
    let sess = SessionParams::from_means(5.0, 1.2, 120.0).unwrap();
    let oo = OnOffParams::from_means(1.4, 100.0, 1.4, 100.0).unwrap();
    let mut group = c.benchmark_group("synthesize");
    group.sample_size(10);
    group.bench_function("series2_2p16", |b| {
        b.iter(|| black_box(synthesize(&sess, &oo, 1 << 16, StartMode::ExactStationary, 2).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, pareto_sampling, renewal_solver, logscale, synthesis);
criterion_main!(benches);
