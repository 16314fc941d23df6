mod common;

use common::*;
use hybridburst::seed::{self, Domain};
use hybridburst::sessions::tick_events;
use hybridburst::{busy_servers, generate_sessions, SessionParams, StartMode};

fn initial_count(params: &SessionParams, s: u64) -> f64 {
    let set = generate_sessions(params, 0.0, StartMode::ExactStationary, s).unwrap();
    assert!(set.sessions().iter().all(|x| x.start == 0.0));
    set.len() as f64
}

#[test]
fn initial_population_is_poisson_mean() {
    for (lambda, alpha, mean, target) in [(1.0, 1.2, 1200.0, 1200.0), (5.0, 1.2, 120.0, 600.0)] {
        let p = SessionParams::from_means(lambda, alpha, mean).unwrap();
        let xs: Vec<f64> = (0..10_000).map(|i| initial_count(&p, seed::derive(7, Domain::Replicate, i))).collect();
        let (m, se) = mean_se(&xs);
        assert!(within(m, target, se, 3.0), "{m} ± {se} vs {target}");
    }
}

#[test]
fn dispersion_about_stationary_mean() {
    // One long path of this long-memory process does not self-average (its
    // dispersion ratio ranges over 0.7..0.9 across seeds at 10⁶ ticks), so the
    // Poisson marginal is checked on per-path dispersions across independent
    // paths.
    let p = SessionParams::from_means(1.0, 1.2, 1200.0).unwrap();
    let ratios: Vec<f64> = (0..400)
        .map(|i| {
            let set = generate_sessions(&p, 1e4, StartMode::ExactStationary, seed::derive(8, Domain::Replicate, i)).unwrap();
            let b = busy_servers(&set, 10_000);
            b.iter().map(|&x| (x as f64 - 1200.0).powi(2)).sum::<f64>() / b.len() as f64 / 1200.0
        })
        .collect();
    let (m, se) = mean_se(&ratios);
    assert!(within(m, 1.0, se, 3.0), "{m} ± {se}");
}

#[test]
fn busy_count_changes_only_through_events() {
    let p = SessionParams::from_means(5.0, 1.2, 120.0).unwrap();
    let set = generate_sessions(&p, 20_000.0, StartMode::ExactStationary, 9).unwrap();
    let b = busy_servers(&set, 20_000);
    let ev = tick_events(&set, 20_000);
    assert!(b.iter().all(|&x| x >= 0));
    for k in 0..b.len() - 1 {
        assert!((b[k + 1] - b[k]).unsigned_abs() <= ev[k], "tick {k}");
    }
}

#[test]
fn generation_is_deterministic() {
    let p = SessionParams::from_means(1.0, 1.8, 1200.0).unwrap();
    let a = generate_sessions(&p, 5e4, StartMode::ExactStationary, 10).unwrap();
    let b = generate_sessions(&p, 5e4, StartMode::ExactStationary, 10).unwrap();
    assert_eq!(a, b);
    let c = generate_sessions(&p, 5e4, StartMode::Warmup(1000), 10).unwrap();
    assert!(c.sessions().iter().all(|s| s.end() > 0.0 && s.start < 5e4));
    assert!(c.sessions().windows(2).all(|w| w[0].start <= w[1].start));
}

fn ensemble_b0(p: &SessionParams, mode: StartMode, n: u64, tag: u64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let set = generate_sessions(p, 1.0, mode, seed::derive(tag, Domain::Replicate, i)).unwrap();
            busy_servers(&set, 1)[0] as f64
        })
        .collect()
}

#[test]
fn warmup_agrees_with_exact_start_for_light_tails() {
    let p = SessionParams::from_means(1.0, 2.5, 100.0).unwrap();
    let exact = ensemble_b0(&p, StartMode::ExactStationary, 4000, 11);
    let warm = ensemble_b0(&p, StartMode::Warmup(5_000), 4000, 12);
    let (me, se_e) = mean_se(&exact);
    let (mw, se_w) = mean_se(&warm);
    assert!(within(me - mw, 0.0, (se_e * se_e + se_w * se_w).sqrt(), 3.0), "{me} vs {mw}");
}

#[test]
fn warmup_deficit_is_the_integrated_tail() {
    // sessions older than the discard are missing: E B(0) = λ(μ_V − H̄_I(discard))
    let p = SessionParams::from_means(1.0, 1.2, 1200.0).unwrap();
    let discard = 60_000;
    let warm = ensemble_b0(&p, StartMode::Warmup(discard), 2000, 13);
    let (m, se) = mean_se(&warm);
    let target = p.lambda() * (p.lifetime().mean() - p.lifetime().integrated_tail(discard as f64));
    assert!(within(m, target, se, 3.0), "{m} ± {se} vs {target}");
    assert!(target < 0.8 * p.mean_occupancy());
}
