mod common;

use hybridburst::seed;
use hybridburst::ParetoDist;
use common::*;

fn draws(d: &ParetoDist, n: usize, s: u64) -> Vec<f64> {
    let mut rng = seed::stream(s);
    (0..n).map(|_| d.sample(&mut rng)).collect()
}

#[test]
fn light_tail_sample_mean() {
    let d = ParetoDist::from_mean(1.0, 2.0).unwrap();
    assert_eq!(d.x_m(), 0.5);
    // infinite variance at alpha = 2 as well, so use median of means
    let xs = draws(&d, 1_000_000, 11);
    let mut means: Vec<f64> = xs.chunks(10_000).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    means.sort_by(f64::total_cmp);
    let med = 0.5 * (means[49] + means[50]);
    assert!((med - 1.0).abs() < 0.01, "median of means {med}");
}

#[test]
fn heavy_tail_median_of_means() {
    let d = ParetoDist::from_mean(100.0, 1.4).unwrap();
    let xs = draws(&d, 10_000_000, 12);
    let mut means: Vec<f64> = xs.chunks(100_000).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    means.sort_by(f64::total_cmp);
    let med = 0.5 * (means[49] + means[50]);
    // block means of an infinite-variance law are right-skewed, so the median
    // sits a little below the mean
    assert!(med > 95.0 && med < 101.0, "median of means {med}");
    let frac = xs.iter().filter(|&&x| x > 2.0 * d.x_m()).count() as f64 / xs.len() as f64;
    let p = 2f64.powf(-1.4);
    assert!(within(frac, p, binom_se(p, xs.len()), 3.0), "{frac} vs {p}");
}

#[test]
fn quantiles_match_closed_form() {
    for (alpha, mean) in [(1.4, 100.0), (1.2, 12_000.0), (1.8, 1_200.0)] {
        let d = ParetoDist::from_mean(mean, alpha).unwrap();
        let mut xs = draws(&d, 1_000_000, 13);
        xs.sort_by(f64::total_cmp);
        for q in [0.1, 0.5, 0.9] {
            let emp = xs[(q * xs.len() as f64) as usize];
            let exact = d.x_m() * (1.0 - q).powf(-1.0 / alpha);
            assert!((emp / exact - 1.0).abs() < 0.01, "alpha {alpha} q {q}: {emp} vs {exact}");
        }
        assert!(xs[0] >= d.x_m());
    }
}

#[test]
fn equilibrium_cdf_on_grid() {
    let d = ParetoDist::from_mean(100.0, 1.4).unwrap();
    let n = 1_000_000;
    let mut rng = seed::stream(14);
    let mut xs: Vec<f64> = (0..n).map(|_| d.equilibrium_sample(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let grid: Vec<f64> = (1..=20).map(|i| d.x_m() * 0.1 * 1.5f64.powi(i)).collect();
    for z in grid {
        let emp = xs.partition_point(|&x| x <= z) as f64 / n as f64;
        let p = d.equilibrium_cdf(z);
        assert!(within(emp, p, binom_se(p, n), 3.0), "z {z}: {emp} vs {p}");
    }
    let below = xs.partition_point(|&x| x <= d.x_m()) as f64 / n as f64;
    assert!(within(below, 2.0 / 7.0, binom_se(2.0 / 7.0, n), 3.0));
    let at_two = 1.0 - d.integrated_tail(2.0 * d.x_m()) / d.mean();
    assert!((d.equilibrium_cdf(2.0 * d.x_m()) - at_two).abs() < 1e-15);
}

#[test]
fn equilibrium_of_nearly_rigid_law() {
    // large alpha concentrates the law near x_m ≈ mean; the residual is then
    // close to uniform on [0, mean]
    let d = ParetoDist::from_mean(10.0, 50.0).unwrap();
    let mut rng = seed::stream(15);
    let n = 200_000;
    let m = (0..n).map(|_| d.equilibrium_sample(&mut rng)).sum::<f64>() / n as f64;
    // quadrature of z·H̄(z)/μ
    let (mut acc, steps) = (0.0, 200_000);
    let top = 100.0 * d.mean();
    let h = top / steps as f64;
    for k in 0..steps {
        let z = (k as f64 + 0.5) * h;
        acc += z * d.tail(z) / d.mean() * h;
    }
    assert!((m / acc - 1.0).abs() < 0.05, "{m} vs {acc}");
    assert!((m / (d.mean() / 2.0) - 1.0).abs() < 0.05);
}

#[test]
fn integrated_tail_examples() {
    let d = ParetoDist::from_mean(12_000.0, 1.2).unwrap();
    assert_eq!(d.x_m(), 2000.0);
    assert_eq!(d.tail(2000.0), 1.0);
    assert_eq!(d.integrated_tail(0.0), d.mean());
    let exact = 2000f64.powf(1.2) * 4000f64.powf(-0.2) / 0.2;
    assert!((d.integrated_tail(4000.0) / exact - 1.0).abs() < 1e-12);
    for x in [2000.0, 5e3, 1e5, 1e8] {
        let ratio = d.integrated_tail(x) * 0.2 * x.powf(0.2) / 2000f64.powf(1.2);
        assert!((ratio - 1.0).abs() < 1e-12);
    }
}
