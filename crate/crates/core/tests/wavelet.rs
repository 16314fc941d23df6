mod common;

use common::*;
use hybridburst::seed;
use hybridburst::wavelet::{decompose, deepest_octave, FgnGenerator, FilterBank};
use hybridburst::{dwt_logscale, estimate_hurst, fgn_generate, Error};
use rand_distr::{Distribution, StandardNormal};

fn lag1(xs: &[f64]) -> (f64, f64) {
    let prods: Vec<f64> = xs.windows(2).map(|w| w[0] * w[1]).collect();
    mean_se(&prods)
}

#[test]
fn white_noise_is_flat() {
    let mut rng = seed::stream(31);
    let xs: Vec<f64> = (0..1 << 20).map(|_| StandardNormal.sample(&mut rng)).collect();
    let d = dwt_logscale(&xs, 3, 16).unwrap();
    let e = estimate_hurst(&d, 4, 16).unwrap();
    assert!(e.covers(0.5), "{e:?}");
    assert!(e.ci_low < e.h && e.h < e.ci_high);
    assert!((e.slope).abs() < 0.02);
}

#[test]
fn fgn_autocovariance_recovered() {
    let half = fgn_generate(0.5, 1 << 20, 32).unwrap();
    let (r, se) = lag1(&half);
    assert!(within(r, 0.0, se, 3.0), "{r} ± {se}");
    let x = fgn_generate(0.8, 1 << 20, 33).unwrap();
    let (r, _) = lag1(&x);
    let gamma1 = 0.5 * (2f64.powf(1.6) - 2.0);
    assert!((gamma1 - 0.5157).abs() < 1e-4);
    // neighbouring products are correlated; long memory inflates the naive SE
    assert!((r - gamma1).abs() < 0.02, "{r} vs {gamma1}");
    let sq: Vec<f64> = half.iter().map(|v| v * v).collect();
    let (v, vse) = mean_se(&sq);
    assert!(within(v, 1.0, vse, 3.0));
}

#[test]
fn fgn_estimate_and_coverage() {
    let n = 1 << 20;
    let generator = FgnGenerator::new(0.8, n).unwrap();
    let j2 = deepest_octave(n, 3).unwrap();
    let estimates: Vec<_> = (0..100)
        .map(|s| {
            // octaves below 5 still carry visible fGn spectral curvature
            let d = dwt_logscale(&generator.generate(3_400 + s), 3, j2).unwrap();
            estimate_hurst(&d, 5, j2).unwrap()
        })
        .collect();
    assert!((0.77..=0.83).contains(&estimates[0].h));
    assert!(estimates.iter().all(|e| (e.h - 0.8).abs() <= 0.05));
    let covered = estimates.iter().filter(|e| e.covers(0.8)).count();
    assert!(covered >= 90, "{covered} of 100");
}

#[test]
fn energy_is_conserved() {
    let x = fgn_generate(0.7, 1 << 14, 35).unwrap();
    let total: f64 = x.iter().map(|v| v * v).sum();
    for order in 1..=10 {
        let bank = FilterBank::daubechies(order).unwrap();
        let dec = decompose(&x, &bank, 30);
        let kept: f64 = dec
            .octaves
            .iter()
            .flat_map(|o| o.details.iter())
            .chain(dec.approximation.iter())
            .map(|v| v * v)
            .sum();
        assert!(((kept - total) / total).abs() < 1e-9, "order {order}");
    }
}

#[test]
fn polynomials_are_annihilated() {
    let n = 1 << 12;
    for order in 1..=10 {
        let bank = FilterBank::daubechies(order).unwrap();
        for degree in 0..order {
            // centred to keep the monomial well scaled
            let x: Vec<f64> = (0..n).map(|k| ((k as f64 - n as f64 / 2.0) / n as f64).powi(degree as i32)).collect();
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let dec = decompose(&x, &bank, 4);
            for o in &dec.octaves {
                let worst = o.details[..o.clean].iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(worst <= 1e-6 * scale, "order {order} degree {degree} octave {}: {worst}", o.j);
            }
        }
    }
}

#[test]
fn diagram_ignores_added_constant() {
    let x = fgn_generate(0.6, 1 << 14, 36).unwrap();
    let shifted: Vec<f64> = x.iter().map(|v| v + 1000.0).collect();
    let a = dwt_logscale(&x, 3, 30).unwrap();
    let b = dwt_logscale(&shifted, 3, 30).unwrap();
    for (p, q) in a.octaves.iter().zip(&b.octaves) {
        assert!((p.log2_mu_j - q.log2_mu_j).abs() < 1e-6, "octave {}", p.j);
    }
}

#[test]
fn constant_series_is_degenerate() {
    let d = dwt_logscale(&vec![1.0; 1 << 12], 3, 30).unwrap();
    assert!(d.is_degenerate());
    assert!(matches!(estimate_hurst(&d, 2, 6), Err(Error::DegenerateDiagram(_))));
}

#[test]
fn diagram_csv_layout() {
    let d = dwt_logscale(&fgn_generate(0.7, 1 << 12, 37).unwrap(), 2, 30).unwrap();
    let mut out = Vec::new();
    d.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("octave,n_coeffs,log2_variance,weight\n"));
    assert_eq!(text.lines().count(), d.octaves.len() + 1);
    assert!(d.octaves.windows(2).all(|w| w[1].n_j <= w[0].n_j / 2 + 1));
    assert!(d.octaves.iter().all(|o| o.weight > 0.0 && o.n_j >= 4));
}
