use hybridburst::onoff::AutocovTable;
use hybridburst::scaling::{c_from_table, hurst_exponents, VarianceProfile};
use hybridburst::{
    c_constant, classify, hurst_formulas, r_tail_asymptote, solve_pi11, variance_profile, CaseId, ExponentialDist,
    OnOffParams, ParetoDist, Quadrature, SessionParams,
};

fn table_onoff() -> OnOffParams {
    OnOffParams::from_means(1.4, 100.0, 1.4, 100.0).unwrap()
}

#[test]
fn frozen_covariance_with_exponential_lifetime() {
    let sigma_w_sq = 0.25;
    for m in [10.0, 250.0] {
        let life = ExponentialDist::new(m).unwrap();
        let dt = m / 400.0;
        let table = AutocovTable::frozen(dt, 0.5, 12_001);
        assert_eq!(table.values()[0], sigma_w_sq);
        let c = c_from_table(&table, &life, sigma_w_sq, 0.0, 0.5).unwrap();
        assert!((c.value / (sigma_w_sq * m * m) - 1.0).abs() < 1e-5, "m {m}: {}", c.value);
        assert!(c.tail_correction < 1e-6 * c.value);
    }
}

#[test]
fn series_four_constant_self_converges() {
    let oo = table_onoff();
    let life = ParetoDist::from_mean(1200.0, 1.8).unwrap();
    let at = |horizon| {
        c_constant(&oo, &life, &Quadrature { horizon, ..Quadrature::default() })
            .unwrap()
            .value
    };
    let (c1, c2) = (at(1e5), at(2e5));
    assert!(c1 > 0.0 && c1.is_finite());
    assert!((c2 / c1 - 1.0).abs() < 0.02, "{c1} vs {c2}");
}

#[test]
fn strict_closure_threshold_reports_nonconvergence() {
    let oo = table_onoff();
    let life = ParetoDist::from_mean(1200.0, 1.8).unwrap();
    let quad = Quadrature {
        max_tail_fraction: 0.10,
        ..Quadrature::default()
    };
    assert!(matches!(
        c_constant(&oo, &life, &quad),
        Err(hybridburst::Error::NonConvergence { .. })
    ));
}

#[test]
fn constant_decreases_with_lighter_lifetimes() {
    let oo = table_onoff();
    let table = solve_pi11(&oo, oo.default_dt(), 5e4).unwrap();
    let fit = r_tail_asymptote(&oo, &table).unwrap();
    let c = |alpha| {
        let life = ParetoDist::from_mean(1200.0, alpha).unwrap();
        c_from_table(&table, &life, fit.coefficient, fit.exponent, 5.0).unwrap().value
    };
    assert!(c(1.8) > c(1.95));
}

#[test]
fn reduced_long_range_dependence() {
    let mut checked = 0;
    for i in 0..5 {
        for j in 0..4 {
            let alpha_min = 1.1 + 0.2 * i as f64;
            let alpha_sess = 1.05 + 0.25 * j as f64;
            let oo = OnOffParams::from_means(alpha_min, 100.0, 1.95, 100.0).unwrap();
            let sess = SessionParams::from_means(1.0, alpha_sess, 1000.0).unwrap();
            let class = classify(alpha_min, alpha_sess).unwrap();
            if class.case_id != CaseId::Case3 {
                continue;
            }
            let r = hurst_exponents(&oo, &sess).unwrap();
            assert!(r.h_hybrid > 0.5 && r.h_hybrid < 1.0);
            assert!(r.h_hybrid < r.h_isp && r.h_hybrid < r.h_onoff, "{alpha_min} {alpha_sess}");
            checked += 1;
        }
    }
    assert!(checked >= 10, "only {checked} case-3 points");
}

#[test]
fn reference_table_hurst_values() {
    let oo = table_onoff();
    let expect = [
        ((1.0, 1.2, 12_000.0), (0.7, 0.9, 0.8)),
        ((5.0, 1.2, 120.0), (0.7, 0.9, 0.8)),
        ((1.0, 1.2, 1_200.0), (0.7, 0.9, 0.8)),
        ((1.0, 1.8, 1_200.0), (0.5, 0.6, 0.8)),
    ];
    for ((lambda, alpha, mean), (hh, hi, ho)) in expect {
        let sess = SessionParams::from_means(lambda, alpha, mean).unwrap();
        let r = hurst_exponents(&oo, &sess).unwrap();
        for (got, want) in [(r.h_hybrid, hh), (r.h_isp, hi), (r.h_onoff, ho)] {
            assert!((got - want).abs() <= 4.0 * f64::EPSILON, "{got} vs {want}");
        }
    }
    let series4 = SessionParams::from_means(1.0, 1.8, 1_200.0).unwrap();
    let full = hurst_formulas(&oo, &series4, &Quadrature::default()).unwrap();
    assert_eq!(full.classification.case_id, CaseId::Case4);
    assert!(full.c.unwrap() > 0.0);
    assert!(full.sigma_sq.is_none());
    let json = serde_json::to_value(&full).unwrap();
    for key in ["h_hybrid", "h_isp", "h_onoff", "sigma_lim_sq", "sigma_sq", "c", "case_id", "supported"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["case_id"], "Case4");
}

#[test]
fn variance_profile_shape() {
    let oo = table_onoff();
    let life = ParetoDist::from_mean(1200.0, 1.8).unwrap();
    let grid: Vec<f64> = (0..=40).map(|i| 250.0 * i as f64).collect();
    let quad = Quadrature {
        horizon: 2e4,
        ..Quadrature::default()
    };
    let v = variance_profile(&oo, &life, &grid, &quad).unwrap();
    assert_eq!(v[0], 0.0);
    assert!(v.windows(2).all(|w| w[1] >= w[0]));
    // convex: increments nondecreasing while the integrand stays positive
    let inc: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(inc.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9)));
}

#[test]
fn case_three_ratio_approaches_one() {
    let oo = table_onoff();
    let table = solve_pi11(&oo, oo.default_dt(), 1e5).unwrap();
    let fit = r_tail_asymptote(&oo, &table).unwrap();
    let life = ParetoDist::from_mean(12_000.0, 1.2).unwrap();
    let profile = VarianceProfile::from_table(&table, &life, Some(&fit));
    let sigma_sq = hybridburst::scaling::sigma_sq(&oo, 1.2);
    let l_v = life.x_m().powf(1.2);
    let ratio = |t: f64| profile.at(t).unwrap() / (sigma_sq * t.powf(1.4) * l_v * fit.l_r);
    let rs = [ratio(1e3), ratio(1e4), ratio(1e5)];
    assert!((rs[2] - 1.0).abs() < 0.25, "{rs:?}");
    assert!((rs[2] - 1.0).abs() < (rs[1] - 1.0).abs() && (rs[1] - 1.0).abs() < (rs[0] - 1.0).abs());
}
