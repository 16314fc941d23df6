#![allow(dead_code)]

/// Sample mean and the standard error of that mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Unbiased sample variance and its standard error `sqrt((m₄ − s⁴)/n)`.
pub fn var_se(xs: &[f64], mean: f64) -> (f64, f64) {
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    mean_se(&sq)
}

pub fn within(value: f64, target: f64, se: f64, k: f64) -> bool {
    (value - target).abs() <= k * se
}

/// Binomial standard error of a proportion `p` over `n` trials.
pub fn binom_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
