//! Exact fractional Gaussian noise by circulant embedding (Davies–Harte).

use std::sync::Arc;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Error, Result};
use crate::seed;

const NEGATIVE_EIGEN_TOL: f64 = 1e-12;

/// Unit-variance fGn autocovariance `½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
pub fn fgn_autocovariance(h: f64, k: usize) -> f64 {
    let e = 2.0 * h;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

/// Reusable generator: the embedding spectrum is computed once per `(h, n)`.
pub struct FgnGenerator {
    n: usize,
    sqrt_eigen: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl FgnGenerator {
    pub fn new(h: f64, n: usize) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(invalid(format!("Hurst parameter must lie in (0,1), got {h}")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(invalid(format!("length must be a power of two, got {n}")));
        }
        let m = 2 * n;
        let mut row: Vec<Complex64> = (0..m)
            .map(|k| {
                let lag = if k <= n { k } else { m - k };
                Complex64::new(fgn_autocovariance(h, lag), 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut row);
        let mut sqrt_eigen = Vec::with_capacity(n + 1);
        for (index, c) in row.iter().take(n + 1).enumerate() {
            let value = c.re;
            if value < -NEGATIVE_EIGEN_TOL {
                return Err(Error::EmbeddingFailure { index, value });
            }
            sqrt_eigen.push(value.max(0.0).sqrt());
        }
        Ok(Self { n, sqrt_eigen, fft })
    }

    pub fn generate(&self, seed: u64) -> Vec<f64> {
        let n = self.n;
        let m = 2 * n;
        let mut rng = seed::stream(seed);
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
        let mut z = vec![Complex64::new(0.0, 0.0); m];
        z[0] = Complex64::new(self.sqrt_eigen[0] * normal(), 0.0);
        z[n] = Complex64::new(self.sqrt_eigen[n] * normal(), 0.0);
        let half = std::f64::consts::FRAC_1_SQRT_2;
        for k in 1..n {
            let s = self.sqrt_eigen[k] * half;
            let v = Complex64::new(s * normal(), s * normal());
            z[k] = v;
            z[m - k] = v.conj();
        }
        self.fft.process(&mut z);
        let scale = 1.0 / (m as f64).sqrt();
        z.iter().take(n).map(|c| c.re * scale).collect()
    }
}

/// `n` samples of unit-variance fGn with Hurst parameter `h`.
pub fn fgn_generate(h: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(FgnGenerator::new(h, n)?.generate(seed))
}
