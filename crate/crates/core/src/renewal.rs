//! Stieltjes-trapezoid discretization of convolutions and renewal equations
//! on a uniform grid `t_k = k·dt`.
//!
//! Measures enter through their CDF values on the grid, so cell masses are
//! exact and jumps in densities (Pareto laws start abruptly at their scale)
//! cost no accuracy.

use rayon::prelude::*;

/// Cell masses `F(t_j) − F(t_{j−1})` for `j = 1..len`, with a leading zero.
pub(crate) fn increments(cdf: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(cdf.len());
    out.push(0.0);
    out.extend(cdf.windows(2).map(|w| w[1] - w[0]));
    out
}

/// Per-lag weights: the coefficient of `f(t_{k−m})` in
/// `Σ_j ½(f(t_{k−j}) + f(t_{k−j+1}))·ΔF_j` is `½(ΔF_m + ΔF_{m+1})` for `m < k`.
fn lag_weights(dmass: &[f64]) -> Vec<f64> {
    let n = dmass.len();
    (0..n)
        .map(|m| 0.5 * (dmass[m] + dmass.get(m + 1).copied().unwrap_or(0.0)))
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let tail: f64 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in chunks_a.zip(chunks_b) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `(f ∗ dF)(t_k) = ∫_0^{t_k} f(t_k − s) dF(s)` for every grid point.
pub(crate) fn convolve(f: &[f64], dmass: &[f64]) -> Vec<f64> {
    let n = f.len();
    assert_eq!(dmass.len(), n);
    let w = lag_weights(dmass);
    // reversed so that each output is a forward dot product
    let wrev: Vec<f64> = w.iter().rev().copied().collect();
    (0..n)
        .into_par_iter()
        .with_min_len(64)
        .map(|k| {
            if k == 0 {
                return 0.0;
            }
            // f_i weighted by w_{k−i}, i = 1..=k, plus the half weight on f_0.
            let lo = n - k;
            dot(&f[1..=k], &wrev[lo..lo + k]) + 0.5 * f[0] * dmass[k]
        })
        .collect()
}

/// Solves `Z = z + Z ∗ dF` on the grid.
pub(crate) fn solve_renewal(z: &[f64], dmass: &[f64]) -> Vec<f64> {
    let n = z.len();
    assert_eq!(dmass.len(), n);
    let w = lag_weights(dmass);
    let wrev: Vec<f64> = w.iter().rev().copied().collect();
    let diag = 1.0 - w[0];
    let mut out = vec![0.0; n];
    out[0] = z[0];
    for k in 1..n {
        // Z_k appears on the right with weight ½ΔF_1 = w_0
        let lo = n - k;
        let history = if k > 1 {
            dot(&out[1..k], &wrev[lo..lo + k - 1])
        } else {
            0.0
        };
        out[k] = (z[k] + history + 0.5 * out[0] * dmass[k]) / diag;
    }
    out
}
