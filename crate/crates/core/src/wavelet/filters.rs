//! Daubechies extremal-phase filters, built by spectral factorization.
//!
//! The squared gain of the `N`-vanishing-moment low-pass filter is
//! `cos^{2N}(ω/2)·P(sin²(ω/2))` with `P(y) = Σ_{k<N} C(N−1+k, k)·y^k`.
//! Each root `y_i` of `P` maps to a conjugate pair of `z`-plane roots; keeping
//! the ones inside the unit circle gives the minimum-phase factor.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 10;

/// Orthonormal analysis pair for a periodic DWT.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub order: usize,
    pub low: Vec<f64>,
    pub high: Vec<f64>,
}

impl FilterBank {
    pub fn daubechies(order: usize) -> Result<Self> {
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(Error::InvalidWaveletOrder(order));
        }
        let low = daubechies_lowpass(order);
        let len = low.len();
        let high = (0..len)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * low[len - 1 - k])
            .collect();
        Ok(Self { order, low, high })
    }

    pub fn len(&self) -> usize {
        self.low.len()
    }

    pub fn is_empty(&self) -> bool {
        self.low.is_empty()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Roots of `Σ coeffs[k]·x^k` by Durand–Kerner iteration with Newton polish.
fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| Complex64::new(c / lead, 0.0)).collect();
    let eval = |x: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c);
    let deriv = |x: Complex64| {
        monic
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, c)| acc * x + c * k as f64)
    };

    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..degree {
            let xi = roots[i];
            let denom = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, xj)| acc * (xi - xj));
            let step = eval(xi) / denom;
            roots[i] = xi - step;
            delta = delta.max(step.norm() / xi.norm().max(1.0));
        }
        if delta < 1e-15 {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = deriv(*r);
            if d.norm() > 0.0 {
                *r -= eval(*r) / d;
            }
        }
    }
    roots
}

fn multiply(poly: &[Complex64], root: Complex64) -> Vec<Complex64> {
    // (Σ p_k z^k)(z − root)
    let mut out = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
    for (k, p) in poly.iter().enumerate() {
        out[k + 1] += p;
        out[k] -= p * root;
    }
    out
}

fn daubechies_lowpass(order: usize) -> Vec<f64> {
    let p: Vec<f64> = (0..order).map(|k| binomial(order - 1 + k, k)).collect();
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..order {
        poly = multiply(&poly, Complex64::new(-1.0, 0.0));
    }
    for y in poly_roots(&p) {
        // (2 − z − 1/z)/4 = y  ⇔  z² − (2 − 4y)z + 1 = 0
        let b = Complex64::new(1.0, 0.0) - y * 2.0;
        let disc = (b * b - 1.0).sqrt();
        let (z1, z2) = (b + disc, b - disc);
        let inside = if z1.norm() < z2.norm() { z1 } else { z2 };
        poly = multiply(&poly, inside);
    }
    let mut h: Vec<f64> = poly.iter().rev().map(|c| c.re).collect();
    let sum: f64 = h.iter().sum();
    let scale = std::f64::consts::SQRT_2 / sum;
    h.iter_mut().for_each(|x| *x *= scale);
    h
}
