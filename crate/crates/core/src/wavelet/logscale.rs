//! Logscale diagram and the weighted-regression Hurst estimate.

use std::f64::consts::LN_2;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::digamma;

use super::dwt::decompose;
use super::filters::FilterBank;
use crate::error::{Error, Result};

/// Octaves with fewer clean coefficients are left out of the diagram.
pub const MIN_COEFFS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OctaveStat {
    pub j: u32,
    pub n_j: usize,
    /// Mean squared detail coefficient.
    pub mu_j: f64,
    /// `log₂ μ_j` minus the small-sample bias `g(n_j)`.
    pub log2_mu_j: f64,
    /// `n_j·ln²2 / 2`, the inverse asymptotic variance of `log2_mu_j`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogscaleDiagram {
    pub octaves: Vec<OctaveStat>,
    pub wavelet_order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub h: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Fitted slope ζ of `log2_mu_j` against `j`.
    pub slope: f64,
    pub slope_se: f64,
    pub j1: u32,
    pub j2: u32,
}

impl HurstEstimate {
    pub fn covers(&self, h: f64) -> bool {
        self.ci_low <= h && h <= self.ci_high
    }
}

/// `g(n) = ψ(n/2)/ln 2 − log₂(n/2)`, the mean of `log₂(χ²_n/n)`.
pub fn log_bias(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    digamma(half) / LN_2 - half.log2()
}

impl LogscaleDiagram {
    /// True when some octave carries no detail energy at all (e.g. constant input).
    pub fn is_degenerate(&self) -> bool {
        self.octaves.iter().any(|o| o.mu_j == 0.0)
    }

    pub fn octave(&self, j: u32) -> Option<&OctaveStat> {
        self.octaves.iter().find(|o| o.j == j)
    }

    pub fn max_octave(&self) -> Option<u32> {
        self.octaves.last().map(|o| o.j)
    }

    /// CSV with columns `octave,n_coeffs,log2_variance,weight`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["octave", "n_coeffs", "log2_variance", "weight"])?;
        for o in &self.octaves {
            w.write_record(&[
                o.j.to_string(),
                o.n_j.to_string(),
                format!("{:?}", o.log2_mu_j),
                format!("{:?}", o.weight),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Deepest octave of an `n`-sample series that keeps at least
/// [`MIN_COEFFS`] boundary-free coefficients.
pub fn deepest_octave(n: usize, wavelet_order: usize) -> Result<u32> {
    let len = FilterBank::daubechies(wavelet_order)?.len();
    let (mut j, mut clean) = (0, n);
    while clean >= len {
        let next = (clean - len) / 2 + 1;
        if next < MIN_COEFFS {
            break;
        }
        clean = next;
        j += 1;
    }
    if j == 0 {
        return Err(Error::SeriesTooShort {
            needed: 2 * (MIN_COEFFS - 1) + len,
            got: n,
        });
    }
    Ok(j)
}

/// Builds the diagram of a stationary noise series (increments, not their
/// cumulative sum) with a Daubechies filter of `wavelet_order` vanishing moments.
pub fn dwt_logscale(series: &[f64], wavelet_order: usize, max_octave: u32) -> Result<LogscaleDiagram> {
    let bank = FilterBank::daubechies(wavelet_order)?;
    // the first octave needs MIN_COEFFS clean coefficients
    let needed = 2 * (MIN_COEFFS - 1) + bank.len();
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            got: series.len(),
        });
    }
    let dec = decompose(series, &bank, max_octave);
    // energies this far below the input's are rounding residue of an exact zero
    let floor = 1e-24 * series.iter().map(|x| x * x).sum::<f64>() / series.len() as f64;
    let octaves = dec
        .octaves
        .iter()
        .filter(|o| o.clean >= MIN_COEFFS)
        .map(|o| {
            let n_j = o.clean;
            let mut mu_j = o.details[..n_j].iter().map(|d| d * d).sum::<f64>() / n_j as f64;
            if mu_j <= floor {
                mu_j = 0.0;
            }
            OctaveStat {
                j: o.j,
                n_j,
                mu_j,
                log2_mu_j: mu_j.log2() - log_bias(n_j),
                weight: LN_2 * LN_2 * n_j as f64 / 2.0,
            }
        })
        .collect();
    Ok(LogscaleDiagram {
        octaves,
        wavelet_order,
    })
}

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Weighted least squares over octaves `j1..=j2`; `Ĥ = (ζ+1)/2`.
///
/// The slope standard error scales the weighted normal-equation variance by
/// the weighted residual variance, so a diagram lying exactly on a line gives
/// a zero-width interval.
pub fn estimate_hurst(diagram: &LogscaleDiagram, j1: u32, j2: u32) -> Result<HurstEstimate> {
    if j1 >= j2 {
        return Err(Error::InsufficientOctaves(format!("need j1 < j2, got {j1}..{j2}")));
    }
    for j in [j1, j2] {
        if diagram.octave(j).is_none() {
            return Err(Error::InsufficientOctaves(format!("octave {j} is not in the diagram")));
        }
    }
    let pts: Vec<&OctaveStat> = diagram.octaves.iter().filter(|o| o.j >= j1 && o.j <= j2).collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientOctaves(format!(
            "{} octaves in {j1}..{j2}, need at least 3",
            pts.len()
        )));
    }
    if let Some(o) = pts.iter().find(|o| o.mu_j <= 0.0 || !o.log2_mu_j.is_finite()) {
        return Err(Error::DegenerateDiagram(o.j));
    }
    let (mut s, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for o in &pts {
        s += o.weight;
        sx += o.weight * o.j as f64;
        sy += o.weight * o.log2_mu_j;
    }
    let (xbar, ybar) = (sx / s, sy / s);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for o in &pts {
        let dx = o.j as f64 - xbar;
        sxx += o.weight * dx * dx;
        sxy += o.weight * dx * (o.log2_mu_j - ybar);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let rss: f64 = pts
        .iter()
        .map(|o| {
            let e = o.log2_mu_j - intercept - slope * o.j as f64;
            o.weight * e * e
        })
        .sum();
    let slope_se = (rss / (pts.len() - 2) as f64 / sxx).sqrt();
    let h = (slope + 1.0) / 2.0;
    let half_width = Z95 * slope_se / 2.0;
    Ok(HurstEstimate {
        h,
        ci_low: h - half_width,
        ci_high: h + half_width,
        slope,
        slope_se,
        j1,
        j2,
    })
}
