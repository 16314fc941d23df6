//! Limit theory for the randomly centered hybrid workload: case geometry,
//! Hurst exponents, variance constants and the variance profile
//! `V(t) = 2∫₀ᵗ∫₀ʸ r(x)·H̄_I(x) dx dy` of the integrated incremental process.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::heavytail::{power_integral, LifetimeLaw};
use crate::onoff::{r_tail_asymptote, solve_pi11, AutocovTable, OnOffParams, TailFit};
use crate::sessions::SessionParams;

/// Tolerance for detecting `α_min + α_sess = 3`.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    /// Outside the fBm and Brownian regions; the split between the two
    /// remaining regions is not resolved.
    #[serde(rename = "Case1/Case2")]
    Case1Or2,
    Case3,
    Case4,
    Boundary34,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseId::Case1Or2 => "Case1/Case2",
            CaseId::Case3 => "Case3",
            CaseId::Case4 => "Case4",
            CaseId::Boundary34 => "Boundary34",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseClassification {
    pub case_id: CaseId,
    pub alpha_min: f64,
    pub alpha_sess: f64,
    pub supported: bool,
}

pub fn classify(alpha_min: f64, alpha_sess: f64) -> Result<CaseClassification> {
    if !(alpha_min > 1.0 && alpha_min < 2.0) {
        return Err(invalid(format!("alpha_min must lie in (1,2), got {alpha_min}")));
    }
    if !(alpha_sess > 0.0 && alpha_sess.is_finite()) {
        return Err(invalid(format!("alpha_sess must be positive, got {alpha_sess}")));
    }
    let sum = alpha_min + alpha_sess;
    let case_id = if (sum - 3.0).abs() <= BOUNDARY_TOL {
        CaseId::Boundary34
    } else if alpha_sess > 1.0 && sum > 2.0 && sum < 3.0 {
        CaseId::Case3
    } else if alpha_sess < 2.0 && sum > 3.0 && sum < 4.0 {
        CaseId::Case4
    } else {
        CaseId::Case1Or2
    };
    Ok(CaseClassification {
        case_id,
        alpha_min,
        alpha_sess,
        supported: case_id != CaseId::Case1Or2,
    })
}

/// A value together with a flag marking it as evaluated outside the stated
/// scope of its formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub value: f64,
    pub outside_scope: bool,
}

/// `σ_lim² = 2μ_max² / (μ_W³(α_min−1)(3−α_min)(2−α_min))`.
///
/// The formula is stated for unequal on/off indices; equal indices are
/// evaluated as written (with `μ_max` the larger mean) and flagged.
pub fn sigma_lim_sq(oo: &OnOffParams) -> Flagged {
    let a = oo.alpha_min();
    let mu_w = oo.mu_w();
    let value = 2.0 * oo.mu_max().powi(2) / (mu_w.powi(3) * (a - 1.0) * (3.0 - a) * (2.0 - a));
    Flagged {
        value,
        outside_scope: oo.equal_indices(),
    }
}

/// Case 3 variance constant
/// `σ² = σ_lim²(3−α_min)(2−α_min) / ((α_sess−1)(3−α_min−α_sess)(4−α_min−α_sess))`.
pub fn sigma_sq(oo: &OnOffParams, alpha_sess: f64) -> f64 {
    let a = oo.alpha_min();
    sigma_lim_sq(oo).value * (3.0 - a) * (2.0 - a)
        / ((alpha_sess - 1.0) * (3.0 - a - alpha_sess) * (4.0 - a - alpha_sess))
}

/// Grid used when the theory needs the renewal solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    /// Solver step; `None` picks the on-off default.
    pub dt: Option<f64>,
    pub horizon: f64,
    /// Largest admissible ratio of the analytic tail closure to the head integral.
    pub max_tail_fraction: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            dt: None,
            horizon: 1e5,
            max_tail_fraction: 0.5,
        }
    }
}

/// `c = ∫₀^∞ r(x)·H̄_I(x) dx` split into its quadrature and closure parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CConstant {
    pub value: f64,
    pub head: f64,
    pub tail_correction: f64,
    pub horizon: f64,
}

/// Trapezoid of `r·H̄_I` over the table plus `coef·∫_X^∞ x^p·H̄_I(x) dx`
/// for the tail model `r(x) ≈ coef·x^p`.
pub fn c_from_table<L: LifetimeLaw + ?Sized>(
    table: &AutocovTable,
    lifetime: &L,
    tail_coefficient: f64,
    tail_exponent: f64,
    max_tail_fraction: f64,
) -> Result<CConstant> {
    let dt = table.dt();
    let r = table.values();
    let n = r.len();
    let integrand = |k: usize| r[k] * lifetime.integrated_tail(k as f64 * dt);
    let mut head = 0.5 * (integrand(0) + integrand(n - 1));
    for k in 1..n - 1 {
        head += integrand(k);
    }
    head *= dt;
    let horizon = table.horizon();
    let tail = tail_coefficient * lifetime.integrated_tail_moment(horizon, tail_exponent);
    if !tail.is_finite() || tail.abs() > max_tail_fraction * head.abs() {
        return Err(Error::NonConvergence {
            head,
            tail,
            ratio: 100.0 * tail / head,
        });
    }
    Ok(CConstant {
        value: head + tail,
        head,
        tail_correction: tail,
        horizon,
    })
}

/// Computes `c` for a case 4 or boundary parameter set.
pub fn c_constant<L: LifetimeLaw + ?Sized>(
    oo: &OnOffParams,
    lifetime: &L,
    quad: &Quadrature,
) -> Result<CConstant> {
    let dt = quad.dt.unwrap_or_else(|| oo.default_dt());
    let table = solve_pi11(oo, dt, quad.horizon)?;
    let fit = r_tail_asymptote(oo, &table)?;
    c_from_table(&table, lifetime, fit.coefficient, fit.exponent, quad.max_tail_fraction)
}

/// Cumulative integrals of `R(x) = r(x)·H̄_I(x)` on the solver grid, with a
/// power-law continuation past the horizon.
#[derive(Debug, Clone)]
pub struct VarianceProfile {
    dt: f64,
    integrand: Vec<f64>,
    /// `J(t) = ∫₀ᵗ R`.
    inner: Vec<f64>,
    /// `V(t) = 2∫₀ᵗ J`.
    variance: Vec<f64>,
    /// `R(x) ≈ coefficient·x^exponent` past the horizon.
    tail: Option<(f64, f64)>,
}

impl VarianceProfile {
    pub fn from_table<L: LifetimeLaw + ?Sized>(table: &AutocovTable, lifetime: &L, fit: Option<&TailFit>) -> Self {
        let dt = table.dt();
        let integrand: Vec<f64> = table
            .values()
            .iter()
            .enumerate()
            .map(|(k, r)| r * lifetime.integrated_tail(k as f64 * dt))
            .collect();
        let mut inner = Vec::with_capacity(integrand.len());
        let mut variance = Vec::with_capacity(integrand.len());
        inner.push(0.0);
        variance.push(0.0);
        for k in 1..integrand.len() {
            let j = inner[k - 1] + 0.5 * dt * (integrand[k - 1] + integrand[k]);
            variance.push(variance[k - 1] + dt * (inner[k - 1] + j));
            inner.push(j);
        }
        let tail = match (fit, lifetime.power_law_tail()) {
            (Some(fit), Some(pl)) if table.horizon() >= pl.onset => {
                Some((fit.coefficient * pl.coefficient, fit.exponent + pl.exponent))
            }
            _ => None,
        };
        Self {
            dt,
            integrand,
            inner,
            variance,
            tail,
        }
    }

    pub fn horizon(&self) -> f64 {
        (self.variance.len() - 1) as f64 * self.dt
    }

    /// `∫₀ᵗ r·H̄_I`; tends to `c` when that integral converges.
    pub fn inner_at(&self, t: f64) -> Option<f64> {
        let x = self.horizon();
        if t <= x {
            let (i, f) = self.locate(t);
            let r_t = self.integrand[i] + f * (self.integrand_next(i) - self.integrand[i]);
            Some(self.inner[i] + 0.5 * f * self.dt * (self.integrand[i] + r_t))
        } else {
            let (coef, b) = self.tail?;
            Some(self.inner[self.inner.len() - 1] + coef * power_integral(x, t, b))
        }
    }

    pub fn at(&self, t: f64) -> Option<f64> {
        if t < 0.0 {
            return None;
        }
        let x = self.horizon();
        if t <= x {
            let (i, f) = self.locate(t);
            let j_t = self.inner_at(t)?;
            Some(self.variance[i] + f * self.dt * (self.inner[i] + j_t))
        } else {
            let (coef, b) = self.tail?;
            let j_x = self.inner[self.inner.len() - 1];
            let v_x = self.variance[self.variance.len() - 1];
            // ∫_X^t ∫_X^y x^b dx dy
            let double = if (b + 1.0).abs() < 1e-12 {
                t * (t / x).ln() - (t - x)
            } else {
                (power_integral(x, t, b + 1.0) - x.powf(b + 1.0) * (t - x)) / (b + 1.0)
            };
            Some(v_x + 2.0 * j_x * (t - x) + 2.0 * coef * double)
        }
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let x = t / self.dt;
        let i = (x.floor() as usize).min(self.variance.len() - 1);
        (i, x - i as f64)
    }

    fn integrand_next(&self, i: usize) -> f64 {
        self.integrand.get(i + 1).copied().unwrap_or(self.integrand[i])
    }
}

/// `V(t)` at each requested time.
pub fn variance_profile<L: LifetimeLaw + ?Sized>(
    oo: &OnOffParams,
    lifetime: &L,
    t_grid: &[f64],
    quad: &Quadrature,
) -> Result<Vec<f64>> {
    let dt = quad.dt.unwrap_or_else(|| oo.default_dt());
    let table = solve_pi11(oo, dt, quad.horizon)?;
    let fit = r_tail_asymptote(oo, &table).ok();
    let profile = VarianceProfile::from_table(&table, lifetime, fit.as_ref());
    t_grid
        .iter()
        .map(|&t| {
            profile
                .at(t)
                .ok_or_else(|| invalid(format!("t = {t} lies beyond the solver horizon without a tail model")))
        })
        .collect()
}

/// CSV with columns `t,V`.
pub fn write_profile_csv<W: Write>(out: W, t_grid: &[f64], values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "V"])?;
    for (t, v) in t_grid.iter().zip(values) {
        w.write_record(&[t.to_string(), format!("{v:.17e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Every theoretical limit quantity for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub h_hybrid: f64,
    pub h_isp: f64,
    pub h_onoff: f64,
    pub sigma_lim_sq: f64,
    /// Set when `σ_lim²` was evaluated for equal on/off indices.
    pub sigma_lim_sq_outside_scope: bool,
    pub sigma_sq: Option<f64>,
    pub c: Option<f64>,
    pub c_tail_correction: Option<f64>,
    #[serde(flatten)]
    pub classification: CaseClassification,
}

/// Hurst exponents and constants without the renewal solver; `c` is left empty.
pub fn hurst_exponents(oo: &OnOffParams, sess: &SessionParams) -> Result<TheoryReport> {
    let alpha_min = oo.alpha_min();
    let alpha_sess = sess.lifetime().alpha();
    let classification = classify(alpha_min, alpha_sess)?;
    if !classification.supported {
        return Err(Error::UnsupportedCase(classification.case_id.to_string()));
    }
    let sigma_lim = sigma_lim_sq(oo);
    let (h_hybrid, sigma_sq) = match classification.case_id {
        CaseId::Case3 => ((4.0 - alpha_min - alpha_sess) / 2.0, Some(sigma_sq(oo, alpha_sess))),
        _ => (0.5, None),
    };
    Ok(TheoryReport {
        h_hybrid,
        h_isp: (3.0 - alpha_sess) / 2.0,
        h_onoff: (3.0 - alpha_min) / 2.0,
        sigma_lim_sq: sigma_lim.value,
        sigma_lim_sq_outside_scope: sigma_lim.outside_scope,
        sigma_sq,
        c: None,
        c_tail_correction: None,
        classification,
    })
}

/// Full report, including `c` for case 4 and the boundary.
pub fn hurst_formulas(oo: &OnOffParams, sess: &SessionParams, quad: &Quadrature) -> Result<TheoryReport> {
    let mut report = hurst_exponents(oo, sess)?;
    if matches!(report.classification.case_id, CaseId::Case4 | CaseId::Boundary34) {
        let c = c_constant(oo, sess.lifetime(), quad)?;
        report.c = Some(c.value);
        report.c_tail_correction = Some(c.tail_correction);
    }
    Ok(report)
}
