//! Stationary alternating on-off sources.
//!
//! [`OnOffPath`] realizes a single source started in equilibrium, so it is
//! stationary from time zero. [`solve_pi11`] computes the conditional
//! on-probability `π₁₁(t) = P(W(t)=1 | W(0)=1)` from the renewal structure and
//! derives the autocovariance `r(t) = σ_W² − μ_W(1 − π₁₁(t))`.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::heavytail::ParetoDist;
use crate::renewal;
use crate::seed::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnOffParams {
    on: ParetoDist,
    off: ParetoDist,
}

impl OnOffParams {
    pub fn new(on: ParetoDist, off: ParetoDist) -> Self {
        Self { on, off }
    }

    /// Parameters in table form: (α₁, μ₁) for on periods, (α₂, μ₂) for off.
    pub fn from_means(alpha_on: f64, mean_on: f64, alpha_off: f64, mean_off: f64) -> Result<Self> {
        Ok(Self::new(
            ParetoDist::from_mean(mean_on, alpha_on)?,
            ParetoDist::from_mean(mean_off, alpha_off)?,
        ))
    }

    pub fn on(&self) -> &ParetoDist {
        &self.on
    }

    pub fn off(&self) -> &ParetoDist {
        &self.off
    }

    /// Stationary on-probability `μ₁/(μ₁+μ₂)`.
    pub fn mu_w(&self) -> f64 {
        self.on.mean() / (self.on.mean() + self.off.mean())
    }

    /// `Var W(t) = μ₁μ₂/(μ₁+μ₂)²`.
    pub fn sigma_w_sq(&self) -> f64 {
        let mu_w = self.mu_w();
        mu_w * (1.0 - mu_w)
    }

    pub fn alpha_min(&self) -> f64 {
        self.on.alpha().min(self.off.alpha())
    }

    pub fn equal_indices(&self) -> bool {
        self.on.alpha() == self.off.alpha()
    }

    /// Mean of the lighter-tailed duration. With equal indices the larger of
    /// the two means is used.
    pub fn mu_max(&self) -> f64 {
        if self.on.alpha() > self.off.alpha() {
            self.on.mean()
        } else if self.off.alpha() > self.on.alpha() {
            self.off.mean()
        } else {
            self.on.mean().max(self.off.mean())
        }
    }

    /// Default solver step: an eighth of the shorter support onset.
    pub fn default_dt(&self) -> f64 {
        self.on.x_m().min(self.off.x_m()) / 8.0
    }
}

/// One stationary on-off source.
#[derive(Debug, Clone)]
pub struct OnOffPath {
    params: OnOffParams,
    on: bool,
    residual: f64,
    rng: Stream,
}

impl OnOffPath {
    /// Starts in equilibrium: on with probability `μ_W`, with the residual of
    /// the current period drawn from that period's equilibrium law.
    pub fn new_stationary(params: OnOffParams, seed: u64) -> Self {
        Self::from_stream(params, seed::stream(seed))
    }

    pub fn from_stream(params: OnOffParams, mut rng: Stream) -> Self {
        let on = rng.random::<f64>() < params.mu_w();
        let law = if on { &params.on } else { &params.off };
        let residual = law.equilibrium_sample(&mut rng);
        Self {
            params,
            on,
            residual,
            rng,
        }
    }

    pub fn is_on(&self) -> bool {
        self.on
    }

    /// Time until the next transition.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    fn flip(&mut self) {
        self.on = !self.on;
        let law = if self.on { &self.params.on } else { &self.params.off };
        self.residual = law.sample(&mut self.rng);
    }

    pub fn advance(&mut self, mut dt: f64) {
        while self.residual <= dt {
            dt -= self.residual;
            self.flip();
        }
        self.residual -= dt;
    }

    /// Point samples `W(0), W(1), …, W(n−1)` relative to the current time,
    /// leaving the path at time `n`.
    pub fn sample_at_ticks(&mut self, n_ticks: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(n_ticks);
        for _ in 0..n_ticks {
            out.push(self.on as u8);
            self.advance(1.0);
        }
        out
    }

    /// Calls `visit(start, end)` for every on interval clipped to `[0, span)`
    /// (relative to the current time) and leaves the path at time `span`.
    pub fn visit_on_intervals(&mut self, span: f64, mut visit: impl FnMut(f64, f64)) {
        let mut t = 0.0;
        while t + self.residual <= span {
            if self.on {
                visit(t, t + self.residual);
            }
            t += self.residual;
            self.flip();
        }
        if self.on && t < span {
            visit(t, span);
        }
        self.residual -= span - t;
    }
}

/// `π₁₁` and `r` tabulated on the grid `t_k = k·dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocovTable {
    dt: f64,
    mu_w: f64,
    sigma_w_sq: f64,
    pi11: Vec<f64>,
    values: Vec<f64>,
}

impl AutocovTable {
    /// Builds a table from `π₁₁` values, filling `r` through the identity
    /// `r = σ_W² − μ_W(1 − π₁₁)`.
    pub fn from_pi11(dt: f64, mu_w: f64, pi11: Vec<f64>) -> Self {
        let sigma_w_sq = mu_w * (1.0 - mu_w);
        let values = pi11.iter().map(|p| sigma_w_sq - mu_w * (1.0 - p)).collect();
        Self {
            dt,
            mu_w,
            sigma_w_sq,
            pi11,
            values,
        }
    }

    /// A table with `r` frozen at `σ_W²` everywhere, for checking downstream
    /// quadrature against closed forms.
    pub fn frozen(dt: f64, mu_w: f64, len: usize) -> Self {
        Self::from_pi11(dt, mu_w, vec![1.0; len])
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn mu_w(&self) -> f64 {
        self.mu_w
    }

    pub fn sigma_w_sq(&self) -> f64 {
        self.sigma_w_sq
    }

    pub fn pi11(&self) -> &[f64] {
        &self.pi11
    }

    /// `r(k·dt)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt
    }

    /// `r(t)` by linear interpolation; `None` beyond the horizon.
    pub fn r_at(&self, t: f64) -> Option<f64> {
        if t < 0.0 || t > self.horizon() {
            return None;
        }
        let x = t / self.dt;
        let i = (x.floor() as usize).min(self.len() - 1);
        if i + 1 >= self.len() {
            return Some(self.values[i]);
        }
        let f = x - i as f64;
        Some(self.values[i] * (1.0 - f) + self.values[i + 1] * f)
    }

    /// CSV with columns `t,pi11,r`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "pi11", "r"])?;
        for (k, (p, r)) in self.pi11.iter().zip(&self.values).enumerate() {
            w.write_record(&[
                format!("{}", k as f64 * self.dt),
                format!("{p:.17e}"),
                format!("{r:.17e}"),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Computes `π₁₁` and `r` on `[0, horizon]`.
///
/// Given `W(0)=1` in a stationary path, the current on period has an
/// equilibrium residual `R₁`; the next on period starts at `R₁ + D₂` with
/// `D₂ ~ F₂`, after which on periods start at the renewals of `F₁ ∗ F₂`.
/// With `P(t)` the probability of being on at `t` after an on period starts
/// at zero,
///
/// ```text
/// P = F̄₁ + P ∗ d(F₁ ∗ F₂)
/// π₁₁ = F̄₁ᵉ + P ∗ d(F₁ᵉ ∗ F₂)
/// ```
///
/// which is the derivative-level form `1 − π₁₁ = F₁ᵉ − ∫ F̄₁(t−u) dM(u)`,
/// `M` counting on-period starts.
pub fn solve_pi11(params: &OnOffParams, dt: f64, horizon: f64) -> Result<AutocovTable> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("grid step must be positive, got {dt}")));
    }
    if !(horizon >= dt) {
        return Err(invalid(format!("horizon {horizon} shorter than the grid step {dt}")));
    }
    let limit = params.on.x_m().min(params.off.x_m()) / 4.0;
    if dt > limit {
        return Err(Error::GridTooCoarse { dt, limit });
    }
    let n = (horizon / dt).ceil() as usize + 1;
    let t: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();

    let on_cdf: Vec<f64> = t.iter().map(|&x| params.on.cdf(x)).collect();
    let on_eq_cdf: Vec<f64> = t.iter().map(|&x| params.on.equilibrium_cdf(x)).collect();
    let off_mass = renewal::increments(&t.iter().map(|&x| params.off.cdf(x)).collect::<Vec<_>>());

    let cycle_cdf = renewal::convolve(&on_cdf, &off_mass);
    let delay_cdf = renewal::convolve(&on_eq_cdf, &off_mass);

    let on_tail: Vec<f64> = on_cdf.iter().map(|c| 1.0 - c).collect();
    let p_on = renewal::solve_renewal(&on_tail, &renewal::increments(&cycle_cdf));
    let later = renewal::convolve(&p_on, &renewal::increments(&delay_cdf));

    let pi11 = on_eq_cdf
        .iter()
        .zip(&later)
        .map(|(fe, l)| ((1.0 - fe) + l).clamp(0.0, 1.0))
        .collect();
    Ok(AutocovTable::from_pi11(dt, params.mu_w(), pi11))
}

/// Power-law fit `r(u) ≈ C_r·u^(1−α_min)` over the top decade of a table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Free least-squares slope of `log r` against `log u`.
    pub fitted_exponent: f64,
    /// `1 − α_min`.
    pub exponent: f64,
    /// `C_r` with the exponent pinned at `1 − α_min`.
    pub coefficient: f64,
    /// `C_r / ((σ_lim²/2)(3−α_min)(2−α_min))`, the constant slowly varying factor.
    pub l_r: f64,
    pub window: (f64, f64),
    /// Equal on/off indices lie outside the scope of the σ_lim² formula.
    pub equal_indices: bool,
}

/// Fits the tail of `r` over `[horizon/10, horizon]`.
pub fn r_tail_asymptote(params: &OnOffParams, table: &AutocovTable) -> Result<TailFit> {
    let alpha = params.alpha_min();
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(invalid(format!("alpha_min must lie in (1,2), got {alpha}")));
    }
    let hi = table.horizon();
    let lo = hi / 10.0;
    if lo < 10.0 * table.dt() {
        return Err(Error::FitFailure(format!("horizon {hi} too short for a decade fit")));
    }
    let first = (lo / table.dt()).ceil() as usize;
    let window = &table.values()[first..];
    if window.iter().any(|&r| r <= 0.0) {
        return Err(Error::FitFailure("r(u) is not positive over the fit window".into()));
    }
    if window.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::FitFailure("r(u) is not monotone over the fit window".into()));
    }

    let points = 64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    let mut pinned = 0.0;
    for i in 0..points {
        let u = lo * (hi / lo).powf(i as f64 / (points - 1) as f64);
        let r = table.r_at(u.min(hi)).expect("inside table");
        let (x, y) = (u.ln(), r.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        pinned += y - (1.0 - alpha) * x;
    }
    let m = points as f64;
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let coefficient = (pinned / m).exp();
    let shape = 0.5 * crate::scaling::sigma_lim_sq(params).value * (3.0 - alpha) * (2.0 - alpha);
    Ok(TailFit {
        fitted_exponent: slope,
        exponent: 1.0 - alpha,
        coefficient,
        l_r: coefficient / shape,
        window: (lo, hi),
        equal_indices: params.equal_indices(),
    })
}
