//! Pareto duration laws shared by the session and on-off layers.
//!
//! A Pareto law with shape `alpha` and scale `x_m` has tail
//! `P(X > x) = (x_m / x)^alpha` for `x > x_m`. Its integrated tail
//! `∫_x^∞ P(X > z) dz` and its equilibrium (residual-life) law with density
//! `P(X > z) / mean` are both available in closed form, which is what the
//! stationary initializations and the limit theory rely on.

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ui};

use crate::error::{invalid, Result};

/// `∫_a^b x^q dx` for `0 < a <= b`.
pub(crate) fn power_integral(a: f64, b: f64, q: f64) -> f64 {
    if (q + 1.0).abs() < 1e-12 {
        (b / a).ln()
    } else {
        (b.powf(q + 1.0) - a.powf(q + 1.0)) / (q + 1.0)
    }
}

/// Heavy-tailed duration law, parametrized the way traffic tables report it:
/// by mean and tail index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoDist {
    alpha: f64,
    x_m: f64,
    mean: f64,
}

impl ParetoDist {
    /// Builds the law from its scale directly.
    pub fn new(alpha: f64, x_m: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(invalid(format!("pareto shape must exceed 1, got {alpha}")));
        }
        if !(x_m > 0.0 && x_m.is_finite()) {
            return Err(invalid(format!("pareto scale must be positive, got {x_m}")));
        }
        Ok(Self {
            alpha,
            x_m,
            mean: x_m * alpha / (alpha - 1.0),
        })
    }

    /// Law with expectation exactly `mean`; the scale is `mean·(alpha−1)/alpha`.
    pub fn from_mean(mean: f64, alpha: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(invalid(format!("pareto mean must be positive, got {mean}")));
        }
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(invalid(format!("pareto shape must exceed 1, got {alpha}")));
        }
        Ok(Self {
            alpha,
            x_m: mean - mean / alpha,
            mean,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn x_m(&self) -> f64 {
        self.x_m
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `P(X > x)`.
    pub fn tail(&self, x: f64) -> f64 {
        if x <= self.x_m {
            1.0
        } else {
            (self.x_m / x).powf(self.alpha)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.tail(x)
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < self.x_m {
            0.0
        } else {
            self.alpha / self.x_m * (self.x_m / x).powf(self.alpha + 1.0)
        }
    }

    /// `∫_x^∞ P(X > z) dz`; equals `mean − x` below the scale.
    pub fn integrated_tail(&self, x: f64) -> f64 {
        if x <= self.x_m {
            self.mean - x.max(0.0)
        } else {
            self.x_m.powf(self.alpha) * x.powf(1.0 - self.alpha) / (self.alpha - 1.0)
        }
    }

    /// Inverse CDF evaluated at `1 − u`, i.e. `x_m·u^(−1/alpha)`.
    pub fn quantile_upper(&self, u: f64) -> f64 {
        self.x_m * u.powf(-1.0 / self.alpha)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.quantile_upper(u)
    }

    /// CDF of the equilibrium law with density `tail(z)/mean`.
    pub fn equilibrium_cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            0.0
        } else if z <= self.x_m {
            z / self.mean
        } else {
            1.0 - self.integrated_tail(z) / self.mean
        }
    }

    /// Inverse of [`Self::equilibrium_cdf`].
    pub fn equilibrium_quantile(&self, u: f64) -> f64 {
        let knee = self.x_m / self.mean;
        if u <= knee {
            u * self.mean
        } else {
            self.x_m * ((1.0 - u) * self.alpha).powf(-1.0 / (self.alpha - 1.0))
        }
    }

    /// Residual life seen from a stationary random time.
    pub fn equilibrium_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.equilibrium_quantile(u)
    }
}

/// Power-law closed form `H̄_I(x) = coefficient·x^exponent` valid for `x >= onset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawTail {
    pub coefficient: f64,
    pub exponent: f64,
    pub onset: f64,
}

/// What the limit theory needs from a session lifetime law.
pub trait LifetimeLaw {
    fn mean(&self) -> f64;

    fn integrated_tail(&self, x: f64) -> f64;

    fn power_law_tail(&self) -> Option<PowerLawTail>;

    /// `∫_{x0}^∞ x^p H̄_I(x) dx`, infinite when divergent.
    fn integrated_tail_moment(&self, x0: f64, p: f64) -> f64;
}

impl LifetimeLaw for ParetoDist {
    fn mean(&self) -> f64 {
        self.mean
    }

    fn integrated_tail(&self, x: f64) -> f64 {
        ParetoDist::integrated_tail(self, x)
    }

    fn power_law_tail(&self) -> Option<PowerLawTail> {
        Some(PowerLawTail {
            coefficient: self.x_m.powf(self.alpha) / (self.alpha - 1.0),
            exponent: 1.0 - self.alpha,
            onset: self.x_m,
        })
    }

    fn integrated_tail_moment(&self, x0: f64, p: f64) -> f64 {
        let q = p + 1.0 - self.alpha;
        if q >= -1.0 {
            return f64::INFINITY;
        }
        let coef = self.x_m.powf(self.alpha) / (self.alpha - 1.0);
        let from = x0.max(self.x_m);
        let mut total = coef * from.powf(q + 1.0) / -(q + 1.0);
        if x0 < self.x_m {
            let lo = x0.max(f64::MIN_POSITIVE);
            total += self.mean * power_integral(lo, self.x_m, p) - power_integral(lo, self.x_m, p + 1.0);
        }
        total
    }
}

/// Exponential lifetime, a light-tailed reference law for checking the
/// quadrature plumbing against closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialDist {
    mean: f64,
}

impl ExponentialDist {
    pub fn new(mean: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(invalid(format!("exponential mean must be positive, got {mean}")));
        }
        Ok(Self { mean })
    }
}

impl LifetimeLaw for ExponentialDist {
    fn mean(&self) -> f64 {
        self.mean
    }

    fn integrated_tail(&self, x: f64) -> f64 {
        self.mean * (-x.max(0.0) / self.mean).exp()
    }

    fn power_law_tail(&self) -> Option<PowerLawTail> {
        None
    }

    fn integrated_tail_moment(&self, x0: f64, p: f64) -> f64 {
        // m·∫_{x0}^∞ x^p e^{−x/m} dx = m^{p+2}·Γ(p+1, x0/m)
        if p <= -1.0 {
            return f64::INFINITY;
        }
        let upper = if x0 > 0.0 { gamma_ui(p + 1.0, x0 / self.mean) } else { gamma(p + 1.0) };
        self.mean.powf(p + 2.0) * upper
    }
}
