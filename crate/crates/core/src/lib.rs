//! Workload laboratory for the hybrid Poisson-session / on-off traffic model.
//!
//! Sessions arrive as a Poisson process with heavy-tailed lifetimes; within
//! each session a stationary on-off source alternates heavy-tailed on and off
//! periods. The crate synthesizes the alive count `B(k)`, the alive-and-on
//! count `A(k)` and the randomly centered increment `C(k) = μ_W·B(k) − A(k)`,
//! evaluates the limit theory of the integrated `C` (case geometry, Hurst
//! exponents, variance constants) and estimates Hurst parameters from traces
//! with the wavelet logscale diagram.

pub mod error;
pub mod harness;
pub mod heavytail;
pub mod onoff;
mod renewal;
pub mod scaling;
pub mod seed;
pub mod sessions;
pub mod wavelet;
pub mod workload;

pub use error::{Error, Result};
pub use heavytail::{ExponentialDist, LifetimeLaw, ParetoDist};
pub use onoff::{r_tail_asymptote, solve_pi11, AutocovTable, OnOffParams, OnOffPath, TailFit};
pub use scaling::{
    c_constant, classify, hurst_formulas, sigma_lim_sq, variance_profile, CaseClassification, CaseId, Quadrature,
    TheoryReport,
};
pub use sessions::{busy_servers, generate_sessions, Session, SessionParams, SessionSet, StartMode};
pub use wavelet::{dwt_logscale, estimate_hurst, fgn_generate, HurstEstimate, LogscaleDiagram};
pub use workload::{cumulative, synthesize, Trace};
