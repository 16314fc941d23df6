//! Wavelet logscale-diagram estimation of the Hurst parameter, plus an exact
//! fractional Gaussian noise generator used to calibrate it.

pub mod dwt;
pub mod fgn;
pub mod filters;
pub mod logscale;

pub use dwt::{decompose, Decomposition, Octave};
pub use fgn::{fgn_autocovariance, fgn_generate, FgnGenerator};
pub use filters::FilterBank;
pub use logscale::{deepest_octave, dwt_logscale, estimate_hurst, HurstEstimate, LogscaleDiagram, OctaveStat};
