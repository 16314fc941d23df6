//! Pyramidal periodic DWT.

use super::filters::FilterBank;

/// Detail coefficients of one octave; the first `clean` entries do not
/// depend on samples wrapped around the series end.
#[derive(Debug, Clone, PartialEq)]
pub struct Octave {
    pub j: u32,
    pub details: Vec<f64>,
    pub clean: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub octaves: Vec<Octave>,
    pub approximation: Vec<f64>,
}

/// One analysis step: `a[k] = Σ h[m]·x[(2k+m) mod n]`, same for the details.
fn analysis_step(x: &[f64], bank: &FilterBank) -> (Vec<f64>, Vec<f64>) {
    let n = x.len() & !1;
    let half = n / 2;
    let len = bank.len();
    let mut approx = Vec::with_capacity(half);
    let mut detail = Vec::with_capacity(half);
    for k in 0..half {
        let base = 2 * k;
        let (mut a, mut d) = (0.0, 0.0);
        if base + len <= n {
            let window = &x[base..base + len];
            for m in 0..len {
                a += bank.low[m] * window[m];
                d += bank.high[m] * window[m];
            }
        } else {
            for m in 0..len {
                let v = x[(base + m) % n];
                a += bank.low[m] * v;
                d += bank.high[m] * v;
            }
        }
        approx.push(a);
        detail.push(d);
    }
    (approx, detail)
}

/// Decomposes up to `max_octave` levels, stopping early once the
/// approximation is shorter than the filter.
pub fn decompose(series: &[f64], bank: &FilterBank, max_octave: u32) -> Decomposition {
    let mut octaves = Vec::new();
    let mut approx = series.to_vec();
    let mut clean_prev = series.len();
    let len = bank.len();
    for j in 1..=max_octave {
        if approx.len() < len.max(2) {
            break;
        }
        let (a, d) = analysis_step(&approx, bank);
        // coefficient k reads 2k..2k+len−1 of the previous level's clean prefix
        let clean = if clean_prev >= len { (clean_prev - len) / 2 + 1 } else { 0 };
        clean_prev = clean;
        octaves.push(Octave {
            j,
            details: d,
            clean: clean.min(a.len()),
        });
        approx = a;
    }
    Decomposition {
        octaves,
        approximation: approx,
    }
}
