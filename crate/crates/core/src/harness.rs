//! Experiment orchestration: the four reference parameter series, seeded
//! multi-replicate runs and their reports.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::onoff::OnOffParams;
use crate::scaling::{hurst_formulas, Quadrature, TheoryReport};
use crate::seed::{self, Domain};
use crate::sessions::{SessionParams, StartMode};
use crate::wavelet::{deepest_octave, dwt_logscale, estimate_hurst, HurstEstimate, LogscaleDiagram};
use crate::workload::{synthesize, Trace};

pub const DEFAULT_TICKS: usize = 1 << 22;
pub const DEFAULT_WAVELET_ORDER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionSpec {
    pub lambda: f64,
    pub alpha: f64,
    pub mean: f64,
}

impl SessionSpec {
    pub fn params(&self) -> Result<SessionParams> {
        SessionParams::from_means(self.lambda, self.alpha, self.mean)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnOffSpec {
    pub alpha_on: f64,
    pub mean_on: f64,
    pub alpha_off: f64,
    pub mean_off: f64,
}

impl OnOffSpec {
    pub fn params(&self) -> Result<OnOffParams> {
        OnOffParams::from_means(self.alpha_on, self.mean_on, self.alpha_off, self.mean_off)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Outputs {
    /// Directory receiving `report.json` and the per-replicate diagrams;
    /// nothing is written when unset.
    pub dir: Option<PathBuf>,
    /// Also dump every replicate trace in the binary format.
    pub traces: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sessions: SessionSpec,
    pub onoff: OnOffSpec,
    pub n_ticks: usize,
    pub replicates: usize,
    pub seed: u64,
    pub octave_range: (u32, u32),
    pub wavelet_order: usize,
    #[serde(default)]
    pub mode: StartMode,
    #[serde(default)]
    pub outputs: Outputs,
}

/// Default regression range: start two octaves past the mean session
/// length and stop two octaves short of the series length, limited to
/// octaves that still hold enough boundary-free coefficients. When the series
/// is too short for that start, a five-octave band ending at the stop is used.
pub fn default_octaves(mean_sess: f64, n_ticks: usize, wavelet_order: usize) -> Result<(u32, u32)> {
    let deepest = deepest_octave(n_ticks, wavelet_order)?;
    let log_n = usize::BITS - 1 - n_ticks.leading_zeros();
    let j2 = deepest.min(log_n.saturating_sub(2));
    if j2 < 3 {
        return Err(Error::InsufficientOctaves(format!(
            "{n_ticks} ticks leave only {j2} usable octaves"
        )));
    }
    let rule = mean_sess.log2().ceil().max(0.0) as u32 + 2;
    let j1 = if rule + 2 <= j2 { rule } else { j2.saturating_sub(4).max(1) };
    Ok((j1, j2))
}

/// The four reference series: common on-off layer (α=1.4, mean 100 for both
/// periods) with session layers varying in tail index, mean and rate.
pub fn preset(series: u32) -> Result<ExperimentConfig> {
    let (alpha, mean, lambda) = match series {
        1 => (1.2, 12_000.0, 1.0),
        2 => (1.2, 120.0, 5.0),
        3 => (1.2, 1_200.0, 1.0),
        4 => (1.8, 1_200.0, 1.0),
        other => return Err(Error::UnknownSeries(other)),
    };
    let n_ticks = DEFAULT_TICKS;
    Ok(ExperimentConfig {
        sessions: SessionSpec { lambda, alpha, mean },
        onoff: OnOffSpec {
            alpha_on: 1.4,
            mean_on: 100.0,
            alpha_off: 1.4,
            mean_off: 100.0,
        },
        n_ticks,
        replicates: if series == 4 { 10 } else { 5 },
        seed: series as u64,
        octave_range: default_octaves(mean, n_ticks, DEFAULT_WAVELET_ORDER)?,
        wavelet_order: DEFAULT_WAVELET_ORDER,
        mode: StartMode::ExactStationary,
        outputs: Outputs::default(),
    })
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(SessionParams, OnOffParams)> {
        let sess = self.sessions.params()?;
        let oo = self.onoff.params()?;
        if self.replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        let (j1, j2) = self.octave_range;
        if j1 == 0 || j2 < j1 + 2 {
            return Err(invalid(format!("octave range {j1}:{j2} needs j1 ≥ 1 and three octaves")));
        }
        let deepest = deepest_octave(self.n_ticks, self.wavelet_order)?;
        if j2 > deepest {
            return Err(invalid(format!(
                "octave {j2} unavailable: {} ticks support octaves up to {deepest}",
                self.n_ticks
            )));
        }
        Ok((sess, oo))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    /// SHA-256 of the canonical JSON form (outputs excluded).
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.outputs = Outputs::default();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn replicate_seed(&self, index: usize) -> u64 {
        seed::derive(self.seed, Domain::Replicate, index as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub index: usize,
    pub seed: u64,
    pub estimate: Option<HurstEstimate>,
    /// Error message when this replicate failed; other replicates are kept.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub succeeded: usize,
    pub failed: usize,
    pub mean_h: Option<f64>,
    /// Normal interval of the replicate mean from the spread across replicates.
    pub mean_ci: Option<(f64, f64)>,
    pub theory_h: Option<f64>,
    /// Replicates whose own interval covers `theory_h`.
    pub covered: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub master_seed: u64,
    pub replicate_seeds: Vec<u64>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub replicates: Vec<ReplicateResult>,
    pub theory: Option<TheoryReport>,
    pub theory_error: Option<String>,
    pub summary: Summary,
    pub provenance: Provenance,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Fills `path` through a temporary file in the same directory, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write(tmp.as_file_mut())?;
    tmp.as_file_mut().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

struct Replicate {
    result: ReplicateResult,
    diagram: Option<LogscaleDiagram>,
    trace: Option<Trace>,
}

fn run_replicate(config: &ExperimentConfig, sess: &SessionParams, oo: &OnOffParams, index: usize) -> Replicate {
    let seed = config.replicate_seed(index);
    let (j1, j2) = config.octave_range;
    let outcome = synthesize(sess, oo, config.n_ticks, config.mode, seed).and_then(|trace| {
        let diagram = dwt_logscale(&trace.c, config.wavelet_order, j2)?;
        let estimate = estimate_hurst(&diagram, j1, j2);
        Ok((trace, diagram, estimate))
    });
    let keep_trace = config.outputs.traces && config.outputs.dir.is_some();
    match outcome {
        Ok((trace, diagram, estimate)) => {
            let (estimate, failure) = match estimate {
                Ok(e) => (Some(e), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Replicate {
                result: ReplicateResult {
                    index,
                    seed,
                    estimate,
                    failure,
                },
                diagram: Some(diagram),
                trace: keep_trace.then_some(trace),
            }
        }
        Err(e) => Replicate {
            result: ReplicateResult {
                index,
                seed,
                estimate: None,
                failure: Some(e.to_string()),
            },
            diagram: None,
            trace: None,
        },
    }
}

fn summarize(replicates: &[ReplicateResult], theory_h: Option<f64>) -> Summary {
    let hs: Vec<f64> = replicates.iter().filter_map(|r| r.estimate.map(|e| e.h)).collect();
    let n = hs.len();
    let mean_h = (n > 0).then(|| hs.iter().sum::<f64>() / n as f64);
    let mean_ci = mean_h.filter(|_| n > 1).map(|m| {
        let var = hs.iter().map(|h| (h - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        let half = 1.959_963_984_540_054 * (var / n as f64).sqrt();
        (m - half, m + half)
    });
    let covered = theory_h.map(|h| {
        replicates
            .iter()
            .filter(|r| r.estimate.is_some_and(|e| e.covers(h)))
            .count()
    });
    Summary {
        succeeded: n,
        failed: replicates.len() - n,
        mean_h,
        mean_ci,
        theory_h,
        covered,
    }
}

/// Runs every replicate, compares against the theory and writes the
/// configured outputs. Replicate failures are recorded in the report rather
/// than aborting the run.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    let (sess, oo) = config.validate()?;
    let (theory, theory_error) = match hurst_formulas(&oo, &sess, &Quadrature::default()) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let outputs: Vec<Replicate> = (0..config.replicates)
        .into_par_iter()
        .map(|i| run_replicate(config, &sess, &oo, i))
        .collect();

    if let Some(dir) = &config.outputs.dir {
        for rep in &outputs {
            let i = rep.result.index;
            if let Some(d) = &rep.diagram {
                write_atomic(&dir.join(format!("diagram_{i:03}.csv")), |w| d.write_csv(w))?;
            }
            if let Some(t) = &rep.trace {
                write_atomic(&dir.join(format!("trace_{i:03}.bin")), |w| t.write_binary(w))?;
            }
        }
    }

    let replicates: Vec<ReplicateResult> = outputs.into_iter().map(|r| r.result).collect();
    let summary = summarize(&replicates, theory.as_ref().map(|t| t.h_hybrid));
    let report = RunReport {
        provenance: Provenance {
            config_hash: config.hash(),
            master_seed: config.seed,
            replicate_seeds: replicates.iter().map(|r| r.seed).collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        config: config.clone(),
        replicates,
        theory,
        theory_error,
        summary,
    };
    if let Some(dir) = &config.outputs.dir {
        let json = report.to_json()?;
        write_atomic(&dir.join("report.json"), |w| Ok(w.write_all(json.as_bytes())?))?;
    }
    Ok(report)
}
