//! The burst layer: Poisson session arrivals with Pareto lifetimes and the
//! resulting M/G/∞ busy-server count.

use std::io::{Read, Write};

use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::heavytail::ParetoDist;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionParams {
    lambda: f64,
    lifetime: ParetoDist,
}

impl SessionParams {
    pub fn new(lambda: f64, lifetime: ParetoDist) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("arrival rate must be positive, got {lambda}")));
        }
        Ok(Self { lambda, lifetime })
    }

    pub fn from_means(lambda: f64, alpha_sess: f64, mean_sess: f64) -> Result<Self> {
        Self::new(lambda, ParetoDist::from_mean(mean_sess, alpha_sess)?)
    }

    /// Sessions per tick.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lifetime(&self) -> &ParetoDist {
        &self.lifetime
    }

    /// Stationary mean number of live sessions, `λ·μ_V`.
    pub fn mean_occupancy(&self) -> f64 {
        self.lambda * self.lifetime.mean()
    }
}

/// How the session population reaches stationarity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "discard")]
pub enum StartMode {
    #[default]
    /// Poisson(λμ_V) sessions alive at time 0 with equilibrium residual lives.
    ExactStationary,
    /// Arrivals simulated from `−discard` with full lifetimes.
    Warmup(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub start: f64,
    pub duration: f64,
}

impl Session {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationOptions {
    /// Floor every duration to an integer number of ticks.
    pub truncate_durations: bool,
    /// Largest admissible expected number of live sessions.
    pub memory_budget: f64,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        Self {
            truncate_durations: false,
            memory_budget: 1e8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionSet {
    sessions: Vec<Session>,
    horizon: f64,
    mode: StartMode,
    seed: u64,
}

impl SessionSet {
    /// Wraps sessions read from elsewhere (for replay); they are sorted by start.
    pub fn from_sessions(mut sessions: Vec<Session>, horizon: f64, mode: StartMode, seed: u64) -> Self {
        sessions.sort_by(|a, b| a.start.total_cmp(&b.start));
        Self {
            sessions,
            horizon,
            mode,
            seed,
        }
    }

    pub fn sessions(&self) -> &[Session] {
        &self.sessions
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn mode(&self) -> StartMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }

    /// CSV with columns `start,duration`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["start", "duration"])?;
        for s in &self.sessions {
            w.write_record(&[format!("{:?}", s.start), format!("{:?}", s.duration)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R, horizon: f64, mode: StartMode, seed: u64) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["start", "duration"] {
            return Err(Error::Format(format!("expected header start,duration, got {headers:?}")));
        }
        let mut sessions = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec[i]
                    .trim()
                    .parse()
                    .map_err(|e| Error::Format(format!("bad number {:?}: {e}", &rec[i])))
            };
            sessions.push(Session {
                start: parse(0)?,
                duration: parse(1)?,
            });
        }
        Ok(Self::from_sessions(sessions, horizon, mode, seed))
    }
}

pub fn generate_sessions(params: &SessionParams, horizon: f64, mode: StartMode, seed: u64) -> Result<SessionSet> {
    generate_sessions_with(params, horizon, mode, seed, &GenerationOptions::default())
}

/// Draws the sessions overlapping `[0, horizon)`.
pub fn generate_sessions_with(
    params: &SessionParams,
    horizon: f64,
    mode: StartMode,
    seed: u64,
    opts: &GenerationOptions,
) -> Result<SessionSet> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(invalid(format!("horizon must be non-negative, got {horizon}")));
    }
    let occupancy = params.mean_occupancy();
    if occupancy > opts.memory_budget {
        return Err(Error::MemoryBudget {
            expected: occupancy,
            budget: opts.memory_budget,
        });
    }
    let mut rng = seed::stream(seed);
    let life = params.lifetime;
    let fix = |d: f64| if opts.truncate_durations { d.floor() } else { d };
    let gap = Exp::new(params.lambda).map_err(|e| invalid(e.to_string()))?;

    let expected = occupancy + params.lambda * horizon;
    let mut sessions = Vec::with_capacity((expected * 1.05 + 16.0) as usize);
    let mut t = match mode {
        StartMode::ExactStationary => {
            let alive = Poisson::new(occupancy).map_err(|e| invalid(e.to_string()))?.sample(&mut rng) as u64;
            for _ in 0..alive {
                sessions.push(Session {
                    start: 0.0,
                    duration: fix(life.equilibrium_sample(&mut rng)),
                });
            }
            0.0
        }
        StartMode::Warmup(discard) => -(discard as f64),
    };
    loop {
        t += gap.sample(&mut rng);
        if t >= horizon {
            break;
        }
        let s = Session {
            start: t,
            duration: fix(life.sample(&mut rng)),
        };
        if s.end() > 0.0 {
            sessions.push(s);
        }
    }
    Ok(SessionSet {
        sessions,
        horizon,
        mode,
        seed,
    })
}

/// `[first, last)` tick range during which a session is alive, clipped to `[0, n)`.
pub(crate) fn tick_span(start: f64, end: f64, n_ticks: usize) -> (usize, usize) {
    let clip = |x: f64| {
        let c = x.ceil();
        if c <= 0.0 {
            0
        } else if c >= n_ticks as f64 {
            n_ticks
        } else {
            c as usize
        }
    };
    (clip(start), clip(end))
}

/// `B(k) = #{sessions with start ≤ k < start + duration}`.
pub fn busy_servers(set: &SessionSet, n_ticks: usize) -> Vec<i64> {
    let mut diff = vec![0i64; n_ticks + 1];
    for s in &set.sessions {
        let (a, b) = tick_span(s.start, s.end(), n_ticks);
        if a < b {
            diff[a] += 1;
            diff[b] -= 1;
        }
    }
    let mut acc = 0;
    diff.truncate(n_ticks);
    for d in diff.iter_mut() {
        acc += *d;
        *d = acc;
    }
    diff
}

/// Counts arrivals and departures falling in each tick interval `(k, k+1]`.
pub fn tick_events(set: &SessionSet, n_ticks: usize) -> Vec<u64> {
    let mut events = vec![0u64; n_ticks];
    let mut bump = |x: f64| {
        if x > 0.0 && x < n_ticks as f64 {
            let k = (x.ceil() as usize).saturating_sub(1);
            events[k] += 1;
        }
    };
    for s in &set.sessions {
        bump(s.start);
        bump(s.end());
    }
    events
}
