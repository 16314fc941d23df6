//! The hybrid trace: alive-and-on count `A(k)`, alive count `B(k)` and the
//! randomly centered increment `C(k) = μ_W·B(k) − A(k)`.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::onoff::{OnOffParams, OnOffPath};
use crate::seed::{self, Domain};
use crate::sessions::{self, tick_span, GenerationOptions, SessionParams, SessionSet, StartMode};

/// Magic number of the binary trace format ("HYBR" read little-endian).
pub const TRACE_MAGIC: u32 = 0x4859_4252;
pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub seed: u64,
    pub sessions: SessionParams,
    pub onoff: OnOffParams,
    pub mode: StartMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<f64>,
    pub meta: Option<TraceMeta>,
}

/// Seeds of the two independent layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSeeds {
    pub sessions: u64,
    pub onoff: u64,
}

impl LayerSeeds {
    pub fn from_master(seed: u64) -> Self {
        Self {
            sessions: seed::derive(seed, Domain::Sessions, 0),
            onoff: seed::derive(seed, Domain::OnOff, 0),
        }
    }
}

impl Trace {
    /// Assembles a trace from counts, deriving `C`.
    pub fn from_counts(a: Vec<i64>, b: Vec<i64>, mu_w: f64, meta: Option<TraceMeta>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(invalid("A and B lengths differ"));
        }
        let c = a.iter().zip(&b).map(|(&a, &b)| mu_w * b as f64 - a as f64).collect();
        Ok(Self { a, b, c, meta })
    }

    pub fn n_ticks(&self) -> usize {
        self.c.len()
    }

    /// CSV with columns `tick,A,B,C`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["tick", "A", "B", "C"])?;
        for k in 0..self.n_ticks() {
            w.write_record(&[
                k.to_string(),
                self.a[k].to_string(),
                self.b[k].to_string(),
                format!("{:?}", self.c[k]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["tick", "A", "B", "C"] {
            return Err(Error::Format(format!("expected header tick,A,B,C, got {headers:?}")));
        }
        let (mut a, mut b, mut c) = (Vec::new(), Vec::new(), Vec::new());
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let bad = |what: &str| Error::Format(format!("row {}: bad {what}", i + 1));
            let tick: usize = rec[0].trim().parse().map_err(|_| bad("tick"))?;
            if tick != i {
                return Err(Error::Format(format!("row {}: tick {tick} out of sequence", i + 1)));
            }
            a.push(rec[1].trim().parse().map_err(|_| bad("A"))?);
            b.push(rec[2].trim().parse().map_err(|_| bad("B"))?);
            c.push(rec[3].trim().parse().map_err(|_| bad("C"))?);
        }
        Ok(Self { a, b, c, meta: None })
    }

    /// Little-endian binary: magic, version, `n_ticks`, then `(i64 A, i64 B, f64 C)` per tick.
    pub fn write_binary<W: Write>(&self, out: W) -> Result<()> {
        let mut out = std::io::BufWriter::new(out);
        out.write_all(&TRACE_MAGIC.to_le_bytes())?;
        out.write_all(&TRACE_VERSION.to_le_bytes())?;
        out.write_all(&(self.n_ticks() as u64).to_le_bytes())?;
        for k in 0..self.n_ticks() {
            out.write_all(&self.a[k].to_le_bytes())?;
            out.write_all(&self.b[k].to_le_bytes())?;
            out.write_all(&self.c[k].to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(input: R) -> Result<Self> {
        let mut input = std::io::BufReader::new(input);
        let mut w4 = [0u8; 4];
        let mut w8 = [0u8; 8];
        input.read_exact(&mut w4)?;
        let magic = u32::from_le_bytes(w4);
        if magic != TRACE_MAGIC {
            return Err(Error::Format(format!("bad magic {magic:#010x}")));
        }
        input.read_exact(&mut w4)?;
        let version = u32::from_le_bytes(w4);
        if version != TRACE_VERSION {
            return Err(Error::Format(format!("unsupported trace version {version}")));
        }
        input.read_exact(&mut w8)?;
        let n = u64::from_le_bytes(w8) as usize;
        let (mut a, mut b, mut c) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for _ in 0..n {
            input.read_exact(&mut w8)?;
            a.push(i64::from_le_bytes(w8));
            input.read_exact(&mut w8)?;
            b.push(i64::from_le_bytes(w8));
            input.read_exact(&mut w8)?;
            c.push(f64::from_le_bytes(w8));
        }
        Ok(Self { a, b, c, meta: None })
    }
}

/// Synthesizes `n_ticks` of the hybrid model.
pub fn synthesize(
    sess: &SessionParams,
    oo: &OnOffParams,
    n_ticks: usize,
    mode: StartMode,
    seed: u64,
) -> Result<Trace> {
    synthesize_with(sess, oo, n_ticks, mode, LayerSeeds::from_master(seed), &GenerationOptions::default())
        .map(|mut t| {
            if let Some(m) = t.meta.as_mut() {
                m.seed = seed;
            }
            t
        })
}

pub fn synthesize_with(
    sess: &SessionParams,
    oo: &OnOffParams,
    n_ticks: usize,
    mode: StartMode,
    seeds: LayerSeeds,
    opts: &GenerationOptions,
) -> Result<Trace> {
    if n_ticks == 0 {
        return Err(invalid("n_ticks must be at least 1"));
    }
    let set = sessions::generate_sessions_with(sess, n_ticks as f64, mode, seeds.sessions, opts)?;
    let mut trace = attach_onoff(&set, oo, n_ticks, seeds.onoff)?;
    trace.meta = Some(TraceMeta {
        seed: seeds.sessions,
        sessions: *sess,
        onoff: *oo,
        mode,
    });
    Ok(trace)
}

/// Gives every session its own stationary on-off path (seeded by session
/// index) and counts the alive-and-on sessions at each tick.
pub fn attach_onoff(set: &SessionSet, oo: &OnOffParams, n_ticks: usize, onoff_seed: u64) -> Result<Trace> {
    if n_ticks as f64 > set.horizon() {
        return Err(invalid(format!(
            "{n_ticks} ticks exceed the session horizon {}",
            set.horizon()
        )));
    }
    let b = sessions::busy_servers(set, n_ticks);
    let horizon = n_ticks as f64;
    let list = set.sessions();
    let threads = rayon::current_num_threads().max(1);
    let chunk = list.len().div_ceil(threads).max(1);

    let diff = list
        .par_chunks(chunk)
        .enumerate()
        .map(|(ci, part)| {
            let mut diff = vec![0i32; n_ticks + 1];
            for (j, s) in part.iter().enumerate() {
                let index = (ci * chunk + j) as u64;
                let from = s.start.max(0.0);
                let to = s.end().min(horizon);
                if to <= from {
                    continue;
                }
                let mut path = OnOffPath::new_stationary(*oo, seed::derive(onoff_seed, Domain::Path, index));
                path.visit_on_intervals(to - from, |lo, hi| {
                    let (x, y) = tick_span(from + lo, from + hi, n_ticks);
                    if x < y {
                        diff[x] += 1;
                        diff[y] -= 1;
                    }
                });
            }
            diff
        })
        .reduce_with(|mut acc, d| {
            acc.iter_mut().zip(&d).for_each(|(x, y)| *x += y);
            acc
        })
        .unwrap_or_else(|| vec![0; n_ticks + 1]);

    let mut acc = 0i64;
    let a: Vec<i64> = diff[..n_ticks]
        .iter()
        .map(|&d| {
            acc += d as i64;
            acc
        })
        .collect();
    Trace::from_counts(a, b, oo.mu_w(), None)
}

/// Inclusive partial sums `Y(t) = Σ_{k≤t} C(k)`.
pub fn cumulative(trace: &Trace) -> Vec<f64> {
    trace
        .c
        .iter()
        .scan(0.0, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect()
}
