use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hybridburst::harness::{self, default_octaves, write_atomic, ExperimentConfig};
use hybridburst::scaling::Quadrature;
use hybridburst::wavelet::deepest_octave;
use hybridburst::{
    classify, dwt_logscale, estimate_hurst, hurst_formulas, synthesize, Error, OnOffParams, SessionParams,
    StartMode, Trace,
};
use serde_json::json;

const EXIT_INVALID: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(name = "hybridburst", version, about = "Hybrid session/on-off workload synthesis and Hurst estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct ModelArgs {
    /// Session arrival rate per tick.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Tail index of session lifetimes.
    #[arg(long, default_value_t = 1.2)]
    alpha_sess: f64,
    /// Mean session lifetime in ticks.
    #[arg(long, default_value_t = 1200.0)]
    mean_sess: f64,
    #[arg(long, default_value_t = 1.4)]
    alpha_on: f64,
    #[arg(long, default_value_t = 100.0)]
    mean_on: f64,
    #[arg(long, default_value_t = 1.4)]
    alpha_off: f64,
    #[arg(long, default_value_t = 100.0)]
    mean_off: f64,
}

impl ModelArgs {
    fn params(&self) -> hybridburst::Result<(SessionParams, OnOffParams)> {
        Ok((
            SessionParams::from_means(self.lambda, self.alpha_sess, self.mean_sess)?,
            OnOffParams::from_means(self.alpha_on, self.mean_on, self.alpha_off, self.mean_off)?,
        ))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Warmup,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a trace and write it in binary or CSV form.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1 << 16)]
        ticks: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Ticks discarded before time 0 in warm-up mode (default: 50 mean session lifetimes).
        #[arg(long)]
        discard: Option<u64>,
        /// Output file; a `.csv` extension selects CSV, anything else the binary format.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Estimate the Hurst parameter of a trace's centered increment.
    Estimate {
        /// Trace file (`.csv` or binary).
        trace: PathBuf,
        /// Regression octaves as `j1:j2`; derived from the trace metadata when omitted.
        #[arg(long, value_parser = parse_octaves)]
        octaves: Option<(u32, u32)>,
        #[arg(long, default_value_t = harness::DEFAULT_WAVELET_ORDER)]
        wavelet: usize,
        /// Where to write the logscale diagram CSV.
        #[arg(long)]
        diagram: Option<PathBuf>,
    },
    /// Print the limit theory for a parameter set as JSON.
    Theory {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Run one of the four reference series end to end.
    Reproduce {
        #[arg(long)]
        series: Option<u32>,
        /// TOML experiment config; command-line overrides still apply.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        ticks: Option<usize>,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_octaves)]
        octaves: Option<(u32, u32)>,
        #[arg(long)]
        wavelet: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        discard: Option<u64>,
        /// Output directory for the report and diagrams.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write every replicate trace.
        #[arg(long)]
        traces: bool,
    },
}

fn parse_octaves(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected j1:j2, got {s:?}"))?;
    let j1 = a.trim().parse().map_err(|e| format!("bad j1: {e}"))?;
    let j2 = b.trim().parse().map_err(|e| format!("bad j2: {e}"))?;
    Ok((j1, j2))
}

fn start_mode(mode: Mode, discard: Option<u64>, mean_sess: f64) -> StartMode {
    match mode {
        Mode::Exact => StartMode::ExactStationary,
        Mode::Warmup => StartMode::Warmup(discard.unwrap_or((50.0 * mean_sess).ceil() as u64)),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_)
        | Error::GridTooCoarse { .. }
        | Error::InvalidWaveletOrder(_)
        | Error::InsufficientOctaves(_)
        | Error::UnknownSeries(_)
        | Error::Config(_)
        | Error::ConfigWrite(_)
        | Error::SeriesTooShort { .. } => EXIT_INVALID,
        Error::UnsupportedCase(_) => EXIT_UNSUPPORTED,
        _ => EXIT_RUNTIME,
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn print_json(value: &serde_json::Value) -> hybridburst::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn simulate(
    model: ModelArgs,
    ticks: usize,
    seed: u64,
    mode: Mode,
    discard: Option<u64>,
    out: &Path,
) -> hybridburst::Result<()> {
    let (sess, oo) = model.params()?;
    let trace = synthesize(&sess, &oo, ticks, start_mode(mode, discard, model.mean_sess), seed)?;
    let csv = is_csv(out);
    write_atomic(out, |w| if csv { trace.write_csv(w) } else { trace.write_binary(w) })?;
    eprintln!("wrote {} ticks to {}", trace.n_ticks(), out.display());
    Ok(())
}

fn estimate(trace_path: &Path, octaves: Option<(u32, u32)>, order: usize, diagram_path: Option<&Path>) -> hybridburst::Result<()> {
    let reader = BufReader::new(File::open(trace_path)?);
    let trace = if is_csv(trace_path) { Trace::read_csv(reader)? } else { Trace::read_binary(reader)? };
    let (j1, j2) = match octaves {
        Some(r) => r,
        None => match &trace.meta {
            Some(m) => default_octaves(m.sessions.lifetime().mean(), trace.n_ticks(), order)?,
            None => {
                let j2 = deepest_octave(trace.n_ticks(), order)?;
                (j2.saturating_sub(4).max(1), j2)
            }
        },
    };
    let diagram = dwt_logscale(&trace.c, order, j2)?;
    if let Some(p) = diagram_path {
        write_atomic(p, |w| diagram.write_csv(w))?;
    }
    let est = estimate_hurst(&diagram, j1, j2)?;
    print_json(&serde_json::to_value(est)?)
}

fn theory(model: ModelArgs) -> hybridburst::Result<()> {
    // Classify first: unsupported regions may have session indices too
    // heavy for a finite mean, which parameter construction rejects.
    let alpha_min = model.alpha_on.min(model.alpha_off);
    let class = classify(alpha_min, model.alpha_sess)?;
    if !class.supported {
        print_json(&json!({ "classification": class }))?;
        return Err(Error::UnsupportedCase(class.case_id.to_string()));
    }
    let (sess, oo) = model.params()?;
    let report = hurst_formulas(&oo, &sess, &Quadrature::default())?;
    print_json(&serde_json::to_value(report)?)
}

#[allow(clippy::too_many_arguments)]
fn reproduce(
    series: Option<u32>,
    config: Option<&Path>,
    ticks: Option<usize>,
    replicates: Option<usize>,
    seed: Option<u64>,
    octaves: Option<(u32, u32)>,
    wavelet: Option<usize>,
    mode: Option<Mode>,
    discard: Option<u64>,
    out: Option<PathBuf>,
    traces: bool,
) -> hybridburst::Result<()> {
    let mut cfg = match (config, series) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(n)) => harness::preset(n)?,
        (None, None) => {
            return Err(Error::InvalidParameter("either --series or --config is required".into()));
        }
    };
    let mut rederive = false;
    if let Some(n) = ticks {
        cfg.n_ticks = n;
        rederive = true;
    }
    if let Some(w) = wavelet {
        cfg.wavelet_order = w;
        rederive = true;
    }
    if let Some(r) = replicates {
        cfg.replicates = r;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(m) = mode {
        cfg.mode = start_mode(m, discard, cfg.sessions.mean);
    }
    match octaves {
        Some(r) => cfg.octave_range = r,
        None if rederive => {
            cfg.octave_range = default_octaves(cfg.sessions.mean, cfg.n_ticks, cfg.wavelet_order)?;
        }
        None => {}
    }
    if out.is_some() {
        cfg.outputs.dir = out;
    }
    cfg.outputs.traces |= traces;
    if let Some(dir) = &cfg.outputs.dir {
        std::fs::create_dir_all(dir)?;
    }

    let report = harness::run(&cfg)?;
    {
        let mut err = BufWriter::new(io::stderr().lock());
        for r in &report.replicates {
            match (&r.estimate, &r.failure) {
                (Some(e), _) => writeln!(err, "replicate {:>3}: H = {:.4} [{:.4}, {:.4}]", r.index, e.h, e.ci_low, e.ci_high)?,
                (None, Some(f)) => writeln!(err, "replicate {:>3}: failed: {f}", r.index)?,
                (None, None) => {}
            }
        }
    }
    println!("{}", report.to_json()?);
    if report.summary.succeeded == 0 {
        return Err(Error::Format("every replicate failed".into()));
    }
    Ok(())
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("HYBRIDBURST_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| format!("HYBRIDBURST_THREADS must be a positive integer, got {value:?}"))?;
    if n == 0 {
        return Err("HYBRIDBURST_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INVALID);
    }
    let result = match cli.command {
        Command::Simulate { model, ticks, seed, mode, discard, out } => simulate(model, ticks, seed, mode, discard, &out),
        Command::Estimate { trace, octaves, wavelet, diagram } => estimate(&trace, octaves, wavelet, diagram.as_deref()),
        Command::Theory { model } => theory(model),
        Command::Reproduce {
            series,
            config,
            ticks,
            replicates,
            seed,
            octaves,
            wavelet,
            mode,
            discard,
            out,
            traces,
        } => reproduce(series, config.as_deref(), ticks, replicates, seed, octaves, wavelet, mode, discard, out, traces),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
