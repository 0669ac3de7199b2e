//! Command-line front end. `semcom <rdp|capacity|channel|pipeline> ...`
//!
//! Exit codes: 0 on success, 2 when some frames failed but the run
//! completed, 1 on fatal errors.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::capacity::{
    capacity_bounds_sweep_with, write_bounds_csv, QuadratureConfig, VarianceMode,
};
use crate::channel::{write_trace_csv, ChannelConfig, SemanticNoiseModel};
use crate::info::DiscreteDistribution;
use crate::pipeline::{
    encode_frame_into, run_pipeline_stream, transmit_stream, CompletionPolicy, FeatureFrame,
    FrameFailure, Selection,
};
use crate::rdp::{sweep, write_sweep_csv, RdpProblem, SolverConfig};
use crate::{Error, Result};

/// Environment variable consulted for the seed when neither `--seed` nor the
/// config file provide one.
pub const SEED_ENV: &str = "SEMCOM_SEED";

#[derive(Debug, Parser)]
#[command(name = "semcom", version, about = "Semantic communication toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate-distortion-perception sweep over (alpha, mu).
    Rdp(RdpArgs),
    /// Capacity bounds of the semantic channel over an SNR grid.
    Capacity(CapacityArgs),
    /// Pass an SFF1 stream through the semantic channel.
    Channel(ChannelArgs),
    /// Run the select, transmit, complete pipeline on an SFF1 stream.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct RdpArgs {
    /// Source as `x:p,x:p,...` or bare probabilities over 0, 1, 2, ...
    #[arg(long)]
    pub source: String,
    /// Reconstruction alphabet, comma separated. Defaults to the source alphabet.
    #[arg(long)]
    pub recon_alphabet: Option<String>,
    /// Values `a,b,c` or an inclusive range `start:stop:count`.
    #[arg(long, default_value = "1")]
    pub alpha_grid: String,
    #[arg(long, default_value = "0")]
    pub mu_grid: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// CSV output path, stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long)]
    pub sigma_p2: f64,
    /// Values `a,b,c` or an inclusive range `start:stop:count`, in dB.
    #[arg(long, allow_hyphen_values = true, default_value = "0:30:31")]
    pub snr_grid: String,
    /// Estimate the equivalent variance from this many noise samples
    /// instead of the closed form.
    #[arg(long)]
    pub sample_variance: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// ChannelConfig JSON file.
    #[arg(long)]
    pub config: PathBuf,
    /// Input SFF1 stream, `-` for stdin.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output SFF1 stream, `-` for stdout.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON report path.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Per-symbol CSV trace path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    /// `prior-mean` or `prior-sample[:SEED]`.
    #[arg(long, default_value = "prior-mean")]
    pub policy: CompletionPolicy,
    /// Override each frame's mask: `all`, `first:N` or `i,j,k`.
    #[arg(long)]
    pub select: Option<Selection>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Completed frames as a fully selected SFF1 stream.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    PartialFailure,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Self::Success => 0,
            Self::PartialFailure => 2,
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Rdp(args) => run_rdp(&args),
        Command::Capacity(args) => run_capacity(&args),
        Command::Channel(args) => run_channel(&args),
        Command::Pipeline(args) => run_pipeline_cmd(&args),
    }
}

fn bad_arg(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn parse_f64(s: &str) -> Result<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        _ => t
            .parse()
            .map_err(|_| bad_arg(format!("not a number: {t:?}"))),
    }
}

/// Parses `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let (start, stop) = (parse_f64(start)?, parse_f64(stop)?);
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| bad_arg(format!("invalid point count in {spec:?}")))?;
            match count {
                0 => Err(bad_arg("grid needs at least one point")),
                1 => Ok(vec![start]),
                n => Ok((0..n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect()),
            }
        }
        [_] => spec
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(parse_f64)
            .collect(),
        _ => Err(bad_arg(format!("invalid grid {spec:?}"))),
    }
}

/// Parses `x:p,x:p,...` or bare probabilities placed on `0, 1, 2, ...`.
pub fn parse_source(spec: &str) -> Result<DiscreteDistribution> {
    let items: Vec<&str> = spec
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    let mut alphabet = Vec::with_capacity(items.len());
    let mut probs = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        match item.split_once(':') {
            Some((x, p)) => {
                alphabet.push(parse_f64(x)?);
                probs.push(parse_f64(p)?);
            }
            None => {
                alphabet.push(i as f64);
                probs.push(parse_f64(item)?);
            }
        }
    }
    Ok(DiscreteDistribution::new(alphabet, probs)?)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(io::stdout())),
    })
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    if path == Path::new("-") {
        io::stdin().read_to_end(&mut buf)?;
    } else {
        File::open(path)?.read_to_end(&mut buf)?;
    }
    Ok(buf)
}

fn run_rdp(args: &RdpArgs) -> Result<Outcome> {
    let source = parse_source(&args.source)?;
    let recon = match &args.recon_alphabet {
        Some(s) => parse_grid(s)?,
        None => source.alphabet().to_vec(),
    };
    let alphas = parse_grid(&args.alpha_grid)?;
    let mus = parse_grid(&args.mu_grid)?;
    let template = RdpProblem::new(source, recon, alphas[0], mus[0])?;
    let config = SolverConfig {
        tolerance: args.tol,
        max_iterations: args.max_iters,
    };
    let points = sweep(&template, &alphas, &mus, &config)?;
    let failed = points
        .iter()
        .filter(|p| p.failure.is_some() || !p.converged)
        .count();
    let mut out = open_output(args.out.as_deref())?;
    write_sweep_csv(&points, &mut out)?;
    out.flush()?;
    if failed > 0 {
        log::warn!("{failed} of {} grid points did not converge", points.len());
        return Ok(Outcome::PartialFailure);
    }
    Ok(Outcome::Success)
}

fn run_capacity(args: &CapacityArgs) -> Result<Outcome> {
    let model = SemanticNoiseModel::new(args.a, args.b, args.sigma_p2)?;
    let grid = parse_grid(&args.snr_grid)?;
    let mode = match args.sample_variance {
        Some(samples) => VarianceMode::Sampled {
            samples,
            seed: resolve_seed(args.seed, None)?,
        },
        None => VarianceMode::Analytic,
    };
    let rows = capacity_bounds_sweep_with(&model, &grid, &QuadratureConfig::default(), mode)?;
    let mut out = open_output(args.out.as_deref())?;
    write_bounds_csv(&rows, &mut out)?;
    out.flush()?;
    Ok(Outcome::Success)
}

/// `--seed` wins, then the config file's `seed` key, then `SEMCOM_SEED`,
/// then 0.
pub fn resolve_seed(flag: Option<u64>, config_seed: Option<u64>) -> Result<u64> {
    if let Some(s) = flag.or(config_seed) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| bad_arg(format!("{SEED_ENV}={v:?} is not a 64-bit unsigned integer"))),
        Err(_) => Ok(0),
    }
}

/// Loads a channel config and applies the seed precedence.
pub fn load_channel_config(path: &Path, seed_flag: Option<u64>) -> Result<ChannelConfig> {
    let text = std::fs::read_to_string(path)?;
    let raw: serde_json::Value = serde_json::from_str(&text)?;
    let config_seed = match raw.get("seed") {
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| bad_arg("config seed must be a non-negative integer"))?,
        ),
        None => None,
    };
    let mut cfg = ChannelConfig::from_json(&text)?;
    cfg.seed = resolve_seed(seed_flag, config_seed)?;
    Ok(cfg)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = open_output(Some(path))?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct WithFailures<'a, T: Serialize> {
    #[serde(flatten)]
    report: &'a T,
    failures: &'a [FrameFailure],
}

fn outcome(failures: &[FrameFailure]) -> Outcome {
    if failures.is_empty() {
        Outcome::Success
    } else {
        for f in failures {
            eprintln!("frame {:?}: {}", f.frame_id, f.error);
        }
        Outcome::PartialFailure
    }
}

fn run_channel(args: &ChannelArgs) -> Result<Outcome> {
    let cfg = load_channel_config(&args.config, args.seed)?;
    let bytes = read_input(&args.input)?;
    let out = transmit_stream(&bytes, &cfg, args.trace.is_some());
    let mut w = open_output(Some(&args.out))?;
    w.write_all(&out.bytes)?;
    w.flush()?;
    if let Some(p) = &args.trace {
        write_trace_csv(&out.trace, BufWriter::new(File::create(p)?))?;
    }
    if let Some(p) = &args.report {
        write_json(
            p,
            &WithFailures {
                report: &out.report,
                failures: &out.failures,
            },
        )?;
    }
    Ok(outcome(&out.failures))
}

fn run_pipeline_cmd(args: &PipelineArgs) -> Result<Outcome> {
    let cfg = load_channel_config(&args.config, args.seed)?;
    let bytes = read_input(&args.input)?;
    let out = run_pipeline_stream(&bytes, &cfg, args.policy, args.select.as_ref());
    if let Some(p) = &args.out {
        let mut buf = Vec::new();
        for f in &out.frames {
            let full = FeatureFrame::fully_selected(f.frame_id(), f.features().to_vec())
                .expect("completed frames are non-empty")
                .with_quantized(f.quantized());
            encode_frame_into(&full, &mut buf);
        }
        let mut w = open_output(Some(p))?;
        w.write_all(&buf)?;
        w.flush()?;
    }
    let report = WithFailures {
        report: &out.report,
        failures: &out.failures,
    };
    match &args.report {
        Some(p) => write_json(p, &report)?,
        None => {
            let mut w = io::stdout().lock();
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
        }
    }
    Ok(outcome(&out.failures))
}
