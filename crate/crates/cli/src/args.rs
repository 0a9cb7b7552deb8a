use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "qgt",
    version,
    about = "Mixed-state quantum geometric tensor of thermal states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the tensor at one parameter point and temperature.
    Point(PointArgs),
    /// Evaluate the tensor over a grid of 1-2 swept axes and temperatures.
    Sweep(SweepArgs),
    /// Mixed-state geometric phase θ_g, by two independent methods.
    Phase(PhaseArgs),
    /// Solve the BCS gap and number equations along a temperature axis.
    Bcs(BcsArgs),
    /// Run the invariant suites on seeded random models and the built-in models.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Ssh,
    Dirac,
    Bcs,
    Bloch,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    /// SSH intracell hopping.
    #[arg(long = "J1", default_value_t = 2.0)]
    pub j1: f64,
    /// SSH intercell hopping.
    #[arg(long = "J2", default_value_t = 1.0)]
    pub j2: f64,
    /// Dirac mass.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mass: f64,
    /// BCS attractive coupling.
    #[arg(long = "U", default_value_t = 8.0)]
    pub coupling: f64,
    /// BCS filling per site.
    #[arg(long = "n", default_value_t = 1.2)]
    pub density: f64,
    /// BCS hopping.
    #[arg(long = "t", default_value_t = 1.0)]
    pub hopping: f64,
    /// BCS lattice size L (L³ momentum grid).
    #[arg(long = "grid", default_value_t = 32)]
    pub grid: usize,
    /// Bloch-sphere field strength.
    #[arg(long, default_value_t = 1.0)]
    pub field: f64,
    /// Random-model Hilbert-space dimension.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Random-model parameter count.
    #[arg(long, default_value_t = 1)]
    pub params: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CoordArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub ky: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kz: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Any parameter by name, e.g. `--coord R0=0.3`.
    #[arg(long = "coord", value_name = "NAME=VALUE")]
    pub coord: Vec<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TempArgs {
    /// Temperature, or a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub temp: Vec<f64>,
    /// Temperature axis `start:stop:count`.
    #[arg(long = "temp-range", value_name = "A:B:N")]
    pub temp_range: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    /// Central-difference step.
    #[arg(long, default_value_t = qgt_core::qgt::DEFAULT_STEP)]
    pub step: f64,
    /// Disable Richardson extrapolation of the finite differences.
    #[arg(long)]
    pub no_richardson: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for grid evaluation.
    #[arg(long, env = "QGT_THREADS")]
    pub threads: Option<usize>,
    /// Omit the timestamp footer line so identical runs give identical files.
    #[arg(long)]
    pub reproducible: bool,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub coords: CoordArgs,
    #[arg(long)]
    pub temp: f64,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub coords: CoordArgs,
    /// Swept axis `name=start:stop:count`; a parameter or a model constant.
    #[arg(long = "range", value_name = "AXIS=A:B:N")]
    pub ranges: Vec<String>,
    #[command(flatten)]
    pub temps: TempArgs,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Swept axis: `mass=...` for dirac, `alpha=...` for bloch.
    #[arg(long = "range", value_name = "AXIS=A:B:N")]
    pub ranges: Vec<String>,
    /// Bloch cap opening angle.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub temps: TempArgs,
    /// Radial Gauss-Legendre nodes of the one-dimensional Dirac integral.
    #[arg(long, default_value_t = qgt_core::geomphase::DEFAULT_RADIAL_NODES)]
    pub nodes: usize,
    /// Radial nodes of the 2D surface grid.
    #[arg(long, default_value_t = 192)]
    pub surface_nodes: usize,
    /// Angular nodes of the 2D surface grid.
    #[arg(long, default_value_t = 8)]
    pub angular_nodes: usize,
    /// Points per Bloch latitude loop.
    #[arg(long, default_value_t = 2000)]
    pub loop_points: usize,
    /// Loops used to contract a Bloch latitude to the pole.
    #[arg(long, default_value_t = 40)]
    pub contraction_steps: usize,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BcsArgs {
    #[arg(long = "U", default_value_t = 8.0)]
    pub coupling: f64,
    #[arg(long = "n", default_value_t = 1.2)]
    pub density: f64,
    #[arg(long = "t", default_value_t = 1.0)]
    pub hopping: f64,
    #[arg(long = "grid", default_value_t = 32)]
    pub grid: usize,
    #[command(flatten)]
    pub temps: TempArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random models per property suite.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Inclusive linear axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

/// Parses `a:b:n` with `a < b` and `n ≥ 1`.
pub fn parse_span(name: &str, spec: &str) -> anyhow::Result<Axis> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("range for {name} must look like start:stop:count, got {spec:?}");
    }
    let start: f64 = parts[0]
        .trim()
        .parse()
        .with_context(|| format!("bad start in {spec:?}"))?;
    let stop: f64 = parts[1]
        .trim()
        .parse()
        .with_context(|| format!("bad stop in {spec:?}"))?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .with_context(|| format!("bad count in {spec:?}"))?;
    if !(start.is_finite() && stop.is_finite()) || start >= stop {
        bail!("range for {name} needs finite start < stop, got {start}:{stop}");
    }
    if count == 0 {
        bail!("range for {name} needs at least one point");
    }
    Ok(Axis {
        name: name.to_string(),
        start,
        stop,
        count,
    })
}

/// Parses `name=a:b:n`.
pub fn parse_axis(spec: &str) -> anyhow::Result<Axis> {
    let (name, span) = spec
        .split_once('=')
        .with_context(|| format!("expected AXIS=A:B:N, got {spec:?}"))?;
    parse_span(name.trim(), span)
}

pub fn parse_assignment(spec: &str) -> anyhow::Result<(String, f64)> {
    let (name, value) = spec
        .split_once('=')
        .with_context(|| format!("expected NAME=VALUE, got {spec:?}"))?;
    let value: f64 = value
        .trim()
        .parse()
        .with_context(|| format!("bad value in {spec:?}"))?;
    Ok((name.trim().to_string(), value))
}

impl TempArgs {
    /// Temperatures in axis order; a range and an explicit list may not be mixed.
    pub fn resolve(&self) -> anyhow::Result<Vec<f64>> {
        let temps = match (&self.temp_range, self.temp.is_empty()) {
            (Some(_), false) => bail!("give either --temp or --temp-range, not both"),
            (Some(spec), true) => parse_span("T", spec)?.values(),
            (None, false) => self.temp.clone(),
            (None, true) => bail!("a temperature is required (--temp or --temp-range)"),
        };
        if let Some(t) = temps.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            bail!("temperatures must be finite and non-negative, got {t}");
        }
        Ok(temps)
    }
}
