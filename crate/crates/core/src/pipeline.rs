//! Conventional and improved processing methods, timing, and report output.
//!
//! The conventional method fits the noisy position signal directly. The
//! improved method first keeps one frequency band of the noisy signal and
//! fits that. Both fit a time-to-position regression: input is the sample
//! time mapped to `[0, 1]`, targets are the three position components.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bandfilter::{self, Band, BandError, BandSpec};
use crate::rbf::{self, RbfError, RbfNetwork, TrainConfig, TrainTrace};
use crate::signal::{self, Component, NoiseConfig, PositionSeries, SignalError, TrajectoryConfig};

pub const REPORT_HEADER: &str =
    "method,band,max_neurons,spread,sse_goal,seed,elapsed_s,filter_s,neurons_used,final_sse,output_mse";
pub const PLOT_HEADER: &str = "t,original,teaching,learned";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Band(#[from] BandError),
    #[error(transparent)]
    Rbf(#[from] RbfError),
    #[error("invalid method config: {0}")]
    InvalidConfig(String),
    #[error("paired configs must share trajectory and noise")]
    Unpaired,
    #[error("empty benchmark grid")]
    EmptyGrid,
    #[error("result carries no training trace")]
    MissingTrace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Conventional,
    Improved,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Conventional => "conventional",
            Method::Improved => "improved",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conventional" | "basic" => Ok(Method::Conventional),
            "improved" | "new" => Ok(Method::Improved),
            _ => Err(PipelineError::InvalidConfig(format!("unknown method `{s}`"))),
        }
    }
}

/// One end-to-end run.
///
/// `train.spread` is measured in sample intervals of the full-rate series,
/// so the same value describes the same kernel width for both methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub method: Method,
    /// Required iff `method` is improved.
    pub band: Option<Band>,
    /// `None` means [`BandSpec::default_for`] the series' Nyquist frequency.
    pub band_spec: Option<BandSpec>,
    pub train: TrainConfig,
    pub noise: NoiseConfig,
    pub trajectory: TrajectoryConfig,
    /// Train the improved method on the selected band at its reduced
    /// critical rate (every `M`-th sample, see [`Band::decimation_factor`]).
    pub decimate: bool,
}

impl MethodConfig {
    pub fn conventional(trajectory: TrajectoryConfig, noise: NoiseConfig, train: TrainConfig) -> Self {
        MethodConfig {
            method: Method::Conventional,
            band: None,
            band_spec: None,
            train,
            noise,
            trajectory,
            decimate: true,
        }
    }

    /// Same signal and training parameters, improved method on `band`.
    pub fn improved_from(&self, band: Band) -> Self {
        MethodConfig {
            method: Method::Improved,
            band: Some(band),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        match (self.method, self.band) {
            (Method::Conventional, Some(_)) => {
                return Err(PipelineError::InvalidConfig(
                    "conventional method takes no band".into(),
                ))
            }
            (Method::Improved, None) => {
                return Err(PipelineError::InvalidConfig("improved method needs a band".into()))
            }
            _ => {}
        }
        self.trajectory.validate()?;
        self.train.validate()?;
        if !(self.noise.sigma.is_finite() && self.noise.sigma >= 0.0) {
            return Err(SignalError::InvalidSigma(self.noise.sigma).into());
        }
        if self.method == Method::Improved {
            self.resolved_band_spec().validate(0.5 / self.trajectory.dt)?;
        }
        Ok(())
    }

    pub fn resolved_band_spec(&self) -> BandSpec {
        self.band_spec
            .unwrap_or_else(|| BandSpec::default_for(0.5 / self.trajectory.dt))
    }

    pub fn band_label(&self) -> &'static str {
        self.band.map_or("none", Band::name)
    }
}

/// Source of monotonic time in seconds.
pub trait Clock {
    fn now(&self) -> f64;
}

pub struct MonotonicClock {
    origin: Instant,
}

impl MonotonicClock {
    pub fn new() -> Self {
        MonotonicClock {
            origin: Instant::now(),
        }
    }
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for MonotonicClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

/// Clock that never advances; used when timing is off.
pub struct FrozenClock;

impl Clock for FrozenClock {
    fn now(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkResult {
    pub config: MethodConfig,
    /// Wall-clock seconds spent in the training call.
    pub elapsed_train_seconds: f64,
    /// Wall-clock seconds spent selecting the band of the noisy signal.
    pub filter_seconds: f64,
    pub neurons_used: usize,
    pub final_sse: f64,
    /// MSE of the network output over every sample against the clean
    /// reference (band-filtered for the improved method).
    pub output_mse: f64,
    pub training_samples: usize,
    pub decimation: usize,
    pub network: RbfNetwork,
    pub trace: Option<TrainTrace>,
    pub reference: PositionSeries,
    pub learned: PositionSeries,
}

/// Clean and noisy versions of one trajectory.
#[derive(Debug, Clone)]
pub struct SignalPair {
    pub clean: PositionSeries,
    pub noisy: PositionSeries,
}

impl SignalPair {
    pub fn generate(trajectory: &TrajectoryConfig, noise: &NoiseConfig) -> Result<Self, PipelineError> {
        let clean = signal::generate_trajectory(trajectory)?;
        let noisy = signal::add_noise(&clean, noise)?;
        Ok(SignalPair { clean, noisy })
    }
}

/// Sample times mapped onto `[0, 1]`.
pub fn normalized_time(n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0; n];
    }
    let last = (n - 1) as f64;
    (0..n).map(|i| i as f64 / last).collect()
}

pub fn run_method(config: &MethodConfig) -> Result<BenchmarkResult, PipelineError> {
    run_method_with_clock(config, &MonotonicClock::new())
}

pub fn run_method_with_clock(config: &MethodConfig, clock: &dyn Clock) -> Result<BenchmarkResult, PipelineError> {
    config.validate()?;
    let signals = SignalPair::generate(&config.trajectory, &config.noise)?;
    run_on_signals(config, &signals, clock)
}

/// Runs one method on an already generated signal pair.
pub fn run_on_signals(
    config: &MethodConfig,
    signals: &SignalPair,
    clock: &dyn Clock,
) -> Result<BenchmarkResult, PipelineError> {
    config.validate()?;
    let n = signals.noisy.len();
    let (source, reference, filter_seconds, decimation) = match config.band {
        None => (signals.noisy.clone(), signals.clean.clone(), 0.0, 1),
        Some(band) => {
            let spec = config.resolved_band_spec();
            let start = clock.now();
            let noisy_band = bandfilter::select_band(&signals.noisy, band, &spec)?;
            let filter_seconds = clock.now() - start;
            let clean_band = bandfilter::select_band(&signals.clean, band, &spec)?;
            let decimation = if config.decimate {
                band.decimation_factor(&spec, signals.noisy.nyquist())
            } else {
                1
            };
            (noisy_band.series, clean_band.series, filter_seconds, decimation)
        }
    };

    let time = normalized_time(n);
    let rows: Vec<usize> = (0..n).step_by(decimation).collect();
    let inputs = DMatrix::from_fn(rows.len(), 1, |r, _| time[rows[r]]);
    let targets = DMatrix::from_fn(rows.len(), 3, |r, c| source.samples()[rows[r]][c]);
    let spread_samples = config.train.spread;
    let scale = if n > 1 { (n - 1) as f64 } else { 1.0 };
    let train_cfg = TrainConfig {
        spread: spread_samples / scale,
        ..config.train
    };

    let start = clock.now();
    let (network, trace) = rbf::train(&inputs, &targets, &train_cfg)?;
    let elapsed_train_seconds = clock.now() - start;

    let all_inputs = DMatrix::from_column_slice(n, 1, &time);
    let out = network.predict(&all_inputs)?;
    let learned = reference.with_samples((0..n).map(|i| [out[(i, 0)], out[(i, 1)], out[(i, 2)]]).collect())?;
    let output_mse = signal::mse(&learned, &reference)?;

    Ok(BenchmarkResult {
        config: config.clone(),
        elapsed_train_seconds: elapsed_train_seconds.max(0.0),
        filter_seconds: filter_seconds.max(0.0),
        neurons_used: network.num_centers(),
        final_sse: trace.final_sse(),
        output_mse,
        training_samples: rows.len(),
        decimation,
        network,
        trace: Some(trace),
        reference,
        learned,
    })
}

/// A conventional run and, optionally, its improved counterpart on the same
/// signal.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodPair {
    pub conventional: MethodConfig,
    pub improved: Option<MethodConfig>,
}

impl MethodPair {
    pub fn new(conventional: MethodConfig, band: Option<Band>) -> Self {
        let improved = band.map(|b| conventional.improved_from(b));
        MethodPair {
            conventional,
            improved,
        }
    }

    fn validate(&self) -> Result<(), PipelineError> {
        if self.conventional.method != Method::Conventional {
            return Err(PipelineError::InvalidConfig(
                "first member of a pair must be conventional".into(),
            ));
        }
        if let Some(imp) = &self.improved {
            if imp.method != Method::Improved {
                return Err(PipelineError::InvalidConfig(
                    "second member of a pair must be improved".into(),
                ));
            }
            if imp.trajectory != self.conventional.trajectory || imp.noise != self.conventional.noise {
                return Err(PipelineError::Unpaired);
            }
        }
        Ok(())
    }

    fn configs(&self) -> impl Iterator<Item = &MethodConfig> {
        std::iter::once(&self.conventional).chain(self.improved.as_ref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    /// Serial runs; one discarded warm-up, then the median of `repeats`.
    Measured { repeats: usize },
    /// No clock; cells may run concurrently and timing fields are zero.
    Disabled,
}

impl Timing {
    pub fn median_of(repeats: usize) -> Self {
        Timing::Measured { repeats }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn run_timed(config: &MethodConfig, signals: &SignalPair, repeats: usize) -> Result<BenchmarkResult, PipelineError> {
    let clock = MonotonicClock::new();
    run_on_signals(config, signals, &clock)?;
    let mut first: Option<BenchmarkResult> = None;
    let mut train_times = Vec::with_capacity(repeats);
    let mut filter_times = Vec::with_capacity(repeats);
    for _ in 0..repeats.max(1) {
        let r = run_on_signals(config, signals, &clock)?;
        train_times.push(r.elapsed_train_seconds);
        filter_times.push(r.filter_seconds);
        first.get_or_insert(r);
    }
    let mut result = first.expect("at least one repeat");
    result.elapsed_train_seconds = median(&mut train_times);
    result.filter_seconds = median(&mut filter_times);
    Ok(result)
}

fn run_pair(pair: &MethodPair, timing: Timing) -> Result<Vec<BenchmarkResult>, PipelineError> {
    pair.validate()?;
    let signals = SignalPair::generate(&pair.conventional.trajectory, &pair.conventional.noise)?;
    pair.configs()
        .map(|cfg| match timing {
            Timing::Measured { repeats } => run_timed(cfg, &signals, repeats),
            Timing::Disabled => run_on_signals(cfg, &signals, &FrozenClock),
        })
        .collect()
}

/// Runs every pair in grid order; each pair yields its conventional result
/// followed by its improved result. Timed grids run serially.
pub fn run_table(grid: &[MethodPair], timing: Timing) -> Result<Vec<BenchmarkResult>, PipelineError> {
    if grid.is_empty() {
        return Err(PipelineError::EmptyGrid);
    }
    let per_pair: Vec<Vec<BenchmarkResult>> = match timing {
        Timing::Measured { .. } => grid.iter().map(|p| run_pair(p, timing)).collect::<Result<_, _>>()?,
        Timing::Disabled => run_untimed(grid)?,
    };
    Ok(per_pair.into_iter().flatten().collect())
}

#[cfg(feature = "parallel")]
fn run_untimed(grid: &[MethodPair]) -> Result<Vec<Vec<BenchmarkResult>>, PipelineError> {
    use rayon::prelude::*;
    grid.par_iter().map(|p| run_pair(p, Timing::Disabled)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_untimed(grid: &[MethodPair]) -> Result<Vec<Vec<BenchmarkResult>>, PipelineError> {
    grid.iter().map(|p| run_pair(p, Timing::Disabled)).collect()
}

/// Axes of a benchmark grid; expands to one pair per
/// (max_neurons, spread, sse_goal, filter) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchGrid {
    pub max_neurons: Vec<usize>,
    pub spread: Vec<f64>,
    pub sse_goal: Vec<f64>,
    /// `None` entries give a conventional-only row.
    pub filters: Vec<Option<Band>>,
}

impl BenchGrid {
    /// nnsize 50/100 against spread 30/50/100 at one SSE goal and band.
    pub fn table(sse_goal: f64, band: Band) -> Self {
        BenchGrid {
            max_neurons: vec![50, 100],
            spread: vec![30.0, 50.0, 100.0],
            sse_goal: vec![sse_goal],
            filters: vec![Some(band)],
        }
    }

    pub fn pairs(&self, base: &MethodConfig) -> Vec<MethodPair> {
        let mut out = Vec::new();
        for &sse_goal in &self.sse_goal {
            for &max_neurons in &self.max_neurons {
                for &spread in &self.spread {
                    for &filter in &self.filters {
                        let conventional = MethodConfig {
                            method: Method::Conventional,
                            band: None,
                            train: TrainConfig::new(sse_goal, max_neurons, spread),
                            ..base.clone()
                        };
                        out.push(MethodPair::new(conventional, filter));
                    }
                }
            }
        }
        out
    }
}

/// The signal and band defaults of the benchmark.
pub fn default_base_config(seed: u64) -> MethodConfig {
    MethodConfig::conventional(
        TrajectoryConfig::default(),
        NoiseConfig::new(0.1, seed),
        TrainConfig::new(1e-6, 100, 50.0),
    )
}

pub fn write_report<W: Write>(results: &[BenchmarkResult], mut out: W) -> io::Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{:e},{},{:.6},{:.6},{},{:e},{:e}",
            r.config.method,
            r.config.band_label(),
            r.config.train.max_neurons,
            r.config.train.spread,
            r.config.train.sse_goal,
            r.config.noise.seed,
            r.elapsed_train_seconds,
            r.filter_seconds,
            r.neurons_used,
            r.final_sse,
            r.output_mse,
        )?;
    }
    out.flush()
}

pub fn report_string(results: &[BenchmarkResult]) -> String {
    let mut buf = Vec::new();
    write_report(results, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("report is ASCII")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotRow {
    pub t: f64,
    pub original: f64,
    pub teaching: f64,
    pub learned: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub component: Component,
    pub rows: Vec<PlotRow>,
}

/// Training stage shown by the teaching curve at sample `i` of `n`. The
/// curve walks the trace from the bias-only model at the first sample to the
/// final network at the last.
pub fn teaching_stage(i: usize, n: usize, num_stages: usize) -> usize {
    ((i * num_stages) / n.max(1)).min(num_stages.saturating_sub(1))
}

/// Per-sample original, teaching and learned values for one component.
pub fn emit_plot_data(result: &BenchmarkResult, component: Component) -> Result<PlotData, PipelineError> {
    let trace = result.trace.as_ref().ok_or(PipelineError::MissingTrace)?;
    let n = result.reference.len();
    let time = normalized_time(n);
    let c = component.index();
    let stages = trace.num_stages();
    let nets: Vec<RbfNetwork> = (0..stages)
        .map(|k| trace.network_at(&result.network, k).ok_or(PipelineError::MissingTrace))
        .collect::<Result<_, _>>()?;
    let rows = (0..n)
        .map(|i| {
            let stage = teaching_stage(i, n, stages);
            let teaching = nets[stage].forward(&[time[i]])?[c];
            Ok(PlotRow {
                t: result.reference.timestamps()[i],
                original: result.reference.samples()[i][c],
                teaching,
                learned: result.learned.samples()[i][c],
            })
        })
        .collect::<Result<Vec<_>, RbfError>>()?;
    Ok(PlotData { component, rows })
}

/// Like [`emit_plot_data`] with the component given by name.
pub fn emit_plot_data_named(result: &BenchmarkResult, component: &str) -> Result<PlotData, PipelineError> {
    emit_plot_data(result, component.parse()?)
}

pub fn write_plot_data<W: Write>(plot: &PlotData, mut out: W) -> io::Result<()> {
    writeln!(out, "{PLOT_HEADER}")?;
    for r in &plot.rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", r.t, r.original, r.teaching, r.learned)?;
    }
    out.flush()
}
