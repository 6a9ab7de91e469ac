//! Position series, trajectory synthesis, noise injection and series I/O.
//!
//! A [`PositionSeries`] is a uniformly sampled N×3 matrix of positions in
//! meters with columns (north, east, altitude). Trajectories are built from
//! a deterministic sum of sinusoids plus linear drift so that every frequency
//! band carries known energy.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Header line of the series file format.
pub const SERIES_HEADER: &str = "t,north,east,alt";

const UNIFORM_STEP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("series must contain at least one sample")]
    Empty,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sample step must be finite and positive, got {0}")]
    InvalidStep(f64),
    #[error("timestamps are not uniformly spaced at index {index}")]
    NonUniform { index: usize },
    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },
    #[error("trajectory needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("sinusoid frequency {frequency} Hz on component {component} is not below Nyquist {nyquist} Hz")]
    AboveNyquist {
        component: Component,
        frequency: f64,
        nyquist: f64,
    },
    #[error("invalid trajectory parameter: {0}")]
    InvalidTrajectory(String),
    #[error("noise sigma must be finite and non-negative, got {0}")]
    InvalidSigma(f64),
    #[error("unknown component `{0}` (expected north, east or alt)")]
    UnknownComponent(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One of the three position components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    North,
    East,
    Alt,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::North, Component::East, Component::Alt];

    pub fn index(self) -> usize {
        match self {
            Component::North => 0,
            Component::East => 1,
            Component::Alt => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::North => "north",
            Component::East => "east",
            Component::Alt => "alt",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = SignalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "north" | "n" => Ok(Component::North),
            "east" | "e" => Ok(Component::East),
            "alt" | "altitude" | "up" => Ok(Component::Alt),
            _ => Err(SignalError::UnknownComponent(s.to_string())),
        }
    }
}

/// Uniformly sampled position signal, one `[north, east, alt]` row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionSeries {
    timestamps: Vec<f64>,
    samples: Vec<[f64; 3]>,
    dt: f64,
}

impl PositionSeries {
    /// Builds a series on the grid `t0 + i*dt`.
    pub fn uniform(t0: f64, dt: f64, samples: Vec<[f64; 3]>) -> Result<Self, SignalError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SignalError::InvalidStep(dt));
        }
        if !t0.is_finite() {
            return Err(SignalError::NonFinite { index: 0 });
        }
        let timestamps = (0..samples.len()).map(|i| t0 + i as f64 * dt).collect();
        Self::with_step(timestamps, samples, dt)
    }

    /// Builds a series from explicit timestamps, inferring the step. A
    /// single-sample series has no step to infer and is given `dt = 1`.
    pub fn new(timestamps: Vec<f64>, samples: Vec<[f64; 3]>) -> Result<Self, SignalError> {
        let n = timestamps.len();
        let dt = if n >= 2 {
            (timestamps[n - 1] - timestamps[0]) / (n - 1) as f64
        } else {
            1.0
        };
        Self::with_step(timestamps, samples, dt)
    }

    fn with_step(timestamps: Vec<f64>, samples: Vec<[f64; 3]>, dt: f64) -> Result<Self, SignalError> {
        if timestamps.len() != samples.len() {
            return Err(SignalError::LengthMismatch {
                left: timestamps.len(),
                right: samples.len(),
            });
        }
        if samples.is_empty() {
            return Err(SignalError::Empty);
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SignalError::InvalidStep(dt));
        }
        for (i, (t, s)) in timestamps.iter().zip(&samples).enumerate() {
            if !t.is_finite() || s.iter().any(|v| !v.is_finite()) {
                return Err(SignalError::NonFinite { index: i });
            }
        }
        for (i, w) in timestamps.windows(2).enumerate() {
            let step = w[1] - w[0];
            if ((step - dt) / dt).abs() >= UNIFORM_STEP_TOLERANCE {
                return Err(SignalError::NonUniform { index: i + 1 });
            }
        }
        Ok(PositionSeries {
            timestamps,
            samples,
            dt,
        })
    }

    /// Same timestamps as `self`, new sample values.
    pub fn with_samples(&self, samples: Vec<[f64; 3]>) -> Result<Self, SignalError> {
        Self::with_step(self.timestamps.clone(), samples, self.dt)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.dt
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn samples(&self) -> &[[f64; 3]] {
        &self.samples
    }

    pub fn component(&self, component: Component) -> Vec<f64> {
        let c = component.index();
        self.samples.iter().map(|s| s[c]).collect()
    }

    /// Sum of squares over every entry.
    pub fn energy(&self) -> f64 {
        self.samples.iter().flatten().map(|v| v * v).sum()
    }
}

/// `amplitude * sin(2π frequency t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl Sinusoid {
    pub fn new(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Sinusoid {
            amplitude,
            frequency,
            phase,
        }
    }
}

/// Parameters of a synthetic trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub n_samples: usize,
    pub dt: f64,
    /// Sinusoid sets for north, east and altitude.
    pub sinusoids: [Vec<Sinusoid>; 3],
    /// Linear drift per component, m/s.
    pub drift: [f64; 3],
    /// Base offset per component, m.
    pub offset: [f64; 3],
}

// Benchmark tones as (amplitude, fraction of Nyquist, phase). The fractions
// are DFT bins of a 4096-sample record; low tones sit below Nyquist/8, mid
// tones between Nyquist/8 and 3·Nyquist/8, high tones above.
const BENCHMARK_TONES: [[(f64, f64, f64); 4]; 3] = [
    [
        (0.8, 3.0 / 2048.0, 0.3),
        (0.3, 9.0 / 2048.0, 1.9),
        (0.3, 400.0 / 2048.0, 0.7),
        (0.2, 1300.0 / 2048.0, 2.2),
    ],
    [
        (0.8, 5.0 / 2048.0, 1.1),
        (0.3, 12.0 / 2048.0, 0.4),
        (0.3, 520.0 / 2048.0, 2.6),
        (0.2, 1600.0 / 2048.0, 0.9),
    ],
    [
        (0.7, 4.0 / 2048.0, 2.0),
        (0.3, 7.0 / 2048.0, 0.2),
        (0.25, 610.0 / 2048.0, 1.4),
        (0.15, 1100.0 / 2048.0, 3.0),
    ],
];

impl TrajectoryConfig {
    /// Unit-scale benchmark trajectory with energy in the low, mid and high
    /// bands of every component. Tone frequencies scale with the Nyquist
    /// frequency of `dt`.
    pub fn benchmark(n_samples: usize, dt: f64) -> Self {
        let nyquist = 0.5 / dt;
        let sinusoids = BENCHMARK_TONES.map(|tones| {
            tones
                .iter()
                .map(|&(a, frac, phase)| Sinusoid::new(a, frac * nyquist, phase))
                .collect()
        });
        TrajectoryConfig {
            n_samples,
            dt,
            sinusoids,
            drift: [0.0; 3],
            offset: [0.0; 3],
        }
    }

    /// Constant trajectory at `offset`.
    pub fn constant(n_samples: usize, dt: f64, offset: [f64; 3]) -> Self {
        TrajectoryConfig {
            n_samples,
            dt,
            sinusoids: Default::default(),
            drift: [0.0; 3],
            offset,
        }
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if self.n_samples < 2 {
            return Err(SignalError::TooFewSamples(self.n_samples));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SignalError::InvalidStep(self.dt));
        }
        let nyquist = 0.5 / self.dt;
        for component in Component::ALL {
            let c = component.index();
            if !self.drift[c].is_finite() || !self.offset[c].is_finite() {
                return Err(SignalError::InvalidTrajectory(format!(
                    "non-finite drift or offset on {component}"
                )));
            }
            for s in &self.sinusoids[c] {
                if !(s.amplitude.is_finite() && s.phase.is_finite() && s.frequency.is_finite()) {
                    return Err(SignalError::InvalidTrajectory(format!(
                        "non-finite sinusoid on {component}"
                    )));
                }
                if s.frequency < 0.0 {
                    return Err(SignalError::InvalidTrajectory(format!(
                        "negative frequency {} on {component}",
                        s.frequency
                    )));
                }
                if s.frequency >= nyquist {
                    return Err(SignalError::AboveNyquist {
                        component,
                        frequency: s.frequency,
                        nyquist,
                    });
                }
            }
        }
        Ok(())
    }
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self::benchmark(4096, 1.0)
    }
}

/// Evaluates the trajectory at `t_i = i * dt`.
pub fn generate_trajectory(config: &TrajectoryConfig) -> Result<PositionSeries, SignalError> {
    config.validate()?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let samples = (0..config.n_samples)
        .map(|i| {
            let t = i as f64 * config.dt;
            let mut row = [0.0; 3];
            for (c, value) in row.iter_mut().enumerate() {
                let tones: f64 = config.sinusoids[c]
                    .iter()
                    .map(|s| s.amplitude * (two_pi * s.frequency * t + s.phase).sin())
                    .sum();
                *value = config.offset[c] + config.drift[c] * t + tones;
            }
            row
        })
        .collect();
    PositionSeries::uniform(0.0, config.dt, samples)
}

/// Additive i.i.d. Gaussian noise, same sigma on every component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn new(sigma: f64, seed: u64) -> Self {
        NoiseConfig { sigma, seed }
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            sigma: 0.1,
            seed: 42,
        }
    }
}

/// Adds seeded Gaussian noise. Draws are taken row by row in component order.
pub fn add_noise(series: &PositionSeries, noise: &NoiseConfig) -> Result<PositionSeries, SignalError> {
    if !(noise.sigma.is_finite() && noise.sigma >= 0.0) {
        return Err(SignalError::InvalidSigma(noise.sigma));
    }
    if noise.sigma == 0.0 {
        return Ok(series.clone());
    }
    let normal = Normal::new(0.0, noise.sigma).map_err(|_| SignalError::InvalidSigma(noise.sigma))?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let samples = series
        .samples()
        .iter()
        .map(|row| row.map(|v| v + normal.sample(&mut rng)))
        .collect();
    series.with_samples(samples)
}

/// Mean squared difference over all `n * 3` entries.
pub fn mse(a: &PositionSeries, b: &PositionSeries) -> Result<f64, SignalError> {
    if a.len() != b.len() {
        return Err(SignalError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)))
        .sum();
    Ok(sum / (3 * a.len()) as f64)
}

pub fn write_series_to<W: Write>(series: &PositionSeries, mut out: W) -> io::Result<()> {
    writeln!(out, "{SERIES_HEADER}")?;
    for (t, s) in series.timestamps().iter().zip(series.samples()) {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", t, s[0], s[1], s[2])?;
    }
    out.flush()
}

pub fn write_series(series: &PositionSeries, path: impl AsRef<Path>) -> Result<(), SignalError> {
    let file = File::create(path)?;
    write_series_to(series, BufWriter::new(file))?;
    Ok(())
}

/// Parses the series format. Lines starting with `#` are comments and may
/// appear anywhere; blank lines are skipped.
pub fn read_series_from<R: BufRead>(input: R) -> Result<PositionSeries, SignalError> {
    let mut header_seen = false;
    let mut timestamps = Vec::new();
    let mut samples = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !header_seen {
            if trimmed != SERIES_HEADER {
                return Err(SignalError::Parse {
                    line: lineno,
                    column: 1,
                    message: format!("expected header `{SERIES_HEADER}`, found `{trimmed}`"),
                });
            }
            header_seen = true;
            continue;
        }
        let cells: Vec<&str> = trimmed.split(',').collect();
        if cells.len() != 4 {
            let column = cells.len().min(4) + 1;
            return Err(SignalError::Parse {
                line: lineno,
                column,
                message: format!("expected 4 columns, found {}", cells.len()),
            });
        }
        let mut values = [0.0; 4];
        for (col, (cell, slot)) in cells.iter().zip(values.iter_mut()).enumerate() {
            *slot = cell.trim().parse::<f64>().map_err(|_| SignalError::Parse {
                line: lineno,
                column: col + 1,
                message: format!("non-numeric cell `{cell}`"),
            })?;
            if !slot.is_finite() {
                return Err(SignalError::Parse {
                    line: lineno,
                    column: col + 1,
                    message: format!("non-finite cell `{cell}`"),
                });
            }
        }
        timestamps.push(values[0]);
        samples.push([values[1], values[2], values[3]]);
    }
    if !header_seen {
        return Err(SignalError::Parse {
            line: 1,
            column: 1,
            message: "missing header".into(),
        });
    }
    PositionSeries::new(timestamps, samples)
}

pub fn read_series(path: impl AsRef<Path>) -> Result<PositionSeries, SignalError> {
    let file = File::open(path)?;
    read_series_from(BufReader::new(file))
}
