//! Brick-wall DFT band decomposition.
//!
//! Each component is transformed, its bins are partitioned by absolute
//! frequency into low (`|f| <= low_cutoff`), mid (`low_cutoff < |f| <= high_cutoff`)
//! and high (`|f| > high_cutoff`), and each partition is transformed back.
//! The masks depend only on `|f|`, so conjugate-symmetric bins stay together
//! and every band is real. The three bands sum to the input.

use std::fmt;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signal::{self, PositionSeries, SignalError};

// Absorbs rounding when a cutoff is placed exactly on a bin frequency.
const EDGE_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum BandError {
    #[error("band cutoffs must satisfy 0 < low ({low}) < high ({high}) < Nyquist ({nyquist})")]
    InvalidCutoffs { low: f64, high: f64, nyquist: f64 },
    #[error("unknown band `{0}` (expected low, mid or high)")]
    UnknownBand(String),
    #[error("bad band metadata: {0}")]
    Metadata(String),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Low,
    Mid,
    High,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Low, Band::Mid, Band::High];

    pub fn name(self) -> &'static str {
        match self {
            Band::Low => "low",
            Band::Mid => "mid",
            Band::High => "high",
        }
    }

    fn contains(self, freq: f64, spec: &BandSpec) -> bool {
        let low = spec.low_cutoff * (1.0 + EDGE_SLACK);
        let high = spec.high_cutoff * (1.0 + EDGE_SLACK);
        match self {
            Band::Low => freq <= low,
            Band::Mid => freq > low && freq <= high,
            Band::High => freq > high,
        }
    }

    /// Highest frequency this band can contain.
    pub fn upper_edge(self, spec: &BandSpec, nyquist: f64) -> f64 {
        match self {
            Band::Low => spec.low_cutoff,
            Band::Mid => spec.high_cutoff,
            Band::High => nyquist,
        }
    }

    /// Largest integer decimation that keeps this band below the decimated
    /// Nyquist frequency (1 for the high band).
    pub fn decimation_factor(self, spec: &BandSpec, nyquist: f64) -> usize {
        let ratio = nyquist / self.upper_edge(spec, nyquist);
        ((ratio + 1e-9).floor() as usize).max(1)
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Band {
    type Err = BandError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Ok(Band::Low),
            "mid" | "band" | "pass" => Ok(Band::Mid),
            "high" => Ok(Band::High),
            _ => Err(BandError::UnknownBand(s.to_string())),
        }
    }
}

/// Band edges in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub low_cutoff: f64,
    pub high_cutoff: f64,
}

impl BandSpec {
    pub fn new(low_cutoff: f64, high_cutoff: f64) -> Self {
        BandSpec {
            low_cutoff,
            high_cutoff,
        }
    }

    /// Nyquist/8 and 3·Nyquist/8.
    pub fn default_for(nyquist: f64) -> Self {
        BandSpec {
            low_cutoff: nyquist / 8.0,
            high_cutoff: nyquist / 2.0 * 0.75,
        }
    }

    pub fn validate(&self, nyquist: f64) -> Result<(), BandError> {
        let ok = self.low_cutoff > 0.0 && self.low_cutoff < self.high_cutoff && self.high_cutoff < nyquist;
        if ok {
            Ok(())
        } else {
            Err(BandError::InvalidCutoffs {
                low: self.low_cutoff,
                high: self.high_cutoff,
                nyquist,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandComponent {
    pub band: Band,
    pub spec: BandSpec,
    pub series: PositionSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub low: BandComponent,
    pub mid: BandComponent,
    pub high: BandComponent,
}

impl Decomposition {
    pub fn get(&self, band: Band) -> &BandComponent {
        match band {
            Band::Low => &self.low,
            Band::Mid => &self.mid,
            Band::High => &self.high,
        }
    }
}

/// Per-component spectra plus the absolute frequency of each bin.
struct Spectrum {
    bins: [Vec<Complex<f64>>; 3],
    freqs: Vec<f64>,
}

fn spectrum(series: &PositionSeries, planner: &mut FftPlanner<f64>) -> Spectrum {
    let n = series.len();
    let fft = planner.plan_fft_forward(n);
    let bins = [0, 1, 2].map(|c| {
        let mut buf: Vec<Complex<f64>> = series.samples().iter().map(|s| Complex::new(s[c], 0.0)).collect();
        fft.process(&mut buf);
        buf
    });
    let span = n as f64 * series.dt();
    let freqs = (0..n).map(|k| k.min(n - k) as f64 / span).collect();
    Spectrum { bins, freqs }
}

fn band_from_spectrum(
    series: &PositionSeries,
    spec: &Spectrum,
    band: Band,
    band_spec: &BandSpec,
    planner: &mut FftPlanner<f64>,
) -> Result<BandComponent, BandError> {
    let n = series.len();
    let ifft = planner.plan_fft_inverse(n);
    let scale = 1.0 / n as f64;
    let mut samples = vec![[0.0; 3]; n];
    for c in 0..3 {
        let mut buf: Vec<Complex<f64>> = spec.bins[c]
            .iter()
            .zip(&spec.freqs)
            .map(|(&x, &f)| if band.contains(f, band_spec) { x } else { Complex::new(0.0, 0.0) })
            .collect();
        ifft.process(&mut buf);
        for (row, v) in samples.iter_mut().zip(&buf) {
            row[c] = v.re * scale;
        }
    }
    Ok(BandComponent {
        band,
        spec: *band_spec,
        series: series.with_samples(samples)?,
    })
}

pub fn decompose(series: &PositionSeries, spec: &BandSpec) -> Result<Decomposition, BandError> {
    spec.validate(series.nyquist())?;
    let mut planner = FftPlanner::new();
    let spectrum = spectrum(series, &mut planner);
    let [low, mid, high] =
        Band::ALL.map(|b| band_from_spectrum(series, &spectrum, b, spec, &mut planner));
    Ok(Decomposition {
        low: low?,
        mid: mid?,
        high: high?,
    })
}

/// One band of [`decompose`], computed without the other two.
pub fn select_band(series: &PositionSeries, band: Band, spec: &BandSpec) -> Result<BandComponent, BandError> {
    spec.validate(series.nyquist())?;
    let mut planner = FftPlanner::new();
    let spectrum = spectrum(series, &mut planner);
    band_from_spectrum(series, &spectrum, band, spec, &mut planner)
}

fn metadata_line(component: &BandComponent) -> String {
    format!(
        "# band={} low_cutoff={:e} high_cutoff={:e}",
        component.band, component.spec.low_cutoff, component.spec.high_cutoff
    )
}

fn parse_metadata(line: &str) -> Result<(Band, BandSpec), BandError> {
    let body = line.trim_start_matches('#').trim();
    let mut band = None;
    let mut low = None;
    let mut high = None;
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| BandError::Metadata(format!("expected key=value, found `{field}`")))?;
        let number = || {
            value
                .parse::<f64>()
                .map_err(|_| BandError::Metadata(format!("bad number `{value}` for {key}")))
        };
        match key {
            "band" => band = Some(value.parse::<Band>()?),
            "low_cutoff" => low = Some(number()?),
            "high_cutoff" => high = Some(number()?),
            _ => {}
        }
    }
    match (band, low, high) {
        (Some(b), Some(l), Some(h)) => Ok((b, BandSpec::new(l, h))),
        _ => Err(BandError::Metadata(format!("incomplete band metadata `{line}`"))),
    }
}

pub fn write_band_component_to<W: Write>(component: &BandComponent, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", metadata_line(component))?;
    signal::write_series_to(&component.series, out)
}

pub fn write_band_component(component: &BandComponent, path: impl AsRef<Path>) -> Result<(), BandError> {
    let file = File::create(path).map_err(SignalError::from)?;
    write_band_component_to(component, BufWriter::new(file)).map_err(SignalError::from)?;
    Ok(())
}

/// Reads a series file carrying a `# band=...` metadata comment.
pub fn read_band_component_from<R: BufRead>(input: R) -> Result<BandComponent, BandError> {
    let text = io::read_to_string(input).map_err(SignalError::from)?;
    let meta = text
        .lines()
        .map(str::trim)
        .find(|l| l.starts_with('#') && l.contains("band="))
        .ok_or_else(|| BandError::Metadata("missing `# band=` line".into()))?;
    let (band, spec) = parse_metadata(meta)?;
    let series = signal::read_series_from(text.as_bytes())?;
    Ok(BandComponent { band, spec, series })
}

pub fn read_band_component(path: impl AsRef<Path>) -> Result<BandComponent, BandError> {
    let file = File::open(path).map_err(SignalError::from)?;
    read_band_component_from(BufReader::new(file))
}
