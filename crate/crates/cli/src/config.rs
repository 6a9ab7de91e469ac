//! Run configuration shared by flags, `--config` files and manifests.
//!
//! Every field is optional so a file may set any subset. Resolution order is
//! flag, then file, then built-in default. A manifest is the fully resolved
//! configuration plus a `[manifest]` table, so it loads back as a config.

use std::path::Path;

use gpsrbf::bandfilter::{Band, BandSpec};
use gpsrbf::signal::{Component, TrajectoryConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 4096;
pub const DEFAULT_DT: f64 = 1.0;
pub const DEFAULT_BENCH_SIGMA: f64 = 0.1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub dt: Option<f64>,
    pub noise_sigma: Option<f64>,
    pub low_cutoff: Option<f64>,
    pub high_cutoff: Option<f64>,
    pub decimate: Option<bool>,
    pub nnsize: Option<Vec<usize>>,
    pub spread: Option<Vec<f64>>,
    pub sse: Option<Vec<f64>>,
    pub filter: Option<Vec<String>>,
    pub repeats: Option<usize>,
    pub timing: Option<bool>,
    pub method: Option<String>,
    pub band: Option<String>,
    pub component: Option<Vec<String>>,
    pub trajectory: Option<TrajectoryConfig>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestInfo {
    pub tool: String,
    pub version: String,
    pub platform: String,
    pub command: String,
    pub seeds: Vec<u64>,
}

impl ManifestInfo {
    pub fn new(command: &str, seed: u64) -> Self {
        ManifestInfo {
            tool: "gpsrbf".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            platform: format!("{}-{}", std::env::consts::OS, std::env::consts::ARCH),
            command: command.into(),
            seeds: vec![seed],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Values from `self` win; `fallback` fills the gaps.
    pub fn or(self, fallback: RunConfig) -> RunConfig {
        RunConfig {
            seed: self.seed.or(fallback.seed),
            samples: self.samples.or(fallback.samples),
            dt: self.dt.or(fallback.dt),
            noise_sigma: self.noise_sigma.or(fallback.noise_sigma),
            low_cutoff: self.low_cutoff.or(fallback.low_cutoff),
            high_cutoff: self.high_cutoff.or(fallback.high_cutoff),
            decimate: self.decimate.or(fallback.decimate),
            nnsize: self.nnsize.or(fallback.nnsize),
            spread: self.spread.or(fallback.spread),
            sse: self.sse.or(fallback.sse),
            filter: self.filter.or(fallback.filter),
            repeats: self.repeats.or(fallback.repeats),
            timing: self.timing.or(fallback.timing),
            method: self.method.or(fallback.method),
            band: self.band.or(fallback.band),
            component: self.component.or(fallback.component),
            trajectory: self.trajectory.or(fallback.trajectory),
        }
    }

    /// Trajectory from the file if present, else the benchmark signal;
    /// explicit `samples`/`dt` override either.
    pub fn resolve_trajectory(&self, cli_samples: Option<usize>, cli_dt: Option<f64>) -> TrajectoryConfig {
        match &self.trajectory {
            Some(t) => {
                let mut t = t.clone();
                if let Some(n) = cli_samples {
                    t.n_samples = n;
                }
                if let Some(dt) = cli_dt {
                    t.dt = dt;
                }
                t
            }
            None => TrajectoryConfig::benchmark(
                self.samples.unwrap_or(DEFAULT_SAMPLES),
                self.dt.unwrap_or(DEFAULT_DT),
            ),
        }
    }

    pub fn resolve_band_spec(&self, dt: f64) -> BandSpec {
        let default = BandSpec::default_for(0.5 / dt);
        BandSpec::new(
            self.low_cutoff.unwrap_or(default.low_cutoff),
            self.high_cutoff.unwrap_or(default.high_cutoff),
        )
    }
}

/// `none` maps to `None`.
pub fn parse_filters(values: &[String]) -> Result<Vec<Option<Band>>, CliError> {
    values
        .iter()
        .map(|v| match v.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(None),
            other => other.parse::<Band>().map(Some).map_err(|e| CliError::Usage(e.to_string())),
        })
        .collect()
}

/// `all` expands to the three components.
pub fn parse_components(values: &[String]) -> Result<Vec<Component>, CliError> {
    let mut out = Vec::new();
    for v in values {
        if v.trim().eq_ignore_ascii_case("all") {
            out.extend(Component::ALL);
        } else {
            out.push(v.parse::<Component>().map_err(|e| CliError::Usage(e.to_string()))?);
        }
    }
    out.dedup();
    if out.is_empty() {
        return Err(CliError::Usage("no component requested".into()));
    }
    Ok(out)
}

pub fn write_manifest(path: &Path, resolved: &RunConfig, info: &ManifestInfo) -> Result<(), CliError> {
    let body = toml::to_string(resolved).map_err(|e| CliError::Runtime(format!("manifest encoding: {e}")))?;
    let meta = toml::to_string(info).map_err(|e| CliError::Runtime(format!("manifest encoding: {e}")))?;
    let text = format!("{body}\n[manifest]\n{meta}");
    std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}
