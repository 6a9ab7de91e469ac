//! Plain-Rust view builders behind the wasm exports. Everything here runs
//! natively, so the demo logic is tested without a browser.

use gpsrbf::bandfilter::{decompose, Band, BandSpec};
use gpsrbf::pipeline::{
    emit_plot_data, run_on_signals, BenchmarkResult, Clock, Method, MethodConfig, PipelineError, SignalPair,
};
use gpsrbf::rbf::TrainConfig;
use gpsrbf::signal::{Component, NoiseConfig, TrajectoryConfig};

pub const SSE_GOAL: f64 = 1e-6;

/// Benchmark trajectory at unit sample interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemoSignal {
    pub samples: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl DemoSignal {
    pub fn generate(&self) -> Result<SignalPair, PipelineError> {
        let trajectory = TrajectoryConfig::benchmark(self.samples, 1.0);
        trajectory.validate()?;
        SignalPair::generate(&trajectory, &NoiseConfig::new(self.noise_sigma, self.seed))
    }
}

/// Cutoffs as fractions of Nyquist, the natural unit for sliders.
pub fn band_spec(low_frac: f64, high_frac: f64) -> BandSpec {
    let nyquist = 0.5;
    BandSpec::new(low_frac * nyquist, high_frac * nyquist)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandView {
    pub t: Vec<f64>,
    pub noisy: Vec<f64>,
    pub low: Vec<f64>,
    pub mid: Vec<f64>,
    pub high: Vec<f64>,
}

pub fn band_view(signal: &DemoSignal, spec: &BandSpec, component: Component) -> Result<BandView, PipelineError> {
    let pair = signal.generate()?;
    let parts = decompose(&pair.noisy, spec)?;
    Ok(BandView {
        t: pair.noisy.timestamps().to_vec(),
        noisy: pair.noisy.component(component),
        low: parts.low.series.component(component),
        mid: parts.mid.series.component(component),
        high: parts.high.series.component(component),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRequest {
    pub signal: DemoSignal,
    pub band: Band,
    pub spec: BandSpec,
    pub max_neurons: usize,
    pub spread: f64,
}

impl FitRequest {
    fn config(&self, method: Method) -> MethodConfig {
        let mut cfg = MethodConfig::conventional(
            TrajectoryConfig::benchmark(self.signal.samples, 1.0),
            NoiseConfig::new(self.signal.noise_sigma, self.signal.seed),
            TrainConfig::new(SSE_GOAL, self.max_neurons, self.spread),
        );
        cfg.band_spec = Some(self.spec);
        match method {
            Method::Conventional => cfg,
            Method::Improved => cfg.improved_from(self.band),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitView {
    pub t: Vec<f64>,
    /// Training target: the noisy signal, band-limited for the improved method.
    pub target: Vec<f64>,
    pub original: Vec<f64>,
    pub teaching: Vec<f64>,
    pub learned: Vec<f64>,
    pub sse_history: Vec<f64>,
    pub neurons: usize,
    pub training_samples: usize,
    pub mse: f64,
    pub elapsed_ms: f64,
}

pub fn fit_view(
    request: &FitRequest,
    method: Method,
    component: Component,
    clock: &dyn Clock,
) -> Result<FitView, PipelineError> {
    let pair = request.signal.generate()?;
    let cfg = request.config(method);
    let result = run_on_signals(&cfg, &pair, clock)?;
    let target = match cfg.band {
        None => pair.noisy.component(component),
        Some(band) => gpsrbf::bandfilter::select_band(&pair.noisy, band, &request.spec)?
            .series
            .component(component),
    };
    let plot = emit_plot_data(&result, component)?;
    let trace = result.trace.as_ref().ok_or(PipelineError::MissingTrace)?;
    Ok(FitView {
        t: plot.rows.iter().map(|r| r.t).collect(),
        target,
        original: plot.rows.iter().map(|r| r.original).collect(),
        teaching: plot.rows.iter().map(|r| r.teaching).collect(),
        learned: plot.rows.iter().map(|r| r.learned).collect(),
        sse_history: trace.sse_history.clone(),
        neurons: result.neurons_used,
        training_samples: result.training_samples,
        mse: result.output_mse,
        elapsed_ms: elapsed_ms(&result),
    })
}

fn elapsed_ms(result: &BenchmarkResult) -> f64 {
    1e3 * (result.elapsed_train_seconds + result.filter_seconds)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSummary {
    pub neurons: usize,
    pub training_samples: usize,
    pub mse: f64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub conventional: MethodSummary,
    pub improved: MethodSummary,
}

impl Comparison {
    /// Conventional over improved time; `None` when the clock did not tick.
    pub fn speedup(&self) -> Option<f64> {
        (self.improved.elapsed_ms > 0.0).then(|| self.conventional.elapsed_ms / self.improved.elapsed_ms)
    }
}

/// Both methods on one signal; the conventional run goes first.
pub fn compare(request: &FitRequest, clock: &dyn Clock) -> Result<Comparison, PipelineError> {
    let pair = request.signal.generate()?;
    let summary = |method| -> Result<MethodSummary, PipelineError> {
        let r = run_on_signals(&request.config(method), &pair, clock)?;
        Ok(MethodSummary {
            neurons: r.neurons_used,
            training_samples: r.training_samples,
            mse: r.output_mse,
            elapsed_ms: elapsed_ms(&r),
        })
    };
    Ok(Comparison {
        conventional: summary(Method::Conventional)?,
        improved: summary(Method::Improved)?,
    })
}
