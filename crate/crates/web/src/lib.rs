//! wasm-bindgen exports for the browser demo in `www/`.
//!
//! Three operations: split a noisy trajectory into bands, fit one method and
//! return its curves, and time both methods side by side.

pub mod demo;

use gpsrbf::bandfilter::Band;
use gpsrbf::pipeline::{Clock, Method};
use gpsrbf::signal::Component;
use wasm_bindgen::prelude::*;

use demo::{DemoSignal, FitRequest};

/// `Date.now()` based clock; `std::time::Instant` is unavailable in the browser.
struct WebClock;

impl Clock for WebClock {
    fn now(&self) -> f64 {
        js_sys::Date::now() / 1e3
    }
}

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[allow(clippy::too_many_arguments)]
fn request(
    samples: usize,
    noise_sigma: f64,
    seed: u32,
    band: &str,
    low_frac: f64,
    high_frac: f64,
    max_neurons: usize,
    spread: f64,
) -> Result<FitRequest, JsError> {
    Ok(FitRequest {
        signal: DemoSignal {
            samples,
            noise_sigma,
            seed: seed.into(),
        },
        band: band.parse::<Band>().map_err(js_err)?,
        spec: demo::band_spec(low_frac, high_frac),
        max_neurons,
        spread,
    })
}

#[wasm_bindgen]
pub struct BandView(demo::BandView);

#[wasm_bindgen]
impl BandView {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.0.t.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn noisy(&self) -> Vec<f64> {
        self.0.noisy.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn low(&self) -> Vec<f64> {
        self.0.low.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn mid(&self) -> Vec<f64> {
        self.0.mid.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn high(&self) -> Vec<f64> {
        self.0.high.clone()
    }
}

/// Noisy component and its low, mid and high parts.
#[wasm_bindgen]
pub fn decompose_view(
    samples: usize,
    noise_sigma: f64,
    seed: u32,
    low_frac: f64,
    high_frac: f64,
    component: &str,
) -> Result<BandView, JsError> {
    let signal = DemoSignal {
        samples,
        noise_sigma,
        seed: seed.into(),
    };
    let component: Component = component.parse().map_err(js_err)?;
    demo::band_view(&signal, &demo::band_spec(low_frac, high_frac), component)
        .map(BandView)
        .map_err(js_err)
}

#[wasm_bindgen]
pub struct FitView(demo::FitView);

#[wasm_bindgen]
impl FitView {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.0.t.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn target(&self) -> Vec<f64> {
        self.0.target.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn original(&self) -> Vec<f64> {
        self.0.original.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn teaching(&self) -> Vec<f64> {
        self.0.teaching.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn learned(&self) -> Vec<f64> {
        self.0.learned.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn sse_history(&self) -> Vec<f64> {
        self.0.sse_history.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn neurons(&self) -> usize {
        self.0.neurons
    }
    #[wasm_bindgen(getter)]
    pub fn training_samples(&self) -> usize {
        self.0.training_samples
    }
    #[wasm_bindgen(getter)]
    pub fn mse(&self) -> f64 {
        self.0.mse
    }
    #[wasm_bindgen(getter)]
    pub fn elapsed_ms(&self) -> f64 {
        self.0.elapsed_ms
    }
}

/// One trained network's curves; `method` is `conventional` or `improved`.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn fit_view(
    samples: usize,
    noise_sigma: f64,
    seed: u32,
    method: &str,
    band: &str,
    low_frac: f64,
    high_frac: f64,
    max_neurons: usize,
    spread: f64,
    component: &str,
) -> Result<FitView, JsError> {
    let req = request(samples, noise_sigma, seed, band, low_frac, high_frac, max_neurons, spread)?;
    let method: Method = method.parse().map_err(js_err)?;
    let component: Component = component.parse().map_err(js_err)?;
    demo::fit_view(&req, method, component, &WebClock)
        .map(FitView)
        .map_err(js_err)
}

#[wasm_bindgen]
pub struct Comparison(demo::Comparison);

#[wasm_bindgen]
impl Comparison {
    #[wasm_bindgen(getter)]
    pub fn conventional_ms(&self) -> f64 {
        self.0.conventional.elapsed_ms
    }
    #[wasm_bindgen(getter)]
    pub fn improved_ms(&self) -> f64 {
        self.0.improved.elapsed_ms
    }
    #[wasm_bindgen(getter)]
    pub fn conventional_mse(&self) -> f64 {
        self.0.conventional.mse
    }
    #[wasm_bindgen(getter)]
    pub fn improved_mse(&self) -> f64 {
        self.0.improved.mse
    }
    #[wasm_bindgen(getter)]
    pub fn conventional_samples(&self) -> usize {
        self.0.conventional.training_samples
    }
    #[wasm_bindgen(getter)]
    pub fn improved_samples(&self) -> usize {
        self.0.improved.training_samples
    }
    /// NaN when the clock did not advance.
    #[wasm_bindgen(getter)]
    pub fn speedup(&self) -> f64 {
        self.0.speedup().unwrap_or(f64::NAN)
    }
}

/// Times the conventional and improved methods on the same signal.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn compare_methods(
    samples: usize,
    noise_sigma: f64,
    seed: u32,
    band: &str,
    low_frac: f64,
    high_frac: f64,
    max_neurons: usize,
    spread: f64,
) -> Result<Comparison, JsError> {
    let req = request(samples, noise_sigma, seed, band, low_frac, high_frac, max_neurons, spread)?;
    demo::compare(&req, &WebClock).map(Comparison).map_err(js_err)
}
