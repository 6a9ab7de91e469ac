//! Band-selective RBF network processing of GPS position signals.
//!
//! - [`signal`]: position series, trajectory synthesis, noise, series files
//! - [`bandfilter`]: low/mid/high DFT band decomposition
//! - [`rbf`]: Gaussian RBF network with greedy incremental training
//! - [`pipeline`]: conventional vs. improved methods, timing and reports

pub mod bandfilter;
pub mod pipeline;
pub mod rbf;
pub mod signal;

pub use bandfilter::{decompose, select_band, Band, BandComponent, BandSpec, Decomposition};
pub use pipeline::{
    emit_plot_data, run_method, run_table, BenchGrid, BenchmarkResult, Method, MethodConfig, MethodPair, PlotData,
    Timing,
};
pub use rbf::{gaussian_activation, solve_output_weights, train, RbfNetwork, TrainConfig, TrainTrace};
pub use signal::{add_noise, generate_trajectory, mse, Component, NoiseConfig, PositionSeries, TrajectoryConfig};
