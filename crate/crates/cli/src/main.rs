mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gpsrbf::bandfilter::{select_band, write_band_component, Band};
use gpsrbf::pipeline::{
    run_method, run_table, write_plot_data, write_report, BenchGrid, Method, MethodConfig, PipelineError, Timing,
};
use gpsrbf::rbf::TrainConfig;
use gpsrbf::signal::{add_noise, generate_trajectory, write_series, NoiseConfig};
use thiserror::Error;

use config::{parse_components, parse_filters, write_manifest, ManifestInfo, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Band-selective RBF fitting of GPS trajectories.
#[derive(Debug, Parser)]
#[command(name = "gpsrbf", version)]
struct Cli {
    /// Noise seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for every output file.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// TOML config (a manifest from an earlier run also works); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic trajectory as CSV.
    Generate(GenerateArgs),
    /// Run a conventional vs band-filtered benchmark grid.
    Bench(BenchArgs),
    /// Write original/teaching/learned curves for one configuration.
    PlotData(PlotArgs),
}

#[derive(Debug, Args)]
struct SignalArgs {
    /// Number of samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Sample interval in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// Standard deviation of the added Gaussian noise.
    #[arg(long)]
    noise_sigma: Option<f64>,
    /// Low/mid boundary in Hz (default Nyquist/8).
    #[arg(long)]
    low_cutoff: Option<f64>,
    /// Mid/high boundary in Hz (default 0.375 Nyquist).
    #[arg(long)]
    high_cutoff: Option<f64>,
}

impl SignalArgs {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            samples: self.samples,
            dt: self.dt,
            noise_sigma: self.noise_sigma,
            low_cutoff: self.low_cutoff,
            high_cutoff: self.high_cutoff,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    signal: SignalArgs,
    /// Also write a band-limited copy (low, mid or high) with a metadata line.
    #[arg(long)]
    band: Option<String>,
    /// Output file, relative to --out-dir.
    #[arg(long, default_value = "series.csv")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    signal: SignalArgs,
    /// Neuron budgets, comma separated.
    #[arg(long, value_delimiter = ',')]
    nnsize: Option<Vec<usize>>,
    /// Spread constants in sample intervals, comma separated.
    #[arg(long, value_delimiter = ',')]
    spread: Option<Vec<f64>>,
    /// SSE goals, comma separated.
    #[arg(long, value_delimiter = ',')]
    sse: Option<Vec<f64>>,
    /// Bands for the improved method (none, low, mid, high), comma separated.
    #[arg(long, value_delimiter = ',')]
    filter: Option<Vec<String>>,
    /// Timed repeats per cell; the median is reported.
    #[arg(long)]
    repeats: Option<usize>,
    /// Skip timing; cells run concurrently and time columns are zero.
    #[arg(long)]
    no_timing: bool,
    /// Train the improved method on every sample instead of the band's rate.
    #[arg(long)]
    no_decimate: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[command(flatten)]
    signal: SignalArgs,
    /// conventional or improved.
    #[arg(long)]
    method: Option<String>,
    /// Band for the improved method.
    #[arg(long)]
    band: Option<String>,
    #[arg(long)]
    nnsize: Option<usize>,
    #[arg(long)]
    spread: Option<f64>,
    #[arg(long)]
    sse: Option<f64>,
    /// Components to write (north, east, alt or all), comma separated.
    #[arg(long, value_delimiter = ',')]
    component: Option<Vec<String>>,
    #[arg(long)]
    no_decimate: bool,
    /// Also save the trained network to this file, relative to --out-dir.
    #[arg(long)]
    save_network: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gpsrbf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    std::fs::create_dir_all(&cli.out_dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", cli.out_dir.display())))?;
    match &cli.command {
        Command::Generate(args) => generate(&cli, args, file),
        Command::Bench(args) => bench(&cli, args, file),
        Command::PlotData(args) => plot_data(&cli, args, file),
    }
}

/// Merges flags over the file and pins every signal-level default, so the
/// result is a complete, reloadable description of the run.
fn resolve_signal(cli: &Cli, signal: &SignalArgs, flags: RunConfig, file: RunConfig, sigma: f64) -> RunConfig {
    let mut cfg = RunConfig {
        seed: cli.seed,
        ..flags
    }
    .or(signal.to_config())
    .or(file);
    let trajectory = cfg.resolve_trajectory(signal.samples, signal.dt);
    let spec = cfg.resolve_band_spec(trajectory.dt);
    cfg.seed = Some(cfg.seed.unwrap_or(config::DEFAULT_SEED));
    cfg.samples = Some(trajectory.n_samples);
    cfg.dt = Some(trajectory.dt);
    cfg.noise_sigma = Some(cfg.noise_sigma.unwrap_or(sigma));
    cfg.low_cutoff = Some(spec.low_cutoff);
    cfg.high_cutoff = Some(spec.high_cutoff);
    cfg.trajectory = Some(trajectory);
    cfg
}

fn base_method(cfg: &RunConfig) -> MethodConfig {
    let trajectory = cfg.trajectory.clone().expect("resolved");
    let mut base = MethodConfig::conventional(
        trajectory,
        NoiseConfig::new(cfg.noise_sigma.expect("resolved"), cfg.seed.expect("resolved")),
        TrainConfig::new(1e-6, 100, 50.0),
    );
    base.band_spec = Some(gpsrbf::bandfilter::BandSpec::new(
        cfg.low_cutoff.expect("resolved"),
        cfg.high_cutoff.expect("resolved"),
    ));
    base.decimate = cfg.decimate.unwrap_or(true);
    base
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn pipeline_error(e: PipelineError) -> CliError {
    match e {
        PipelineError::InvalidConfig(_) | PipelineError::Unpaired | PipelineError::EmptyGrid => CliError::invalid(e),
        other => CliError::runtime(other),
    }
}

fn generate(cli: &Cli, args: &GenerateArgs, file: RunConfig) -> Result<(), CliError> {
    let flags = RunConfig {
        band: args.band.clone(),
        ..Default::default()
    };
    let cfg = resolve_signal(cli, &args.signal, flags, file, 0.0);
    let trajectory = cfg.trajectory.as_ref().expect("resolved");
    trajectory.validate().map_err(CliError::invalid)?;
    let noise = NoiseConfig::new(cfg.noise_sigma.expect("resolved"), cfg.seed.expect("resolved"));
    if !(noise.sigma.is_finite() && noise.sigma >= 0.0) {
        return Err(CliError::Usage(format!("invalid noise sigma {}", noise.sigma)));
    }
    let spec = gpsrbf::bandfilter::BandSpec::new(cfg.low_cutoff.expect("resolved"), cfg.high_cutoff.expect("resolved"));
    let band = cfg
        .band
        .as_deref()
        .map(|b| b.parse::<Band>().map_err(CliError::invalid))
        .transpose()?;
    if band.is_some() {
        spec.validate(0.5 / trajectory.dt).map_err(CliError::invalid)?;
    }

    let clean = generate_trajectory(trajectory).map_err(CliError::runtime)?;
    let series = add_noise(&clean, &noise).map_err(CliError::runtime)?;
    let out = cli.out_dir.join(&args.out);
    write_series(&series, &out).map_err(CliError::runtime)?;
    eprintln!("wrote {} ({} samples)", out.display(), series.len());

    if let Some(band) = band {
        let component = select_band(&series, band, &spec).map_err(CliError::runtime)?;
        let path = sibling(&out, &format!("{}", band));
        write_band_component(&component, &path).map_err(CliError::runtime)?;
        eprintln!("wrote {}", path.display());
    }
    let manifest = sibling(&out, "manifest").with_extension("toml");
    write_manifest(&manifest, &cfg, &ManifestInfo::new("generate", noise.seed))
}

/// `dir/stem.csv` becomes `dir/stem.<tag>.csv`.
fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

fn bench(cli: &Cli, args: &BenchArgs, file: RunConfig) -> Result<(), CliError> {
    let flags = RunConfig {
        nnsize: args.nnsize.clone(),
        spread: args.spread.clone(),
        sse: args.sse.clone(),
        filter: args.filter.clone(),
        repeats: args.repeats,
        timing: args.no_timing.then_some(false),
        decimate: args.no_decimate.then_some(false),
        ..Default::default()
    };
    let mut cfg = resolve_signal(cli, &args.signal, flags, file, config::DEFAULT_BENCH_SIGMA);
    cfg.nnsize.get_or_insert_with(|| vec![50, 100]);
    cfg.spread.get_or_insert_with(|| vec![30.0, 50.0, 100.0]);
    cfg.sse.get_or_insert_with(|| vec![1e-6]);
    cfg.filter.get_or_insert_with(|| vec!["low".into()]);
    cfg.repeats.get_or_insert(5);
    cfg.timing.get_or_insert(true);
    cfg.decimate.get_or_insert(true);

    let grid = BenchGrid {
        max_neurons: cfg.nnsize.clone().unwrap_or_default(),
        spread: cfg.spread.clone().unwrap_or_default(),
        sse_goal: cfg.sse.clone().unwrap_or_default(),
        filters: parse_filters(cfg.filter.as_deref().unwrap_or_default())?,
    };
    if grid.max_neurons.is_empty() || grid.spread.is_empty() || grid.sse_goal.is_empty() || grid.filters.is_empty() {
        return Err(CliError::Usage("every grid axis needs at least one value".into()));
    }
    let repeats = cfg.repeats.unwrap_or(5);
    if repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let base = base_method(&cfg);
    let pairs = grid.pairs(&base);
    for pair in &pairs {
        pair.conventional.validate().map_err(CliError::invalid)?;
        if let Some(improved) = &pair.improved {
            improved.validate().map_err(CliError::invalid)?;
        }
    }
    let timing = if cfg.timing == Some(false) {
        Timing::Disabled
    } else {
        Timing::median_of(repeats)
    };

    eprintln!("running {} cells", pairs.len());
    let results = run_table(&pairs, timing).map_err(pipeline_error)?;
    let report = cli.out_dir.join("report.csv");
    let mut out = create(&report)?;
    write_report(&results, &mut out)
        .and_then(|_| out.flush())
        .map_err(CliError::runtime)?;
    eprintln!("wrote {} ({} rows)", report.display(), results.len());
    let seed = cfg.seed.expect("resolved");
    write_manifest(&cli.out_dir.join("manifest.toml"), &cfg, &ManifestInfo::new("bench", seed))
}

fn plot_data(cli: &Cli, args: &PlotArgs, file: RunConfig) -> Result<(), CliError> {
    let flags = RunConfig {
        nnsize: args.nnsize.map(|v| vec![v]),
        spread: args.spread.map(|v| vec![v]),
        sse: args.sse.map(|v| vec![v]),
        method: args.method.clone(),
        band: args.band.clone(),
        component: args.component.clone(),
        decimate: args.no_decimate.then_some(false),
        ..Default::default()
    };
    let mut cfg = resolve_signal(cli, &args.signal, flags, file, config::DEFAULT_BENCH_SIGMA);
    cfg.nnsize.get_or_insert_with(|| vec![100]);
    cfg.spread.get_or_insert_with(|| vec![50.0]);
    cfg.sse.get_or_insert_with(|| vec![1e-6]);
    cfg.method.get_or_insert_with(|| "conventional".into());
    cfg.component.get_or_insert_with(|| vec!["north".into()]);
    cfg.decimate.get_or_insert(true);

    let method: Method = cfg.method.as_deref().unwrap_or_default().parse().map_err(CliError::invalid)?;
    let band = match (method, cfg.band.as_deref()) {
        (Method::Conventional, _) => None,
        (Method::Improved, None) => {
            cfg.band = Some("low".into());
            Some(Band::Low)
        }
        (Method::Improved, Some(b)) => Some(b.parse::<Band>().map_err(CliError::invalid)?),
    };
    if method == Method::Conventional {
        cfg.band = None;
    }
    let components = parse_components(cfg.component.as_deref().unwrap_or_default())?;
    let single = |name: &str, len: usize| {
        if len == 1 {
            Ok(())
        } else {
            Err(CliError::Usage(format!("plot-data takes exactly one {name} value")))
        }
    };
    single("nnsize", cfg.nnsize.as_ref().map_or(0, Vec::len))?;
    single("spread", cfg.spread.as_ref().map_or(0, Vec::len))?;
    single("sse", cfg.sse.as_ref().map_or(0, Vec::len))?;

    let mut method_cfg = base_method(&cfg);
    method_cfg.train = TrainConfig::new(
        cfg.sse.as_ref().expect("resolved")[0],
        cfg.nnsize.as_ref().expect("resolved")[0],
        cfg.spread.as_ref().expect("resolved")[0],
    );
    if let Some(band) = band {
        method_cfg = method_cfg.improved_from(band);
    }
    method_cfg.validate().map_err(CliError::invalid)?;

    let result = run_method(&method_cfg).map_err(pipeline_error)?;
    let tag = match band {
        Some(b) => format!("{}_{}", method.name(), b.name()),
        None => method.name().to_string(),
    };
    for component in components {
        let plot = gpsrbf::pipeline::emit_plot_data(&result, component).map_err(pipeline_error)?;
        let path = cli.out_dir.join(format!("plot_{tag}_{}.csv", component.name()));
        let mut out = create(&path)?;
        write_plot_data(&plot, &mut out)
            .and_then(|_| out.flush())
            .map_err(CliError::runtime)?;
        eprintln!("wrote {}", path.display());
    }
    if let Some(name) = &args.save_network {
        let path = cli.out_dir.join(name);
        result.network.save(&path).map_err(CliError::runtime)?;
        eprintln!("wrote {}", path.display());
    }
    eprintln!(
        "{tag}: {} neurons, final sse {:e}, output mse {:e}",
        result.neurons_used, result.final_sse, result.output_mse
    );
    let seed = cfg.seed.expect("resolved");
    write_manifest(&cli.out_dir.join("manifest.toml"), &cfg, &ManifestInfo::new("plot-data", seed))
}
