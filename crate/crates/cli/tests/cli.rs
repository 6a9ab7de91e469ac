use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gpsrbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpsrbf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// Report rows without the two timing columns.
fn untimed_columns(report: &str) -> Vec<String> {
    report
        .lines()
        .map(|line| {
            line.split(',')
                .enumerate()
                .filter(|(i, _)| *i != 6 && *i != 7)
                .map(|(_, f)| f)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect()
}

#[test]
fn generate_writes_series_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpsrbf(&["--out-dir", path_arg(dir.path()), "generate", "--samples", "64", "--dt", "1", "--out", "s.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let series = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(series.lines().count(), 65);
    assert_eq!(series.lines().next(), Some("t,north,east,alt"));

    let manifest = fs::read_to_string(dir.path().join("s.manifest.toml")).unwrap();
    for key in ["[manifest]", "tool = \"gpsrbf\"", "command = \"generate\"", "platform", "version", "seed = 42"] {
        assert!(manifest.contains(key), "manifest lacks {key}");
    }
}

#[test]
fn generate_band_sidecar_carries_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpsrbf(&["--out-dir", path_arg(dir.path()), "generate", "--samples", "128", "--band", "mid"]);
    assert!(out.status.success());
    let band = fs::read_to_string(dir.path().join("series.mid.csv")).unwrap();
    assert!(band.starts_with("# band=mid low_cutoff="));
    assert_eq!(band.lines().count(), 130);
}

#[test]
fn same_seed_gives_identical_noisy_series() {
    let dir = tempfile::tempdir().unwrap();
    let d = path_arg(dir.path());
    for name in ["a.csv", "b.csv"] {
        let out = gpsrbf(&["--out-dir", d, "--seed", "5", "generate", "--samples", "32", "--noise-sigma", "0.1", "--out", name]);
        assert!(out.status.success());
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = path_arg(dir.path());
    let cases: &[&[&str]] = &[
        &["--out-dir", d, "generate", "--samples", "1"],
        &["--out-dir", d, "generate", "--noise-sigma", "-1"],
        &["--out-dir", d, "generate", "--band", "ultra"],
        &["--out-dir", d, "plot-data", "--samples", "64", "--component", "sideways"],
        &["--out-dir", d, "plot-data", "--samples", "64", "--method", "magic"],
        &["--out-dir", d, "bench", "--samples", "64", "--filter", "ultra"],
        &["--out-dir", d, "bench", "--samples", "64", "--spread", "-3"],
        &["--out-dir", d, "bench", "--samples", "64", "--low-cutoff", "0.3", "--high-cutoff", "0.1"],
        &["--out-dir", d, "--config", "/nonexistent/run.toml", "generate"],
        &["frobnicate"],
        &["generate", "--no-such-flag"],
    ];
    for args in cases {
        let out = gpsrbf(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!out.stderr.is_empty(), "args {args:?} printed no diagnostic");
    }
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = gpsrbf(&["--out-dir", path_arg(&blocker), "generate", "--samples", "16"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_rerun_from_manifest_matches() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let out = gpsrbf(&[
        "--out-dir", path_arg(&first), "--seed", "3", "bench", "--samples", "256", "--nnsize", "10,20",
        "--spread", "30", "--filter", "low,mid", "--repeats", "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(first.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 1 + 2 * 2 * 2);
    assert!(report.starts_with("method,band,max_neurons,spread,sse_goal,seed,elapsed_s,filter_s,"));

    let manifest = first.join("manifest.toml");
    let out = gpsrbf(&["--out-dir", path_arg(&second), "--config", path_arg(&manifest), "bench", "--no-timing"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rerun = fs::read_to_string(second.join("report.csv")).unwrap();
    assert_eq!(untimed_columns(&report), untimed_columns(&rerun));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "seed = 7\nsamples = 48\nnoise_sigma = 0.2\n").unwrap();
    let out = gpsrbf(&["--out-dir", path_arg(dir.path()), "--config", path_arg(&config), "--seed", "9", "generate"]);
    assert!(out.status.success());
    let series = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert_eq!(series.lines().count(), 49);
    let manifest = fs::read_to_string(dir.path().join("series.manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 9"));
    assert!(manifest.contains("noise_sigma = 0.2"));
}

#[test]
fn plot_data_writes_every_component() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpsrbf(&[
        "--out-dir", path_arg(dir.path()), "plot-data", "--samples", "256", "--method", "improved",
        "--band", "low", "--nnsize", "20", "--component", "all", "--save-network", "net.txt",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for c in ["north", "east", "alt"] {
        let text = fs::read_to_string(dir.path().join(format!("plot_improved_low_{c}.csv"))).unwrap();
        assert_eq!(text.lines().next(), Some("t,original,teaching,learned"));
        assert_eq!(text.lines().count(), 257);
    }
    let net = gpsrbf::rbf::RbfNetwork::load(dir.path().join("net.txt")).unwrap();
    assert_eq!(net.num_centers(), 20);
}
