//! Grid evaluation with both engines and CSV output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use uavnet_core::analytic::{coverage_probability, spectral_efficiency_with};
use uavnet_core::mcsim::{simulate_trial, summarize, McSummary, SimOptions, TrialOutcome};
use uavnet_core::quadrature::QuadratureSpec;
use uavnet_core::{Model, Strategy};

use crate::config::{strategy_name, ConfigFile, Engine, ManifestSection, SweepConfig};
use crate::error::CliError;

/// One line of sweep output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub axis_value: f64,
    pub strategy: &'static str,
    pub engine: &'static str,
    pub coverage: f64,
    pub coverage_ci95: f64,
    pub se: f64,
    pub se_ci95: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub wall_time_s: f64,
}

/// Column order of the CSV output.
pub const CSV_HEADER: [&str; 10] = [
    "axis_value",
    "strategy",
    "engine",
    "coverage",
    "coverage_ci95",
    "se",
    "se_ci95",
    "n_trials",
    "seed",
    "wall_time_s",
];

/// Result of one engine at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub coverage: f64,
    pub coverage_ci95: f64,
    pub se: f64,
    pub se_ci95: f64,
    pub n_trials: usize,
}

/// Analytic coverage, evaluated on the caller's thread.
pub fn analytic_coverage(model: &Model, quad: &QuadratureSpec) -> uavnet_core::Result<f64> {
    coverage_probability(model, quad)
}

/// Analytic spectral efficiency with the threshold grid spread over the
/// thread pool.
pub fn analytic_se(model: &Model, quad: &QuadratureSpec) -> uavnet_core::Result<f64> {
    spectral_efficiency_with(model, |thresholds| {
        thresholds.par_iter().map(|&t| coverage_probability(&model.with_threshold(t), quad)).collect()
    })
}

/// Monte-Carlo trials run in parallel and reduced in index order, so the
/// result is independent of the thread count.
pub fn monte_carlo(model: &Model, sim: &SimOptions, n_trials: usize, seed: u64) -> uavnet_core::Result<McSummary> {
    if n_trials < uavnet_core::mcsim::MIN_TRIALS {
        return Err(uavnet_core::Error::InvalidArgument("Monte-Carlo needs at least 100 trials"));
    }
    model.validate()?;
    sim.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| simulate_trial(model, sim, seed, i))
        .collect::<uavnet_core::Result<_>>()?;
    Ok(summarize(&outcomes, model.radio.threshold_linear))
}

/// Evaluates one engine at one parameter point.
pub fn evaluate(cfg: &SweepConfig, model: &Model, engine: Engine) -> uavnet_core::Result<PointResult> {
    match engine {
        Engine::Analytic => {
            let (coverage, se) = rayon::join(|| analytic_coverage(model, &cfg.quad), || analytic_se(model, &cfg.quad));
            Ok(PointResult { coverage: coverage?, coverage_ci95: 0.0, se: se?, se_ci95: 0.0, n_trials: 0 })
        }
        Engine::MonteCarlo => {
            let s = monte_carlo(model, &cfg.sim, cfg.n_trials, cfg.master_seed)?;
            Ok(PointResult {
                coverage: s.coverage.mean,
                coverage_ci95: s.coverage.half_width_95,
                se: s.spectral_efficiency.mean,
                se_ci95: s.spectral_efficiency.half_width_95,
                n_trials: s.coverage.n_trials,
            })
        }
    }
}

/// Grid cells in output order: axis value, then strategy, then engine.
pub fn cells(cfg: &SweepConfig) -> Vec<(f64, Strategy, Engine)> {
    let mut out = Vec::new();
    for &v in &cfg.axis_values {
        for &s in &cfg.strategies {
            for &e in &cfg.engines {
                out.push((v, s, e));
            }
        }
    }
    out
}

/// Evaluates every grid cell concurrently and returns rows in axis order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<Row>, CliError> {
    cells(cfg)
        .into_par_iter()
        .map(|(value, strategy, engine)| {
            let model = cfg.axis.apply(&cfg.base, value).with_strategy(strategy);
            let start = Instant::now();
            let r = evaluate(cfg, &model, engine).map_err(|e| {
                let cell = format!("{} = {value}, {}, {}", cfg.axis.name(), strategy_name(strategy), engine.name());
                CliError::from_engine(&cell, e)
            })?;
            Ok(Row {
                axis_value: value,
                strategy: strategy_name(strategy),
                engine: engine.name(),
                coverage: r.coverage,
                coverage_ci95: r.coverage_ci95,
                se: r.se,
                se_ci95: r.se_ci95,
                n_trials: r.n_trials,
                seed: if engine == Engine::MonteCarlo { cfg.master_seed } else { 0 },
                wall_time_s: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::io("csv output", e))?;
    Ok(())
}

/// Path of the manifest written next to `csv`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sweep".into());
    csv.with_file_name(format!("{stem}.manifest.toml"))
}

/// The fully resolved configuration with a provenance block; parsing it
/// reproduces the run.
pub fn manifest_text(file: &ConfigFile, csv: &Path) -> String {
    let mut m = file.clone();
    m.sweep.output = csv.to_path_buf();
    m.manifest = Some(ManifestSection {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        csv: csv.to_path_buf(),
    });
    m.to_toml()
}

/// Writes the CSV and its manifest, returning the manifest path.
pub fn write_outputs(file: &ConfigFile, rows: &[Row], csv: &Path) -> Result<PathBuf, CliError> {
    let out = std::fs::File::create(csv).map_err(|e| CliError::io(format!("creating {}", csv.display()), e))?;
    write_csv(rows, std::io::BufWriter::new(out))?;
    let manifest = manifest_path(csv);
    std::fs::write(&manifest, manifest_text(file, csv))
        .map_err(|e| CliError::io(format!("writing {}", manifest.display()), e))?;
    Ok(manifest)
}
