//! Long-format CSV data behind the diagnostic plots.
//!
//! All figures share one observed path per step size in `h_list`, drawn from
//! `(master_seed, h index)`; its quasi-paths use the same seed for their
//! permutations. Single-setting figures use `h_list[0]` and `alpha_list[0]`.

use std::path::PathBuf;
use std::str::FromStr;

use super::config::ExperimentConfig;
use super::csv::{fmt_float, CsvWriter};
use super::run::{run_experiment, write_experiment, ESTIMATES_FILE};
use crate::error::{Error, Result};
use crate::estimator::ensemble_contrast;
use crate::model::{path_from_increments, simulate_increments, IncrementSeries, StepPath};
use crate::oracle::OracleResult;
use crate::quasi::QuasiEnsemble;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    /// Independent sample paths (`paths.csv`).
    Paths,
    /// Observed path and its quasi-paths (`quasi.csv`).
    Quasi,
    /// Per-permutation dividend value curves (`valuecurves.csv`).
    ValueCurves,
    /// Contrast curves over `alpha_list` and over `h_list`, with the true
    /// value function (`contrast_alpha.csv`, `contrast_h.csv`).
    Contrast,
    /// Replicated estimates (`estimates.csv`, `table1.csv`).
    Boxplot,
}

impl Figure {
    pub const ALL: [Figure; 5] = [
        Figure::Paths,
        Figure::Quasi,
        Figure::ValueCurves,
        Figure::Contrast,
        Figure::Boxplot,
    ];
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paths" => Ok(Figure::Paths),
            "quasi" => Ok(Figure::Quasi),
            "valuecurves" => Ok(Figure::ValueCurves),
            "contrast" => Ok(Figure::Contrast),
            "boxplot" => Ok(Figure::Boxplot),
            other => Err(Error::Parse {
                line: None,
                field: "figure".into(),
                message: format!(
                    "unknown figure {other:?} (expected paths, quasi, valuecurves, contrast or boxplot)"
                ),
            }),
        }
    }
}

pub fn figure_path_seed(master_seed: u64, h_index: usize, path_id: usize) -> u64 {
    rng::mix(&[master_seed, rng::tag::FIGURES, h_index as u64, path_id as u64])
}

/// The observed path for `h_list[h_index]` and its seed.
pub fn observed_increments(cfg: &ExperimentConfig, h_index: usize) -> (IncrementSeries, u64) {
    let seed = figure_path_seed(cfg.master_seed, h_index, 0);
    let scheme = cfg.scheme(cfg.h_list[h_index]);
    (simulate_increments(&cfg.model, scheme, seed), seed)
}

fn write_path(out: &mut CsvWriter, id: usize, path: &StepPath) -> Result<()> {
    let scheme = path.scheme();
    for (k, &v) in path.values().iter().enumerate() {
        out.row(&[id.to_string(), fmt_float(scheme.time(k)), fmt_float(v)])?;
    }
    Ok(())
}

fn oracle_series(cfg: &ExperimentConfig, grid: &[f64], out: &mut CsvWriter) -> Result<()> {
    match OracleResult::new(&cfg.model, cfg.r) {
        Ok(oracle) => {
            for &t in grid {
                let v = oracle.value_at(cfg.model.u(), t)?;
                out.row(&["oracle".into(), fmt_float(t), fmt_float(v)])?;
            }
        }
        Err(err) => log::warn!("oracle series omitted: {err}"),
    }
    Ok(())
}

/// Writes the requested figure data into `cfg.output_dir`; returns the files
/// written.
pub fn emit_figures(cfg: &ExperimentConfig, which: &[Figure]) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir)?;
    let u0 = cfg.model.u();
    let grid = cfg.grid.points();
    let mut written = Vec::new();

    for figure in which {
        match figure {
            Figure::Paths => {
                let file = dir.join("paths.csv");
                let mut out = CsvWriter::create(&file, &["path_id", "t", "value"])?;
                let scheme = cfg.scheme(cfg.h_list[0]);
                for id in 0..cfg.replications {
                    let inc = simulate_increments(&cfg.model, scheme, figure_path_seed(cfg.master_seed, 0, id));
                    write_path(&mut out, id, &path_from_increments(u0, &inc))?;
                }
                out.finish()?;
                written.push(file);
            }
            Figure::Quasi => {
                let file = dir.join("quasi.csv");
                let mut out = CsvWriter::create(&file, &["perm_id", "t", "value"])?;
                let (inc, seed) = observed_increments(cfg, 0);
                write_path(&mut out, 0, &path_from_increments(u0, &inc))?;
                let ensemble = QuasiEnsemble::new(u0, &inc, cfg.alpha_list[0], seed);
                for i in 0..ensemble.alpha() {
                    write_path(&mut out, i + 1, &ensemble.path(i))?;
                }
                out.finish()?;
                written.push(file);
            }
            Figure::ValueCurves => {
                let file = dir.join("valuecurves.csv");
                let mut out = CsvWriter::create(&file, &["perm_id", "theta", "value"])?;
                let (inc, seed) = observed_increments(cfg, 0);
                let ensemble = QuasiEnsemble::new(u0, &inc, cfg.value_curves, seed);
                for i in 0..cfg.value_curves {
                    let curve = crate::dividend::value_curve(&ensemble.path(i), &grid, cfg.r)?;
                    for (t, v) in curve.thetas.iter().zip(&curve.values) {
                        out.row(&[(i + 1).to_string(), fmt_float(*t), fmt_float(*v)])?;
                    }
                }
                out.finish()?;
                written.push(file);
            }
            Figure::Contrast => {
                let header = ["series_id", "theta", "mean_value"];

                let file = dir.join("contrast_alpha.csv");
                let mut out = CsvWriter::create(&file, &header)?;
                let (inc, seed) = observed_increments(cfg, 0);
                for &alpha in &cfg.alpha_list {
                    let c = ensemble_contrast(&QuasiEnsemble::new(u0, &inc, alpha, seed), &grid, cfg.r)?;
                    for (t, v) in c.thetas.iter().zip(&c.values) {
                        out.row(&[alpha.to_string(), fmt_float(*t), fmt_float(*v)])?;
                    }
                }
                oracle_series(cfg, &grid, &mut out)?;
                out.finish()?;
                written.push(file);

                let file = dir.join("contrast_h.csv");
                let mut out = CsvWriter::create(&file, &header)?;
                for (hi, &h) in cfg.h_list.iter().enumerate() {
                    let (inc, seed) = observed_increments(cfg, hi);
                    let ensemble = QuasiEnsemble::new(u0, &inc, cfg.alpha_list[0], seed);
                    let c = ensemble_contrast(&ensemble, &grid, cfg.r)?;
                    for (t, v) in c.thetas.iter().zip(&c.values) {
                        out.row(&[fmt_float(h), fmt_float(*t), fmt_float(*v)])?;
                    }
                }
                oracle_series(cfg, &grid, &mut out)?;
                out.finish()?;
                written.push(file);
            }
            Figure::Boxplot => {
                write_experiment(&run_experiment(cfg)?, dir)?;
                written.push(dir.join(ESTIMATES_FILE));
            }
        }
    }
    Ok(written)
}
