//! Parameter sweeps over detuning, coupling and temperature, with CSV output.

mod config;
mod peaks;
mod table;

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

pub use config::{
    AxisName, AxisSpec, AxisUnits, DeltaUnits, ExperimentConfig, Observable, OutputSection, ParamsSection,
    TruncationSection,
};
pub use peaks::locate_peaks;
pub use table::{format_float, SweepRow, SweepTable, COLUMNS, HEATMAP_COLUMNS};

use crate::correlations::{c2, photon_distribution};
use crate::error::{Error, Result};
use crate::lindblad::solve_converged_with;

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Width of the worker pool; 0 lets rayon decide.
    pub threads: usize,
    /// Per-point progress lines on standard error.
    pub progress: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            threads: 1,
            progress: false,
        }
    }
}

/// Solves one grid point; solver failures become an unconverged row.
pub fn evaluate_point(cfg: &ExperimentConfig, coords: &[(AxisSpec, f64)]) -> SweepRow {
    let params = cfg.params_at(coords);
    let trunc = cfg.truncation();
    let mut row = table::empty_row();
    row.axis = coords[0].0.axis.to_string();
    row.value = coords[0].1;
    row.inner = coords.get(1).map(|(a, v)| (a.axis.to_string(), *v));
    row.n_cav = trunc.n_cav;
    row.n_mech = trunc.n_mech;

    let solved = match solve_converged_with(&params, &trunc, &cfg.solver_options()) {
        Ok(s) => s,
        Err(_) => return row,
    };
    if let Some(used) = &solved.truncation_used {
        row.n_cav = used.n_cav;
        row.n_mech = used.n_mech;
    }
    row.residual = Some(solved.residual);
    row.converged = solved.converged;

    let want = |o: Observable| cfg.observables.contains(&o);
    let p = photon_distribution(&solved.rho);
    if want(Observable::PN) {
        for (k, slot) in row.p.iter_mut().enumerate() {
            *slot = Some(p.get(k).copied().unwrap_or(0.0));
        }
    }
    match crate::correlations::stats(&solved.rho) {
        Ok(s) => {
            row.mean_n = want(Observable::MeanN).then_some(s.mean_n);
            row.g2 = want(Observable::G2).then_some(s.g2);
            row.g3 = want(Observable::G3).then_some(s.g3);
            row.g32 = want(Observable::G32).then_some(s.g32);
            row.c2 = want(Observable::C2).then_some(s.c2);
        }
        Err(Error::UndefinedCorrelation { .. }) => {
            row.mean_n = want(Observable::MeanN).then_some(0.0);
            if want(Observable::C2) {
                row.c2 = c2(&solved.rho).ok();
            }
        }
        Err(_) => row.converged = false,
    }
    row
}

fn run_points(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<SweepTable> {
    let grid = cfg.grid();
    let total = grid.len();
    let done = AtomicUsize::new(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        grid.par_iter()
            .map(|coords| {
                let row = evaluate_point(cfg, coords);
                if opts.progress {
                    let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                    let at: Vec<String> = coords.iter().map(|(a, v)| format!("{}={v}", a.axis)).collect();
                    eprintln!(
                        "[{k}/{total}] {} n_cav={} n_mech={}{}",
                        at.join(" "),
                        row.n_cav,
                        row.n_mech,
                        if row.converged { "" } else { " UNCONVERGED" }
                    );
                }
                row
            })
            .collect()
    });
    Ok(SweepTable { rows })
}

/// One row per point of the `[sweep]` axis, in axis order.
pub fn run_sweep(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<SweepTable> {
    if cfg.heatmap.is_some() {
        return Err(Error::Config("config describes a two-axis scan; use run_heatmap".into()));
    }
    run_points(cfg, opts)
}

/// Row-major grid: the `[sweep]` axis is outer, the `[heatmap]` axis inner.
pub fn run_heatmap(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<SweepTable> {
    if cfg.heatmap.is_none() {
        return Err(Error::Config("config has no [heatmap] axis".into()));
    }
    run_points(cfg, opts)
}

/// Dispatches on the presence of a second axis.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<SweepTable> {
    run_points(cfg, opts)
}

/// Peaks of `column` along the first axis.
pub fn table_peaks(table: &SweepTable, column: &str) -> Result<Vec<(f64, f64)>> {
    if !COLUMNS[2..].contains(&column) {
        return Err(Error::Csv(format!("unknown column {column:?}")));
    }
    let samples: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter_map(|r| r.column(column).map(|y| (r.value, y)))
        .collect();
    Ok(locate_peaks(&samples))
}
