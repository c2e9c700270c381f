use super::steady::{steadystate_with, SolverOptions, SteadyStateResult};
use super::model_liouvillian;
use crate::correlations::photon_distribution;
use crate::error::{Error, Result};
use crate::model::{ModelParams, TruncationSpec};

/// One steady-state solve at fixed cutoffs.
pub fn solve_model(params: &ModelParams, trunc: &TruncationSpec, opts: &SolverOptions) -> Result<SteadyStateResult> {
    trunc.validate()?;
    let l = model_liouvillian(params, trunc)?;
    let mut result = steadystate_with(&l, opts)?;
    result.truncation_used = Some(trunc.clone());
    Ok(result)
}

pub fn solve_converged(params: &ModelParams, trunc: &TruncationSpec) -> Result<SteadyStateResult> {
    solve_converged_with(params, trunc, &SolverOptions::default())
}

/// `(⟨n⟩, g2, g3)` from the photon distribution; the correlations are `None`
/// when the cavity is empty.
fn sentinels(result: &SteadyStateResult) -> [Option<f64>; 3] {
    let p = photon_distribution(&result.rho);
    let moment = |k: usize| -> f64 {
        p.iter()
            .enumerate()
            .map(|(n, p)| (0..k).map(|j| n.saturating_sub(j) as f64).product::<f64>() * p)
            .sum()
    };
    let mean = moment(1);
    if mean > 0.0 {
        [Some(mean), Some(moment(2) / mean.powi(2)), Some(moment(3) / mean.powi(3))]
    } else {
        [Some(mean), None, None]
    }
}

fn settled(coarse: &[Option<f64>; 3], fine: &[Option<f64>; 3], rel_tol: f64) -> bool {
    coarse.iter().zip(fine).all(|pair| match pair {
        (Some(a), Some(b)) => (a - b).abs() <= rel_tol * b.abs() || a == b,
        (None, None) => true,
        _ => false,
    })
}

/// Grows the cutoffs (one photon level, 50% more phonon levels per step)
/// until `⟨n⟩`, `g2` and `g3` each move by less than `rel_tol` between
/// successive levels. The finer of the last two levels is returned. When the
/// next level would exceed `max_dim` the last solve is returned with
/// `converged = false`. Without `auto_converge` a single solve is reported as
/// converged.
pub fn solve_converged_with(
    params: &ModelParams,
    trunc: &TruncationSpec,
    opts: &SolverOptions,
) -> Result<SteadyStateResult> {
    trunc.validate()?;
    if trunc.joint_dim() > trunc.max_dim {
        return Err(Error::DimensionOverflow {
            dim: trunc.joint_dim(),
            max_dim: trunc.max_dim,
        });
    }
    let mut current = solve_model(params, trunc, opts)?;
    if !trunc.auto_converge {
        return Ok(current);
    }

    let mut level = trunc.clone();
    let mut obs = sentinels(&current);
    loop {
        let next = level.refined();
        if next.joint_dim() > next.max_dim {
            current.converged = false;
            return Ok(current);
        }
        let finer = solve_model(params, &next, opts)?;
        let finer_obs = sentinels(&finer);
        let done = settled(&obs, &finer_obs, trunc.rel_tol);
        current = finer;
        obs = finer_obs;
        level = next;
        if done {
            current.converged = true;
            return Ok(current);
        }
    }
}
