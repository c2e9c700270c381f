use super::Superoperator;
use crate::error::{Error, Result};
use crate::fock::{unvec, DensityMatrix, Operator};
use crate::C64;

/// Step control for [`evolve`].
#[derive(Clone, Debug, PartialEq)]
pub struct EvolveOptions {
    pub atol: f64,
    pub rtol: f64,
    /// First trial step; defaults to `0.1 / ‖L‖_∞`.
    pub initial_step: Option<f64>,
    /// Smallest step relative to the current time before giving up.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            atol: 1e-8,
            rtol: 1e-8,
            initial_step: None,
            min_step: 1e-14,
            max_steps: 10_000_000,
        }
    }
}

// Dormand–Prince 5(4) tableau; the generator is time independent so the
// nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// `ρ(t_final)` under `dρ/dt = L ρ`, by adaptive Dormand–Prince 5(4)
/// integration of `vec(ρ)`.
pub fn evolve(rho0: &DensityMatrix, l: &Superoperator, t_final: f64, opts: &EvolveOptions) -> Result<DensityMatrix> {
    let d = l.dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho0.dim(),
        });
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_final = {t_final}")));
    }

    let n = d * d;
    let mut y = rho0.to_vec();
    let mut t = 0.0;
    let mut h = opts
        .initial_step
        .unwrap_or_else(|| 0.1 / l.matrix().norm_inf().max(1e-300))
        .min(t_final);
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; 7];
    k[0] = l.apply_vec(&y);
    let mut stage = vec![C64::new(0.0, 0.0); n];
    let mut steps = 0;

    while t < t_final {
        if steps >= opts.max_steps || h < opts.min_step * t.max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }
        steps += 1;
        let last = t + h >= t_final;
        if last {
            h = t_final - t;
        }

        for s in 1..7 {
            for (idx, st) in stage.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (j, &a) in A[s][..s].iter().enumerate() {
                    if a != 0.0 {
                        acc += k[j][idx] * a;
                    }
                }
                *st = y[idx] + acc * h;
            }
            k[s] = l.apply_vec(&stage);
        }
        // stage 6 is evaluated at the fifth-order solution (FSAL)
        let y_new = stage.clone();

        let mut err_sq = 0.0;
        for idx in 0..n {
            let mut e = C64::new(0.0, 0.0);
            for s in 0..7 {
                e += k[s][idx] * (B5[s] - B4[s]);
            }
            let scale = opts.atol + opts.rtol * y[idx].norm().max(y_new[idx].norm());
            err_sq += (e * h).norm_sqr() / (scale * scale);
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t = if last { t_final } else { t + h };
            y = y_new;
            k.swap(0, 6);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= if err <= 1.0 { factor } else { factor.min(1.0) };
    }

    let m = unvec(&y, d);
    let sym = (&m + &m.t().mapv(|v| v.conj())).mapv(|v| v * 0.5);
    DensityMatrix::new(Operator::from_dense(rho0.space().clone(), sym)?)
}
