//! Equal-time photon statistics of the cavity mode (factor 0 of the state's
//! space) and closed-form weak-drive estimates.

use crate::error::{Error, Result};
use crate::fock::{destroy, expect, identity, tensor_all, DensityMatrix, Operator};
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct PhotonStats {
    pub mean_n: f64,
    pub g2: f64,
    pub g3: f64,
    /// `g3 / g2`; zero when `⟨a†²a²⟩` vanishes.
    pub g32: f64,
    pub c2: f64,
    /// `P(0..n_cav-1)`
    pub p_n: Vec<f64>,
}

/// Cavity annihilation operator embedded in the space of `rho`.
fn cavity_destroy(rho: &DensityMatrix) -> Result<Operator> {
    let dims = rho.space().factor_dims();
    let mut factors = vec![destroy(dims[0])?];
    for &d in &dims[1..] {
        factors.push(identity(d)?);
    }
    let refs: Vec<&Operator> = factors.iter().collect();
    tensor_all(&refs).with_space(rho.space().clone())
}

/// `⟨a†ᵏ aᵏ⟩`
fn normal_moment(rho: &DensityMatrix, a: &Operator, k: u32) -> Result<f64> {
    let ak = a.pow(k);
    Ok(expect(rho, &(&ak.dagger() * &ak))?.re)
}

/// `P(n) = Σ_m ρ_{(n,m),(n,m)}`
pub fn photon_distribution(rho: &DensityMatrix) -> Vec<f64> {
    let n_cav = rho.space().factor_dims()[0];
    let rest = rho.dim() / n_cav;
    let m = rho.matrix();
    (0..n_cav)
        .map(|n| (0..rest).map(|k| m[[n * rest + k, n * rest + k]].re).sum())
        .collect()
}

pub fn mean_photon_number(rho: &DensityMatrix) -> f64 {
    photon_distribution(rho)
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

/// `g⁽ⁿ⁾(0) = ⟨a†ⁿaⁿ⟩ / ⟨a†a⟩ⁿ`, evaluated with ladder operators.
pub fn g_n(rho: &DensityMatrix, order: u32) -> Result<f64> {
    if order < 2 {
        return Err(Error::InvalidParameter(format!("correlation order {order} < 2")));
    }
    let a = cavity_destroy(rho)?;
    let mean = normal_moment(rho, &a, 1)?;
    if !(mean > 0.0) {
        return Err(Error::UndefinedCorrelation { order: order as usize });
    }
    Ok(normal_moment(rho, &a, order)? / mean.powi(order as i32))
}

/// `Σ n(n−1) P(n) / (Σ n P(n))²`
pub fn g2_from_distribution(p: &[f64]) -> Result<f64> {
    let mean: f64 = p.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    if !(mean > 0.0) {
        return Err(Error::UndefinedCorrelation { order: 2 });
    }
    let pairs: f64 = p.iter().enumerate().map(|(n, p)| (n * n.saturating_sub(1)) as f64 * p).sum();
    Ok(pairs / (mean * mean))
}

/// `C⁽²⁾(0) = ⟨a†²a²⟩ − ⟨a†a⟩²`
pub fn c2(rho: &DensityMatrix) -> Result<f64> {
    let a = cavity_destroy(rho)?;
    let mean = normal_moment(rho, &a, 1)?;
    Ok(normal_moment(rho, &a, 2)? - mean * mean)
}

pub fn stats(rho: &DensityMatrix) -> Result<PhotonStats> {
    let a = cavity_destroy(rho)?;
    let mean_n = normal_moment(rho, &a, 1)?;
    if !(mean_n > 0.0) {
        return Err(Error::UndefinedCorrelation { order: 2 });
    }
    let m2 = normal_moment(rho, &a, 2)?;
    let m3 = normal_moment(rho, &a, 3)?;
    let g2 = m2 / mean_n.powi(2);
    let g3 = m3 / mean_n.powi(3);
    Ok(PhotonStats {
        mean_n,
        g2,
        g3,
        g32: if m2 > 0.0 { g3 / g2 } else { 0.0 },
        c2: (g2 - 1.0) * mean_n * mean_n,
        p_n: photon_distribution(rho),
    })
}

fn lorentz(gamma: f64, detuning: f64) -> C64 {
    C64::new(gamma, 2.0 * detuning)
}

/// `|(γ + 2i(Δ−Δ₀)) / (γ + 2i(Δ−2Δ₀))|²`
pub fn g2_weak_drive(delta: f64, delta0: f64, gamma: f64) -> f64 {
    (lorentz(gamma, delta - delta0) / lorentz(gamma, delta - 2.0 * delta0)).norm_sqr()
}

/// `|(γ + 2i(Δ−Δ₀))² / ((γ + 2i(Δ−2Δ₀))(γ + 2i(Δ−3Δ₀)))|²`
pub fn g3_weak_drive(delta: f64, delta0: f64, gamma: f64) -> f64 {
    let one = lorentz(gamma, delta - delta0);
    (one * one / (lorentz(gamma, delta - 2.0 * delta0) * lorentz(gamma, delta - 3.0 * delta0))).norm_sqr()
}

/// `|(γ + 2i(Δ−Δ₀)) / (γ + 2i(Δ−3Δ₀))|²`
pub fn g32_weak_drive(delta: f64, delta0: f64, gamma: f64) -> f64 {
    (lorentz(gamma, delta - delta0) / lorentz(gamma, delta - 3.0 * delta0)).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{HilbertSpec, Operator};

    fn space(n_cav: usize, n_mech: usize) -> HilbertSpec {
        HilbertSpec::new(vec![n_cav, n_mech]).unwrap()
    }

    /// Coherent amplitudes `e^{-|α|²/2} αⁿ/√n!` built by recursion.
    fn coherent(alpha: C64, dim: usize) -> Vec<C64> {
        let mut psi = vec![C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0)];
        for n in 1..dim {
            let prev = psi[n - 1];
            psi.push(prev * alpha / (n as f64).sqrt());
        }
        psi
    }

    #[test]
    fn fock_state_statistics() {
        let two = DensityMatrix::fock(space(5, 3), &[2, 1]).unwrap();
        assert_eq!(mean_photon_number(&two), 2.0);
        assert!((g_n(&two, 2).unwrap() - 0.5).abs() < 1e-14);
        let one = DensityMatrix::fock(space(4, 2), &[1, 0]).unwrap();
        assert!((c2(&one).unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(stats(&one).unwrap().g2, 0.0);
    }

    #[test]
    fn vacuum_has_no_correlations() {
        let vac = DensityMatrix::fock(space(4, 2), &[0, 0]).unwrap();
        assert_eq!(mean_photon_number(&vac), 0.0);
        assert_eq!(photon_distribution(&vac), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(g_n(&vac, 2), Err(Error::UndefinedCorrelation { order: 2 })));
        assert!(stats(&vac).is_err());
    }

    #[test]
    fn thermal_cavity_bunches() {
        let dim = 120;
        let nbar: f64 = 0.5;
        let q = nbar / (1.0 + nbar);
        let pops: Vec<f64> = (0..dim).map(|n| q.powi(n as i32)).collect();
        let rho = DensityMatrix::diagonal(HilbertSpec::single(dim).unwrap(), &pops).unwrap();
        assert!((g_n(&rho, 2).unwrap() - 2.0).abs() < 1e-10);
        assert!((g_n(&rho, 3).unwrap() - 6.0).abs() < 1e-10);
    }

    #[test]
    fn coherent_state_is_poissonian() {
        let dim = 20;
        let alpha = C64::new(0.12, -0.16);
        let psi = coherent(alpha, dim);
        let rho = DensityMatrix::pure(HilbertSpec::single(dim).unwrap(), &psi).unwrap();
        let s = stats(&rho).unwrap();
        let nbar = alpha.norm_sqr();
        assert!((s.mean_n - nbar).abs() < 1e-12);
        for order in 2..5 {
            assert!((g_n(&rho, order).unwrap() - 1.0).abs() < 1e-10);
        }
        assert!(s.c2.abs() < 1e-12);
        let mut fact = 1.0;
        for (n, p) in s.p_n.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            let poisson = (-nbar).exp() * nbar.powi(n as i32) / fact;
            assert!((p - poisson).abs() < 1e-12);
        }
    }

    #[test]
    fn distribution_route_matches_operator_route() {
        let dim = 6;
        let psi: Vec<C64> = (0..dim * 2).map(|k| C64::new(1.0 / (1.0 + k as f64), 0.3 * k as f64)).collect();
        let norm = psi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let psi: Vec<C64> = psi.iter().map(|v| v / norm).collect();
        let rho = DensityMatrix::pure(space(dim, 2), &psi).unwrap();
        let a = g_n(&rho, 2).unwrap();
        let b = g2_from_distribution(&photon_distribution(&rho)).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
        let n_op = Operator::from_dense(rho.space().clone(), ndarray::Array2::from_diag(
            &ndarray::Array1::from_iter((0..dim * 2).map(|i| C64::new((i / 2) as f64, 0.0))),
        ))
        .unwrap();
        assert!((expect(&rho, &n_op).unwrap().re - mean_photon_number(&rho)).abs() < 1e-12);
    }

    #[test]
    fn weak_drive_values() {
        let gamma = 0.1;
        let d0 = 0.625;
        assert!((g2_weak_drive(d0, d0, gamma) - gamma * gamma / (gamma * gamma + 4.0 * d0 * d0)).abs() < 1e-15);
        assert!((g2_weak_drive(d0, d0, gamma) - 6.359e-3).abs() < 1e-6);
        assert!((g2_weak_drive(2.0 * d0, d0, gamma) - 157.25).abs() < 1e-9);
        assert!((g2_weak_drive(0.37, 0.0, gamma) - 1.0).abs() < 1e-15);

        assert!((g3_weak_drive(3.0 * d0, d0, gamma) / 2500.0 - 1.0).abs() < 0.01);
        assert!((g3_weak_drive(d0, d0, gamma) / 1.024e-5 - 1.0).abs() < 0.03);
        assert!((g3_weak_drive(1.3, 0.0, gamma) - 1.0).abs() < 1e-15);

        assert!((g32_weak_drive(2.0 * d0, d0, gamma) - 1.0).abs() < 1e-12);
        assert!((g32_weak_drive(3.0 * d0, d0, gamma) / 625.0 - 1.0).abs() < 0.01);
        assert!((g32_weak_drive(d0, d0, gamma) / 1.6e-3 - 1.0).abs() < 0.01);
    }

    #[test]
    fn weak_drive_ratio_identity() {
        for k in 0..40 {
            let delta = 0.1 * k as f64;
            let (g2, g3, g32) = (
                g2_weak_drive(delta, 0.625, 0.1),
                g3_weak_drive(delta, 0.625, 0.1),
                g32_weak_drive(delta, 0.625, 0.1),
            );
            assert!((g2 * g32 - g3).abs() < 1e-12 * g3.max(1.0));
        }
    }
}
