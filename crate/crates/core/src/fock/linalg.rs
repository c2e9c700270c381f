//! Hermitian eigendecomposition and the matrix exponential.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use ndarray::Array2;

use super::Operator;
use crate::error::{Error, Result};
use crate::C64;

pub struct EigenDecomposition {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub vectors: Array2<C64>,
}

fn to_faer(m: &Array2<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> Array2<C64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian operator.
///
/// Rejects inputs whose anti-Hermitian part exceeds `1e-10` relative to the
/// largest element.
pub fn eig_hermitian(a: &Operator) -> Result<EigenDecomposition> {
    let deviation = a.hermiticity_deviation();
    if deviation > 1e-10 * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let m = to_faer(&a.to_dense());
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    let values = evd.S().column_vector().iter().map(|v| v.re).collect();
    Ok(EigenDecomposition {
        values,
        vectors: from_faer(evd.U()),
    })
}

// Padé degrees and the 1-norm bounds below which each is accurate to unit
// roundoff (Higham, 2005).
const PADE_THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

fn pade_coefficients(m: usize) -> &'static [f64] {
    match m {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0],
        9 => &[
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        13 => &[
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ],
        _ => unreachable!("unsupported Padé degree {m}"),
    }
}

fn norm1(a: &Array2<C64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn eye(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant of degree 3..13.
pub fn expm(a: &Operator) -> Operator {
    let x = a.to_dense();
    let n = x.nrows();
    let norm = norm1(&x);

    let (degree, scale) = match PADE_THETA.iter().find(|&&(_, theta)| norm <= theta) {
        Some(&(m, _)) => (m, 0),
        None => {
            let s = (norm / PADE_THETA[4].1).log2().ceil().max(0.0) as i32;
            (13, s)
        }
    };
    let x = x.mapv(|v| v * 0.5f64.powi(scale));
    let b = pade_coefficients(degree);
    let id = eye(n);

    let x2 = x.dot(&x);
    let (u, v) = if degree < 13 {
        // even powers I, X², X⁴, ...
        let mut powers = vec![id.clone(), x2.clone()];
        while powers.len() <= degree / 2 {
            let next = powers.last().unwrap().dot(&x2);
            powers.push(next);
        }
        let mut odd = Array2::<C64>::zeros((n, n));
        let mut even = Array2::<C64>::zeros((n, n));
        for (k, p) in powers.iter().enumerate() {
            if 2 * k + 1 <= degree {
                odd.scaled_add(C64::new(b[2 * k + 1], 0.0), p);
            }
            even.scaled_add(C64::new(b[2 * k], 0.0), p);
        }
        (x.dot(&odd), even)
    } else {
        let x4 = x2.dot(&x2);
        let x6 = x4.dot(&x2);
        let lin = |c: [f64; 3], m: [&Array2<C64>; 3]| {
            let mut out = m[0].mapv(|v| v * c[0]);
            out.scaled_add(C64::new(c[1], 0.0), m[1]);
            out.scaled_add(C64::new(c[2], 0.0), m[2]);
            out
        };
        let u_hi = lin([b[13], b[11], b[9]], [&x6, &x4, &x2]);
        let mut u_inner = x6.dot(&u_hi);
        u_inner = u_inner + lin([b[7], b[5], b[3]], [&x6, &x4, &x2]);
        u_inner.scaled_add(C64::new(b[1], 0.0), &id);
        let u = x.dot(&u_inner);

        let v_hi = lin([b[12], b[10], b[8]], [&x6, &x4, &x2]);
        let mut v = x6.dot(&v_hi);
        v = v + lin([b[6], b[4], b[2]], [&x6, &x4, &x2]);
        v.scaled_add(C64::new(b[0], 0.0), &id);
        (u, v)
    };

    // (V - U) R = (V + U)
    let p = to_faer(&(&v - &u));
    let q = to_faer(&(&v + &u));
    let lu = p.partial_piv_lu();
    let mut r = from_faer(lu.solve(&q).as_ref());
    for _ in 0..scale {
        r = r.dot(&r);
    }
    Operator::from_dense(a.space().clone(), r).expect("shape preserved")
}

/// Exponential of an anti-Hermitian operator through the eigendecomposition
/// of the Hermitian generator `iA`.
pub fn expm_skew_hermitian(a: &Operator) -> Result<Operator> {
    let h = a.scale(C64::new(0.0, 1.0));
    let eig = eig_hermitian(&h)?;
    let v = &eig.vectors;
    let phases: Vec<C64> = eig.values.iter().map(|&l| C64::new(0.0, -l).exp()).collect();
    let mut scaled = v.clone();
    for (mut col, &ph) in scaled.columns_mut().into_iter().zip(&phases) {
        col.mapv_inplace(|x| x * ph);
    }
    let out = scaled.dot(&v.t().mapv(|x| x.conj()));
    Operator::from_dense(a.space().clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{create, destroy, identity, number, HilbertSpec};

    fn spectral_norm(a: &Array2<C64>) -> f64 {
        let m = to_faer(a);
        m.singular_values().unwrap()[0]
    }

    #[test]
    fn eig_examples() {
        let space = HilbertSpec::single(3).unwrap();
        let d = Array2::from_diag(&ndarray::arr1(&[
            C64::new(3.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
        ]));
        let e = eig_hermitian(&Operator::from_dense(space, d).unwrap()).unwrap();
        assert_eq!(e.values.len(), 3);
        for (v, want) in e.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - want).abs() < 1e-12);
        }

        let e = eig_hermitian(&number(4).unwrap()).unwrap();
        for (k, v) in e.values.iter().enumerate() {
            assert!((v - k as f64).abs() < 1e-12);
        }

        let sx = &destroy(2).unwrap() + &create(2).unwrap();
        let e = eig_hermitian(&sx).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-12 && (e.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        assert!(matches!(
            eig_hermitian(&destroy(3).unwrap()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let a = destroy(6).unwrap();
        let h = &(&a + &a.dagger()) + &number(6).unwrap().scale(C64::new(0.3, 0.0));
        let e = eig_hermitian(&h).unwrap();
        let gram = e.vectors.t().mapv(|v| v.conj()).dot(&e.vectors);
        let err = (&gram - &eye(6)).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err < 1e-8);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = Operator::zeros(HilbertSpec::single(4).unwrap());
        assert!(expm(&z).max_abs_diff(&identity(4).unwrap()) < 1e-15);
    }

    #[test]
    fn expm_of_phase_generator() {
        let theta = 0.7;
        for scale in [1.0, 25.0] {
            let gen = number(5).unwrap().scale(C64::new(0.0, theta * scale));
            let u = expm(&gen).to_dense();
            for k in 0..5 {
                let want = C64::new(0.0, theta * scale * k as f64).exp();
                assert!((u[[k, k]] - want).norm() < 1e-12, "scale {scale} k {k}");
            }
        }
    }

    #[test]
    fn displacement_gives_coherent_state() {
        let dim = 20;
        let alpha = 0.5;
        let b = destroy(dim).unwrap();
        let gen = (&b.dagger() - &b).scale(C64::new(alpha, 0.0));
        let d = expm(&gen);
        let mut vac = vec![C64::new(0.0, 0.0); dim];
        vac[0] = C64::new(1.0, 0.0);
        let psi = d.apply(&vac);

        // independent amplitudes e^{-|α|²/2} αⁿ/√n!
        let mut amp = (-alpha * alpha / 2.0f64).exp();
        for (n, c) in psi.iter().enumerate().take(12) {
            if n > 0 {
                amp *= alpha / (n as f64).sqrt();
            }
            assert!((c.re - amp).abs() < 1e-10 && c.im.abs() < 1e-12, "n={n}");
        }
        let mean: f64 = psi.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum();
        assert!((mean - 0.25).abs() < 1e-10);
    }

    #[test]
    fn pade_and_eigen_routes_agree() {
        let dim = 24;
        let b = destroy(dim).unwrap();
        let gen = &(&b.dagger() - &b).scale(C64::new(1.3, 0.0))
            + &number(dim).unwrap().scale(C64::new(0.0, 0.9));
        let p = expm(&gen).to_dense();
        let e = expm_skew_hermitian(&gen).unwrap().to_dense();
        assert!(spectral_norm(&(&p - &e)) < 1e-10 * spectral_norm(&e));
    }

    #[test]
    fn expm_inverse_for_skew_hermitian() {
        let dim = 64;
        let b = destroy(dim).unwrap();
        let gen = &(&b.dagger() - &b).scale(C64::new(2.0, 0.0))
            + &(&b.dagger() * &b).scale(C64::new(0.0, 0.35));
        let u = expm(&gen).to_dense();
        let uinv = expm(&gen.scale(C64::new(-1.0, 0.0))).to_dense();
        assert!(spectral_norm(&(&u.dot(&uinv) - &eye(dim))) < 1e-9);
    }
}
