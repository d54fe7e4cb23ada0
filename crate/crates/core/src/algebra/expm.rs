//! Hermitian eigendecomposition (cyclic complex Jacobi) and `exp(−iHt)`.

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cis, real, Scalar};

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Unitary whose column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix<T>,
}

fn hermitian_tol<T: Scalar>(h: &ComplexMatrix<T>) -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) * T::one().max(h.frobenius_norm())
}

/// Diagonalizes `h`, which must be Hermitian within 1e-12 (relative to ‖h‖_F when that exceeds 1).
pub fn hermitian_eigen<T: Scalar>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let deviation = h.hermiticity_defect();
    if !h.is_finite() || deviation > hermitian_tol(h) {
        return Err(Error::NotHermitian { deviation: deviation.to_f64_lossy() });
    }
    let n = h.dim();
    // symmetrize so that rounding in the input cannot bias the rotations
    let mut a = ComplexMatrix::from_fn(n, |r, c| (h[(r, c)] + h[(c, r)].conj()).scale(T::lit(0.5)));
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = a.frobenius_norm().max(T::min_positive_value());
    let stop = T::epsilon() * scale * T::lit(1e-2);

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[(r, c)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi rotation annihilating `a[p][q]`; `a ← U†AU`, `v ← VU`.
fn rotate<T: Scalar>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == T::zero() {
        return;
    }
    let phase = apq.scale(T::one() / mag); // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = if theta >= T::zero() {
        T::one() / (theta + (T::one() + theta * theta).sqrt())
    } else {
        -T::one() / (-theta + (T::one() + theta * theta).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let u_pp = real(c);
    let u_pq = real(s);
    let u_qp = phase.conj().scale(-s);
    let u_qq = phase.conj().scale(c);
    let n = a.dim();

    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = real(T::zero());
    a[(q, p)] = real(T::zero());
    a[(p, p)] = real(a[(p, p)].re);
    a[(q, q)] = real(a[(q, q)].re);
}

/// `exp(−iHt)` via eigendecomposition of the Hermitian `h`.
pub fn exp_hermitian<T: Scalar>(h: &ComplexMatrix<T>, t: T) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eigen(h)?;
    let n = h.dim();
    let phases: Vec<_> = eig.values.iter().map(|&e| cis(-e * t)).collect();
    let v = &eig.vectors;
    Ok(ComplexMatrix::from_fn(n, |r, c| {
        (0..n).fold(real(T::zero()), |acc, k| acc + v[(r, k)] * phases[k] * v[(c, k)].conj())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::pauli;
    use crate::scalar::cx;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    type M = ComplexMatrix<f64>;

    fn hermitian(dim: usize, seed: &[f64]) -> M {
        let a = M::from_fn(dim, |r, c| cx(seed[(r * dim + c) % seed.len()], seed[(c * dim + r + 1) % seed.len()]));
        &a + &a.adjoint()
    }

    #[test]
    fn zero_hamiltonian_gives_identity() {
        assert_eq!(exp_hermitian(&M::zeros(4), 2.5).unwrap(), M::identity(4));
    }

    #[test]
    fn sigma_z_half_turn_is_minus_identity() {
        let u = exp_hermitian(&pauli::<f64>(3), PI).unwrap();
        assert!(u.distance(&M::identity(2).scale(cx(-1.0, 0.0))).unwrap() < 1e-15);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = M::from_rows([[cx(0.0, 0.0), cx(1.0, 0.0)], [cx(0.0, 0.0), cx(0.0, 0.0)]]);
        assert!(matches!(exp_hermitian(&m, 1.0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigen_agrees_with_nalgebra() {
        let seed = [0.3, -1.2, 2.2, 0.7, -0.4, 1.9, -2.5, 0.05, 1.1, -0.8, 0.6, 2.0];
        for dim in [2, 4, 8] {
            let h = hermitian(dim, &seed);
            let ours = hermitian_eigen(&h).unwrap();
            let na = nalgebra::DMatrix::from_fn(dim, dim, |r, c| nalgebra::Complex::new(h[(r, c)].re, h[(r, c)].im));
            let mut theirs: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            theirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in ours.values.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
            // H V = V Λ
            let hv = &h * &ours.vectors;
            let vl = M::from_fn(dim, |r, c| ours.vectors[(r, c)].scale(ours.values[c]));
            assert!(hv.distance(&vl).unwrap() < 1e-12);
            assert!(ours.vectors.unitarity_defect() < 1e-13);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let h = hermitian(4, &[0.3, -1.2, 2.2, 0.7, -0.4, 1.9]).map(|z| cx(z.re as f32, z.im as f32));
        let u = exp_hermitian(&h, 0.9f32).unwrap();
        assert!(u.unitarity_defect() < 1e-5);
    }

    proptest! {
        #[test]
        fn one_parameter_group(
            seed in proptest::collection::vec(-3.0f64..3.0, 16),
            t in -10.0f64..10.0,
            s in -10.0f64..10.0,
        ) {
            let h = hermitian(4, &seed);
            let lhs = exp_hermitian(&h, t + s).unwrap();
            let rhs = &exp_hermitian(&h, t).unwrap() * &exp_hermitian(&h, s).unwrap();
            prop_assert!(lhs.distance(&rhs).unwrap() < 1e-11);
            prop_assert!(lhs.unitarity_defect() < 1e-12);
        }
    }
}
