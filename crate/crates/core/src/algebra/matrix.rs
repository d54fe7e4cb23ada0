use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{cx, real, Cx, Scalar};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Cx<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix { dim, data: vec![Cx::new(T::zero(), T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = real(T::one());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { dim, data }
    }

    /// Builds a matrix from row-major entries, rejecting non-square or
    /// non-finite input.
    pub fn from_vec(dim: usize, data: Vec<Cx<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Cx<T>; N]; N]) -> Self {
        ComplexMatrix { dim: N, data: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |r, c| real(T::lit(rows[r][c])))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, z: Cx<T>) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|&a| a * z).collect() }
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.dim).map(|k| self[(k, k)]).fold(real(T::zero()), |acc, z| acc + z)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Matrix product with a dimension check.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        Ok(self * rhs)
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (*a - *b).norm_sqr()).sum::<T>().sqrt())
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> T {
        let p = &self.adjoint() * self;
        p.distance(&Self::identity(self.dim)).expect("same dimension")
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_defect() < tol
    }

    /// `‖H − H†‖_F`.
    pub fn hermiticity_defect(&self) -> T {
        self.distance(&self.adjoint()).expect("same dimension")
    }

    /// The 2×2 submatrix on rows/columns `(k, l)` (0-based).
    pub fn principal_block(&self, k: usize, l: usize) -> ComplexMatrix<T> {
        let idx = [k, l];
        Self::from_fn(2, |r, c| self[(idx[r], idx[c])])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(Cx<T>) -> Cx<U>) -> ComplexMatrix<U> {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|&z| f(z)).collect() }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Cx<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Cx<T> {
        &self.data[r * self.dim + c]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[r * self.dim + c]
    }
}

impl<T: Scalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] = out.data[r * n + c] + a * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

impl<T: Scalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect() }
    }
}

impl<T: Scalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect() }
    }
}

/// Kronecker product `a ⊗ b`; entry `(ra·db + rb, ca·db + cb) = a[ra,ca]·b[rb,cb]`.
pub fn kron<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let db = b.dim;
    ComplexMatrix::from_fn(a.dim * db, |r, c| a[(r / db, c / db)] * b[(r % db, c % db)])
}

/// Pauli matrix σ_k for k = 1, 2, 3; σ_0 is the identity.
pub fn pauli<T: Scalar>(k: usize) -> ComplexMatrix<T> {
    let (o, z, i) = (T::one(), T::zero(), T::one());
    match k {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_rows([[cx(z, z), cx(o, z)], [cx(o, z), cx(z, z)]]),
        2 => ComplexMatrix::from_rows([[cx(z, z), cx(z, -i)], [cx(z, i), cx(z, z)]]),
        3 => ComplexMatrix::from_rows([[cx(o, z), cx(z, z)], [cx(z, z), cx(-o, z)]]),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// Hadamard gate in the computational basis.
pub fn hadamard<T: Scalar>() -> ComplexMatrix<T> {
    let s = T::FRAC_1_SQRT_2();
    ComplexMatrix::from_rows([[real(s), real(s)], [real(s), real(-s)]])
}

/// `min_φ ‖U − e^{iφ}V‖_F`, which equals `sqrt(2d − 2|tr(U†V)|)` for unitaries.
///
/// The minimizing phase is `arg tr(V†U)`; the norm is then evaluated directly,
/// which avoids the cancellation in the trace formula near zero.
pub fn global_phase_distance<T: Scalar>(u: &ComplexMatrix<T>, v: &ComplexMatrix<T>) -> Result<T> {
    if u.dim != v.dim {
        return Err(Error::DimensionMismatch { expected: u.dim, found: v.dim });
    }
    // tr(V†U) = Σ conj(V_rc) U_rc
    let overlap = u.data.iter().zip(&v.data).fold(real(T::zero()), |acc, (a, b)| acc + b.conj() * *a);
    let phase = if overlap.norm() > T::zero() { overlap.scale(T::one() / overlap.norm()) } else { real(T::one()) };
    u.distance(&v.scale(phase))
}

impl<T: Scalar + Serialize> Serialize for ComplexMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[T; 2]>> =
            (0..self.dim).map(|r| (0..self.dim).map(|c| [self[(r, c)].re, self[(r, c)].im]).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for ComplexMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[T; 2]>> = Vec::deserialize(d)?;
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(D::Error::custom("matrix must be square"));
        }
        let data = rows.into_iter().flatten().map(|[re, im]| cx(re, im)).collect();
        ComplexMatrix::from_vec(dim, data).map_err(D::Error::custom)
    }
}
