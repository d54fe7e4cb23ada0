use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cx, real, Cx, Scalar};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 12;

/// Pure state of `n` qubits; qubit 0 is the most significant (leftmost) bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Cx<T>>,
}

fn normalization_tol<T: Scalar>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(64.0))
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::DimensionMismatch { expected: len.next_power_of_two().max(2), found: len });
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::QubitOutOfRange { index: n - 1, n_qubits: MAX_QUBITS });
    }
    Ok(n)
}

impl<T: Scalar> StateVector<T> {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!((1..=MAX_QUBITS).contains(&n_qubits), "unsupported register width {n_qubits}");
        assert!(index < 1 << n_qubits, "basis index out of range");
        let mut amps = vec![real(T::zero()); 1 << n_qubits];
        amps[index] = real(T::one());
        StateVector { n_qubits, amps }
    }

    /// Wraps amplitudes that must already be normalized (within 1e-12 at `f64`).
    pub fn from_amplitudes(amps: Vec<Cx<T>>) -> Result<Self> {
        let s = Self::from_amplitudes_unchecked(amps)?;
        let n = s.norm_sqr();
        if (n - T::one()).abs() > normalization_tol() {
            return Err(Error::NotNormalized { norm_sqr: n.to_f64_lossy() });
        }
        Ok(s)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized_from(amps: Vec<Cx<T>>) -> Result<Self> {
        Self::from_amplitudes_unchecked(amps)?.normalized()
    }

    /// No normalization requirement; used for linear-map checks.
    pub fn from_amplitudes_unchecked(amps: Vec<Cx<T>>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Single-qubit state `α|0⟩ + β|1⟩`.
    pub fn qubit(alpha: Cx<T>, beta: Cx<T>) -> Result<Self> {
        Self::from_amplitudes(vec![alpha, beta])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Cx<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n <= T::min_positive_value() {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        Ok(self.scaled(real(T::one() / n)))
    }

    pub fn scaled(&self, z: Cx<T>) -> Self {
        StateVector { n_qubits: self.n_qubits, amps: self.amps.iter().map(|&a| a * z).collect() }
    }

    /// `self ⊗ other` (self occupies the leading qubits).
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::QubitOutOfRange { index: n - 1, n_qubits: MAX_QUBITS });
        }
        let amps = self.amps.iter().flat_map(|&a| other.amps.iter().map(move |&b| a * b)).collect();
        Ok(StateVector { n_qubits: n, amps })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Cx<T>> {
        self.check_same(other)?;
        Ok(self.amps.iter().zip(&other.amps).fold(real(T::zero()), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.check_same(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (*a - *b).norm_sqr()).sum::<T>().sqrt())
    }

    /// `min_φ ‖self − e^{iφ} other‖`.
    pub fn phase_distance(&self, other: &Self) -> Result<T> {
        let ov = self.inner(other)?;
        let d = self.norm_sqr() + other.norm_sqr() - T::lit(2.0) * ov.norm();
        Ok(d.max(T::zero()).sqrt())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch { expected: self.amps.len(), found: other.amps.len() });
        }
        Ok(())
    }

    /// Applies `u` to `targets`; `targets[0]` is the most significant qubit of `u`'s index.
    pub fn apply_gate(&self, u: &ComplexMatrix<T>, targets: &[usize]) -> Result<Self> {
        let k = targets.len();
        if k == 0 || u.dim() != 1 << k {
            return Err(Error::DimensionMismatch { expected: 1 << k, found: u.dim() });
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n_qubits {
                return Err(Error::QubitOutOfRange { index: t, n_qubits: self.n_qubits });
            }
            if targets[..i].contains(&t) {
                return Err(Error::DuplicateTarget(t));
            }
        }
        let n = self.n_qubits;
        let masks: Vec<usize> = targets.iter().map(|&t| 1 << (n - 1 - t)).collect();
        let target_mask: usize = masks.iter().sum();
        // offset of sub-index s within the full index
        let offsets: Vec<usize> =
            (0..1usize << k).map(|s| (0..k).filter(|&b| s >> (k - 1 - b) & 1 == 1).map(|b| masks[b]).sum()).collect();
        let mut out = vec![real(T::zero()); self.amps.len()];
        let mut gathered = vec![real(T::zero()); 1 << k];
        for base in (0..self.amps.len()).filter(|i| i & target_mask == 0) {
            for (s, off) in offsets.iter().enumerate() {
                gathered[s] = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = real(T::zero());
                for (c, g) in gathered.iter().enumerate() {
                    acc = acc + u[(r, c)] * *g;
                }
                out[base | off] = acc;
            }
        }
        Ok(StateVector { n_qubits: n, amps: out })
    }
}

/// `|⟨a|b⟩|²` for normalized states.
pub fn fidelity<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    Ok(a.inner(b)?.norm_sqr())
}

impl<T: Scalar + Serialize> Serialize for StateVector<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[T; 2]> = self.amps.iter().map(|z| [z.re, z.im]).collect();
        v.serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for StateVector<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<[T; 2]> = Vec::deserialize(d)?;
        StateVector::from_amplitudes(v.into_iter().map(|[re, im]| cx(re, im)).collect()).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::{kron, pauli};
    use proptest::prelude::*;

    type S = StateVector<f64>;
    type M = ComplexMatrix<f64>;

    /// Dense embedding of `u` on `targets` by explicit index bookkeeping over the
    /// full 2^n × 2^n matrix.
    fn dense_embedding(u: &M, targets: &[usize], n: usize) -> M {
        let dim = 1 << n;
        let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
        M::from_fn(dim, |r, c| {
            let others_equal = (0..n).filter(|q| !targets.contains(q)).all(|q| bit(r, q) == bit(c, q));
            if !others_equal {
                return real(0.0);
            }
            let sub = |i: usize| targets.iter().fold(0, |acc, &q| (acc << 1) | bit(i, q));
            u[(sub(r), sub(c))]
        })
    }

    fn random_unitary(seed: &[f64]) -> M {
        // exp(-iH) of H = A + A† is unitary
        let a = M::from_fn(4, |r, c| cx(seed[r * 4 + c], seed[c * 4 + r]));
        let h = &a + &a.adjoint();
        crate::algebra::exp_hermitian(&h, 1.0).unwrap()
    }

    #[test]
    fn identity_gate_keeps_state() {
        let s = S::basis(3, 0);
        assert_eq!(s.apply_gate(&M::identity(4), &[0, 1]).unwrap(), s);
    }

    #[test]
    fn x_on_first_qubit_flips_leading_bit() {
        let s = S::basis(2, 0);
        let x1 = kron(&pauli::<f64>(1), &M::identity(2));
        assert_eq!(s.apply_gate(&x1, &[0, 1]).unwrap(), S::basis(2, 0b10));
    }

    #[test]
    fn target_errors() {
        let s = S::basis(3, 0);
        assert_eq!(s.apply_gate(&M::identity(4), &[0, 3]), Err(Error::QubitOutOfRange { index: 3, n_qubits: 3 }));
        assert_eq!(s.apply_gate(&M::identity(4), &[1, 1]), Err(Error::DuplicateTarget(1)));
        assert!(s.apply_gate(&M::identity(2), &[0, 1]).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = S::basis(1, 0);
        let one = S::basis(1, 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = S::qubit(real(s), real(s)).unwrap();
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-15);
        assert!(fidelity(&zero, &S::basis(2, 0)).is_err());
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(S::qubit(real(1.0), real(1.0)), Err(Error::NotNormalized { .. })));
        assert!(S::from_amplitudes(vec![real(1.0); 3]).is_err());
    }

    proptest! {
        #[test]
        fn embedded_gate_matches_dense_oracle(
            re in proptest::collection::vec(-1.0f64..1.0, 8),
            im in proptest::collection::vec(-1.0f64..1.0, 8),
            seed in proptest::collection::vec(-2.0f64..2.0, 16),
            targets in prop_oneof![Just([0usize, 1]), Just([1, 0]), Just([0, 2]), Just([2, 1]), Just([1, 2])],
        ) {
            let amps: Vec<_> = re.iter().zip(&im).map(|(&a, &b)| cx(a, b)).collect();
            prop_assume!(amps.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
            let psi = S::normalized_from(amps).unwrap();
            let u = random_unitary(&seed);
            let fast = psi.apply_gate(&u, &targets).unwrap();
            let dense = dense_embedding(&u, &targets, 3);
            let slow: Vec<_> = (0..8)
                .map(|r| (0..8).fold(real(0.0), |acc, c| acc + dense[(r, c)] * psi.amplitudes()[c]))
                .collect();
            let slow = S::from_amplitudes_unchecked(slow).unwrap();
            prop_assert!(fast.distance(&slow).unwrap() < 1e-12);
            prop_assert!((fast.norm_sqr() - 1.0).abs() < 1e-13);
        }
    }
}
