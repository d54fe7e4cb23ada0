//! Dense complex linear algebra, Bell-basis conversions and the exponential oracle.

mod bell;
mod expm;
mod matrix;
mod state;

pub use bell::{bell_change_of_basis, conjugate_from_bell, conjugate_to_bell, BasisConvention, BellLabel};
pub use expm::{exp_hermitian, hermitian_eigen, HermitianEigen};
pub use matrix::{global_phase_distance, hadamard, kron, pauli, ComplexMatrix};
pub use state::{fidelity, StateVector, MAX_QUBITS};

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type M = ComplexMatrix<f64>;

    fn unitary(seed: &[f64]) -> M {
        let a = M::from_fn(4, |r, c| crate::scalar::cx(seed[r * 4 + c], seed[(c * 4 + r + 5) % 16]));
        exp_hermitian(&(&a + &a.adjoint()), 1.0).unwrap()
    }

    proptest! {
        #[test]
        fn phase_distance_is_a_pseudometric(
            a in proptest::collection::vec(-2.0f64..2.0, 16),
            b in proptest::collection::vec(-2.0f64..2.0, 16),
            c in proptest::collection::vec(-2.0f64..2.0, 16),
            phi in -3.2f64..3.2,
        ) {
            let (u, v, w) = (unitary(&a), unitary(&b), unitary(&c));
            let d = |x: &M, y: &M| global_phase_distance(x, y).unwrap();
            prop_assert!((d(&u, &v) - d(&v, &u)).abs() < 1e-12);
            prop_assert!(d(&u, &u.scale(crate::scalar::cis(phi))) < 1e-12);
            prop_assert!(d(&u, &w) <= d(&u, &v) + d(&v, &w) + 1e-10);
        }
    }
}
