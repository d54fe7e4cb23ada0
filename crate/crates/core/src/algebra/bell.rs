use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};
use crate::sign::Sign;

/// Bell-state label `β_{AB}` with `A, B ∈ {0, 1}` (equivalently `β_{−−} … β_{++}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u8; 2]", into = "[u8; 2]")]
pub struct BellLabel {
    a: u8,
    b: u8,
}

impl BellLabel {
    pub const PHI_PLUS: BellLabel = BellLabel { a: 0, b: 0 };

    /// The fixed ordering `−−, −+, +−, ++` (= `00, 01, 10, 11`).
    pub const ORDER: [BellLabel; 4] =
        [BellLabel { a: 0, b: 0 }, BellLabel { a: 0, b: 1 }, BellLabel { a: 1, b: 0 }, BellLabel { a: 1, b: 1 }];

    pub fn new(a: u8, b: u8) -> Result<Self> {
        for bit in [a, b] {
            if bit > 1 {
                return Err(Error::InvalidBit(bit));
            }
        }
        Ok(BellLabel { a, b })
    }

    pub fn from_signs(first: Sign, second: Sign) -> Self {
        BellLabel { a: first.bit(), b: second.bit() }
    }

    pub fn from_index(index: usize) -> Self {
        Self::ORDER[index]
    }

    pub fn a(self) -> u8 {
        self.a
    }

    pub fn b(self) -> u8 {
        self.b
    }

    /// Position in the Bell ordering (0-based).
    pub fn index(self) -> usize {
        (2 * self.a + self.b) as usize
    }

    pub fn signs(self) -> (Sign, Sign) {
        (Sign::from_bit(self.a), Sign::from_bit(self.b))
    }

    /// The Bell state in the computational basis `|00⟩,|01⟩,|10⟩,|11⟩`.
    pub fn state<T: Scalar>(self) -> StateVector<T> {
        let p = bell_change_of_basis::<T>();
        let amps = (0..4).map(|r| p[(r, self.index())]).collect();
        StateVector::from_amplitudes(amps).expect("Bell states are normalized")
    }
}

impl TryFrom<[u8; 2]> for BellLabel {
    type Error = Error;
    fn try_from([a, b]: [u8; 2]) -> Result<Self> {
        BellLabel::new(a, b)
    }
}

impl From<BellLabel> for [u8; 2] {
    fn from(l: BellLabel) -> [u8; 2] {
        [l.a, l.b]
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s1, s2) = self.signs();
        write!(f, "β{}{}", s1, s2)
    }
}

/// Computational-basis expansion of the four Bell states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisConvention {
    pub ordering: [BellLabel; 4],
    /// `signmap[k]` holds √2 × the computational amplitudes of `ordering[k]`.
    pub signmap: [[i8; 4]; 4],
}

impl Default for BasisConvention {
    fn default() -> Self {
        // β_xy = (|0y⟩ + (−1)^x |1ȳ⟩)/√2
        BasisConvention {
            ordering: BellLabel::ORDER,
            signmap: [[1, 0, 0, 1], [0, 1, 1, 0], [1, 0, 0, -1], [0, 1, -1, 0]],
        }
    }
}

impl BasisConvention {
    /// Matrix whose columns are the Bell states in the fixed ordering.
    pub fn change_of_basis<T: Scalar>(&self) -> ComplexMatrix<T> {
        let s = T::FRAC_1_SQRT_2();
        ComplexMatrix::from_fn(4, |r, c| real(T::lit(self.signmap[c][r] as f64) * s))
    }
}

/// Unitary `P` with the Bell states (ordering `−−, −+, +−, ++`) as columns.
pub fn bell_change_of_basis<T: Scalar>() -> ComplexMatrix<T> {
    BasisConvention::default().change_of_basis()
}

/// `P† U P`: computational-basis operator expressed in the Bell basis.
pub fn conjugate_to_bell<T: Scalar>(u: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    check_two_qubit(u)?;
    let p = bell_change_of_basis::<T>();
    Ok(&(&p.adjoint() * u) * &p)
}

/// `P U P†`: Bell-basis operator expressed in the computational basis.
pub fn conjugate_from_bell<T: Scalar>(u: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    check_two_qubit(u)?;
    let p = bell_change_of_basis::<T>();
    Ok(&(&p * u) * &p.adjoint())
}

fn check_two_qubit<T: Scalar>(u: &ComplexMatrix<T>) -> Result<()> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: u.dim() });
    }
    Ok(())
}
