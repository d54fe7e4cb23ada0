//! The six controlled gates `𝒜_{h,j}` in the Bell basis.
//!
//! Each gate leaves one block of the direction-`h` pattern at `I₂` and turns
//! the other into `σ₁`-like form (`[[0,1],[−1,0]]` for odd `h`, `iσ₁` for `h = 2`).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::algebra::ComplexMatrix;
use crate::error::{Error, Result};
use crate::evolution::{block_labels, block_pattern};
use crate::ising::Direction;
use crate::scalar::{from_gaussian, Scalar};
use crate::sign::Sign;

type G = Complex<i8>;

const O: G = G::new(0, 0);
const R: G = G::new(1, 0);
const N: G = G::new(-1, 0);
const I: G = G::new(0, 1);

/// Literal entries, indexed `[h − 1][j − 1]`.
const LIBRARY: [[[[G; 4]; 4]; 2]; 3] = [
    [
        [[O, R, O, O], [N, O, O, O], [O, O, R, O], [O, O, O, R]],
        [[R, O, O, O], [O, R, O, O], [O, O, O, R], [O, O, N, O]],
    ],
    [
        [[O, O, O, I], [O, R, O, O], [O, O, R, O], [I, O, O, O]],
        [[R, O, O, O], [O, O, I, O], [O, I, O, O], [O, O, O, R]],
    ],
    [
        [[R, O, O, O], [O, O, O, R], [O, O, R, O], [O, N, O, O]],
        [[O, O, R, O], [O, R, O, O], [N, O, O, O], [O, O, O, R]],
    ],
];

/// One of the six library gates `𝒜_{h,j}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTarget", into = "RawTarget")]
pub struct GateTarget {
    h: Direction,
    j: u8,
}

#[derive(Serialize, Deserialize)]
struct RawTarget {
    h: Direction,
    j: u8,
}

impl TryFrom<RawTarget> for GateTarget {
    type Error = Error;
    fn try_from(r: RawTarget) -> Result<Self> {
        GateTarget::new(r.h, r.j)
    }
}

impl From<GateTarget> for RawTarget {
    fn from(g: GateTarget) -> Self {
        RawTarget { h: g.h, j: g.j }
    }
}

impl GateTarget {
    pub fn new(h: Direction, j: u8) -> Result<Self> {
        if !(1..=2).contains(&j) {
            return Err(Error::InvalidBlock(j));
        }
        Ok(GateTarget { h, j })
    }

    pub fn all() -> impl Iterator<Item = GateTarget> {
        Direction::ALL.into_iter().flat_map(|h| [1, 2].map(|j| GateTarget { h, j }))
    }

    pub fn h(&self) -> Direction {
        self.h
    }

    pub fn j(&self) -> u8 {
        self.j
    }

    /// Exact entries as Gaussian integers.
    pub fn gaussian(&self) -> [[G; 4]; 4] {
        LIBRARY[self.h.axis()][self.j as usize - 1]
    }

    pub fn matrix<T: Scalar>(&self) -> ComplexMatrix<T> {
        let g = self.gaussian();
        ComplexMatrix::from_fn(4, |r, c| from_gaussian(g[r][c]))
    }

    /// Block label (1 or 2, in row order of the pattern) of the block that
    /// the gate antidiagonalizes; read off the literal matrix.
    pub fn antidiagonal_block(&self) -> u8 {
        let g = self.gaussian();
        let pos = block_pattern(self.h).iter().position(|&(k, _)| g[k - 1][k - 1] == O);
        pos.expect("every library gate has one antidiagonal block") as u8 + 1
    }

    pub fn diagonal_block(&self) -> u8 {
        3 - self.antidiagonal_block()
    }

    /// 1-based Bell rows of the block driven to `I₂`.
    pub fn diagonal_rows(&self) -> (usize, usize) {
        block_pattern(self.h)[self.diagonal_block() as usize - 1]
    }

    pub fn antidiagonal_rows(&self) -> (usize, usize) {
        block_pattern(self.h)[self.antidiagonal_block() as usize - 1]
    }

    /// `α` of the identity block; the antidiagonal block carries `−α`.
    pub fn alpha_diag(&self) -> Sign {
        let (alpha, _, _) = block_labels(self.h, self.diagonal_block()).expect("valid block label");
        alpha
    }
}

impl std::fmt::Display for GateTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "A_{},{}", self.h, self.j)
    }
}

pub fn gate_library(h: u8, j: u8) -> Result<GateTarget> {
    GateTarget::new(Direction::new(h)?, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::off_pattern_weight;
    use crate::scalar::cx;

    #[test]
    fn a12_rows() {
        let m = gate_library(1, 2).unwrap().matrix::<f64>();
        assert_eq!(
            m,
            ComplexMatrix::from_real_rows([
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0, 0.0],
            ])
        );
        let g = gate_library(1, 2).unwrap();
        assert_eq!(g.antidiagonal_rows(), (3, 4));
        assert_eq!(m.principal_block(0, 1), ComplexMatrix::identity(2));
    }

    #[test]
    fn a21_corners() {
        let m = gate_library(2, 1).unwrap().matrix::<f64>();
        assert_eq!(m[(0, 3)], cx(0.0, 1.0));
        assert_eq!(m[(3, 0)], cx(0.0, 1.0));
        assert_eq!(m[(1, 1)], cx(1.0, 0.0));
    }

    #[test]
    fn invalid_indices() {
        assert_eq!(gate_library(1, 3), Err(Error::InvalidBlock(3)));
        assert_eq!(gate_library(0, 1), Err(Error::InvalidDirection(0)));
        assert!(serde_json::from_str::<GateTarget>(r#"{"h":2,"j":0}"#).is_err());
    }

    #[test]
    fn library_is_unitary_and_patterned() {
        for g in GateTarget::all() {
            let m = g.matrix::<f64>();
            assert_eq!(m.unitarity_defect(), 0.0, "{g}");
            assert_eq!(off_pattern_weight(&m, g.h()), 0.0, "{g}");
            assert_eq!(m.principal_block(g.diagonal_rows().0 - 1, g.diagonal_rows().1 - 1), ComplexMatrix::identity(2));
        }
    }

    #[test]
    fn third_direction_labels_are_swapped() {
        assert_eq!(gate_library(3, 1).unwrap().antidiagonal_block(), 2);
        assert_eq!(gate_library(3, 2).unwrap().antidiagonal_block(), 1);
        for h in [1, 2] {
            for j in [1, 2] {
                assert_eq!(gate_library(h, j).unwrap().antidiagonal_block(), j);
            }
        }
    }

    #[test]
    fn json_form() {
        let g = gate_library(2, 2).unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"h":2,"j":2}"#);
    }
}
