//! Closed-form Bell-basis evolution operators `U_h(t)` and their 2×2 blocks.
//!
//! In the Bell ordering `β−−, β−+, β+−, β++` each `U_h(t)` splits into two
//! independent 2×2 unitary blocks on a fixed pair of Bell states. The entries
//! are transcribed cell by cell in [`TEMPLATES`]; every cell is
//! `e^{iΔ_{hα}^+}` times one of `e*`, `e` or a unit multiple of `d`.

use serde::{Deserialize, Serialize};

use crate::algebra::{conjugate_to_bell, exp_hermitian, ComplexMatrix};
use crate::error::{Error, Result};
use crate::ising::{hamiltonian_matrix, reduced_quantities, CouplingConfig, Direction, ReducedQuantities};
use crate::scalar::{cis, cx, real, Cx, Scalar};
use crate::sign::Sign;
use crate::tolerance;

/// The closed forms equal `exp(+iHt)`; the oracle `exp_hermitian` computes
/// `exp(−iHt)`, so it is evaluated at `CLOSED_FORM_TIME_SIGN · t`.
pub const CLOSED_FORM_TIME_SIGN: i8 = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Term {
    /// `e_{hα}^β *`
    EConj(Sign),
    /// `e_{hα}^β`
    E(Sign),
    /// `(re + i·im) · d_{hα}`
    D(i8, i8),
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    row: usize,
    col: usize,
    alpha: Sign,
    term: Term,
}

const fn cell(row: usize, col: usize, alpha: Sign, term: Term) -> Cell {
    Cell { row, col, alpha, term }
}

use Sign::{Minus as M, Plus as P};

/// Nonzero cells of `U_1`, `U_2`, `U_3` (0-based Bell indices).
const TEMPLATES: [[Cell; 8]; 3] = [
    [
        cell(0, 0, M, Term::EConj(M)),
        cell(0, 1, M, Term::D(0, 1)),
        cell(1, 0, M, Term::D(0, 1)),
        cell(1, 1, M, Term::E(M)),
        cell(2, 2, P, Term::EConj(P)),
        cell(2, 3, P, Term::D(0, -1)),
        cell(3, 2, P, Term::D(0, -1)),
        cell(3, 3, P, Term::E(P)),
    ],
    [
        cell(0, 0, P, Term::EConj(P)),
        cell(0, 3, P, Term::D(-1, 0)),
        cell(3, 0, P, Term::D(1, 0)),
        cell(3, 3, P, Term::E(P)),
        cell(1, 1, M, Term::EConj(P)),
        cell(1, 2, M, Term::D(-1, 0)),
        cell(2, 1, M, Term::D(1, 0)),
        cell(2, 2, M, Term::E(P)),
    ],
    [
        cell(0, 0, M, Term::EConj(P)),
        cell(0, 2, M, Term::D(0, 1)),
        cell(2, 0, M, Term::D(0, 1)),
        cell(2, 2, M, Term::E(P)),
        cell(1, 1, P, Term::EConj(P)),
        cell(1, 3, P, Term::D(0, 1)),
        cell(3, 1, P, Term::D(0, 1)),
        cell(3, 3, P, Term::E(P)),
    ],
];

/// Bell-index pairs `(k_j, l_j)` (1-based) of the two blocks of `U_h`.
pub fn block_pattern(h: Direction) -> [(usize, usize); 2] {
    match h {
        Direction::X => [(1, 2), (3, 4)],
        Direction::Y => [(1, 4), (2, 3)],
        Direction::Z => [(1, 3), (2, 4)],
    }
}

fn in_pattern(h: Direction, r: usize, c: usize) -> bool {
    block_pattern(h).iter().any(|&(k, l)| {
        let (k, l) = (k - 1, l - 1);
        (r == k || r == l) && (c == k || c == l)
    })
}

/// Sum of squared moduli of entries outside the block pattern, square-rooted.
pub fn off_pattern_weight<T: Scalar>(m: &ComplexMatrix<T>, h: Direction) -> T {
    let mut acc = T::zero();
    for r in 0..4 {
        for c in 0..4 {
            if !in_pattern(h, r, c) {
                acc = acc + m[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Block sign labels `α = (−1)^{h+j+1}`, `β = (−1)^{j(h+l_j−k_j+1)}`, `q = β(−1)^{h+1}`.
pub fn block_labels(h: Direction, j: u8) -> Result<(Sign, Sign, Sign)> {
    if !(1..=2).contains(&j) {
        return Err(Error::InvalidBlock(j));
    }
    let (k, l) = block_pattern(h)[j as usize - 1];
    let hn = h.number() as i64;
    let jn = j as i64;
    let alpha = Sign::parity(hn + jn + 1);
    let beta = Sign::parity(jn * (hn + l as i64 - k as i64 + 1));
    let q = beta * Sign::parity(hn + 1);
    Ok((alpha, beta, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Oracle,
    Product,
}

/// A 4×4 Bell-basis evolution operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct EvolutionOperator<T> {
    pub h: Direction,
    pub matrix: ComplexMatrix<T>,
    pub provenance: Provenance,
    pub t: T,
}

impl<T: Scalar> EvolutionOperator<T> {
    /// `self · earlier`: evolve by `earlier` first, then by `self`.
    pub fn after(&self, earlier: &Self) -> Result<Self> {
        if self.h != earlier.h {
            return Err(Error::DirectionMismatch(self.h.number(), earlier.h.number()));
        }
        Ok(EvolutionOperator {
            h: self.h,
            matrix: &self.matrix * &earlier.matrix,
            provenance: Provenance::Product,
            t: self.t + earlier.t,
        })
    }
}

fn cell_value<T: Scalar>(c: &Cell, rq: &ReducedQuantities<T>) -> Cx<T> {
    let phase = cis(rq.delta_plus(c.alpha));
    let body = match c.term {
        Term::EConj(beta) => rq.e(c.alpha, beta).conj(),
        Term::E(beta) => rq.e(c.alpha, beta),
        Term::D(re, im) => cx(T::lit(re as f64), T::lit(im as f64)).scale(rq.d(c.alpha)),
    };
    phase * body
}

/// `U_h(t)` assembled from the reduced quantities.
pub fn evolution_closed_form<T: Scalar>(cfg: &CouplingConfig<T>, t: T) -> Result<EvolutionOperator<T>> {
    let rq = reduced_quantities(cfg, t)?;
    let mut m = ComplexMatrix::zeros(4);
    for c in &TEMPLATES[cfg.h.axis()] {
        m[(c.row, c.col)] = cell_value(c, &rq);
    }
    Ok(EvolutionOperator { h: cfg.h, matrix: m, provenance: Provenance::ClosedForm, t })
}

/// Bell-basis propagator from the dense exponential of the Hamiltonian.
pub fn evolution_oracle<T: Scalar>(cfg: &CouplingConfig<T>, t: T) -> Result<EvolutionOperator<T>> {
    let h = hamiltonian_matrix(cfg)?;
    let signed_t = if CLOSED_FORM_TIME_SIGN < 0 { -t } else { t };
    let m = conjugate_to_bell(&exp_hermitian(&h, signed_t)?)?;
    Ok(EvolutionOperator { h: cfg.h, matrix: m, provenance: Provenance::Oracle, t })
}

/// One 2×2 block `s_{h,j}` with its labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct BlockPair<T> {
    pub j: u8,
    /// `(k_j, l_j)`, 1-based Bell indices.
    pub rows: (usize, usize),
    pub alpha: Sign,
    pub beta: Sign,
    pub q: Sign,
    pub block: ComplexMatrix<T>,
}

impl<T: Scalar> BlockPair<T> {
    pub fn det(&self) -> Cx<T> {
        let b = &self.block;
        b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)]
    }
}

/// Splits a Bell-basis operator into its two blocks.
pub fn extract_blocks<T: Scalar>(u: &EvolutionOperator<T>) -> Result<(BlockPair<T>, BlockPair<T>)> {
    extract_blocks_of(&u.matrix, u.h)
}

pub fn extract_blocks_of<T: Scalar>(m: &ComplexMatrix<T>, h: Direction) -> Result<(BlockPair<T>, BlockPair<T>)> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: m.dim() });
    }
    let weight = off_pattern_weight(m, h);
    if weight >= T::lit(tolerance::STRUCTURAL_ZERO) {
        return Err(Error::PatternViolation { direction: h.number(), weight: weight.to_f64_lossy() });
    }
    let make = |j: u8| -> Result<BlockPair<T>> {
        let (k, l) = block_pattern(h)[j as usize - 1];
        let (alpha, beta, q) = block_labels(h, j)?;
        Ok(BlockPair { j, rows: (k, l), alpha, beta, q, block: m.principal_block(k - 1, l - 1) })
    };
    Ok((make(1)?, make(2)?))
}

/// `e^{iΔ_{hα}^+} [[e*, −q i^h d], [q (−i)^h d, e]]` evaluated from the block
/// labels; a second route to the same blocks the templates produce.
pub fn general_block<T: Scalar>(h: Direction, j: u8, rq: &ReducedQuantities<T>) -> Result<ComplexMatrix<T>> {
    let (alpha, beta, q) = block_labels(h, j)?;
    let phase = cis(rq.delta_plus(alpha));
    let e = rq.e(alpha, beta);
    let d = rq.d(alpha);
    let qv = T::lit(q.value() as f64);
    let ipow = |base: Cx<T>| (0..h.number()).fold(real(T::one()), |acc, _| acc * base);
    let upper = ipow(cx(T::zero(), T::one())).scale(-qv * d);
    let lower = ipow(cx(T::zero(), -T::one())).scale(qv * d);
    Ok(ComplexMatrix::from_rows([[e.conj(), upper], [lower, e]]).scale(phase))
}

/// Shape test for one block: after removing `sqrt(det)` the diagonal must be
/// a conjugate pair and the off-diagonal must be `(iκ, iκ)` for odd `h`, or
/// `(κ, −κ)` for `h = 2`, with `κ` real.
fn block_has_shape<T: Scalar>(b: &ComplexMatrix<T>, h: Direction, tol: T) -> bool {
    let det = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)];
    if (det.norm() - T::one()).abs() > tol {
        return false;
    }
    let half_phase = cis(-det.arg() / T::lit(2.0));
    let n = b.scale(half_phase);
    if (n[(1, 1)] - n[(0, 0)].conj()).norm() > tol {
        return false;
    }
    let (upper, lower) = (n[(0, 1)], n[(1, 0)]);
    match h {
        Direction::Y => (upper + lower).norm() <= tol && upper.im.abs() <= tol,
        _ => (upper - lower).norm() <= tol && upper.re.abs() <= tol,
    }
}

/// Membership in the block subgroup of direction `h`: zero pattern plus block shape.
pub fn in_subgroup<T: Scalar>(m: &ComplexMatrix<T>, h: Direction, tol: T) -> bool {
    if m.dim() != 4 || off_pattern_weight(m, h) > tol {
        return false;
    }
    block_pattern(h).iter().all(|&(k, l)| block_has_shape(&m.principal_block(k - 1, l - 1), h, tol))
}

/// Whether `U·V` stays in the block subgroup of their common direction.
pub fn subgroup_closure_check<T: Scalar>(u: &EvolutionOperator<T>, v: &EvolutionOperator<T>) -> Result<bool> {
    let product = u.after(v)?;
    Ok(in_subgroup(&product.matrix, u.h, T::lit(tolerance::STRUCTURAL_ZERO)))
}
