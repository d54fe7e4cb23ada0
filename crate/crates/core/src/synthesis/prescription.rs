//! Closed-form prescriptions for the two-pulse construction and the phase
//! condition linking the block exponents.

use serde::{Deserialize, Serialize};

use crate::algebra::ComplexMatrix;
use crate::ising::Direction;
use crate::scalar::{cx, real, Scalar};
use crate::sign::Sign;

/// Why a candidate was discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    /// `m_α + n_α = 0` in the denominators of `A`, `B`.
    ZeroDivision,
    /// `B² = 1`.
    Singular,
    /// `A² + B² < 1` or no strictly positive root.
    NoRealXi,
    /// Vanishing denominator in the `χ²` formula.
    ZeroChiDenominator,
    NegativeChi2,
    PhaseConditionFailed,
    VerifyFailed,
}

/// `|B² − 1|` below this counts as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// `|ξ| = (−AB ± √(A²+B²−1)) / (B²−1)`, keeping strictly positive roots,
/// each expanded to `±|ξ|`. Positive values come first.
pub fn candidate_xi<T: Scalar>(a: T, b: T) -> Result<Vec<T>, Rejection> {
    let denom = b * b - T::one();
    if denom.abs() < T::lit(SINGULAR_THRESHOLD) {
        return Err(Rejection::Singular);
    }
    let disc = a * a + b * b - T::one();
    if disc < T::zero() {
        return Err(Rejection::NoRealXi);
    }
    let root = disc.sqrt();
    let mut mags: Vec<T> = [-a * b + root, -a * b - root]
        .into_iter()
        .map(|num| num / denom)
        .filter(|&x| x > T::zero() && x.is_finite())
        .collect();
    mags.dedup();
    if mags.is_empty() {
        return Err(Rejection::NoRealXi);
    }
    Ok(mags.iter().copied().chain(mags.iter().map(|&x| -x)).collect())
}

/// Integer labels of a prescription candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PulseIntegers {
    /// `n_{−α}`
    pub n_anti: i32,
    /// `n'_{−α}`
    pub n_anti_prime: i32,
    /// `m_α + n_α`
    pub m_plus_n: i32,
    /// `n_α`
    pub n_diag: i32,
    /// `m_α`
    pub m_diag: i32,
    /// `2 s_{−α}` implied by the phase condition.
    pub s_twice: i32,
}

/// `χ² = (2n_α √(ξ²+1) / (S(2n+1) + P S'(2n'+1)|ξ|))² − 1`, or `None` when
/// the denominator vanishes.
pub fn chi_squared<T: Scalar>(
    abs_xi: T,
    n_diag: i32,
    n_anti: i32,
    n_anti_prime: i32,
    s: T,
    sp: T,
    p: Sign,
) -> Option<T> {
    let odd = |n: i32| T::lit((2 * n + 1) as f64);
    let pv = T::lit(p.value() as f64);
    let den = s * odd(n_anti) + pv * sp * odd(n_anti_prime) * abs_xi;
    if den == T::zero() {
        return None;
    }
    let ratio = T::lit(2.0 * n_diag as f64) * (abs_xi * abs_xi + T::one()).sqrt() / den;
    Some(ratio * ratio - T::one())
}

/// `±√χ²` (a single value when `χ = 0`).
pub fn candidate_chi<T: Scalar>(
    abs_xi: T,
    n_diag: i32,
    n_anti: i32,
    n_anti_prime: i32,
    s: T,
    sp: T,
    p: Sign,
) -> Result<Vec<T>, Rejection> {
    let chi2 = chi_squared(abs_xi, n_diag, n_anti, n_anti_prime, s, sp, p).ok_or(Rejection::ZeroChiDenominator)?;
    if chi2 < T::zero() {
        return Err(Rejection::NegativeChi2);
    }
    let chi = chi2.sqrt();
    Ok(if chi == T::zero() { vec![chi] } else { vec![chi, -chi] })
}

/// `sign(qβ b'_{hα} j_{hα})` with `qβ = (−1)^{h+1}`, `sign b'_{hα} = sign(−J'_{{h}−α}/ξ)`
/// and `sign j_{hα} = sign J_{{h}−α}`.
pub fn phase_sign_term<T: Scalar>(h: Direction, j_minus: T, j_minus_prime: T, xi_sign: Sign) -> Sign {
    let qb = Sign::parity(h.number() as i64 + 1);
    let b_prime = -Sign::of(j_minus_prime.to_f64_lossy()) * xi_sign;
    qb * b_prime * Sign::of(j_minus.to_f64_lossy())
}

/// `2 s_{−α}` solving `2(m_α+n_α) = −(h + sign + 2(n_{−α} + n'_{−α} − s_{−α} + 1))`.
pub fn implied_s_twice(h: Direction, m_plus_n: i32, n_anti: i32, n_anti_prime: i32, sign_term: Sign) -> i32 {
    2 * m_plus_n + h.number() as i32 + sign_term.value() as i32 + 2 * (n_anti + n_anti_prime + 1)
}

/// The phase condition, verbatim, for a given `2 s_{−α}`.
pub fn phase_condition(
    h: Direction,
    m_plus_n: i32,
    n_anti: i32,
    n_anti_prime: i32,
    s_twice: i32,
    sign_term: Sign,
) -> bool {
    2 * m_plus_n == -(h.number() as i32 + sign_term.value() as i32 + 2 * (n_anti + n_anti_prime + 1) - s_twice)
}

/// `2s mod 4` that turns the antidiagonal block into the library form:
/// `s` even for odd `h`, `s ≡ 1/2 (mod 2)` for `h = 2`.
pub fn required_s_twice_residue(h: Direction) -> i32 {
    if h == Direction::Y {
        1
    } else {
        0
    }
}

/// Whether `s` is forced to a half-integer for this direction.
pub fn s_is_semi_integer(h: Direction) -> bool {
    required_s_twice_residue(h) % 2 == 1
}

/// Combined diagonal block `(−1)^{m_α} I₂`.
pub fn predicted_diagonal<T: Scalar>(m_diag: i32) -> ComplexMatrix<T> {
    let s = T::lit(Sign::parity(m_diag as i64).value() as f64);
    ComplexMatrix::identity(2).scale(real(s))
}

/// Combined antidiagonal block `(−1)^s [[0, 1], [(−1)^h, 0]]` with `(−1)^s = i^{2s}`.
pub fn predicted_antidiagonal<T: Scalar>(h: Direction, s_twice: i32) -> ComplexMatrix<T> {
    let phase = match s_twice.rem_euclid(4) {
        0 => cx(T::one(), T::zero()),
        1 => cx(T::zero(), T::one()),
        2 => cx(-T::one(), T::zero()),
        _ => cx(T::zero(), -T::one()),
    };
    let lower = T::lit(Sign::parity(h.number() as i64).value() as f64);
    let z = real(T::zero());
    ComplexMatrix::from_rows([[z, real(T::one())], [real(lower), z]]).scale(phase)
}
