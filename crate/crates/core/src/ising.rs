//! The driven anisotropic Ising Hamiltonian and its scalar invariants.
//!
//! `H_h = −Σ_k J_k σ1_k σ2_k + B1_h σ1_h + B2_h σ2_h`, with the local fields
//! restricted to a single direction `h`. For that direction the couplings of
//! the two remaining axes `(i, j)` enter only through `J_i ± J_j`, and the
//! fields only through `B1_h ± B2_h`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{kron, pauli, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{cx, real, Cx, Scalar};
use crate::sign::Sign;

/// Field direction `h`: 1, 2, 3 for x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Direction {
    X,
    Y,
    Z,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::X, Direction::Y, Direction::Z];

    pub fn new(h: u8) -> Result<Self> {
        match h {
            1 => Ok(Direction::X),
            2 => Ok(Direction::Y),
            3 => Ok(Direction::Z),
            other => Err(Error::InvalidDirection(other)),
        }
    }

    /// 1, 2 or 3.
    pub fn number(self) -> u8 {
        match self {
            Direction::X => 1,
            Direction::Y => 2,
            Direction::Z => 3,
        }
    }

    /// 0-based axis index.
    pub fn axis(self) -> usize {
        self.number() as usize - 1
    }

    /// Axes `(i, j)` whose couplings combine into `J_{{h}±} = J_i ± J_j`.
    ///
    /// Always the two remaining axes in ascending order; for `h = 2` this is
    /// `(1, 3)`, the pairing under which the closed-form operators match the
    /// exact propagator.
    pub fn complementary_axes(self) -> (usize, usize) {
        match self {
            Direction::X => (1, 2),
            Direction::Y => (0, 2),
            Direction::Z => (0, 1),
        }
    }
}

impl TryFrom<u8> for Direction {
    type Error = Error;
    fn try_from(h: u8) -> Result<Self> {
        Direction::new(h)
    }
}

impl From<Direction> for u8 {
    fn from(d: Direction) -> u8 {
        d.number()
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Couplings and local fields of one constant-field stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig<T> {
    #[serde(rename = "J")]
    pub couplings: [T; 3],
    #[serde(rename = "B1")]
    pub field1: [T; 3],
    #[serde(rename = "B2")]
    pub field2: [T; 3],
    pub h: Direction,
}

impl<T: Scalar> CouplingConfig<T> {
    pub fn new(couplings: [T; 3], field1: [T; 3], field2: [T; 3], h: Direction) -> Result<Self> {
        let cfg = CouplingConfig { couplings, field1, field2, h };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fields given only by their `h` components.
    pub fn along(h: Direction, couplings: [T; 3], b1: T, b2: T) -> Result<Self> {
        let mut field1 = [T::zero(); 3];
        let mut field2 = [T::zero(); 3];
        field1[h.axis()] = b1;
        field2[h.axis()] = b2;
        Self::new(couplings, field1, field2, h)
    }

    /// Rebuilds the local fields from `B_{h+}` and `B_{h−}`.
    pub fn from_field_sums(h: Direction, couplings: [T; 3], b_sum: T, b_diff: T) -> Result<Self> {
        let half = T::lit(0.5);
        Self::along(h, couplings, half * (b_sum + b_diff), half * (b_sum - b_diff))
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.couplings.iter().chain(&self.field1).chain(&self.field2);
        if all.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("coupling configuration"));
        }
        for k in (0..3).filter(|&k| k != self.h.axis()) {
            if self.field1[k] != T::zero() || self.field2[k] != T::zero() {
                return Err(Error::FieldOffDirection { component: k + 1, direction: self.h.number() });
            }
        }
        Ok(())
    }

    /// `J_h`.
    pub fn coupling_along(&self) -> T {
        self.couplings[self.h.axis()]
    }

    /// `J_{{h}±} = J_i ± J_j`.
    pub fn coupling_pair(&self, sign: Sign) -> T {
        let (i, j) = self.h.complementary_axes();
        match sign {
            Sign::Plus => self.couplings[i] + self.couplings[j],
            Sign::Minus => self.couplings[i] - self.couplings[j],
        }
    }

    /// `B_{h±} = B1_h ± B2_h`.
    pub fn field_pair(&self, sign: Sign) -> T {
        let k = self.h.axis();
        match sign {
            Sign::Plus => self.field1[k] + self.field2[k],
            Sign::Minus => self.field1[k] - self.field2[k],
        }
    }

    /// Random configuration with every coupling and both field components in `[lo, hi)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, h: Direction, lo: f64, hi: f64) -> Self {
        let mut draw = || T::lit(rng.gen_range(lo..hi));
        let couplings = [draw(), draw(), draw()];
        let (b1, b2) = (draw(), draw());
        Self::along(h, couplings, b1, b2).expect("finite random configuration")
    }

    /// The same system with qubits 1 and 2 exchanged.
    pub fn swapped(&self) -> Self {
        CouplingConfig { field1: self.field2, field2: self.field1, ..self.clone() }
    }
}

/// `H_h` in the computational basis `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn hamiltonian_matrix<T: Scalar>(cfg: &CouplingConfig<T>) -> Result<ComplexMatrix<T>> {
    cfg.validate()?;
    let id = ComplexMatrix::<T>::identity(2);
    let mut h = ComplexMatrix::zeros(4);
    for k in 0..3 {
        let s = pauli::<T>(k + 1);
        h = &h - &kron(&s, &s).scale(real(cfg.couplings[k]));
    }
    let s = pauli::<T>(cfg.h.number() as usize);
    let k = cfg.h.axis();
    h = &h + &kron(&s, &id).scale(real(cfg.field1[k]));
    h = &h + &kron(&id, &s).scale(real(cfg.field2[k]));
    Ok(h)
}

/// Normalized field/coupling pair of one sign branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaledPair<T> {
    Defined {
        b: T,
        j: T,
    },
    /// `R = 0`: both `b` and `j` are 0/0.
    Undefined,
}

/// `b_{h±} = B_{h±}/R_{h±}`, `j_{h±} = J_{{h}∓}/R_{h±}`, `R_{h±} = sqrt(B_{h±}² + J_{{h}∓}²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledParams<T> {
    /// Indexed by [`Sign::index`].
    pub pairs: [ScaledPair<T>; 2],
    pub radius: [T; 2],
    pub coupling_sum: T,
    pub coupling_diff: T,
    pub field_sum: T,
    pub field_diff: T,
    pub coupling_along: T,
}

impl<T: Scalar> ScaledParams<T> {
    pub fn b(&self, sign: Sign) -> Option<T> {
        match self.pairs[sign.index()] {
            ScaledPair::Defined { b, .. } => Some(b),
            ScaledPair::Undefined => None,
        }
    }

    pub fn j(&self, sign: Sign) -> Option<T> {
        match self.pairs[sign.index()] {
            ScaledPair::Defined { j, .. } => Some(j),
            ScaledPair::Undefined => None,
        }
    }

    pub fn r(&self, sign: Sign) -> T {
        self.radius[sign.index()]
    }
}

pub fn scaled_params<T: Scalar>(cfg: &CouplingConfig<T>) -> Result<ScaledParams<T>> {
    cfg.validate()?;
    let mut pairs = [ScaledPair::Undefined; 2];
    let mut radius = [T::zero(); 2];
    for s in Sign::BOTH {
        let field = cfg.field_pair(s);
        let coupling = cfg.coupling_pair(-s);
        let r = field.hypot(coupling);
        radius[s.index()] = r;
        if r > T::zero() {
            pairs[s.index()] = ScaledPair::Defined { b: field / r, j: coupling / r };
        }
    }
    Ok(ScaledParams {
        pairs,
        radius,
        coupling_sum: cfg.coupling_pair(Sign::Plus),
        coupling_diff: cfg.coupling_pair(Sign::Minus),
        field_sum: cfg.field_pair(Sign::Plus),
        field_diff: cfg.field_pair(Sign::Minus),
        coupling_along: cfg.coupling_along(),
    })
}

/// Labels of the four energies in their fixed order `−−, −+, +−, ++`.
pub const ENERGY_ORDER: [(Sign, Sign); 4] =
    [(Sign::Minus, Sign::Minus), (Sign::Minus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Plus, Sign::Plus)];

/// `E_{μν} = μ J_h + ν R_{h,−μ}` in the order of [`ENERGY_ORDER`].
pub fn eigenvalues<T: Scalar>(cfg: &CouplingConfig<T>) -> Result<[T; 4]> {
    let sp = scaled_params(cfg)?;
    let jh = cfg.coupling_along();
    let signed = |s: Sign, x: T| if s == Sign::Plus { x } else { -x };
    Ok(ENERGY_ORDER.map(|(mu, nu)| signed(mu, jh) + signed(nu, sp.r(-mu))))
}

/// Phases and block entries that parametrize the closed-form evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedQuantities<T> {
    /// `Δ_{hμ}^+ = μ J_h t`, indexed by μ.
    pub delta_plus: [T; 2],
    /// `Δ_{hμ}^− = R_{h,−μ} t`, indexed by μ.
    pub delta_minus: [T; 2],
    /// `e_{hα}^β = cos Δ_{hα}^− + iβ j_{h,−α} sin Δ_{hα}^−`, indexed `[α][β]`.
    pub e: [[Cx<T>; 2]; 2],
    /// `d_{hα} = b_{h,−α} sin Δ_{hα}^−`, indexed by α.
    pub d: [T; 2],
}

impl<T: Scalar> ReducedQuantities<T> {
    pub fn delta_plus(&self, mu: Sign) -> T {
        self.delta_plus[mu.index()]
    }

    pub fn delta_minus(&self, mu: Sign) -> T {
        self.delta_minus[mu.index()]
    }

    pub fn e(&self, alpha: Sign, beta: Sign) -> Cx<T> {
        self.e[alpha.index()][beta.index()]
    }

    pub fn d(&self, alpha: Sign) -> T {
        self.d[alpha.index()]
    }
}

pub fn reduced_quantities<T: Scalar>(cfg: &CouplingConfig<T>, t: T) -> Result<ReducedQuantities<T>> {
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let sp = scaled_params(cfg)?;
    let jh = cfg.coupling_along();
    let mut out = ReducedQuantities {
        delta_plus: [T::zero(); 2],
        delta_minus: [T::zero(); 2],
        e: [[real(T::zero()); 2]; 2],
        d: [T::zero(); 2],
    };
    for alpha in Sign::BOTH {
        let a = alpha.index();
        out.delta_plus[a] = if alpha == Sign::Plus { jh * t } else { -jh * t };
        out.delta_minus[a] = sp.r(-alpha) * t;
        let (sin, cos) = out.delta_minus[a].sin_cos();
        // R = 0 forces sin Δ = 0, so the undefined b, j drop out
        let (b, j) = match sp.pairs[(-alpha).index()] {
            ScaledPair::Defined { b, j } => (b, j),
            ScaledPair::Undefined => (T::zero(), T::zero()),
        };
        for beta in Sign::BOTH {
            let bj = if beta == Sign::Plus { j } else { -j };
            out.e[a][beta.index()] = cx(cos, bj * sin);
        }
        out.d[a] = b * sin;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::hermitian_eigen;
    use proptest::prelude::*;

    type C = CouplingConfig<f64>;

    fn z(j: [f64; 3], b1: f64, b2: f64) -> C {
        C::along(Direction::Z, j, b1, b2).unwrap()
    }

    fn direction() -> impl Strategy<Value = Direction> {
        prop_oneof![Just(Direction::X), Just(Direction::Y), Just(Direction::Z)]
    }

    #[test]
    fn zero_config_gives_zero_hamiltonian() {
        let h = hamiltonian_matrix(&z([0.0; 3], 0.0, 0.0)).unwrap();
        assert_eq!(h, ComplexMatrix::zeros(4));
        assert_eq!(eigenvalues(&z([0.0; 3], 0.0, 0.0)).unwrap(), [0.0; 4]);
    }

    #[test]
    fn pure_zz_coupling() {
        let h = hamiltonian_matrix(&z([0.0, 0.0, 1.0], 0.0, 0.0)).unwrap();
        let expected = ComplexMatrix::from_real_rows([
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
        ]);
        assert_eq!(h, expected);
    }

    #[test]
    fn reference_hamiltonian_is_hermitian_and_traceless() {
        let h = hamiltonian_matrix(&z([1.0, 2.0, 3.0], 1.0, 0.5)).unwrap();
        assert_eq!(h.hermiticity_defect(), 0.0);
        assert_eq!(h.trace(), real(0.0));
        // symbolic expansion: diagonal −J3 ± fields, σxσx − σyσy couples |00⟩,|11⟩ with −(J1 − J2)
        assert_eq!(h[(0, 0)], real(-3.0 + 1.0 + 0.5));
        assert_eq!(h[(3, 3)], real(-3.0 - 1.0 - 0.5));
        assert_eq!(h[(1, 1)], real(3.0 + 1.0 - 0.5));
        assert_eq!(h[(0, 3)], real(-(1.0 - 2.0)));
        assert_eq!(h[(1, 2)], real(-(1.0 + 2.0)));
    }

    #[test]
    fn off_direction_field_rejected() {
        let bad = C { couplings: [1.0; 3], field1: [0.3, 0.0, 0.0], field2: [0.0; 3], h: Direction::Z };
        assert_eq!(hamiltonian_matrix(&bad), Err(Error::FieldOffDirection { component: 1, direction: 3 }));
        assert!(Direction::new(4).is_err());
    }

    #[test]
    fn zero_field_limit_of_scaled_params() {
        let sp = scaled_params(&z([1.0, 2.0, 7.0], 0.0, 0.0)).unwrap();
        assert_eq!(sp.r(Sign::Plus), 1.0);
        assert_eq!(sp.j(Sign::Plus), Some(-1.0));
        assert_eq!(sp.b(Sign::Plus), Some(0.0));
    }

    #[test]
    fn direction_one_pairs_second_and_third_couplings() {
        let cfg = C::along(Direction::X, [10.0, 2.0, 3.0], 0.0, 0.0).unwrap();
        assert_eq!(cfg.coupling_pair(Sign::Plus), 5.0);
        assert_eq!(cfg.coupling_pair(Sign::Minus), -1.0);
    }

    #[test]
    fn degenerate_branch_is_undefined() {
        // B_+ = 0 and J_{3-} = J1 − J2 = 0 → R_+ = 0
        let sp = scaled_params(&z([1.5, 1.5, 0.2], 0.4, -0.4)).unwrap();
        assert_eq!(sp.pairs[Sign::Plus.index()], ScaledPair::Undefined);
        let rq = reduced_quantities(&z([1.5, 1.5, 0.2], 0.4, -0.4), 3.0).unwrap();
        assert_eq!(rq.e(Sign::Minus, Sign::Plus), real(1.0));
        assert_eq!(rq.d(Sign::Minus), 0.0);
    }

    #[test]
    fn reference_eigenvalue_matches_eigensolver() {
        let cfg = z([1.0, 2.0, 3.0], 1.0, 0.5);
        let e = eigenvalues(&cfg).unwrap();
        let expected = -3.0 + (1.5f64 * 1.5 + 1.0).sqrt();
        assert!((e[1] - expected).abs() < 1e-15);
        let numeric = hermitian_eigen(&hamiltonian_matrix(&cfg).unwrap()).unwrap().values;
        assert!(numeric.iter().any(|v| (v - expected).abs() < 1e-12));
    }

    #[test]
    fn reduced_quantities_at_zero_time() {
        let rq = reduced_quantities(&z([1.0, 2.0, 3.0], 1.0, 0.5), 0.0).unwrap();
        for a in Sign::BOTH {
            assert_eq!(rq.delta_plus(a), 0.0);
            assert_eq!(rq.delta_minus(a), 0.0);
            assert_eq!(rq.d(a), 0.0);
            for b in Sign::BOTH {
                assert_eq!(rq.e(a, b), real(1.0));
            }
        }
        let rq = reduced_quantities(&z([1.0, 2.0, 3.0], 1.0, 0.5), 0.7).unwrap();
        assert_eq!(rq.delta_plus(Sign::Plus), 3.0 * 0.7);
    }

    #[test]
    fn json_uses_physics_keys() {
        let cfg = z([1.0, 2.0, 3.0], 1.0, 0.5);
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(s, r#"{"J":[1.0,2.0,3.0],"B1":[0.0,0.0,1.0],"B2":[0.0,0.0,0.5],"h":3}"#);
        assert!(serde_json::from_str::<C>(r#"{"J":[1,2,3],"B1":[0,0,1],"B2":[0,0,0],"h":5}"#).is_err());
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    proptest! {
        #[test]
        fn scaled_pairs_are_unit_vectors(
            j in proptest::array::uniform3(-5.0f64..5.0), b1 in -5.0f64..5.0, b2 in -5.0f64..5.0, h in direction()
        ) {
            let sp = scaled_params(&C::along(h, j, b1, b2).unwrap()).unwrap();
            for s in Sign::BOTH {
                if let (Some(b), Some(jj)) = (sp.b(s), sp.j(s)) {
                    prop_assert!((b * b + jj * jj - 1.0).abs() < 1e-12);
                    prop_assert!(b.abs() <= 1.0 && jj.abs() <= 1.0);
                }
            }
        }

        #[test]
        fn spectrum_matches_eigensolver(
            j in proptest::array::uniform3(-5.0f64..5.0), b1 in -5.0f64..5.0, b2 in -5.0f64..5.0, h in direction()
        ) {
            let cfg = C::along(h, j, b1, b2).unwrap();
            let closed = sorted(eigenvalues(&cfg).unwrap().to_vec());
            let numeric = hermitian_eigen(&hamiltonian_matrix(&cfg).unwrap()).unwrap().values;
            for (a, b) in closed.iter().zip(&numeric) {
                prop_assert!((a - b).abs() < 1e-12, "{closed:?} vs {numeric:?}");
            }
        }

        #[test]
        fn hamiltonian_hermitian_and_traceless(
            j in proptest::array::uniform3(-5.0f64..5.0), b1 in -5.0f64..5.0, b2 in -5.0f64..5.0, h in direction()
        ) {
            let m = hamiltonian_matrix(&C::along(h, j, b1, b2).unwrap()).unwrap();
            prop_assert!(m.hermiticity_defect() < 1e-15);
            prop_assert!(m.trace().norm() < 1e-14);
        }

        #[test]
        fn block_columns_are_normalized(
            j in proptest::array::uniform3(-5.0f64..5.0), b1 in -5.0f64..5.0, b2 in -5.0f64..5.0,
            h in direction(), t in -5.0f64..5.0
        ) {
            let rq = reduced_quantities(&C::along(h, j, b1, b2).unwrap(), t).unwrap();
            for a in Sign::BOTH {
                for b in Sign::BOTH {
                    prop_assert!((rq.e(a, b).norm_sqr() + rq.d(a).powi(2) - 1.0).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn field_swap_with_qubit_exchange(
            j in proptest::array::uniform3(-5.0f64..5.0), b1 in -5.0f64..5.0, b2 in -5.0f64..5.0, h in direction()
        ) {
            let cfg = C::along(h, j, b1, b2).unwrap();
            let sw = cfg.swapped();
            prop_assert_eq!(sw.field_pair(Sign::Plus), cfg.field_pair(Sign::Plus));
            prop_assert_eq!(sw.field_pair(Sign::Minus), -cfg.field_pair(Sign::Minus));
            let e1 = sorted(eigenvalues(&cfg).unwrap().to_vec());
            let e2 = sorted(eigenvalues(&sw).unwrap().to_vec());
            for (a, b) in e1.iter().zip(&e2) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            // SWAP · H · SWAP reproduces the swapped-field Hamiltonian exactly
            let swap = ComplexMatrix::<f64>::from_real_rows([
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]);
            let conj = &(&swap * &hamiltonian_matrix(&cfg).unwrap()) * &swap;
            prop_assert!(conj.distance(&hamiltonian_matrix(&sw).unwrap()).unwrap() < 1e-14);
        }
    }
}
