//! Single-qubit teleportation through one library gate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::correction::{correction_for, CorrectionPlan, CorrectionSource};
use crate::algebra::{bell_change_of_basis, conjugate_from_bell, BellLabel, ComplexMatrix, StateVector};
use crate::error::{Error, Result};
use crate::scalar::{real, Cx, Scalar};
use crate::synthesis::GateTarget;
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementBasis {
    Computational,
    Bell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementMode {
    #[default]
    Enumerate,
    Sample(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeleportConfig {
    pub gate: GateTarget,
    pub ancilla: BellLabel,
    pub basis: MeasurementBasis,
    #[serde(default)]
    pub mode: MeasurementMode,
    #[serde(default)]
    pub correction: CorrectionSource,
}

impl Default for TeleportConfig {
    /// `𝒜_{1,2}`, `β₀₀`, Bell measurement, all branches.
    fn default() -> Self {
        TeleportConfig {
            gate: GateTarget::new(crate::ising::Direction::X, 2).expect("valid library gate"),
            ancilla: BellLabel::PHI_PLUS,
            basis: MeasurementBasis::Bell,
            mode: MeasurementMode::Enumerate,
            correction: CorrectionSource::Oracle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct MeasurementRecord<T> {
    pub basis: MeasurementBasis,
    pub m1: u8,
    pub m2: u8,
    pub probability: T,
    /// Normalized state of the remaining qubits; absent for a null branch.
    pub post_state: Option<StateVector<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct TeleportOutcome<T> {
    pub record: MeasurementRecord<T>,
    pub correction: CorrectionPlan,
    pub output: StateVector<T>,
    /// Phase-insensitive fidelity of the corrected qubit with the input.
    pub fidelity: T,
    /// `arg⟨input|output⟩`.
    pub relative_phase: T,
}

/// `(α|0⟩ + β|1⟩) ⊗ |β_{AB}⟩`.
pub fn prepare_input<T: Scalar>(alpha: Cx<T>, beta: Cx<T>, ancilla: BellLabel) -> Result<StateVector<T>> {
    StateVector::qubit(alpha, beta)?.tensor(&ancilla.state())
}

/// Applies `P 𝒜 P†` to qubits `(input, ancilla)`.
pub fn apply_teleport_gate_on<T: Scalar>(
    state: &StateVector<T>,
    gate: GateTarget,
    pair: (usize, usize),
) -> Result<StateVector<T>> {
    let comp = conjugate_from_bell(&gate.matrix())?;
    state.apply_gate(&comp, &[pair.0, pair.1])
}

pub fn apply_teleport_gate<T: Scalar>(state: &StateVector<T>, gate: GateTarget) -> Result<StateVector<T>> {
    if state.n_qubits() < 2 {
        return Err(Error::DimensionMismatch { expected: 4, found: state.amplitudes().len() });
    }
    apply_teleport_gate_on(state, gate, (0, 1))
}

/// Rotates a Bell measurement on `pair` into a computational one.
pub(crate) fn rotate_for_basis<T: Scalar>(
    state: &StateVector<T>,
    basis: MeasurementBasis,
    pair: (usize, usize),
) -> Result<StateVector<T>> {
    match basis {
        MeasurementBasis::Computational => Ok(state.clone()),
        MeasurementBasis::Bell => state.apply_gate(&bell_change_of_basis::<T>().adjoint(), &[pair.0, pair.1]),
    }
}

/// Unnormalized amplitudes of the qubits not listed in `fixed`, after
/// projecting each listed qubit onto the given bit. Remaining qubits keep
/// their relative order.
pub(crate) fn project<T: Scalar>(state: &StateVector<T>, fixed: &[(usize, u8)]) -> Vec<Cx<T>> {
    let n = state.n_qubits();
    let free: Vec<usize> = (0..n).filter(|q| fixed.iter().all(|(f, _)| f != q)).collect();
    let mut base = 0usize;
    for &(q, bit) in fixed {
        base |= (bit as usize) << (n - 1 - q);
    }
    let k = free.len();
    (0..1usize << k)
        .map(|s| {
            let mut idx = base;
            for (b, &q) in free.iter().enumerate() {
                if s >> (k - 1 - b) & 1 == 1 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            state.amplitudes()[idx]
        })
        .collect()
}

const OUTCOMES: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

fn record_from<T: Scalar>(basis: MeasurementBasis, m1: u8, m2: u8, amps: Vec<Cx<T>>) -> Result<MeasurementRecord<T>> {
    let raw = StateVector::from_amplitudes_unchecked(amps)?;
    let probability = raw.norm_sqr();
    let post_state =
        if probability > T::lit(tolerance::NEGLIGIBLE_PROBABILITY) { Some(raw.normalized()?) } else { None };
    Ok(MeasurementRecord { basis, m1, m2, probability, post_state })
}

/// Picks one index with probability proportional to `weights`.
pub(crate) fn sample_index<T: Scalar>(weights: &[T], seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = weights.iter().map(|w| w.to_f64_lossy()).sum();
    let draw = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w.to_f64_lossy();
        if draw < acc {
            return i;
        }
    }
    weights.iter().rposition(|w| w.to_f64_lossy() > 0.0).unwrap_or(0)
}

/// Measures qubits 0 and 1 of a 3-qubit state.
pub fn measure_first_two<T: Scalar>(
    state: &StateVector<T>,
    basis: MeasurementBasis,
    mode: MeasurementMode,
) -> Result<Vec<MeasurementRecord<T>>> {
    if state.n_qubits() != 3 {
        return Err(Error::DimensionMismatch { expected: 8, found: state.amplitudes().len() });
    }
    let rotated = rotate_for_basis(state, basis, (0, 1))?;
    let all = OUTCOMES
        .iter()
        .map(|&(m1, m2)| record_from(basis, m1, m2, project(&rotated, &[(0, m1), (1, m2)])))
        .collect::<Result<Vec<_>>>()?;
    Ok(match mode {
        MeasurementMode::Enumerate => all,
        MeasurementMode::Sample(seed) => {
            let probs: Vec<T> = all.iter().map(|r| r.probability).collect();
            vec![all[sample_index(&probs, seed)].clone()]
        }
    })
}

/// Linear map from the input qubit to Bob's unnormalized qubit in branch
/// `(m1, m2)`; column `k` is the image of `|k⟩`.
pub fn branch_map<T: Scalar>(
    gate: GateTarget,
    ancilla: BellLabel,
    basis: MeasurementBasis,
    m1: u8,
    m2: u8,
) -> Result<ComplexMatrix<T>> {
    let mut cols = Vec::new();
    for k in 0..2 {
        let input = StateVector::basis(1, k).tensor(&ancilla.state())?;
        let after = rotate_for_basis(&apply_teleport_gate(&input, gate)?, basis, (0, 1))?;
        cols.push(project(&after, &[(0, m1), (1, m2)]));
    }
    Ok(ComplexMatrix::from_fn(2, |r, c| cols[c][r]))
}

fn outcome_for<T: Scalar>(
    config: &TeleportConfig,
    input: &StateVector<T>,
    record: MeasurementRecord<T>,
) -> Result<TeleportOutcome<T>> {
    let correction =
        correction_for(config.correction, config.gate, config.ancilla, config.basis, record.m1, record.m2)?;
    let post = record
        .post_state
        .clone()
        .ok_or_else(|| Error::ProtocolBreakage(format!("null branch {}{}", record.m1, record.m2)))?;
    let output = post.apply_gate(&correction.matrix(), &[0])?;
    let overlap = input.inner(&output)?;
    Ok(TeleportOutcome { record, correction, output, fidelity: overlap.norm_sqr(), relative_phase: overlap.arg() })
}

/// Prepares, entangles, measures and corrects; one outcome per reported branch.
pub fn run_single<T: Scalar>(config: &TeleportConfig, alpha: Cx<T>, beta: Cx<T>) -> Result<Vec<TeleportOutcome<T>>> {
    let input = StateVector::qubit(alpha, beta)?;
    let state = apply_teleport_gate(&prepare_input(alpha, beta, config.ancilla)?, config.gate)?;
    measure_first_two(&state, config.basis, config.mode)?
        .into_iter()
        .filter(|r| r.post_state.is_some())
        .map(|r| outcome_for(config, &input, r))
        .collect()
}

/// Checks `T(aψ_a + bψ_b) = a T(ψ_a) + b T(ψ_b)` branch by branch on random
/// inputs. Equality is exact (no phase freedom), which implies the
/// phase-insensitive form.
pub fn linearity_check(
    gate: GateTarget,
    ancilla: BellLabel,
    basis: MeasurementBasis,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rand_cx = |rng: &mut ChaCha8Rng| Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let maps =
        OUTCOMES.iter().map(|&(m1, m2)| branch_map::<f64>(gate, ancilla, basis, m1, m2)).collect::<Result<Vec<_>>>()?;
    let run = |psi: &[Cx<f64>; 2]| -> Result<Vec<Vec<Cx<f64>>>> {
        let state = StateVector::from_amplitudes_unchecked(psi.to_vec())?.tensor(&ancilla.state())?;
        let after = rotate_for_basis(&apply_teleport_gate(&state, gate)?, basis, (0, 1))?;
        Ok(OUTCOMES.iter().map(|&(m1, m2)| project(&after, &[(0, m1), (1, m2)])).collect())
    };
    for _ in 0..trials {
        let pa = [rand_cx(&mut rng), rand_cx(&mut rng)];
        let pb = [rand_cx(&mut rng), rand_cx(&mut rng)];
        let (ca, cb) = (rand_cx(&mut rng), rand_cx(&mut rng));
        let mixed = [ca * pa[0] + cb * pb[0], ca * pa[1] + cb * pb[1]];
        let (ra, rb, rm) = (run(&pa)?, run(&pb)?, run(&mixed)?);
        for k in 0..4 {
            let combined: Vec<Cx<f64>> = (0..2).map(|i| ca * ra[k][i] + cb * rb[k][i]).collect();
            let lhs = StateVector::from_amplitudes_unchecked(rm[k].clone())?;
            let rhs = StateVector::from_amplitudes_unchecked(combined)?;
            if lhs.distance(&rhs)? > tolerance::TELEPORT_FIDELITY {
                return Ok(false);
            }
            // the branch map itself is the same linear map
            let via_map = &maps[k] * &ComplexMatrix::from_fn(2, |r, _| mixed[r]);
            let lhs2 = StateVector::from_amplitudes_unchecked(vec![via_map[(0, 0)], via_map[(1, 0)]])?;
            if lhs.distance(&lhs2)? > tolerance::TELEPORT_FIDELITY {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Bob's qubit averaged over all measurement branches before correction,
/// as a 2×2 density matrix.
pub fn averaged_bob_density<T: Scalar>(config: &TeleportConfig, alpha: Cx<T>, beta: Cx<T>) -> Result<ComplexMatrix<T>> {
    let state = apply_teleport_gate(&prepare_input(alpha, beta, config.ancilla)?, config.gate)?;
    let rotated = rotate_for_basis(&state, config.basis, (0, 1))?;
    let mut rho = ComplexMatrix::zeros(2);
    for &(m1, m2) in &OUTCOMES {
        let v = project(&rotated, &[(0, m1), (1, m2)]);
        let outer = ComplexMatrix::from_fn(2, |r, c| v[r] * v[c].conj());
        rho = &rho + &outer;
    }
    Ok(rho)
}

/// `‖ρ − I/2‖_F`.
pub fn no_signaling_defect<T: Scalar>(rho: &ComplexMatrix<T>) -> T {
    let half = ComplexMatrix::identity(2).scale(real(T::lit(0.5)));
    rho.distance(&half).expect("2×2 density")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use crate::synthesis::gate_library;
    use proptest::prelude::*;

    type C = Cx<f64>;

    fn s2() -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    #[test]
    fn basis_input_with_phi_plus() {
        let s = prepare_input(cx(1.0, 0.0), cx(0.0, 0.0), BellLabel::PHI_PLUS).unwrap();
        let mut expect = vec![cx(0.0, 0.0); 8];
        expect[0] = cx(s2(), 0.0);
        expect[3] = cx(s2(), 0.0);
        assert_eq!(s.amplitudes(), expect.as_slice());
        assert!(prepare_input(cx(1.0, 0.0), cx(1.0, 0.0), BellLabel::PHI_PLUS).is_err());
    }

    /// `|β_{ab}⟩ ⊗ |c⟩` in the computational basis of three qubits.
    fn bell_ket(a: u8, b: u8, c: usize) -> StateVector<f64> {
        BellLabel::new(a, b).unwrap().state().tensor(&StateVector::basis(1, c)).unwrap()
    }

    fn sum(terms: &[(f64, StateVector<f64>)]) -> Vec<C> {
        let mut out = vec![cx(0.0, 0.0); 8];
        for (w, s) in terms {
            for (o, a) in out.iter_mut().zip(s.amplitudes()) {
                *o += a * *w;
            }
        }
        out
    }

    #[test]
    fn gate_reproduces_printed_expansion() {
        let (al, be) = (0.6, 0.8);
        let input = prepare_input(cx(al, 0.0), cx(be, 0.0), BellLabel::PHI_PLUS).unwrap();
        // left side of the expansion
        let left = sum(&[
            (al / 2.0, bell_ket(0, 0, 0)),
            (al / 2.0, bell_ket(1, 0, 0)),
            (al / 2.0, bell_ket(0, 1, 1)),
            (al / 2.0, bell_ket(1, 1, 1)),
            (be / 2.0, bell_ket(0, 1, 0)),
            (-be / 2.0, bell_ket(1, 1, 0)),
            (be / 2.0, bell_ket(0, 0, 1)),
            (-be / 2.0, bell_ket(1, 0, 1)),
        ]);
        let d = StateVector::from_amplitudes_unchecked(left).unwrap().distance(&input).unwrap();
        assert!(d < 1e-15);
        let out = apply_teleport_gate(&input, gate_library(1, 2).unwrap()).unwrap();
        let right = sum(&[
            (al / 2.0, bell_ket(0, 0, 0)),
            (-al / 2.0, bell_ket(1, 1, 0)),
            (al / 2.0, bell_ket(0, 1, 1)),
            (al / 2.0, bell_ket(1, 0, 1)),
            (be / 2.0, bell_ket(0, 1, 0)),
            (-be / 2.0, bell_ket(1, 0, 0)),
            (be / 2.0, bell_ket(0, 0, 1)),
            (be / 2.0, bell_ket(1, 1, 1)),
        ]);
        let d = StateVector::from_amplitudes_unchecked(right).unwrap().distance(&out).unwrap();
        assert!(d < 1e-15, "{d}");
    }

    #[test]
    fn identity_gate_and_inverse() {
        let s = prepare_input(cx(0.6, 0.0), cx(0.0, 0.8), BellLabel::new(1, 0).unwrap()).unwrap();
        let i4 = ComplexMatrix::<f64>::identity(4);
        assert_eq!(s.apply_gate(&i4, &[0, 1]).unwrap(), s);
        let g = gate_library(3, 1).unwrap();
        let comp = conjugate_from_bell(&g.matrix::<f64>()).unwrap();
        let back = apply_teleport_gate(&s, g).unwrap().apply_gate(&comp.adjoint(), &[0, 1]).unwrap();
        assert!((crate::algebra::fidelity(&back, &s).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_state_computational_probabilities() {
        let s = prepare_input(cx(1.0, 0.0), cx(0.0, 0.0), BellLabel::PHI_PLUS).unwrap();
        let recs = measure_first_two(&s, MeasurementBasis::Computational, MeasurementMode::Enumerate).unwrap();
        let p: Vec<f64> = recs.iter().map(|r| r.probability).collect();
        // (|000⟩ + |011⟩)/√2: the first two qubits read 00 or 01
        for (a, b) in p.iter().zip([0.5, 0.5, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(recs[2].post_state.is_none() && recs[3].post_state.is_none());
    }

    #[test]
    fn table_example_all_branches() {
        let cfg = TeleportConfig::default();
        let out = run_single(&cfg, cx(0.6f64, 0.0), cx(0.0, 0.8)).unwrap();
        assert_eq!(out.len(), 4);
        for o in &out {
            assert!((o.record.probability - 0.25).abs() < 1e-12);
            assert!(o.fidelity > 1.0 - 1e-12);
        }
        let comp =
            TeleportConfig { basis: MeasurementBasis::Computational, correction: CorrectionSource::Table1, ..cfg };
        for o in run_single(&comp, cx(0.6, 0.0), cx(0.0, 0.8)).unwrap() {
            assert!(o.fidelity > 1.0 - 1e-12);
            assert!(o.correction.hadamard);
        }
        for o in run_single(&cfg, cx(1.0, 0.0), cx(0.0, 0.0)).unwrap() {
            assert!(o.output.phase_distance(&StateVector::basis(1, 0)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = TeleportConfig { mode: MeasurementMode::Sample(7), ..TeleportConfig::default() };
        let a = run_single(&cfg, cx(0.6, 0.0), cx(0.8, 0.0)).unwrap();
        let b = run_single(&cfg, cx(0.6, 0.0), cx(0.8, 0.0)).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a, b);
    }

    #[test]
    fn formula_source_rejects_computational_basis() {
        let cfg = TeleportConfig {
            basis: MeasurementBasis::Computational,
            correction: CorrectionSource::GeneralFormula,
            ..TeleportConfig::default()
        };
        assert!(matches!(run_single(&cfg, cx(1.0, 0.0), cx(0.0, 0.0)), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn linearity_on_random_superpositions() {
        for g in GateTarget::all() {
            assert!(linearity_check(g, BellLabel::new(0, 1).unwrap(), MeasurementBasis::Bell, 20, 3).unwrap());
        }
        let g = gate_library(1, 2).unwrap();
        assert!(linearity_check(g, BellLabel::PHI_PLUS, MeasurementBasis::Computational, 100, 11).unwrap());
    }

    fn amplitudes() -> impl Strategy<Value = (C, C)> {
        proptest::array::uniform4(-1.0f64..1.0).prop_filter_map("nonzero", |v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            (n > 1e-3).then(|| (cx(v[0] / n, v[1] / n), cx(v[2] / n, v[3] / n)))
        })
    }

    proptest! {
        #[test]
        fn bell_statistics_are_uniform((al, be) in amplitudes(), gi in 0usize..6, anc in 0usize..4) {
            let g = GateTarget::all().nth(gi).unwrap();
            let s = apply_teleport_gate(&prepare_input(al, be, BellLabel::from_index(anc)).unwrap(), g).unwrap();
            let recs = measure_first_two(&s, MeasurementBasis::Bell, MeasurementMode::Enumerate).unwrap();
            let total: f64 = recs.iter().map(|r| r.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for r in &recs {
                prop_assert!((r.probability - 0.25).abs() < 1e-12);
            }
        }

        #[test]
        fn no_signaling((al, be) in amplitudes(), gi in 0usize..6, anc in 0usize..4, bell in any::<bool>()) {
            let cfg = TeleportConfig {
                gate: GateTarget::all().nth(gi).unwrap(),
                ancilla: BellLabel::from_index(anc),
                basis: if bell { MeasurementBasis::Bell } else { MeasurementBasis::Computational },
                ..TeleportConfig::default()
            };
            let rho = averaged_bob_density(&cfg, al, be).unwrap();
            prop_assert!(no_signaling_defect(&rho) < 1e-10);
        }

        #[test]
        fn global_phase_does_not_change_fidelities((al, be) in amplitudes(), theta in 0.0f64..std::f64::consts::TAU) {
            let cfg = TeleportConfig::default();
            let ph = crate::scalar::cis(theta);
            let a = run_single(&cfg, al, be).unwrap();
            let b = run_single(&cfg, al * ph, be * ph).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.fidelity - y.fidelity).abs() < 1e-12);
            }
        }
    }
}
