//! n-qubit teleportation as n independent single-qubit protocols.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correction::{brute_force_correction, CorrectionPlan};
use super::protocol::{
    apply_teleport_gate_on, project, rotate_for_basis, sample_index, MeasurementBasis, MeasurementMode,
};
use crate::algebra::{BellLabel, StateVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synthesis::GateTarget;
use crate::tolerance;

/// Largest input register; `3n` qubits are simulated densely.
pub const MAX_MULTI_QUBITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WirePlan {
    pub gate: GateTarget,
    pub ancilla: BellLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiQubitPlan {
    pub wires: Vec<WirePlan>,
    pub basis: MeasurementBasis,
    #[serde(default)]
    pub mode: MeasurementMode,
}

impl MultiQubitPlan {
    /// Same gate and ancilla on every wire.
    pub fn uniform(n: usize, wire: WirePlan, basis: MeasurementBasis) -> Self {
        MultiQubitPlan { wires: vec![wire; n], basis, mode: MeasurementMode::Enumerate }
    }
}

/// Physical qubits of one wire, 1-based as in the register diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireLayout {
    pub wire: usize,
    pub input: usize,
    pub alice: usize,
    pub bob: usize,
}

/// Input `j`, ancilla pair `(n + 2j − 1, n + 2j)`; Bob's qubits are
/// `n + 2, n + 4, …, 3n`.
pub fn wire_layout(n: usize) -> Vec<WireLayout> {
    (1..=n).map(|j| WireLayout { wire: j, input: j, alice: n + 2 * j - 1, bob: n + 2 * j }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct MultiBranch<T> {
    /// `(M₁, M₂)` per wire.
    pub outcomes: Vec<(u8, u8)>,
    pub probability: T,
    pub corrections: Vec<CorrectionPlan>,
    pub fidelity: T,
    pub relative_phase: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct MultiQubitReport<T> {
    pub n: usize,
    pub layout: Vec<WireLayout>,
    pub branches: Vec<MultiBranch<T>>,
    /// Branches with vanishing probability, left out of `branches`.
    pub null_branches: usize,
    pub total_probability: T,
    pub min_fidelity: T,
    pub success: bool,
}

fn validate(n: usize, plan: &MultiQubitPlan) -> Result<()> {
    if n != plan.wires.len() {
        return Err(Error::InvalidPlan(format!("{n}-qubit input but {} wires in the plan", plan.wires.len())));
    }
    if n == 0 || n > MAX_MULTI_QUBITS {
        return Err(Error::InvalidPlan(format!("supported widths are 1..={MAX_MULTI_QUBITS}, got {n}")));
    }
    Ok(())
}

/// Teleports `state` (n qubits) onto Bob's wires, correcting each wire
/// with its own oracle plan. Branches are listed in canonical order, wire 1
/// most significant.
pub fn run_multiqubit<T: Scalar>(state: &StateVector<T>, plan: &MultiQubitPlan) -> Result<MultiQubitReport<T>> {
    let n = state.n_qubits();
    validate(n, plan)?;
    let layout = wire_layout(n);

    // corrections[w][2·M₁ + M₂]
    let corrections = plan
        .wires
        .iter()
        .map(|w| {
            (0..4u8)
                .map(|k| brute_force_correction(w.gate, w.ancilla, plan.basis, k >> 1, k & 1))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut full = state.clone();
    for w in &plan.wires {
        full = full.tensor(&w.ancilla.state())?;
    }
    for (w, l) in plan.wires.iter().zip(&layout) {
        let pair = (l.input - 1, l.alice - 1);
        full = apply_teleport_gate_on(&full, w.gate, pair)?;
        full = rotate_for_basis(&full, plan.basis, pair)?;
    }

    let negligible = T::lit(tolerance::NEGLIGIBLE_PROBABILITY);
    let evaluated: Vec<Option<MultiBranch<T>>> = (0..1usize << (2 * n))
        .into_par_iter()
        .map(|branch| {
            let outcomes: Vec<(u8, u8)> = (0..n)
                .map(|w| {
                    let k = branch >> (2 * (n - 1 - w)) & 3;
                    ((k >> 1) as u8, (k & 1) as u8)
                })
                .collect();
            let fixed: Vec<(usize, u8)> = layout
                .iter()
                .zip(&outcomes)
                .flat_map(|(l, &(m1, m2))| [(l.input - 1, m1), (l.alice - 1, m2)])
                .collect();
            let bob = StateVector::from_amplitudes_unchecked(project(&full, &fixed))?;
            let probability = bob.norm_sqr();
            if probability <= negligible {
                return Ok(None);
            }
            let plans: Vec<CorrectionPlan> =
                outcomes.iter().enumerate().map(|(w, &(m1, m2))| corrections[w][(2 * m1 + m2) as usize]).collect();
            let mut out = bob.normalized()?;
            for (w, p) in plans.iter().enumerate() {
                out = out.apply_gate(&p.matrix(), &[w])?;
            }
            let overlap = state.inner(&out)?;
            Ok(Some(MultiBranch {
                outcomes,
                probability,
                corrections: plans,
                fidelity: overlap.norm_sqr(),
                relative_phase: overlap.arg(),
            }))
        })
        .collect::<Result<Vec<_>>>()?;

    let null_branches = evaluated.iter().filter(|b| b.is_none()).count();
    let mut branches: Vec<MultiBranch<T>> = evaluated.into_iter().flatten().collect();
    let total_probability = branches.iter().map(|b| b.probability).sum::<T>();
    if let MeasurementMode::Sample(seed) = plan.mode {
        let probs: Vec<T> = branches.iter().map(|b| b.probability).collect();
        let pick = sample_index(&probs, seed);
        branches = vec![branches.swap_remove(pick)];
    }
    let min_fidelity = branches.iter().map(|b| b.fidelity).fold(T::infinity(), T::min);
    let success = min_fidelity > T::one() - T::lit(tolerance::TELEPORT_FIDELITY)
        && (total_probability - T::one()).abs() < T::lit(tolerance::PROBABILITY);
    Ok(MultiQubitReport { n, layout, branches, null_branches, total_probability, min_fidelity, success })
}
