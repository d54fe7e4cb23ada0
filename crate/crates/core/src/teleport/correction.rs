//! Classical corrections `Z^a X^b` (after an optional `H`) on Bob's qubit.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::protocol::{branch_map, MeasurementBasis};
use crate::algebra::{global_phase_distance, hadamard, pauli, BellLabel, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};
use crate::synthesis::GateTarget;
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionSource {
    Table1,
    GeneralFormula,
    #[default]
    Oracle,
}

/// `Z^a X^b H^{hadamard}`: `H` acts first, then `X^b`, then `Z^a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CorrectionPlan {
    pub a: u8,
    pub b: u8,
    pub hadamard: bool,
    pub source: CorrectionSource,
}

impl CorrectionPlan {
    pub fn matrix<T: Scalar>(&self) -> ComplexMatrix<T> {
        let id = ComplexMatrix::identity(2);
        let z = if self.a == 1 { pauli(3) } else { id.clone() };
        let x = if self.b == 1 { pauli(1) } else { id.clone() };
        let h = if self.hadamard { hadamard() } else { id };
        &(&z * &x) * &h
    }

    /// Same operator, ignoring where the plan came from.
    pub fn same_gates(&self, other: &CorrectionPlan) -> bool {
        (self.a, self.b, self.hadamard) == (other.a, other.b, other.hadamard)
    }
}

impl fmt::Display for CorrectionPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.a == 1 {
            parts.push("Z3");
        }
        if self.b == 1 {
            parts.push("X3");
        }
        if self.hadamard {
            parts.push("H3");
        }
        if parts.is_empty() {
            parts.push("I3");
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Single-qubit gate symbols used in the reference table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableGate {
    I,
    X,
    Z,
    H,
}

impl TableGate {
    pub fn matrix<T: Scalar>(self) -> ComplexMatrix<T> {
        match self {
            TableGate::I => ComplexMatrix::identity(2),
            TableGate::X => pauli(1),
            TableGate::Z => pauli(3),
            TableGate::H => hadamard(),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            TableGate::I => "I3",
            TableGate::X => "X3",
            TableGate::Z => "Z3",
            TableGate::H => "H3",
        }
    }
}

/// A row of the reference correction column: gates as written (leftmost
/// applied last) and the equivalent plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Correction {
    pub gates: &'static [TableGate],
    pub plan: CorrectionPlan,
}

impl Table1Correction {
    /// Operator product of the gate string.
    pub fn matrix<T: Scalar>(&self) -> ComplexMatrix<T> {
        self.gates.iter().fold(ComplexMatrix::identity(2), |acc, g| &acc * &g.matrix())
    }

    pub fn gate_string(&self) -> String {
        self.gates.iter().map(|g| g.symbol()).collect::<Vec<_>>().join(" ")
    }
}

const fn plan(a: u8, b: u8, hadamard: bool) -> CorrectionPlan {
    CorrectionPlan { a, b, hadamard, source: CorrectionSource::Table1 }
}

use TableGate::{H, I, X, Z};

/// The reference complementary gates for `𝒜_{1,2}` with ancilla `β_{00}`.
pub fn table1_correction(basis: MeasurementBasis, m1: u8, m2: u8) -> Result<Table1Correction> {
    for bit in [m1, m2] {
        if bit > 1 {
            return Err(Error::InvalidBit(bit));
        }
    }
    let (gates, plan): (&'static [TableGate], _) = match (basis, m1, m2) {
        (MeasurementBasis::Computational, 0, 0) => (&[Z, H], plan(1, 0, true)),
        // X Z H = −Z X H
        (MeasurementBasis::Computational, 0, 1) => (&[X, Z, H], plan(1, 1, true)),
        (MeasurementBasis::Computational, 1, 0) => (&[H], plan(0, 0, true)),
        (MeasurementBasis::Computational, _, _) => (&[X, H], plan(0, 1, true)),
        (MeasurementBasis::Bell, 0, 0) => (&[I], plan(0, 0, false)),
        (MeasurementBasis::Bell, 0, 1) => (&[X], plan(0, 1, false)),
        (MeasurementBasis::Bell, 1, 0) => (&[Z, X], plan(1, 1, false)),
        (MeasurementBasis::Bell, _, _) => (&[Z], plan(1, 0, false)),
    };
    Ok(Table1Correction { gates, plan })
}

/// Integer coefficient `(4(h − 5/2)² − 9)/8 = ((2h − 5)² − 9)/8`.
fn coeff_a(h: i64) -> i64 {
    ((2 * h - 5).pow(2) - 9) / 8
}

/// `(4(h − 3/2)² − 9)/8 = ((2h − 3)² − 9)/8`.
fn coeff_b(h: i64) -> i64 {
    ((2 * h - 3).pow(2) - 9) / 8
}

/// Bell-measurement exponents from the closed-form expressions
/// `a = A + c_a(h)(j − 2 − M₂) + (h − 2)² M₁`, `b = B + c_b(h)(j − 2 − M₁) + (h − 2)² M₂`, mod 2.
pub fn general_correction(gate: GateTarget, ancilla: BellLabel, m1: u8, m2: u8) -> CorrectionPlan {
    let h = gate.h().number() as i64;
    let j = gate.j() as i64;
    let (a0, b0) = (ancilla.a() as i64, ancilla.b() as i64);
    let (m1, m2) = (m1 as i64, m2 as i64);
    let a = a0 + coeff_a(h) * (j - 2 - m2) + (h - 2).pow(2) * m1;
    let b = b0 + coeff_b(h) * (j - 2 - m1) + (h - 2).pow(2) * m2;
    CorrectionPlan {
        a: a.rem_euclid(2) as u8,
        b: b.rem_euclid(2) as u8,
        hadamard: false,
        source: CorrectionSource::GeneralFormula,
    }
}

/// Whether `c · m` is a nonzero multiple of a phase times `I₂`.
fn restores_input<T: Scalar>(c: &ComplexMatrix<T>, m: &ComplexMatrix<T>) -> bool {
    let cm = c * m;
    let norm = cm.frobenius_norm();
    if norm <= T::lit(tolerance::NEGLIGIBLE_PROBABILITY) {
        return false;
    }
    let unit = cm.scale(real(T::lit(2.0).sqrt() / norm));
    global_phase_distance(&unit, &ComplexMatrix::identity(2)).is_ok_and(|d| d < T::lit(tolerance::TELEPORT_FIDELITY))
}

/// Searches `Z^a X^b` (and `Z^a X^b H` for computational measurements) for
/// the unique correction mapping the branch back to the input.
pub fn brute_force_correction(
    gate: GateTarget,
    ancilla: BellLabel,
    basis: MeasurementBasis,
    m1: u8,
    m2: u8,
) -> Result<CorrectionPlan> {
    let m = branch_map::<f64>(gate, ancilla, basis, m1, m2)?;
    let hadamards: &[bool] = match basis {
        MeasurementBasis::Bell => &[false],
        MeasurementBasis::Computational => &[false, true],
    };
    let mut found = Vec::new();
    for &hadamard in hadamards {
        for a in 0..2 {
            for b in 0..2 {
                let p = CorrectionPlan { a, b, hadamard, source: CorrectionSource::Oracle };
                if restores_input(&p.matrix(), &m) {
                    found.push(p);
                }
            }
        }
    }
    match found.as_slice() {
        [p] => Ok(*p),
        _ => Err(Error::ProtocolBreakage(format!(
            "{gate}, ancilla {ancilla}, {basis:?} outcome {m1}{m2} ({} candidate corrections)",
            found.len()
        ))),
    }
}

pub fn correction_for(
    source: CorrectionSource,
    gate: GateTarget,
    ancilla: BellLabel,
    basis: MeasurementBasis,
    m1: u8,
    m2: u8,
) -> Result<CorrectionPlan> {
    match source {
        CorrectionSource::Oracle => brute_force_correction(gate, ancilla, basis, m1, m2),
        CorrectionSource::Table1 => {
            if gate != GateTarget::new(crate::ising::Direction::X, 2)? || ancilla != BellLabel::PHI_PLUS {
                return Err(Error::InvalidPlan(format!(
                    "the reference table covers A_1,2 with β00 only, not {gate} with {ancilla}"
                )));
            }
            Ok(table1_correction(basis, m1, m2)?.plan)
        }
        CorrectionSource::GeneralFormula => {
            if basis != MeasurementBasis::Bell {
                return Err(Error::InvalidPlan("the general exponent formula assumes Bell measurements".into()));
            }
            Ok(general_correction(gate, ancilla, m1, m2))
        }
    }
}

/// One `(h, j, A, B, M₁, M₂)` comparison between formula and oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub gate: GateTarget,
    pub ancilla: BellLabel,
    pub m1: u8,
    pub m2: u8,
    pub formula: (u8, u8),
    pub oracle: (u8, u8),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaAudit {
    pub total: usize,
    pub agreements: usize,
    pub disagreements: Vec<AuditEntry>,
}

/// Compares the general formula with the oracle on all 96 tuples.
pub fn formula_audit() -> Result<FormulaAudit> {
    let mut agreements = 0;
    let mut disagreements = Vec::new();
    let mut total = 0;
    for gate in GateTarget::all() {
        for ancilla in BellLabel::ORDER {
            for (m1, m2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                total += 1;
                let f = general_correction(gate, ancilla, m1, m2);
                let o = brute_force_correction(gate, ancilla, MeasurementBasis::Bell, m1, m2)?;
                if f.same_gates(&o) {
                    agreements += 1;
                } else {
                    disagreements.push(AuditEntry { gate, ancilla, m1, m2, formula: (f.a, f.b), oracle: (o.a, o.b) });
                }
            }
        }
    }
    Ok(FormulaAudit { total, agreements, disagreements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::gate_library;

    #[test]
    fn printed_rows() {
        let r = table1_correction(MeasurementBasis::Bell, 0, 1).unwrap();
        assert_eq!(r.gate_string(), "X3");
        assert_eq!(table1_correction(MeasurementBasis::Computational, 1, 0).unwrap().gate_string(), "H3");
        assert_eq!(table1_correction(MeasurementBasis::Bell, 0, 0).unwrap().plan, plan(0, 0, false));
        assert!(table1_correction(MeasurementBasis::Bell, 2, 0).is_err());
    }

    #[test]
    fn printed_strings_equal_their_plans_up_to_phase() {
        for basis in [MeasurementBasis::Computational, MeasurementBasis::Bell] {
            for (m1, m2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let row = table1_correction(basis, m1, m2).unwrap();
                let d = global_phase_distance(&row.matrix::<f64>(), &row.plan.matrix()).unwrap();
                assert!(d < 1e-14, "{basis:?} {m1}{m2}");
            }
        }
    }

    #[test]
    fn formula_identity_row() {
        let p = general_correction(gate_library(1, 2).unwrap(), BellLabel::PHI_PLUS, 0, 0);
        assert_eq!((p.a, p.b, p.hadamard), (0, 0, false));
    }

    #[test]
    fn formula_coefficients_are_integers() {
        assert_eq!([coeff_a(1), coeff_a(2), coeff_a(3)], [0, -1, -1]);
        assert_eq!([coeff_b(1), coeff_b(2), coeff_b(3)], [-1, -1, 0]);
    }

    #[test]
    fn oracle_matches_printed_bell_rows() {
        let g = gate_library(1, 2).unwrap();
        for (m1, m2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let o = brute_force_correction(g, BellLabel::PHI_PLUS, MeasurementBasis::Bell, m1, m2).unwrap();
            let t = table1_correction(MeasurementBasis::Bell, m1, m2).unwrap().plan;
            assert!(o.same_gates(&t), "{m1}{m2}: {o} vs {t}");
            assert_eq!(o, brute_force_correction(g, BellLabel::PHI_PLUS, MeasurementBasis::Bell, m1, m2).unwrap());
        }
    }

    #[test]
    fn every_bell_slice_has_a_correction() {
        for g in GateTarget::all() {
            for anc in BellLabel::ORDER {
                for (m1, m2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    brute_force_correction(g, anc, MeasurementBasis::Bell, m1, m2).unwrap();
                }
            }
        }
    }

    #[test]
    fn audit_counts() {
        let audit = formula_audit().unwrap();
        assert_eq!(audit.total, 96);
        assert_eq!(audit.agreements + audit.disagreements.len(), 96);
        // the third-direction rows differ only in the Z exponent
        for d in &audit.disagreements {
            assert_eq!(d.gate.h(), crate::ising::Direction::Z);
            assert_eq!(d.formula.1, d.oracle.1);
            assert_ne!(d.formula.0, d.oracle.0);
        }
        assert_eq!(audit.agreements, 64);
    }

    #[test]
    fn computational_measurement_breaks_for_other_directions() {
        let g = gate_library(2, 1).unwrap();
        let r = brute_force_correction(g, BellLabel::PHI_PLUS, MeasurementBasis::Computational, 0, 0);
        assert!(matches!(r, Err(Error::ProtocolBreakage(_))));
    }
}
