//! Teleportation through the controlled Ising gates, single- and multi-qubit.

mod correction;
mod multi;
mod protocol;
mod table1;

pub use correction::{
    brute_force_correction, correction_for, formula_audit, general_correction, table1_correction, AuditEntry,
    CorrectionPlan, CorrectionSource, FormulaAudit, Table1Correction, TableGate,
};
pub use multi::{
    run_multiqubit, wire_layout, MultiBranch, MultiQubitPlan, MultiQubitReport, WireLayout, WirePlan, MAX_MULTI_QUBITS,
};
pub use protocol::{
    apply_teleport_gate, averaged_bob_density, branch_map, linearity_check, measure_first_two, no_signaling_defect,
    prepare_input, run_single, MeasurementBasis, MeasurementMode, MeasurementRecord, TeleportConfig, TeleportOutcome,
};
pub use table1::{reproduce_table1, Table1Row};
