//! Two-pulse synthesis of the controlled gates `𝒜_{h,j}`.

mod gates;
mod prescription;
mod solver;

pub use gates::{gate_library, GateTarget};
pub use prescription::{
    candidate_chi, candidate_xi, chi_squared, implied_s_twice, phase_condition, phase_sign_term,
    predicted_antidiagonal, predicted_diagonal, required_s_twice_residue, s_is_semi_integer, PulseIntegers, Rejection,
    SINGULAR_THRESHOLD,
};
pub use solver::{
    block_diagnostics, solve_two_pulse, solve_two_pulse_with, verify_sequence, BlockDiagnostics, IntRange, Pulse,
    PulseSequence, SearchBounds, SynthesisProblem, SynthesisReport,
};
