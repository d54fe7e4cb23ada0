//! Two-qubit anisotropic Ising dynamics in the Bell basis.
//!
//! Closed-form evolution operators with a dense exponential as oracle,
//! their block structure, two-pulse synthesis of the controlled gates
//! `𝒜_{h,j}`, and teleportation through those gates.
//!
//! Numerics are generic over [`Scalar`] (`f32`, `f64`); the aliases below
//! fix `f64`, which the default tolerances are tuned for.

pub mod algebra;
pub mod error;
pub mod evolution;
pub mod fixtures;
pub mod ising;
pub mod scalar;
pub mod sign;
pub mod synthesis;
pub mod teleport;
pub mod tolerance;
pub mod verify;

pub use algebra::{BellLabel, ComplexMatrix, StateVector};
pub use error::{Error, Result};
pub use evolution::{BlockPair, EvolutionOperator, Provenance};
pub use ising::{CouplingConfig, Direction, ReducedQuantities, ScaledParams};
pub use scalar::{Cx, Scalar};
pub use sign::Sign;
pub use synthesis::{GateTarget, PulseSequence, SearchBounds, SynthesisProblem, SynthesisReport};
pub use teleport::{
    CorrectionPlan, CorrectionSource, MeasurementBasis, MeasurementMode, MultiQubitPlan, TeleportConfig,
    TeleportOutcome,
};

pub type C64 = Cx<f64>;
pub type Matrix = ComplexMatrix<f64>;
pub type State = StateVector<f64>;
pub type Coupling = CouplingConfig<f64>;
pub type Evolution = EvolutionOperator<f64>;
pub type Problem = SynthesisProblem<f64>;
pub type Report = SynthesisReport<f64>;
