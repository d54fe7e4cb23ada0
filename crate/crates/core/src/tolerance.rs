//! Default numerical tolerances (double precision).

/// Construction-level checks (unitarity, normalization of closed forms).
pub const CONSTRUCTION: f64 = 1e-12;
/// Closed form vs. exponential oracle.
pub const CROSS_VALIDATION: f64 = 1e-10;
/// Entries that must vanish by block structure.
pub const STRUCTURAL_ZERO: f64 = 1e-10;
/// Accepting a synthesized pulse sequence.
pub const SYNTHESIS: f64 = 1e-8;
/// Teleportation success: fidelity above `1 - TELEPORT_FIDELITY`.
pub const TELEPORT_FIDELITY: f64 = 1e-10;
/// Branch probabilities sum and uniformity.
pub const PROBABILITY: f64 = 1e-12;
/// Default comparison tolerance for generic matrix equality.
pub const DEFAULT: f64 = 1e-10;
/// Below this a branch probability is treated as zero.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;
