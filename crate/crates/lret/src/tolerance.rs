//! Numerical tolerances used by invariant checks throughout the crate.
//!
//! All state and operator invariants are enforced against these constants so
//! that the thresholds live in one place instead of being scattered as magic
//! numbers.

/// Maximum allowed deviation from unitarity, `max |G†G − I|`.
pub const UNITARITY: f64 = 1e-12;

/// Maximum allowed deviation from Kraus completeness, `max |Σ p K†K − I|`.
pub const COMPLETENESS: f64 = 1e-12;

/// Maximum allowed Hermiticity deviation, `max |A − A†|`.
pub const HERMITICITY: f64 = 1e-10;

/// Trace may exceed 1 by at most this much before it is treated as a bug.
pub const TRACE_EXCESS: f64 = 1e-12;

/// Eigenvalues in `[-NEGATIVE_EIGENVALUE, 0)` are clamped to zero; anything
/// more negative is reported as an internal-consistency error.
pub const NEGATIVE_EIGENVALUE: f64 = 1e-10;

/// Eigenvalues below this floor are discarded as numerically zero. The floor
/// defines the numerical rank used by zero-threshold truncation.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Probability masses in `[-MASS_CLAMP, 0)` are clamped to zero.
pub const MASS_CLAMP: f64 = 1e-12;

/// Eigenvalues below this are skipped when evaluating `λ log λ` terms.
pub const ENTROPY_FLOOR: f64 = 1e-15;

/// A variational-distance denominator below this is reported as undefined
/// rather than as a ratio.
pub const DISTORTION_DENOMINATOR: f64 = 1e-14;
