//! Error type shared by every module in the crate.
//!
//! Numerical routines return [`Error`] for conditions a caller can anticipate
//! and handle (non-Hermitian input, out-of-range expansion amplitudes,
//! over-large tensor products). Violations of internal invariants that no
//! caller can trigger through the public API panic via `assert!` instead.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or solving a model.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A routine requiring a Hermitian matrix received one that is not.
    #[error("matrix is not Hermitian: max |A - A^dag| entry = {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    /// The generator passed to the unitary exponential is not anti-Hermitian.
    #[error("generator is not anti-Hermitian: max |G + G^dag| entry = {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotAntiHermitian { deviation: f64, tol: f64 },

    /// The dense eigensolver did not converge.
    #[error("Hermitian eigensolver failed to converge for dimension {dim}")]
    EigenFailure { dim: usize },

    /// Two operands or an operator/state pair have incompatible dimensions.
    #[error("dimension mismatch: {left} vs {right} in {context}")]
    DimensionMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },

    /// A tensor product would exceed the supported dense dimension.
    #[error("tensor product dimension {dim} exceeds the dense limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    /// The expansion amplitude left the domain of the spin mapping.
    #[error("expansion amplitude alpha^2 = {alpha_sq:.6} must stay below 2s = {two_s:.1}")]
    AlphaOutOfRange { alpha_sq: f64, two_s: f64 },

    /// A displacement-amplitude rule was used outside its domain.
    #[error("alpha rule {rule} is not defined for {context}")]
    AlphaRuleUnsupported {
        rule: &'static str,
        context: &'static str,
    },

    /// Second-order spin models are single-site only.
    #[error("expansion order {order} is not available for {context}")]
    OrderUnsupported {
        order: &'static str,
        context: &'static str,
    },

    /// The claimed symmetry does not commute with the Hamiltonian.
    #[error("symmetry operator does not commute with the Hamiltonian: |[H, S]| = {commutator_norm:.3e} exceeds {tol:.3e}")]
    SymmetryViolation { commutator_norm: f64, tol: f64 },

    /// A Fock-space embedding or overlap needs more levels than the cutoff provides.
    #[error("Fock cutoff {cutoff} is too small: spin s = {s} needs at least {needed} levels")]
    CutoffTooSmall { cutoff: usize, s: f64, needed: usize },

    /// A quantity was requested from a state of the wrong normalization.
    #[error("state vector norm {norm:.6e} differs from 1 beyond tolerance {tol:.1e}")]
    NotNormalized { norm: f64, tol: f64 },

    /// Both members of a coupled pair must share detuning and pump.
    #[error("pair sites must share detuning and pump for the spin mapping ({left:.6} vs {right:.6})")]
    AsymmetricPair { left: f64, right: f64 },

    /// A phase-boundary scan found more crossings than the physics allows.
    #[error("phase-boundary scan at detuning {delta:.4} found {crossings} onset crossings (at most 2 expected); refine the pump grid")]
    GridTooCoarse { delta: f64, crossings: usize },

    /// A scenario name did not match any registered study.
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    /// A parameter override used a key the scenario does not define.
    #[error("unknown parameter key '{0}'")]
    UnknownKey(String),

    /// A parameter override had an unparsable or out-of-range value.
    #[error("invalid value for '{key}': {message}")]
    InvalidValue { key: String, message: String },
}

impl Error {
    /// Exit-status class used by the command-line front end: candidates are
    /// usage errors (bad names, keys, values) versus numerical failures.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::UnknownScenario(_) | Error::UnknownKey(_) | Error::InvalidValue { .. }
        )
    }
}
