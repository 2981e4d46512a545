//! Kerr parametric oscillators (KPOs) in truncated Fock space and their
//! effective spin-`s` counterparts.
//!
//! A single KPO with Kerr coefficient `K` (the unit of energy throughout),
//! detuning `Δ̃`, two-photon pump `p̃`, and linear drive `ε̃` is described in
//! the rotating frame by
//!
//! ```text
//! H_b = Δ̃ n̂ + ½ â†² â² − (p̃/2)(â†² + â²) − ε̃ (â† + â).
//! ```
//!
//! Expanding around a displaced vacuum with real amplitude `α` and truncating
//! the Holstein–Primakoff square roots maps the oscillator onto a spin of
//! size `s`; the displacement spreads the `2s + 1` retained levels over the
//! low-lying oscillator states so that even modest spins reproduce photon
//! numbers, quadratures, interference fringes, and two-site correlations of
//! the driven oscillator. This crate builds both pictures as dense matrices,
//! solves for ground states, evaluates the mapped observables side by side,
//! and runs self-consistent mean-field scans for coupled arrays.
//!
//! Modules are layered bottom-up:
//!
//! * [`qmatrix`] — dense complex operators, Hermitian eigensolver, matrix
//!   exponential of anti-Hermitian generators.
//! * [`spaces`] — truncated Fock space and spin-`s` space with their
//!   elementary operators and basis changes.
//! * [`hamiltonians`] — oscillator, spin-model, and mean-field Hamiltonian
//!   builders plus the displacement-amplitude rules.
//! * [`groundstate`] — symmetry-resolved ground states of Hermitian
//!   operators.
//! * [`observables`] — photon number, quadrature, spin-mapped estimators,
//!   pair correlators, state overlaps, and Wigner functions.
//! * [`meanfield`] — self-consistent single-site solver, magnetization
//!   curves, and phase boundaries.
//! * [`scenarios`] — canned parameter studies producing tabulated series.
//! * [`acceptance`] — the end-to-end checks gating a release.

pub mod acceptance;
pub mod error;
pub mod groundstate;
pub mod hamiltonians;
pub mod meanfield;
pub mod observables;
pub mod qmatrix;
pub mod scenarios;
pub mod spaces;

/// Complex scalar used for all operator entries and state amplitudes.
pub type C64 = num_complex::Complex64;

pub use acceptance::{all_passed, render_reports, run_all, AcceptanceConfig, CheckReport};
pub use error::{Error, Result};
pub use groundstate::{ground_state, GroundState};
pub use hamiltonians::{
    alpha_c, alpha_c0, resolve_alpha, AlphaRule, ExpansionOrder, KpoParams, PairParams,
    SpinModelParams,
};
pub use meanfield::{
    critical_pumps, magnetization_curve, phase_boundary, solve_mf, stability_indicator,
    MeanFieldConfig, MeanFieldPicture, MeanFieldSolution, PhaseBoundary,
};
pub use observables::{GridSpec, WignerGrid};
pub use scenarios::{
    apply_override, boson_ground, parse_alpha_rule, run_scenario, spin_ground, ScenarioId,
    ScenarioOutput, ScenarioParams, SeriesTable,
};
pub use qmatrix::{herm_eig, kron, unitary_exp, EigenDecomposition, OperatorMatrix};
pub use spaces::{FockSpace, SpinSpace};
