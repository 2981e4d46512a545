//! Symmetry-resolved ground states of Hermitian operators.
//!
//! Most studies in this crate compare ground-state expectation values, and
//! several models (drive-free oscillators and their spin counterparts) end
//! up with a quasi-degenerate ground doublet whose members are exchanged by
//! a conserved involution (photon-number parity, or its spin image). A bare
//! eigensolver returns an arbitrary mixture within such a doublet, which
//! would make overlaps and interference patterns run-to-run stable but
//! physically ambiguous. [`ground_state`] therefore accepts the symmetry
//! operator and, whenever the gap closes below a tolerance, projects onto
//! the even (`+1`) sector — the physical ground state of every model built
//! here at the parameter points where the doublet degenerates.

use crate::error::{Error, Result};
use crate::qmatrix::{
    commutator, expval, expval_real, herm_eig, vec_norm, OperatorMatrix,
    DEFAULT_HERMITICITY_TOL,
};
use crate::C64;

/// Tolerance scale for `[H, S] = 0` and `S^2 = 1` validation.
const SYMMETRY_TOL: f64 = 1e-8;

/// Ground state of a Hermitian operator with spectral context.
#[derive(Clone, Debug)]
pub struct GroundState {
    /// Ground-state energy. For a projected doublet this is the Rayleigh
    /// quotient of the projected state, which agrees with the lowest
    /// eigenvalue to within the degeneracy tolerance.
    pub energy: f64,
    /// Normalized ground-state vector.
    pub state: Vec<C64>,
    /// Gap `E_1 - E_0` of the full spectrum (infinite for dimension 1).
    pub gap: f64,
    /// Whether the even-sector projection was applied to a quasi-degenerate
    /// doublet.
    pub projected: bool,
    /// Expectation value of the symmetry operator in the returned state,
    /// when one was supplied.
    pub symmetry_sector: Option<f64>,
}

/// Degeneracy tolerance used when the caller does not override it:
/// `1e-8 * max(1, |E_0|)`.
pub fn default_degeneracy_tol(ground_energy: f64) -> f64 {
    1e-8 * ground_energy.abs().max(1.0)
}

/// Ground state of `h`, optionally resolved within the `+1` sector of a
/// conserved involution.
///
/// When `symmetry` is provided it must be a Hermitian involution commuting
/// with `h` (both are checked). If the two lowest eigenvalues are closer
/// than `deg_tol` (default [`default_degeneracy_tol`]), the returned state
/// is the even-sector combination `(1 + S)/2` of the doublet; otherwise the
/// lowest eigenvector is returned unchanged.
pub fn ground_state(
    h: &OperatorMatrix,
    symmetry: Option<&OperatorMatrix>,
    deg_tol: Option<f64>,
) -> Result<GroundState> {
    if let Some(s) = symmetry {
        if s.dim() != h.dim() {
            return Err(Error::DimensionMismatch {
                left: h.dim(),
                right: s.dim(),
                context: "ground_state Hamiltonian vs symmetry",
            });
        }
        let scale = h.max_abs().max(1.0);
        let comm_norm = commutator(h, s).max_abs();
        if comm_norm > SYMMETRY_TOL * scale {
            return Err(Error::SymmetryViolation {
                commutator_norm: comm_norm,
                tol: SYMMETRY_TOL * scale,
            });
        }
        let invol = (&(s * s)).max_abs_diff(&OperatorMatrix::identity(s.dim()));
        if invol > SYMMETRY_TOL {
            return Err(Error::SymmetryViolation {
                commutator_norm: invol,
                tol: SYMMETRY_TOL,
            });
        }
    }

    let eig = herm_eig(h, DEFAULT_HERMITICITY_TOL)?;
    let e0 = eig.eigenvalues[0];
    let gap = if eig.len() > 1 {
        eig.eigenvalues[1] - e0
    } else {
        f64::INFINITY
    };
    let tol = deg_tol.unwrap_or_else(|| default_degeneracy_tol(e0));

    let (state, projected) = match symmetry {
        Some(s) if gap <= tol => {
            // Project the doublet onto the even sector, starting from
            // whichever low eigenvector has the larger even component.
            let project_even = |v: &[C64]| -> (Vec<C64>, f64) {
                let sv = s.apply(v);
                let w: Vec<C64> = v
                    .iter()
                    .zip(&sv)
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect();
                let n = vec_norm(&w);
                (w, n)
            };
            let v0 = eig.eigenvector(0);
            let v1 = eig.eigenvector(1);
            let (w0, n0) = project_even(&v0);
            let (w1, n1) = project_even(&v1);
            let (mut w, n) = if n0 >= n1 { (w0, n0) } else { (w1, n1) };
            assert!(
                n > 1e-6,
                "quasi-degenerate doublet has no even-sector component"
            );
            for z in &mut w {
                *z /= n;
            }
            (w, true)
        }
        _ => (eig.eigenvector(0), false),
    };

    let energy = if projected {
        expval_real(h, &state)?
    } else {
        e0
    };
    let symmetry_sector = match symmetry {
        Some(s) => Some(expval(s, &state)?.re),
        None => None,
    };

    Ok(GroundState {
        energy,
        state,
        gap,
        projected,
        symmetry_sector,
    })
}
