//! Shared helpers for the integration tests: an independent cyclic Jacobi
//! eigensolver used as a cross-check oracle for the production eigensolver,
//! and seeded random Hermitian matrix generators.

use kpo_spinlab::{OperatorMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sum of squared magnitudes of the off-diagonal entries.
fn off_diagonal_norm_sq(a: &OperatorMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// ascending. Completely independent of the production eigensolver: plain
/// two-sided unitary 2x2 rotations applied until the off-diagonal mass is
/// negligible. O(n^4)-ish and only meant for small oracle matrices.
pub fn jacobi_eigenvalues(a: &OperatorMatrix, tol: f64) -> Vec<f64> {
    let n = a.dim();
    let mut m = a.clone();
    let scale = m.frobenius_norm().max(1.0);
    let threshold = (tol * scale).powi(2);
    let max_sweeps = 100;
    for _ in 0..max_sweeps {
        if off_diagonal_norm_sq(&m) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= f64::EPSILON * scale {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase = apq / mag;

                // Columns: col_p <- c*col_p - s*conj(phase)*col_q,
                //          col_q <- s*phase*col_p + c*col_q  (A <- A R).
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = c * aip - s * phase.conj() * aiq;
                    m[(i, q)] = s * phase * aip + c * aiq;
                }
                // Rows (A <- R^dagger A): mirror with conjugated coefficients.
                for j in 0..n {
                    let apj = m[(p, j)];
                    let aqj = m[(q, j)];
                    m[(p, j)] = c * apj - s * phase * aqj;
                    m[(q, j)] = s * phase.conj() * apj + c * aqj;
                }
            }
        }
    }
    assert!(
        off_diagonal_norm_sq(&m) <= threshold,
        "Jacobi sweeps failed to converge: off-diagonal {:.3e} vs threshold {:.3e}",
        off_diagonal_norm_sq(&m).sqrt(),
        threshold.sqrt()
    );
    let mut eigenvalues: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    eigenvalues.sort_by(f64::total_cmp);
    eigenvalues
}

/// Seeded random Hermitian matrix with entries of order one.
pub fn random_hermitian(dim: usize, seed: u64) -> OperatorMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = OperatorMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mut h = g.adjoint();
    h.scaled_add(C64::new(1.0, 0.0), &g);
    h.scale(C64::new(0.5, 0.0));
    h
}

/// Seeded random normalized state vector.
#[allow(dead_code)]
pub fn random_state(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}
