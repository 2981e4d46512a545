//! Cross-validation of the production Hermitian eigensolver against an
//! independent cyclic Jacobi diagonalization, on random and structured
//! matrices, plus residual checks of the returned eigenpairs.

mod common;

use common::{jacobi_eigenvalues, random_hermitian};
use kpo_spinlab::{
    herm_eig, FockSpace, KpoParams, OperatorMatrix, SpinSpace, C64,
};

const TOL: f64 = 1e-10;

fn assert_spectra_match(h: &OperatorMatrix, label: &str) {
    let scale = h.frobenius_norm().max(1.0);
    let reference = jacobi_eigenvalues(h, 1e-13);
    let eig = herm_eig(h, 1e-8).expect(label);
    assert_eq!(reference.len(), eig.eigenvalues.len());
    for (k, (r, e)) in reference.iter().zip(&eig.eigenvalues).enumerate() {
        assert!(
            (r - e).abs() <= TOL * scale,
            "{label}: eigenvalue {k} differs: jacobi {r:.15e}, production {e:.15e}"
        );
    }
    // Residual check ||H v - lambda v|| for every returned pair.
    for k in 0..eig.eigenvalues.len() {
        let v = eig.eigenvector(k);
        let hv = h.apply(&v);
        let lambda = eig.eigenvalues[k];
        let residual: f64 = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(
            residual <= TOL * scale,
            "{label}: eigenpair {k} residual {residual:.3e}"
        );
    }
}

#[test]
fn random_hermitian_spectrum_matches_jacobi() {
    for seed in [7u64, 8, 9] {
        let h = random_hermitian(16, seed);
        assert_spectra_match(&h, &format!("random seed {seed}"));
    }
}

#[test]
fn oscillator_hamiltonian_spectrum_matches_jacobi() {
    let space = FockSpace::new(12);
    let h = kpo_spinlab::hamiltonians::build_kpo(space, &KpoParams::new(1.0, 2.0, 0.3));
    assert_spectra_match(&h, "driven oscillator");
}

#[test]
fn spin_hamiltonian_spectrum_matches_jacobi() {
    let space = SpinSpace::new(4.0).unwrap();
    let sp = kpo_spinlab::SpinModelParams::first_order(kpo_spinlab::AlphaRule::Semiclassical);
    let h = kpo_spinlab::hamiltonians::build_spin(space, &KpoParams::new(1.0, 2.0, 0.1), &sp)
        .unwrap();
    assert_spectra_match(&h, "spin model");
}

#[test]
fn diagonal_matrix_spectrum_is_exact() {
    let diag: Vec<f64> = (0..10).map(|n| n as f64 - 4.5).collect();
    let h = OperatorMatrix::from_real_diag(&diag);
    let reference = jacobi_eigenvalues(&h, 1e-13);
    let eig = herm_eig(&h, 1e-10).unwrap();
    let mut expected = diag.clone();
    expected.sort_by(f64::total_cmp);
    for k in 0..diag.len() {
        assert!((reference[k] - expected[k]).abs() < 1e-14);
        assert!((eig.eigenvalues[k] - expected[k]).abs() < 1e-12);
    }
}

#[test]
fn jacobi_handles_degenerate_doublets() {
    // Parity-symmetric double-well spectrum: near-degenerate pairs must not
    // trip either solver.
    let space = FockSpace::new(16);
    let h = kpo_spinlab::hamiltonians::build_kpo(space, &KpoParams::new(0.0, 3.0, 0.0));
    assert_spectra_match(&h, "degenerate doublets");
}

#[test]
fn jacobi_itself_reproduces_a_closed_form() {
    // 2x2 Hermitian [[a, m], [conj(m), b]] has eigenvalues
    // (a+b)/2 -+ sqrt(((a-b)/2)^2 + |m|^2).
    let mut h = OperatorMatrix::zeros(2);
    h[(0, 0)] = C64::new(0.7, 0.0);
    h[(1, 1)] = C64::new(-0.3, 0.0);
    h[(0, 1)] = C64::new(0.25, -0.4);
    h[(1, 0)] = C64::new(0.25, 0.4);
    let mid = 0.2;
    let radius = (0.5f64.powi(2) + 0.25f64.powi(2) + 0.4f64.powi(2)).sqrt();
    let reference = jacobi_eigenvalues(&h, 1e-14);
    assert!((reference[0] - (mid - radius)).abs() < 1e-14);
    assert!((reference[1] - (mid + radius)).abs() < 1e-14);
}
