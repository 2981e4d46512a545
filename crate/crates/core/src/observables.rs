//! Ground-state observables of the oscillator and their spin-model
//! counterparts.
//!
//! The oscillator side measures photon number `<n>` and quadrature
//! amplitude `<(adag + a)/2>`; the spin side evaluates the functions the
//! displaced expansion maps them onto:
//!
//! * photon number  -> `f_sp = s - <sx>`,
//! * quadrature     -> `f_sq = <sz> / sqrt(2s - alpha^2)` at first order,
//!   with a corrected two-term form at second order,
//! * pair quadrature correlation `C_b = <(adag_1 + a_1)(adag_2 + a_2)>/4`
//!   -> `C_s = <sz_1 sz_2> / (2s - alpha^2)`.
//!
//! States of the two pictures are compared directly through the level
//! correspondence `|n> <-> |s - n, s>_x` ([`embed_spin_state`],
//! [`overlap`]) and visually through Wigner functions ([`wigner`],
//! [`wigner_spin`]). The Wigner value at a phase-space point `(x, y)` is
//! the displaced-parity expectation
//! `W(x, y) = (1/pi) <D(beta) P D(beta)^dag>` with `beta = (x + iy)/sqrt(2)`
//! and `D(beta) = exp(beta adag - conj(beta) a)`; a cached spectral
//! factorization of the displacement generator turns each grid point into
//! two matrix-vector products, which an explicit test pins against the
//! literal `unitary_exp` construction.

use crate::error::{Error, Result};
use crate::hamiltonians::{expansion_denominator, ExpansionOrder};
use crate::qmatrix::{expval_real, herm_eig, vdot, vec_norm, OperatorMatrix,
    DEFAULT_HERMITICITY_TOL};
use crate::spaces::{FockSpace, SpinSpace};
use crate::C64;
use rayon::prelude::*;

fn check_dim(expected: usize, got: usize, context: &'static str) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            left: expected,
            right: got,
            context,
        });
    }
    Ok(())
}

/// Ground-state photon number `<n>` of an oscillator state.
pub fn photon_number(state: &[C64], space: FockSpace) -> Result<f64> {
    check_dim(space.dim(), state.len(), "photon_number state")?;
    expval_real(&space.number(), state)
}

/// Quadrature amplitude `<(adag + a)/2>` of an oscillator state.
pub fn quadrature(state: &[C64], space: FockSpace) -> Result<f64> {
    check_dim(space.dim(), state.len(), "quadrature state")?;
    expval_real(&space.quadrature_op(), state)
}

/// Spin counterpart of the photon number: `f_sp = s - <sx>`.
///
/// The same expression serves both expansion orders.
pub fn f_sp(state: &[C64], space: SpinSpace) -> Result<f64> {
    check_dim(space.dim(), state.len(), "f_sp state")?;
    Ok(space.s() - expval_real(&space.sx(), state)?)
}

/// Spin counterpart of the quadrature amplitude.
///
/// First order: `<sz> / sqrt(2s - alpha^2)`. Second order:
///
/// ```text
/// [5 / (4 sqrt(d)) - (1 + alpha^2) / (4 d^(3/2))] <sz>
///   - <sx sz + sz sx> / (4 d^(3/2)),        d = 2s - alpha^2,
/// ```
///
/// matching the operator map used by the second-order Hamiltonian.
pub fn f_sq(state: &[C64], space: SpinSpace, alpha: f64, order: ExpansionOrder) -> Result<f64> {
    check_dim(space.dim(), state.len(), "f_sq state")?;
    let denom = expansion_denominator(space, alpha)?;
    let mean_sz = expval_real(&space.sz(), state)?;
    match order {
        ExpansionOrder::First => Ok(mean_sz / denom.sqrt()),
        ExpansionOrder::Second => {
            let alpha_sq = alpha * alpha;
            let denom_32 = denom * denom.sqrt();
            let (sx, sz) = (space.sx(), space.sz());
            let anti = &(&sx * &sz) + &(&sz * &sx);
            let mean_anti = expval_real(&anti, state)?;
            Ok(
                (5.0 / (4.0 * denom.sqrt()) - (1.0 + alpha_sq) / (4.0 * denom_32)) * mean_sz
                    - mean_anti / (4.0 * denom_32),
            )
        }
    }
}

/// Quadrature correlation `C_b = <(adag_1 + a_1)(adag_2 + a_2)>/4` of a
/// two-oscillator state on `site (x) site`.
pub fn correlation_boson(state: &[C64], site: FockSpace) -> Result<f64> {
    let d = site.dim();
    check_dim(d * d, state.len(), "correlation_boson state")?;
    let two_x = {
        let mut m = site.annihilation();
        m.scaled_add(C64::new(1.0, 0.0), &site.creation());
        m
    };
    let op = crate::qmatrix::kron(&two_x, &two_x)?;
    Ok(expval_real(&op, state)? / 4.0)
}

/// Spin counterpart of the pair correlation:
/// `C_s = <sz_1 sz_2> / (2s - alpha^2)`.
pub fn correlation_spin(state: &[C64], site: SpinSpace, alpha: f64) -> Result<f64> {
    let d = site.dim();
    check_dim(d * d, state.len(), "correlation_spin state")?;
    let denom = expansion_denominator(site, alpha)?;
    let op = crate::qmatrix::kron(&site.sz(), &site.sz())?;
    Ok(expval_real(&op, state)? / denom)
}

/// Express a spin state as an oscillator state through the level
/// correspondence `|s - n, s>_x <-> |n>`.
///
/// The amplitude of the spin state on the `n`-th `sx` eigenvector (in the
/// pinned phases of [`SpinSpace::x_basis`]) becomes the amplitude on Fock
/// level `n`; the Fock space must provide at least `2s + 1` levels.
pub fn embed_spin_state(state: &[C64], spin: SpinSpace, fock: FockSpace) -> Result<Vec<C64>> {
    check_dim(spin.dim(), state.len(), "embed_spin_state state")?;
    if fock.dim() < spin.dim() {
        return Err(Error::CutoffTooSmall {
            cutoff: fock.cutoff(),
            s: spin.s(),
            needed: spin.dim(),
        });
    }
    let u = spin.x_basis();
    let coeffs = u.apply_adjoint(state); // <x_n | state>
    let mut out = vec![C64::new(0.0, 0.0); fock.dim()];
    out[..coeffs.len()].copy_from_slice(&coeffs);
    Ok(out)
}

/// Overlap magnitude between an oscillator state and a spin state,
/// `|sum_n <psi_b|n> <s - n, s|psi_s>_x|`, clamped to `[0, 1]`.
pub fn overlap(
    boson_state: &[C64],
    fock: FockSpace,
    spin_state: &[C64],
    spin: SpinSpace,
) -> Result<f64> {
    check_dim(fock.dim(), boson_state.len(), "overlap oscillator state")?;
    for (name, v) in [("oscillator", boson_state), ("spin", spin_state)] {
        let norm = vec_norm(v);
        if (norm - 1.0).abs() > crate::qmatrix::STATE_NORM_TOL {
            log::debug!("overlap: {name} state norm deviates: {norm}");
            return Err(Error::NotNormalized {
                norm,
                tol: crate::qmatrix::STATE_NORM_TOL,
            });
        }
    }
    let embedded = embed_spin_state(spin_state, spin, fock)?;
    Ok(vdot(boson_state, &embedded).norm().min(1.0))
}

/// Rectangular phase-space grid for Wigner evaluation.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, nx: usize, y_min: f64, y_max: f64, ny: usize) -> Self {
        assert!(x_min < x_max && y_min < y_max, "grid bounds must be ordered");
        assert!(nx >= 2 && ny >= 2, "grid needs at least 2 points per axis");
        GridSpec {
            x_min,
            x_max,
            nx,
            y_min,
            y_max,
            ny,
        }
    }

    /// Square grid `[-half_width, half_width]^2` with `points` per axis.
    pub fn square(half_width: f64, points: usize) -> Self {
        assert!(half_width > 0.0, "grid half-width must be positive");
        GridSpec::new(-half_width, half_width, points, -half_width, half_width, points)
    }

    pub fn x_axis(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn y_axis(&self) -> Vec<f64> {
        linspace(self.y_min, self.y_max, self.ny)
    }
}

impl Default for GridSpec {
    /// The panel used throughout: `[-4, 4]^2` at 161 points per axis.
    fn default() -> Self {
        GridSpec::square(4.0, 161)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Wigner function sampled on a [`GridSpec`].
///
/// Values are stored row-major with `x` fastest: `value(ix, iy)` is the
/// sample at `(x_axis[ix], y_axis[iy])`.
#[derive(Clone, Debug)]
pub struct WignerGrid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<f64>,
}

impl WignerGrid {
    pub fn x_axis(&self) -> &[f64] {
        &self.xs
    }

    pub fn y_axis(&self) -> &[f64] {
        &self.ys
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.xs.len() + ix]
    }

    /// All samples in storage order (`x` fastest).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Riemann-sum estimate of `integral W dx dy`.
    pub fn integral(&self) -> f64 {
        let dx = (self.xs[self.xs.len() - 1] - self.xs[0]) / (self.xs.len() - 1) as f64;
        let dy = (self.ys[self.ys.len() - 1] - self.ys[0]) / (self.ys.len() - 1) as f64;
        self.values.iter().sum::<f64>() * dx * dy
    }

    /// Largest deviation `|W(x, y) - W(-x, -y)|` over the grid. Only
    /// meaningful on origin-symmetric grids, which is asserted.
    pub fn point_symmetry_deviation(&self) -> f64 {
        let sym = |axis: &[f64]| (axis[0] + axis[axis.len() - 1]).abs() < 1e-12;
        assert!(
            sym(&self.xs) && sym(&self.ys),
            "point symmetry needs an origin-symmetric grid"
        );
        let (nx, ny) = (self.xs.len(), self.ys.len());
        let mut max = 0.0f64;
        for iy in 0..ny {
            for ix in 0..nx {
                let d = (self.value(ix, iy) - self.value(nx - 1 - ix, ny - 1 - iy)).abs();
                max = max.max(d);
            }
        }
        max
    }
}

/// Cached spectral pieces of the displacement generator for one Fock space:
/// `adag - a = i H0` with `H0 = V diag(lambda) V^dag` Hermitian, so
/// `exp(r (adag - a)) = V diag(e^{i r lambda}) V^dag`. A rotation
/// `exp(i theta n)` on either side steers the displacement direction.
struct DisplacementCache {
    dim: usize,
    v: OperatorMatrix,
    lambda: Vec<f64>,
}

impl DisplacementCache {
    fn new(space: FockSpace) -> Self {
        let a = space.annihilation();
        // H0 = i (a - adag) is Hermitian.
        let mut h0 = a.clone();
        h0.scaled_add(C64::new(-1.0, 0.0), &a.adjoint());
        h0.scale(C64::new(0.0, 1.0));
        let eig = herm_eig(&h0, DEFAULT_HERMITICITY_TOL)
            .expect("displacement generator is Hermitian by construction");
        DisplacementCache {
            dim: space.dim(),
            v: eig.vectors,
            lambda: eig.eigenvalues,
        }
    }

    /// `w = D(beta)^dag R(theta) psi` up to a diagonal phase that cancels in
    /// parity expectations: returns `D_r^dag R(theta)^dag psi` with
    /// `beta = r e^{i theta}`.
    fn displaced_frame(&self, beta: C64, psi: &[C64]) -> Vec<C64> {
        let r = beta.norm();
        let theta = if r == 0.0 { 0.0 } else { beta.im.atan2(beta.re) };
        // psi1 = R(theta)^dag psi, with R(theta) = exp(i theta n)
        let psi1: Vec<C64> = psi
            .iter()
            .enumerate()
            .map(|(n, &z)| z * C64::new(0.0, -theta * n as f64).exp())
            .collect();
        // psi2 = V^dag psi1
        let psi2 = self.v.apply_adjoint(&psi1);
        // psi3 = diag(e^{-i r lambda}) psi2   (the adjoint of exp(r(adag - a)))
        let psi3: Vec<C64> = psi2
            .iter()
            .zip(&self.lambda)
            .map(|(&z, &l)| z * C64::new(0.0, -r * l).exp())
            .collect();
        // w = V psi3; the final frame rotation R(theta) only changes phases
        // of the number-basis amplitudes and is dropped.
        self.v.apply(&psi3)
    }

    /// Dense `D(beta)` matrix for the density-operator path.
    fn displacement_matrix(&self, beta: C64) -> OperatorMatrix {
        let r = beta.norm();
        let theta = if r == 0.0 { 0.0 } else { beta.im.atan2(beta.re) };
        let n = self.dim;
        // V diag(e^{i r lambda}) V^dag, rotated by R(theta) on both sides.
        let mut scaled = self.v.clone();
        for k in 0..n {
            let phase = C64::new(0.0, r * self.lambda[k]).exp();
            for i in 0..n {
                scaled[(i, k)] *= phase;
            }
        }
        let mut d = &scaled * &self.v.adjoint();
        for i in 0..n {
            let left = C64::new(0.0, theta * i as f64).exp();
            for j in 0..n {
                let right = C64::new(0.0, -theta * j as f64).exp();
                d[(i, j)] *= left * right;
            }
        }
        d
    }
}

fn warn_if_truncation_tight(nbar: f64, space: FockSpace) {
    if nbar > space.cutoff() as f64 / 4.0 {
        log::warn!(
            "Wigner evaluation for a state with <n> = {nbar:.3} at cutoff {}; \
             phase-space tails may be truncated",
            space.cutoff()
        );
    }
}

/// Wigner function of a pure oscillator state.
pub fn wigner(state: &[C64], space: FockSpace, grid: &GridSpec) -> Result<WignerGrid> {
    check_dim(space.dim(), state.len(), "wigner state")?;
    warn_if_truncation_tight(photon_number(state, space)?, space);
    let cache = DisplacementCache::new(space);
    let xs = grid.x_axis();
    let ys = grid.y_axis();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let rows: Vec<Vec<f64>> = ys
        .par_iter()
        .map(|&y| {
            xs.iter()
                .map(|&x| {
                    let beta = C64::new(x * inv_sqrt2, y * inv_sqrt2);
                    let w = cache.displaced_frame(beta, state);
                    let parity_mean: f64 = w
                        .iter()
                        .enumerate()
                        .map(|(n, z)| if n % 2 == 0 { z.norm_sqr() } else { -z.norm_sqr() })
                        .sum();
                    parity_mean / std::f64::consts::PI
                })
                .collect()
        })
        .collect();
    Ok(WignerGrid {
        xs,
        ys,
        values: rows.concat(),
    })
}

/// Wigner function of a density operator (diagnostic path; `O(dim^3)` per
/// grid point, against `O(dim^2)` for the pure-state entry point).
pub fn wigner_density(rho: &OperatorMatrix, space: FockSpace, grid: &GridSpec) -> Result<WignerGrid> {
    check_dim(space.dim(), rho.dim(), "wigner density operator")?;
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > 1e-8 || trace.im.abs() > 1e-10 {
        return Err(Error::NotNormalized {
            norm: trace.norm(),
            tol: 1e-8,
        });
    }
    let nbar = (&space.number() * rho).trace().re;
    warn_if_truncation_tight(nbar, space);
    let cache = DisplacementCache::new(space);
    let xs = grid.x_axis();
    let ys = grid.y_axis();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let rows: Vec<Vec<f64>> = ys
        .par_iter()
        .map(|&y| {
            xs.iter()
                .map(|&x| {
                    let beta = C64::new(x * inv_sqrt2, y * inv_sqrt2);
                    let d = cache.displacement_matrix(beta);
                    let m = &(&d.adjoint() * rho) * &d;
                    let parity_mean: f64 = (0..m.dim())
                        .map(|n| {
                            let v = m[(n, n)].re;
                            if n % 2 == 0 {
                                v
                            } else {
                                -v
                            }
                        })
                        .sum();
                    parity_mean / std::f64::consts::PI
                })
                .collect()
        })
        .collect();
    Ok(WignerGrid {
        xs,
        ys,
        values: rows.concat(),
    })
}

/// Wigner function of a spin state, evaluated on the oscillator the spin
/// model approximates (embed through [`embed_spin_state`], then sample).
pub fn wigner_spin(
    state: &[C64],
    spin: SpinSpace,
    fock: FockSpace,
    grid: &GridSpec,
) -> Result<WignerGrid> {
    let embedded = embed_spin_state(state, spin, fock)?;
    wigner(&embedded, fock, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::{kron, unitary_exp};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn fock_state(space: FockSpace, n: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); space.dim()];
        v[n] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn photon_number_counts_fock_levels() {
        let space = FockSpace::new(16);
        assert_abs_diff_eq!(
            photon_number(&fock_state(space, 3), space).unwrap(),
            3.0,
            epsilon = 1e-14
        );
        let alpha = C64::new(0.6, -0.4);
        assert_abs_diff_eq!(
            photon_number(&space.coherent_state(alpha), space).unwrap(),
            alpha.norm_sqr(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn quadrature_of_a_real_coherent_state_is_its_amplitude() {
        let space = FockSpace::new(20);
        let v = space.coherent_state(C64::new(0.8, 0.0));
        assert_abs_diff_eq!(quadrature(&v, space).unwrap(), 0.8, epsilon = 1e-9);
    }

    #[test]
    fn f_sp_counts_x_basis_levels() {
        let space = SpinSpace::new(2.0).unwrap();
        let u = space.x_basis();
        for n in [0usize, 1, 3] {
            assert_abs_diff_eq!(
                f_sp(&u.column(n), space).unwrap(),
                n as f64,
                epsilon = 1e-11
            );
        }
    }

    #[test]
    fn f_sq_first_order_matches_the_scaled_magnetization() {
        let space = SpinSpace::new(2.0).unwrap();
        // z-polarized state: <sz> = s = 2, alpha = 0 -> f_sq = 2/sqrt(4) = 1
        let top = {
            let mut v = vec![C64::new(0.0, 0.0); space.dim()];
            v[0] = C64::new(1.0, 0.0);
            v
        };
        assert_abs_diff_eq!(
            f_sq(&top, space, 0.0, ExpansionOrder::First).unwrap(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn f_sq_second_order_matches_an_independent_evaluation() {
        let space = SpinSpace::new(1.0).unwrap();
        let alpha = 0.3;
        let state = space.spin_coherent(0.5);
        let denom: f64 = 2.0 - alpha * alpha;
        let sz_mean = expval_real(&space.sz(), &state).unwrap();
        let anti = &(&space.sx() * &space.sz()) + &(&space.sz() * &space.sx());
        let anti_mean = expval_real(&anti, &state).unwrap();
        let expected = (5.0 / (4.0 * denom.sqrt())
            - (1.0 + alpha * alpha) / (4.0 * denom * denom.sqrt()))
            * sz_mean
            - anti_mean / (4.0 * denom * denom.sqrt());
        assert_abs_diff_eq!(
            f_sq(&state, space, alpha, ExpansionOrder::Second).unwrap(),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn f_sq_rejects_out_of_range_amplitudes() {
        let space = SpinSpace::new(0.5).unwrap();
        let state = space.x_basis().column(0);
        assert!(matches!(
            f_sq(&state, space, 1.1, ExpansionOrder::First),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn pair_correlations_factorize_on_product_states() {
        let fock = FockSpace::new(15);
        let v1 = fock.coherent_state(C64::new(0.5, 0.0));
        let v2 = fock.coherent_state(C64::new(-0.7, 0.0));
        let joint: Vec<C64> = v1
            .iter()
            .flat_map(|a| v2.iter().map(move |b| a * b))
            .collect();
        assert_abs_diff_eq!(
            correlation_boson(&joint, fock).unwrap(),
            0.5 * -0.7,
            epsilon = 1e-8
        );

        let spin = SpinSpace::new(1.0).unwrap();
        // |m=1> (x) |m=-1>: <sz sz> = -1, denom = 2 - 0.25
        let mut prod = vec![C64::new(0.0, 0.0); 9];
        prod[0 * 3 + 2] = C64::new(1.0, 0.0);
        assert_abs_diff_eq!(
            correlation_spin(&prod, spin, 0.5).unwrap(),
            -1.0 / 1.75,
            epsilon = 1e-13
        );
    }

    #[test]
    fn embedding_maps_x_levels_onto_fock_levels() {
        let spin = SpinSpace::new(2.0).unwrap();
        let fock = FockSpace::new(10);
        for n in 0..spin.dim() {
            let embedded = embed_spin_state(&spin.x_basis().column(n), spin, fock).unwrap();
            let expected = fock_state(fock, n);
            for (a, b) in embedded.iter().zip(&expected) {
                assert!((a - b).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn embedding_requires_enough_fock_levels() {
        let spin = SpinSpace::new(10.0).unwrap();
        let fock = FockSpace::new(10);
        let state = spin.x_basis().column(0);
        assert!(matches!(
            embed_spin_state(&state, spin, fock),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn overlap_is_unity_on_matched_levels() {
        let spin = SpinSpace::new(2.0).unwrap();
        let fock = FockSpace::new(12);
        let b = fock_state(fock, 1);
        let s = spin.x_basis().column(1);
        assert_abs_diff_eq!(overlap(&b, fock, &s, spin).unwrap(), 1.0, epsilon = 1e-11);
        let s_other = spin.x_basis().column(2);
        assert!(overlap(&b, fock, &s_other, spin).unwrap() < 1e-10);
    }

    #[test]
    fn wigner_of_the_vacuum_is_a_unit_gaussian() {
        let space = FockSpace::new(30);
        let grid = GridSpec::square(3.0, 41);
        let w = wigner(&space.vacuum(), space, &grid).unwrap();
        // center sample
        assert_abs_diff_eq!(w.value(20, 20), 1.0 / PI, epsilon = 1e-12);
        // closed form at an off-center point
        let (x, y) = (w.x_axis()[30], w.y_axis()[24]);
        assert_abs_diff_eq!(
            w.value(30, 24),
            (1.0 / PI) * (-(x * x + y * y)).exp(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(w.integral(), 1.0, epsilon = 1e-3);
        assert!(w.point_symmetry_deviation() < 1e-13);
    }

    #[test]
    fn wigner_of_a_coherent_state_is_a_displaced_gaussian() {
        let space = FockSpace::new(20);
        let v = space.coherent_state(C64::new(0.8, 0.0));
        let grid = GridSpec::square(3.2, 33);
        let w = wigner(&v, space, &grid).unwrap();
        // peak at x = sqrt(2)*0.8, y = 0: find the closest grid point
        let x_peak = 2f64.sqrt() * 0.8;
        let ix = w
            .x_axis()
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (*a - x_peak).abs().total_cmp(&(*b - x_peak).abs())
            })
            .unwrap()
            .0;
        let iy = 16; // y = 0
        let x = w.x_axis()[ix];
        let expected = (1.0 / PI) * (-((x - x_peak).powi(2))).exp();
        assert_abs_diff_eq!(w.value(ix, iy), expected, epsilon = 1e-7);
    }

    #[test]
    fn wigner_at_the_origin_is_the_parity_expectation() {
        // For any even-parity state, W(0, 0) = 1/pi exactly.
        let space = FockSpace::new(20);
        let plus = space.coherent_state(C64::new(1.1, 0.0));
        let minus = space.coherent_state(C64::new(-1.1, 0.0));
        let mut cat: Vec<C64> = plus.iter().zip(&minus).map(|(a, b)| a + b).collect();
        let norm = vec_norm(&cat);
        for z in &mut cat {
            *z /= norm;
        }
        let grid = GridSpec::square(1.0, 3); // includes the origin
        let w = wigner(&cat, space, &grid).unwrap();
        assert_abs_diff_eq!(w.value(1, 1), 1.0 / PI, epsilon = 1e-12);
    }

    #[test]
    fn fast_wigner_path_matches_the_literal_displacement() {
        let space = FockSpace::new(14);
        let state = space.coherent_state(C64::new(0.7, 0.2));
        let cache = DisplacementCache::new(space);
        let a = space.annihilation();
        for &(x, y) in &[(0.0, 0.0), (1.3, -0.6), (-2.1, 0.4), (0.5, 2.2)] {
            let beta = C64::new(x, y) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            // literal route: D = unitary_exp(beta adag - conj(beta) a)
            let mut g = a.adjoint();
            g.scale(beta);
            g.scaled_add(-beta.conj(), &a);
            let d = unitary_exp(&g).unwrap();
            let phi = d.apply_adjoint(&state);
            let literal: f64 = phi
                .iter()
                .enumerate()
                .map(|(n, z)| if n % 2 == 0 { z.norm_sqr() } else { -z.norm_sqr() })
                .sum::<f64>()
                / PI;
            let fast = {
                let w = cache.displaced_frame(beta, &state);
                w.iter()
                    .enumerate()
                    .map(|(n, z)| if n % 2 == 0 { z.norm_sqr() } else { -z.norm_sqr() })
                    .sum::<f64>()
                    / PI
            };
            assert_abs_diff_eq!(fast, literal, epsilon = 1e-11);
            // and the dense displacement matrix agrees with the literal one
            assert!(cache.displacement_matrix(beta).max_abs_diff(&d) < 1e-11);
        }
    }

    #[test]
    fn density_path_agrees_with_the_pure_path() {
        let space = FockSpace::new(10);
        let state = space.coherent_state(C64::new(0.4, 0.5));
        let rho = OperatorMatrix::from_fn(space.dim(), |i, j| state[i] * state[j].conj());
        let grid = GridSpec::square(2.0, 9);
        let wp = wigner(&state, space, &grid).unwrap();
        let wd = wigner_density(&rho, space, &grid).unwrap();
        for (a, b) in wp.values().iter().zip(wd.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-11);
        }
    }

    #[test]
    fn spin_wigner_of_the_top_level_matches_the_vacuum() {
        let spin = SpinSpace::new(2.0).unwrap();
        let fock = FockSpace::new(8);
        let grid = GridSpec::square(2.5, 15);
        let ws = wigner_spin(&spin.x_basis().column(0), spin, fock, &grid).unwrap();
        let wv = wigner(&fock.vacuum(), fock, &grid).unwrap();
        for (a, b) in ws.values().iter().zip(wv.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-11);
        }
    }

    #[test]
    fn two_site_kron_helper_orders_like_the_builders() {
        // guard against index-order regressions between correlation ops and
        // the pair Hamiltonian builders
        let spin = SpinSpace::new(0.5).unwrap();
        let op = kron(&spin.sz(), &OperatorMatrix::identity(2)).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); 4];
        v[2] = C64::new(1.0, 0.0); // |down, up>
        assert_abs_diff_eq!(expval_real(&op, &v).unwrap(), -0.5, epsilon = 1e-14);
    }
}
