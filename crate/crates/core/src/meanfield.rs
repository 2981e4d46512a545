//! Self-consistent mean-field treatment of a lattice of coupled
//! oscillators, in both pictures.
//!
//! Decoupling the hopping replaces each neighbor by its mean displacement:
//! the oscillator picture solves `x = <(adag + a)/2>` under
//! `H(x) = H_osc - J x (adag + a)`, the spin picture solves `m = <sz>`
//! under `H(m) = H_spin - [2J/(2s - alpha^2)] m sz` with the drive-free
//! semiclassical amplitude. The scaled spin order parameter
//! `m / sqrt(2s - alpha^2)` is directly comparable to `x`.
//!
//! [`solve_mf`] runs the damped fixed-point iteration;
//! [`magnetization_curve`] sweeps it over a pump grid with warm starts.
//! Phase boundaries are located differently: the iteration slows down
//! critically near a transition, while the transition of a continuous
//! (pitchfork) onset sits exactly where the symmetric solution loses
//! linear stability. [`stability_indicator`] evaluates that criterion in
//! closed form — the slope of the self-consistency map at zero order
//! parameter from parity-resolved second-order perturbation theory — and
//! [`critical_pumps`] / [`phase_boundary`] bisect its sign changes,
//! which is machine-sharp and needs one small diagonalization per probe.

use crate::error::{Error, Result};
use crate::groundstate::ground_state;
use crate::hamiltonians::{
    alpha_c0, build_kpo, build_spin, expansion_denominator, AlphaRule, KpoParams, SpinModelParams,
};
use crate::qmatrix::{expval_real, herm_eig, vdot, OperatorMatrix, DEFAULT_HERMITICITY_TOL};
use crate::spaces::{FockSpace, SpinSpace};
use crate::C64;

/// Which picture the mean-field equations are solved in.
#[derive(Copy, Clone, Debug)]
pub enum MeanFieldPicture {
    /// Truncated oscillator; order parameter `x = <(adag + a)/2>`.
    Boson(FockSpace),
    /// Effective spin at first order with the drive-free semiclassical
    /// amplitude; order parameter `m = <sz>`.
    Spin(SpinSpace),
}

impl MeanFieldPicture {
    pub fn name(&self) -> &'static str {
        match self {
            MeanFieldPicture::Boson(_) => "boson",
            MeanFieldPicture::Spin(_) => "spin",
        }
    }
}

/// Knobs of the damped self-consistency iteration.
#[derive(Copy, Clone, Debug)]
pub struct MeanFieldConfig {
    /// Convergence threshold on the undamped residual `|obs(x) - x|`.
    pub tol: f64,
    /// Fraction of the new observable mixed into the next iterate.
    pub damping: f64,
    /// Starting value when no warm start is given; small and positive so
    /// the iteration can escape the trivial fixed point.
    pub seed: f64,
    /// Iteration budget. Near a continuous transition convergence to
    /// `tol` slows critically; the solution then reports
    /// `converged: false` with the (still accurate) last iterate.
    pub max_iter: usize,
    /// Target bracket width of the critical-point bisection.
    pub refine_width: f64,
}

impl Default for MeanFieldConfig {
    fn default() -> Self {
        MeanFieldConfig {
            tol: 1e-10,
            damping: 0.5,
            seed: 1e-3,
            max_iter: 2000,
            refine_width: 1e-4,
        }
    }
}

/// Outcome of one self-consistent solve.
#[derive(Copy, Clone, Debug)]
pub struct MeanFieldSolution {
    /// Fixed point in the picture's native units (`x`, or `m`).
    pub order_param: f64,
    /// Order parameter on the common scale: `x` itself, or
    /// `m / sqrt(2s - alpha^2)`.
    pub scaled: f64,
    /// Iterations actually run.
    pub iterations: usize,
    /// Whether the residual dropped below `tol` within the budget.
    pub converged: bool,
    /// Final undamped residual `|obs(x) - x|`.
    pub residual: f64,
}

/// Pieces of the mean-field problem shared by the solver and the
/// stability indicator.
struct MfProblem {
    /// Hamiltonian at zero order parameter.
    h0: OperatorMatrix,
    /// Operator multiplying the order parameter in the decoupled term.
    linear_op: OperatorMatrix,
    /// Coefficient of that term: `H = h0 - lin_coeff * x * linear_op`.
    lin_coeff: f64,
    /// Observable closing the loop, as (operator, prefactor):
    /// `obs = prefactor * <op>`.
    obs_op: OperatorMatrix,
    obs_scale: f64,
    /// Symmetry flipping the sign of the order parameter; used to project
    /// degenerate ground doublets at exactly zero order parameter.
    parity: OperatorMatrix,
    /// Basis change making `parity` diagonal with signs `(-1)^k`
    /// (`None` when it already is).
    parity_frame: Option<OperatorMatrix>,
    /// Conversion from native to common-scale order parameter.
    report_scale: f64,
}

fn mf_problem(picture: &MeanFieldPicture, kpo: &KpoParams, coupling: f64) -> Result<MfProblem> {
    match picture {
        MeanFieldPicture::Boson(space) => {
            let a = space.annihilation();
            let mut b = a.adjoint();
            b.scaled_add(C64::new(1.0, 0.0), &a);
            Ok(MfProblem {
                h0: build_kpo(*space, kpo),
                linear_op: b.clone(),
                lin_coeff: coupling,
                obs_op: b,
                obs_scale: 0.5,
                parity: space.parity(),
                parity_frame: None,
                report_scale: 1.0,
            })
        }
        MeanFieldPicture::Spin(space) => {
            let alpha = alpha_c0(kpo);
            let denom = expansion_denominator(*space, alpha)?;
            let sp = SpinModelParams::first_order(AlphaRule::Fixed(alpha));
            Ok(MfProblem {
                h0: build_spin(*space, kpo, &sp)?,
                linear_op: space.sz(),
                lin_coeff: 2.0 * coupling / denom,
                obs_op: space.sz(),
                obs_scale: 1.0,
                parity: space.x_parity(),
                parity_frame: Some(space.x_basis()),
                report_scale: 1.0 / denom.sqrt(),
            })
        }
    }
}

/// Solve the self-consistency loop by damped fixed-point iteration.
///
/// `start` overrides the seed (warm starts). The iteration is clamped to
/// nonnegative order parameters; converged nonzero solutions therefore
/// report the representative of the broken-symmetry pair with positive
/// sign. At exactly zero order parameter (and zero drive) the ground
/// doublet is resolved by symmetry projection, so the trivial solution
/// evaluates to an exact fixed point rather than numerical noise.
pub fn solve_mf(
    picture: &MeanFieldPicture,
    kpo: &KpoParams,
    coupling: f64,
    config: &MeanFieldConfig,
    start: Option<f64>,
) -> Result<MeanFieldSolution> {
    let prob = mf_problem(picture, kpo, coupling)?;
    let mut x = start.unwrap_or(config.seed).max(0.0);
    let mut obs = x;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        iterations += 1;
        let mut h = prob.h0.clone();
        if x != 0.0 {
            h.scaled_add(C64::new(-prob.lin_coeff * x, 0.0), &prob.linear_op);
        }
        let symmetric = kpo.drive == 0.0 && x == 0.0;
        let gs = ground_state(&h, symmetric.then_some(&prob.parity), None)?;
        obs = prob.obs_scale * expval_real(&prob.obs_op, &gs.state)?;
        residual = (obs - x).abs();
        if residual <= config.tol {
            converged = true;
            break;
        }
        x = ((1.0 - config.damping) * x + config.damping * obs).max(0.0);
    }
    let order_param = obs.max(0.0);
    Ok(MeanFieldSolution {
        order_param,
        scaled: order_param * prob.report_scale,
        iterations,
        converged,
        residual,
    })
}

/// Order parameter along a pump sweep at fixed detuning, warm-starting
/// each point from the previous solution (never below the seed, so the
/// iteration can re-enter an ordered phase after a disordered stretch).
pub fn magnetization_curve(
    picture: &MeanFieldPicture,
    delta: f64,
    coupling: f64,
    pumps: &[f64],
    config: &MeanFieldConfig,
) -> Vec<Result<MeanFieldSolution>> {
    let mut prev: Option<f64> = None;
    pumps
        .iter()
        .map(|&pump| {
            let kpo = KpoParams::undriven(delta, pump);
            let start = prev.unwrap_or(config.seed).max(config.seed);
            let result = solve_mf(picture, &kpo, coupling, config, Some(start));
            if let Ok(sol) = &result {
                prev = Some(sol.order_param);
            }
            result
        })
        .collect()
}

/// Linear-stability indicator of the symmetric (zero order parameter)
/// solution: the slope of the self-consistency map at zero, minus one.
///
/// Negative means the trivial solution is stable (disordered phase),
/// positive means it is unstable (ordered phase); a continuous transition
/// sits exactly at zero. The slope is evaluated in closed form,
///
/// ```text
/// slope = lin_coeff * obs_scale * 2 sum_m |<m| P |0>|^2 / (E_m - E_0),
/// ```
///
/// where `|0>` is the even-parity ground state, the sum runs over the
/// odd-parity spectrum, and `P` is the decoupled hopping operator. The
/// two parity sectors are diagonalized separately, which keeps the
/// formula well defined even when the ground doublet is numerically
/// degenerate deep in the ordered phase (a vanishing denominator then
/// correctly drives the indicator to `+infinity`).
pub fn stability_indicator(
    picture: &MeanFieldPicture,
    kpo: &KpoParams,
    coupling: f64,
) -> Result<f64> {
    if kpo.drive != 0.0 {
        return Err(Error::InvalidValue {
            key: "drive".into(),
            message: "the symmetric-solution stability analysis needs a drive-free model".into(),
        });
    }
    let prob = mf_problem(picture, kpo, coupling)?;
    // Rotate into the frame where the parity is diag((-1)^k).
    let (h, p) = match &prob.parity_frame {
        None => (prob.h0.clone(), prob.linear_op.clone()),
        Some(u) => {
            let ud = u.adjoint();
            (&(&ud * &prob.h0) * u, &(&ud * &prob.linear_op) * u)
        }
    };
    let dim = h.dim();
    let even: Vec<usize> = (0..dim).step_by(2).collect();
    let odd: Vec<usize> = (1..dim).step_by(2).collect();
    if odd.is_empty() {
        // A single even level cannot destabilize.
        return Ok(-1.0);
    }
    // The Hamiltonian must not couple the sectors.
    let scale = h.max_abs().max(1.0);
    let mut cross: f64 = 0.0;
    for &i in &even {
        for &j in &odd {
            cross = cross.max(h[(i, j)].norm());
        }
    }
    if cross > 1e-8 * scale {
        return Err(Error::SymmetryViolation {
            commutator_norm: cross,
            tol: 1e-8 * scale,
        });
    }
    let h_even = submatrix(&h, &even, &even);
    let h_odd = submatrix(&h, &odd, &odd);
    let p_oe = rect_block(&p, &odd, &even);
    let eig_even = herm_eig(&h_even, DEFAULT_HERMITICITY_TOL)?;
    let eig_odd = herm_eig(&h_odd, DEFAULT_HERMITICITY_TOL)?;
    let e0 = eig_even.eigenvalues[0];
    let v0 = eig_even.eigenvector(0);
    // w = P restricted to (odd rows, even cols) applied to the even ground.
    let w: Vec<C64> = (0..odd.len())
        .map(|r| {
            (0..even.len())
                .map(|c| p_oe[r * even.len() + c] * v0[c])
                .sum()
        })
        .collect();
    let gap_floor = 1e-12 * e0.abs().max(1.0);
    let mut sum = 0.0f64;
    for m in 0..odd.len() {
        let vm = eig_odd.eigenvector(m);
        let me_sq = vdot(&vm, &w).norm_sqr();
        if me_sq == 0.0 {
            continue;
        }
        let gap = eig_odd.eigenvalues[m] - e0;
        if gap <= gap_floor {
            // Degenerate cross-parity levels with coupling: the symmetric
            // solution is unconditionally unstable.
            return Ok(f64::INFINITY);
        }
        sum += me_sq / gap;
    }
    Ok(prob.lin_coeff * prob.obs_scale * 2.0 * sum - 1.0)
}

fn submatrix(m: &OperatorMatrix, rows: &[usize], cols: &[usize]) -> OperatorMatrix {
    assert_eq!(rows.len(), cols.len());
    OperatorMatrix::from_fn(rows.len(), |i, j| m[(rows[i], cols[j])])
}

/// Rectangular block of `m`, row-major over `rows x cols`.
fn rect_block(m: &OperatorMatrix, rows: &[usize], cols: &[usize]) -> Vec<C64> {
    let mut out = Vec::with_capacity(rows.len() * cols.len());
    for &r in rows {
        for &c in cols {
            out.push(m[(r, c)]);
        }
    }
    out
}

/// All pump values at which the symmetric solution changes stability at
/// fixed detuning, each located by bisection of [`stability_indicator`]
/// to a bracket of width `refine_width`.
///
/// Grid points whose model cannot be built (e.g. a semiclassical
/// amplitude outside the spin domain) are skipped with a warning. More
/// than two crossings on the grid is rejected as [`Error::GridTooCoarse`]:
/// a boundary of these models is at most reentrant once.
pub fn critical_pumps(
    picture: &MeanFieldPicture,
    delta: f64,
    coupling: f64,
    pumps: &[f64],
    refine_width: f64,
) -> Result<Vec<f64>> {
    let indicator = |pump: f64| -> Result<f64> {
        stability_indicator(picture, &KpoParams::undriven(delta, pump), coupling)
    };
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(pumps.len());
    for &pump in pumps {
        match indicator(pump) {
            Ok(g) => samples.push((pump, g)),
            Err(err) => {
                log::warn!(
                    "skipping pump {pump:.4} at detuning {delta:.4} in the boundary scan: {err}"
                );
            }
        }
    }
    // Brackets between immediately adjacent retained samples.
    let mut brackets: Vec<(f64, f64, f64, f64)> = Vec::new();
    for pair in samples.windows(2) {
        let (p_lo, g_lo) = pair[0];
        let (p_hi, g_hi) = pair[1];
        if g_lo == 0.0 {
            // Exactly critical grid point: count once, as its own bracket.
            brackets.push((p_lo, p_lo, 0.0, 0.0));
        } else if g_lo * g_hi < 0.0 {
            brackets.push((p_lo, p_hi, g_lo, g_hi));
        }
    }
    if let Some(&(p_last, g_last)) = samples.last() {
        if g_last == 0.0 {
            brackets.push((p_last, p_last, 0.0, 0.0));
        }
    }
    if brackets.len() > 2 {
        return Err(Error::GridTooCoarse {
            delta,
            crossings: brackets.len(),
        });
    }
    let mut crossings = Vec::with_capacity(brackets.len());
    for (mut lo, mut hi, mut g_lo, _) in brackets {
        while hi - lo > refine_width {
            let mid = 0.5 * (lo + hi);
            let g_mid = indicator(mid)?;
            if g_mid == 0.0 {
                lo = mid;
                hi = mid;
            } else if g_lo * g_mid < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                g_lo = g_mid;
            }
        }
        crossings.push(0.5 * (lo + hi));
    }
    Ok(crossings)
}

/// Stability boundary of the symmetric solution over a detuning grid.
#[derive(Clone, Debug)]
pub struct PhaseBoundary {
    pub deltas: Vec<f64>,
    /// Critical pump values per detuning: empty (no transition on the
    /// scanned pump range), one (single onset), or two (reentrant).
    pub crossings: Vec<Vec<f64>>,
}

/// Locate [`critical_pumps`] for every detuning of a grid.
pub fn phase_boundary(
    picture: &MeanFieldPicture,
    deltas: &[f64],
    coupling: f64,
    pumps: &[f64],
    refine_width: f64,
) -> Result<PhaseBoundary> {
    let crossings = deltas
        .iter()
        .map(|&delta| critical_pumps(picture, delta, coupling, pumps, refine_width))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseBoundary {
        deltas: deltas.to_vec(),
        crossings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn boson() -> MeanFieldPicture {
        MeanFieldPicture::Boson(FockSpace::new(20))
    }

    fn spin(s: f64) -> MeanFieldPicture {
        MeanFieldPicture::Spin(SpinSpace::new(s).unwrap())
    }

    #[test]
    fn disordered_phase_relaxes_to_zero() {
        let kpo = KpoParams::undriven(0.4, 0.0);
        let sol = solve_mf(&boson(), &kpo, 0.2, &MeanFieldConfig::default(), None).unwrap();
        assert!(sol.converged, "residual {}", sol.residual);
        assert!(sol.order_param < 1e-6, "order {}", sol.order_param);
    }

    #[test]
    fn ordered_phase_finds_a_self_consistent_displacement() {
        let kpo = KpoParams::undriven(0.1, 0.0);
        let picture = boson();
        let sol = solve_mf(&picture, &kpo, 0.2, &MeanFieldConfig::default(), None).unwrap();
        assert!(sol.converged);
        assert!(sol.order_param > 0.05, "order {}", sol.order_param);
        // verify the fixed point directly
        let space = FockSpace::new(20);
        let h = crate::hamiltonians::build_mf_boson(space, &kpo, 0.2, sol.order_param);
        let gs = ground_state(&h, None, None).unwrap();
        let obs = expval_real(&space.quadrature_op(), &gs.state).unwrap();
        assert_abs_diff_eq!(obs, sol.order_param, epsilon = 1e-8);
    }

    #[test]
    fn threshold_detuning_is_exactly_the_coupling_at_zero_pump() {
        // At zero pump both pictures destabilize exactly at detuning = J.
        for picture in [boson(), spin(1.0)] {
            let g = stability_indicator(&picture, &KpoParams::undriven(0.2, 0.0), 0.2)
                .unwrap();
            assert_abs_diff_eq!(g, 0.0, epsilon = 1e-12);
            let g_below = stability_indicator(&picture, &KpoParams::undriven(0.21, 0.0), 0.2)
                .unwrap();
            let g_above = stability_indicator(&picture, &KpoParams::undriven(0.19, 0.0), 0.2)
                .unwrap();
            assert!(g_below < 0.0 && g_above > 0.0);
        }
    }

    #[test]
    fn indicator_requires_a_drive_free_model() {
        let kpo = KpoParams::new(0.3, 0.5, 0.1);
        assert!(matches!(
            stability_indicator(&boson(), &kpo, 0.2),
            Err(Error::InvalidValue { .. })
        ));
    }

    #[test]
    fn pump_onset_is_located_once_and_consistently() {
        let pumps: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let found = critical_pumps(&boson(), 0.4, 0.2, &pumps, 1e-4).unwrap();
        assert_eq!(found.len(), 1, "crossings {found:?}");
        let pc = found[0];
        assert!(pc > 0.05 && pc < 1.5, "critical pump {pc}");
        let g = |p: f64| {
            stability_indicator(&boson(), &KpoParams::undriven(0.4, p), 0.2).unwrap()
        };
        assert!(g(pc - 5e-4) < 0.0 && g(pc + 5e-4) > 0.0);
    }

    #[test]
    fn small_spin_boundary_is_reentrant() {
        let pumps: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
        let found = critical_pumps(&spin(1.0), 0.15, 0.2, &pumps, 1e-4).unwrap();
        assert_eq!(found.len(), 2, "crossings {found:?}");
        assert!(found[0] < found[1]);
        // ordered at zero pump (detuning below threshold), so the first
        // crossing leaves the ordered phase and the second re-enters it
        let g0 = stability_indicator(&spin(1.0), &KpoParams::undriven(0.15, 0.0), 0.2)
            .unwrap();
        assert!(g0 > 0.0);
    }

    #[test]
    fn out_of_domain_grid_points_are_skipped_not_fatal() {
        // spin-1 with detuning 0.3: pumps >= 2.3 push the semiclassical
        // amplitude out of the spin domain and must be skipped silently
        let pumps: Vec<f64> = (0..=25).map(|i| i as f64 * 0.1).collect();
        let found = critical_pumps(&spin(1.0), 0.3, 0.2, &pumps, 1e-4).unwrap();
        assert_eq!(found.len(), 1, "crossings {found:?}");
    }

    #[test]
    fn warm_started_curve_rises_after_the_onset() {
        let pumps: Vec<f64> = (0..=14).map(|i| i as f64 * 0.1).collect();
        let curve = magnetization_curve(&boson(), 0.4, 0.2, &pumps, &MeanFieldConfig::default());
        let values: Vec<f64> = curve
            .iter()
            .map(|r| r.as_ref().unwrap().order_param)
            .collect();
        assert!(values[0] < 1e-6);
        assert!(*values.last().unwrap() > 0.3);
        // never decreases by more than numerical noise along the sweep
        for pair in values.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-8);
        }
    }

    #[test]
    fn boundary_collects_per_detuning_crossings() {
        let pumps: Vec<f64> = (0..=10).map(|i| i as f64 * 0.2).collect();
        let boundary = phase_boundary(&boson(), &[0.3, 0.5], 0.2, &pumps, 1e-3).unwrap();
        assert_eq!(boundary.deltas.len(), 2);
        assert_eq!(boundary.crossings.len(), 2);
        assert_eq!(boundary.crossings[0].len(), 1);
        assert_eq!(boundary.crossings[1].len(), 1);
        // larger detuning needs a stronger pump
        assert!(boundary.crossings[1][0] > boundary.crossings[0][0]);
    }

    #[test]
    fn spin_scaled_order_parameter_tracks_the_bosonic_one() {
        // deep in the ordered phase the two pictures agree on the common
        // scale for a large spin
        let kpo = KpoParams::undriven(0.2, 1.0);
        let config = MeanFieldConfig::default();
        let b = solve_mf(&boson(), &kpo, 0.2, &config, None).unwrap();
        let s = solve_mf(&spin(10.0), &kpo, 0.2, &config, None).unwrap();
        assert!(b.converged && s.converged);
        assert!(b.scaled > 0.8 && s.scaled > 0.8);
        assert!(
            (b.scaled - s.scaled).abs() < 0.15,
            "boson {} vs spin {}",
            b.scaled,
            s.scaled
        );
    }
}
