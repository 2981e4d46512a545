//! Hamiltonian builders for the oscillator and spin pictures.
//!
//! All energies are measured in units of the Kerr coefficient `K`, which
//! sets `K = 1` in every formula below. A single oscillator is
//!
//! ```text
//! H_b = delta * n + (1/2) adag^2 a^2 - (pump/2)(adag^2 + a^2)
//!       - drive * (adag + a),
//! ```
//!
//! and two oscillators add the exchange coupling
//! `- xi0 * J (adag_1 a_2 + a_1 adag_2)`.
//!
//! The spin picture expands the oscillator around a displaced vacuum with
//! real amplitude `alpha` and keeps either the leading order of the
//! square-root expansion ([`ExpansionOrder::First`]) or the next correction
//! ([`ExpansionOrder::Second`], single site only). First order gives
//!
//! ```text
//! H_s = -[2 pump / (2s - alpha^2)] sz^2
//!       - [delta + pump + s - 1/2] sx + (1/2) sx^2
//!       - [2 drive / sqrt(2s - alpha^2)] sz,
//! ```
//!
//! with the pair coupling `-[2 xi0 J / (2s - alpha^2)] (sz sz + sy sy)`;
//! dropping the `sy sy` part (the `couple_yy` toggle) gives the
//! Ising-like variant used to probe how much the transverse channel
//! matters. The expansion is only meaningful for `alpha^2 < 2s`, which
//! every builder enforces.
//!
//! The displacement amplitude itself comes from an [`AlphaRule`]: zero, a
//! semiclassical estimate (with or without the drive correction), the
//! photon number of the oscillator ground state, or a fixed value.

use crate::error::{Error, Result};
use crate::groundstate::ground_state;
use crate::qmatrix::{expval_real, kron, OperatorMatrix};
use crate::spaces::{FockSpace, SpinSpace};
use crate::C64;

/// Parameters of a single oscillator, in units of the Kerr coefficient.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct KpoParams {
    /// Detuning of the mode from half the pump frequency.
    pub delta: f64,
    /// Two-photon (parametric) pump amplitude.
    pub pump: f64,
    /// Single-photon (coherent) drive amplitude.
    pub drive: f64,
}

impl KpoParams {
    pub fn new(delta: f64, pump: f64, drive: f64) -> Self {
        KpoParams { delta, pump, drive }
    }

    /// Detuning and pump only, with no coherent drive.
    pub fn undriven(delta: f64, pump: f64) -> Self {
        KpoParams {
            delta,
            pump,
            drive: 0.0,
        }
    }

    /// Same parameters with the drive removed.
    pub fn without_drive(&self) -> Self {
        KpoParams {
            drive: 0.0,
            ..*self
        }
    }
}

/// Parameters of two exchange-coupled oscillators. The sites share the
/// detuning and pump in every study here, but only the spin mapping
/// requires that; the bosonic builder takes the sites as given.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PairParams {
    pub site1: KpoParams,
    pub site2: KpoParams,
    /// Exchange coupling `J` between the sites.
    pub coupling: f64,
    /// Sign convention of the exchange term (`+1` throughout this crate).
    pub xi0: f64,
}

impl PairParams {
    /// Pair with shared detuning and pump, per-site drives, and `xi0 = 1`.
    pub fn symmetric(delta: f64, pump: f64, drives: (f64, f64), coupling: f64) -> Self {
        PairParams {
            site1: KpoParams::new(delta, pump, drives.0),
            site2: KpoParams::new(delta, pump, drives.1),
            coupling,
            xi0: 1.0,
        }
    }

    /// Shared `(delta, pump)` of the two sites, required by the spin mapping.
    fn shared_site(&self) -> Result<(f64, f64)> {
        if self.site1.delta != self.site2.delta {
            return Err(Error::AsymmetricPair {
                left: self.site1.delta,
                right: self.site2.delta,
            });
        }
        if self.site1.pump != self.site2.pump {
            return Err(Error::AsymmetricPair {
                left: self.site1.pump,
                right: self.site2.pump,
            });
        }
        Ok((self.site1.delta, self.site1.pump))
    }
}

/// How the displacement amplitude `alpha` of the spin mapping is chosen.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum AlphaRule {
    /// `alpha = 0`: expand around the undisplaced vacuum.
    Zero,
    /// Semiclassical estimate including the drive correction:
    /// `alpha_c = sqrt(pump - delta + |drive| / sqrt(pump - delta))`
    /// inside the pumped regime, zero outside (see [`alpha_c`]).
    Semiclassical,
    /// Drive-free semiclassical estimate
    /// `alpha_c0 = sqrt(pump - delta)` inside the pumped regime
    /// (see [`alpha_c0`]).
    SemiclassicalDriveFree,
    /// `alpha^2` equals the ground-state photon number of the oscillator,
    /// computed in a Fock space with the given cutoff.
    ExactPhoton { cutoff: usize },
    /// Explicit nonnegative amplitude.
    Fixed(f64),
}

impl AlphaRule {
    fn name(&self) -> &'static str {
        match self {
            AlphaRule::Zero => "zero",
            AlphaRule::Semiclassical => "semiclassical",
            AlphaRule::SemiclassicalDriveFree => "semiclassical-drive-free",
            AlphaRule::ExactPhoton { .. } => "exact-photon",
            AlphaRule::Fixed(_) => "fixed",
        }
    }
}

/// Truncation order of the square-root expansion behind the spin mapping.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ExpansionOrder {
    First,
    /// Keeps the next correction in `1/(2s - alpha^2)`. Only defined for
    /// single-site models.
    Second,
}

/// Options of the spin-model construction.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SpinModelParams {
    pub alpha_rule: AlphaRule,
    pub order: ExpansionOrder,
    /// Include the transverse `sy sy` part of the pair coupling.
    pub couple_yy: bool,
}

impl SpinModelParams {
    /// First-order model with the full pair coupling.
    pub fn first_order(alpha_rule: AlphaRule) -> Self {
        SpinModelParams {
            alpha_rule,
            order: ExpansionOrder::First,
            couple_yy: true,
        }
    }

    pub fn with_order(mut self, order: ExpansionOrder) -> Self {
        self.order = order;
        self
    }

    pub fn without_yy(mut self) -> Self {
        self.couple_yy = false;
        self
    }
}

impl Default for SpinModelParams {
    fn default() -> Self {
        SpinModelParams::first_order(AlphaRule::Semiclassical)
    }
}

/// Semiclassical displacement amplitude including the drive correction.
///
/// `alpha_c = [pump - delta + |drive| / sqrt(pump - delta)]^(1/2)` when both
/// the pumped-regime condition `pump - delta > 0` and the threshold
/// `pump - delta - drive >= 0` hold; zero otherwise. The first guard keeps
/// the inner division defined (and covers strongly negative drives, where
/// the bare threshold alone would not); the second matches the convention
/// that the estimate switches off below threshold, boundary included.
pub fn alpha_c(kpo: &KpoParams) -> f64 {
    let gap = kpo.pump - kpo.delta;
    if gap <= 0.0 || gap - kpo.drive < 0.0 {
        return 0.0;
    }
    (gap + kpo.drive.abs() / gap.sqrt()).sqrt()
}

/// Drive-free semiclassical displacement amplitude
/// `alpha_c0 = sqrt(pump - delta)` for `pump >= delta`, zero otherwise.
pub fn alpha_c0(kpo: &KpoParams) -> f64 {
    let gap = kpo.pump - kpo.delta;
    if gap < 0.0 {
        0.0
    } else {
        gap.sqrt()
    }
}

/// Resolve an [`AlphaRule`] to a concrete amplitude for the given
/// oscillator parameters.
///
/// [`AlphaRule::ExactPhoton`] solves the oscillator ground state at the
/// rule's cutoff (resolving the drive-free ground doublet into its even
/// parity sector) and returns the square root of its photon number.
pub fn resolve_alpha(rule: AlphaRule, kpo: &KpoParams) -> Result<f64> {
    match rule {
        AlphaRule::Zero => Ok(0.0),
        AlphaRule::Semiclassical => Ok(alpha_c(kpo)),
        AlphaRule::SemiclassicalDriveFree => Ok(alpha_c0(kpo)),
        AlphaRule::Fixed(a) => {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::InvalidValue {
                    key: "alpha".into(),
                    message: format!("fixed amplitude must be finite and nonnegative, got {a}"),
                });
            }
            Ok(a)
        }
        AlphaRule::ExactPhoton { cutoff } => {
            let space = FockSpace::new(cutoff);
            let h = build_kpo(space, kpo);
            let parity = (kpo.drive == 0.0).then(|| space.parity());
            let gs = ground_state(&h, parity.as_ref(), None)?;
            let nbar = expval_real(&space.number(), &gs.state)?;
            if nbar > cutoff as f64 / 4.0 {
                log::warn!(
                    "exact-photon amplitude alpha^2 = {nbar:.3} close to the cutoff {cutoff}; \
                     consider a larger Fock space"
                );
            }
            Ok(nbar.max(0.0).sqrt())
        }
    }
}

/// Single-oscillator Hamiltonian in the truncated Fock space.
pub fn build_kpo(space: FockSpace, kpo: &KpoParams) -> OperatorMatrix {
    let dim = space.dim();
    // diagonal part: delta * n + (1/2) n (n - 1)
    let diag: Vec<f64> = (0..dim)
        .map(|n| {
            let n = n as f64;
            kpo.delta * n + 0.5 * n * (n - 1.0)
        })
        .collect();
    let mut h = OperatorMatrix::from_real_diag(&diag);
    let a = space.annihilation();
    let a2 = &a * &a;
    h.scaled_add(C64::new(-kpo.pump / 2.0, 0.0), &a2.adjoint());
    h.scaled_add(C64::new(-kpo.pump / 2.0, 0.0), &a2);
    h.scaled_add(C64::new(-kpo.drive, 0.0), &a.adjoint());
    h.scaled_add(C64::new(-kpo.drive, 0.0), &a);
    h
}

/// Two exchange-coupled oscillators on `site space (x) site space`, with
/// the first site on the slow index of the product basis.
pub fn build_kpo_pair(space: FockSpace, pair: &PairParams) -> Result<OperatorMatrix> {
    let id = OperatorMatrix::identity(space.dim());
    let h1 = build_kpo(space, &pair.site1);
    let h2 = build_kpo(space, &pair.site2);
    let mut h = kron(&h1, &id)?;
    h.scaled_add(C64::new(1.0, 0.0), &kron(&id, &h2)?);
    let a = space.annihilation();
    let hop = &kron(&a.adjoint(), &a)? + &kron(&a, &a.adjoint())?;
    h.scaled_add(C64::new(-pair.xi0 * pair.coupling, 0.0), &hop);
    Ok(h)
}

/// Guard the expansion domain `alpha^2 < 2s`, returning the denominator
/// `2s - alpha^2` on success.
pub(crate) fn expansion_denominator(space: SpinSpace, alpha: f64) -> Result<f64> {
    let two_s = space.twice_s() as f64;
    let alpha_sq = alpha * alpha;
    if alpha_sq >= two_s {
        return Err(Error::AlphaOutOfRange { alpha_sq, two_s });
    }
    Ok(two_s - alpha_sq)
}

/// Single-site spin model of the oscillator.
///
/// Resolves `alpha` from the rule in `sp`, enforces `alpha^2 < 2s`, and
/// assembles the first- or second-order Hamiltonian described in the module
/// docs. The result commutes with [`SpinSpace::x_parity`] whenever
/// `drive = 0`, mirroring photon-number parity conservation.
pub fn build_spin(space: SpinSpace, kpo: &KpoParams, sp: &SpinModelParams) -> Result<OperatorMatrix> {
    let alpha = resolve_alpha(sp.alpha_rule, kpo)?;
    let denom = expansion_denominator(space, alpha)?;
    let s = space.s();
    let alpha_sq = alpha * alpha;

    let sx = space.sx();
    let sz = space.sz();
    let sx2 = &sx * &sx;
    let sz2 = &sz * &sz;
    let r = |v: f64| C64::new(v, 0.0);

    let mut h = OperatorMatrix::zeros(space.dim());
    h.scaled_add(r(-(kpo.delta + kpo.pump + s - 0.5)), &sx);
    h.scaled_add(r(0.5), &sx2);
    match sp.order {
        ExpansionOrder::First => {
            h.scaled_add(r(-2.0 * kpo.pump / denom), &sz2);
            h.scaled_add(r(-2.0 * kpo.drive / denom.sqrt()), &sz);
        }
        ExpansionOrder::Second => {
            let denom_32 = denom * denom.sqrt();
            h.scaled_add(
                r(-(3.0 / denom - (1.0 + alpha_sq) / (denom * denom)) * kpo.pump),
                &sz2,
            );
            h.scaled_add(
                r(-(5.0 / (2.0 * denom.sqrt()) - (1.0 + alpha_sq) / (2.0 * denom_32))
                    * kpo.drive),
                &sz,
            );
            let sxsz = &(&sx * &sz) + &(&sz * &sx);
            h.scaled_add(r(kpo.drive / (2.0 * denom_32)), &sxsz);
            let sxsz2 = &(&sx * &sz2) + &(&sz2 * &sx);
            h.scaled_add(r(kpo.pump / (denom * denom)), &sxsz2);
        }
    }
    Ok(h)
}

/// Two-site spin model of the coupled oscillator pair, first order only.
///
/// The sites must share detuning and pump (the displacement amplitude is a
/// property of that shared oscillator), while the drives may differ. The
/// coupling channel is `-[2 xi0 J / (2s - alpha^2)] (sz sz [+ sy sy])`,
/// with the transverse part controlled by `sp.couple_yy`.
pub fn build_spin_pair(
    space: SpinSpace,
    pair: &PairParams,
    sp: &SpinModelParams,
) -> Result<OperatorMatrix> {
    if sp.order != ExpansionOrder::First {
        return Err(Error::OrderUnsupported {
            order: "second",
            context: "coupled pairs",
        });
    }
    let (delta, pump) = pair.shared_site()?;
    let alpha = match sp.alpha_rule {
        AlphaRule::ExactPhoton { .. } => {
            return Err(Error::AlphaRuleUnsupported {
                rule: sp.alpha_rule.name(),
                context: "coupled pairs",
            })
        }
        AlphaRule::Semiclassical if pair.site1.drive != pair.site2.drive => {
            return Err(Error::AlphaRuleUnsupported {
                rule: "semiclassical with asymmetric drives",
                context: "coupled pairs",
            })
        }
        rule => resolve_alpha(rule, &KpoParams::new(delta, pump, pair.site1.drive))?,
    };
    let denom = expansion_denominator(space, alpha)?;

    let site_model = SpinModelParams {
        alpha_rule: AlphaRule::Fixed(alpha),
        order: ExpansionOrder::First,
        couple_yy: sp.couple_yy,
    };
    let id = OperatorMatrix::identity(space.dim());
    let h1 = build_spin(space, &pair.site1, &site_model)?;
    let h2 = build_spin(space, &pair.site2, &site_model)?;
    let mut h = kron(&h1, &id)?;
    h.scaled_add(C64::new(1.0, 0.0), &kron(&id, &h2)?);

    let sz = space.sz();
    let mut channel = kron(&sz, &sz)?;
    if sp.couple_yy {
        let sy = space.sy();
        channel.scaled_add(C64::new(1.0, 0.0), &kron(&sy, &sy)?);
    }
    h.scaled_add(
        C64::new(-2.0 * pair.xi0 * pair.coupling / denom, 0.0),
        &channel,
    );
    Ok(h)
}

/// Mean-field oscillator Hamiltonian `H_b - J x (adag + a)` for a given
/// value of the order parameter `x = <(adag + a)/2>`.
pub fn build_mf_boson(
    space: FockSpace,
    kpo: &KpoParams,
    coupling: f64,
    x: f64,
) -> OperatorMatrix {
    let mut h = build_kpo(space, kpo);
    let a = space.annihilation();
    h.scaled_add(C64::new(-coupling * x, 0.0), &a.adjoint());
    h.scaled_add(C64::new(-coupling * x, 0.0), &a);
    h
}

/// Mean-field spin Hamiltonian
/// `H_s - [2 J / (2s - alpha^2)] m_z sz` for a given magnetization `m_z`.
pub fn build_mf_spin(
    space: SpinSpace,
    kpo: &KpoParams,
    sp: &SpinModelParams,
    coupling: f64,
    mz: f64,
) -> Result<OperatorMatrix> {
    let alpha = resolve_alpha(sp.alpha_rule, kpo)?;
    let denom = expansion_denominator(space, alpha)?;
    let mut h = build_spin(space, kpo, sp)?;
    h.scaled_add(C64::new(-2.0 * coupling * mz / denom, 0.0), &space.sz());
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmatrix::commutator;
    use approx::assert_abs_diff_eq;

    #[test]
    fn alpha_c_matches_the_closed_form_in_the_pumped_regime() {
        // pump - delta = 1, drive-free
        assert_abs_diff_eq!(
            alpha_c(&KpoParams::new(1.0, 2.0, 0.0)),
            1.0,
            epsilon = 1e-15
        );
        // drive correction: sqrt(1 + 0.3/1)
        assert_abs_diff_eq!(
            alpha_c(&KpoParams::new(1.0, 2.0, 0.3)),
            1.3f64.sqrt(),
            epsilon = 1e-15
        );
        // negative drive enters through |drive|
        assert_abs_diff_eq!(
            alpha_c(&KpoParams::new(1.0, 2.0, -0.3)),
            1.3f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn alpha_c_switches_off_outside_the_pumped_regime() {
        // below the pump threshold
        assert_eq!(alpha_c(&KpoParams::new(1.0, 0.5, 0.0)), 0.0);
        // at the threshold boundary pump - delta - drive = 0 it stays on
        let kpo = KpoParams::new(0.5, 1.0, 0.5);
        assert_abs_diff_eq!(
            alpha_c(&kpo),
            (0.5 + 0.5 / 0.5f64.sqrt()).sqrt(),
            epsilon = 1e-15
        );
        // just past the threshold it switches off
        assert_eq!(alpha_c(&KpoParams::new(0.5, 1.0, 0.5 + 1e-12)), 0.0);
        // strongly negative drive with pump <= delta: the regime guard wins
        assert_eq!(alpha_c(&KpoParams::new(1.0, 0.5, -1.0)), 0.0);
        assert_eq!(alpha_c(&KpoParams::new(1.0, 1.0, -1.0)), 0.0);
    }

    #[test]
    fn alpha_c0_is_the_drive_free_estimate() {
        assert_abs_diff_eq!(
            alpha_c0(&KpoParams::new(0.4, 1.9, 0.7)),
            1.5f64.sqrt(),
            epsilon = 1e-15
        );
        assert_eq!(alpha_c0(&KpoParams::new(1.0, 1.0, 0.0)), 0.0);
        assert_eq!(alpha_c0(&KpoParams::new(1.0, 0.3, 0.0)), 0.0);
    }

    #[test]
    fn exact_photon_amplitude_vanishes_without_pump_or_drive() {
        let kpo = KpoParams::new(1.0, 0.0, 0.0);
        let alpha = resolve_alpha(AlphaRule::ExactPhoton { cutoff: 10 }, &kpo).unwrap();
        assert_abs_diff_eq!(alpha, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn fixed_rule_validates_its_amplitude() {
        let kpo = KpoParams::new(0.0, 0.0, 0.0);
        assert!(resolve_alpha(AlphaRule::Fixed(1.25), &kpo).is_ok());
        assert!(resolve_alpha(AlphaRule::Fixed(-0.1), &kpo).is_err());
        assert!(resolve_alpha(AlphaRule::Fixed(f64::NAN), &kpo).is_err());
    }

    #[test]
    fn oscillator_matrix_elements_match_the_definition() {
        let space = FockSpace::new(4);
        let kpo = KpoParams::new(0.7, 1.3, 0.2);
        let h = build_kpo(space, &kpo);
        assert!(h.is_hermitian(1e-14));
        // vacuum expectation vanishes for every parameter set
        assert_abs_diff_eq!(h[(0, 0)].re, 0.0, epsilon = 1e-15);
        // diagonal: delta*n + n(n-1)/2
        assert_abs_diff_eq!(h[(2, 2)].re, 0.7 * 2.0 + 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h[(3, 3)].re, 0.7 * 3.0 + 3.0, epsilon = 1e-14);
        // pump couples |0> and |2>: -(pump/2) sqrt(2)
        assert_abs_diff_eq!(h[(0, 2)].re, -1.3 / 2.0 * 2f64.sqrt(), epsilon = 1e-14);
        // drive couples |0> and |1>
        assert_abs_diff_eq!(h[(0, 1)].re, -0.2, epsilon = 1e-14);
    }

    #[test]
    fn oscillator_conserves_parity_exactly_when_undriven() {
        let space = FockSpace::new(12);
        let h0 = build_kpo(space, &KpoParams::new(0.3, 1.7, 0.0));
        assert!(commutator(&h0, &space.parity()).max_abs() < 1e-14);
        let h1 = build_kpo(space, &KpoParams::new(0.3, 1.7, 0.1));
        assert!(commutator(&h1, &space.parity()).max_abs() > 0.05);
    }

    #[test]
    fn pair_hamiltonian_couples_single_exchange_quanta() {
        let space = FockSpace::new(3);
        let pair = PairParams::symmetric(0.5, 1.0, (0.1, -0.1), 0.25);
        let h = build_kpo_pair(space, &pair).unwrap();
        assert_eq!(h.dim(), 16);
        assert!(h.is_hermitian(1e-14));
        // <0,1| H |1,0> = -xi0 J
        let d = space.dim();
        assert_abs_diff_eq!(h[(1, d)].re, -0.25, epsilon = 1e-14);
    }

    #[test]
    fn pair_hamiltonian_is_exchange_symmetric_for_equal_drives() {
        let space = FockSpace::new(3);
        let d = space.dim();
        let pair = PairParams::symmetric(0.5, 1.0, (0.2, 0.2), 0.25);
        let h = build_kpo_pair(space, &pair).unwrap();
        // swap operator |n1, n2> -> |n2, n1>
        let mut swap = OperatorMatrix::zeros(d * d);
        for n1 in 0..d {
            for n2 in 0..d {
                swap[(n2 * d + n1, n1 * d + n2)] = C64::new(1.0, 0.0);
            }
        }
        let conj = &(&swap * &h) * &swap;
        assert!(conj.max_abs_diff(&h) < 1e-13);
    }

    #[test]
    fn first_order_spin_coefficients_audit() {
        let space = SpinSpace::new(2.0).unwrap();
        let kpo = KpoParams::new(1.0, 2.0, 0.3);
        let sp = SpinModelParams::first_order(AlphaRule::Fixed(1.0));
        let h = build_spin(space, &kpo, &sp).unwrap();
        assert!(h.is_hermitian(1e-14));
        // independent assembly: denom = 2s - alpha^2 = 3
        let (sx, sz) = (space.sx(), space.sz());
        let mut expected = OperatorMatrix::zeros(space.dim());
        expected.scaled_add(C64::new(-2.0 * 2.0 / 3.0, 0.0), &(&sz * &sz));
        expected.scaled_add(C64::new(-(1.0 + 2.0 + 2.0 - 0.5), 0.0), &sx);
        expected.scaled_add(C64::new(0.5, 0.0), &(&sx * &sx));
        expected.scaled_add(C64::new(-2.0 * 0.3 / 3f64.sqrt(), 0.0), &sz);
        assert!(h.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn second_order_spin_coefficients_audit() {
        let space = SpinSpace::new(2.0).unwrap();
        let kpo = KpoParams::new(1.0, 2.0, 0.3);
        let sp = SpinModelParams::first_order(AlphaRule::Fixed(1.0))
            .with_order(ExpansionOrder::Second);
        let h = build_spin(space, &kpo, &sp).unwrap();
        assert!(h.is_hermitian(1e-13));
        let (sx, sz) = (space.sx(), space.sz());
        let sz2 = &sz * &sz;
        // denom = 3, alpha^2 = 1
        let mut expected = OperatorMatrix::zeros(space.dim());
        expected.scaled_add(
            C64::new(-(3.0 / 3.0 - 2.0 / 9.0) * 2.0, 0.0),
            &sz2,
        );
        expected.scaled_add(C64::new(-(1.0 + 2.0 + 1.5), 0.0), &sx);
        expected.scaled_add(C64::new(0.5, 0.0), &(&sx * &sx));
        let denom_32 = 3f64.powf(1.5);
        expected.scaled_add(
            C64::new(-(5.0 / (2.0 * 3f64.sqrt()) - 2.0 / (2.0 * denom_32)) * 0.3, 0.0),
            &sz,
        );
        expected.scaled_add(
            C64::new(0.3 / (2.0 * denom_32), 0.0),
            &(&(&sx * &sz) + &(&sz * &sx)),
        );
        expected.scaled_add(
            C64::new(2.0 / 9.0, 0.0),
            &(&(&sx * &sz2) + &(&sz2 * &sx)),
        );
        assert!(h.max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn spin_models_conserve_the_x_parity_when_undriven() {
        for order in [ExpansionOrder::First, ExpansionOrder::Second] {
            let space = SpinSpace::new(4.0).unwrap();
            let kpo = KpoParams::new(1.0, 2.0, 0.0);
            let sp = SpinModelParams::first_order(AlphaRule::Semiclassical).with_order(order);
            let h = build_spin(space, &kpo, &sp).unwrap();
            let r = space.x_parity();
            assert!(
                commutator(&h, &r).max_abs() < 1e-10,
                "drive-free spin model broke x-parity at order {order:?}"
            );
            let driven = build_spin(space, &KpoParams::new(1.0, 2.0, 0.2), &sp).unwrap();
            assert!(commutator(&driven, &r).max_abs() > 0.01);
        }
    }

    #[test]
    fn expansion_domain_is_enforced() {
        // alpha_c(0, 2, 0) = sqrt(2); for s = 1/2: alpha^2 = 2 > 2s = 1
        let space = SpinSpace::new(0.5).unwrap();
        let kpo = KpoParams::new(0.0, 2.0, 0.0);
        let sp = SpinModelParams::first_order(AlphaRule::Semiclassical);
        assert!(matches!(
            build_spin(space, &kpo, &sp),
            Err(Error::AlphaOutOfRange { .. })
        ));
        // the boundary alpha^2 = 2s is also rejected
        let space1 = SpinSpace::new(1.0).unwrap();
        let sp_boundary = SpinModelParams::first_order(AlphaRule::Fixed(2f64.sqrt()));
        assert!(matches!(
            build_spin(space1, &kpo, &sp_boundary),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn spin_pair_couples_through_z_and_optionally_y() {
        let space = SpinSpace::new(1.0).unwrap();
        let pair = PairParams::symmetric(0.0, 1.0, (0.1, -0.1), 0.12);
        let sp = SpinModelParams::first_order(AlphaRule::SemiclassicalDriveFree);
        let full = build_spin_pair(space, &pair, &sp).unwrap();
        let zz_only = build_spin_pair(space, &pair, &sp.without_yy()).unwrap();
        assert!(full.is_hermitian(1e-13));
        // alpha_c0^2 = 1, denom = 2s - 1 = 1
        let sy = space.sy();
        let expected_diff = C64::new(-2.0 * 0.12 / 1.0, 0.0)
            * &crate::qmatrix::kron(&sy, &sy).unwrap();
        assert!((&full - &zz_only).max_abs_diff(&expected_diff) < 1e-13);
    }

    #[test]
    fn spin_pair_rejects_unsupported_configurations() {
        let space = SpinSpace::new(1.0).unwrap();
        let pair = PairParams::symmetric(0.0, 1.0, (0.1, -0.1), 0.1);
        let second = SpinModelParams::first_order(AlphaRule::Zero)
            .with_order(ExpansionOrder::Second);
        assert!(matches!(
            build_spin_pair(space, &pair, &second),
            Err(Error::OrderUnsupported { .. })
        ));
        let exact = SpinModelParams::first_order(AlphaRule::ExactPhoton { cutoff: 10 });
        assert!(matches!(
            build_spin_pair(space, &pair, &exact),
            Err(Error::AlphaRuleUnsupported { .. })
        ));
        let semi = SpinModelParams::first_order(AlphaRule::Semiclassical);
        assert!(matches!(
            build_spin_pair(space, &pair, &semi),
            Err(Error::AlphaRuleUnsupported { .. })
        ));
        let mut asym = pair;
        asym.site2.pump = 2.0;
        let sp = SpinModelParams::first_order(AlphaRule::Zero);
        assert!(matches!(
            build_spin_pair(space, &asym, &sp),
            Err(Error::AsymmetricPair { .. })
        ));
    }

    #[test]
    fn mean_field_terms_shift_the_bare_models_linearly() {
        let fock = FockSpace::new(6);
        let kpo = KpoParams::new(0.4, 1.0, 0.0);
        let h0 = build_mf_boson(fock, &kpo, 0.2, 0.0);
        assert!(h0.max_abs_diff(&build_kpo(fock, &kpo)) < 1e-15);
        let h = build_mf_boson(fock, &kpo, 0.2, 0.7);
        let diff = &h - &h0;
        // -J x (adag + a): element <0|.|1> = -J x
        assert_abs_diff_eq!(diff[(0, 1)].re, -0.2 * 0.7, epsilon = 1e-14);

        let spin = SpinSpace::new(1.0).unwrap();
        let sp = SpinModelParams::first_order(AlphaRule::SemiclassicalDriveFree);
        let hs0 = build_mf_spin(spin, &kpo, &sp, 0.2, 0.0).unwrap();
        assert!(hs0.max_abs_diff(&build_spin(spin, &kpo, &sp).unwrap()) < 1e-15);
        let hs = build_mf_spin(spin, &kpo, &sp, 0.2, 0.4).unwrap();
        // alpha_c0^2 = 0.6, denom = 2 - 0.6 = 1.4; term -2 J mz / denom * sz
        let expected = -2.0 * 0.2 * 0.4 / 1.4;
        assert_abs_diff_eq!((&hs - &hs0)[(0, 0)].re, expected, epsilon = 1e-14);
    }
}
