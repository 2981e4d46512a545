//! Named, parameterized studies binding the other modules together.
//!
//! Each scenario regenerates one of the standard comparison data sets —
//! ground-state sweeps, Wigner panels, overlaps, pair correlations,
//! mean-field curves and boundaries — with curated defaults and every
//! knob overridable through flat `key=value` pairs. Sweeps always solve the oscillator alongside every requested
//! `(s, amplitude-rule)` spin model so the resulting table is directly
//! plottable.
//!
//! A failed grid point (for example an expansion amplitude outside the
//! spin domain) is logged and recorded as NaN in its series — never
//! silently dropped and never fatal to the rest of the sweep.

use crate::error::{Error, Result};
use crate::groundstate::ground_state;
use crate::hamiltonians::{
    alpha_c0, build_kpo, build_kpo_pair, build_spin, build_spin_pair, resolve_alpha, AlphaRule,
    ExpansionOrder, KpoParams, PairParams, SpinModelParams,
};
use crate::meanfield::{
    critical_pumps, magnetization_curve, MeanFieldConfig, MeanFieldPicture,
};
use crate::observables::{
    correlation_boson, correlation_spin, f_sp, f_sq, overlap, photon_number, quadrature, wigner,
    wigner_spin, GridSpec, WignerGrid,
};
use crate::spaces::{FockSpace, SpinSpace};
use crate::C64;
use rayon::prelude::*;

/// The available studies.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ScenarioId {
    /// Ground-state photon number vs pump, oscillator vs spin models.
    PhotonSweep,
    /// Wigner functions of the oscillator and spin ground states at one
    /// parameter point.
    WignerPanel,
    /// Oscillator/spin ground-state overlap as a function of s.
    OverlapVsS,
    /// Quadrature amplitude vs pump under a coherent drive.
    QuadratureSweep,
    /// First- vs second-order spin models against the oscillator.
    SecondOrderSweep,
    /// Two-site quadrature correlations, full and zz-only coupling.
    PairCorrelation,
    /// Mean-field order parameter vs pump in both pictures.
    MfCurve,
    /// Mean-field critical pump vs detuning in both pictures.
    PhaseDiagram,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 8] = [
        ScenarioId::PhotonSweep,
        ScenarioId::WignerPanel,
        ScenarioId::OverlapVsS,
        ScenarioId::QuadratureSweep,
        ScenarioId::SecondOrderSweep,
        ScenarioId::PairCorrelation,
        ScenarioId::MfCurve,
        ScenarioId::PhaseDiagram,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioId::PhotonSweep => "photon-sweep",
            ScenarioId::WignerPanel => "wigner-panel",
            ScenarioId::OverlapVsS => "overlap-vs-s",
            ScenarioId::QuadratureSweep => "quadrature-sweep",
            ScenarioId::SecondOrderSweep => "second-order-sweep",
            ScenarioId::PairCorrelation => "pair-correlation",
            ScenarioId::MfCurve => "mf-curve",
            ScenarioId::PhaseDiagram => "phase-diagram",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            ScenarioId::PhotonSweep => {
                "photon number of the oscillator ground state vs pump, with the spin-model \
                 counterpart s - <sx> for every (s, amplitude rule)"
            }
            ScenarioId::WignerPanel => {
                "Wigner functions of the oscillator and embedded spin ground states at one \
                 parameter point"
            }
            ScenarioId::OverlapVsS => {
                "overlap of the oscillator and spin ground states as a function of s"
            }
            ScenarioId::QuadratureSweep => {
                "quadrature amplitude vs pump under a coherent drive, with the spin-model \
                 counterpart <sz>/sqrt(2s - alpha^2)"
            }
            ScenarioId::SecondOrderSweep => {
                "first- vs second-order spin models against the oscillator, for photon number \
                 and quadrature"
            }
            ScenarioId::PairCorrelation => {
                "quadrature correlation of two coupled oscillators vs pump, with the two-site \
                 spin models (full and zz-only coupling)"
            }
            ScenarioId::MfCurve => {
                "self-consistent mean-field order parameter vs pump in the oscillator and spin \
                 pictures"
            }
            ScenarioId::PhaseDiagram => {
                "mean-field critical pump vs detuning in the oscillator and spin pictures"
            }
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.name() == name)
            .ok_or_else(|| Error::UnknownScenario(name.to_string()))
    }
}

/// Flat parameter record of a scenario run. Defaults depend on the
/// scenario; every field can be overridden through [`apply_override`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioParams {
    pub scenario: ScenarioId,
    /// Detuning (single-site studies and the mean-field/pair studies).
    pub delta: f64,
    /// Pump amplitude for single-point studies (Wigner panel, overlaps).
    pub pump: f64,
    /// Coherent drive for single-site studies.
    pub drive: f64,
    /// Detuning of the quadrature panel of the second-order sweep.
    pub quad_delta: f64,
    /// Drive of the quadrature panel of the second-order sweep.
    pub quad_drive: f64,
    /// Pump grid for sweeps: `pump_min, pump_min + pump_step, ..., pump_max`.
    pub pump_min: f64,
    pub pump_max: f64,
    pub pump_step: f64,
    /// Detuning grid of the phase diagram.
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_step: f64,
    /// Spin sizes to solve alongside the oscillator.
    pub s_list: Vec<f64>,
    /// Displacement-amplitude rules, by name (see [`parse_alpha_rule`]).
    pub alpha_rules: Vec<String>,
    /// Fock-space truncation of every oscillator model.
    pub fock_cutoff: usize,
    /// Exchange couplings of the pair study.
    pub pair_couplings: Vec<f64>,
    /// Per-site drives of the pair study.
    pub drive1: f64,
    pub drive2: f64,
    /// Exchange attenuation factor of the pair coupling.
    pub xi0: f64,
    /// Mean-field exchange coupling.
    pub coupling: f64,
    /// Phase-space window `[-half_width, half_width]^2` of Wigner grids.
    pub wigner_half_width: f64,
    /// Grid points per axis of Wigner grids.
    pub wigner_points: usize,
    /// Bracket width of the mean-field critical-point bisection.
    pub refine_width: f64,
}

impl ScenarioParams {
    /// Per-scenario defaults: the parameter points the acceptance checks
    /// and the shipped comparisons are built on.
    pub fn defaults(scenario: ScenarioId) -> Self {
        let mut p = ScenarioParams {
            scenario,
            delta: 1.0,
            pump: 2.0,
            drive: 0.0,
            quad_delta: 0.0,
            quad_drive: 0.1,
            pump_min: 0.0,
            pump_max: 2.0,
            pump_step: 0.01,
            delta_min: 0.0,
            delta_max: 0.6,
            delta_step: 0.02,
            s_list: vec![1.0, 2.0, 4.0, 10.0],
            alpha_rules: vec!["zero".into(), "semiclassical".into(), "exact".into()],
            fock_cutoff: 20,
            pair_couplings: vec![0.08, 0.12],
            drive1: 0.1,
            drive2: -0.1,
            xi0: 1.0,
            coupling: 0.2,
            wigner_half_width: 4.0,
            wigner_points: 161,
            refine_width: 1e-4,
        };
        match scenario {
            ScenarioId::PhotonSweep => {}
            ScenarioId::WignerPanel => {
                p.s_list = vec![1.0, 4.0, 10.0];
                p.alpha_rules = vec!["zero".into(), "semiclassical".into()];
            }
            ScenarioId::OverlapVsS => {
                p.alpha_rules = vec!["zero".into(), "semiclassical".into()];
            }
            ScenarioId::QuadratureSweep => {
                p.delta = 0.0;
                p.drive = 0.1;
            }
            ScenarioId::SecondOrderSweep => {
                p.alpha_rules = vec!["semiclassical".into()];
            }
            ScenarioId::PairCorrelation => {
                p.delta = 0.0;
                p.drive = 0.0;
            }
            ScenarioId::MfCurve => {
                p.delta = 0.4;
                p.drive = 0.0;
            }
            ScenarioId::PhaseDiagram => {
                p.drive = 0.0;
            }
        }
        p
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value.trim().parse::<f64>().map_err(|e| Error::InvalidValue {
        key: key.to_string(),
        message: format!("expected a number, got '{value}': {e}"),
    })
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|e| Error::InvalidValue {
            key: key.to_string(),
            message: format!("expected a nonnegative integer, got '{value}': {e}"),
        })
}

fn parse_f64_list(key: &str, value: &str) -> Result<Vec<f64>> {
    let items: Result<Vec<f64>> = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_f64(key, s))
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err(Error::InvalidValue {
            key: key.to_string(),
            message: "expected a nonempty comma-separated list".into(),
        });
    }
    Ok(items)
}

/// Apply one `key=value` override to a parameter record. Unknown keys are
/// a hard error so typos cannot silently run the default study.
pub fn apply_override(params: &mut ScenarioParams, key: &str, value: &str) -> Result<()> {
    match key {
        "delta" => params.delta = parse_f64(key, value)?,
        "pump" => params.pump = parse_f64(key, value)?,
        "drive" => params.drive = parse_f64(key, value)?,
        "quad_delta" => params.quad_delta = parse_f64(key, value)?,
        "quad_drive" => params.quad_drive = parse_f64(key, value)?,
        "pump_min" => params.pump_min = parse_f64(key, value)?,
        "pump_max" => params.pump_max = parse_f64(key, value)?,
        "pump_step" => params.pump_step = parse_f64(key, value)?,
        "delta_min" => params.delta_min = parse_f64(key, value)?,
        "delta_max" => params.delta_max = parse_f64(key, value)?,
        "delta_step" => params.delta_step = parse_f64(key, value)?,
        "s_list" => params.s_list = parse_f64_list(key, value)?,
        "alpha_rules" => {
            let rules: Vec<String> = value
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            if rules.is_empty() {
                return Err(Error::InvalidValue {
                    key: key.to_string(),
                    message: "expected a nonempty comma-separated list of rule names".into(),
                });
            }
            for rule in &rules {
                parse_alpha_rule(rule, 2)?;
            }
            params.alpha_rules = rules;
        }
        "fock_cutoff" => {
            let cutoff = parse_usize(key, value)?;
            if cutoff < 2 {
                return Err(Error::InvalidValue {
                    key: key.to_string(),
                    message: "the Fock cutoff must be at least 2".into(),
                });
            }
            params.fock_cutoff = cutoff;
        }
        "pair_couplings" => params.pair_couplings = parse_f64_list(key, value)?,
        "drive1" => params.drive1 = parse_f64(key, value)?,
        "drive2" => params.drive2 = parse_f64(key, value)?,
        "xi0" => params.xi0 = parse_f64(key, value)?,
        "coupling" => params.coupling = parse_f64(key, value)?,
        "wigner_half_width" => {
            let hw = parse_f64(key, value)?;
            if !(hw > 0.0) {
                return Err(Error::InvalidValue {
                    key: key.to_string(),
                    message: "the window half-width must be positive".into(),
                });
            }
            params.wigner_half_width = hw;
        }
        "wigner_points" => {
            let n = parse_usize(key, value)?;
            if n < 2 {
                return Err(Error::InvalidValue {
                    key: key.to_string(),
                    message: "need at least 2 grid points per axis".into(),
                });
            }
            params.wigner_points = n;
        }
        "refine_width" => {
            let w = parse_f64(key, value)?;
            if !(w > 0.0) {
                return Err(Error::InvalidValue {
                    key: key.to_string(),
                    message: "the bisection width must be positive".into(),
                });
            }
            params.refine_width = w;
        }
        other => return Err(Error::UnknownKey(other.to_string())),
    }
    Ok(())
}

/// Resolve an amplitude-rule name: `zero`, `semiclassical`,
/// `semiclassical-drive-free`, `exact` (oscillator ground-state photon
/// number at `cutoff`), or `fixed:<value>`.
pub fn parse_alpha_rule(name: &str, cutoff: usize) -> Result<AlphaRule> {
    let trimmed = name.trim();
    if let Some(v) = trimmed.strip_prefix("fixed:") {
        return Ok(AlphaRule::Fixed(parse_f64("alpha_rules", v)?));
    }
    match trimmed {
        "zero" => Ok(AlphaRule::Zero),
        "semiclassical" => Ok(AlphaRule::Semiclassical),
        "semiclassical-drive-free" => Ok(AlphaRule::SemiclassicalDriveFree),
        "exact" => Ok(AlphaRule::ExactPhoton { cutoff }),
        other => Err(Error::InvalidValue {
            key: "alpha_rules".to_string(),
            message: format!(
                "unknown amplitude rule '{other}' (expected zero, semiclassical, \
                 semiclassical-drive-free, exact, or fixed:<value>)"
            ),
        }),
    }
}

/// Short column-name tag of an amplitude rule.
fn rule_tag(name: &str) -> String {
    match name.trim() {
        "zero" => "alpha0".to_string(),
        "semiclassical" => "alphac".to_string(),
        "semiclassical-drive-free" => "alphac0".to_string(),
        "exact" => "alphaex".to_string(),
        other => {
            let mut tag = String::from("alpha_");
            tag.extend(other.chars().map(|c| if c.is_alphanumeric() { c } else { '_' }));
            tag
        }
    }
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Column-oriented numeric table with ordered metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTable {
    meta: Vec<(String, String)>,
    columns: Vec<(String, Vec<f64>)>,
}

impl SeriesTable {
    pub fn new() -> Self {
        SeriesTable {
            meta: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn push_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }

    /// Append a column; every column must have the same length.
    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) {
        let name = name.into();
        if let Some((first_name, first)) = self.columns.first() {
            assert_eq!(
                first.len(),
                values.len(),
                "column '{name}' has {} rows but '{first_name}' has {}",
                values.len(),
                first.len()
            );
        }
        self.columns.push((name, values));
    }

    pub fn meta(&self) -> &[(String, String)] {
        &self.meta
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Number of rows (0 for an empty table).
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |(_, v)| v.len())
    }

    /// Whether any recorded value is NaN (a failed sweep point).
    pub fn has_nan(&self) -> bool {
        self.columns
            .iter()
            .any(|(_, v)| v.iter().any(|x| x.is_nan()))
    }
}

impl Default for SeriesTable {
    fn default() -> Self {
        SeriesTable::new()
    }
}

/// What a scenario produces: a table, or a set of named Wigner grids.
#[derive(Clone, Debug)]
pub enum ScenarioOutput {
    Table(SeriesTable),
    WignerSet(Vec<(String, WignerGrid)>),
}

/// Evenly spaced inclusive grid.
fn lin_grid(key: &'static str, min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !min.is_finite() || !max.is_finite() || max < min {
        return Err(Error::InvalidValue {
            key: key.to_string(),
            message: format!("invalid grid: min {min}, max {max}, step {step}"),
        });
    }
    let n = ((max - min) / step).round() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| min + step * i as f64).collect();
    if let Some(last) = grid.last_mut() {
        if (*last - max).abs() < 0.5 * step {
            *last = max;
        }
    }
    grid.retain(|&x| x <= max + 1e-12 * step.max(1.0));
    Ok(grid)
}

fn pump_grid(params: &ScenarioParams) -> Result<Vec<f64>> {
    lin_grid("pump_step", params.pump_min, params.pump_max, params.pump_step)
}

/// NaN-on-failure wrapper: log and poison the single point, not the sweep.
fn record(label: &str, at: f64, result: Result<f64>) -> f64 {
    match result {
        Ok(v) => v,
        Err(err) => {
            log::error!("{label} failed at {at:.6}: {err}");
            f64::NAN
        }
    }
}

/// Ground state of the oscillator model, parity-projected when undriven.
pub fn boson_ground(space: FockSpace, kpo: &KpoParams) -> Result<Vec<C64>> {
    let parity = space.parity();
    let symmetry = (kpo.drive == 0.0).then_some(&parity);
    Ok(ground_state(&build_kpo(space, kpo), symmetry, None)?.state)
}

/// Ground state of a spin model, parity-projected when undriven.
pub fn spin_ground(space: SpinSpace, kpo: &KpoParams, sp: &SpinModelParams) -> Result<Vec<C64>> {
    let parity = space.x_parity();
    let symmetry = (kpo.drive == 0.0).then_some(&parity);
    Ok(ground_state(&build_spin(space, kpo, sp)?, symmetry, None)?.state)
}

/// Run a scenario to completion.
pub fn run_scenario(params: &ScenarioParams) -> Result<ScenarioOutput> {
    match params.scenario {
        ScenarioId::PhotonSweep => photon_sweep(params).map(ScenarioOutput::Table),
        ScenarioId::WignerPanel => wigner_panel(params).map(ScenarioOutput::WignerSet),
        ScenarioId::OverlapVsS => overlap_vs_s(params).map(ScenarioOutput::Table),
        ScenarioId::QuadratureSweep => quadrature_sweep(params).map(ScenarioOutput::Table),
        ScenarioId::SecondOrderSweep => second_order_sweep(params).map(ScenarioOutput::Table),
        ScenarioId::PairCorrelation => pair_correlation(params).map(ScenarioOutput::Table),
        ScenarioId::MfCurve => mf_curve(params).map(ScenarioOutput::Table),
        ScenarioId::PhaseDiagram => phase_diagram_table(params).map(ScenarioOutput::Table),
    }
}

fn base_meta(params: &ScenarioParams) -> SeriesTable {
    let mut table = SeriesTable::new();
    table.push_meta("scenario", params.scenario.name());
    table.push_meta("version", env!("CARGO_PKG_VERSION"));
    table
}

fn spin_spaces(params: &ScenarioParams) -> Result<Vec<SpinSpace>> {
    params.s_list.iter().map(|&s| SpinSpace::new(s)).collect()
}

fn photon_sweep(params: &ScenarioParams) -> Result<SeriesTable> {
    let fock = FockSpace::new(params.fock_cutoff);
    let pumps = pump_grid(params)?;
    let spins = spin_spaces(params)?;
    let mut table = base_meta(params);
    table.push_meta("delta", fmt_num(params.delta));
    table.push_meta("drive", fmt_num(params.drive));
    table.push_meta("fock_cutoff", format!("{}", params.fock_cutoff));
    table.push_column("pump", pumps.clone());

    let boson: Vec<f64> = pumps
        .par_iter()
        .map(|&p| {
            let kpo = KpoParams::new(params.delta, p, params.drive);
            record(
                "photon_boson",
                p,
                boson_ground(fock, &kpo).and_then(|gs| photon_number(&gs, fock)),
            )
        })
        .collect();
    table.push_column("photon_boson", boson);

    for rule_name in &params.alpha_rules {
        let rule = parse_alpha_rule(rule_name, params.fock_cutoff)?;
        let tag = rule_tag(rule_name);
        for &space in &spins {
            let label = format!("f_sp_{tag}_s{}", fmt_num(space.s()));
            let sp = SpinModelParams::first_order(rule);
            let values: Vec<f64> = pumps
                .par_iter()
                .map(|&p| {
                    let kpo = KpoParams::new(params.delta, p, params.drive);
                    record(
                        &label,
                        p,
                        spin_ground(space, &kpo, &sp).and_then(|gs| f_sp(&gs, space)),
                    )
                })
                .collect();
            table.push_column(label.clone(), values);
        }
    }
    Ok(table)
}

fn quadrature_sweep(params: &ScenarioParams) -> Result<SeriesTable> {
    let fock = FockSpace::new(params.fock_cutoff);
    let pumps = pump_grid(params)?;
    let spins = spin_spaces(params)?;
    let mut table = base_meta(params);
    table.push_meta("delta", fmt_num(params.delta));
    table.push_meta("drive", fmt_num(params.drive));
    table.push_meta("fock_cutoff", format!("{}", params.fock_cutoff));
    table.push_column("pump", pumps.clone());

    let boson: Vec<f64> = pumps
        .par_iter()
        .map(|&p| {
            let kpo = KpoParams::new(params.delta, p, params.drive);
            record(
                "quad_boson",
                p,
                boson_ground(fock, &kpo).and_then(|gs| quadrature(&gs, fock)),
            )
        })
        .collect();
    table.push_column("quad_boson", boson);

    for rule_name in &params.alpha_rules {
        let rule = parse_alpha_rule(rule_name, params.fock_cutoff)?;
        let tag = rule_tag(rule_name);
        for &space in &spins {
            let label = format!("f_sq_{tag}_s{}", fmt_num(space.s()));
            let sp = SpinModelParams::first_order(rule);
            let values: Vec<f64> = pumps
                .par_iter()
                .map(|&p| {
                    let kpo = KpoParams::new(params.delta, p, params.drive);
                    record(
                        &label,
                        p,
                        (|| {
                            let alpha = resolve_alpha(rule, &kpo)?;
                            let gs = spin_ground(space, &kpo, &sp)?;
                            f_sq(&gs, space, alpha, ExpansionOrder::First)
                        })(),
                    )
                })
                .collect();
            table.push_column(label.clone(), values);
        }
    }
    Ok(table)
}

fn second_order_sweep(params: &ScenarioParams) -> Result<SeriesTable> {
    let fock = FockSpace::new(params.fock_cutoff);
    let pumps = pump_grid(params)?;
    let spins = spin_spaces(params)?;
    if params.alpha_rules.len() != 1 {
        return Err(Error::InvalidValue {
            key: "alpha_rules".to_string(),
            message: "the order-comparison sweep uses exactly one amplitude rule".into(),
        });
    }
    let rule = parse_alpha_rule(&params.alpha_rules[0], params.fock_cutoff)?;
    let tag = rule_tag(&params.alpha_rules[0]);
    let mut table = base_meta(params);
    table.push_meta("delta", fmt_num(params.delta));
    table.push_meta("drive", fmt_num(params.drive));
    table.push_meta("quad_delta", fmt_num(params.quad_delta));
    table.push_meta("quad_drive", fmt_num(params.quad_drive));
    table.push_meta("alpha_rule", params.alpha_rules[0].clone());
    table.push_meta("fock_cutoff", format!("{}", params.fock_cutoff));
    table.push_column("pump", pumps.clone());

    // Photon panel at (delta, drive).
    let boson: Vec<f64> = pumps
        .par_iter()
        .map(|&p| {
            let kpo = KpoParams::new(params.delta, p, params.drive);
            record(
                "photon_boson",
                p,
                boson_ground(fock, &kpo).and_then(|gs| photon_number(&gs, fock)),
            )
        })
        .collect();
    table.push_column("photon_boson", boson);
    for order in [ExpansionOrder::First, ExpansionOrder::Second] {
        let order_tag = match order {
            ExpansionOrder::First => 1,
            ExpansionOrder::Second => 2,
        };
        for &space in &spins {
            let label = format!("f_sp{order_tag}_{tag}_s{}", fmt_num(space.s()));
            let sp = SpinModelParams::first_order(rule).with_order(order);
            let values: Vec<f64> = pumps
                .par_iter()
                .map(|&p| {
                    let kpo = KpoParams::new(params.delta, p, params.drive);
                    record(
                        &label,
                        p,
                        spin_ground(space, &kpo, &sp).and_then(|gs| f_sp(&gs, space)),
                    )
                })
                .collect();
            table.push_column(label.clone(), values);
        }
    }

    // Quadrature panel at (quad_delta, quad_drive).
    let boson_q: Vec<f64> = pumps
        .par_iter()
        .map(|&p| {
            let kpo = KpoParams::new(params.quad_delta, p, params.quad_drive);
            record(
                "quad_boson",
                p,
                boson_ground(fock, &kpo).and_then(|gs| quadrature(&gs, fock)),
            )
        })
        .collect();
    table.push_column("quad_boson", boson_q);
    for order in [ExpansionOrder::First, ExpansionOrder::Second] {
        let order_tag = match order {
            ExpansionOrder::First => 1,
            ExpansionOrder::Second => 2,
        };
        for &space in &spins {
            let label = format!("f_sq{order_tag}_{tag}_s{}", fmt_num(space.s()));
            let sp = SpinModelParams::first_order(rule).with_order(order);
            let values: Vec<f64> = pumps
                .par_iter()
                .map(|&p| {
                    let kpo = KpoParams::new(params.quad_delta, p, params.quad_drive);
                    record(
                        &label,
                        p,
                        (|| {
                            let alpha = resolve_alpha(rule, &kpo)?;
                            let gs = spin_ground(space, &kpo, &sp)?;
                            f_sq(&gs, space, alpha, order)
                        })(),
                    )
                })
                .collect();
            table.push_column(label.clone(), values);
        }
    }
    Ok(table)
}

fn overlap_vs_s(params: &ScenarioParams) -> Result<SeriesTable> {
    let fock = FockSpace::new(params.fock_cutoff);
    let spins = spin_spaces(params)?;
    let kpo = KpoParams::new(params.delta, params.pump, params.drive);
    let boson = boson_ground(fock, &kpo)?;
    let mut table = base_meta(params);
    table.push_meta("delta", fmt_num(params.delta));
    table.push_meta("pump", fmt_num(params.pump));
    table.push_meta("drive", fmt_num(params.drive));
    table.push_meta("fock_cutoff", format!("{}", params.fock_cutoff));
    table.push_column("s", params.s_list.clone());
    for rule_name in &params.alpha_rules {
        let rule = parse_alpha_rule(rule_name, params.fock_cutoff)?;
        let tag = rule_tag(rule_name);
        let label = format!("overlap_{tag}");
        let sp = SpinModelParams::first_order(rule);
        let values: Vec<f64> = spins
            .iter()
            .map(|&space| {
                record(
                    &label,
                    space.s(),
                    spin_ground(space, &kpo, &sp)
                        .and_then(|gs| overlap(&boson, fock, &gs, space)),
                )
            })
            .collect();
        table.push_column(label.clone(), values);
    }
    Ok(table)
}

fn wigner_panel(params: &ScenarioParams) -> Result<Vec<(String, WignerGrid)>> {
    let fock = FockSpace::new(params.fock_cutoff);
    let spins = spin_spaces(params)?;
    let kpo = KpoParams::new(params.delta, params.pump, params.drive);
    let grid = GridSpec::square(params.wigner_half_width, params.wigner_points);
    let mut panels = Vec::new();
    let boson = boson_ground(fock, &kpo)?;
    panels.push(("boson".to_string(), wigner(&boson, fock, &grid)?));
    for rule_name in &params.alpha_rules {
        let rule = parse_alpha_rule(rule_name, params.fock_cutoff)?;
        let tag = rule_tag(rule_name);
        for &space in &spins {
            let name = format!("spin_{tag}_s{}", fmt_num(space.s()));
            let sp = SpinModelParams::first_order(rule);
            let gs = spin_ground(space, &kpo, &sp)?;
            panels.push((name, wigner_spin(&gs, space, fock, &grid)?));
        }
    }
    Ok(panels)
}

fn pair_correlation(params: &ScenarioParams) -> Result<SeriesTable> {
    let fock = FockSpace::new(params.fock_cutoff);
    let pumps = pump_grid(params)?;
    let spins = spin_spaces(params)?;
    let mut table = base_meta(params);
    table.push_meta("delta", fmt_num(params.delta));
    table.push_meta("drive1", fmt_num(params.drive1));
    table.push_meta("drive2", fmt_num(params.drive2));
    table.push_meta("xi0", fmt_num(params.xi0));
    table.push_meta("fock_cutoff", format!("{}", params.fock_cutoff));
    table.push_column("pump", pumps.clone());

    for &coupling in &params.pair_couplings {
        let j_tag = fmt_num(coupling);
        let pair_at = |p: f64| {
            let mut pair =
                PairParams::symmetric(params.delta, p, (params.drive1, params.drive2), coupling);
            pair.xi0 = params.xi0;
            pair
        };

        let label = format!("C_b_J{j_tag}");
        let boson: Vec<f64> = pumps
            .par_iter()
            .map(|&p| {
                record(
                    &label,
                    p,
                    (|| {
                        let h = build_kpo_pair(fock, &pair_at(p))?;
                        let gs = ground_state(&h, None, None)?;
                        correlation_boson(&gs.state, fock)
                    })(),
                )
            })
            .collect();
        table.push_column(label.clone(), boson);

        for &space in &spins {
            for couple_yy in [true, false] {
                let variant = if couple_yy { "full" } else { "zz" };
                let label = format!("C_s_{variant}_J{j_tag}_s{}", fmt_num(space.s()));
                let values: Vec<f64> = pumps
                    .par_iter()
                    .map(|&p| {
                        record(
                            &label,
                            p,
                            (|| {
                                let pair = pair_at(p);
                                let mut sp = SpinModelParams::first_order(
                                    AlphaRule::SemiclassicalDriveFree,
                                );
                                sp.couple_yy = couple_yy;
                                let h = build_spin_pair(space, &pair, &sp)?;
                                let gs = ground_state(&h, None, None)?;
                                let alpha = alpha_c0(&pair.site1);
                                correlation_spin(&gs.state, space, alpha)
                            })(),
                        )
                    })
                    .collect();
                table.push_column(label.clone(), values);
            }
        }
    }
    Ok(table)
}

fn mf_curve(params: &ScenarioParams) -> Result<SeriesTable> {
    let fock = FockSpace::new(params.fock_cutoff);
    let pumps = pump_grid(params)?;
    let spins = spin_spaces(params)?;
    let config = MeanFieldConfig {
        refine_width: params.refine_width,
        ..MeanFieldConfig::default()
    };
    let mut table = base_meta(params);
    table.push_meta("delta", fmt_num(params.delta));
    table.push_meta("coupling", fmt_num(params.coupling));
    table.push_meta("fock_cutoff", format!("{}", params.fock_cutoff));
    table.push_column("pump", pumps.clone());

    let record_curve = |label: &str, picture: &MeanFieldPicture| -> Vec<f64> {
        magnetization_curve(picture, params.delta, params.coupling, &pumps, &config)
            .into_iter()
            .zip(&pumps)
            .map(|(r, &p)| record(label, p, r.map(|sol| sol.scaled)))
            .collect()
    };
    table.push_column("x_boson", record_curve("x_boson", &MeanFieldPicture::Boson(fock)));
    for &space in &spins {
        let label = format!("mz_scaled_s{}", fmt_num(space.s()));
        let values = record_curve(&label, &MeanFieldPicture::Spin(space));
        table.push_column(label.clone(), values);
    }
    Ok(table)
}

fn phase_diagram_table(params: &ScenarioParams) -> Result<SeriesTable> {
    let fock = FockSpace::new(params.fock_cutoff);
    let deltas = lin_grid("delta_step", params.delta_min, params.delta_max, params.delta_step)?;
    let pumps = pump_grid(params)?;
    let spins = spin_spaces(params)?;
    let mut table = base_meta(params);
    table.push_meta("coupling", fmt_num(params.coupling));
    table.push_meta("fock_cutoff", format!("{}", params.fock_cutoff));
    table.push_column("delta", deltas.clone());

    let mut record_boundary = |label_base: String, picture: &MeanFieldPicture| {
        let mut first = Vec::with_capacity(deltas.len());
        let mut second = Vec::with_capacity(deltas.len());
        for &delta in &deltas {
            match critical_pumps(picture, delta, params.coupling, &pumps, params.refine_width) {
                Ok(crossings) => {
                    first.push(crossings.first().copied().unwrap_or(f64::NAN));
                    second.push(crossings.get(1).copied().unwrap_or(f64::NAN));
                }
                Err(err) => {
                    log::error!("{label_base} failed at detuning {delta:.4}: {err}");
                    first.push(f64::NAN);
                    second.push(f64::NAN);
                }
            }
        }
        table.push_column(format!("{label_base}_1"), first);
        table.push_column(format!("{label_base}_2"), second);
    };
    record_boundary("pc_boson".to_string(), &MeanFieldPicture::Boson(fock));
    for &space in &spins {
        record_boundary(
            format!("pc_s{}", fmt_num(space.s())),
            &MeanFieldPicture::Spin(space),
        );
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for id in ScenarioId::ALL {
            assert_eq!(ScenarioId::parse(id.name()).unwrap(), id);
        }
        assert!(matches!(
            ScenarioId::parse("phton-sweep"),
            Err(Error::UnknownScenario(_))
        ));
    }

    #[test]
    fn defaults_match_the_reference_study() {
        let p = ScenarioParams::defaults(ScenarioId::PhotonSweep);
        assert_eq!((p.delta, p.drive), (1.0, 0.0));
        assert_eq!(p.s_list, vec![1.0, 2.0, 4.0, 10.0]);
        let q = ScenarioParams::defaults(ScenarioId::QuadratureSweep);
        assert_eq!((q.delta, q.drive), (0.0, 0.1));
        let pr = ScenarioParams::defaults(ScenarioId::PairCorrelation);
        assert_eq!((pr.delta, pr.drive1, pr.drive2), (0.0, 0.1, -0.1));
        assert_eq!(pr.pair_couplings, vec![0.08, 0.12]);
        let mf = ScenarioParams::defaults(ScenarioId::MfCurve);
        assert_eq!((mf.delta, mf.coupling), (0.4, 0.2));
        let pd = ScenarioParams::defaults(ScenarioId::PhaseDiagram);
        assert_eq!((pd.delta_min, pd.delta_max, pd.coupling), (0.0, 0.6, 0.2));
        let w = ScenarioParams::defaults(ScenarioId::WignerPanel);
        assert_eq!((w.delta, w.pump, w.drive), (1.0, 2.0, 0.0));
        assert_eq!(w.s_list, vec![1.0, 4.0, 10.0]);
    }

    #[test]
    fn overrides_apply_and_reject_unknown_keys() {
        let mut p = ScenarioParams::defaults(ScenarioId::PhotonSweep);
        apply_override(&mut p, "delta", "0.5").unwrap();
        apply_override(&mut p, "s_list", "1,3.5").unwrap();
        apply_override(&mut p, "alpha_rules", "zero, fixed:1.25").unwrap();
        assert_eq!(p.delta, 0.5);
        assert_eq!(p.s_list, vec![1.0, 3.5]);
        assert_eq!(p.alpha_rules, vec!["zero".to_string(), "fixed:1.25".to_string()]);
        assert!(matches!(
            apply_override(&mut p, "detla", "1"),
            Err(Error::UnknownKey(_))
        ));
        assert!(matches!(
            apply_override(&mut p, "pump_step", "fast"),
            Err(Error::InvalidValue { .. })
        ));
        assert!(matches!(
            apply_override(&mut p, "alpha_rules", "semiclasical"),
            Err(Error::InvalidValue { .. })
        ));
    }

    #[test]
    fn vacuum_limit_sweep_is_identically_zero() {
        let mut p = ScenarioParams::defaults(ScenarioId::PhotonSweep);
        p.pump_max = 0.0;
        p.fock_cutoff = 10;
        let out = run_scenario(&p).unwrap();
        let ScenarioOutput::Table(table) = out else {
            panic!("expected a table");
        };
        assert_eq!(table.rows(), 1);
        for (name, values) in table.columns() {
            if name != "pump" {
                assert!(
                    values[0].abs() < 1e-10,
                    "column {name} = {} at zero pump",
                    values[0]
                );
            }
        }
    }

    #[test]
    fn reruns_are_bit_identical() {
        let mut p = ScenarioParams::defaults(ScenarioId::PhotonSweep);
        p.pump_step = 0.5;
        p.fock_cutoff = 12;
        p.s_list = vec![1.0, 2.0];
        let a = run_scenario(&p).unwrap();
        let b = run_scenario(&p).unwrap();
        let (ScenarioOutput::Table(a), ScenarioOutput::Table(b)) = (a, b) else {
            panic!("expected tables");
        };
        assert_eq!(a.columns().len(), b.columns().len());
        for ((n1, v1), (n2, v2)) in a.columns().iter().zip(b.columns()) {
            assert_eq!(n1, n2);
            let bits1: Vec<u64> = v1.iter().map(|x| x.to_bits()).collect();
            let bits2: Vec<u64> = v2.iter().map(|x| x.to_bits()).collect();
            assert_eq!(bits1, bits2, "column {n1} differs between reruns");
        }
    }

    #[test]
    fn overlap_study_prefers_the_semiclassical_amplitude() {
        let mut p = ScenarioParams::defaults(ScenarioId::OverlapVsS);
        p.fock_cutoff = 24;
        let ScenarioOutput::Table(table) = run_scenario(&p).unwrap() else {
            panic!("expected a table");
        };
        let zero = table.column("overlap_alpha0").unwrap();
        let semi = table.column("overlap_alphac").unwrap();
        assert_eq!(zero.len(), 4);
        for (i, (&z, &c)) in zero.iter().zip(semi).enumerate() {
            assert!(z.is_finite() && c.is_finite());
            assert!(c >= z, "s index {i}: alpha_c overlap {c} < alpha0 {z}");
        }
    }

    #[test]
    fn pair_study_reports_negative_then_positive_correlation() {
        let mut p = ScenarioParams::defaults(ScenarioId::PairCorrelation);
        p.fock_cutoff = 8;
        p.pump_min = 0.02;
        p.pump_max = 2.02;
        p.pump_step = 2.0;
        p.pair_couplings = vec![0.12];
        p.s_list = vec![1.0];
        let ScenarioOutput::Table(table) = run_scenario(&p).unwrap() else {
            panic!("expected a table");
        };
        let cb = table.column("C_b_J0.12").unwrap();
        assert!(cb[0] < 0.0, "C_b at weak pump: {}", cb[0]);
        assert!(cb[1] > 0.0, "C_b at strong pump: {}", cb[1]);
        assert!(table.column("C_s_full_J0.12_s1").is_some());
        assert!(table.column("C_s_zz_J0.12_s1").is_some());
    }

    #[test]
    fn wigner_panel_names_its_grids() {
        let mut p = ScenarioParams::defaults(ScenarioId::WignerPanel);
        p.fock_cutoff = 12;
        p.wigner_points = 7;
        p.wigner_half_width = 2.0;
        p.s_list = vec![1.0];
        let ScenarioOutput::WignerSet(panels) = run_scenario(&p).unwrap() else {
            panic!("expected grids");
        };
        let names: Vec<&str> = panels.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["boson", "spin_alpha0_s1", "spin_alphac_s1"]);
        for (_, grid) in &panels {
            assert_eq!(grid.x_axis().len(), 7);
            assert_eq!(grid.values().len(), 49);
        }
    }

    #[test]
    fn out_of_domain_points_become_nan_not_errors() {
        let mut p = ScenarioParams::defaults(ScenarioId::QuadratureSweep);
        p.fock_cutoff = 12;
        p.pump_min = 1.9;
        p.pump_max = 2.0;
        p.pump_step = 0.05;
        p.s_list = vec![1.0];
        p.alpha_rules = vec!["semiclassical".into()];
        let ScenarioOutput::Table(table) = run_scenario(&p).unwrap() else {
            panic!("expected a table");
        };
        let boson = table.column("quad_boson").unwrap();
        assert!(boson.iter().all(|v| v.is_finite()));
        let spin = table.column("f_sq_alphac_s1").unwrap();
        // the amplitude leaves the spin-1 domain just below pump 2
        assert!(spin[0].is_finite());
        assert!(spin.last().unwrap().is_nan());
        assert!(table.has_nan());
    }

    #[test]
    fn mean_field_tables_cover_both_pictures() {
        let mut p = ScenarioParams::defaults(ScenarioId::MfCurve);
        p.pump_step = 0.5;
        p.fock_cutoff = 10;
        p.s_list = vec![1.0];
        let ScenarioOutput::Table(table) = run_scenario(&p).unwrap() else {
            panic!("expected a table");
        };
        assert!(table.column("x_boson").is_some());
        assert!(table.column("mz_scaled_s1").is_some());
        assert_eq!(table.rows(), 5);

        let mut pd = ScenarioParams::defaults(ScenarioId::PhaseDiagram);
        pd.delta_min = 0.3;
        pd.delta_max = 0.4;
        pd.delta_step = 0.1;
        pd.pump_step = 0.1;
        pd.fock_cutoff = 10;
        pd.s_list = vec![1.0];
        pd.refine_width = 1e-3;
        let ScenarioOutput::Table(table) = run_scenario(&pd).unwrap() else {
            panic!("expected a table");
        };
        let pc = table.column("pc_boson_1").unwrap();
        assert!(pc.iter().all(|v| v.is_finite()));
        let pc2 = table.column("pc_boson_2").unwrap();
        assert!(pc2.iter().all(|v| v.is_nan()));
    }
}
