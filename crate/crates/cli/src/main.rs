//! Command-line front end for the oscillator / spin-model library.
//!
//! Four subcommands: `run` executes a named scenario and writes CSV (and
//! optionally SVG) files, `wigner` samples a single Wigner function,
//! `verify` runs the acceptance checks, and `list-scenarios` enumerates
//! what `run` understands.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure (the
//! requested output contains NaN points), 3 acceptance-check failure.
//! Diagnostics go to stderr; data goes to files and stdout only.

mod output;

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use kpo_spinlab::{
    apply_override, boson_ground, observables, parse_alpha_rule, run_all, spin_ground,
    AcceptanceConfig, FockSpace, GridSpec, KpoParams, ScenarioId, ScenarioOutput, ScenarioParams,
    SpinModelParams, SpinSpace, WignerGrid,
};

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_NUMERICAL: i32 = 2;
const EXIT_ACCEPTANCE: i32 = 3;

/// Environment variable consulted for the worker-thread count when
/// `--threads` is not given. `0` means one thread per CPU.
const THREADS_ENV: &str = "KPO_SPINLAB_THREADS";

#[derive(Parser)]
#[command(
    name = "kpo-spinlab",
    version,
    about = "Kerr parametric oscillator ground states and their spin models"
)]
struct Cli {
    /// Worker threads (0 = one per CPU); falls back to KPO_SPINLAB_THREADS
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario and write its output files
    Run {
        /// Scenario name (see `list-scenarios`)
        scenario: String,

        /// Override one parameter as KEY=VALUE (repeatable, applied in order)
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,

        /// Flat KEY=VALUE file applied before any --set override
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,

        /// Directory the output files are written into
        #[arg(long, default_value = ".", value_name = "DIR")]
        out: PathBuf,

        /// Also write an SVG plot next to each CSV
        #[arg(long)]
        svg: bool,
    },

    /// Sample one Wigner function and write wigner.csv plus wigner.svg
    Wigner {
        /// Detuning (Kerr units)
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,

        /// Two-photon pump amplitude (Kerr units)
        #[arg(long, allow_negative_numbers = true)]
        pump: f64,

        /// Single-photon drive amplitude (Kerr units)
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        drive: f64,

        /// Sample the spin-s model instead of the full oscillator
        #[arg(long, value_name = "S")]
        spin: Option<f64>,

        /// Displacement rule for the spin model (zero, semiclassical,
        /// semiclassical-drive-free, exact, fixed:<value>)
        #[arg(long, default_value = "semiclassical", value_name = "RULE")]
        alpha_rule: String,

        /// Fock-space cutoff (highest retained number state)
        #[arg(long, default_value_t = 20)]
        cutoff: usize,

        /// Half-width of the square phase-space window
        #[arg(long, default_value_t = 4.0)]
        half_width: f64,

        /// Grid points per axis
        #[arg(long, default_value_t = 161)]
        points: usize,

        /// Directory the output files are written into
        #[arg(long, default_value = ".", value_name = "DIR")]
        out: PathBuf,
    },

    /// Run the acceptance checks and print one verdict line per check
    Verify {
        /// Coarser sweep grids for a quicker pass (same claims)
        #[arg(long)]
        fast: bool,
    },

    /// List the scenarios `run` accepts
    ListScenarios,
}

/// A command failure carrying the process exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<kpo_spinlab::Error> for Failure {
    fn from(err: kpo_spinlab::Error) -> Self {
        Failure {
            code: if err.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_NUMERICAL
            },
            message: err.to_string(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: format!("{err:#}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: err.to_string(),
        }
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };

    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    if let Err(failure) = init_thread_pool(cli.threads) {
        eprintln!("error: {}", failure.message);
        return failure.code;
    }

    match dispatch(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

/// The CLI owns the global thread pool: explicit flag first, then the
/// environment variable, then one thread per CPU.
fn init_thread_pool(flag: Option<usize>) -> Result<(), Failure> {
    let threads = match flag {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(raw) => raw.trim().parse::<usize>().map_err(|_| {
                Failure::usage(format!(
                    "{THREADS_ENV} must be a nonnegative integer, got '{raw}'"
                ))
            })?,
            Err(std::env::VarError::NotPresent) => 0,
            Err(err) => return Err(Failure::usage(format!("{THREADS_ENV}: {err}"))),
        },
    };
    // num_threads(0) lets the pool size itself to the machine.
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|err| Failure::usage(format!("thread pool: {err}")))
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Run {
            scenario,
            set,
            config,
            out,
            svg,
        } => run_command(&scenario, &set, config.as_deref(), &out, svg),
        Command::Wigner {
            delta,
            pump,
            drive,
            spin,
            alpha_rule,
            cutoff,
            half_width,
            points,
            out,
        } => wigner_command(
            delta, pump, drive, spin, &alpha_rule, cutoff, half_width, points, &out,
        ),
        Command::Verify { fast } => verify_command(fast),
        Command::ListScenarios => {
            for id in ScenarioId::ALL {
                println!("{:<18} {}", id.name(), id.summary());
            }
            Ok(EXIT_OK)
        }
    }
}

/// Split one `KEY=VALUE` string; both sides are trimmed.
fn split_assignment(raw: &str) -> Result<(&str, &str), Failure> {
    match raw.split_once('=') {
        Some((key, value)) => Ok((key.trim(), value.trim())),
        None => Err(Failure::usage(format!(
            "expected KEY=VALUE, got '{raw}'"
        ))),
    }
}

/// Apply a flat key=value config file. Blank lines and `#` comments are
/// skipped; every other line must be a KEY=VALUE assignment.
fn apply_config_file(params: &mut ScenarioParams, path: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path).map_err(|err| {
        Failure::usage(format!("cannot read config file {}: {err}", path.display()))
    })?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = split_assignment(line).map_err(|f| {
            Failure::usage(format!("{} line {}: {}", path.display(), lineno + 1, f.message))
        })?;
        apply_override(params, key, value).map_err(|err| {
            Failure::usage(format!("{} line {}: {err}", path.display(), lineno + 1))
        })?;
    }
    Ok(())
}

fn run_command(
    scenario: &str,
    set: &[String],
    config: Option<&Path>,
    out: &Path,
    svg: bool,
) -> Result<i32, Failure> {
    let id = ScenarioId::parse(scenario)?;
    let mut params = ScenarioParams::defaults(id);
    if let Some(path) = config {
        apply_config_file(&mut params, path)?;
    }
    for assignment in set {
        let (key, value) = split_assignment(assignment)?;
        apply_override(&mut params, key, value)?;
    }

    std::fs::create_dir_all(out)?;
    let result = kpo_spinlab::run_scenario(&params)?;
    let stem = id.name().replace('-', "_");

    let mut nan_found = false;
    match &result {
        ScenarioOutput::Table(table) => {
            let csv = out.join(format!("{stem}.csv"));
            output::write_table_csv(&csv, table)?;
            println!("{}", csv.display());
            if svg {
                let path = out.join(format!("{stem}.svg"));
                output::write_text(&path, &output::line_plot_svg(table, id.name()))?;
                println!("{}", path.display());
            }
            nan_found = table.has_nan();
        }
        ScenarioOutput::WignerSet(panels) => {
            for (panel, grid) in panels {
                let meta = wigner_run_meta(&params, panel);
                let csv = out.join(format!("wigner_panel_{panel}.csv"));
                output::write_wigner_csv(&csv, grid, &meta)?;
                println!("{}", csv.display());
                if svg {
                    let path = out.join(format!("wigner_panel_{panel}.svg"));
                    let title = format!("{} {panel}", id.name());
                    output::write_text(&path, &output::heatmap_svg(grid, &title))?;
                    println!("{}", path.display());
                }
                nan_found |= grid.values().iter().any(|v| v.is_nan());
            }
        }
    }

    if nan_found {
        log::error!("output contains NaN points (failed sweep points are logged above)");
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

fn wigner_run_meta(params: &ScenarioParams, panel: &str) -> Vec<(String, String)> {
    vec![
        ("scenario".into(), params.scenario.name().into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("panel".into(), panel.into()),
        ("delta".into(), params.delta.to_string()),
        ("pump".into(), params.pump.to_string()),
        ("drive".into(), params.drive.to_string()),
        ("fock_cutoff".into(), params.fock_cutoff.to_string()),
        ("half_width".into(), params.wigner_half_width.to_string()),
        ("points".into(), params.wigner_points.to_string()),
    ]
}

#[allow(clippy::too_many_arguments)]
fn wigner_command(
    delta: f64,
    pump: f64,
    drive: f64,
    spin: Option<f64>,
    alpha_rule: &str,
    cutoff: usize,
    half_width: f64,
    points: usize,
    out: &Path,
) -> Result<i32, Failure> {
    if !(half_width > 0.0) {
        return Err(Failure::usage("--half-width must be positive"));
    }
    if points < 2 {
        return Err(Failure::usage("--points must be at least 2"));
    }
    if cutoff < 2 {
        return Err(Failure::usage("--cutoff must be at least 2"));
    }

    let fock = FockSpace::new(cutoff);
    let kpo = KpoParams::new(delta, pump, drive);
    let grid_spec = GridSpec::square(half_width, points);

    let mut meta: Vec<(String, String)> = vec![
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("delta".into(), delta.to_string()),
        ("pump".into(), pump.to_string()),
        ("drive".into(), drive.to_string()),
        ("fock_cutoff".into(), cutoff.to_string()),
        ("half_width".into(), half_width.to_string()),
        ("points".into(), points.to_string()),
    ];

    let grid: WignerGrid = match spin {
        Some(s) => {
            let space = SpinSpace::new(s)?;
            let rule = parse_alpha_rule(alpha_rule, cutoff)?;
            let sp = SpinModelParams::first_order(rule);
            let state = spin_ground(space, &kpo, &sp)?;
            meta.push(("mode".into(), format!("spin s={s}")));
            meta.push(("alpha_rule".into(), alpha_rule.to_string()));
            observables::wigner_spin(&state, space, fock, &grid_spec)?
        }
        None => {
            let state = boson_ground(fock, &kpo)?;
            meta.push(("mode".into(), "oscillator".into()));
            observables::wigner(&state, fock, &grid_spec)?
        }
    };

    std::fs::create_dir_all(out)?;
    let csv = out.join("wigner.csv");
    output::write_wigner_csv(&csv, &grid, &meta)?;
    println!("{}", csv.display());
    let svg = out.join("wigner.svg");
    let title = match spin {
        Some(s) => format!("Wigner (spin s={s}, {alpha_rule})"),
        None => "Wigner (oscillator)".to_string(),
    };
    output::write_text(&svg, &output::heatmap_svg(&grid, &title))?;
    println!("{}", svg.display());

    if grid.values().iter().any(|v| v.is_nan()) {
        log::error!("Wigner grid contains NaN points");
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}

fn verify_command(fast: bool) -> Result<i32, Failure> {
    let config = if fast {
        AcceptanceConfig::fast()
    } else {
        AcceptanceConfig::full()
    };
    let reports = run_all(&config);
    print!("{}", kpo_spinlab::render_reports(&reports));
    if kpo_spinlab::all_passed(&reports) {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_ACCEPTANCE)
    }
}
