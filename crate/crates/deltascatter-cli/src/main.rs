//! `deltascatter` — point-scatterer scattering amplitudes from the command
//! line, under both the standard renormalized and the DFSS treatments.
//!
//! Commands: `amplitude`, `sweep`, `compare`, `coincidence`, `validate`,
//! `plot`. Scenes are JSON documents (see [`scene`]); tables are CSV;
//! plots are static SVG. Exit codes: 0 ok, 1 validation failure, 2 input
//! error, 3 spectral singularity, 4 kernel singularity.

mod plot;
mod scene;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use deltascatter::amplitude::scattering_amplitude;
use deltascatter::coincidence::fit_inverse_log;
use deltascatter::model::{wave_vectors, Dimension, DirectionPair, Formulation};
use deltascatter::oracle::run_conformance;
use deltascatter::renorm::{matched_coupling_2d, matched_coupling_3d};
use deltascatter::{Complex64, Error, Scene64};

use scene::{error_line, load_scene};
use sweep::{limit_study_csv, run_coincidence, run_sweep, sweep_csv, write_file, GridSpec, SweepVariable};

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SPECTRAL: u8 = 3;
pub const EXIT_KERNEL: u8 = 4;

/// A CLI failure: exit code plus the stderr line.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: String) -> Self {
        CliError { code, message }
    }
}

/// Maps library errors onto the documented exit codes.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::SpectralSingularity { .. } => EXIT_SPECTRAL,
        Error::KernelSingularity { .. } | Error::DuplicatePositionStandard { .. } => EXIT_KERNEL,
        Error::NonPositiveWavenumber { .. }
        | Error::EmptyScene
        | Error::ZeroCoupling { .. }
        | Error::BadScatterer { .. }
        | Error::SubtractionConstantsLength { .. }
        | Error::SubtractionConstantsForbidden
        | Error::NonCollinearDfss { .. } => EXIT_VALIDATION,
        _ => EXIT_INPUT,
    }
}

fn lift(err: Error) -> CliError {
    CliError::new(exit_code_for(&err), error_line(&err))
}

#[derive(Parser)]
#[command(
    name = "deltascatter",
    version,
    about = "Scattering amplitudes of multi-delta point scatterers (standard renormalized vs DFSS)",
    after_help = "Exit codes: 0 ok, 1 validation failure, 2 input error, 3 spectral singularity, 4 kernel singularity.\nThe DELTASCATTER_THREADS environment variable caps sweep parallelism."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Angles {
    /// Incident polar angle (radians).
    #[arg(long, default_value_t = 0.0)]
    theta0: f64,
    /// Incident azimuth, 3D scenes (radians).
    #[arg(long, default_value_t = 0.0)]
    phi0: f64,
    /// Scattered polar angle (radians).
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Scattered azimuth, 3D scenes (radians).
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
}

impl Angles {
    fn dirs(&self) -> DirectionPair<f64> {
        DirectionPair::spherical(self.theta0, self.phi0, self.theta, self.phi)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Scattering amplitude and |f|^2 at one direction pair (JSON on stdout).
    Amplitude {
        /// Scene JSON document.
        #[arg(long)]
        scene: PathBuf,
        #[command(flatten)]
        angles: Angles,
    },
    /// Sweep an angle or the pair separation; writes a CSV table.
    Sweep {
        #[arg(long)]
        scene: PathBuf,
        /// Which parameter the grid varies.
        #[arg(long, value_enum)]
        variable: SweepVariable,
        /// start:stop:count[:log]
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        angles: Angles,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the scene under both formulations and report the difference
    /// (plus, for two scatterers, the matched renormalized couplings).
    Compare {
        #[arg(long)]
        scene: PathBuf,
        #[command(flatten)]
        angles: Angles,
    },
    /// Shrink the separation of a scatterer pair over a grid; writes the
    /// limit-study CSV and prints a summary (JSON on stdout).
    Coincidence {
        #[arg(long)]
        scene: PathBuf,
        /// Pair of zero-based scatterer indices, e.g. 0,1
        #[arg(long)]
        pair: String,
        /// Separation grid start:stop:count[:log]
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        angles: Angles,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the quadrature conformance oracles (JSON report on stdout;
    /// exit 1 if any check fails).
    Validate,
    /// Render a sweep/coincidence CSV as a static SVG polyline.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Log-scale the ordinate (requires positive abs_f values).
        #[arg(long)]
        log_y: bool,
    },
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn cmd_amplitude(path: &Path, angles: &Angles) -> Result<(), CliError> {
    let scene = load_scene(path)?;
    let (result, diag) = scattering_amplitude(&scene, &angles.dirs()).map_err(lift)?;
    let out = json!({
        "f": complex_json(result.f),
        "dcs": result.dcs,
        "diagnostics": {
            "condition_estimate": diag.condition_estimate,
            "singular": diag.singular,
        }
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    Ok(())
}

fn cmd_sweep(
    path: &Path,
    variable: SweepVariable,
    grid: &str,
    angles: &Angles,
    out: &Path,
) -> Result<(), CliError> {
    let scene = load_scene(path)?;
    let grid = GridSpec::parse(grid)?.values();
    let rows = run_sweep(&scene, variable, &grid, &angles.dirs())?;
    write_file(out, &sweep_csv(&rows))
}

/// Per-branch evaluation for `compare`: the scene rebuilt under the given
/// formulation (subtraction constants are standard-only and dropped for
/// the DFSS branch).
fn branch_amplitude(
    base: &deltascatter::SceneConfig64,
    formulation: Formulation,
    dirs: &DirectionPair<f64>,
) -> Result<Complex64, Error> {
    let mut config = base.clone();
    config.formulation = formulation;
    if formulation == Formulation::Dfss {
        config.subtraction_constants = None;
    }
    let scene = config.validate()?;
    scattering_amplitude(&scene, dirs).map(|(r, _)| r.f)
}

/// Matched couplings for a two-scatterer scene in its own geometry: the
/// closed forms depend on the incidence only through the phase
/// `k_in . (a2 - a1)`, so the canonical-frame angle is recovered from it.
fn matched_for_scene(
    scene: &Scene64,
    dirs: &DirectionPair<f64>,
) -> Result<(Complex64, Complex64), Error> {
    let ell = scene.separation(0, 1);
    let (k_in, _) = wave_vectors(scene, dirs);
    let delta: Vec<f64> = scene
        .position(1)
        .iter()
        .zip(scene.position(0))
        .map(|(&a, &b)| a - b)
        .collect();
    let s: f64 = delta.iter().zip(&k_in).map(|(d, k)| d * k).sum();
    let k = scene.k();
    let ratio = (s / (k * ell)).clamp(-1.0, 1.0);
    let theta0_eff = ratio.asin();
    let z1 = scene.coupling(0);
    let z2 = scene.coupling(1);
    match scene.dimension() {
        Dimension::Two => matched_coupling_2d(z1, z2, k, ell, theta0_eff),
        Dimension::Three => matched_coupling_3d(z1, z2, k, ell, theta0_eff, 0.0),
    }
}

fn cmd_compare(path: &Path, angles: &Angles) -> Result<(), CliError> {
    let doc = scene::load_document(path)?;
    let base = scene::document_to_config(&doc)?;
    let dirs = angles.dirs();

    let standard = branch_amplitude(&base, Formulation::StandardRenormalized, &dirs);
    let dfss = branch_amplitude(&base, Formulation::Dfss, &dirs);
    // a scene no formulation accepts is an outright input problem, not a
    // per-branch report
    if let (Err(s), Err(_)) = (&standard, &dfss) {
        return Err(CliError::new(exit_code_for(s), error_line(s)));
    }

    let branch_json = |r: &Result<Complex64, Error>| match r {
        Ok(f) => json!({ "f": complex_json(*f), "dcs": f.norm_sqr() }),
        Err(e) => json!({ "error": error_line(e) }),
    };
    let difference = match (&standard, &dfss) {
        (Ok(s), Ok(d)) => {
            let diff = s - d;
            json!({ "re": diff.re, "im": diff.im, "abs": diff.norm() })
        }
        _ => serde_json::Value::Null,
    };

    // matched couplings: meaningful for a two-scatterer scene at l > 0
    let matched = if base.scatterers.len() == 2 {
        let mut dfss_config = base.clone();
        dfss_config.formulation = Formulation::Dfss;
        dfss_config.subtraction_constants = None;
        match dfss_config.validate() {
            Ok(dfss_scene) if dfss_scene.separation(0, 1) > 0.0 => {
                match matched_for_scene(&dfss_scene, &dirs) {
                    Ok((z1t, z2t)) => {
                        // standard amplitude with the matched couplings
                        let mut std_config = base.clone();
                        std_config.formulation = Formulation::StandardRenormalized;
                        std_config.subtraction_constants = None;
                        std_config.scatterers[0].coupling = z1t;
                        std_config.scatterers[1].coupling = z2t;
                        let matched_f = std_config
                            .validate()
                            .and_then(|s| scattering_amplitude(&s, &dirs).map(|(r, _)| r.f));
                        match (&matched_f, &dfss) {
                            (Ok(mf), Ok(df)) => json!({
                                "z1_tilde": complex_json(z1t),
                                "z2_tilde": complex_json(z2t),
                                "standard_with_matched_f": complex_json(*mf),
                                "dfss_minus_matched_abs": (mf - df).norm(),
                            }),
                            _ => json!({
                                "z1_tilde": complex_json(z1t),
                                "z2_tilde": complex_json(z2t),
                            }),
                        }
                    }
                    Err(e) => json!({ "error": error_line(&e) }),
                }
            }
            _ => serde_json::Value::Null,
        }
    } else {
        serde_json::Value::Null
    };

    let out = json!({
        "standard": branch_json(&standard),
        "dfss": branch_json(&dfss),
        "difference": difference,
        "matched_couplings": matched,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    Ok(())
}

fn cmd_coincidence(
    path: &Path,
    pair: &str,
    grid: &str,
    angles: &Angles,
    out: &Path,
) -> Result<(), CliError> {
    let scene = load_scene(path)?;
    let indices: Vec<usize> = pair
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::new(EXIT_INPUT, format!("pair must be i,j with integers, got \"{pair}\"")))?;
    let [i, j] = indices[..] else {
        return Err(CliError::new(EXIT_INPUT, format!("pair must name exactly two indices, got \"{pair}\"")));
    };
    let grid = GridSpec::parse(grid)?.values();
    let study = run_coincidence(&scene, (i, j), &grid, &angles.dirs())?;
    write_file(out, &limit_study_csv(&study))?;
    // the inverse-log model describes the standard-formulation collapse
    // (reference 0); for DFSS studies it is not a meaningful fit
    let inverse_log = if study.reference.norm() == 0.0 {
        fit_inverse_log(&study).map(|f| {
            json!({
                "coefficient": f.coefficient,
                "max_relative_residual": f.max_relative_residual,
            })
        })
    } else {
        None
    };
    let summary = json!({
        "reference": complex_json(study.reference),
        "last_rel_err": sweep::last_rel_err(&study),
        "fitted_rate": study.convergence_rate,
        "inverse_log_fit": inverse_log,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
    Ok(())
}

fn cmd_validate() -> Result<(), CliError> {
    let report = run_conformance();
    let out = json!({
        "all_passed": report.all_passed,
        "checks": report.checks.iter().map(|c| json!({
            "name": c.name,
            "tolerance": c.tolerance,
            "measured": c.measured,
            "passed": c.passed,
        })).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    if report.all_passed {
        Ok(())
    } else {
        Err(CliError::new(EXIT_VALIDATION, "conformance checks failed".to_string()))
    }
}

fn cmd_plot(csv: &Path, out: &Path, log_y: bool) -> Result<(), CliError> {
    let text = std::fs::read_to_string(csv)
        .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", csv.display())))?;
    let data = plot::parse_csv(&text, csv)?;
    let svg = plot::render_svg(&data, log_y)?;
    write_file(out, &svg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Amplitude { scene, angles } => cmd_amplitude(scene, angles),
        Command::Sweep { scene, variable, grid, angles, out } => {
            cmd_sweep(scene, *variable, grid, angles, out)
        }
        Command::Compare { scene, angles } => cmd_compare(scene, angles),
        Command::Coincidence { scene, pair, grid, angles, out } => {
            cmd_coincidence(scene, pair, grid, angles, out)
        }
        Command::Validate => cmd_validate(),
        Command::Plot { csv, out, log_y } => cmd_plot(csv, out, *log_y),
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("DELTASCATTER_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
