//! Parameter sweeps and their CSV serialization.

use std::path::Path;

use deltascatter::amplitude::scattering_amplitude;
use deltascatter::coincidence::{coincidence_sweep, scene_with_separation, LimitStudy};
use deltascatter::model::DirectionPair;
use deltascatter::{Complex64, Error, Scene64};
use rayon::prelude::*;

use crate::{CliError, EXIT_INPUT};

/// `start:stop:count[:log|:linear]`. Endpoints inclusive, `count >= 2`,
/// log spacing requires positive endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(CliError::new(
                EXIT_INPUT,
                format!("grid must be start:stop:count[:log], got \"{text}\""),
            ));
        }
        let bad = |what: &str| CliError::new(EXIT_INPUT, format!("grid {what} in \"{text}\""));
        let start: f64 = parts[0].parse().map_err(|_| bad("start is not a number"))?;
        let stop: f64 = parts[1].parse().map_err(|_| bad("stop is not a number"))?;
        let count: usize = parts[2].parse().map_err(|_| bad("count is not an integer"))?;
        let log = match parts.get(3) {
            None | Some(&"linear") => false,
            Some(&"log") => true,
            Some(other) => {
                return Err(CliError::new(
                    EXIT_INPUT,
                    format!("grid spacing must be log or linear, got \"{other}\""),
                ))
            }
        };
        if !(start.is_finite() && stop.is_finite()) {
            return Err(bad("endpoints must be finite"));
        }
        if count < 2 {
            return Err(bad("count must be at least 2"));
        }
        if log && (start <= 0.0 || stop <= 0.0) {
            return Err(bad("log spacing requires positive endpoints"));
        }
        Ok(GridSpec { start, stop, count, log })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepVariable {
    /// Scattered polar angle theta.
    #[value(name = "scattered_angle")]
    ScatteredAngle,
    /// Incident polar angle theta0.
    #[value(name = "incident_angle")]
    IncidentAngle,
    /// Separation of a two-scatterer scene along its line of centers.
    #[value(name = "separation")]
    Separation,
}

/// One sweep row: the varied parameter and the amplitude, or a flag naming
/// the singularity that prevented it.
pub struct SweepRow {
    pub param: f64,
    pub f: Option<Complex64>,
    pub flag: &'static str,
}

fn classify(err: Error) -> Result<(Option<Complex64>, &'static str), CliError> {
    match err {
        Error::SpectralSingularity { .. } => Ok((None, "spectral_singularity")),
        Error::KernelSingularity { .. } | Error::DuplicatePositionStandard { .. } => {
            Ok((None, "kernel_singularity"))
        }
        other => Err(CliError::new(
            crate::exit_code_for(&other),
            crate::scene::error_line(&other),
        )),
    }
}

/// Runs the sweep in parallel over grid points; rows come back in grid
/// order. Singular points become flagged rows instead of failures.
pub fn run_sweep(
    scene: &Scene64,
    variable: SweepVariable,
    grid: &[f64],
    dirs: &DirectionPair<f64>,
) -> Result<Vec<SweepRow>, CliError> {
    if variable == SweepVariable::Separation && scene.num_scatterers() != 2 {
        return Err(CliError::new(
            EXIT_INPUT,
            format!(
                "separation sweeps need exactly two scatterers, scene has {}",
                scene.num_scatterers()
            ),
        ));
    }
    grid.par_iter()
        .map(|&value| {
            let outcome = match variable {
                SweepVariable::ScatteredAngle => {
                    let d = DirectionPair { theta: value, ..*dirs };
                    scattering_amplitude(scene, &d).map(|(r, _)| r.f)
                }
                SweepVariable::IncidentAngle => {
                    let d = DirectionPair { theta0: value, ..*dirs };
                    scattering_amplitude(scene, &d).map(|(r, _)| r.f)
                }
                SweepVariable::Separation => scene_with_separation(scene, (0, 1), value)
                    .and_then(|s| scattering_amplitude(&s, dirs).map(|(r, _)| r.f)),
            };
            match outcome {
                Ok(f) => Ok(SweepRow { param: value, f: Some(f), flag: "" }),
                Err(err) => {
                    let (f, flag) = classify(err)?;
                    Ok(SweepRow { param: value, f, flag })
                }
            }
        })
        .collect()
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

/// `param,re_f,im_f,abs_f,dcs,flag` with `nan` fields on singular rows.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("param,re_f,im_f,abs_f,dcs,flag\n");
    for row in rows {
        match row.f {
            Some(f) => {
                let abs = f.norm();
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    num(row.param),
                    num(f.re),
                    num(f.im),
                    num(abs),
                    num(f.norm_sqr()),
                    row.flag
                ));
            }
            None => {
                out.push_str(&format!("{},nan,nan,nan,nan,{}\n", num(row.param), row.flag));
            }
        }
    }
    out
}

/// `ell,k_ell,re_f,im_f,abs_f,ref_abs_f,rel_err`; `rel_err` is relative to
/// the reference when it is nonzero and plain `|f|` otherwise.
pub fn limit_study_csv(study: &LimitStudy<f64>) -> String {
    let mut out = String::from("ell,k_ell,re_f,im_f,abs_f,ref_abs_f,rel_err\n");
    let ref_abs = study.reference.norm();
    for (&ell, f) in study.ell_grid.iter().zip(&study.amplitudes) {
        let k_ell = study.k * ell;
        match f {
            Some(f) => {
                let rel = if ref_abs > 0.0 {
                    (f - study.reference).norm() / ref_abs
                } else {
                    f.norm()
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    num(ell),
                    num(k_ell),
                    num(f.re),
                    num(f.im),
                    num(f.norm()),
                    num(ref_abs),
                    num(rel)
                ));
            }
            None => out.push_str(&format!(
                "{},{},nan,nan,nan,{},nan\n",
                num(ell),
                num(k_ell),
                num(ref_abs)
            )),
        }
    }
    out
}

/// Last valid relative deviation of a study (its convergence figure).
pub fn last_rel_err(study: &LimitStudy<f64>) -> Option<f64> {
    let ref_abs = study.reference.norm();
    study
        .ell_grid
        .iter()
        .zip(&study.amplitudes)
        .rev()
        .find_map(|(_, f)| f.as_ref())
        .map(|f| {
            if ref_abs > 0.0 {
                (f - study.reference).norm() / ref_abs
            } else {
                f.norm()
            }
        })
}

pub fn run_coincidence(
    scene: &Scene64,
    pair: (usize, usize),
    grid: &[f64],
    dirs: &DirectionPair<f64>,
) -> Result<LimitStudy<f64>, CliError> {
    coincidence_sweep(scene, pair, grid, dirs)
        .map_err(|e| CliError::new(crate::exit_code_for(&e), crate::scene::error_line(&e)))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = GridSpec::parse("0:2.5:5").unwrap();
        assert_eq!(g.count, 5);
        assert!(!g.log);
        let v = g.values();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.0);
        assert!((v[4] - 2.5).abs() < 1e-15);

        let g = GridSpec::parse("1e-6:1e-2:5:log").unwrap();
        assert!(g.log);
        let v = g.values();
        assert!((v[0] - 1e-6).abs() < 1e-20);
        assert!((v[2] - 1e-4).abs() < 1e-18);

        assert!(GridSpec::parse("1:2").is_err());
        assert!(GridSpec::parse("1:2:1").is_err());
        assert!(GridSpec::parse("-1:2:4:log").is_err());
        assert!(GridSpec::parse("1:2:4:cubic").is_err());
        assert!(GridSpec::parse("a:2:4").is_err());
    }

    #[test]
    fn csv_marks_singular_rows() {
        let rows = vec![
            SweepRow { param: 0.5, f: Some(Complex64::new(1.0, -2.0)), flag: "" },
            SweepRow { param: 1.0, f: None, flag: "spectral_singularity" },
        ];
        let csv = sweep_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "param,re_f,im_f,abs_f,dcs,flag");
        assert!(lines[1].starts_with("0.5,1,-2,"));
        assert_eq!(lines[2], "1,nan,nan,nan,nan,spectral_singularity");
    }
}
