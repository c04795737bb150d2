//! Scene documents: the JSON schema the CLI ingests and its conversion to
//! validated scenes.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "k": 1.0,
//!   "formulation": "dfss",
//!   "scatterers": [
//!     { "position": [0.0, 0.0], "coupling": { "re": 4.0, "im": 0.0 } }
//!   ],
//!   "subtraction_constants": [0.0]
//! }
//! ```
//!
//! `formulation` is `"standard"` or `"dfss"`; `subtraction_constants` is
//! optional and only legal for the standard formulation.

use std::fs;
use std::path::Path;

use deltascatter::model::{Formulation, Scatterer, SceneConfig};
use deltascatter::{Complex64, Scene64};
use serde::{Deserialize, Serialize};

use crate::{exit_code_for, CliError, EXIT_INPUT};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    pub dimension: u8,
    pub k: f64,
    pub formulation: String,
    pub scatterers: Vec<ScattererDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtraction_constants: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererDoc {
    pub position: Vec<f64>,
    pub coupling: ComplexDoc,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub re: f64,
    pub im: f64,
}

pub fn parse_dimension(value: u8) -> Result<deltascatter::model::Dimension, CliError> {
    match value {
        2 => Ok(deltascatter::model::Dimension::Two),
        3 => Ok(deltascatter::model::Dimension::Three),
        other => Err(CliError::new(EXIT_INPUT, format!("dimension must be 2 or 3, got {other}"))),
    }
}

pub fn parse_formulation(value: &str) -> Result<Formulation, CliError> {
    match value {
        "standard" => Ok(Formulation::StandardRenormalized),
        "dfss" => Ok(Formulation::Dfss),
        other => Err(CliError::new(
            EXIT_INPUT,
            format!("formulation must be \"standard\" or \"dfss\", got \"{other}\""),
        )),
    }
}

pub fn document_to_config(doc: &SceneDocument) -> Result<deltascatter::SceneConfig64, CliError> {
    Ok(SceneConfig {
        dimension: parse_dimension(doc.dimension)?,
        k: doc.k,
        scatterers: doc
            .scatterers
            .iter()
            .map(|s| Scatterer::new(s.position.clone(), Complex64::new(s.coupling.re, s.coupling.im)))
            .collect(),
        formulation: parse_formulation(&doc.formulation)?,
        subtraction_constants: doc.subtraction_constants.clone(),
    })
}

pub fn load_document(path: &Path) -> Result<SceneDocument, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    // serde_json errors carry "at line L column C"
    serde_json::from_str(&text)
        .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

pub fn load_scene(path: &Path) -> Result<Scene64, CliError> {
    let doc = load_document(path)?;
    let config = document_to_config(&doc)?;
    config.validate().map_err(|e| CliError::new(exit_code_for(&e), error_line(&e)))
}

/// stderr line carrying the library error name plus its message.
pub fn error_line(err: &deltascatter::Error) -> String {
    format!("{}: {err}", error_name(err))
}

pub fn error_name(err: &deltascatter::Error) -> &'static str {
    use deltascatter::Error::*;
    match err {
        Domain { .. } => "Domain",
        NonPositiveWavenumber { .. } => "NonPositiveWavenumber",
        EmptyScene => "EmptyScene",
        ZeroCoupling { .. } => "ZeroCoupling",
        BadScatterer { .. } => "BadScatterer",
        SubtractionConstantsLength { .. } => "SubtractionConstantsLength",
        SubtractionConstantsForbidden => "SubtractionConstantsForbidden",
        NonCollinearDfss { .. } => "NonCollinearDFSS",
        DuplicatePositionStandard { .. } => "DuplicatePositionStandard",
        KernelSingularity { .. } => "KernelSingularity",
        ConfigMismatch { .. } => "ConfigMismatch",
        SpectralSingularity { .. } => "SpectralSingularity",
        EvaluationAtCenter { .. } => "EvaluationAtCenter",
        InfiniteCoupling => "InfiniteCoupling",
        MatchingSingularity => "MatchingSingularity",
        CutoffAccuracy { .. } => "CutoffAccuracy",
        QuadratureBudget { .. } => "QuadratureBudget",
        ExtrapolationFailure { .. } => "ExtrapolationFailure",
    }
}
