use std::path::Path;

use serde::Serialize;

/// Flags given on the command line; unset options are omitted.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Overrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fronts: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extended_front: Option<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub fd_check: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub oracle: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub flux: bool,
}

/// Everything needed to reproduce a run, copied into every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub input: String,
    pub overrides: Overrides,
    pub out_dir: String,
    pub version: String,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, input: &Path, out_dir: &Path, seed: u64, overrides: Overrides) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            input: input.display().to_string(),
            overrides,
            out_dir: out_dir.display().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
        }
    }
}
