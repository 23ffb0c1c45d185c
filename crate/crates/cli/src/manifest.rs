use std::path::Path;

use aqpe_core::hamiltonians::{HierarchyRatios, HierarchyReport};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::export::sha256_file;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Relative to the output directory.
    pub path: String,
    pub kind: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineeredSummary {
    pub g_rad_per_s: f64,
    pub delta_rad_per_s: f64,
    pub coupler_detuning_rad_per_s: f64,
    pub j_local_rad_per_s: Vec<f64>,
    pub j_cross_rad_per_s: Vec<f64>,
    pub lambda_eng_rad_per_s: Vec<f64>,
    pub eta_eng_rad_per_s: Vec<f64>,
    pub hierarchy: HierarchyReport,
    pub required: HierarchyRatios,
    pub hierarchy_satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationDiagnostics {
    pub n_max: usize,
    /// Probability of the initial cavity state above `n_max − 5`.
    pub initial_tail_mass: f64,
    /// Distance between the initial state at `n_max` and at `2·n_max`.
    pub convergence_distance: f64,
    pub grid_extent: f64,
    /// Largest displacement evaluated on the Wigner grid.
    pub max_displacement: f64,
    /// Padded Fock dimension used for Wigner evaluation.
    pub wigner_working_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub target_energies_rad_per_s: Vec<f64>,
    pub initial_populations: Vec<f64>,
    /// Profile maximum of the initial cavity state.
    pub reference_height: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engineered: Option<EngineeredSummary>,
    pub truncation: TruncationDiagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupler_leakage_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    /// The only wall-clock value written by a run.
    pub created_unix_s: u64,
    pub config: ExperimentConfig,
    pub derived: Derived,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub acceptance: Vec<AcceptanceCheck>,
    pub files: Vec<FileRecord>,
}

impl RunManifest {
    /// Every listed file exists under `dir` and matches its digest.
    pub fn verify(&self, dir: &Path) -> CliResult<()> {
        let mut errs = Vec::new();
        for f in &self.files {
            let path = dir.join(&f.path);
            match sha256_file(&path) {
                Ok(d) if d == f.sha256 => {}
                Ok(_) => errs.push(format!("{} does not match its digest", f.path)),
                Err(e) => errs.push(e.to_string()),
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(errs))
        }
    }

    pub fn files_of_kind(&self, kind: &str) -> impl Iterator<Item = &FileRecord> {
        let kind = kind.to_owned();
        self.files.iter().filter(move |f| f.kind == kind)
    }
}
