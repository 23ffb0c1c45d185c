//! Experiment configuration file (JSON).
//!
//! Frequencies are given in Hz and converted to angular frequency by a factor
//! of 2π on ingestion; the `frequency_convention` field must spell out that
//! convention so that a file written for angular units is rejected.

use std::f64::consts::TAU;
use std::path::Path;

use aqpe_core::hamiltonians::HierarchyRatios;
use aqpe_core::linalg::MAX_TOTAL_DIM;
use aqpe_core::tomography::{DEFAULT_GRID_MARGIN, DEFAULT_GRID_STEP, DEFAULT_N_THETA, MIN_N_THETA};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const FREQUENCY_CONVENTION: &str = "linear-Hz-times-2pi";
pub const TWO_QUBIT_PRESET: &str = "two-qubit-xy";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Ideal,
    Engineered,
    Full,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ideal => "ideal",
            Self::Engineered => "engineered",
            Self::Full => "full",
        }
    }

    pub fn needs_physical(self) -> bool {
        !matches!(self, Self::Ideal)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub i: usize,
    pub j: usize,
    pub eta_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    Preset {
        name: String,
        eta_hz: f64,
    },
    Graph {
        n_sites: usize,
        edges: Vec<EdgeSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        local_z_hz: Option<Vec<f64>>,
    },
}

impl TargetSpec {
    pub fn n_sites(&self) -> usize {
        match self {
            Self::Preset { .. } => 2,
            Self::Graph { n_sites, .. } => *n_sites,
        }
    }

    pub fn n_edges(&self) -> usize {
        match self {
            Self::Preset { .. } => 1,
            Self::Graph { edges, .. } => edges.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    /// `[re, im]`.
    pub beta: [f64; 2],
    /// `[re, im]`.
    pub xi: [f64; 2],
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialQubits {
    /// Equal-amplitude superposition of all target eigenstates.
    UniformEigenstates,
    /// Amplitudes `[re, im]` on the target eigenstates, in ascending energy order.
    EigenstateWeights { weights: Vec<[f64; 2]> },
    /// Computational basis string, `0` excited and `1` ground.
    Basis { bits: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyConfig {
    /// Profile radius; `|β|` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    /// Wigner grid half-width; `|β| + 4` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_extent: Option<f64>,
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    /// Minimum peak prominence as a fraction of the reference height.
    #[serde(default = "default_min_prominence")]
    pub min_prominence: f64,
}

fn default_n_theta() -> usize {
    DEFAULT_N_THETA
}

fn default_grid_step() -> f64 {
    DEFAULT_GRID_STEP
}

fn default_min_prominence() -> f64 {
    0.05
}

impl Default for TomographyConfig {
    fn default() -> Self {
        Self {
            radius: None,
            n_theta: DEFAULT_N_THETA,
            grid_extent: None,
            grid_step: DEFAULT_GRID_STEP,
            min_prominence: default_min_prominence(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConfig {
    pub g_hz: f64,
    /// Target-qubit detuning from the cavity.
    pub delta_hz: f64,
    /// Coupler detuning from the cavity; equal to `delta_hz` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupler_detuning_hz: Option<f64>,
    #[serde(default = "default_cavity_hz")]
    pub cavity_hz: f64,
    #[serde(default)]
    pub ratios: HierarchyRatios,
}

fn default_cavity_hz() -> f64 {
    aqpe_core::DEFAULT_CAVITY_HZ
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub frequency_convention: String,
    pub mode: Mode,
    /// Second pipeline compared against `mode` by cavity-state fidelity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Mode>,
    pub target: TargetSpec,
    pub cavity: CavityConfig,
    pub initial_qubits: InitialQubits,
    /// Snapshot times for profiles, Wigner grids and estimates.
    pub times_s: Vec<f64>,
    /// Fidelity grid; `times_s` when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fidelity_times_s: Vec<f64>,
    #[serde(default)]
    pub tomography: TomographyConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalConfig>,
    /// Hierarchy violations become errors.
    #[serde(default)]
    pub strict: bool,
}

pub fn hz(f: f64) -> f64 {
    f * TAU
}

fn check_times(name: &str, times: &[f64], errs: &mut Vec<String>) {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        errs.push(format!("{name} must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        errs.push(format!("{name} must be ascending"));
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| CliError::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn fidelity_times(&self) -> &[f64] {
        if self.fidelity_times_s.is_empty() {
            &self.times_s
        } else {
            &self.fidelity_times_s
        }
    }

    pub fn beta_modulus(&self) -> f64 {
        self.cavity.beta[0].hypot(self.cavity.beta[1])
    }

    pub fn profile_radius(&self) -> f64 {
        self.tomography
            .radius
            .unwrap_or_else(|| self.beta_modulus())
    }

    pub fn grid_extent(&self) -> f64 {
        self.tomography
            .grid_extent
            .unwrap_or_else(|| self.beta_modulus() + DEFAULT_GRID_MARGIN)
    }

    /// Checks everything that does not need a numerical construction; all
    /// problems are reported together.
    pub fn validate(&self) -> CliResult<()> {
        let mut errs = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            errs.push(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.frequency_convention != FREQUENCY_CONVENTION {
            errs.push(format!(
                "frequency_convention must be \"{FREQUENCY_CONVENTION}\", got \"{}\"",
                self.frequency_convention
            ));
        }
        let n = self.target.n_sites();
        match &self.target {
            TargetSpec::Preset { name, eta_hz } => {
                if name != TWO_QUBIT_PRESET {
                    errs.push(format!("unknown target preset \"{name}\""));
                }
                if !eta_hz.is_finite() || *eta_hz == 0.0 {
                    errs.push("target eta_hz must be finite and non-zero".into());
                }
            }
            TargetSpec::Graph {
                n_sites,
                edges,
                local_z_hz,
            } => {
                if *n_sites == 0 {
                    errs.push("target graph needs at least one site".into());
                }
                for (k, e) in edges.iter().enumerate() {
                    if e.i >= *n_sites || e.j >= *n_sites || e.i == e.j {
                        errs.push(format!(
                            "edge {k} ({}, {}) is not a pair of distinct sites",
                            e.i, e.j
                        ));
                    }
                    if !e.eta_hz.is_finite() {
                        errs.push(format!("edge {k} eta_hz is not finite"));
                    }
                }
                if let Some(lz) = local_z_hz {
                    if lz.len() != *n_sites {
                        errs.push(format!("{} local fields for {n_sites} sites", lz.len()));
                    }
                }
            }
        }
        if self.cavity.n_max == 0 {
            errs.push("cavity n_max must be at least 1".into());
        }
        if self
            .cavity
            .beta
            .iter()
            .chain(&self.cavity.xi)
            .any(|x| !x.is_finite())
        {
            errs.push("cavity beta and xi must be finite".into());
        }
        match &self.initial_qubits {
            InitialQubits::UniformEigenstates => {}
            InitialQubits::EigenstateWeights { weights } => {
                if n < usize::BITS as usize && weights.len() != 1 << n {
                    errs.push(format!(
                        "{} eigenstate weights for a {}-dimensional register",
                        weights.len(),
                        1usize << n
                    ));
                }
            }
            InitialQubits::Basis { bits } => {
                if bits.len() != n || bits.chars().any(|c| c != '0' && c != '1') {
                    errs.push(format!(
                        "basis string \"{bits}\" must have {n} characters from {{0,1}}"
                    ));
                }
            }
        }
        if self.times_s.is_empty() {
            errs.push("times_s is empty".into());
        }
        check_times("times_s", &self.times_s, &mut errs);
        check_times("fidelity_times_s", &self.fidelity_times_s, &mut errs);

        let t = &self.tomography;
        if t.n_theta < MIN_N_THETA {
            errs.push(format!("tomography n_theta must be at least {MIN_N_THETA}"));
        }
        if !(self.profile_radius() > 0.0) {
            errs.push("tomography radius must be positive".into());
        }
        if !(self.grid_extent() > 0.0) || !(t.grid_step > 0.0) {
            errs.push("tomography grid extent and step must be positive".into());
        }
        if !(t.min_prominence > 0.0) {
            errs.push("tomography min_prominence must be positive".into());
        }

        if let Some(r) = self.reference {
            if r == self.mode {
                errs.push("reference pipeline must differ from mode".into());
            }
        }
        let needs_physical =
            self.mode.needs_physical() || self.reference.is_some_and(Mode::needs_physical);
        match &self.physical {
            None if needs_physical => {
                errs.push("engineered and full pipelines need a physical section".into())
            }
            Some(p) => {
                if !p.g_hz.is_finite() || p.g_hz == 0.0 {
                    errs.push("physical g_hz must be finite and non-zero".into());
                }
                if !p.delta_hz.is_finite() || p.delta_hz == 0.0 {
                    errs.push("physical delta_hz must be finite and non-zero".into());
                }
                if !p.cavity_hz.is_finite() {
                    errs.push("physical cavity_hz must be finite".into());
                }
                if p.coupler_detuning_hz.is_some_and(|d| !d.is_finite()) {
                    errs.push("physical coupler_detuning_hz must be finite".into());
                }
            }
            None => {}
        }
        if self.mode == Mode::Full || self.reference == Some(Mode::Full) {
            let qubits = 2 * n + self.target.n_edges();
            let dim =
                (self.cavity.n_max + 1).checked_mul(1usize.checked_shl(qubits as u32).unwrap_or(0));
            if !matches!(dim, Some(d) if d > 0 && d <= MAX_TOTAL_DIM) {
                errs.push(format!(
                    "full pipeline with {qubits} qubits and n_max = {} exceeds the dimension limit {MAX_TOTAL_DIM}",
                    self.cavity.n_max
                ));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(errs))
        }
    }
}
