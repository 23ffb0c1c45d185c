//! Canned two-qubit XY experiment: engineered pipeline against the ideal
//! dispersive pipeline, with snapshots at `ηt ∈ {0, 0.5, 1, 1.5, 2}` rad and a
//! dense fidelity grid over `ηt ∈ [0, 2]` rad.

use std::path::PathBuf;

use aqpe_core::hamiltonians::HierarchyRatios;
use aqpe_core::qstates::FockTruncation;
use serde::{Deserialize, Serialize};

use crate::config::{
    hz, CavityConfig, ExperimentConfig, InitialQubits, Mode, PhysicalConfig, TargetSpec,
    TomographyConfig, FREQUENCY_CONVENTION, SCHEMA_VERSION, TWO_QUBIT_PRESET,
};
use crate::error::{CliError, CliResult};
use crate::export::export_json;
use crate::manifest::{AcceptanceCheck, MANIFEST_FILE};
use crate::pipeline::{run_experiment, RunOutcome, Stages};

pub const ETA_HZ: f64 = 1.0e4;
pub const BETA: f64 = 1.8;
pub const XI: f64 = -0.4;
pub const SNAPSHOT_ETA_T: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];
/// Snapshot used for spectral recovery.
pub const RECOVERY_SNAPSHOT: usize = 2;
pub const FIDELITY_POINTS: usize = 201;
pub const FIDELITY_FLOOR: f64 = 0.98;
pub const ENERGY_TOLERANCE: f64 = 0.02;
pub const WEIGHT_TOLERANCE: f64 = 0.05;

/// Coupler parameters used to engineer the target bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParameterProfile {
    /// Satisfies `|Δ|/max|J| ≥ 10` and `min|J|/|g| ≥ 10`.
    Hierarchy,
    /// `g = 2π·10 MHz`, `Δ = 2π·1 GHz`; breaks the hierarchy.
    WeakCoupling,
}

impl ParameterProfile {
    /// `(g, Δ)` in Hz at `η = 2π·10 kHz`; both scale linearly with `η`.
    pub fn g_delta_hz(self, eta_hz: f64) -> (f64, f64) {
        let s = eta_hz / ETA_HZ;
        match self {
            Self::Hierarchy => (4.0e8 * s, 2.0e11 * s),
            Self::WeakCoupling => (1.0e7 * s, 1.0e9 * s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Options {
    pub strict: bool,
    pub n_max: usize,
    pub out_dir: PathBuf,
    pub eta_hz: f64,
    pub profile: ParameterProfile,
    pub wigner: bool,
}

impl Fig4Options {
    pub fn new(out_dir: PathBuf) -> Self {
        Self {
            strict: false,
            n_max: FockTruncation::DEFAULT_N_MAX,
            out_dir,
            eta_hz: ETA_HZ,
            profile: ParameterProfile::Hierarchy,
            wigner: true,
        }
    }
}

pub fn fig4_config(opts: &Fig4Options) -> ExperimentConfig {
    let eta = hz(opts.eta_hz);
    let (g_hz, delta_hz) = opts.profile.g_delta_hz(opts.eta_hz);
    let last = FIDELITY_POINTS - 1;
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        frequency_convention: FREQUENCY_CONVENTION.to_owned(),
        mode: Mode::Engineered,
        reference: Some(Mode::Ideal),
        target: TargetSpec::Preset {
            name: TWO_QUBIT_PRESET.to_owned(),
            eta_hz: opts.eta_hz,
        },
        cavity: CavityConfig {
            beta: [BETA, 0.0],
            xi: [XI, 0.0],
            n_max: opts.n_max,
        },
        initial_qubits: InitialQubits::UniformEigenstates,
        times_s: SNAPSHOT_ETA_T.iter().map(|x| x / eta).collect(),
        fidelity_times_s: (0..FIDELITY_POINTS)
            .map(|i| 2.0 * i as f64 / last as f64 / eta)
            .collect(),
        tomography: TomographyConfig::default(),
        physical: Some(PhysicalConfig {
            g_hz,
            delta_hz,
            coupler_detuning_hz: None,
            cavity_hz: aqpe_core::DEFAULT_CAVITY_HZ,
            ratios: HierarchyRatios::default(),
        }),
        strict: opts.strict,
    }
}

fn check(name: &str, passed: bool, detail: String) -> AcceptanceCheck {
    AcceptanceCheck {
        name: name.to_owned(),
        passed,
        detail,
    }
}

/// Spectral recovery of the ideal pipeline at `ηt = 1` rad.
pub fn spectral_check(outcome: &RunOutcome, eta: f64) -> AcceptanceCheck {
    let name = "spectral-recovery";
    let Some(snap) = outcome
        .estimates_for(Mode::Ideal)
        .and_then(|p| p.snapshots.get(RECOVERY_SNAPSHOT))
    else {
        return check(
            name,
            false,
            "no ideal-pipeline estimate at the recovery snapshot".into(),
        );
    };
    let mut comps = snap.estimate.components.clone();
    comps.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    if comps.len() != 3 {
        return check(
            name,
            false,
            format!("found {} peaks, expected 3", comps.len()),
        );
    }
    let want_e = [-eta, 0.0, eta];
    let want_w = [0.25, 0.5, 0.25];
    let e_err = comps
        .iter()
        .zip(want_e)
        .map(|(c, e)| (c.energy - e).abs() / eta)
        .fold(0.0, f64::max);
    let w_err = comps
        .iter()
        .zip(want_w)
        .map(|(c, w)| (c.weight - w).abs())
        .fold(0.0, f64::max);
    let central_tallest = comps[1].weight > comps[0].weight && comps[1].weight > comps[2].weight;
    check(
        name,
        e_err < ENERGY_TOLERANCE && w_err <= WEIGHT_TOLERANCE && central_tallest,
        format!(
            "max energy error {e_err:.3e}·η, max weight error {w_err:.3e}, central peak tallest: {central_tallest}"
        ),
    )
}

pub fn fidelity_check(outcome: &RunOutcome) -> AcceptanceCheck {
    match outcome.manifest.derived.fidelity_min {
        Some(f) => check(
            "fidelity-floor",
            f >= FIDELITY_FLOOR,
            format!("min F = {f:.12} over ηt ∈ [0, 2] rad (floor {FIDELITY_FLOOR})"),
        ),
        None => check("fidelity-floor", false, "no fidelity series".into()),
    }
}

pub fn artifact_check(outcome: &RunOutcome, wigner: bool) -> AcceptanceCheck {
    let m = &outcome.manifest;
    let grids = m.files_of_kind("wigner-grid").count();
    let profiles = m.files_of_kind("angular-profile").count();
    let fid = m.files_of_kind("fidelity-series").count();
    let ok = (!wigner || grids >= 3) && profiles >= 3 && fid == 1;
    check(
        "artifacts",
        ok,
        format!("{grids} Wigner grids, {profiles} profiles, {fid} fidelity series"),
    )
}

/// Runs the canned experiment, records the acceptance checks in the manifest
/// and fails with an acceptance error if any check fails.
pub fn reproduce_fig4(opts: &Fig4Options) -> CliResult<RunOutcome> {
    let cfg = fig4_config(opts);
    let stages = Stages {
        wigner: opts.wigner,
        ..Stages::ALL
    };
    let mut outcome = run_experiment(&cfg, &opts.out_dir, stages)?;
    let checks = vec![
        spectral_check(&outcome, hz(opts.eta_hz)),
        fidelity_check(&outcome),
        artifact_check(&outcome, opts.wigner),
    ];
    outcome.manifest.acceptance = checks.clone();
    export_json(&opts.out_dir.join(MANIFEST_FILE), &outcome.manifest)?;
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    if failed.is_empty() {
        Ok(outcome)
    } else {
        Err(CliError::Acceptance(failed))
    }
}
