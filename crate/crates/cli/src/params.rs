use aqpe_core::hamiltonians::{
    engineered_coeffs, solve_zero_lambda, two_qubit_preset_with, HierarchyRatios, HierarchyReport,
    LayoutOptions,
};
use log::warn;
use serde::{Deserialize, Serialize};

use crate::config::hz;
use crate::error::{CliError, CliResult};

/// Coupler parameters that engineer a two-qubit XY bond with no local field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedParameters {
    pub eta_rad_per_s: f64,
    pub g_rad_per_s: f64,
    pub delta_rad_per_s: f64,
    pub j_cross_rad_per_s: f64,
    /// Both local couplings that null the local field, smaller magnitude first.
    pub j_local_roots_rad_per_s: [f64; 2],
    pub j_local_rad_per_s: f64,
    pub eta_eng_rad_per_s: f64,
    pub lambda_eng_rad_per_s: Vec<f64>,
    pub hierarchy: HierarchyReport,
    pub required: HierarchyRatios,
    pub hierarchy_satisfied: bool,
}

pub fn solve_params(
    eta_hz: f64,
    g_hz: f64,
    delta_hz: f64,
    strict: bool,
) -> CliResult<SolvedParameters> {
    for (name, v) in [("eta", eta_hz), ("g", g_hz), ("delta", delta_hz)] {
        if !v.is_finite() || v == 0.0 {
            return Err(CliError::validation(format!(
                "{name} must be finite and non-zero"
            )));
        }
    }
    let ratios = HierarchyRatios::default();
    // The hierarchy is reported, not enforced, unless strict.
    let opts = LayoutOptions {
        omega_c: hz(aqpe_core::DEFAULT_CAVITY_HZ),
        coupler_detuning: hz(delta_hz),
        ratios: HierarchyRatios { r1: 0.0, r2: 0.0 },
    };
    let (layout, _) = two_qubit_preset_with(hz(eta_hz), hz(g_hz), hz(delta_hz), &opts)?;
    let coeffs = engineered_coeffs(&layout)?;
    let report = layout.hierarchy();
    if let Err(e) = report.check(&ratios) {
        if strict {
            return Err(CliError::validation(e.to_string()));
        }
        warn!("{e}");
    }
    Ok(SolvedParameters {
        eta_rad_per_s: hz(eta_hz),
        g_rad_per_s: hz(g_hz),
        delta_rad_per_s: hz(delta_hz),
        j_cross_rad_per_s: layout.j_cross[0],
        j_local_roots_rad_per_s: solve_zero_lambda(&layout.j_cross)?,
        j_local_rad_per_s: layout.j_local[0],
        eta_eng_rad_per_s: coeffs.eta_eng[0],
        lambda_eng_rad_per_s: coeffs.lambda_eng,
        hierarchy: report,
        required: ratios,
        hierarchy_satisfied: report.satisfies(&ratios),
    })
}
