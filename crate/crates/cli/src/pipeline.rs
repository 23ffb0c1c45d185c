//! Experiment orchestration: Hamiltonians, evolution, reduction, tomography
//! and estimation for each configured pipeline, followed by file export.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use aqpe_core::evolution::{
    evolve_dispersive, evolve_full, fidelity_of_states, reduced_series, SpectrumPopulations,
};
use aqpe_core::hamiltonians::{
    build_xy_target, engineered_coeffs, engineered_layout, EngineeredCoeffs, HierarchyReport,
    LayoutOptions, PhysicalLayout, XYGraph,
};
use aqpe_core::linalg::{eig_hermitian, pure_density, HermitianEigen};
use aqpe_core::qstates::{
    eigenstate_superposition, squeezed_coherent, tail_mass, truncation_convergence, FockTruncation,
    QubitRegisterState, SqueezedCoherentSpec,
};
use aqpe_core::tomography::{
    angular_profile, detect_peaks, estimate_spectrum, symmetric_axis, wigner, working_dimension,
    AngularProfile, Peak, SpectralComponent,
};
use aqpe_core::ComplexMatrix;
use aqpe_core::{Complex64, SpectralEstimate};
use log::warn;

use crate::config::{hz, ExperimentConfig, InitialQubits, Mode, TargetSpec, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};
use crate::export::{
    self, export_csv, export_json, EstimateSnapshot, EstimatesDocument, PipelineEstimates,
};
use crate::manifest::{
    Derived, EngineeredSummary, FileRecord, RunManifest, TruncationDiagnostics, MANIFEST_FILE,
};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "AQPE_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "aqpe-out";
/// Warn when doubling `n_max` moves the initial state by more than this.
pub const CONVERGENCE_WARNING: f64 = 1e-4;
/// Warn when the initial state carries more than this above `n_max − 5`.
pub const TAIL_WARNING: f64 = 1e-6;

/// `--out`, then the environment variable, then the built-in default.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Which artifact families a run writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stages {
    pub wigner: bool,
    pub estimates: bool,
    pub fidelity: bool,
}

impl Stages {
    pub const ALL: Self = Self {
        wigner: true,
        estimates: true,
        fidelity: true,
    };
}

struct Engineered {
    layout: PhysicalLayout<f64>,
    coeffs: EngineeredCoeffs<f64>,
    report: HierarchyReport,
    h_eng: ComplexMatrix,
}

/// Numerical objects shared by every pipeline of one configuration.
pub struct Experiment {
    cfg: ExperimentConfig,
    h_ideal: ComplexMatrix,
    teig: HermitianEigen<f64>,
    register: QubitRegisterState<f64>,
    populations: SpectrumPopulations<f64>,
    cavity0: SqueezedCoherentSpec<f64>,
    engineered: Option<Engineered>,
    warnings: Vec<String>,
}

fn target_graph(target: &TargetSpec) -> CliResult<XYGraph<f64>> {
    Ok(match target {
        TargetSpec::Preset { eta_hz, .. } => XYGraph::two_site(hz(*eta_hz)),
        TargetSpec::Graph {
            n_sites,
            edges,
            local_z_hz,
        } => XYGraph::new(
            *n_sites,
            edges.iter().map(|e| (e.i, e.j, hz(e.eta_hz))).collect(),
            local_z_hz
                .as_ref()
                .map(|v| v.iter().map(|&f| hz(f)).collect()),
        )?,
    })
}

impl Experiment {
    pub fn prepare(cfg: &ExperimentConfig) -> CliResult<Self> {
        cfg.validate()?;
        let mut warnings = Vec::new();
        let graph = target_graph(&cfg.target)?;
        let n = graph.n_sites();
        let h_ideal = build_xy_target(&graph, n)?;
        let teig = eig_hermitian(&h_ideal)?;
        let register = match &cfg.initial_qubits {
            InitialQubits::UniformEigenstates => {
                eigenstate_superposition(&teig, &vec![Complex64::new(1.0, 0.0); teig.dim()])?
            }
            InitialQubits::EigenstateWeights { weights } => {
                let w: Vec<Complex64> =
                    weights.iter().map(|p| Complex64::new(p[0], p[1])).collect();
                eigenstate_superposition(&teig, &w)?
            }
            InitialQubits::Basis { bits } => QubitRegisterState::basis(bits)?,
        };
        let populations = SpectrumPopulations::from_register(&teig, &register)?;
        let cavity0 = SqueezedCoherentSpec::new(
            Complex64::new(cfg.cavity.beta[0], cfg.cavity.beta[1]),
            Complex64::new(cfg.cavity.xi[0], cfg.cavity.xi[1]),
            FockTruncation::new(cfg.cavity.n_max)?,
        )?;

        let engineered = match &cfg.physical {
            Some(p)
                if cfg.mode.needs_physical() || cfg.reference.is_some_and(Mode::needs_physical) =>
            {
                let opts = LayoutOptions {
                    omega_c: hz(p.cavity_hz),
                    coupler_detuning: hz(p.coupler_detuning_hz.unwrap_or(p.delta_hz)),
                    ratios: p.ratios,
                };
                let layout = engineered_layout(&graph, hz(p.g_hz), hz(p.delta_hz), &opts)?;
                let report = layout.hierarchy();
                if let Err(e) = report.check(&p.ratios) {
                    if cfg.strict {
                        return Err(CliError::validation(e.to_string()));
                    }
                    warn!("{e}");
                    warnings.push(e.to_string());
                }
                let coeffs = engineered_coeffs(&layout)?;
                let h_eng = build_xy_target(&coeffs.target_graph(&layout.edges)?, n)?;
                Some(Engineered {
                    layout,
                    coeffs,
                    report,
                    h_eng,
                })
            }
            _ => None,
        };

        Ok(Self {
            cfg: cfg.clone(),
            h_ideal,
            teig,
            register,
            populations,
            cavity0,
            engineered,
            warnings,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn cavity0(&self) -> &SqueezedCoherentSpec<f64> {
        &self.cavity0
    }

    pub fn populations(&self) -> &SpectrumPopulations<f64> {
        &self.populations
    }

    fn engineered(&self) -> CliResult<&Engineered> {
        self.engineered
            .as_ref()
            .ok_or_else(|| CliError::validation("pipeline needs a physical section"))
    }

    /// Reduced cavity states of `mode` at `times`, with the coupler leakage of
    /// the full pipeline.
    pub fn cavity_states(
        &self,
        mode: Mode,
        times: &[f64],
    ) -> CliResult<(Vec<ComplexMatrix>, Option<Vec<f64>>)> {
        match mode {
            Mode::Ideal | Mode::Engineered => {
                let h = if mode == Mode::Ideal {
                    &self.h_ideal
                } else {
                    &self.engineered()?.h_eng
                };
                let tr = evolve_dispersive(h, &self.cavity0, &self.register, times)?;
                Ok((reduced_series(&tr, &[0])?, None))
            }
            Mode::Full => {
                let out = evolve_full(
                    &self.engineered()?.layout,
                    &self.cavity0,
                    &self.register,
                    times,
                )?;
                Ok((out.cavity_states, Some(out.coupler_leakage)))
            }
        }
    }

    fn engineered_summary(&self) -> Option<EngineeredSummary> {
        let e = self.engineered.as_ref()?;
        let p = self.cfg.physical.as_ref()?;
        Some(EngineeredSummary {
            g_rad_per_s: e.layout.g,
            delta_rad_per_s: hz(p.delta_hz),
            coupler_detuning_rad_per_s: hz(p.coupler_detuning_hz.unwrap_or(p.delta_hz)),
            j_local_rad_per_s: e.layout.j_local.clone(),
            j_cross_rad_per_s: e.layout.j_cross.clone(),
            lambda_eng_rad_per_s: e.coeffs.lambda_eng.clone(),
            eta_eng_rad_per_s: e.coeffs.eta_eng.clone(),
            hierarchy: e.report,
            required: p.ratios,
            hierarchy_satisfied: e.report.satisfies(&p.ratios),
        })
    }
}

/// In-memory results of a run alongside its manifest.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub out_dir: PathBuf,
    pub profiles: Vec<(Mode, Vec<AngularProfile<f64>>)>,
    pub estimates: Option<EstimatesDocument>,
    pub fidelity: Option<(Vec<f64>, Vec<f64>)>,
}

impl RunOutcome {
    pub fn estimates_for(&self, mode: Mode) -> Option<&PipelineEstimates> {
        self.estimates
            .as_ref()?
            .pipelines
            .iter()
            .find(|p| p.pipeline == mode)
    }
}

struct Writer {
    dir: PathBuf,
    files: Vec<FileRecord>,
}

impl Writer {
    fn record(&mut self, name: &str, kind: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        let bytes = std::fs::metadata(&path)
            .map_err(|e| CliError::io(&path, e))?
            .len();
        self.files.push(FileRecord {
            path: name.to_owned(),
            kind: kind.to_owned(),
            sha256: export::sha256_file(&path)?,
            bytes,
        });
        Ok(())
    }

    fn csv<I>(&mut self, name: &str, kind: &str, header: &[&str], rows: I) -> CliResult<()>
    where
        I: IntoIterator,
        I::Item: AsRef<[f64]>,
    {
        export_csv(&self.dir.join(name), header, rows)?;
        self.record(name, kind)
    }

    fn json<T: serde::Serialize>(&mut self, name: &str, kind: &str, value: &T) -> CliResult<()> {
        export_json(&self.dir.join(name), value)?;
        self.record(name, kind)
    }
}

/// Highest peak of the unrotated initial state's profile.
fn reference_height(profile: &AngularProfile<f64>) -> f64 {
    let max = profile
        .values
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    detect_peaks(profile, 1e-12 + 1e-6 * max.abs())
        .ok()
        .and_then(|p| p.into_iter().map(|pk| pk.height).reduce(f64::max))
        .unwrap_or(max)
}

/// Zero-time snapshots carry no phase, so every component is stationary.
fn zero_time_estimate(peaks: &[Peak<f64>], reference: f64) -> SpectralEstimate {
    SpectralEstimate {
        components: peaks
            .iter()
            .map(|p| SpectralComponent {
                theta_peak: p.theta,
                energy: 0.0,
                weight: (p.height / reference).clamp(0.0, 1.0),
                overlapping: false,
            })
            .collect(),
        evolution_time: 0.0,
        min_separation: None,
    }
}

fn pipelines(cfg: &ExperimentConfig) -> Vec<Mode> {
    let mut v = vec![cfg.mode];
    if let Some(r) = cfg.reference {
        v.push(r);
    }
    v
}

/// Runs every stage of `cfg` and writes the data files and manifest into `out_dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    stages: Stages,
) -> CliResult<RunOutcome> {
    let exp = Experiment::prepare(cfg)?;
    let mut warnings = exp.warnings.clone();
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut w = Writer {
        dir: out_dir.to_path_buf(),
        files: Vec::new(),
    };
    w.json("config.json", "config", cfg)?;

    let radius = cfg.profile_radius();
    let n_theta = cfg.tomography.n_theta;
    let psi0 = squeezed_coherent(exp.cavity0())?;
    let rho0 = pure_density(&psi0);
    let ref_height = reference_height(&angular_profile(&rho0, radius, n_theta)?);
    let min_prominence = cfg.tomography.min_prominence * ref_height;
    let extent = cfg.grid_extent();
    let axis = symmetric_axis(extent, cfg.tomography.grid_step)?;

    let mut profiles = Vec::new();
    let mut estimates = Vec::new();
    let mut leakage_max: Option<f64> = None;
    for mode in pipelines(cfg) {
        let (states, leakage) = exp.cavity_states(mode, &cfg.times_s)?;
        if let Some(l) = leakage {
            leakage_max = Some(l.iter().cloned().fold(leakage_max.unwrap_or(0.0), f64::max));
        }
        let mut mode_profiles = Vec::new();
        let mut snapshots = Vec::new();
        for (k, (&t, rho)) in cfg.times_s.iter().zip(&states).enumerate() {
            let profile = angular_profile(rho, radius, n_theta)?;
            w.csv(
                &format!("{}_profile_{k:02}.csv", mode.name()),
                "angular-profile",
                &[export::THETA, export::WIGNER],
                profile
                    .thetas
                    .iter()
                    .zip(&profile.values)
                    .map(|(&a, &b)| [a, b]),
            )?;
            if stages.wigner {
                let grid = wigner(rho, &axis, &axis)?;
                let ny = grid.im_axis.len();
                w.csv(
                    &format!("{}_wigner_{k:02}.csv", mode.name()),
                    "wigner-grid",
                    &[export::RE_ALPHA, export::IM_ALPHA, export::WIGNER],
                    grid.values
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| [grid.re_axis[i / ny], grid.im_axis[i % ny], v]),
                )?;
            }
            if stages.estimates {
                let peaks = detect_peaks(&profile, min_prominence)?;
                let estimate = if t > 0.0 {
                    estimate_spectrum(&peaks, t, ref_height)?
                } else {
                    zero_time_estimate(&peaks, ref_height)
                };
                snapshots.push(EstimateSnapshot {
                    time_s: t,
                    estimate,
                });
            }
            mode_profiles.push(profile);
        }
        if stages.estimates {
            w.csv(
                &format!("{}_estimates.csv", mode.name()),
                "spectral-estimates",
                &[export::TIME, export::THETA, export::ENERGY, export::WEIGHT],
                snapshots.iter().flat_map(|s| {
                    s.estimate
                        .components
                        .iter()
                        .map(move |c| [s.time_s, c.theta_peak, c.energy, c.weight])
                }),
            )?;
            estimates.push(PipelineEstimates {
                pipeline: mode,
                snapshots,
            });
        }
        profiles.push((mode, mode_profiles));
    }

    let estimates = if stages.estimates {
        let doc = EstimatesDocument {
            schema_version: SCHEMA_VERSION,
            config: cfg.clone(),
            pipelines: estimates,
        };
        w.json("estimates.json", "spectral-estimates", &doc)?;
        Some(doc)
    } else {
        None
    };

    let mut fidelity = None;
    if let (true, Some(reference)) = (stages.fidelity, cfg.reference) {
        let times = cfg.fidelity_times();
        let (a, la) = exp.cavity_states(cfg.mode, times)?;
        let (b, lb) = exp.cavity_states(reference, times)?;
        let f = fidelity_of_states(&a, &b)?;
        w.csv(
            "fidelity.csv",
            "fidelity-series",
            &[export::TIME, export::FIDELITY],
            times.iter().zip(&f).map(|(&t, &x)| [t, x]),
        )?;
        if let Some(l) = la.or(lb) {
            leakage_max = Some(l.iter().cloned().fold(leakage_max.unwrap_or(0.0), f64::max));
            w.csv(
                "coupler_leakage.csv",
                "coupler-leakage",
                &[export::TIME, export::LEAKAGE],
                times.iter().zip(&l).map(|(&t, &x)| [t, x]),
            )?;
        }
        fidelity = Some((times.to_vec(), f));
    }

    let n_max = cfg.cavity.n_max;
    let initial_tail_mass = tail_mass(&psi0, n_max.saturating_sub(5));
    let convergence_distance = truncation_convergence(exp.cavity0())?;
    if convergence_distance > CONVERGENCE_WARNING {
        let msg = format!(
            "cavity state changes by {convergence_distance:.3e} when n_max is doubled from {n_max}; truncation is not converged"
        );
        warn!("{msg}");
        warnings.push(msg);
    }
    if initial_tail_mass > TAIL_WARNING {
        let msg = format!(
            "initial cavity state carries {initial_tail_mass:.3e} above level {}",
            n_max.saturating_sub(5)
        );
        warn!("{msg}");
        warnings.push(msg);
    }
    let max_displacement = (2.0f64).sqrt() * extent;
    let fidelity_min = fidelity
        .as_ref()
        .map(|(_, f)| f.iter().cloned().fold(f64::INFINITY, f64::min));

    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        created_unix_s: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config: cfg.clone(),
        derived: Derived {
            target_energies_rad_per_s: exp.teig.eigenvalues.clone(),
            initial_populations: exp.populations().populations().to_vec(),
            reference_height: ref_height,
            engineered: exp.engineered_summary(),
            truncation: TruncationDiagnostics {
                n_max,
                initial_tail_mass,
                convergence_distance,
                grid_extent: extent,
                max_displacement,
                wigner_working_dim: working_dimension(n_max + 1, max_displacement),
            },
            fidelity_min,
            coupler_leakage_max: leakage_max,
        },
        warnings,
        acceptance: Vec::new(),
        files: w.files,
    };
    export_json(&out_dir.join(MANIFEST_FILE), &manifest)?;
    Ok(RunOutcome {
        manifest,
        out_dir: out_dir.to_path_buf(),
        profiles,
        estimates,
        fidelity,
    })
}
