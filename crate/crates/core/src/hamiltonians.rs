//! Hamiltonian builders: XY targets, the dispersive readout form, the full
//! cavity/target/coupler Hamiltonian, and the engineered-coefficient algebra
//! that maps coupler parameters onto an effective XY target.
//!
//! All frequencies are angular (rad/s), ħ = 1.
//!
//! Qubit ordering in the full model: target qubits by site index, then one
//! local coupler per target (same order), then one cross coupler per edge
//! (edge-list order). The cavity is subsystem 0 of every composite space.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::{identity, kron, ComplexMatrix, CompositeSpace};
use crate::qstates::{
    embed_qubit_op, ladder_ops, sigma_minus, sigma_plus, sigma_z, FockTruncation,
};
use crate::scalar::{cr, Real};

/// Coupling graph of a generalized XY model with optional longitudinal fields.
#[derive(Debug, Clone, PartialEq)]
pub struct XYGraph<T: Real> {
    n_sites: usize,
    edges: Vec<(usize, usize, T)>,
    local_z: Option<Vec<T>>,
}

impl<T: Real> XYGraph<T> {
    pub fn new(
        n_sites: usize,
        edges: Vec<(usize, usize, T)>,
        local_z: Option<Vec<T>>,
    ) -> Result<Self> {
        validate_edges(n_sites, edges.iter().map(|&(k, kp, _)| (k, kp)))?;
        if let Some(lz) = &local_z {
            if lz.len() != n_sites {
                return Err(Error::InvalidGraph(format!(
                    "{} local fields for {n_sites} sites",
                    lz.len()
                )));
            }
        }
        Ok(Self {
            n_sites,
            edges,
            local_z,
        })
    }

    /// Two sites, one bond of strength `eta`, no fields.
    pub fn two_site(eta: T) -> Self {
        Self {
            n_sites: 2,
            edges: vec![(0, 1, eta)],
            local_z: None,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[(usize, usize, T)] {
        &self.edges
    }

    pub fn local_z(&self) -> Option<&[T]> {
        self.local_z.as_deref()
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(k, kp, _)| (k, kp)).collect()
    }
}

fn validate_edges(n_sites: usize, edges: impl Iterator<Item = (usize, usize)>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (k, kp) in edges {
        if k >= n_sites || kp >= n_sites {
            return Err(Error::InvalidGraph(format!(
                "edge ({k},{kp}) references a site beyond {n_sites}"
            )));
        }
        if k == kp {
            return Err(Error::InvalidGraph(format!("self-loop on site {k}")));
        }
        if !seen.insert((k.min(kp), k.max(kp))) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({k},{kp})")));
        }
    }
    Ok(())
}

/// `σ⁺_i σ⁻_j + σ⁻_i σ⁺_j` on an `n`-qubit register.
fn exchange<T: Real>(i: usize, j: usize, n: usize) -> Result<ComplexMatrix<T>> {
    let pi = embed_qubit_op(&sigma_plus::<T>(), i, n)?;
    let mj = embed_qubit_op(&sigma_minus::<T>(), j, n)?;
    let hop = &pi * &mj;
    Ok(&hop + hop.adjoint())
}

/// `Σ η_kk'(σ⁺_kσ⁻_k' + σ⁻_kσ⁺_k') + Σ (λ_k/2)σᶻ_k` on `n_qubits ≥ n_sites` qubits.
pub fn build_xy_target<T: Real>(graph: &XYGraph<T>, n_qubits: usize) -> Result<ComplexMatrix<T>> {
    if n_qubits < graph.n_sites || n_qubits == 0 {
        return Err(Error::InvalidGraph(format!(
            "{} sites do not fit on {n_qubits} qubits",
            graph.n_sites
        )));
    }
    let dim = 1usize << n_qubits;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for &(k, kp, eta) in &graph.edges {
        h += exchange::<T>(k, kp, n_qubits)? * cr(eta);
    }
    if let Some(lz) = &graph.local_z {
        for (k, &lam) in lz.iter().enumerate() {
            h += embed_qubit_op(&sigma_z::<T>(), k, n_qubits)? * cr(lam * T::lit(0.5));
        }
    }
    Ok(h)
}

/// `Σ_k σᶻ_k` on `n_qubits` qubits.
pub fn total_sigma_z<T: Real>(n_qubits: usize) -> Result<ComplexMatrix<T>> {
    let dim = 1usize << n_qubits;
    (0..n_qubits).try_fold(ComplexMatrix::zeros(dim, dim), |acc, k| {
        Ok(acc + embed_qubit_op(&sigma_z::<T>(), k, n_qubits)?)
    })
}

/// Dispersive readout Hamiltonian `n̂ ⊗ H_target` (cavity first).
pub fn build_aqpe<T: Real>(
    h_target: &ComplexMatrix<T>,
    trunc: FockTruncation,
) -> Result<ComplexMatrix<T>> {
    crate::linalg::eig_hermitian(h_target).map(|_| ())?;
    kron(&ladder_ops::<T>(trunc).n, h_target)
}

/// Required ordering `|Δ_μ| ≫ |J| ≫ |g|`, as minimum ratios.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HierarchyRatios {
    /// Minimum `min|Δ_μ| / max|J|`.
    pub r1: f64,
    /// Minimum `min|J| / |g|`.
    pub r2: f64,
}

impl Default for HierarchyRatios {
    fn default() -> Self {
        Self { r1: 10.0, r2: 10.0 }
    }
}

/// Achieved hierarchy ratios of a layout.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HierarchyReport {
    pub detuning_ratio: f64,
    pub coupling_ratio: f64,
}

impl HierarchyReport {
    pub fn satisfies(&self, ratios: &HierarchyRatios) -> bool {
        self.detuning_ratio >= ratios.r1 && self.coupling_ratio >= ratios.r2
    }

    pub fn check(&self, ratios: &HierarchyRatios) -> Result<()> {
        if self.satisfies(ratios) {
            Ok(())
        } else {
            Err(Error::HierarchyViolation {
                detuning_ratio: self.detuning_ratio,
                coupling_ratio: self.coupling_ratio,
                r1: ratios.r1,
                r2: ratios.r2,
            })
        }
    }
}

/// Parameters of the full cavity + target + coupler Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalLayout<T: Real> {
    pub omega_c: T,
    pub omega_targets: Vec<T>,
    /// One local coupler per target.
    pub omega_local: Vec<T>,
    /// One cross coupler per edge.
    pub omega_cross: Vec<T>,
    pub g: T,
    pub j_local: Vec<T>,
    pub j_cross: Vec<T>,
    pub edges: Vec<(usize, usize)>,
}

impl<T: Real> PhysicalLayout<T> {
    pub fn n_targets(&self) -> usize {
        self.omega_targets.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.omega_targets.len() + self.omega_local.len() + self.omega_cross.len()
    }

    pub fn local_coupler_index(&self, k: usize) -> usize {
        self.n_targets() + k
    }

    pub fn cross_coupler_index(&self, e: usize) -> usize {
        2 * self.n_targets() + e
    }

    /// Indices (within the qubit register) of every coupler qubit.
    pub fn coupler_indices(&self) -> std::ops::Range<usize> {
        self.n_targets()..self.n_qubits()
    }

    pub fn qubit_frequencies(&self) -> Vec<T> {
        self.omega_targets
            .iter()
            .chain(&self.omega_local)
            .chain(&self.omega_cross)
            .copied()
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_targets();
        if n == 0 {
            return Err(Error::InconsistentLayout("no target qubits".into()));
        }
        if self.omega_local.len() != n || self.j_local.len() != n {
            return Err(Error::InconsistentLayout(format!(
                "{n} targets but {} local coupler frequencies and {} local couplings",
                self.omega_local.len(),
                self.j_local.len()
            )));
        }
        let e = self.edges.len();
        if self.omega_cross.len() != e || self.j_cross.len() != e {
            return Err(Error::InconsistentLayout(format!(
                "{e} edges but {} cross coupler frequencies and {} cross couplings",
                self.omega_cross.len(),
                self.j_cross.len()
            )));
        }
        validate_edges(n, self.edges.iter().copied())
            .map_err(|err| Error::InconsistentLayout(err.to_string()))
    }

    /// Achieved `min|Δ_μ|/max|J|` and `min|J|/|g|` over the non-zero couplings.
    pub fn hierarchy(&self) -> HierarchyReport {
        let min_detuning = self
            .qubit_frequencies()
            .iter()
            .map(|&w| (w - self.omega_c).abs().to_f64_lossy())
            .fold(f64::INFINITY, f64::min);
        let js: Vec<f64> = self
            .j_local
            .iter()
            .chain(&self.j_cross)
            .map(|j| j.abs().to_f64_lossy())
            .filter(|&j| j > 0.0)
            .collect();
        let max_j = js.iter().copied().fold(0.0, f64::max);
        let min_j = js.iter().copied().fold(f64::INFINITY, f64::min);
        let g = self.g.abs().to_f64_lossy();
        HierarchyReport {
            detuning_ratio: if max_j > 0.0 {
                min_detuning / max_j
            } else {
                f64::INFINITY
            },
            coupling_ratio: if js.is_empty() {
                0.0
            } else if g > 0.0 {
                min_j / g
            } else {
                f64::INFINITY
            },
        }
    }

    /// Uniform target detuning `Δ = ω_qk − ω_c`.
    pub fn target_detuning(&self) -> Result<T> {
        let first = *self
            .omega_targets
            .first()
            .ok_or_else(|| Error::InconsistentLayout("no target qubits".into()))?
            - self.omega_c;
        for &w in &self.omega_targets[1..] {
            let d = w - self.omega_c;
            if (d - first).abs() > T::lit(1e-12) * first.abs() {
                return Err(Error::NonUniformDetuning(format!(
                    "{:e} vs {:e} rad/s",
                    first.to_f64_lossy(),
                    d.to_f64_lossy()
                )));
            }
        }
        if first == T::zero() {
            return Err(Error::InconsistentLayout("target detuning is zero".into()));
        }
        Ok(first)
    }

    /// Cross couplings attached to target `k`.
    pub fn cross_at_site(&self, k: usize) -> Vec<T> {
        self.edges
            .iter()
            .zip(&self.j_cross)
            .filter(|((a, b), _)| *a == k || *b == k)
            .map(|(_, &j)| j)
            .collect()
    }

    pub fn composite_space(&self, trunc: FockTruncation) -> Result<CompositeSpace> {
        CompositeSpace::cavity_qubits(trunc.dim(), self.n_qubits())
    }
}

/// Full lab-frame Hamiltonian: cavity energy, qubit energies, local-coupler
/// exchange, cross-coupler exchange with both edge endpoints, and uniform
/// Jaynes–Cummings coupling of every coupler to the cavity.
pub fn build_full<T: Real>(
    layout: &PhysicalLayout<T>,
    trunc: FockTruncation,
) -> Result<ComplexMatrix<T>> {
    layout.validate()?;
    let nq = layout.n_qubits();
    let nt = layout.n_targets();
    let qdim = 1usize << nq;
    let ladder = ladder_ops::<T>(trunc);

    let mut hq = ComplexMatrix::zeros(qdim, qdim);
    for (mu, &w) in layout.qubit_frequencies().iter().enumerate() {
        hq += embed_qubit_op(&sigma_z::<T>(), mu, nq)? * cr(w * T::lit(0.5));
    }
    for k in 0..nt {
        hq += exchange::<T>(layout.local_coupler_index(k), k, nq)? * cr(layout.j_local[k]);
    }
    for (e, &(k, kp)) in layout.edges.iter().enumerate() {
        let m = layout.cross_coupler_index(e);
        let j = cr(layout.j_cross[e]);
        hq += exchange::<T>(m, k, nq)? * j;
        hq += exchange::<T>(m, kp, nq)? * j;
    }

    let mut h = kron(&identity(trunc.dim()), &hq)?;
    h += kron(&ladder.n, &identity(qdim))? * cr(layout.omega_c);
    let mut lower_sum = ComplexMatrix::zeros(qdim, qdim);
    for c in layout.coupler_indices() {
        lower_sum += embed_qubit_op(&sigma_minus::<T>(), c, nq)?;
    }
    let jc = kron(&ladder.a_dag, &lower_sum)? * cr(layout.g);
    h += &jc + jc.adjoint();
    Ok(h)
}

/// `N = n + Σ_μ (σᶻ_μ + 1)/2` for every composite basis state (cavity first).
pub fn excitation_labels(trunc: FockTruncation, n_qubits: usize) -> Vec<i64> {
    let qdim = 1usize << n_qubits;
    (0..trunc.dim())
        .flat_map(|n| {
            // Basis index 0 of a qubit is the excited state.
            (0..qdim).map(move |q| n as i64 + (n_qubits as i64 - q.count_ones() as i64))
        })
        .collect()
}

/// Effective coefficients of the engineered dispersive interaction.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EngineeredCoeffs<T: Real> {
    /// `λ_k^eng` per target site (rad/s).
    pub lambda_eng: Vec<T>,
    /// `η_kk'^eng` per edge, in edge-list order (rad/s).
    pub eta_eng: Vec<T>,
}

impl<T: Real> EngineeredCoeffs<T> {
    /// Effective target graph `Σ η^eng (σ⁺σ⁻ + h.c.) + Σ (λ^eng/2) σᶻ`.
    pub fn target_graph(&self, edges: &[(usize, usize)]) -> Result<XYGraph<T>> {
        if edges.len() != self.eta_eng.len() {
            return Err(Error::InvalidGraph(format!(
                "{} edges for {} engineered couplings",
                edges.len(),
                self.eta_eng.len()
            )));
        }
        XYGraph::new(
            self.lambda_eng.len(),
            edges
                .iter()
                .zip(&self.eta_eng)
                .map(|(&(k, kp), &eta)| (k, kp, eta))
                .collect(),
            Some(self.lambda_eng.clone()),
        )
    }
}

/// `¼J_ℓ² + ¼ΣJ_m² + ΣJ_ℓJ_m + Σ_{pairs}J_mJ_m'` with the last sum over
/// unordered pairs of distinct cross couplings at the site.
fn lambda_bracket<T: Real>(j_local: T, cross: &[T]) -> T {
    let quarter = T::lit(0.25);
    let sum: T = cross.iter().fold(T::zero(), |a, &j| a + j);
    let sum_sq: T = cross.iter().fold(T::zero(), |a, &j| a + j * j);
    let mut pairs = T::zero();
    for (i, &a) in cross.iter().enumerate() {
        for &b in &cross[i + 1..] {
            pairs += a * b;
        }
    }
    quarter * j_local * j_local + quarter * sum_sq + j_local * sum + pairs
}

/// `η^eng = (3g²/2Δ³)J_m²`, `λ_k^eng = −(2g²/Δ³)·bracket_k`.
pub fn engineered_coeffs<T: Real>(layout: &PhysicalLayout<T>) -> Result<EngineeredCoeffs<T>> {
    layout.validate()?;
    let delta = layout.target_detuning()?;
    let g2_d3 = layout.g * layout.g / (delta * delta * delta);
    let eta_eng = layout
        .j_cross
        .iter()
        .map(|&j| T::lit(1.5) * g2_d3 * j * j)
        .collect();
    let lambda_eng = (0..layout.n_targets())
        .map(|k| -T::lit(2.0) * g2_d3 * lambda_bracket(layout.j_local[k], &layout.cross_at_site(k)))
        .collect();
    Ok(EngineeredCoeffs {
        lambda_eng,
        eta_eng,
    })
}

/// Local couplings `J_ℓ` that null `λ_k^eng` for the given cross couplings at
/// the site. Both real roots, sorted by magnitude.
pub fn solve_zero_lambda<T: Real>(j_cross_at_site: &[T]) -> Result<[T; 2]> {
    solve_local_coupling(j_cross_at_site, T::zero())
}

/// Roots of `¼x² + x·ΣJ_m + (¼ΣJ_m² + ΣJ_mJ_m' + offset) = 0`, where
/// `offset = λ_target·Δ³/(2g²)` shifts the target field away from zero.
pub fn solve_local_coupling<T: Real>(j_cross_at_site: &[T], offset: T) -> Result<[T; 2]> {
    if j_cross_at_site.is_empty() {
        return Err(Error::InvalidArgument(
            "site has no cross coupling to balance".into(),
        ));
    }
    let s1 = j_cross_at_site.iter().fold(T::zero(), |a, &j| a + j);
    let c = lambda_bracket(T::zero(), j_cross_at_site) + offset;
    // x² + bx + c' = 0 with b = 4·s1, c' = 4·c.
    let b = T::lit(4.0) * s1;
    let cc = T::lit(4.0) * c;
    let disc = b * b - T::lit(4.0) * cc;
    if disc < T::zero() {
        return Err(Error::NoRealRoot {
            discriminant: disc.to_f64_lossy(),
        });
    }
    let sign = if b >= T::zero() { T::one() } else { -T::one() };
    let q = -T::lit(0.5) * (b + sign * disc.sqrt());
    let (r1, r2) = if q == T::zero() {
        (T::zero(), T::zero())
    } else {
        (q, cc / q)
    };
    Ok(if r1.abs() <= r2.abs() {
        [r1, r2]
    } else {
        [r2, r1]
    })
}

/// Frequencies and hierarchy requirements used when laying out couplers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutOptions<T: Real> {
    pub omega_c: T,
    /// Detuning of every coupler qubit from the cavity.
    pub coupler_detuning: T,
    pub ratios: HierarchyRatios,
}

/// Physical layout whose engineered coefficients reproduce `graph`: each
/// cross coupling is solved from `η = 3g²J²/(2Δ³)` and each local coupling is
/// the smaller-magnitude root that produces the requested field (zero when the
/// graph has none). Isolated sites with no field get `J_ℓ = 0`.
///
/// The hierarchy is not enforced here; see [`HierarchyReport::check`].
pub fn engineered_layout<T: Real>(
    graph: &XYGraph<T>,
    g: T,
    delta: T,
    opts: &LayoutOptions<T>,
) -> Result<PhysicalLayout<T>> {
    if g == T::zero() {
        return Err(Error::InvalidArgument(
            "g must be non-zero to engineer couplings".into(),
        ));
    }
    if delta == T::zero() {
        return Err(Error::InvalidArgument("detuning must be non-zero".into()));
    }
    let n = graph.n_sites();
    let d3 = delta * delta * delta;
    let mut j_cross = Vec::with_capacity(graph.edges().len());
    for &(k, kp, eta) in graph.edges() {
        let ratio = T::lit(2.0) * d3 * eta / (T::lit(3.0) * g * g);
        if ratio < T::zero() {
            return Err(Error::InvalidGraph(format!(
                "bond ({k},{kp}) with eta = {:e} has the wrong sign for detuning {:e}",
                eta.to_f64_lossy(),
                delta.to_f64_lossy()
            )));
        }
        j_cross.push(ratio.sqrt());
    }
    let edges = graph.edge_pairs();
    let mut j_local = Vec::with_capacity(n);
    for k in 0..n {
        let lam = graph.local_z().map_or(T::zero(), |lz| lz[k]);
        let offset = lam * d3 / (T::lit(2.0) * g * g);
        let cross: Vec<T> = edges
            .iter()
            .zip(&j_cross)
            .filter(|((a, b), _)| *a == k || *b == k)
            .map(|(_, &j)| j)
            .collect();
        if cross.is_empty() {
            // ¼J_ℓ² = −offset.
            let x2 = -T::lit(4.0) * offset;
            if x2 < T::zero() {
                return Err(Error::NoRealRoot {
                    discriminant: x2.to_f64_lossy(),
                });
            }
            j_local.push(x2.sqrt());
        } else {
            j_local.push(solve_local_coupling(&cross, offset)?[0]);
        }
    }
    let omega_t = opts.omega_c + delta;
    let omega_coupler = opts.omega_c + opts.coupler_detuning;
    Ok(PhysicalLayout {
        omega_c: opts.omega_c,
        omega_targets: vec![omega_t; n],
        omega_local: vec![omega_coupler; n],
        omega_cross: vec![omega_coupler; edges.len()],
        g,
        j_local,
        j_cross,
        edges,
    })
}

/// Two targets, two local couplers and one cross coupler engineered for a pure
/// XY bond `eta_target`. Fails if the solved couplings break the hierarchy.
pub fn two_qubit_preset<T: Real>(
    eta_target: T,
    g: T,
    delta: T,
) -> Result<(PhysicalLayout<T>, EngineeredCoeffs<T>)> {
    let opts = LayoutOptions {
        omega_c: T::lit(crate::DEFAULT_CAVITY_HZ * std::f64::consts::TAU),
        coupler_detuning: delta,
        ratios: HierarchyRatios::default(),
    };
    two_qubit_preset_with(eta_target, g, delta, &opts)
}

pub fn two_qubit_preset_with<T: Real>(
    eta_target: T,
    g: T,
    delta: T,
    opts: &LayoutOptions<T>,
) -> Result<(PhysicalLayout<T>, EngineeredCoeffs<T>)> {
    if eta_target <= T::zero() {
        return Err(Error::InvalidArgument("eta_target must be positive".into()));
    }
    let layout = engineered_layout(&XYGraph::two_site(eta_target), g, delta, opts)?;
    layout.hierarchy().check(&opts.ratios)?;
    let coeffs = engineered_coeffs(&layout)?;
    Ok((layout, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, eig_hermitian, max_abs};
    use crate::scalar::C;
    use std::f64::consts::TAU;

    fn eq7(eta: f64) -> ComplexMatrix<f64> {
        // Basis |00⟩,|01⟩,|10⟩,|11⟩: exchange couples |01⟩ and |10⟩.
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(1, 2)] = C::new(eta, 0.0);
        m[(2, 1)] = C::new(eta, 0.0);
        m
    }

    #[test]
    fn two_site_target_matches_hand_matrix() {
        let h = build_xy_target(&XYGraph::two_site(1.0), 2).unwrap();
        assert!(max_abs(&(&h - eq7(1.0))) < 1e-15);
        let eig = eig_hermitian(&h).unwrap();
        for (e, x) in eig.eigenvalues.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
            assert!((e - x).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_graph_is_zero() {
        let g = XYGraph::<f64>::new(3, vec![], None).unwrap();
        assert!(max_abs(&build_xy_target(&g, 3).unwrap()) == 0.0);
    }

    #[test]
    fn graph_validation() {
        assert!(XYGraph::new(2, vec![(0, 0, 1.0)], None).is_err());
        assert!(XYGraph::new(2, vec![(0, 1, 1.0), (1, 0, 2.0)], None).is_err());
        assert!(XYGraph::new(2, vec![(0, 2, 1.0)], None).is_err());
        assert!(XYGraph::new(2, vec![(0, 1, 1.0)], Some(vec![0.0])).is_err());
        assert!(build_xy_target(&XYGraph::two_site(1.0), 1).is_err());
    }

    #[test]
    fn target_conserves_magnetization() {
        let g = XYGraph::new(
            3,
            vec![(0, 1, 0.7), (1, 2, -1.3)],
            Some(vec![0.2, -0.5, 1.1]),
        )
        .unwrap();
        let h = build_xy_target(&g, 3).unwrap();
        let sz = total_sigma_z::<f64>(3).unwrap();
        assert!(max_abs(&commutator(&h, &sz)) < 1e-12);
    }

    #[test]
    fn aqpe_of_zero_target_is_zero() {
        let t = FockTruncation::new(4).unwrap();
        let h = build_aqpe(&ComplexMatrix::<f64>::zeros(4, 4), t).unwrap();
        assert_eq!(h.shape(), (20, 20));
        assert!(max_abs(&h) == 0.0);
    }

    #[test]
    fn aqpe_spectrum_is_product_spectrum() {
        let t = FockTruncation::new(5).unwrap();
        let h = build_aqpe(&eq7(0.8), t).unwrap();
        let eig = eig_hermitian(&h).unwrap();
        let mut expected: Vec<f64> = (0..=5)
            .flat_map(|n| [-0.8, 0.0, 0.0, 0.8].map(|e| n as f64 * e))
            .collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (e, x) in eig.eigenvalues.iter().zip(&expected) {
            assert!((e - x).abs() < 1e-12);
        }
    }

    fn sample_layout() -> PhysicalLayout<f64> {
        PhysicalLayout {
            omega_c: 5.0,
            omega_targets: vec![6.0, 6.0],
            omega_local: vec![6.5, 6.7],
            omega_cross: vec![7.1],
            g: 0.05,
            j_local: vec![-0.12, -0.09],
            j_cross: vec![0.4],
            edges: vec![(0, 1)],
        }
    }

    #[test]
    fn decoupled_full_hamiltonian_is_diagonal() {
        let mut layout = sample_layout();
        layout.g = 0.0;
        layout.j_local = vec![0.0, 0.0];
        layout.j_cross = vec![0.0];
        let t = FockTruncation::new(3).unwrap();
        let h = build_full(&layout, t).unwrap();
        let w = layout.qubit_frequencies();
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                if i != j {
                    assert!(h[(i, j)].norm() == 0.0);
                }
            }
            let n = i / 32;
            let q = i % 32;
            let mut e = 5.0 * n as f64;
            for (mu, wm) in w.iter().enumerate() {
                let bit = (q >> (4 - mu)) & 1;
                e += if bit == 0 { 0.5 * wm } else { -0.5 * wm };
            }
            assert!((h[(i, i)].re - e).abs() < 1e-12);
        }
    }

    #[test]
    fn full_hamiltonian_conserves_excitations() {
        let layout = sample_layout();
        let t = FockTruncation::new(4).unwrap();
        let h = build_full(&layout, t).unwrap();
        let labels = excitation_labels(t, layout.n_qubits());
        let nhat = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            labels.len(),
            labels.iter().map(|&l| C::new(l as f64, 0.0)),
        ));
        assert!(max_abs(&commutator(&h, &nhat)) < 1e-10);
        assert!(crate::linalg::hermiticity_deviation(&h) < 1e-14);
    }

    #[test]
    fn layout_validation() {
        let mut layout = sample_layout();
        layout.edges = vec![(0, 2)];
        assert!(matches!(
            build_full(&layout, FockTruncation::new(2).unwrap()),
            Err(Error::InconsistentLayout(_))
        ));
        let mut layout = sample_layout();
        layout.omega_targets = vec![6.0, 6.1];
        assert!(matches!(
            engineered_coeffs(&layout),
            Err(Error::NonUniformDetuning(_))
        ));
    }

    #[test]
    fn decoupled_cavity_has_no_engineered_terms() {
        let mut layout = sample_layout();
        layout.g = 0.0;
        let c = engineered_coeffs(&layout).unwrap();
        assert!(c.lambda_eng.iter().chain(&c.eta_eng).all(|&x| x == 0.0));
    }

    #[test]
    fn single_edge_eta_formula() {
        let layout = sample_layout();
        let c = engineered_coeffs(&layout).unwrap();
        let (g, d, j): (f64, f64, f64) = (0.05, 1.0, 0.4);
        assert!((c.eta_eng[0] - 3.0 * g * g * j * j / (2.0 * d.powi(3))).abs() < 1e-18);
    }

    #[test]
    fn two_qubit_root_nulls_lambda() {
        let mut layout = sample_layout();
        let jm = layout.j_cross[0];
        let jl = (-2.0 + 3f64.sqrt()) * jm;
        layout.j_local = vec![jl, jl];
        let c = engineered_coeffs(&layout).unwrap();
        let scale = layout.g.powi(2) / 1.0 * jm * jm;
        for l in c.lambda_eng {
            assert!(l.abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn zero_lambda_roots() {
        let [a, b] = solve_zero_lambda(&[1.0f64]).unwrap();
        assert!((a - (-2.0 + 3f64.sqrt())).abs() < 1e-15);
        assert!((b - (-2.0 - 3f64.sqrt())).abs() < 1e-14);
        let [sa, sb] = solve_zero_lambda(&[2.5f64]).unwrap();
        assert!((sa - 2.5 * a).abs() < 1e-14 && (sb - 2.5 * b).abs() < 1e-13);
        assert!(solve_zero_lambda::<f64>(&[]).is_err());
        // Two opposite couplings: ¼x² + ½ − 1 = 0 has real roots; a strongly
        // field-shifted site has none.
        assert!(solve_local_coupling(&[1.0f64, -1.0], 10.0).is_err());
    }

    #[test]
    fn zero_lambda_closed_loop_multi_neighbor() {
        let cross = [0.3f64, 0.5, 0.2];
        for root in solve_zero_lambda(&cross).unwrap() {
            let res = lambda_bracket(root, &cross);
            assert!(res.abs() < 1e-14, "{res:e}");
        }
    }

    #[test]
    fn engineered_coeffs_homogeneity() {
        let base = sample_layout();
        let c0 = engineered_coeffs(&base).unwrap();
        let scaled_g = PhysicalLayout {
            g: base.g * 3.0,
            ..base.clone()
        };
        let c_g = engineered_coeffs(&scaled_g).unwrap();
        let scaled_j = PhysicalLayout {
            j_local: base.j_local.iter().map(|j| j * 2.0).collect(),
            j_cross: base.j_cross.iter().map(|j| j * 2.0).collect(),
            ..base.clone()
        };
        let c_j = engineered_coeffs(&scaled_j).unwrap();
        let scaled_d = PhysicalLayout {
            omega_targets: vec![5.0 + 2.0; 2],
            ..base.clone()
        };
        let c_d = engineered_coeffs(&scaled_d).unwrap();
        for i in 0..2 {
            let l = c0.lambda_eng[i];
            assert!((c_g.lambda_eng[i] - 9.0 * l).abs() < 1e-12 * l.abs());
            assert!((c_j.lambda_eng[i] - 4.0 * l).abs() < 1e-12 * l.abs());
            assert!((c_d.lambda_eng[i] - l / 8.0).abs() < 1e-12 * l.abs());
        }
        let e = c0.eta_eng[0];
        assert!((c_g.eta_eng[0] - 9.0 * e).abs() < 1e-12 * e);
        assert!((c_j.eta_eng[0] - 4.0 * e).abs() < 1e-12 * e);
        assert!((c_d.eta_eng[0] - e / 8.0).abs() < 1e-12 * e);
    }

    #[test]
    fn preset_inverts_eta_and_nulls_lambda() {
        // η = 2π·50 Hz, g = 2π·2 MHz, Δ = 2π·1 GHz satisfies both ratios.
        let (eta, g, d) = (TAU * 50.0, TAU * 2e6, TAU * 1e9);
        let (layout, coeffs) = two_qubit_preset(eta, g, d).unwrap();
        assert_eq!(layout.n_qubits(), 5);
        assert!((coeffs.eta_eng[0] - eta).abs() < 1e-12 * eta);
        for l in &coeffs.lambda_eng {
            assert!(l.abs() < 1e-12 * eta);
        }
        let jm = (2.0 * d.powi(3) * eta / (3.0 * g * g)).sqrt();
        assert!((layout.j_cross[0] - jm).abs() < 1e-12 * jm);
        assert!((layout.j_local[0] - (-2.0 + 3f64.sqrt()) * jm).abs() < 1e-12 * jm);
        let h = build_xy_target(&coeffs.target_graph(&layout.edges).unwrap(), 2).unwrap();
        assert!(max_abs(&(h - eq7(eta))) < 1e-12 * eta);
    }

    #[test]
    fn weak_coupling_preset_reports_hierarchy() {
        // η = 2π·10 kHz, g = 2π·10 MHz, Δ = 2π·1 GHz gives J_m ≈ 2π·258 MHz.
        let err = two_qubit_preset(TAU * 1e4, TAU * 1e7, TAU * 1e9).unwrap_err();
        match err {
            Error::HierarchyViolation {
                detuning_ratio,
                coupling_ratio,
                ..
            } => {
                let jm = (2.0 * 1e27 * 1e4 / 3e14f64).sqrt();
                assert!((detuning_ratio - 1e9 / jm).abs() < 1e-9);
                assert!((coupling_ratio - (2.0 - 3f64.sqrt()) * jm / 1e7).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
