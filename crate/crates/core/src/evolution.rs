//! Time propagation of composite cavity/qubit states.
//!
//! A Hamiltonian is diagonalized once and the decomposition is reused for
//! every time point; time points are then evolved in parallel.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonians::{build_aqpe, build_full, excitation_labels, PhysicalLayout};
use crate::linalg::{
    eig_hermitian, eig_hermitian_sectors, kron, max_abs, partial_trace, partial_trace_pure,
    pure_density, trace, uhlmann_fidelity, ComplexMatrix, CompositeSpace, HermitianEigen,
    StateVector,
};
use crate::qstates::{
    ladder_ops, rotate_gaussian, squeezed_coherent, FockTruncation, QubitRegisterState,
    SqueezedCoherentSpec,
};
use crate::scalar::{cis, cr, Real};

/// State vector or density matrix on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState<T: Real> {
    Pure(StateVector<T>),
    Mixed(ComplexMatrix<T>),
}

impl<T: Real> QuantumState<T> {
    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(v) => v.len(),
            Self::Mixed(m) => m.nrows(),
        }
    }

    /// `‖ψ‖²` or `Tr ρ`.
    pub fn weight(&self) -> T {
        match self {
            Self::Pure(v) => v.norm_squared(),
            Self::Mixed(m) => trace(m).re,
        }
    }

    pub fn density(&self) -> ComplexMatrix<T> {
        match self {
            Self::Pure(v) => pure_density(v),
            Self::Mixed(m) => m.clone(),
        }
    }

    pub fn reduce(&self, space: &CompositeSpace, keep: &[usize]) -> Result<ComplexMatrix<T>> {
        match self {
            Self::Pure(v) => partial_trace_pure(v, space, keep),
            Self::Mixed(m) => partial_trace(m, space, keep),
        }
    }

    /// `⟨O⟩`.
    pub fn expectation(&self, op: &ComplexMatrix<T>) -> T {
        match self {
            Self::Pure(v) => v.dotc(&(op * v)).re,
            Self::Mixed(m) => trace(&(op * m)).re,
        }
    }
}

/// States on a fixed composite space at ascending times.
#[derive(Debug, Clone)]
pub struct EvolutionTrace<T: Real> {
    times: Vec<T>,
    states: Vec<QuantumState<T>>,
    space: CompositeSpace,
}

impl<T: Real> EvolutionTrace<T> {
    pub fn new(times: Vec<T>, states: Vec<QuantumState<T>>, space: CompositeSpace) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("times must be ascending".into()));
        }
        let dim = space.total_dim();
        for (i, s) in states.iter().enumerate() {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "state {i} has dimension {}, space has {dim}",
                    s.dim()
                )));
            }
            if (s.weight() - T::one()).abs() > T::lit(T::TRACE_TOL) {
                return Err(Error::InvalidArgument(format!(
                    "state {i} has norm/trace {:e}",
                    s.weight().to_f64_lossy()
                )));
            }
        }
        Ok(Self {
            times,
            states,
            space,
        })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn states(&self) -> &[QuantumState<T>] {
        &self.states
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Eigenenergies `E_j` and initial populations `p_jj` of the target register.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPopulations<T: Real> {
    energies: Vec<T>,
    populations: Vec<T>,
}

impl<T: Real> SpectrumPopulations<T> {
    pub fn new(energies: Vec<T>, populations: Vec<T>) -> Result<Self> {
        if energies.len() != populations.len() || energies.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} energies for {} populations",
                energies.len(),
                populations.len()
            )));
        }
        if populations.iter().any(|&p| p < T::zero()) {
            return Err(Error::InvalidArgument("negative population".into()));
        }
        let total = populations.iter().fold(T::zero(), |a, &p| a + p);
        if (total - T::one()).abs() > T::lit(1e-10).max(T::lit(T::TRACE_TOL)) {
            return Err(Error::InvalidArgument(format!(
                "populations sum to {:e}",
                total.to_f64_lossy()
            )));
        }
        Ok(Self {
            energies,
            populations,
        })
    }

    /// Populations of `state` in the eigenbasis of `eig`.
    pub fn from_register(eig: &HermitianEigen<T>, state: &QubitRegisterState<T>) -> Result<Self> {
        Self::new(eig.eigenvalues.clone(), state.populations(eig))
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn populations(&self) -> &[T] {
        &self.populations
    }
}

/// Evolves `psi0` to every time in `times` with one eigendecomposition of `h`.
pub fn evolve_series<T: Real>(
    h: &ComplexMatrix<T>,
    psi0: &StateVector<T>,
    times: &[T],
    space: &CompositeSpace,
) -> Result<EvolutionTrace<T>> {
    let eig = eig_hermitian(h)?;
    evolve_with(&eig, psi0, times, space)
}

/// Same as [`evolve_series`] for an already decomposed Hamiltonian.
pub fn evolve_with<T: Real>(
    eig: &HermitianEigen<T>,
    psi0: &StateVector<T>,
    times: &[T],
    space: &CompositeSpace,
) -> Result<EvolutionTrace<T>> {
    if psi0.len() != eig.dim() || space.total_dim() != eig.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state length {}, Hamiltonian dimension {}, space dimension {}",
            psi0.len(),
            eig.dim(),
            space.total_dim()
        )));
    }
    if (psi0.norm() - T::one()).abs() > T::lit(T::TRACE_TOL) {
        return Err(Error::InvalidArgument(
            "initial state is not normalized".into(),
        ));
    }
    let states = times
        .par_iter()
        .map(|&t| QuantumState::Pure(eig.evolve(psi0, t)))
        .collect();
    EvolutionTrace::new(times.to_vec(), states, space.clone())
}

/// Cavity state of the ideal dispersive evolution, assembled as the mixture
/// `Σ_j p_jj |βe^{−iE_j t}, ξe^{−2iE_j t}⟩⟨…|`.
pub fn ideal_cavity_analytic<T: Real>(
    sp: &SpectrumPopulations<T>,
    cavity0: &SqueezedCoherentSpec<T>,
    t: T,
) -> Result<ComplexMatrix<T>> {
    let d = cavity0.trunc.dim();
    let mut rho = ComplexMatrix::zeros(d, d);
    for (&e, &p) in sp.energies.iter().zip(&sp.populations) {
        if p == T::zero() {
            continue;
        }
        let psi = squeezed_coherent(&rotate_gaussian(cavity0, -e * t))?;
        rho += pure_density(&psi) * cr(p);
    }
    Ok(rho)
}

/// `ψ(t) → e^{+i h0 t} ψ(t)` for a diagonal `h0`.
pub fn to_rotating_frame<T: Real>(
    trace_in: &EvolutionTrace<T>,
    h0: &ComplexMatrix<T>,
) -> Result<EvolutionTrace<T>> {
    let n = trace_in.space.total_dim();
    if h0.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "frame generator is {:?}, space dimension is {n}",
            h0.shape()
        )));
    }
    let scale = max_abs(h0);
    for j in 0..n {
        for i in 0..n {
            if i != j && h0[(i, j)].norm_sqr().sqrt() > T::lit(1e-14) * scale {
                return Err(Error::InvalidArgument(
                    "rotating-frame generator must be diagonal".into(),
                ));
            }
        }
    }
    let diag: Vec<T> = (0..n).map(|i| h0[(i, i)].re).collect();
    let states = trace_in
        .times
        .par_iter()
        .zip(trace_in.states.par_iter())
        .map(|(&t, s)| {
            let phases: Vec<_> = diag.iter().map(|&e| cis(e * t)).collect();
            match s {
                QuantumState::Pure(v) => {
                    QuantumState::Pure(StateVector::from_fn(n, |i, _| v[i] * phases[i]))
                }
                QuantumState::Mixed(m) => {
                    QuantumState::Mixed(ComplexMatrix::from_fn(n, n, |i, j| {
                        phases[i] * m[(i, j)] * phases[j].conj()
                    }))
                }
            }
        })
        .collect();
    EvolutionTrace::new(trace_in.times.clone(), states, trace_in.space.clone())
}

/// Partial trace onto `keep` at every time point.
pub fn reduced_series<T: Real>(
    trace_in: &EvolutionTrace<T>,
    keep: &[usize],
) -> Result<Vec<ComplexMatrix<T>>> {
    trace_in
        .states
        .par_iter()
        .map(|s| s.reduce(&trace_in.space, keep))
        .collect()
}

fn check_grids<T: Real>(a: &[T], b: &[T]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} time points",
            a.len(),
            b.len()
        )));
    }
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        if (x - y).abs() > T::lit(1e-12) * x.abs().max(y.abs()) {
            return Err(Error::GridMismatch(format!(
                "point {i}: {:e} vs {:e}",
                x.to_f64_lossy(),
                y.to_f64_lossy()
            )));
        }
    }
    Ok(())
}

/// Uhlmann fidelity of the reduced states of two traces at each time.
pub fn fidelity_series<T: Real>(
    a: &EvolutionTrace<T>,
    b: &EvolutionTrace<T>,
    keep: &[usize],
) -> Result<(Vec<T>, Vec<T>)> {
    check_grids(&a.times, &b.times)?;
    let ra = reduced_series(a, keep)?;
    let rb = reduced_series(b, keep)?;
    if a.space.restrict(keep)? != b.space.restrict(keep)? {
        return Err(Error::DimensionMismatch(
            "reduced spaces of the two traces differ".into(),
        ));
    }
    let f = ra
        .par_iter()
        .zip(rb.par_iter())
        .map(|(x, y)| uhlmann_fidelity(x, y))
        .collect::<Result<Vec<T>>>()?;
    Ok((a.times.clone(), f))
}

/// Fidelity of two lists of cavity states on the same grid.
pub fn fidelity_of_states<T: Real>(
    a: &[ComplexMatrix<T>],
    b: &[ComplexMatrix<T>],
) -> Result<Vec<T>> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} states",
            a.len(),
            b.len()
        )));
    }
    a.par_iter()
        .zip(b.par_iter())
        .map(|(x, y)| uhlmann_fidelity(x, y))
        .collect()
}

/// `|cavity⟩ ⊗ |register⟩`.
pub fn product_state<T: Real>(
    cavity: &StateVector<T>,
    register: &StateVector<T>,
) -> Result<StateVector<T>> {
    let m = kron(
        &ComplexMatrix::from_column_slice(cavity.len(), 1, cavity.as_slice()),
        &ComplexMatrix::from_column_slice(register.len(), 1, register.as_slice()),
    )?;
    Ok(StateVector::from_column_slice(m.as_slice()))
}

/// Evolution of `|β,ξ⟩ ⊗ |ψ_q⟩` under `n̂ ⊗ H_target`.
pub fn evolve_dispersive<T: Real>(
    h_target: &ComplexMatrix<T>,
    cavity0: &SqueezedCoherentSpec<T>,
    register: &QubitRegisterState<T>,
    times: &[T],
) -> Result<EvolutionTrace<T>> {
    if h_target.nrows() != register.amplitudes().len() {
        return Err(Error::DimensionMismatch(format!(
            "target Hamiltonian is {}-dimensional, register has {} amplitudes",
            h_target.nrows(),
            register.amplitudes().len()
        )));
    }
    let h = build_aqpe(h_target, cavity0.trunc)?;
    let space = CompositeSpace::cavity_qubits(cavity0.trunc.dim(), register.n_qubits())?;
    let psi0 = product_state(&squeezed_coherent(cavity0)?, register.amplitudes())?;
    // n̂ ⊗ H is block diagonal in the photon number.
    let qdim = register.amplitudes().len();
    let labels: Vec<i64> = (0..h.nrows()).map(|i| (i / qdim) as i64).collect();
    let eig = eig_hermitian_sectors(&h, &labels)?;
    evolve_with(&eig, &psi0, times, &space)
}

/// `ω_c n̂ + Σ_μ (ω_μ/2) σᶻ_μ` as a diagonal matrix on the full space.
pub fn free_hamiltonian<T: Real>(
    layout: &PhysicalLayout<T>,
    trunc: FockTruncation,
) -> ComplexMatrix<T> {
    let nq = layout.n_qubits();
    let qdim = 1usize << nq;
    let w = layout.qubit_frequencies();
    let half = T::lit(0.5);
    let diag = nalgebra::DVector::from_fn(trunc.dim() * qdim, |i, _| {
        let n = i / qdim;
        let q = i % qdim;
        let mut e = layout.omega_c * T::lit(n as f64);
        for (mu, &wm) in w.iter().enumerate() {
            let excited = (q >> (nq - 1 - mu)) & 1 == 0;
            e += if excited { wm * half } else { -wm * half };
        }
        cr(e)
    });
    ComplexMatrix::from_diagonal(&diag)
}

/// Cavity states of the full-Hamiltonian pipeline and the probability found
/// outside the coupler-ground subspace at each time.
#[derive(Debug, Clone)]
pub struct FullPipelineOutput<T: Real> {
    pub times: Vec<T>,
    pub cavity_states: Vec<ComplexMatrix<T>>,
    pub coupler_leakage: Vec<T>,
}

/// Lab-frame evolution under the full Hamiltonian with couplers starting in
/// their ground state, transformed to the frame of the free Hamiltonian and
/// projected onto the coupler-ground subspace before tracing to the cavity.
pub fn evolve_full<T: Real>(
    layout: &PhysicalLayout<T>,
    cavity0: &SqueezedCoherentSpec<T>,
    register: &QubitRegisterState<T>,
    times: &[T],
) -> Result<FullPipelineOutput<T>> {
    let nt = layout.n_targets();
    if register.n_qubits() != nt {
        return Err(Error::DimensionMismatch(format!(
            "register has {} qubits, layout has {nt} targets",
            register.n_qubits()
        )));
    }
    let trunc = cavity0.trunc;
    let nq = layout.n_qubits();
    let n_couplers = nq - nt;
    let h = build_full(layout, trunc)?;
    let space = layout.composite_space(trunc)?;

    // Couplers in the ground state: basis index 1 on each coupler qubit.
    let mut couplers = StateVector::zeros(1 << n_couplers);
    couplers[(1 << n_couplers) - 1] = cr(T::one());
    let full_register = product_state(register.amplitudes(), &couplers)?;
    let psi0 = product_state(&squeezed_coherent(cavity0)?, &full_register)?;

    let eig = eig_hermitian_sectors(&h, &excitation_labels(trunc, nq))?;
    let lab = evolve_with(&eig, &psi0, times, &space)?;
    let rotating = to_rotating_frame(&lab, &free_hamiltonian(layout, trunc))?;

    let qdim = 1usize << nq;
    let cdim = 1usize << n_couplers;
    let ground = cdim - 1;
    let reduced_space = CompositeSpace::cavity_qubits(trunc.dim(), nt)?;
    let results: Vec<(ComplexMatrix<T>, T)> = rotating
        .states()
        .par_iter()
        .map(|s| {
            let QuantumState::Pure(v) = s else {
                unreachable!("full pipeline evolves pure states")
            };
            let projected =
                StateVector::from_fn(trunc.dim() * (qdim / cdim), |i, _| v[i * cdim + ground]);
            let kept = projected.norm_squared();
            let normalized = projected.unscale(kept.sqrt());
            let rho = partial_trace_pure(&normalized, &reduced_space, &[0])?;
            Ok((rho, T::one() - kept))
        })
        .collect::<Result<_>>()?;
    let (cavity_states, coupler_leakage) = results.into_iter().unzip();
    Ok(FullPipelineOutput {
        times: times.to_vec(),
        cavity_states,
        coupler_leakage,
    })
}

/// `⟨a⟩` of a cavity density matrix.
pub fn cavity_mean_field<T: Real>(
    rho: &ComplexMatrix<T>,
    trunc: FockTruncation,
) -> crate::scalar::C<T> {
    trace(&(ladder_ops::<T>(trunc).a * rho))
}
