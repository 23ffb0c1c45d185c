//! Truncated bosonic operators, squeezed coherent cavity states and
//! multi-qubit register operators.
//!
//! Qubit convention: basis index 0 has `σz = +1` (excited), index 1 has
//! `σz = −1` (ground), so `σ⁺ = |0⟩⟨1|`. In multi-qubit registers site 0 is
//! the leftmost Kronecker factor.

use nalgebra::{ComplexField, DVector};

use crate::error::{Error, Result};
use crate::linalg::{
    exp_anti_hermitian, identity, kron_all, ComplexMatrix, HermitianEigen, StateVector,
};
use crate::scalar::{c, cis, cr, Real, C};

/// Fock space `{|0⟩, …, |n_max⟩}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FockTruncation {
    n_max: usize,
}

impl FockTruncation {
    pub const DEFAULT_N_MAX: usize = 40;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Adequacy heuristic `mean photon number < n_max / 2`.
    pub fn admits_mean_photons(&self, mean: f64) -> bool {
        mean < 0.5 * self.n_max as f64
    }
}

impl Default for FockTruncation {
    fn default() -> Self {
        Self {
            n_max: Self::DEFAULT_N_MAX,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ladder<T: Real> {
    pub a: ComplexMatrix<T>,
    pub a_dag: ComplexMatrix<T>,
    pub n: ComplexMatrix<T>,
}

pub fn ladder_ops<T: Real>(trunc: FockTruncation) -> Ladder<T> {
    let d = trunc.dim();
    let a = ComplexMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            cr(T::lit(j as f64).sqrt())
        } else {
            cr(T::zero())
        }
    });
    let a_dag = a.adjoint();
    let n = ComplexMatrix::from_diagonal(&DVector::from_fn(d, |i, _| cr(T::lit(i as f64))));
    Ladder { a, a_dag, n }
}

/// `e^{iθn̂}` (diagonal).
pub fn rotation<T: Real>(theta: T, trunc: FockTruncation) -> ComplexMatrix<T> {
    let d = trunc.dim();
    ComplexMatrix::from_diagonal(&DVector::from_fn(d, |i, _| cis(theta * T::lit(i as f64))))
}

/// `D(β) = exp(βa† − β*a)` on the truncated space.
pub fn displacement<T: Real>(beta: C<T>, trunc: FockTruncation) -> Result<ComplexMatrix<T>> {
    let l = ladder_ops::<T>(trunc);
    let generator = &l.a_dag * beta - &l.a * beta.conj();
    exp_anti_hermitian(&generator)
}

/// `S(ξ) = exp[(ξ*a² − ξa†²)/2]` on the truncated space.
pub fn squeeze<T: Real>(xi: C<T>, trunc: FockTruncation) -> Result<ComplexMatrix<T>> {
    let l = ladder_ops::<T>(trunc);
    let half = T::lit(0.5);
    let generator = (&l.a * &l.a) * (xi.conj() * half) - (&l.a_dag * &l.a_dag) * (xi * half);
    exp_anti_hermitian(&generator)
}

/// Cavity register preparation `|β, ξ⟩ = D(β)S(ξ)|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedCoherentSpec<T: Real> {
    pub beta: C<T>,
    pub xi: C<T>,
    pub trunc: FockTruncation,
}

impl<T: Real> SqueezedCoherentSpec<T> {
    /// Fails when `|β|² + sinh²|ξ| ≥ n_max/2`.
    pub fn new(beta: C<T>, xi: C<T>, trunc: FockTruncation) -> Result<Self> {
        let spec = Self { beta, xi, trunc };
        let mean = spec.mean_photons().to_f64_lossy();
        if !trunc.admits_mean_photons(mean) {
            return Err(Error::TruncationInadequate(format!(
                "mean photon number {mean:.3} needs n_max > {:.1}, got {}",
                2.0 * mean,
                trunc.n_max()
            )));
        }
        Ok(spec)
    }

    /// `|β|² + sinh²|ξ|`.
    pub fn mean_photons(&self) -> T {
        let s = self.xi.modulus().sinh();
        self.beta.norm_sqr() + s * s
    }

    pub fn with_truncation(&self, trunc: FockTruncation) -> Result<Self> {
        Self::new(self.beta, self.xi, trunc)
    }
}

pub fn squeezed_coherent<T: Real>(spec: &SqueezedCoherentSpec<T>) -> Result<StateVector<T>> {
    let d = spec.trunc.dim();
    let mut vac = StateVector::zeros(d);
    vac[0] = cr(T::one());
    let s = squeeze(spec.xi, spec.trunc)?;
    let dd = displacement(spec.beta, spec.trunc)?;
    let psi = dd * (s * vac);
    let norm = psi.norm();
    Ok(psi.unscale(norm))
}

/// Phase-space rotation by `θ`: `β → βe^{iθ}`, `ξ → ξe^{2iθ}`, so that
/// `e^{iθn̂}|β,ξ⟩ = |βe^{iθ}, ξe^{2iθ}⟩`.
pub fn rotate_gaussian<T: Real>(
    spec: &SqueezedCoherentSpec<T>,
    theta: T,
) -> SqueezedCoherentSpec<T> {
    SqueezedCoherentSpec {
        beta: spec.beta * cis(theta),
        xi: spec.xi * cis(theta + theta),
        trunc: spec.trunc,
    }
}

/// Probability carried by Fock levels `≥ from`.
pub fn tail_mass<T: Real>(psi: &StateVector<T>, from: usize) -> T {
    psi.iter()
        .skip(from)
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Norm distance between `|β,ξ⟩` at `n_max` and at `2·n_max` (the smaller
/// state zero-padded), after removing the relative global phase.
pub fn truncation_convergence<T: Real>(spec: &SqueezedCoherentSpec<T>) -> Result<T> {
    let coarse = squeezed_coherent(spec)?;
    let fine_trunc = FockTruncation::new(2 * spec.trunc.n_max())?;
    let fine = squeezed_coherent(&SqueezedCoherentSpec {
        trunc: fine_trunc,
        ..*spec
    })?;
    let padded = StateVector::from_fn(fine.len(), |i, _| {
        if i < coarse.len() {
            coarse[i]
        } else {
            cr(T::zero())
        }
    });
    Ok(phase_aligned_distance(&padded, &fine))
}

/// `min_φ ‖a − e^{iφ}b‖`.
pub fn phase_aligned_distance<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> T {
    let overlap = b.dotc(a);
    let phase = if overlap.modulus() > T::zero() {
        overlap.unscale(overlap.modulus())
    } else {
        cr(T::one())
    };
    (a - b * phase).norm()
}

pub fn sigma_x<T: Real>() -> ComplexMatrix<T> {
    let (o, z) = (cr(T::one()), cr(T::zero()));
    ComplexMatrix::from_row_slice(2, 2, &[z, o, o, z])
}

pub fn sigma_y<T: Real>() -> ComplexMatrix<T> {
    let z = cr(T::zero());
    let i = c(T::zero(), T::one());
    ComplexMatrix::from_row_slice(2, 2, &[z, -i, i, z])
}

pub fn sigma_z<T: Real>() -> ComplexMatrix<T> {
    let (o, z) = (cr(T::one()), cr(T::zero()));
    ComplexMatrix::from_row_slice(2, 2, &[o, z, z, -o])
}

/// `σ⁺ = (σx + iσy)/2 = |0⟩⟨1|`.
pub fn sigma_plus<T: Real>() -> ComplexMatrix<T> {
    let (o, z) = (cr(T::one()), cr(T::zero()));
    ComplexMatrix::from_row_slice(2, 2, &[z, o, z, z])
}

pub fn sigma_minus<T: Real>() -> ComplexMatrix<T> {
    sigma_plus::<T>().adjoint()
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` at `site` (site 0 leftmost).
pub fn embed_qubit_op<T: Real>(
    op: &ComplexMatrix<T>,
    site: usize,
    n_qubits: usize,
) -> Result<ComplexMatrix<T>> {
    if op.shape() != (2, 2) {
        return Err(Error::DimensionMismatch(format!(
            "single-qubit operator must be 2x2, got {:?}",
            op.shape()
        )));
    }
    if site >= n_qubits {
        return Err(Error::OutOfRange {
            index: site,
            len: n_qubits,
        });
    }
    let factors: Vec<ComplexMatrix<T>> = (0..n_qubits)
        .map(|q| if q == site { op.clone() } else { identity(2) })
        .collect();
    kron_all(&factors)
}

/// Pure state of an `n_qubits` register.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitRegisterState<T: Real> {
    n_qubits: usize,
    amplitudes: StateVector<T>,
}

impl<T: Real> QubitRegisterState<T> {
    pub fn new(amplitudes: StateVector<T>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "register amplitude vector has length {len}, not a power of two"
            )));
        }
        let norm = amplitudes.norm().to_f64_lossy();
        if (norm - 1.0).abs() > 1e3 * T::default_epsilon().to_f64_lossy() {
            return Err(Error::InvalidArgument(format!(
                "register state norm {norm} != 1"
            )));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Computational basis state from a string of `0`/`1` (site 0 first).
    pub fn basis(bits: &str) -> Result<Self> {
        let n = bits.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty basis string".into()));
        }
        let mut index = 0usize;
        for ch in bits.chars() {
            index = index * 2
                + match ch {
                    '0' => 0,
                    '1' => 1,
                    other => {
                        return Err(Error::InvalidArgument(format!(
                            "basis string contains {other:?}"
                        )))
                    }
                };
        }
        let mut amps = StateVector::zeros(1 << n);
        amps[index] = cr(T::one());
        Self::new(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &StateVector<T> {
        &self.amplitudes
    }

    /// `p_jj = |⟨e_j|ψ⟩|²` in the eigenbasis of `eig`.
    pub fn populations(&self, eig: &HermitianEigen<T>) -> Vec<T> {
        eig.eigenvectors
            .ad_mul(&self.amplitudes)
            .iter()
            .map(|z| z.norm_sqr())
            .collect()
    }
}

/// Normalized `Σ_j w_j|e_j⟩` over the eigenvector columns of `eig`.
pub fn eigenstate_superposition<T: Real>(
    eig: &HermitianEigen<T>,
    weights: &[C<T>],
) -> Result<QubitRegisterState<T>> {
    if weights.len() != eig.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for a {}-dimensional eigenbasis",
            weights.len(),
            eig.dim()
        )));
    }
    let w = StateVector::from_column_slice(weights);
    let norm = w.norm();
    if norm <= T::zero() {
        return Err(Error::InvalidArgument("weight vector is zero".into()));
    }
    QubitRegisterState::new(&eig.eigenvectors * w.unscale(norm))
}
