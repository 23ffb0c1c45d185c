//! Dense complex linear algebra on composite Hilbert spaces.
//!
//! Matrices are `nalgebra::DMatrix<Complex<T>>` (column-major storage).
//! Composite indices are big-endian: for a space with dims `[d0, d1, ...]`
//! subsystem 0 is the most significant digit, which matches `kron(a, b)`
//! placing `a` on the slow index.
//!
//! Energies are angular frequencies (rad/s) and times are seconds, with
//! ħ = 1 everywhere inside the crate.

use std::collections::BTreeMap;

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::scalar::{cis, cr, Real, C};

pub type ComplexMatrix<T> = DMatrix<C<T>>;
pub type StateVector<T> = DVector<C<T>>;

/// Largest total dimension `kron` will produce before reporting a runaway truncation.
pub const MAX_TOTAL_DIM: usize = 8192;

/// Ordered list of subsystem dimensions. Cavity first, qubits after.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CompositeSpace {
    dims: Vec<usize>,
}

impl CompositeSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSubsystems("empty dimension list".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidSubsystems(format!(
                "subsystem dimension {d} < 2"
            )));
        }
        Ok(Self { dims })
    }

    /// Cavity with `cavity_dim` levels followed by `n_qubits` two-level systems.
    pub fn cavity_qubits(cavity_dim: usize, n_qubits: usize) -> Result<Self> {
        let mut dims = vec![cavity_dim];
        dims.extend(std::iter::repeat_n(2, n_qubits));
        Self::new(dims)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Subspace spanned by the (sorted, deduplicated) `keep` subsystems.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let keep = self.normalize_keep(keep)?;
        Self::new(keep.iter().map(|&k| self.dims[k]).collect())
    }

    fn normalize_keep(&self, keep: &[usize]) -> Result<Vec<usize>> {
        if keep.is_empty() {
            return Err(Error::InvalidSubsystems("empty keep set".into()));
        }
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&k) = keep.iter().find(|&&k| k >= self.dims.len()) {
            return Err(Error::InvalidSubsystems(format!(
                "subsystem {k} does not exist in a {}-part space",
                self.dims.len()
            )));
        }
        Ok(keep)
    }

    /// Flat offsets of the kept and traced digit combinations.
    fn split_offsets(&self, keep: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let n = self.dims.len();
        let mut strides = vec![1usize; n];
        for s in (0..n.saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * self.dims[s + 1];
        }
        let strides = &strides;
        let offsets = |subs: Vec<usize>| -> Vec<usize> {
            let mut out = vec![0usize];
            for s in subs {
                out = out
                    .iter()
                    .flat_map(|&base| (0..self.dims[s]).map(move |d| base + d * strides[s]))
                    .collect();
            }
            out
        };
        let traced: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
        (offsets(keep.to_vec()), offsets(traced))
    }
}

pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    kron_with_limit(a, b, MAX_TOTAL_DIM)
}

pub fn kron_with_limit<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    limit: usize,
) -> Result<ComplexMatrix<T>> {
    let rows = a.nrows() * b.nrows();
    let cols = a.ncols() * b.ncols();
    if rows.max(cols) > limit {
        return Err(Error::DimensionOverflow {
            requested: rows.max(cols),
            limit,
        });
    }
    Ok(a.kronecker(b))
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<T: Real>(factors: &[ComplexMatrix<T>]) -> Result<ComplexMatrix<T>> {
    let mut iter = factors.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidArgument("kron of an empty factor list".into()))?
        .clone();
    iter.try_fold(first, |acc, f| kron(&acc, f))
}

pub fn identity<T: Real>(n: usize) -> ComplexMatrix<T> {
    ComplexMatrix::identity(n, n)
}

pub fn max_abs<T: Real>(m: &ComplexMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

pub fn hermiticity_deviation<T: Real>(h: &ComplexMatrix<T>) -> T {
    max_abs(&(h - h.adjoint()))
}

/// `‖U†U − I‖_max`.
pub fn unitarity_deviation<T: Real>(u: &ComplexMatrix<T>) -> T {
    let n = u.ncols();
    max_abs(&(u.adjoint() * u - identity::<T>(n)))
}

pub fn commutator<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a * b - b * a
}

pub fn trace<T: Real>(m: &ComplexMatrix<T>) -> C<T> {
    m.diagonal()
        .iter()
        .fold(C::new(T::zero(), T::zero()), |acc, &z| acc + z)
}

/// `|ψ⟩⟨ψ|`.
pub fn pure_density<T: Real>(psi: &StateVector<T>) -> ComplexMatrix<T> {
    psi * psi.adjoint()
}

fn check_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = max_abs(h);
    let dev = hermiticity_deviation(h);
    if dev > T::lit(T::HERMITIAN_TOL) * scale {
        return Err(Error::NotHermitian {
            deviation: dev.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Traces out every subsystem not in `keep`. The result is ordered by ascending subsystem index.
pub fn partial_trace<T: Real>(
    rho: &ComplexMatrix<T>,
    space: &CompositeSpace,
    keep: &[usize],
) -> Result<ComplexMatrix<T>> {
    let n = space.total_dim();
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "density matrix is {}x{}, space dimension is {n}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let keep = space.normalize_keep(keep)?;
    let (kept, traced) = space.split_offsets(&keep);
    let dk = kept.len();
    Ok(ComplexMatrix::from_fn(dk, dk, |i, j| {
        traced.iter().fold(C::new(T::zero(), T::zero()), |acc, &t| {
            acc + rho[(kept[i] + t, kept[j] + t)]
        })
    }))
}

/// Partial trace of the pure state `|ψ⟩⟨ψ|` without forming the full density matrix.
pub fn partial_trace_pure<T: Real>(
    psi: &StateVector<T>,
    space: &CompositeSpace,
    keep: &[usize],
) -> Result<ComplexMatrix<T>> {
    let n = space.total_dim();
    if psi.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "state has length {}, space dimension is {n}",
            psi.len()
        )));
    }
    let keep = space.normalize_keep(keep)?;
    let (kept, traced) = space.split_offsets(&keep);
    // Rows: kept index, columns: traced index. rho = A A†.
    let a = ComplexMatrix::from_fn(kept.len(), traced.len(), |i, t| psi[kept[i] + traced[t]]);
    Ok(&a * a.adjoint())
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub eigenvalues: Vec<T>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.spectral_map(|e| cr(e))
    }

    /// `V f(Λ) V†`.
    pub fn spectral_map(&self, f: impl Fn(T) -> C<T>) -> ComplexMatrix<T> {
        let mut scaled = self.eigenvectors.clone();
        for (j, &e) in self.eigenvalues.iter().enumerate() {
            let fe = f(e);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= fe;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `e^{−iHt}` (ħ = 1).
    pub fn propagator(&self, t: T) -> ComplexMatrix<T> {
        self.spectral_map(|e| cis(-e * t))
    }

    /// `e^{−iHt}|ψ⟩` in O(dim²), reusing the decomposition.
    pub fn evolve(&self, psi: &StateVector<T>, t: T) -> StateVector<T> {
        let mut coeffs = self.eigenvectors.ad_mul(psi);
        for (j, &e) in self.eigenvalues.iter().enumerate() {
            coeffs[j] *= cis(-e * t);
        }
        &self.eigenvectors * coeffs
    }
}

fn eig_unchecked<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let n = h.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    if n == 1 {
        return Ok(HermitianEigen {
            eigenvalues: vec![h[(0, 0)].re],
            eigenvectors: identity(1),
        });
    }
    let sym = (h + h.adjoint()).unscale(T::lit(2.0));
    let max_iter = 1000 * n.max(10);
    let dec =
        SymmetricEigen::try_new(sym, T::default_epsilon(), max_iter).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        dec.eigenvalues[i]
            .partial_cmp(&dec.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| dec.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

pub fn eig_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    check_hermitian(h)?;
    eig_unchecked(h)
}

/// Eigendecomposition of a Hermitian matrix that is block diagonal in the
/// sectors labelled by `labels` (one label per basis state, e.g. a conserved
/// excitation number). Each block is diagonalized separately.
pub fn eig_hermitian_sectors<T: Real>(
    h: &ComplexMatrix<T>,
    labels: &[i64],
) -> Result<HermitianEigen<T>> {
    check_hermitian(h)?;
    let n = h.nrows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} sector labels for a {n}-dimensional matrix",
            labels.len()
        )));
    }
    let tol = T::lit(T::HERMITIAN_TOL) * max_abs(h);
    for j in 0..n {
        for i in 0..n {
            if labels[i] != labels[j] && h[(i, j)].modulus() > tol {
                return Err(Error::InvalidArgument(format!(
                    "matrix couples sectors {} and {} (element ({i},{j}))",
                    labels[i], labels[j]
                )));
            }
        }
    }
    let mut sectors: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        sectors.entry(l).or_default().push(i);
    }
    let mut pairs: Vec<(T, StateVector<T>)> = Vec::with_capacity(n);
    for idx in sectors.values() {
        let block = ComplexMatrix::from_fn(idx.len(), idx.len(), |r, c| h[(idx[r], idx[c])]);
        let dec = eig_unchecked(&block)?;
        for (k, &e) in dec.eigenvalues.iter().enumerate() {
            let mut v = StateVector::zeros(n);
            for (r, &i) in idx.iter().enumerate() {
                v[i] = dec.eigenvectors[(r, k)];
            }
            pairs.push((e, v));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<StateVector<T>> = pairs.into_iter().map(|p| p.1).collect();
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_columns(&cols),
    })
}

/// `V·exp(−iΛt)·V†`.
pub fn propagator<T: Real>(eig: &HermitianEigen<T>, t: T) -> ComplexMatrix<T> {
    eig.propagator(t)
}

/// `exp(G)` for an anti-Hermitian generator `G`, through the Hermitian matrix `iG`.
pub fn exp_anti_hermitian<T: Real>(generator: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let h = generator * C::new(T::zero(), T::one());
    Ok(eig_hermitian(&h)?.propagator(T::one()))
}

/// Checks the density-matrix gate and returns its (clipped) spectral decomposition.
pub fn density_eigen<T: Real>(rho: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    check_hermitian(rho).map_err(|e| Error::InvalidDensityMatrix(e.to_string()))?;
    let tr = trace(rho);
    if (tr.re - T::one()).abs() > T::lit(T::TRACE_TOL) || tr.im.abs() > T::lit(T::TRACE_TOL) {
        return Err(Error::InvalidDensityMatrix(format!(
            "trace {:.3e}{:+.3e}i differs from 1",
            tr.re.to_f64_lossy(),
            tr.im.to_f64_lossy()
        )));
    }
    let mut dec = eig_unchecked(rho)?;
    let floor = T::lit(T::EIGEN_FLOOR);
    if let Some(&lo) = dec.eigenvalues.first() {
        if lo < floor {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {:.3e}",
                lo.to_f64_lossy()
            )));
        }
    }
    for e in dec.eigenvalues.iter_mut() {
        if *e < T::zero() {
            *e = T::zero();
        }
    }
    Ok(dec)
}

pub fn validate_density<T: Real>(rho: &ComplexMatrix<T>) -> Result<()> {
    density_eigen(rho).map(|_| ())
}

/// Support of a density matrix: `(√p_i, |u_i⟩)` for eigenvalues above the rank cutoff.
fn sqrt_factor<T: Real>(rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let dec = density_eigen(rho)?;
    let cutoff = T::lit(T::RANK_CUTOFF);
    let cols: Vec<StateVector<T>> = dec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > cutoff)
        .map(|(j, &p)| dec.eigenvectors.column(j) * cr(p.sqrt()))
        .collect();
    if cols.is_empty() {
        return Err(Error::InvalidDensityMatrix(
            "no support above rank cutoff".into(),
        ));
    }
    Ok(ComplexMatrix::from_columns(&cols))
}

/// Uhlmann fidelity `F(ρ,σ) = (Tr√(√ρ σ √ρ))²`.
///
/// Evaluated as the squared nuclear norm of `√ρ√σ`, restricted to the
/// supports of both states; the singular values of that product are the
/// square roots of the eigenvalues of `√ρ σ √ρ`, so no eigenvalue of the
/// inner product ever has to be square-rooted. Eigenvalues of each state
/// below the rank cutoff are dropped.
pub fn uhlmann_fidelity<T: Real>(rho: &ComplexMatrix<T>, sigma: &ComplexMatrix<T>) -> Result<T> {
    if rho.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            rho.shape(),
            sigma.shape()
        )));
    }
    let a = sqrt_factor(rho)?;
    let b = sqrt_factor(sigma)?;
    let overlap = a.ad_mul(&b);
    let sv = SVD::try_new(overlap, false, false, T::default_epsilon(), 0)
        .ok_or(Error::NoConvergence)?
        .singular_values;
    let nuclear = sv.iter().fold(T::zero(), |acc, &s| acc + s);
    Ok((nuclear * nuclear).min(T::one()).max(T::zero()))
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance<T: Real>(rho: &ComplexMatrix<T>, sigma: &ComplexMatrix<T>) -> Result<T> {
    if rho.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            rho.shape(),
            sigma.shape()
        )));
    }
    let diff = rho - sigma;
    check_hermitian(&diff)?;
    let dec = eig_unchecked(&diff)?;
    Ok(dec
        .eigenvalues
        .iter()
        .fold(T::zero(), |acc, e| acc + e.abs())
        / T::lit(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix<f64> {
        ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
    }

    fn pauli_z() -> ComplexMatrix<f64> {
        ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c64(1., 0.), c64(-1., 0.)]))
    }

    #[test]
    fn kron_identities() {
        let i6 = kron(&identity::<f64>(2), &identity(3)).unwrap();
        assert_eq!(i6, identity(6));
        let zi = kron(&pauli_z(), &identity(2)).unwrap();
        let expected = ComplexMatrix::from_diagonal(&DVector::from_vec(
            [1., 1., -1., -1.].iter().map(|&x| c64(x, 0.)).collect(),
        ));
        assert_eq!(zi, expected);
    }

    #[test]
    fn kron_rejects_runaway_dimension() {
        let a = identity::<f64>(100);
        let err = kron_with_limit(&a, &a, 1000).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionOverflow {
                requested: 10000,
                limit: 1000
            }
        ));
    }

    #[test]
    fn number_kron_sigma_z_spectrum() {
        // n̂ on {0,1,2} ⊗ σz: direct 6x6 diagonal, eigenvalues {0,0,1,-1,2,-2}.
        let n = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![
            c64(0., 0.),
            c64(1., 0.),
            c64(2., 0.),
        ]));
        let m = kron(&n, &pauli_z()).unwrap();
        let eig = eig_hermitian(&m).unwrap();
        let expected = [-2.0, -1.0, 0.0, 0.0, 1.0, 2.0];
        for (e, x) in eig.eigenvalues.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_x_spectrum() {
        let eig = eig_hermitian(&pauli_x()).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(unitarity_deviation(&eig.eigenvectors) < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = pauli_x();
        m[(0, 1)] = c64(2.0, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn propagator_zero_time_and_pi() {
        let eig = eig_hermitian(&pauli_z()).unwrap();
        let u0 = propagator(&eig, 0.0);
        assert!(max_abs(&(u0 - identity(2))) < 1e-15);
        let upi = propagator(&eig, std::f64::consts::PI);
        assert!(max_abs(&(upi + identity::<f64>(2))) < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_inputs() {
        let space = CompositeSpace::new(vec![2, 2]).unwrap();
        let rho = identity::<f64>(3);
        assert!(matches!(
            partial_trace(&rho, &space, &[0]),
            Err(Error::DimensionMismatch(_))
        ));
        let rho = identity::<f64>(4);
        assert!(matches!(
            partial_trace(&rho, &space, &[]),
            Err(Error::InvalidSubsystems(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &space, &[2]),
            Err(Error::InvalidSubsystems(_))
        ));
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::from_vec(vec![c64(s, 0.), c64(0., 0.), c64(0., 0.), c64(s, 0.)]);
        let space = CompositeSpace::new(vec![2, 2]).unwrap();
        let red = partial_trace(&pure_density(&psi), &space, &[0]).unwrap();
        assert!(max_abs(&(red - identity::<f64>(2) * c64(0.5, 0.))) < 1e-15);
        let red2 = partial_trace_pure(&psi, &space, &[1]).unwrap();
        assert!(max_abs(&(red2 - identity::<f64>(2) * c64(0.5, 0.))) < 1e-15);
    }

    #[test]
    fn keep_all_is_identity_map() {
        let space = CompositeSpace::new(vec![3, 2]).unwrap();
        let rho = ComplexMatrix::from_fn(6, 6, |i, j| c64((i * 6 + j) as f64, 0.0));
        let same = partial_trace(&rho, &space, &[1, 0]).unwrap();
        assert_eq!(same, rho);
    }

    #[test]
    fn density_gate() {
        let bad_trace = identity::<f64>(2);
        assert!(matches!(
            uhlmann_fidelity(&bad_trace, &bad_trace),
            Err(Error::InvalidDensityMatrix(_))
        ));
        let neg =
            ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c64(1.1, 0.), c64(-0.1, 0.)]));
        assert!(matches!(
            validate_density(&neg),
            Err(Error::InvalidDensityMatrix(_))
        ));
        // Tiny negative eigenvalues from truncation noise pass and get clipped.
        let noisy = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![
            c64(1.0 + 1e-11, 0.),
            c64(-1e-11, 0.),
        ]));
        assert!(validate_density(&noisy).is_ok());
    }

    #[test]
    fn fidelity_orthogonal_and_self() {
        let up = StateVector::from_vec(vec![c64(1., 0.), c64(0., 0.)]);
        let down = StateVector::from_vec(vec![c64(0., 0.), c64(1., 0.)]);
        let f = uhlmann_fidelity(&pure_density(&up), &pure_density(&down)).unwrap();
        assert!(f.abs() < 1e-15);
        let mixed = identity::<f64>(2) * c64(0.5, 0.);
        assert!((uhlmann_fidelity(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-14);
        assert!((uhlmann_fidelity(&pure_density(&up), &mixed).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn sector_eigen_matches_dense() {
        // Block-diagonal 4x4 with sectors {0,3} and {1,2}.
        let mut h = ComplexMatrix::<f64>::zeros(4, 4);
        h[(0, 0)] = c64(1.0, 0.);
        h[(3, 3)] = c64(-1.0, 0.);
        h[(0, 3)] = c64(0.3, 0.2);
        h[(3, 0)] = c64(0.3, -0.2);
        h[(1, 2)] = c64(0.0, 0.7);
        h[(2, 1)] = c64(0.0, -0.7);
        h[(1, 1)] = c64(0.25, 0.);
        let blocked = eig_hermitian_sectors(&h, &[0, 1, 1, 0]).unwrap();
        let dense = eig_hermitian(&h).unwrap();
        for (a, b) in blocked.eigenvalues.iter().zip(&dense.eigenvalues) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(max_abs(&(blocked.reconstruct() - &h)) < 1e-13);
        assert!(eig_hermitian_sectors(&h, &[0, 0, 1, 1]).is_err());
    }

    #[test]
    fn single_precision_runs() {
        let h = ComplexMatrix::<f32>::from_row_slice(
            2,
            2,
            &[
                C::new(0., 0.),
                C::new(1., 0.),
                C::new(1., 0.),
                C::new(0., 0.),
            ],
        );
        let eig = eig_hermitian(&h).unwrap();
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-6);
        assert!(unitarity_deviation(&eig.propagator(0.3)) < 1e-5);
    }
}
