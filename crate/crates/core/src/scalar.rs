//! Scalar abstraction shared by every numerical module.

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point type the simulator can run on (`f32` or `f64`).
///
/// Validity gates scale with the precision of the type: the `f64` values
/// are the documented contract, `f32` gets proportionally looser ones so
/// that the same code paths stay usable for quick single-precision runs.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + std::fmt::Debug + 'static
{
    /// Relative tolerance of the Hermiticity gate.
    const HERMITIAN_TOL: f64;
    /// Absolute tolerance on the trace of a density matrix.
    const TRACE_TOL: f64;
    /// Smallest eigenvalue accepted for a density matrix before it is rejected.
    const EIGEN_FLOOR: f64;
    /// Eigenvalues of a density matrix below this are treated as exact zeros.
    const RANK_CUTOFF: f64;

    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const HERMITIAN_TOL: f64 = 1e-9;
    const TRACE_TOL: f64 = 1e-9;
    const EIGEN_FLOOR: f64 = -1e-10;
    const RANK_CUTOFF: f64 = 1e-13;
}

impl Real for f32 {
    const HERMITIAN_TOL: f64 = 1e-4;
    const TRACE_TOL: f64 = 1e-4;
    const EIGEN_FLOOR: f64 = -1e-5;
    const RANK_CUTOFF: f64 = 1e-6;
}

/// Complex number over `T`.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> C<T> {
    Complex::new(theta.cos(), theta.sin())
}
