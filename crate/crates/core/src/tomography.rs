//! Wigner functions of cavity states, angular profiles at fixed radius,
//! cyclic peak detection and conversion of rotation angles to energies.
//!
//! `W(α) = (2/π) Tr[D(α) P D(α)† ρ]` with parity `P = (−1)^n̂`. The state is
//! zero-padded into a working Fock space large enough to hold every
//! displaced state on the requested region, and displacements are taken from
//! one cached eigendecomposition of the quadrature `Q = a + a†`:
//! `D(γ) = R(φ) e^{isQ} R(φ)†` for `γ = i s e^{iφ}`. Because `PQP = −Q`
//! holds exactly on any truncation, `e^{−isQ} P e^{isQ} = P e^{2isQ}`, so each
//! sample only needs the low Fock rows of the eigenvectors.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI, TAU};

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{density_eigen, ComplexMatrix, StateVector};
use crate::qstates::{squeezed_coherent, FockTruncation, SqueezedCoherentSpec};
use crate::scalar::{c, cis, Real, C};

pub const DEFAULT_N_THETA: usize = 720;
pub const MIN_N_THETA: usize = 64;
/// Grid half-width beyond `|β|`.
pub const DEFAULT_GRID_MARGIN: f64 = 4.0;
pub const DEFAULT_GRID_STEP: f64 = 0.1;
/// Largest padded working dimension the evaluator will build.
pub const WIGNER_MAX_DIM: usize = 4096;
/// Probability allowed above `M − 5` after the largest displacement.
pub const TAIL_TOLERANCE: f64 = 1e-6;
const TAIL_GUARD_LEVELS: usize = 5;
const TAIL_PROBE_ANGLES: usize = 16;

/// `W(x + iy)` sampled on a rectangular grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid<T: Real> {
    pub re_axis: Vec<T>,
    pub im_axis: Vec<T>,
    /// Row-major with the real-axis index slow: `values[ix * im_axis.len() + iy]`.
    pub values: Vec<T>,
}

impl<T: Real> WignerGrid<T> {
    pub fn get(&self, ix: usize, iy: usize) -> T {
        self.values[ix * self.im_axis.len() + iy]
    }

    /// Midpoint-rule `∫W d²α` assuming uniform axes.
    pub fn integral(&self) -> T {
        let step = |axis: &[T]| {
            if axis.len() < 2 {
                T::zero()
            } else {
                (axis[axis.len() - 1] - axis[0]) / T::lit((axis.len() - 1) as f64)
            }
        };
        let sum = self.values.iter().fold(T::zero(), |a, &v| a + v);
        sum * step(&self.re_axis) * step(&self.im_axis)
    }

    /// Location and value of the largest sample.
    pub fn argmax(&self) -> (C<T>, T) {
        let (k, &v) = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite Wigner values"))
            .expect("non-empty grid");
        let ny = self.im_axis.len();
        (c(self.re_axis[k / ny], self.im_axis[k % ny]), v)
    }
}

/// `W(r e^{iθ})` on a uniform angle grid over `[−π, π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularProfile<T: Real> {
    pub radius: T,
    pub thetas: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> AngularProfile<T> {
    pub fn new(radius: T, values: Vec<T>) -> Self {
        let n = values.len();
        Self {
            radius,
            thetas: uniform_angles(n),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> T {
        T::lit(TAU / self.values.len() as f64)
    }

    /// Cyclic rectangle-rule `∫W dθ`.
    pub fn integral(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a + v) * self.step()
    }
}

/// `θ_i = −π + 2πi/n`.
pub fn uniform_angles<T: Real>(n: usize) -> Vec<T> {
    (0..n)
        .map(|i| T::lit(-PI + TAU * i as f64 / n as f64))
        .collect()
}

/// `[−extent, extent]` sampled with the largest step `≤ step` that lands on both ends.
pub fn symmetric_axis<T: Real>(extent: T, step: T) -> Result<Vec<T>> {
    if !(extent > T::zero()) || !(step > T::zero()) {
        return Err(Error::InvalidArgument(
            "axis extent and step must be positive".into(),
        ));
    }
    let intervals = (extent * T::lit(2.0) / step - T::lit(1e-9))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let h = extent * T::lit(2.0) / T::lit(intervals as f64);
    Ok((0..=intervals)
        .map(|i| -extent + h * T::lit(i as f64))
        .collect())
}

/// Default tomography axis for a cavity amplitude `β`: `±(|β| + 4)` at step 0.1.
pub fn default_axis<T: Real>(beta: C<T>) -> Result<Vec<T>> {
    symmetric_axis(
        beta.modulus() + T::lit(DEFAULT_GRID_MARGIN),
        T::lit(DEFAULT_GRID_STEP),
    )
}

/// Maps an angle into `[−π, π)`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let pi = T::lit(PI);
    let tau = T::lit(TAU);
    let mut x = (theta + pi) % tau;
    if x < T::zero() {
        x += tau;
    }
    let w = x - pi;
    if w >= pi {
        -pi
    } else {
        w
    }
}

/// Padded Fock dimension used for a `d`-level state displaced by up to `max_radius`.
pub fn working_dimension(d: usize, max_radius: f64) -> usize {
    let reach = max_radius + (d.saturating_sub(1) as f64).sqrt();
    ((reach * reach + 9.0 * reach + 20.0).ceil() as usize).max(d + 10)
}

/// Displaced-parity evaluator prepared for `|α| ≤ max_radius`.
pub struct WignerEvaluator<T: Real> {
    weights: Vec<T>,
    factors: Vec<StateVector<T>>,
    /// Transposed even and odd low rows of the quadrature eigenvectors.
    vt_even: DMatrix<T>,
    vt_odd: DMatrix<T>,
    lambda: Vec<T>,
    max_radius: T,
    working_dim: usize,
}

impl<T: Real> WignerEvaluator<T> {
    pub fn new(rho: &ComplexMatrix<T>, max_radius: T) -> Result<Self> {
        if !(max_radius >= T::zero()) {
            return Err(Error::InvalidArgument("radius must be non-negative".into()));
        }
        let dec = density_eigen(rho)?;
        let d = rho.nrows();
        let cutoff = T::lit(T::RANK_CUTOFF);
        let (weights, factors): (Vec<T>, Vec<StateVector<T>>) = dec
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > cutoff)
            .map(|(j, &p)| (p, dec.eigenvectors.column(j).into_owned()))
            .unzip();

        let working_dim = working_dimension(d, max_radius.to_f64_lossy());
        if working_dim > WIGNER_MAX_DIM {
            return Err(Error::TruncationInadequate(format!(
                "displacements up to {:.3} need a working dimension of {working_dim} (limit {WIGNER_MAX_DIM})",
                max_radius.to_f64_lossy()
            )));
        }

        let m = working_dim;
        let q = DMatrix::<T>::from_fn(m, m, |i, j| {
            if j == i + 1 {
                T::lit(j as f64).sqrt()
            } else if i == j + 1 {
                T::lit(i as f64).sqrt()
            } else {
                T::zero()
            }
        });
        let eig = SymmetricEigen::try_new(q, T::default_epsilon(), 1000 * m)
            .ok_or(Error::NoConvergence)?;
        let lambda: Vec<T> = eig.eigenvalues.iter().copied().collect();
        let rows = |parity: usize| {
            let idx: Vec<usize> = (parity..d).step_by(2).collect();
            eig.eigenvectors.select_rows(idx.iter()).transpose()
        };
        let (vt_even, vt_odd) = (rows(0), rows(1));

        let ev = Self {
            weights,
            factors,
            vt_even,
            vt_odd,
            lambda,
            max_radius,
            working_dim,
        };
        ev.check_tail(&eig.eigenvectors)?;
        Ok(ev)
    }

    pub fn working_dim(&self) -> usize {
        self.working_dim
    }

    /// Mixed-state probability above `M − 5` after displacements by `max_radius`.
    fn displaced_tail(&self, v_full: &DMatrix<T>) -> T {
        let m = self.working_dim;
        let from = m - TAIL_GUARD_LEVELS;
        let s = self.max_radius;
        let mut worst = T::zero();
        for j in 0..TAIL_PROBE_ANGLES {
            let phi = T::lit(TAU * j as f64 / TAIL_PROBE_ANGLES as f64);
            let mut tail = T::zero();
            for (p, psi) in self.weights.iter().zip(&self.factors) {
                let (a_re, a_im, _, _) = self.project(psi, phi);
                let phases: Vec<C<T>> = self
                    .lambda
                    .iter()
                    .zip(a_re.iter().zip(a_im.iter()))
                    .map(|(&l, (&re, &im))| cis(s * l) * c(re, im))
                    .collect();
                for n in from..m {
                    let row = v_full.row(n);
                    let amp = row
                        .iter()
                        .zip(&phases)
                        .fold(C::new(T::zero(), T::zero()), |acc, (&v, &z)| acc + z * v);
                    tail += *p * amp.norm_sqr();
                }
            }
            worst = worst.max(tail);
        }
        worst
    }

    fn check_tail(&self, v_full: &DMatrix<T>) -> Result<()> {
        let tail = self.displaced_tail(v_full);
        if tail > T::lit(TAIL_TOLERANCE) {
            return Err(Error::TruncationInadequate(format!(
                "probability {:.3e} above level {} after displacement by {:.3}",
                tail.to_f64_lossy(),
                self.working_dim - TAIL_GUARD_LEVELS,
                self.max_radius.to_f64_lossy()
            )));
        }
        Ok(())
    }

    /// `Vᵀ v` and `Vᵀ P v` restricted to the low rows, with `v = R(φ)† ψ`.
    fn project(
        &self,
        psi: &StateVector<T>,
        phi: T,
    ) -> (DVector<T>, DVector<T>, DVector<T>, DVector<T>) {
        let d = psi.len();
        let (ne, no) = (d.div_ceil(2), d / 2);
        let (mut er, mut ei) = (DVector::zeros(ne), DVector::zeros(ne));
        let (mut or, mut oi) = (DVector::zeros(no), DVector::zeros(no));
        for n in 0..d {
            let z = psi[n] * cis(-phi * T::lit(n as f64));
            if n % 2 == 0 {
                er[n / 2] = z.re;
                ei[n / 2] = z.im;
            } else {
                or[n / 2] = z.re;
                oi[n / 2] = z.im;
            }
        }
        let (er, ei) = (&self.vt_even * er, &self.vt_even * ei);
        let (or, oi) = (&self.vt_odd * or, &self.vt_odd * oi);
        (&er + &or, &ei + &oi, er - or, ei - oi)
    }

    /// `W(α)`.
    pub fn eval(&self, alpha: C<T>) -> Result<T> {
        let gamma = -alpha;
        let s = gamma.modulus();
        if s > self.max_radius * (T::one() + T::lit(1e-12)) {
            return Err(Error::InvalidArgument(format!(
                "|α| = {:.6} exceeds the prepared radius {:.6}",
                s.to_f64_lossy(),
                self.max_radius.to_f64_lossy()
            )));
        }
        let phi = if s > T::zero() {
            gamma.argument() - T::lit(FRAC_PI_2)
        } else {
            T::zero()
        };
        let two_s = s + s;
        let phases: Vec<C<T>> = self.lambda.iter().map(|&l| cis(two_s * l)).collect();
        let mut total = C::new(T::zero(), T::zero());
        for (p, psi) in self.weights.iter().zip(&self.factors) {
            let (a_re, a_im, b_re, b_im) = self.project(psi, phi);
            let mut acc = C::new(T::zero(), T::zero());
            for m in 0..self.lambda.len() {
                let a = c(a_re[m], a_im[m]);
                let b = c(b_re[m], -b_im[m]);
                acc += b * phases[m] * a;
            }
            total += acc * *p;
        }
        let scale = T::lit(FRAC_2_PI);
        let residue = total.im.abs();
        if residue > T::lit(T::HERMITIAN_TOL * 0.1) {
            return Err(Error::ImaginaryResidue {
                residue: residue.to_f64_lossy(),
            });
        }
        Ok(total.re * scale)
    }

    /// `W` at each point, evaluated in parallel.
    pub fn eval_many(&self, points: &[C<T>]) -> Result<Vec<T>> {
        points.par_iter().map(|&a| self.eval(a)).collect()
    }
}

fn check_axis<T: Real>(axis: &[T], name: &str) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} axis is empty")));
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!(
            "{name} axis must be strictly increasing"
        )));
    }
    Ok(())
}

/// Wigner function of a cavity density matrix on `re_axis × im_axis`.
pub fn wigner<T: Real>(
    rho: &ComplexMatrix<T>,
    re_axis: &[T],
    im_axis: &[T],
) -> Result<WignerGrid<T>> {
    check_axis(re_axis, "real")?;
    check_axis(im_axis, "imaginary")?;
    let extent = |axis: &[T]| axis[0].abs().max(axis[axis.len() - 1].abs());
    let xr = extent(re_axis);
    let yr = extent(im_axis);
    let ev = WignerEvaluator::new(rho, (xr * xr + yr * yr).sqrt())?;
    let points: Vec<C<T>> = re_axis
        .iter()
        .flat_map(|&x| im_axis.iter().map(move |&y| c(x, y)))
        .collect();
    Ok(WignerGrid {
        re_axis: re_axis.to_vec(),
        im_axis: im_axis.to_vec(),
        values: ev.eval_many(&points)?,
    })
}

/// Wigner function at arbitrary phase-space points.
pub fn wigner_points<T: Real>(rho: &ComplexMatrix<T>, points: &[C<T>]) -> Result<Vec<T>> {
    let r = points.iter().fold(T::zero(), |a, z| a.max(z.modulus()));
    WignerEvaluator::new(rho, r)?.eval_many(points)
}

/// `W(radius·e^{iθ})` at `n_theta` uniform angles.
pub fn angular_profile<T: Real>(
    rho: &ComplexMatrix<T>,
    radius: T,
    n_theta: usize,
) -> Result<AngularProfile<T>> {
    if !(radius > T::zero()) {
        return Err(Error::InvalidArgument(
            "profile radius must be positive".into(),
        ));
    }
    if n_theta < MIN_N_THETA {
        return Err(Error::InvalidArgument(format!(
            "n_theta = {n_theta} is below the minimum {MIN_N_THETA}"
        )));
    }
    let thetas = uniform_angles::<T>(n_theta);
    let points: Vec<C<T>> = thetas.iter().map(|&t| cis(t) * radius).collect();
    let values = WignerEvaluator::new(rho, radius)?.eval_many(&points)?;
    Ok(AngularProfile {
        radius,
        thetas,
        values,
    })
}

/// Refined local maximum of an angular profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak<T: Real> {
    pub theta: T,
    pub height: T,
    pub prominence: T,
    /// Half-width at half maximum, radians.
    pub half_width: T,
}

/// Cyclic local maxima with prominence `≥ min_prominence`, refined by a
/// parabola through the three samples around each maximum, sorted by angle.
pub fn detect_peaks<T: Real>(
    profile: &AngularProfile<T>,
    min_prominence: T,
) -> Result<Vec<Peak<T>>> {
    if !(min_prominence > T::zero()) {
        return Err(Error::InvalidArgument(
            "min_prominence must be positive".into(),
        ));
    }
    let v = &profile.values;
    let n = v.len();
    if n < 3 {
        return Ok(Vec::new());
    }
    let at = |i: isize| v[i.rem_euclid(n as isize) as usize];
    let step = profile.step();
    let mut peaks = Vec::new();
    for i in 0..n as isize {
        let (l, c0, r) = (at(i - 1), at(i), at(i + 1));
        if !(c0 > l && c0 >= r) {
            continue;
        }
        let prominence = c0 - cyclic_base(v, i as usize);
        if prominence < min_prominence {
            continue;
        }
        let denom = l - c0 - c0 + r;
        let delta = if denom < T::zero() {
            T::lit(0.5) * (l - r) / denom
        } else {
            T::zero()
        };
        let height = c0 - T::lit(0.25) * (l - r) * delta;
        peaks.push(Peak {
            theta: wrap_angle(profile.thetas[i as usize] + delta * step),
            height,
            prominence,
            half_width: half_width(v, i as usize, height, step),
        });
    }
    peaks.sort_by(|a, b| a.theta.partial_cmp(&b.theta).expect("finite angles"));
    Ok(peaks)
}

/// Higher of the two cyclic minima between a peak and the nearest strictly
/// higher sample on each side.
fn cyclic_base<T: Real>(v: &[T], i: usize) -> T {
    let n = v.len();
    let walk = |dir: isize| {
        let mut lo = v[i];
        for k in 1..n {
            let j = (i as isize + dir * k as isize).rem_euclid(n as isize) as usize;
            if v[j] > v[i] {
                break;
            }
            lo = lo.min(v[j]);
        }
        lo
    };
    walk(-1).max(walk(1))
}

fn half_width<T: Real>(v: &[T], i: usize, height: T, step: T) -> T {
    let n = v.len();
    let half = height * T::lit(0.5);
    let walk = |dir: isize| {
        for k in 1..n {
            let j = (i as isize + dir * k as isize).rem_euclid(n as isize) as usize;
            let prev = (i as isize + dir * (k as isize - 1)).rem_euclid(n as isize) as usize;
            if v[j] <= half {
                let frac = if v[prev] > v[j] {
                    (v[prev] - half) / (v[prev] - v[j])
                } else {
                    T::zero()
                };
                return (T::lit((k - 1) as f64) + frac) * step;
            }
        }
        T::lit(PI)
    };
    walk(-1).max(walk(1))
}

/// One recovered spectral component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralComponent<T: Real> {
    pub theta_peak: T,
    /// rad/s, in `(−π/t, π/t]`.
    pub energy: T,
    pub weight: T,
    /// Nearer neighbor closer than three half-widths.
    pub overlapping: bool,
}

/// Eigenenergy and population estimates from one rotation snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate<T: Real> {
    pub components: Vec<SpectralComponent<T>>,
    pub evolution_time: T,
    /// Smallest cyclic angular separation between adjacent peaks.
    pub min_separation: Option<T>,
}

/// Slack allowed on the sum of estimated weights.
pub const WEIGHT_SUM_SLACK: f64 = 0.1;

/// `E_j = −θ_j / t`, `w_j = h_j / reference_height`.
pub fn estimate_spectrum<T: Real>(
    peaks: &[Peak<T>],
    t: T,
    reference_height: T,
) -> Result<SpectralEstimate<T>> {
    if !(t > T::zero()) {
        return Err(Error::InvalidArgument(
            "evolution time must be positive".into(),
        ));
    }
    if !(reference_height > T::zero()) {
        return Err(Error::InvalidArgument(
            "reference height must be positive".into(),
        ));
    }
    let tau = T::lit(TAU);
    let n = peaks.len();
    let gap = |i: usize, j: usize| {
        let d = (peaks[i].theta - peaks[j].theta).abs() % tau;
        d.min(tau - d)
    };
    let mut min_separation: Option<T> = None;
    let mut components = Vec::with_capacity(n);
    for (i, p) in peaks.iter().enumerate() {
        let mut overlapping = false;
        if n > 1 {
            for j in [(i + n - 1) % n, (i + 1) % n] {
                let sep = gap(i, j);
                min_separation = Some(min_separation.map_or(sep, |m: T| m.min(sep)));
                let width = p.half_width.max(peaks[j].half_width);
                if sep < T::lit(3.0) * width {
                    overlapping = true;
                }
            }
        }
        let theta = wrap_angle(p.theta);
        components.push(SpectralComponent {
            theta_peak: theta,
            energy: -theta / t,
            weight: (p.height / reference_height).max(T::zero()).min(T::one()),
            overlapping,
        });
    }
    let total = components.iter().fold(T::zero(), |a, c| a + c.weight);
    if total > T::lit(1.0 + WEIGHT_SUM_SLACK) {
        return Err(Error::InvalidArgument(format!(
            "estimated weights sum to {:.4}",
            total.to_f64_lossy()
        )));
    }
    Ok(SpectralEstimate {
        components,
        evolution_time: t,
        min_separation,
    })
}

/// Angular peak shape of the unrotated cavity state for one squeezing value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingSweepPoint<T: Real> {
    pub xi: T,
    pub peak_height: T,
    pub half_width: T,
}

/// Profile peak height and angular half-width of `|β, ξ⟩` at radius `|β|`
/// for each real `ξ`.
pub fn squeezing_sweep<T: Real>(
    beta: C<T>,
    xis: &[T],
    trunc: FockTruncation,
    n_theta: usize,
) -> Result<Vec<SqueezingSweepPoint<T>>> {
    xis.iter()
        .map(|&xi| {
            let spec = SqueezedCoherentSpec::new(beta, c(xi, T::zero()), trunc)?;
            let rho = crate::linalg::pure_density(&squeezed_coherent(&spec)?);
            let profile = angular_profile(&rho, beta.modulus(), n_theta)?;
            let peak = detect_peaks(&profile, T::lit(1e-6))?
                .into_iter()
                .max_by(|a, b| a.height.partial_cmp(&b.height).expect("finite heights"))
                .ok_or_else(|| Error::InvalidArgument("profile has no peak".into()))?;
            Ok(SqueezingSweepPoint {
                xi,
                peak_height: peak.height,
                half_width: peak.half_width,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pure_density;
    use crate::qstates::rotation;

    type Cx = C<f64>;

    fn vacuum(d: usize) -> ComplexMatrix<f64> {
        let mut v = StateVector::zeros(d);
        v[0] = Cx::new(1.0, 0.0);
        pure_density(&v)
    }

    fn state(beta: f64, xi: f64, n_max: usize) -> ComplexMatrix<f64> {
        let s = SqueezedCoherentSpec::new(
            Cx::new(beta, 0.0),
            Cx::new(xi, 0.0),
            FockTruncation::new(n_max).unwrap(),
        )
        .unwrap();
        pure_density(&squeezed_coherent(&s).unwrap())
    }

    #[test]
    fn vacuum_peak_value() {
        let w = wigner_points(&vacuum(41), &[Cx::new(0.0, 0.0)]).unwrap();
        assert!((w[0] - FRAC_2_PI).abs() < 1e-12);
    }

    #[test]
    fn vacuum_is_gaussian() {
        let pts = [Cx::new(0.5, 0.0), Cx::new(0.3, -0.4), Cx::new(1.0, 1.0)];
        let w = wigner_points(&vacuum(41), &pts).unwrap();
        for (z, v) in pts.iter().zip(w) {
            assert!((v - FRAC_2_PI * (-2.0 * z.norm_sqr()).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn fock_one_is_negative_at_origin() {
        let mut v = StateVector::zeros(41);
        v[1] = Cx::new(1.0, 0.0);
        let w = wigner_points(&pure_density(&v), &[Cx::new(0.0, 0.0)]).unwrap();
        assert!((w[0] + FRAC_2_PI).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_maximum() {
        let rho = state(1.8, 0.0, 40);
        let axis = symmetric_axis(3.0, 0.1).unwrap();
        let g = wigner(&rho, &axis, &axis).unwrap();
        let (at, v) = g.argmax();
        assert!((at - Cx::new(1.8, 0.0)).norm() < 1e-9);
        assert!((v - FRAC_2_PI).abs() < 1e-4);
    }

    #[test]
    fn normalization_on_default_grid() {
        let rho = state(1.8, -0.4, 40);
        let axis = default_axis(Cx::new(1.8, 0.0)).unwrap();
        assert_eq!(axis.len(), 117);
        let g = wigner(&rho, &axis, &axis).unwrap();
        assert!((g.integral() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn global_phase_invariance() {
        let s = SqueezedCoherentSpec::new(
            Cx::new(1.2, 0.4),
            Cx::new(-0.3, 0.1),
            FockTruncation::new(30).unwrap(),
        )
        .unwrap();
        let psi = squeezed_coherent(&s).unwrap();
        let pts = [Cx::new(1.0, 0.5), Cx::new(-0.7, 0.2), Cx::new(0.0, -1.5)];
        let a = wigner_points(&pure_density(&psi), &pts).unwrap();
        let b = wigner_points(&pure_density(&(psi * cis(2.1))), &pts).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_covariance() {
        let rho = state(1.8, -0.4, 40);
        let trunc = FockTruncation::new(40).unwrap();
        let theta = 0.7;
        let r = rotation::<f64>(theta, trunc);
        let rotated = &r * &rho * r.adjoint();
        let axis = symmetric_axis(3.0, 0.25).unwrap();
        let pts: Vec<Cx> = axis
            .iter()
            .flat_map(|&x| axis.iter().map(move |&y| Cx::new(x, y)))
            .collect();
        let back: Vec<Cx> = pts.iter().map(|z| z * cis(-theta)).collect();
        let a = wigner_points(&rotated, &pts).unwrap();
        let b = wigner_points(&rho, &back).unwrap();
        let dev = a
            .iter()
            .zip(&b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(dev < 1e-8, "{dev}");
    }

    #[test]
    fn oversized_displacement_is_rejected() {
        assert!(matches!(
            WignerEvaluator::new(&vacuum(41), 80.0),
            Err(Error::TruncationInadequate(_))
        ));
        let ev = WignerEvaluator::new(&vacuum(5), 1.0).unwrap();
        assert!(ev.eval(Cx::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn initial_profile_has_single_peak_at_zero() {
        let rho = state(1.8, -0.4, 40);
        let p = angular_profile(&rho, 1.8, 720).unwrap();
        let peaks = detect_peaks(&p, 1e-3).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].theta.abs() < 1e-3);
        assert!((peaks[0].height - FRAC_2_PI).abs() < 1e-4);
        assert!(p.integral() > 0.0);
    }

    #[test]
    fn fock_diagonal_profile_is_flat() {
        let d = 41;
        let rho = ComplexMatrix::from_diagonal(&DVector::from_fn(d, |i, _| {
            Cx::new(if i < 4 { 0.25 } else { 0.0 }, 0.0)
        }));
        let p = angular_profile(&rho, 1.2, 128).unwrap();
        let v0 = p.values[0];
        assert!(p.values.iter().all(|v| (v - v0).abs() < 1e-9));
        assert!(detect_peaks(&p, 1e-6).unwrap().is_empty());
    }

    #[test]
    fn profile_argument_checks() {
        assert!(angular_profile(&vacuum(5), 0.0, 128).is_err());
        assert!(angular_profile(&vacuum(5), 1.0, 32).is_err());
    }

    fn von_mises(centers: &[(f64, f64)], kappa: f64, n: usize) -> AngularProfile<f64> {
        let values = uniform_angles::<f64>(n)
            .iter()
            .map(|&t| {
                centers
                    .iter()
                    .map(|&(c0, h)| h * (kappa * ((t - c0).cos() - 1.0)).exp())
                    .sum()
            })
            .collect();
        AngularProfile::new(1.0, values)
    }

    #[test]
    fn synthetic_three_peaks() {
        let n = 720;
        let p = von_mises(&[(-1.0, 1.0), (0.0, 2.0), (1.0, 1.0)], 50.0, n);
        let peaks = detect_peaks(&p, 0.05).unwrap();
        assert_eq!(peaks.len(), 3);
        let res = TAU / n as f64;
        for (pk, want) in peaks.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((pk.theta - want).abs() < res);
        }
        assert!(peaks[1].height > peaks[0].height && peaks[1].height > peaks[2].height);
    }

    #[test]
    fn peak_across_the_wrap() {
        let p = von_mises(&[(PI, 1.0)], 50.0, 257);
        let peaks = detect_peaks(&p, 0.05).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].theta.abs() - PI).abs() < TAU / 257.0);
    }

    #[test]
    fn flat_profile_has_no_peaks() {
        let p = AngularProfile::new(1.0, vec![0.3; 128]);
        assert!(detect_peaks(&p, 1e-9).unwrap().is_empty());
        assert!(detect_peaks(&p, 0.0).is_err());
    }

    #[test]
    fn wrap_angle_range() {
        for x in [-7.0, -PI, -1.0, 0.0, PI, 3.5, 12.0] {
            let w = wrap_angle(x);
            assert!((-PI..PI).contains(&w));
            assert!(((x - w) / TAU - ((x - w) / TAU).round()).abs() < 1e-12);
        }
    }

    #[test]
    fn estimate_conversion() {
        let pk = |theta: f64, height: f64| Peak {
            theta,
            height,
            prominence: height,
            half_width: 0.1,
        };
        let est = estimate_spectrum(&[pk(0.0, 0.5)], 3.0, 1.0).unwrap();
        assert_eq!(est.components[0].energy, 0.0);
        let est =
            estimate_spectrum(&[pk(-0.5, 0.25), pk(0.0, 0.5), pk(0.5, 0.25)], 2.0, 1.0).unwrap();
        let e: Vec<f64> = est.components.iter().map(|c| c.energy).collect();
        assert_eq!(e, vec![0.25, 0.0, -0.25]);
        assert!(est.components.iter().all(|c| !c.overlapping));
        assert!((est.min_separation.unwrap() - 0.5).abs() < 1e-15);
        // θ = −π maps to the closed end of the alias window.
        let est = estimate_spectrum(&[pk(-PI, 0.2)], 1.0, 1.0).unwrap();
        assert!((est.components[0].energy - PI).abs() < 1e-15);
        assert!(estimate_spectrum(&[pk(0.0, 1.0), pk(1.0, 1.0)], 1.0, 1.0).is_err());
        assert!(
            estimate_spectrum(&[pk(0.0, 1.0), pk(0.2, 0.1)], 1.0, 1.0)
                .unwrap()
                .components[0]
                .overlapping
        );
        assert!(estimate_spectrum(&[], 0.0, 1.0).is_err());
    }

    #[test]
    fn sweep_narrows_with_phase_squeezing() {
        let pts = squeezing_sweep(
            Cx::new(1.8, 0.0),
            &[0.0, -0.4],
            FockTruncation::new(30).unwrap(),
            360,
        )
        .unwrap();
        assert!(pts[1].half_width < pts[0].half_width);
    }
}
