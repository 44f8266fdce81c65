// SPDX-License-Identifier: Apache-2.0

//! Gaussian states of one particle and Gaussian probability measures on the
//! line and the plane.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{finite, Error, Result};

/// Physical constants. Only `ħ` enters the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub hbar: f64,
}

impl Constants {
    pub fn new(hbar: f64) -> Result<Self> {
        if !(finite("hbar", hbar)? > 0.0) {
            return Err(Error::OutOfRange { name: "hbar", value: hbar, range: "(0, inf)" });
        }
        Ok(Self { hbar })
    }

    /// `ħ/2`, the Kennard lower bound on `σ(Q)σ(P)`.
    pub fn kennard(&self) -> f64 {
        0.5 * self.hbar
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self { hbar: 1.0 }
    }
}

/// Relative slack when checking `σ_q σ_p ≥ ħ/2`; states built from `ħ/(2σ)`
/// land within a few ulps of the bound.
const KENNARD_SLACK: f64 = 1e-12;

/// An uncorrelated Gaussian state of one particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianState {
    pub mean_q: f64,
    pub mean_p: f64,
    pub sigma_q: f64,
    pub sigma_p: f64,
}

impl GaussianState {
    pub fn new(mean_q: f64, mean_p: f64, sigma_q: f64, sigma_p: f64, consts: &Constants) -> Result<Self> {
        finite("mean_q", mean_q)?;
        finite("mean_p", mean_p)?;
        finite("sigma_q", sigma_q)?;
        finite("sigma_p", sigma_p)?;
        if sigma_q <= 0.0 || sigma_p <= 0.0 {
            return Err(Error::InvalidState(format!(
                "spreads must be positive (sigma_q = {sigma_q}, sigma_p = {sigma_p})"
            )));
        }
        if sigma_q * sigma_p < consts.kennard() * (1.0 - KENNARD_SLACK) {
            return Err(Error::InvalidState(format!(
                "sigma_q * sigma_p = {} is below hbar/2 = {}",
                sigma_q * sigma_p,
                consts.kennard()
            )));
        }
        Ok(Self { mean_q, mean_p, sigma_q, sigma_p })
    }

    /// The minimum uncertainty state with position spread `sigma_q` and
    /// momentum spread `ħ/(2 sigma_q)`.
    pub fn minimum_uncertainty(mean_q: f64, mean_p: f64, sigma_q: f64, consts: &Constants) -> Result<Self> {
        Self::new(mean_q, mean_p, sigma_q, consts.kennard() / sigma_q, consts)
    }

    pub fn is_minimum_uncertainty(&self, consts: &Constants, rel_tol: f64) -> bool {
        (self.sigma_q * self.sigma_p - consts.kennard()).abs() <= rel_tol * consts.kennard()
    }

    pub fn variance_q(&self) -> f64 {
        self.sigma_q * self.sigma_q
    }

    pub fn variance_p(&self) -> f64 {
        self.sigma_p * self.sigma_p
    }
}

/// A normal distribution on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gaussian1D {
    pub mean: f64,
    pub variance: f64,
}

impl Gaussian1D {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        finite("mean", mean)?;
        if !(finite("variance", variance)? >= 0.0) {
            return Err(Error::OutOfRange { name: "variance", value: variance, range: "[0, inf)" });
        }
        Ok(Self { mean, variance })
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if self.variance <= 0.0 {
            return Err(Error::DegenerateVariance);
        }
        let z = x - self.mean;
        Ok((-0.5 * z * z / self.variance).exp() / (2.0 * PI * self.variance).sqrt())
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        if self.variance <= 0.0 {
            return Err(Error::DegenerateVariance);
        }
        let z = x - self.mean;
        Ok(-0.5 * z * z / self.variance - 0.5 * (2.0 * PI * self.variance).ln())
    }

    /// Probability of `[lower, upper]`; either end may be infinite.
    ///
    /// Uses complementary error functions on the side away from the mean so
    /// tail masses keep full relative precision.
    pub fn interval_mass(&self, lower: f64, upper: f64) -> f64 {
        if lower >= upper {
            return 0.0;
        }
        if self.variance == 0.0 {
            return if lower <= self.mean && self.mean <= upper { 1.0 } else { 0.0 };
        }
        let s = self.std_dev();
        let zl = (lower - self.mean) / s * FRAC_1_SQRT_2;
        let zu = (upper - self.mean) / s * FRAC_1_SQRT_2;
        if zl >= 0.0 {
            0.5 * (libm::erfc(zl) - libm::erfc(zu))
        } else if zu <= 0.0 {
            0.5 * (libm::erfc(-zu) - libm::erfc(-zl))
        } else {
            1.0 - 0.5 * (libm::erfc(-zl) + libm::erfc(zu))
        }
    }
}

/// Density of `g` at `x`. Errors for a point mass.
pub fn pdf1(g: &Gaussian1D, x: f64) -> Result<f64> {
    g.pdf(x)
}

/// A bivariate normal distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gaussian2D {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

/// Eigenvalues below `-PSD_TOL·trace` are rejected; those in between are
/// clamped to zero.
const PSD_TOL: f64 = 1e-12;

/// Rotation angle and eigenvalues of a symmetric 2×2 matrix, `V = R Λ Rᵀ`.
fn sym_eigen(v: &[[f64; 2]; 2]) -> (f64, [f64; 2]) {
    let theta = 0.5 * (2.0 * v[0][1]).atan2(v[0][0] - v[1][1]);
    let (s, c) = theta.sin_cos();
    let l1 = v[0][0] * c * c + 2.0 * v[0][1] * s * c + v[1][1] * s * s;
    let l2 = v[0][0] * s * s - 2.0 * v[0][1] * s * c + v[1][1] * c * c;
    (theta, [l1, l2])
}

impl Gaussian2D {
    pub fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        for &x in mean.iter().chain(cov.iter().flatten()) {
            finite("Gaussian2D entry", x)?;
        }
        let scale = cov[0][0].abs() + cov[1][1].abs();
        if (cov[0][1] - cov[1][0]).abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Precondition(format!("covariance is not symmetric ({} vs {})", cov[0][1], cov[1][0])));
        }
        let off = 0.5 * (cov[0][1] + cov[1][0]);
        let sym = [[cov[0][0], off], [off, cov[1][1]]];
        let (theta, lambda) = sym_eigen(&sym);
        let trace = sym[0][0] + sym[1][1];
        let min = lambda[0].min(lambda[1]);
        if min < -PSD_TOL * trace.abs() || trace < 0.0 {
            return Err(Error::NotPsd(min));
        }
        if min >= 0.0 {
            return Ok(Self { mean, cov: sym });
        }
        let (s, c) = theta.sin_cos();
        let l = [lambda[0].max(0.0), lambda[1].max(0.0)];
        let clamped = [
            [l[0] * c * c + l[1] * s * s, (l[0] - l[1]) * s * c],
            [(l[0] - l[1]) * s * c, l[0] * s * s + l[1] * c * c],
        ];
        Ok(Self { mean, cov: clamped })
    }

    pub fn mean_vector(&self) -> Vector2<f64> {
        Vector2::new(self.mean[0], self.mean[1])
    }

    pub fn cov_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.cov[0][0], self.cov[0][1], self.cov[1][0], self.cov[1][1])
    }

    pub fn det(&self) -> f64 {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    /// Density at `(x, y)`. Errors when the covariance is singular.
    pub fn pdf(&self, x: f64, y: f64) -> Result<f64> {
        let det = self.det();
        if !(det > 0.0) {
            return Err(Error::DegenerateVariance);
        }
        let dx = x - self.mean[0];
        let dy = y - self.mean[1];
        let q = (self.cov[1][1] * dx * dx - 2.0 * self.cov[0][1] * dx * dy + self.cov[0][0] * dy * dy) / det;
        Ok((-0.5 * q).exp() / (2.0 * PI * det.sqrt()))
    }

    pub fn marginal(&self, index: usize) -> Gaussian1D {
        Gaussian1D { mean: self.mean[index], variance: self.cov[index][index] }
    }

    /// Law of the first coordinate given that the second equals `y`.
    pub fn condition_first_on_second(&self, y: f64) -> Result<Gaussian1D> {
        let v22 = self.cov[1][1];
        if !(v22 > 0.0) {
            return Err(Error::DegenerateVariance);
        }
        let gain = self.cov[0][1] / v22;
        Gaussian1D::new(self.mean[0] + gain * (y - self.mean[1]), (self.cov[0][0] - gain * self.cov[0][1]).max(0.0))
    }

    /// Characteristic function `exp(i⟨m,k⟩ − ⟨k,Vk⟩/2)`.
    pub fn char_fn(&self, k: [f64; 2]) -> Complex64 {
        let phase = self.mean[0] * k[0] + self.mean[1] * k[1];
        let quad = self.cov[0][0] * k[0] * k[0] + 2.0 * self.cov[0][1] * k[0] * k[1] + self.cov[1][1] * k[1] * k[1];
        Complex64::from_polar((-0.5 * quad).exp(), phase)
    }

    /// A square-root factor `L` with `L Lᵀ = V`.
    fn factor(&self) -> [[f64; 2]; 2] {
        let (theta, lambda) = sym_eigen(&self.cov);
        let (s, c) = theta.sin_cos();
        let r0 = lambda[0].max(0.0).sqrt();
        let r1 = lambda[1].max(0.0).sqrt();
        [[c * r0, -s * r1], [s * r0, c * r1]]
    }
}

/// Characteristic function of `g` at `k`.
pub fn char2(g: &Gaussian2D, k: [f64; 2]) -> Complex64 {
    g.char_fn(k)
}

/// Gauss' root-mean-square error `(∫(x−y)² dμ)^{1/2}` of a bivariate normal.
pub fn gauss_rms(g: &Gaussian2D) -> f64 {
    let bias = g.mean[0] - g.mean[1];
    (bias * bias + g.cov[0][0] + g.cov[1][1] - 2.0 * g.cov[0][1]).max(0.0).sqrt()
}

/// Samples per independently seeded stream.
pub(crate) const SHARD: usize = 1 << 16;

/// `n` vectors of i.i.d. standard normals.
///
/// The generator is ChaCha8 seeded from `seed`, with stream `i` producing
/// samples `[i·SHARD, (i+1)·SHARD)`; normals come from the ziggurat sampler
/// in `rand_distr`. Output is identical for any number of worker threads.
pub(crate) fn standard_normals<const D: usize>(n: usize, seed: u64) -> Vec<[f64; D]> {
    let mut out = vec![[0.0; D]; n];
    out.par_chunks_mut(SHARD).enumerate().for_each(|(shard, chunk)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shard as u64);
        for v in chunk.iter_mut() {
            for x in v.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
        }
    });
    out
}

/// Draws `n` points from `g`, deterministically for a fixed `seed`.
pub fn sample2(g: &Gaussian2D, n: usize, seed: u64) -> Result<Vec<[f64; 2]>> {
    if n == 0 {
        return Err(Error::Precondition("sample count must be at least 1".into()));
    }
    let l = g.factor();
    Ok(standard_normals::<2>(n, seed)
        .into_iter()
        .map(|[u, v]| [g.mean[0] + l[0][0] * u + l[0][1] * v, g.mean[1] + l[1][0] * u + l[1][1] * v])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use approx::assert_relative_eq;

    #[test]
    fn pdf1_examples() {
        let std = Gaussian1D::new(0.0, 1.0).unwrap();
        assert_relative_eq!(pdf1(&std, 0.0).unwrap(), 0.398_942_280_401_432_7, max_relative = 1e-15);
        let meter = Gaussian1D::new(1.0, 0.5).unwrap();
        assert_relative_eq!(pdf1(&meter, 1.0).unwrap(), 1.0 / PI.sqrt(), max_relative = 1e-15);
        let shifted = Gaussian1D::new(2.0, 4.0).unwrap();
        let centered = Gaussian1D::new(0.0, 4.0).unwrap();
        assert_eq!(pdf1(&shifted, 4.0).unwrap(), pdf1(&centered, 2.0).unwrap());
    }

    #[test]
    fn point_mass_has_no_density() {
        let g = Gaussian1D::new(0.3, 0.0).unwrap();
        assert_eq!(pdf1(&g, 0.3), Err(Error::DegenerateVariance));
        assert!(Gaussian1D::new(0.0, -1.0).is_err());
    }

    #[test]
    fn pdf1_normalizes() {
        for &(m, v) in &[(0.0, 1.0), (3.0, 0.01), (-7.0, 25.0), (1.0, 0.5)] {
            let g = Gaussian1D::new(m, v).unwrap();
            let s = g.std_dev();
            let r = integrate(|x| g.pdf(x).unwrap(), m - 10.0 * s, m + 10.0 * s, 1e-12, 0.0);
            assert!((r.value - 1.0).abs() < 1e-8, "{m} {v}: {}", r.value);
        }
    }

    #[test]
    fn interval_mass_matches_quadrature() {
        let g = Gaussian1D::new(1.0, 2.0).unwrap();
        assert_relative_eq!(g.interval_mass(1.0, f64::INFINITY), 0.5, epsilon = 1e-15);
        assert_relative_eq!(g.interval_mass(f64::NEG_INFINITY, f64::INFINITY), 1.0, epsilon = 1e-15);
        for &(l, u) in &[(-1.0, 0.5), (0.5, 4.0), (3.0, 6.0), (-3.0, -1.0)] {
            let r = integrate(|x| g.pdf(x).unwrap(), l, u, 1e-14, 0.0);
            assert_relative_eq!(g.interval_mass(l, u), r.value, epsilon = 1e-13);
        }
        // Far tail keeps relative precision.
        let std = Gaussian1D::new(0.0, 1.0).unwrap();
        assert_relative_eq!(std.interval_mass(10.0, f64::INFINITY), 7.619_853_024_160_527e-24, max_relative = 1e-12);
    }

    #[test]
    fn char2_examples() {
        let g = Gaussian2D::new([0.3, -1.0], [[2.0, 0.5], [0.5, 1.0]]).unwrap();
        assert_eq!(char2(&g, [0.0, 0.0]), Complex64::new(1.0, 0.0));
        let id = Gaussian2D::new([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_relative_eq!(char2(&id, [1.0, 0.0]).re, (-0.5f64).exp(), max_relative = 1e-15);
        assert_eq!(char2(&id, [1.0, 0.0]).im, 0.0);

        let (q1, s1, c) = (0.7, 1.3, 0.4);
        let w = Gaussian2D::new([q1, q1], [[s1 * s1, c * s1 * s1], [c * s1 * s1, c * s1 * s1]]).unwrap();
        let k = [0.8, -1.1];
        let quad = s1 * s1 * (k[0] * k[0] + 2.0 * c * k[0] * k[1] + c * k[1] * k[1]);
        let expected = Complex64::new(-0.5 * quad, q1 * k[0] + q1 * k[1]).exp();
        assert!((char2(&w, k) - expected).norm() < 1e-15);
    }

    #[test]
    fn char2_is_fourier_transform_of_density() {
        let g = Gaussian2D::new([0.2, -0.1], [[1.0, 0.3], [0.3, 0.5]]).unwrap();
        let half = 9.0;
        for &k in &[[0.0, 0.0], [0.5, -0.3], [1.2, 0.7], [-0.4, 1.5]] {
            let inner = |x: f64, part: bool| {
                integrate(
                    |y| {
                        let ph = k[0] * x + k[1] * y;
                        let d = g.pdf(x, y).unwrap();
                        if part {
                            d * ph.cos()
                        } else {
                            d * ph.sin()
                        }
                    },
                    -half,
                    half,
                    1e-13,
                    0.0,
                )
                .value
            };
            let re = integrate(|x| inner(x, true), -half, half, 1e-11, 0.0).value;
            let im = integrate(|x| inner(x, false), -half, half, 1e-11, 0.0).value;
            let lam = char2(&g, k);
            assert!((lam.re - re).abs() < 1e-6 && (lam.im - im).abs() < 1e-6, "{k:?}: {lam} vs {re}+{im}i");
        }
    }

    #[test]
    fn gauss_rms_examples() {
        let id = Gaussian2D::new([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_relative_eq!(gauss_rms(&id), 2f64.sqrt(), max_relative = 1e-15);
        let joint = Gaussian2D::new([0.0, 0.0], [[1.0, 0.5], [0.5, 0.5]]).unwrap();
        assert_relative_eq!(gauss_rms(&joint), 0.5f64.sqrt(), max_relative = 1e-15);
        let locked = Gaussian2D::new([1.5, 1.5], [[2.0, 2.0], [2.0, 2.0]]).unwrap();
        assert_eq!(gauss_rms(&locked), 0.0);
    }

    #[test]
    fn psd_validation() {
        assert!(matches!(Gaussian2D::new([0.0; 2], [[1.0, 2.0], [2.0, 1.0]]), Err(Error::NotPsd(_))));
        assert!(Gaussian2D::new([0.0; 2], [[1.0, 0.5], [0.4, 1.0]]).is_err());
        // Rank-one matrix with rounding noise is clamped, not rejected.
        let g = Gaussian2D::new([0.0; 2], [[1.0, 1.0 + 1e-15], [1.0 + 1e-15, 1.0]]).unwrap();
        assert!(g.det() >= -1e-15);
    }

    #[test]
    fn bayes_conditioning() {
        let g = Gaussian2D::new([1.0, 2.0], [[2.0, 0.6], [0.6, 0.5]]).unwrap();
        let c = g.condition_first_on_second(3.0).unwrap();
        assert_relative_eq!(c.mean, 1.0 + 1.2, max_relative = 1e-15);
        assert_relative_eq!(c.variance, 2.0 - 0.72, max_relative = 1e-15);
    }

    #[test]
    fn sampling_is_deterministic_and_consistent() {
        let std = Gaussian2D::new([0.0; 2], [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let n = 1_000_000;
        let a = sample2(&std, n, 42).unwrap();
        let b = sample2(&std, n, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[..10], sample2(&std, 10, 43).unwrap()[..]);
        let band = 4.0 / (n as f64).sqrt();
        for i in 0..2 {
            let mean = a.iter().map(|v| v[i]).sum::<f64>() / n as f64;
            assert!(mean.abs() < band, "component {i}: {mean}");
        }
        assert!(sample2(&std, 0, 1).is_err());
    }

    #[test]
    fn sampled_difference_moment_matches_gauss_rms() {
        let (s1, c) = (1.0, 0.5);
        let w = Gaussian2D::new([0.0, 0.0], [[s1, c * s1], [c * s1, c * s1]]).unwrap();
        let n = 1_000_000;
        let d2: Vec<f64> = sample2(&w, n, 7).unwrap().iter().map(|[x, y]| (x - y).powi(2)).collect();
        let mean = d2.iter().sum::<f64>() / n as f64;
        let var = d2.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let expected = (1.0 - c) * s1 * s1;
        assert!((mean - expected).abs() < 4.0 * se, "{mean} vs {expected} (se {se})");
        assert_relative_eq!(gauss_rms(&w).powi(2), expected, max_relative = 1e-15);
    }

    #[test]
    fn state_validation() {
        let c = Constants::default();
        assert!(GaussianState::new(0.0, 0.0, 1.0, 0.4, &c).is_err());
        assert!(GaussianState::new(0.0, 0.0, -1.0, 1.0, &c).is_err());
        let psi = GaussianState::minimum_uncertainty(2.0, 1.0, 1.0, &c).unwrap();
        assert_eq!(psi.sigma_p, 0.5);
        assert!(psi.is_minimum_uncertainty(&c, 1e-12));
        let mixed = GaussianState::new(0.0, 0.0, 1.0, 0.6, &c).unwrap();
        assert!(!mixed.is_minimum_uncertainty(&c, 1e-12));
        assert!(Constants::new(0.0).is_err());
    }
}
