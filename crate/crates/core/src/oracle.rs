// SPDX-License-Identifier: Apache-2.0

//! Phase-space Monte Carlo oracle.
//!
//! The initial product state is represented by its Wigner function, which for
//! Gaussian states is a classical normal density on `(q1, q2, p1, p2)`. Linear
//! Heisenberg evolution maps phase-space points linearly, so sampling the
//! initial density and pushing each point through the evolution reproduces
//! exactly the first and second moments of linear observables and the joint
//! laws of commuting linear pairs. Nothing beyond that is checked with it.
//!
//! The evolution matrices come from [`expm_series`], never from the closed
//! forms under test.

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{expm_series, interaction_matrix};
use crate::error::{Error, Result};
use crate::gaussian::{standard_normals, GaussianState};
use crate::measurement::LinearPositionMeasurement;

/// Phase-space points `(q1, q2, p1, p2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSampleBatch {
    pub samples: Vec<[f64; 4]>,
    pub seed: u64,
    pub n: usize,
}

/// Draws `n` points from the Wigner density of `psi ⊗ probe`.
pub fn draw_initial(psi: &GaussianState, probe: &GaussianState, n: usize, seed: u64) -> Result<PhaseSampleBatch> {
    if n < 2 {
        return Err(Error::Precondition("oracle needs at least two samples".into()));
    }
    let mut samples = standard_normals::<4>(n, seed);
    samples.par_iter_mut().for_each(|v| {
        v[0] = psi.mean_q + psi.sigma_q * v[0];
        v[1] = probe.mean_q + probe.sigma_q * v[1];
        v[2] = psi.mean_p + psi.sigma_p * v[2];
        v[3] = probe.mean_p + probe.sigma_p * v[3];
    });
    Ok(PhaseSampleBatch { samples, seed, n })
}

/// Applies `positions` to `(q1, q2)` and `momenta` to `(p1, p2)` of every point.
pub fn propagate(batch: &PhaseSampleBatch, positions: &Matrix2<f64>, momenta: &Matrix2<f64>) -> PhaseSampleBatch {
    let (x, y) = (positions, momenta);
    let samples = batch
        .samples
        .par_iter()
        .map(|&[q1, q2, p1, p2]| {
            [
                x[(0, 0)] * q1 + x[(0, 1)] * q2,
                x[(1, 0)] * q1 + x[(1, 1)] * q2,
                y[(0, 0)] * p1 + y[(0, 1)] * p2,
                y[(1, 0)] * p1 + y[(1, 1)] * p2,
            ]
        })
        .collect();
    PhaseSampleBatch { samples, seed: batch.seed, n: batch.n }
}

/// Evolution matrices `(e^{τS}, e^{−τSᵀ})` of `m` from the Taylor series.
pub fn series_evolution(m: &LinearPositionMeasurement) -> (Matrix2<f64>, Matrix2<f64>) {
    let s = interaction_matrix(&m.params);
    (expm_series(&s, m.tau), expm_series(&(-s.transpose()), m.tau))
}

/// Propagates `batch` through `m`.
pub fn propagate_measurement(batch: &PhaseSampleBatch, m: &LinearPositionMeasurement) -> PhaseSampleBatch {
    let (pos, mom) = series_evolution(m);
    propagate(batch, &pos, &mom)
}

/// A Monte Carlo estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// `|value − expected| ≤ k·std_error + floor`.
    pub fn agrees(&self, expected: f64, k: f64, floor: f64) -> bool {
        (self.value - expected).abs() <= k * self.std_error + floor
    }
}

/// Root mean square with its leave-one-out jackknife standard error.
///
/// The leave-one-out values are `θ₋ᵢ = √((S − xᵢ²)/(n−1))`; their deviations
/// from `θ = √(S/n)` are formed as `(S − n xᵢ²)/(n(n−1)(θ₋ᵢ + θ))` to avoid
/// cancellation.
pub fn rms_jackknife(values: &[f64]) -> Estimate {
    let n = values.len() as f64;
    let sum_sq: f64 = values.par_iter().map(|x| x * x).sum();
    let theta = (sum_sq / n).sqrt();
    if sum_sq == 0.0 {
        return Estimate { value: 0.0, std_error: 0.0 };
    }
    let delta = |x: f64| {
        let loo = ((sum_sq - x * x) / (n - 1.0)).max(0.0).sqrt();
        (sum_sq - n * x * x) / (n * (n - 1.0) * (loo + theta))
    };
    let mean_delta = values.par_iter().map(|&x| delta(x)).sum::<f64>() / n;
    let ss: f64 = values.par_iter().map(|&x| (delta(x) - mean_delta).powi(2)).sum();
    Estimate { value: theta, std_error: ((n - 1.0) / n * ss).sqrt() }
}

fn mean_estimate(values: &[f64]) -> (Estimate, f64) {
    let n = values.len() as f64;
    let mean = values.par_iter().sum::<f64>() / n;
    let var = values.par_iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (Estimate { value: mean, std_error: (var / n).sqrt() }, var)
}

/// Sample covariance with the standard error of a mean of centred products.
fn cov_estimate(x: &[f64], y: &[f64]) -> Estimate {
    let n = x.len() as f64;
    let mx = x.par_iter().sum::<f64>() / n;
    let my = y.par_iter().sum::<f64>() / n;
    let prods: Vec<f64> = x.par_iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let (m, _) = mean_estimate(&prods);
    Estimate { value: m.value * n / (n - 1.0), std_error: m.std_error }
}

/// Estimates of the quantities whose closed forms the oracle checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalReport {
    /// rms of `q2' − q1`.
    pub epsilon_q: Estimate,
    /// rms of `p1' − p1`.
    pub eta_p: Estimate,
    /// rms of `q1' − q1`.
    pub eta_q: Estimate,
    pub meter_mean: Estimate,
    pub meter_var: Estimate,
    /// Covariance entries `[V11, V12, V22]` of `(q1, q2')`.
    pub joint_q_cov: [Estimate; 3],
    /// Covariance entries `[V11, V12, V22]` of `(p1, p1')`.
    pub joint_p_cov: [Estimate; 3],
}

/// Compares a batch with its propagated image point by point.
pub fn empirical_report(initial: &PhaseSampleBatch, propagated: &PhaseSampleBatch) -> Result<EmpiricalReport> {
    if initial.n != propagated.n || initial.samples.len() != propagated.samples.len() {
        return Err(Error::BatchMismatch(format!("{} vs {} samples", initial.n, propagated.n)));
    }
    if initial.seed != propagated.seed {
        return Err(Error::BatchMismatch(format!("seed {} vs {}", initial.seed, propagated.seed)));
    }
    let col = |b: &PhaseSampleBatch, i: usize| -> Vec<f64> { b.samples.par_iter().map(|v| v[i]).collect() };
    let q1 = col(initial, 0);
    let p1 = col(initial, 2);
    let q1t = col(propagated, 0);
    let q2t = col(propagated, 1);
    let p1t = col(propagated, 2);
    let diff = |a: &[f64], b: &[f64]| -> Vec<f64> { a.par_iter().zip(b).map(|(x, y)| x - y).collect() };

    let (meter_mean, meter_var_value) = mean_estimate(&q2t);
    let centred_sq: Vec<f64> = q2t.par_iter().map(|y| (y - meter_mean.value).powi(2)).collect();
    let (m2, _) = mean_estimate(&centred_sq);
    let meter_var = Estimate { value: meter_var_value, std_error: m2.std_error };

    Ok(EmpiricalReport {
        epsilon_q: rms_jackknife(&diff(&q2t, &q1)),
        eta_p: rms_jackknife(&diff(&p1t, &p1)),
        eta_q: rms_jackknife(&diff(&q1t, &q1)),
        meter_mean,
        meter_var,
        joint_q_cov: [cov_estimate(&q1, &q1), cov_estimate(&q1, &q2t), cov_estimate(&q2t, &q2t)],
        joint_p_cov: [cov_estimate(&p1, &p1), cov_estimate(&p1, &p1t), cov_estimate(&p1t, &p1t)],
    })
}
