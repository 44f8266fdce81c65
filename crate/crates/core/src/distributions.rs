// SPDX-License-Identifier: Apache-2.0

//! Output distributions and posterior states.
//!
//! Every pair used here commutes (`Q1(0)` with `Q2(τ)`, `P1(0)` with `P1(τ)`,
//! and `Q2(τ)` with both `Q1(τ)` and `P1(τ)`), so each has a classical joint
//! law. All are linear images of the Gaussian product state, hence bivariate
//! normal with characteristic function `exp(i⟨m,k⟩ − ⟨k,Vk⟩/2)`.
//!
//! Posterior states are only defined for measurements that attain the bound;
//! for those the outcome `y` leaves the system in a minimum uncertainty state
//! centred at `(a+b)y` with spread `σ1/√(1−c)`.

use serde::Serialize;

use crate::dynamics::TransferMatrix;
use crate::error::{Error, Result};
use crate::gaussian::{Constants, Gaussian1D, Gaussian2D, GaussianState};
use crate::measurement::LinearPositionMeasurement;
use crate::optimal::{is_minimum_error_disturbance, THEOREM_TOL};
use crate::quadrature::integrate;

/// Bivariate normal of `(u, v)` with `u = x·s + y·t`, `v = z·s + w·t` for
/// independent `s ~ (ms, vs)`, `t ~ (mt, vt)`.
fn pushforward(rows: [[f64; 2]; 2], means: [f64; 2], vars: [f64; 2]) -> Gaussian2D {
    let [[x, y], [z, w]] = rows;
    let cross = x * z * vars[0] + y * w * vars[1];
    Gaussian2D {
        mean: [x * means[0] + y * means[1], z * means[0] + w * means[1]],
        cov: [[x * x * vars[0] + y * y * vars[1], cross], [cross, z * z * vars[0] + w * w * vars[1]]],
    }
}

/// Joint law of `(Q1(0), Q2(τ))`.
pub fn joint_q(m: &LinearPositionMeasurement, psi: &GaussianState) -> Gaussian2D {
    let TransferMatrix { c, d, .. } = m.transfer();
    pushforward([[1.0, 0.0], [c, d]], [psi.mean_q, m.probe.mean_q], [psi.variance_q(), m.probe.variance_q()])
}

/// Joint law of `(P1(0), P1(τ))`, with `P1(τ) = dP1 − cP2`.
pub fn joint_p(m: &LinearPositionMeasurement, psi: &GaussianState) -> Gaussian2D {
    let TransferMatrix { c, d, .. } = m.transfer();
    pushforward([[1.0, 0.0], [d, -c]], [psi.mean_p, m.probe.mean_p], [psi.variance_p(), m.probe.variance_p()])
}

/// Joint law of `(Q1(τ), Q2(τ))`.
pub fn joint_q_after(m: &LinearPositionMeasurement, psi: &GaussianState) -> Gaussian2D {
    let TransferMatrix { a, b, c, d } = m.transfer();
    pushforward([[a, b], [c, d]], [psi.mean_q, m.probe.mean_q], [psi.variance_q(), m.probe.variance_q()])
}

/// Joint law of `(P1(τ), Q2(τ))`. Position and momentum moments of the
/// uncorrelated input states never mix, so the two are independent.
pub fn joint_pq_after(m: &LinearPositionMeasurement, psi: &GaussianState) -> Gaussian2D {
    let TransferMatrix { c, d, .. } = m.transfer();
    let p = pushforward([[d, -c], [0.0, 0.0]], [psi.mean_p, m.probe.mean_p], [psi.variance_p(), m.probe.variance_p()]);
    let q = joint_q(m, psi);
    Gaussian2D { mean: [p.mean[0], q.mean[1]], cov: [[p.cov[0][0], 0.0], [0.0, q.cov[1][1]]] }
}

/// Law of the meter reading `Q2(τ)`.
pub fn meter_marginal(m: &LinearPositionMeasurement, psi: &GaussianState) -> Gaussian1D {
    joint_q(m, psi).marginal(1)
}

fn require_optimal(m: &LinearPositionMeasurement, psi: &GaussianState, consts: &Constants) -> Result<()> {
    if is_minimum_error_disturbance(m, psi, consts, THEOREM_TOL) {
        Ok(())
    } else {
        Err(Error::NotOptimal)
    }
}

/// Law of `Q1(0)` given the reading `y`: normal with mean `y` and variance
/// `(1−c)σ1² = ε(Q1)²`. Optimal measurements only.
pub fn conditional_q0_given_meter(
    m: &LinearPositionMeasurement,
    psi: &GaussianState,
    consts: &Constants,
    y: f64,
) -> Result<Gaussian1D> {
    require_optimal(m, psi, consts)?;
    Gaussian1D::new(y, (1.0 - m.transfer().c) * psi.variance_q())
}

/// Closed-form factorized densities of the joint laws for optimal
/// measurements with `c` in `(0, 1)`, written as products of centred normal
/// densities `p_v(x)`.
pub mod factorized {
    use crate::gaussian::{Gaussian1D, GaussianState};

    fn p(variance: f64, x: f64) -> f64 {
        Gaussian1D { mean: 0.0, variance }.pdf(x).unwrap_or(0.0)
    }

    /// `(Q1(0), Q2(τ))`: `p_{(1−c)σ1²}(x − y) · p_{cσ1²}(y − q1)`.
    pub fn joint_q(c: f64, psi: &GaussianState, x: f64, y: f64) -> f64 {
        let v = psi.variance_q();
        p((1.0 - c) * v, x - y) * p(c * v, y - psi.mean_q)
    }

    /// `(P1(0), P1(τ))`: `p_{cσ̂1²}(z − w) · p_{(1−c)σ̂1²}(w − p1)`.
    pub fn joint_p(c: f64, psi: &GaussianState, z: f64, w: f64) -> f64 {
        let v = psi.variance_p();
        p(c * v, z - w) * p((1.0 - c) * v, w - psi.mean_p)
    }

    /// `(Q1(τ), Q2(τ))`: `p_{σ1²/(1−c)}(x − (a+b)y) · p_{cσ1²}(y − q1)`.
    pub fn joint_q_after(c: f64, slope: f64, psi: &GaussianState, x: f64, y: f64) -> f64 {
        let v = psi.variance_q();
        p(v / (1.0 - c), x - slope * y) * p(c * v, y - psi.mean_q)
    }

    /// `(P1(τ), Q2(τ))`: `p_{(1−c)σ̂1²}(z − p1) · p_{cσ1²}(y − q1)`.
    pub fn joint_pq_after(c: f64, psi: &GaussianState, z: f64, y: f64) -> f64 {
        p((1.0 - c) * psi.variance_p(), z - psi.mean_p) * p(c * psi.variance_q(), y - psi.mean_q)
    }
}

/// The posterior states `{ψ_y}` of an optimal measurement together with the
/// law of the reading `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PosteriorFamily {
    /// `a + b`: the posterior position mean is `slope · y`.
    pub slope: f64,
    pub mean_p: f64,
    /// `σ1/√(1−c)`.
    pub sigma_q: f64,
    /// `ħ/(2·sigma_q) = √(1−c)·σ̂1`.
    pub sigma_p: f64,
    /// Law of the reading: mean `q1`, variance `cσ1²`.
    pub weight: Gaussian1D,
}

impl PosteriorFamily {
    /// The posterior state for reading `y` (unique up to phase).
    pub fn state(&self, y: f64) -> GaussianState {
        GaussianState { mean_q: self.slope * y, mean_p: self.mean_p, sigma_q: self.sigma_q, sigma_p: self.sigma_p }
    }

    /// Law of `Q1(τ)` given `Q2(τ) = y`.
    pub fn position_given(&self, y: f64) -> Gaussian1D {
        Gaussian1D { mean: self.slope * y, variance: self.sigma_q * self.sigma_q }
    }

    /// Law of `P1(τ)` given `Q2(τ) = y`; independent of `y`.
    pub fn momentum_given(&self) -> Gaussian1D {
        Gaussian1D { mean: self.mean_p, variance: self.sigma_p * self.sigma_p }
    }

    /// `σ(Q)σ(P)` of every member, equal to `ħ/2`.
    pub fn uncertainty_product(&self) -> f64 {
        self.sigma_q * self.sigma_p
    }
}

pub fn posterior_family(
    m: &LinearPositionMeasurement,
    psi: &GaussianState,
    consts: &Constants,
) -> Result<PosteriorFamily> {
    require_optimal(m, psi, consts)?;
    let TransferMatrix { a, b, c, .. } = m.transfer();
    let sigma_q = psi.sigma_q / (1.0 - c).sqrt();
    Ok(PosteriorFamily {
        slope: a + b,
        mean_p: psi.mean_p,
        sigma_q,
        sigma_p: consts.kennard() / sigma_q,
        weight: Gaussian1D::new(psi.mean_q, c * psi.variance_q())?,
    })
}

/// A closed interval of meter readings; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub const REAL: Interval = Interval { lower: f64::NEG_INFINITY, upper: f64::INFINITY };

    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || !(lower < upper) {
            return Err(Error::Precondition(format!("interval needs lower < upper, got [{lower}, {upper}]")));
        }
        Ok(Self { lower, upper })
    }
}

/// First and second moments of `Q1` and `P1` in the state conditioned on the
/// reading falling in `J`, and the probability of that event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureMoments {
    pub mean_q: f64,
    pub var_q: f64,
    pub mean_p: f64,
    pub var_p: f64,
    pub weight: f64,
}

/// Smallest interval probability accepted for conditioning.
pub const MIN_EVENT_MASS: f64 = 1e-300;

/// Moments of `ρ_J = ∫_J |ψ_y⟩⟨ψ_y| p(y) dy / μ(J)` for an optimal measurement.
///
/// Moments of the truncated reading law come from adaptive quadrature over
/// `J ∩ [q1 − 10s, q1 + 10s]` (`s² = cσ1²`), or over a `20s` window at the
/// finite end when `J` lies entirely in a tail. The position variance is the
/// posterior spread plus `slope²` times the variance of the truncated reading.
pub fn mixture_moments(
    m: &LinearPositionMeasurement,
    psi: &GaussianState,
    consts: &Constants,
    interval: &Interval,
) -> Result<MixtureMoments> {
    let fam = posterior_family(m, psi, consts)?;
    let Interval { lower, upper } = Interval::new(interval.lower, interval.upper)?;
    let reading = fam.weight;
    let weight = reading.interval_mass(lower, upper);
    if !(weight > MIN_EVENT_MASS) {
        return Err(Error::NullEvent(weight));
    }
    let s = reading.std_dev();
    let (mut lo, mut hi) = (lower.max(reading.mean - 10.0 * s), upper.min(reading.mean + 10.0 * s));
    if lo >= hi {
        if lower.is_finite() && lower > reading.mean {
            (lo, hi) = (lower, upper.min(lower + 20.0 * s));
        } else {
            (lo, hi) = (lower.max(upper - 20.0 * s), upper);
        }
    }
    let ln_weight = weight.ln();
    let density = |y: f64| (reading.ln_pdf(y).unwrap_or(f64::NEG_INFINITY) - ln_weight).exp();
    let tol = 1e-10;
    let mean_y = integrate(|y| y * density(y), lo, hi, tol * (1.0 + reading.mean.abs()), 0.0).value;
    let var_y = integrate(|y| (y - mean_y).powi(2) * density(y), lo, hi, tol * s * s, 0.0).value;
    Ok(MixtureMoments {
        mean_q: fam.slope * mean_y,
        var_q: fam.sigma_q * fam.sigma_q + fam.slope * fam.slope * var_y,
        mean_p: fam.mean_p,
        var_p: fam.sigma_p * fam.sigma_p,
        weight,
    })
}
