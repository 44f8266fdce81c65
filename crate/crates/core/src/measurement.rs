// SPDX-License-Identifier: Apache-2.0

//! q-rms error and disturbance of linear position measurements.

use serde::Serialize;

use crate::distributions::{joint_p, joint_q};
use crate::dynamics::{transfer_matrix, InteractionParams, TransferMatrix};
use crate::error::{finite, Error, Result};
use crate::gaussian::{gauss_rms, Constants, GaussianState};

/// Relative tolerance for calling the error-disturbance bound saturated.
pub const SATURATION_TOL: f64 = 1e-9;

/// A probe prepared in `probe`, coupled through `params` for time `tau`, whose
/// position is read out as the measured value of the system position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearPositionMeasurement {
    pub params: InteractionParams,
    pub tau: f64,
    pub probe: GaussianState,
    transfer: TransferMatrix,
}

impl LinearPositionMeasurement {
    pub fn new(params: InteractionParams, tau: f64, probe: GaussianState) -> Result<Self> {
        if !(finite("tau", tau)? > 0.0) {
            return Err(Error::OutOfRange { name: "tau", value: tau, range: "(0, inf)" });
        }
        let transfer = transfer_matrix(&params, tau)?;
        Ok(Self { params, tau, probe, transfer })
    }

    /// `e^{τS}` for this measurement.
    pub fn transfer(&self) -> TransferMatrix {
        self.transfer
    }
}

/// Everything needed to place a measurement relative to the bound
/// `ε(Q1)²σ(P1)² + σ(Q1)²η(P1)² ≥ ħ²/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorDisturbanceReport {
    pub epsilon_q: f64,
    pub eta_p: f64,
    pub eta_q: f64,
    pub sigma_q1: f64,
    pub sigma_p1: f64,
    pub edr_lhs: f64,
    pub edr_bound: f64,
    pub heisenberg_product: f64,
    pub saturated: bool,
}

/// `ε(Q1)`: rms of the noise operator `Q2(τ) − Q1(0)`.
///
/// `ε² = (c−1)²σ(Q1)² + d²σ(Q2)² + ((c−1)⟨Q1⟩ + d⟨Q2⟩)²`.
pub fn error_q(m: &LinearPositionMeasurement, psi: &GaussianState) -> f64 {
    let TransferMatrix { c, d, .. } = m.transfer;
    let xi = &m.probe;
    let bias = (c - 1.0) * psi.mean_q + d * xi.mean_q;
    ((c - 1.0).powi(2) * psi.variance_q() + d * d * xi.variance_q() + bias * bias).sqrt()
}

/// `η(P1)`: rms of the disturbance operator `P1(τ) − P1(0)`, with
/// `P1(τ) = dP1 − cP2`.
pub fn disturbance_p(m: &LinearPositionMeasurement, psi: &GaussianState) -> f64 {
    let TransferMatrix { c, d, .. } = m.transfer;
    let xi = &m.probe;
    let bias = (d - 1.0) * psi.mean_p - c * xi.mean_p;
    ((d - 1.0).powi(2) * psi.variance_p() + c * c * xi.variance_p() + bias * bias).sqrt()
}

/// `η(Q1)`: rms of `Q1(τ) − Q1(0)`, with `Q1(τ) = aQ1 + bQ2`.
pub fn disturbance_q(m: &LinearPositionMeasurement, psi: &GaussianState) -> f64 {
    let TransferMatrix { a, b, .. } = m.transfer;
    let xi = &m.probe;
    let bias = (a - 1.0) * psi.mean_q + b * xi.mean_q;
    ((a - 1.0).powi(2) * psi.variance_q() + b * b * xi.variance_q() + bias * bias).sqrt()
}

/// Gauss' rms error of the joint law of the commuting pair `(Q1(0), Q2(τ))`.
/// Coincides with [`error_q`] for every linear measurement.
pub fn gauss_error_q(m: &LinearPositionMeasurement, psi: &GaussianState) -> f64 {
    gauss_rms(&joint_q(m, psi))
}

/// Gauss' rms error of the joint law of `(P1(0), P1(τ))`. Coincides with
/// [`disturbance_p`].
pub fn gauss_disturbance_p(m: &LinearPositionMeasurement, psi: &GaussianState) -> f64 {
    gauss_rms(&joint_p(m, psi))
}

pub fn edr_report(m: &LinearPositionMeasurement, psi: &GaussianState, consts: &Constants) -> ErrorDisturbanceReport {
    let epsilon_q = error_q(m, psi);
    let eta_p = disturbance_p(m, psi);
    let eta_q = disturbance_q(m, psi);
    let edr_lhs = epsilon_q.powi(2) * psi.variance_p() + psi.variance_q() * eta_p.powi(2);
    let edr_bound = 0.25 * consts.hbar * consts.hbar;
    ErrorDisturbanceReport {
        epsilon_q,
        eta_p,
        eta_q,
        sigma_q1: psi.sigma_q,
        sigma_p1: psi.sigma_p,
        edr_lhs,
        edr_bound,
        heisenberg_product: epsilon_q * eta_p,
        saturated: (edr_lhs - edr_bound).abs() <= SATURATION_TOL * edr_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn consts() -> Constants {
        Constants::default()
    }

    fn optimal_half() -> (LinearPositionMeasurement, GaussianState) {
        let c = consts();
        let psi = GaussianState::minimum_uncertainty(0.0, 0.0, 1.0, &c).unwrap();
        let probe = GaussianState::minimum_uncertainty(0.0, 0.0, 1.0, &c).unwrap();
        let p = InteractionParams::new(1.0 / 3f64.sqrt(), -(3f64.sqrt()), 0.0).unwrap();
        (LinearPositionMeasurement::new(p, PI / 3.0, probe).unwrap(), psi)
    }

    #[test]
    fn optimal_measurement_values() {
        let (m, psi) = optimal_half();
        assert_relative_eq!(error_q(&m, &psi), 0.5f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(disturbance_p(&m, &psi), 0.125f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gauss_error_q(&m, &psi), 0.5f64.sqrt(), max_relative = 1e-14);
        let r = edr_report(&m, &psi, &consts());
        assert_relative_eq!(r.edr_lhs, 0.25, max_relative = 1e-14);
        assert!(r.saturated);
        assert_relative_eq!(r.heisenberg_product, 0.25, max_relative = 1e-14);
    }

    #[test]
    fn error_free_measurement() {
        let c = consts();
        let k = 3.0 * 3f64.sqrt();
        let p = InteractionParams::new(2.0 / k, -2.0 / k, 1.0 / k).unwrap();
        let probe = GaussianState::minimum_uncertainty(0.0, 0.0, 0.7, &c).unwrap();
        let m = LinearPositionMeasurement::new(p, PI, probe).unwrap();
        for q1 in [-3.0, 0.0, 2.5] {
            let psi = GaussianState::minimum_uncertainty(q1, 0.4, 1.3, &c).unwrap();
            assert!(error_q(&m, &psi) < 1e-14);
            assert!(gauss_error_q(&m, &psi) < 1e-7);
        }
    }

    #[test]
    fn von_neumann_model() {
        let c = consts();
        let s = 0.8;
        let probe = GaussianState::minimum_uncertainty(0.0, 0.0, s, &c).unwrap();
        let psi = GaussianState::minimum_uncertainty(1.0, -2.0, 1.5, &c).unwrap();
        let m = LinearPositionMeasurement::new(InteractionParams::von_neumann(), 1.0, probe).unwrap();
        assert_eq!(m.transfer(), TransferMatrix { a: 1.0, b: 0.0, c: 1.0, d: 1.0 });
        assert_relative_eq!(error_q(&m, &psi), s, max_relative = 1e-15);
        assert_relative_eq!(disturbance_p(&m, &psi), probe.sigma_p, max_relative = 1e-15);
        assert_eq!(disturbance_q(&m, &psi), 0.0);
        let r = edr_report(&m, &psi, &c);
        assert!(r.edr_lhs >= r.edr_bound && !r.saturated);
    }

    #[test]
    fn short_interaction_barely_disturbs() {
        let c = consts();
        let probe = GaussianState::minimum_uncertainty(0.0, 0.0, 1.0, &c).unwrap();
        let psi = GaussianState::minimum_uncertainty(0.5, 0.5, 1.0, &c).unwrap();
        let p = InteractionParams::new(1.0, -1.0, 0.3).unwrap();
        let m = LinearPositionMeasurement::new(p, 1e-12, probe).unwrap();
        assert!(disturbance_p(&m, &psi) < 1e-11);
        assert!(disturbance_q(&m, &psi) < 1e-11);
    }

    #[test]
    fn rejects_nonpositive_time() {
        let probe = GaussianState::minimum_uncertainty(0.0, 0.0, 1.0, &consts()).unwrap();
        for tau in [0.0, -1.0, f64::NAN] {
            assert!(LinearPositionMeasurement::new(InteractionParams::von_neumann(), tau, probe).is_err());
        }
    }
}
