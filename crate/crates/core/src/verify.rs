// SPDX-License-Identifier: Apache-2.0

//! End-to-end comparison of every closed form with the phase-space oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distributions::{joint_p, joint_q, meter_marginal};
use crate::dynamics::InteractionParams;
use crate::error::Result;
use crate::gaussian::{Constants, GaussianState};
use crate::measurement::{disturbance_p, disturbance_q, error_q, LinearPositionMeasurement};
use crate::optimal::{family, FamilyKind};
use crate::oracle::{draw_initial, empirical_report, propagate_measurement, Estimate};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub n: usize,
    /// Error parameters at which each named family is checked.
    pub mus: Vec<f64>,
    /// Number of random non-optimal measurements.
    pub random_measurements: usize,
    /// System state for the named-family cases.
    pub psi: GaussianState,
    /// Acceptance band in standard errors.
    pub bands: f64,
    /// Test hook: scales every analytic `ε(Q1)` by `1 + tamper`.
    pub tamper: Option<f64>,
}

impl VerifyConfig {
    pub fn new(psi: GaussianState) -> Self {
        Self {
            seed: 0x5eed,
            n: 1_000_000,
            mus: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            random_measurements: 100,
            psi,
            bands: 5.0,
            tamper: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub case: String,
    pub quantity: &'static str,
    pub analytic: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub n: usize,
    pub rows: Vec<CheckRow>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Absolute slack added to every band, relative to `1 + |analytic|`. Covers
/// cases whose exact value is zero, where the sample spread is pure rounding.
const FLOOR: f64 = 1e-9;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

struct Case {
    label: String,
    m: LinearPositionMeasurement,
    psi: GaussianState,
}

/// A random measurement with couplings in `[−1, 1]`, `τ ∈ (0, 2]`, a random
/// minimum uncertainty system state and a random (possibly mixed) probe.
pub fn random_measurement(
    rng: &mut impl Rng,
    consts: &Constants,
) -> Result<(LinearPositionMeasurement, GaussianState)> {
    let params = InteractionParams::new(
        rng.random_range(-1.0..=1.0),
        rng.random_range(-1.0..=1.0),
        rng.random_range(-1.0..=1.0),
    )?;
    let tau = 2.0 * (1.0 - rng.random::<f64>());
    let psi = GaussianState::minimum_uncertainty(
        rng.random_range(-2.0..=2.0),
        rng.random_range(-2.0..=2.0),
        rng.random_range(0.5..=2.0),
        consts,
    )?;
    let sq = rng.random_range(0.3..=3.0);
    let excess = rng.random_range(1.0..=2.0);
    let probe = GaussianState::new(
        rng.random_range(-2.0..=2.0),
        rng.random_range(-2.0..=2.0),
        sq,
        excess * consts.kennard() / sq,
        consts,
    )?;
    Ok((LinearPositionMeasurement::new(params, tau, probe)?, psi))
}

fn cases(cfg: &VerifyConfig, consts: &Constants) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for kind in FamilyKind::ALL {
        for &mu in &cfg.mus {
            out.push(Case { label: format!("{kind}(mu={mu})"), m: family(kind, mu, &cfg.psi, consts)?, psi: cfg.psi });
        }
    }
    let k = 3.0 * 3f64.sqrt();
    let error_free = InteractionParams::new(2.0 / k, -2.0 / k, 1.0 / k)?;
    let probe = GaussianState::minimum_uncertainty(0.0, 0.0, cfg.psi.sigma_q, consts)?;
    out.push(Case {
        label: "error-free".into(),
        m: LinearPositionMeasurement::new(error_free, std::f64::consts::PI, probe)?,
        psi: cfg.psi,
    });
    out.push(Case {
        label: "von-neumann".into(),
        m: LinearPositionMeasurement::new(InteractionParams::von_neumann(), 1.0, probe)?,
        psi: cfg.psi,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(cfg.seed ^ 0x7261_6e64));
    for i in 0..cfg.random_measurements {
        let (m, psi) = random_measurement(&mut rng, consts)?;
        out.push(Case { label: format!("random#{i}"), m, psi });
    }
    Ok(out)
}

/// Runs every case, each with its own sample batch derived from `cfg.seed`.
pub fn run_verification(cfg: &VerifyConfig, consts: &Constants) -> Result<VerifySummary> {
    let mut rows = Vec::new();
    for (i, case) in cases(cfg, consts)?.into_iter().enumerate() {
        let Case { label, m, psi } = case;
        let init = draw_initial(&psi, &m.probe, cfg.n, splitmix(cfg.seed.wrapping_add(i as u64)))?;
        let prop = propagate_measurement(&init, &m);
        let emp = empirical_report(&init, &prop)?;
        drop((init, prop));

        let meter = meter_marginal(&m, &psi);
        let jq = joint_q(&m, &psi);
        let jp = joint_p(&m, &psi);
        let eps = error_q(&m, &psi) * (1.0 + cfg.tamper.unwrap_or(0.0));
        let checks: [(&'static str, f64, Estimate); 11] = [
            ("epsilon_q", eps, emp.epsilon_q),
            ("eta_p", disturbance_p(&m, &psi), emp.eta_p),
            ("eta_q", disturbance_q(&m, &psi), emp.eta_q),
            ("meter_mean", meter.mean, emp.meter_mean),
            ("meter_var", meter.variance, emp.meter_var),
            ("joint_q_v11", jq.cov[0][0], emp.joint_q_cov[0]),
            ("joint_q_v12", jq.cov[0][1], emp.joint_q_cov[1]),
            ("joint_q_v22", jq.cov[1][1], emp.joint_q_cov[2]),
            ("joint_p_v11", jp.cov[0][0], emp.joint_p_cov[0]),
            ("joint_p_v12", jp.cov[0][1], emp.joint_p_cov[1]),
            ("joint_p_v22", jp.cov[1][1], emp.joint_p_cov[2]),
        ];
        for (quantity, analytic, est) in checks {
            rows.push(CheckRow {
                case: label.clone(),
                quantity,
                analytic,
                estimate: est.value,
                std_error: est.std_error,
                pass: est.agrees(analytic, cfg.bands, FLOOR * (1.0 + analytic.abs())),
            });
        }
    }
    Ok(VerifySummary { seed: cfg.seed, n: cfg.n, rows })
}
