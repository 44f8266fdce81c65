// SPDX-License-Identifier: Apache-2.0

//! Linear position measurements that attain `ε²σ(P1)² + σ(Q1)²η(P1)² = ħ²/4`.
//!
//! A measurement with transfer matrix `[[a, b], [c, d]]` attains the bound in
//! the minimum uncertainty state `ψ = (q1, p1, σ1)` iff
//!
//! * (i) `c > 0`, `d > 0`, `c + d = 1`, and
//! * (ii) the probe is the minimum uncertainty state `ξ_c` with mean position
//!   `q1`, mean momentum `−p1` and position spread `√(c/(1−c))·σ1`.
//!
//! Both the two-condition form and the four moment conditions it is derived
//! from are exposed so they can be checked against each other.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dynamics::{transfer_matrix, InteractionParams, TransferMatrix};
use crate::error::{finite, Error, Result};
use crate::gaussian::{Constants, GaussianState};
use crate::measurement::LinearPositionMeasurement;

/// Default tolerance for the optimality predicates.
pub const THEOREM_TOL: f64 = 1e-9;

fn check_open_unit(name: &'static str, x: f64) -> Result<f64> {
    if finite(name, x)? > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(Error::OutOfRange { name, value: x, range: "(0, 1)" })
    }
}

fn require_minimum_uncertainty(psi: &GaussianState, consts: &Constants) -> Result<()> {
    if psi.is_minimum_uncertainty(consts, THEOREM_TOL) {
        Ok(())
    } else {
        Err(Error::Precondition("system state must be a minimum uncertainty state".into()))
    }
}

/// The unique probe state that makes a measurement with `c + d = 1` optimal
/// for `psi`.
pub fn probe_xi_c(c: f64, psi: &GaussianState, consts: &Constants) -> Result<GaussianState> {
    check_open_unit("c", c)?;
    require_minimum_uncertainty(psi, consts)?;
    let sigma = (c / (1.0 - c)).sqrt() * psi.sigma_q;
    GaussianState::minimum_uncertainty(psi.mean_q, -psi.mean_p, sigma, consts)
}

/// Outcome of the two optimality conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TheoremConditions {
    /// `c > 0`, `d > 0`, `c + d = 1`.
    pub transfer: bool,
    /// The probe equals `ξ_c`.
    pub probe: bool,
}

impl TheoremConditions {
    pub fn holds(&self) -> bool {
        self.transfer && self.probe
    }
}

fn near(x: f64, y: f64, tol: f64, scale: f64) -> bool {
    (x - y).abs() <= tol * scale
}

pub fn theorem_conditions(
    m: &LinearPositionMeasurement,
    psi: &GaussianState,
    consts: &Constants,
    tol: f64,
) -> TheoremConditions {
    let TransferMatrix { c, d, .. } = m.transfer();
    let xi = &m.probe;
    let transfer = c > 0.0 && d > 0.0 && near(c + d, 1.0, tol, 1.0);
    let probe = c > 0.0
        && c < 1.0
        && xi.is_minimum_uncertainty(consts, tol)
        && near(xi.mean_q, psi.mean_q, tol, psi.sigma_q + psi.mean_q.abs())
        && near(xi.mean_p, -psi.mean_p, tol, psi.sigma_p + psi.mean_p.abs())
        && {
            let target = (c / (1.0 - c)).sqrt() * psi.sigma_q;
            near(xi.sigma_q, target, tol, target)
        };
    TheoremConditions { transfer, probe }
}

/// The four moment conditions equivalent to equality in the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProofConditions {
    /// (1) `(c−1)⟨Q1⟩ + d⟨Q2⟩ = 0` and `(d−1)⟨P1⟩ − c⟨P2⟩ = 0`.
    pub unbiased: bool,
    /// (2) `|c|σ(Q1)σ(P2) = |d|σ(Q2)σ(P1)`.
    pub balanced: bool,
    /// (3) `σ(Q2)σ(P2) = ħ/2`.
    pub probe_minimum: bool,
    /// (4) `c, d ≥ 0` and `c + d = 1`.
    pub convex: bool,
}

impl ProofConditions {
    pub fn holds(&self) -> bool {
        self.unbiased && self.balanced && self.probe_minimum && self.convex
    }
}

pub fn proof_conditions(
    m: &LinearPositionMeasurement,
    psi: &GaussianState,
    consts: &Constants,
    tol: f64,
) -> ProofConditions {
    let TransferMatrix { c, d, .. } = m.transfer();
    let xi = &m.probe;
    let q_scale = (c - 1.0).abs() * psi.mean_q.abs() + d.abs() * xi.mean_q.abs() + psi.sigma_q;
    let p_scale = (d - 1.0).abs() * psi.mean_p.abs() + c.abs() * xi.mean_p.abs() + psi.sigma_p;
    let unbiased = near((c - 1.0) * psi.mean_q + d * xi.mean_q, 0.0, tol, q_scale)
        && near((d - 1.0) * psi.mean_p - c * xi.mean_p, 0.0, tol, p_scale);
    let lhs = c.abs() * psi.sigma_q * xi.sigma_p;
    let rhs = d.abs() * xi.sigma_q * psi.sigma_p;
    let balanced = near(lhs, rhs, tol, lhs + rhs + consts.kennard());
    ProofConditions {
        unbiased,
        balanced,
        probe_minimum: xi.is_minimum_uncertainty(consts, tol),
        convex: c >= -tol && d >= -tol && near(c + d, 1.0, tol, 1.0),
    }
}

/// Probe position variance forced by condition (2) for minimum uncertainty
/// system and probe: `σ(Q2)² = |c|/|d| · σ(Q1)²`.
pub fn balanced_probe_variance(c: f64, d: f64, sigma_q1: f64) -> f64 {
    c.abs() / d.abs() * sigma_q1 * sigma_q1
}

/// `l(c, d) = ((c−1)² + (d−1)²)/4 + |cd|/2`; the left-hand side of the bound
/// is at least `ħ² l(c, d)`, and `l ≥ 1/4` with equality iff `c, d ≥ 0`,
/// `c + d = 1`.
pub fn lower_bound_factor(c: f64, d: f64) -> f64 {
    0.25 * ((c - 1.0).powi(2) + (d - 1.0).powi(2)) + 0.5 * (c * d).abs()
}

/// Whether `m` attains the error-disturbance bound in the minimum uncertainty
/// state `psi`. Boundary cases `c = 0` or `d = 0` are rejected.
pub fn is_minimum_error_disturbance(
    m: &LinearPositionMeasurement,
    psi: &GaussianState,
    consts: &Constants,
    tol: f64,
) -> bool {
    theorem_conditions(m, psi, consts, tol).holds()
}

/// The three named optimal families, one per sign of the discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyKind {
    /// `D = 1`, oscillatory.
    A,
    /// `D = 0`, polynomial.
    B,
    /// `D = −1`, hyperbolic.
    C,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 3] = [FamilyKind::A, FamilyKind::B, FamilyKind::C];

    /// Coupling and interaction time of the member with error parameter `mu`.
    pub fn parameters(self, mu: f64) -> Result<(InteractionParams, f64)> {
        check_open_unit("mu", mu)?;
        let (params, tau) = match self {
            FamilyKind::A => {
                (InteractionParams::new((mu / (2.0 - mu)).sqrt(), -((2.0 - mu) / mu).sqrt(), 0.0)?, (1.0 - mu).acos())
            }
            FamilyKind::B => (InteractionParams::new(1.0, -1.0, 1.0)?, mu),
            FamilyKind::C => (InteractionParams::new(2.0 * (1.0 - mu) / (2.0 - mu), 0.0, 1.0)?, -(-mu).ln_1p()),
        };
        Ok((params, tau))
    }

    /// `e^{τS}` of the member with parameter `mu`, written out directly.
    pub fn expected_transfer(self, mu: f64) -> TransferMatrix {
        match self {
            FamilyKind::A => TransferMatrix { a: 1.0 - mu, b: mu - 2.0, c: mu, d: 1.0 - mu },
            FamilyKind::B => TransferMatrix { a: 1.0 + mu, b: -mu, c: mu, d: 1.0 - mu },
            FamilyKind::C => TransferMatrix { a: 1.0 / (1.0 - mu), b: 0.0, c: mu, d: 1.0 - mu },
        }
    }

    pub fn discriminant(self) -> f64 {
        match self {
            FamilyKind::A => 1.0,
            FamilyKind::B => 0.0,
            FamilyKind::C => -1.0,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::A => "A",
            FamilyKind::B => "B",
            FamilyKind::C => "C",
        })
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(FamilyKind::A),
            "B" | "b" => Ok(FamilyKind::B),
            "C" | "c" => Ok(FamilyKind::C),
            other => Err(Error::Precondition(format!("unknown family '{other}' (expected A, B or C)"))),
        }
    }
}

/// The member of `kind` with `c = mu`, probed by `ξ_mu`.
pub fn family(kind: FamilyKind, mu: f64, psi: &GaussianState, consts: &Constants) -> Result<LinearPositionMeasurement> {
    let (params, tau) = kind.parameters(mu)?;
    LinearPositionMeasurement::new(params, tau, probe_xi_c(mu, psi, consts)?)
}

/// Sign class of the discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Positive,
    Zero,
    Negative,
}

impl Regime {
    /// `|D| ≤ 1e−12·(1 + γ²)` counts as zero.
    pub fn classify(discriminant: f64, gamma: f64) -> Self {
        if discriminant.abs() <= 1e-12 * (1.0 + gamma * gamma) {
            Regime::Zero
        } else if discriminant > 0.0 {
            Regime::Positive
        } else {
            Regime::Negative
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Positive => "positive",
            Regime::Zero => "zero",
            Regime::Negative => "negative",
        })
    }
}

/// Target error parameter `mu = c`, coupling `gamma` and discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverInput {
    pub mu: f64,
    pub gamma: f64,
    pub discriminant: f64,
}

impl SolverInput {
    pub fn new(mu: f64, gamma: f64, discriminant: f64) -> Result<Self> {
        check_open_unit("mu", mu)?;
        finite("gamma", gamma)?;
        finite("discriminant", discriminant)?;
        Ok(Self { mu, gamma, discriminant })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOutput {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub tau: f64,
    /// Discriminant actually used (zero in the zero regime).
    pub discriminant: f64,
    pub regime: Regime,
    /// Transfer matrix of the solution.
    pub transfer: TransferMatrix,
    /// `max(|c − mu|, |d − (1 − mu)|)`.
    pub residual: f64,
}

impl SolverOutput {
    pub fn params(&self) -> InteractionParams {
        InteractionParams { alpha: self.alpha, beta: self.beta, gamma: self.gamma }
    }

    /// The optimal measurement for `psi` with these couplings.
    pub fn measurement(&self, mu: f64, psi: &GaussianState, consts: &Constants) -> Result<LinearPositionMeasurement> {
        LinearPositionMeasurement::new(self.params(), self.tau, probe_xi_c(mu, psi, consts)?)
    }
}

/// `u₊(α) = (γμ/α + 1 − μ)² + (√D·μ/α)²`, which equals 1 exactly at the
/// solution when `D > 0`. Strictly decreasing on `α > 0` for `γ ≥ 0`.
pub fn u_plus(alpha: f64, mu: f64, gamma: f64, discriminant: f64) -> f64 {
    (gamma * mu / alpha + 1.0 - mu).powi(2) + discriminant * (mu / alpha).powi(2)
}

/// `u₋(α) = (γμ/α + 1 − μ)² − (√−D·μ/α)²`, the `D < 0` counterpart. The
/// same polynomial as [`u_plus`]; the sign of `D` carries the difference.
pub fn u_minus(alpha: f64, mu: f64, gamma: f64, discriminant: f64) -> f64 {
    u_plus(alpha, mu, gamma, discriminant)
}

/// Positive root of `(2−μ)α² − 2(1−μ)γα − μ(γ² + D) = 0`.
///
/// Clearing denominators in `u±(α) = 1` gives this quadratic for either sign
/// of `D`.
pub fn quadratic_alpha(mu: f64, gamma: f64, discriminant: f64) -> Option<f64> {
    let half_b = (1.0 - mu) * gamma;
    let k = gamma * gamma + discriminant;
    let disc = half_b * half_b + (2.0 - mu) * mu * k;
    if disc < 0.0 {
        return None;
    }
    let root = (half_b + disc.sqrt()) / (2.0 - mu);
    (root > 0.0).then_some(root)
}

/// Couplings `(α, β)` and time `τ` with `α > 0` giving `c = mu`, `d = 1 − mu`.
///
/// Preconditions: `γ ≥ 0` when `D > 0`, `γ > 0` when `D = 0`, and `γ ≥ √−D`
/// when `D < 0` (otherwise no solution exists).
pub fn solve_params(input: &SolverInput) -> Result<SolverOutput> {
    let SolverInput { mu, gamma, discriminant } = SolverInput::new(input.mu, input.gamma, input.discriminant)?;
    let regime = Regime::classify(discriminant, gamma);
    let d = if regime == Regime::Zero { 0.0 } else { discriminant };
    match regime {
        Regime::Positive if gamma < 0.0 => {
            return Err(Error::Precondition(format!("gamma = {gamma} must be >= 0 when D > 0")));
        }
        Regime::Zero if gamma <= 0.0 => {
            return Err(Error::Precondition(format!("gamma = {gamma} must be > 0 when D = 0")));
        }
        Regime::Negative if gamma < (-d).sqrt() => {
            return Err(Error::Infeasible("gamma < sqrt(-D)".into()));
        }
        _ => {}
    }
    let alpha = quadratic_alpha(mu, gamma, d)
        .ok_or_else(|| Error::Numerical(format!("no positive root for mu={mu}, gamma={gamma}, D={d}")))?;
    // Adding 0.0 maps −0 to +0 when γ² + D vanishes.
    let beta = -(gamma * gamma + d) / alpha + 0.0;
    let tau = match regime {
        Regime::Positive => {
            let w = d.sqrt();
            let cos = gamma * mu / alpha + 1.0 - mu;
            let sin = w * mu / alpha;
            let tau = sin.atan2(cos) / w;
            debug_assert!(tau > 0.0 && tau < FRAC_PI_2 / w);
            tau
        }
        Regime::Zero => mu / gamma,
        Regime::Negative => {
            // τκ = arccosh(cosh) = ln(cosh + sinh), sinh = κμ/α > 0.
            let k = (-d).sqrt();
            (mu * (gamma + k - alpha) / alpha).ln_1p() / k
        }
    };
    let params = InteractionParams::new(alpha, beta, gamma)?;
    let transfer = transfer_matrix(&params, tau)?;
    let residual = (transfer.c - mu).abs().max((transfer.d - (1.0 - mu)).abs());
    if !(residual <= 1e-9) {
        return Err(Error::Numerical(format!("solution residual {residual:e} too large")));
    }
    Ok(SolverOutput { alpha, beta, gamma, tau, discriminant: d, regime, transfer, residual })
}
