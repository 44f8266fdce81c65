// SPDX-License-Identifier: Apache-2.0

//! Heisenberg dynamics of the coupled system–probe pair.
//!
//! With the interaction `αQ1P2 + βP1Q2 + γ(Q1P1 − Q2P2)` and no free
//! evolution, positions evolve by `e^{τS}` and momenta by `e^{−τSᵀ}` where
//! `S = [[γ, β], [α, −γ]]`. `S` is traceless, so `S² = −D·I` with
//! `D = det S = −(γ² + αβ)`, and the exponential has a two-term closed form.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{finite, Error, Result};

/// Coupling coefficients of the interaction Hamiltonian (overall scale fixed to 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl InteractionParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        finite("alpha", alpha)?;
        finite("beta", beta)?;
        finite("gamma", gamma)?;
        let p = Self { alpha, beta, gamma };
        finite("discriminant", p.discriminant())?;
        Ok(p)
    }

    /// The von Neumann model `(1, 0, 0)`: `H = Q1P2`.
    pub fn von_neumann() -> Self {
        Self { alpha: 1.0, beta: 0.0, gamma: 0.0 }
    }

    /// `D = det S = −(γ² + αβ)`.
    pub fn discriminant(&self) -> f64 {
        -(self.gamma * self.gamma + self.alpha * self.beta)
    }
}

/// Entries of `e^{τS}`: `Q1(τ) = aQ1 + bQ2`, `Q2(τ) = cQ1 + dQ2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl TransferMatrix {
    pub const IDENTITY: Self = Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn from_matrix(m: &Matrix2<f64>) -> Self {
        Self { a: m[(0, 0)], b: m[(0, 1)], c: m[(1, 0)], d: m[(1, 1)] }
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.a, self.b, self.c, self.d)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::from_matrix(&(self.matrix() * other.matrix()))
    }
}

/// The generator `S = [[γ, β], [α, −γ]]`.
pub fn interaction_matrix(p: &InteractionParams) -> Matrix2<f64> {
    Matrix2::new(p.gamma, p.beta, p.alpha, -p.gamma)
}

/// Below this value of `|D|τ²` the trigonometric and hyperbolic forms are
/// replaced by their common power series in `Dτ²`.
const SERIES_SEAM: f64 = 1e-6;

/// `(cos(τ√D), sin(τ√D)/√D)` as power series in `x = Dτ²`, valid for either
/// sign of `D`. Only used for `|x| ≤ SERIES_SEAM`, where eight terms are far
/// below one ulp.
fn seam_series(d: f64, tau: f64) -> (f64, f64) {
    let x = d * tau * tau;
    let mut even = 0.0;
    let mut odd = 0.0;
    let mut term = 1.0;
    for k in 0..8u32 {
        even += term;
        let k2 = f64::from(2 * k);
        let odd_term = term / (k2 + 1.0);
        odd += odd_term;
        term *= -x / ((k2 + 1.0) * (k2 + 2.0));
    }
    (even, tau * odd)
}

/// `e^{τS}` in closed form.
///
/// * `D > 0`: `cos(τ√D) I + sin(τ√D)/√D · S`
/// * `D = 0`: `I + τS`
/// * `D < 0`: `cosh(τ√−D) I + sinh(τ√−D)/√−D · S`, evaluated as
///   `e^{τκ}(I + S/κ)/2 + e^{−τκ}(I − S/κ)/2` with `κ = √−D` so the decaying
///   entry is not a difference of two large numbers.
///
/// Near `D = 0` (`|D|τ² ≤ 1e−6`) the series of the analytic functions is used.
pub fn transfer_matrix(p: &InteractionParams, tau: f64) -> Result<TransferMatrix> {
    finite("tau", tau)?;
    if tau < 0.0 {
        return Err(Error::OutOfRange { name: "tau", value: tau, range: "[0, inf)" });
    }
    let p = InteractionParams::new(p.alpha, p.beta, p.gamma)?;
    let d = p.discriminant();
    let x = d * tau * tau;
    let (diag, gen) = if x.abs() <= SERIES_SEAM {
        seam_series(d, tau)
    } else if d > 0.0 {
        let w = d.sqrt();
        let (s, c) = (tau * w).sin_cos();
        (c, s / w)
    } else {
        let k = (-d).sqrt();
        let grow = (tau * k).exp();
        let decay = (-tau * k).exp();
        let minus = 0.5 * (grow - decay);
        let t = TransferMatrix {
            a: 0.5 * (grow * (1.0 + p.gamma / k) + decay * (1.0 - p.gamma / k)),
            b: minus / k * p.beta,
            c: minus / k * p.alpha,
            d: 0.5 * (grow * (1.0 - p.gamma / k) + decay * (1.0 + p.gamma / k)),
        };
        return check_finite(t);
    };
    check_finite(TransferMatrix { a: diag + gen * p.gamma, b: gen * p.beta, c: gen * p.alpha, d: diag - gen * p.gamma })
}

fn check_finite(t: TransferMatrix) -> Result<TransferMatrix> {
    if [t.a, t.b, t.c, t.d].iter().all(|x| x.is_finite()) {
        Ok(t)
    } else {
        Err(Error::Numerical("transfer matrix overflowed".into()))
    }
}

/// `e^{−τSᵀ} = [[d, −c], [−b, a]]`, the inverse transpose of a unimodular
/// position transfer matrix.
pub fn momentum_transfer(t: &TransferMatrix) -> Matrix2<f64> {
    Matrix2::new(t.d, -t.c, -t.b, t.a)
}

/// `e^{τS}` by scaling and squaring of the Taylor series.
///
/// Shares no code with [`transfer_matrix`]; it is the reference the closed
/// forms are checked against.
pub fn expm_series(s: &Matrix2<f64>, tau: f64) -> Matrix2<f64> {
    let a = s * tau;
    let norm = a.abs().row_sum().max();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a * scale;
    let mut sum = Matrix2::identity();
    let mut term = Matrix2::identity();
    for k in 1..=30 {
        term = term * a / f64::from(k);
        sum += term;
        if term.abs().max() <= f64::EPSILON * 1e-3 * sum.abs().max() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}
