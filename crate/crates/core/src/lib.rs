// SPDX-License-Identifier: Apache-2.0

//! Linear position measurements of a one-dimensional particle prepared in a
//! Gaussian state.
//!
//! The particle (system, canonical pair `Q1`, `P1`) is coupled to a probe
//! particle (`Q2`, `P2`) through a quadratic interaction
//! `H = αQ1P2 + βP1Q2 + γ(Q1P1 − Q2P2)` for a time `τ`, after which the probe
//! position `Q2(τ)` is read out as the value of `Q1`. Heisenberg evolution is
//! linear, so every quantity of interest reduces to a 2×2 transfer matrix and
//! first/second moments of the initial product state:
//!
//! * [`dynamics`]: the generator and its exponential in every discriminant regime.
//! * [`measurement`]: q-rms error `ε(Q1)`, disturbances `η(P1)`, `η(Q1)` and the
//!   error-disturbance bound `ε²σ(P1)² + σ(Q1)²η(P1)² ≥ ħ²/4`.
//! * [`optimal`]: measurements that attain the bound with equality, the three
//!   named families and the general parameter solver.
//! * [`distributions`]: joint/marginal/conditional laws of the outputs and the
//!   posterior states.
//! * [`oracle`]: a phase-space Monte Carlo backend that checks the closed forms
//!   through an independent code path.
//!
//! ```
//! use edr_core::{Constants, FamilyKind, GaussianState, edr_report, family};
//!
//! let consts = Constants::default();
//! let psi = GaussianState::minimum_uncertainty(0.0, 0.0, 1.0, &consts).unwrap();
//! let m = family(FamilyKind::A, 0.5, &psi, &consts).unwrap();
//! let report = edr_report(&m, &psi, &consts);
//! assert!(report.saturated);
//! assert!((report.epsilon_q.powi(2) - 0.5).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod dynamics;
mod error;
pub mod gaussian;
pub mod measurement;
pub mod optimal;
pub mod oracle;
pub mod quadrature;
pub mod verify;

pub use nalgebra::{Matrix2, Vector2};
pub use num_complex::Complex64;

pub use distributions::{
    conditional_q0_given_meter, joint_p, joint_pq_after, joint_q, joint_q_after, meter_marginal, mixture_moments,
    posterior_family, Interval, MixtureMoments, PosteriorFamily,
};
pub use dynamics::{
    expm_series, interaction_matrix, momentum_transfer, transfer_matrix, InteractionParams, TransferMatrix,
};
pub use error::{Error, Result};
pub use gaussian::{char2, gauss_rms, pdf1, sample2, Constants, Gaussian1D, Gaussian2D, GaussianState};
pub use measurement::{
    disturbance_p, disturbance_q, edr_report, error_q, gauss_disturbance_p, gauss_error_q, ErrorDisturbanceReport,
    LinearPositionMeasurement,
};
pub use optimal::{
    family, is_minimum_error_disturbance, probe_xi_c, solve_params, FamilyKind, Regime, SolverInput, SolverOutput,
};
pub use oracle::{
    draw_initial, empirical_report, propagate, propagate_measurement, EmpiricalReport, Estimate, PhaseSampleBatch,
};
pub use verify::{run_verification, CheckRow, VerifyConfig, VerifySummary};
