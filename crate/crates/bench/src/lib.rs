// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the benchmarks.

use edr_core::{family, Constants, FamilyKind, GaussianState, LinearPositionMeasurement};

pub struct Fixture {
    pub consts: Constants,
    pub psi: GaussianState,
    pub measurement: LinearPositionMeasurement,
}

/// Family `kind` at `mu` on a displaced packet of unit width.
pub fn fixture(kind: FamilyKind, mu: f64) -> Fixture {
    let consts = Constants::default();
    let psi = GaussianState::minimum_uncertainty(0.7, -0.4, 1.0, &consts).expect("valid state");
    let measurement = family(kind, mu, &psi, &consts).expect("valid family member");
    Fixture { consts, psi, measurement }
}
