//! Steering operators and witnesses, including the activation witness
//! `W = U_e† S^W U_e` that certifies a state can be rotated into violation.
//!
//! The witness for a setting `μ` is the affine operator `S^W = I − S(μ)`, so
//! that `Tr(S^W ρ) = 1 − (signed functional)` and negative expectation means
//! the setting certifies violation.

use thiserror::Error;

use crate::absolute::{bell_diagonal_canonical, decide_aus3, AbsoluteError};
use crate::numlin::ComplexMatrix4;
use crate::states::DensityMatrix;
use crate::steering::{correlation_operator, optimal_directions, MeasurementSetting, SteeringError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("state lies in AUS3 (f3_global_max = {f3_global_max}); no global unitary activates it")]
    NotActivatable { f3_global_max: f64 },
    #[error(transparent)]
    Setting(#[from] SteeringError),
    #[error(transparent)]
    Absolute(#[from] AbsoluteError),
}

/// `S(μ) = (1/√n) Σ_i (û_i·s) ⊗ (v̂_i·s)`.
pub fn steering_operator(mu: &MeasurementSetting) -> ComplexMatrix4 {
    correlation_operator(mu)
}

/// `S^W = I − S(μ)`.
pub fn steering_witness(mu: &MeasurementSetting) -> ComplexMatrix4 {
    ComplexMatrix4::identity() - steering_operator(mu)
}

/// A Hermitian operator with nonnegative expectation on all of AUS₃ and
/// negative expectation on the state it was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessOperator {
    pub matrix: ComplexMatrix4,
    /// `U_e`, taking the generating state to its Bell-diagonal form.
    pub activating_unitary: ComplexMatrix4,
    pub setting: MeasurementSetting,
    /// `±1`; the witness is `U_e† (I − sign·S(μ)) U_e`.
    pub sign: f64,
}

impl WitnessOperator {
    /// The un-rotated witness `I − sign·S(μ)`.
    pub fn base_witness(&self) -> ComplexMatrix4 {
        ComplexMatrix4::identity() - steering_operator(&self.setting).scale(self.sign)
    }

    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        rho.expectation(&self.matrix)
    }
}

pub fn activation_witness(state: &DensityMatrix) -> Result<WitnessOperator, WitnessError> {
    let verdict = decide_aus3(state)?;
    if verdict.in_aus3 {
        return Err(WitnessError::NotActivatable {
            f3_global_max: verdict.f3_global_max,
        });
    }
    let canonical = bell_diagonal_canonical(state)?;
    let setting = optimal_directions(&canonical.state, 3)?;
    let s = steering_operator(&setting);
    let sign = if canonical.state.expectation(&s) < 0.0 { -1.0 } else { 1.0 };
    let base = ComplexMatrix4::identity() - s.scale(sign);
    let u = canonical.unitary;
    let matrix = (u.adjoint() * base * u).hermitian_part();
    Ok(WitnessOperator {
        matrix,
        activating_unitary: u,
        setting,
        sign,
    })
}
