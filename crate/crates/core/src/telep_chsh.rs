//! Teleportation usefulness `N(ρ) = Tr√(TᵀT)` and the CHSH quantity
//! `M(ρ)` (sum of the two largest eigenvalues of `TᵀT`).

use crate::numlin::singular_values_3x3;
use crate::states::{to_bloch, DensityMatrix};
use crate::steering::f3_max;

/// Both quantities from one singular-value computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxCriteria {
    /// `Σ √u_i`.
    pub n: f64,
    /// `u₁ + u₂`.
    pub m: f64,
    /// Eigenvalues of `TᵀT`, descending.
    pub u: [f64; 3],
}

impl AuxCriteria {
    pub fn teleportation_useful(&self) -> bool {
        self.n > 1.0
    }

    pub fn violates_chsh(&self) -> bool {
        self.m > 1.0
    }
}

pub fn aux_criteria(rho: &DensityMatrix) -> AuxCriteria {
    let s = singular_values_3x3(&to_bloch(rho).t);
    AuxCriteria {
        n: s.iter().sum(),
        m: s[0] * s[0] + s[1] * s[1],
        u: s.map(|x| x * x),
    }
}

pub fn teleportation_n(rho: &DensityMatrix) -> f64 {
    aux_criteria(rho).n
}

pub fn chsh_m(rho: &DensityMatrix) -> f64 {
    aux_criteria(rho).m
}

/// Whether `F₃ > 1 ⇒ N > 1` holds for this state.
pub fn steer_implies_teleport_check(rho: &DensityMatrix) -> bool {
    !f3_max(rho).violated || aux_criteria(rho).teleportation_useful()
}
