//! Absolute non-violation of the three-setting linear steering inequality
//! for two-qubit states.
//!
//! A two-qubit state is *absolutely* non-violating (the set AUS₃) when no
//! global unitary can bring it to violate `F₃ ≤ 1`. Membership reduces to a
//! spectral condition, `Tr ρ² ≤ ½`, which this crate evaluates along several
//! independent numerical routes and cross-checks. Alongside it are the
//! steering functionals themselves, teleportation and CHSH criteria,
//! activation witnesses, Monte Carlo tools over the unitary group, and
//! threshold scans for standard state families.

#![allow(clippy::needless_range_loop)]

pub mod absolute;
pub mod cli;
pub mod families;
pub mod numlin;
pub mod states;
pub mod steering;
pub mod telep_chsh;
pub mod unitary;
pub mod verify;
pub mod witness;

pub use absolute::{
    bell_diagonal_canonical, decide_aus3, f3_global_max, frobenius_ball_check,
    reduced_pair_verdict, AbsoluteError, AbsoluteVerdict, BellDiagonalState,
};
pub use numlin::{ComplexMatrix4, RealMatrix3};
pub use states::{
    from_bloch, spectrum_report, to_bloch, validate, BlochForm, DensityMatrix,
    PureThreeQubitState, SpectrumReport, StateError,
};
pub use steering::{f2_max, f3_max, steering_functional, MeasurementSetting, SteeringValue};
