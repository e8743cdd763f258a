//! Parametric state families (Werner, Gisin, X states), named three-qubit
//! states, and one-parameter threshold scans.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::absolute::{decide_aus3, f3_global_max, AbsoluteError, AbsoluteVerdict};
use crate::numlin::ComplexMatrix4;
use crate::states::{
    singlet, spectrum_report, validate, DensityMatrix, PureThreeQubitState, StateError,
};

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_WIDTH: f64 = 1e-13;
/// Slack on the X-state and normalization constraints.
pub const CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Absolute(#[from] AbsoluteError),
}

/// `p|ψ⁻⟩⟨ψ⁻| + (1−p) I/4`, `p ∈ [0, 1]`.
pub fn werner(p: f64) -> Result<DensityMatrix, FamilyError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(FamilyError::OutOfRange(format!("werner p = {p}, expected [0, 1]")));
    }
    let m = singlet().matrix().scale(p) + ComplexMatrix4::identity().scale((1.0 - p) / 4.0);
    Ok(validate(&m)?)
}

/// `λ|ψ_θ⟩⟨ψ_θ| + (1−λ)(|00⟩⟨00| + |11⟩⟨11|)/2` with
/// `|ψ_θ⟩ = sin θ |01⟩ + cos θ |10⟩`, `λ ∈ [0, 1]`, `θ ∈ (0, π/2)`.
pub fn gisin(lambda: f64, theta: f64) -> Result<DensityMatrix, FamilyError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(FamilyError::OutOfRange(format!("gisin λ = {lambda}, expected [0, 1]")));
    }
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(FamilyError::OutOfRange(format!("gisin θ = {theta}, expected (0, π/2)")));
    }
    let z = Complex64::new(0.0, 0.0);
    let psi = [z, Complex64::new(theta.sin(), 0.0), Complex64::new(theta.cos(), 0.0), z];
    let mix = ComplexMatrix4::from_real_diagonal([0.5, 0.0, 0.0, 0.5]);
    let m = ComplexMatrix4::projector(&psi).scale(lambda) + mix.scale(1.0 - lambda);
    Ok(validate(&m)?)
}

/// X state with diagonal `v₁..v₄` and real anti-diagonal couplings `v₅`
/// (`|00⟩↔|11⟩`) and `v₆` (`|01⟩↔|10⟩`).
pub fn x_state(v: [f64; 6]) -> Result<DensityMatrix, FamilyError> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(FamilyError::OutOfRange("non-finite X-state parameter".into()));
    }
    if v[..4].iter().any(|&x| x < 0.0) {
        return Err(FamilyError::OutOfRange("v1..v4 must be nonnegative".into()));
    }
    let total: f64 = v[..4].iter().sum();
    if (total - 1.0).abs() > CONSTRAINT_TOL {
        return Err(FamilyError::OutOfRange(format!("v1+v2+v3+v4 = {total}, expected 1")));
    }
    if v[4] * v[4] > v[0] * v[3] + CONSTRAINT_TOL {
        return Err(FamilyError::OutOfRange("v5² > v1·v4".into()));
    }
    if v[5] * v[5] > v[1] * v[2] + CONSTRAINT_TOL {
        return Err(FamilyError::OutOfRange("v6² > v2·v3".into()));
    }
    let mut m = ComplexMatrix4::from_real_diagonal([v[0], v[1], v[2], v[3]]);
    m.0[0][3] = Complex64::new(v[4], 0.0);
    m.0[3][0] = Complex64::new(v[4], 0.0);
    m.0[1][2] = Complex64::new(v[5], 0.0);
    m.0[2][1] = Complex64::new(v[5], 0.0);
    Ok(validate(&m)?)
}

/// `Σ v_i² + 2(v₅² + v₆²)`, the purity of the X state; AUS₃ iff `≤ ½`.
pub fn x_state_purity(v: &[f64; 6]) -> f64 {
    v[..4].iter().map(|x| x * x).sum::<f64>() + 2.0 * (v[4] * v[4] + v[5] * v[5])
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz() -> PureThreeQubitState {
    let mut a = [Complex64::new(0.0, 0.0); 8];
    a[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    a[7] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    PureThreeQubitState::normalized(a).expect("nonzero")
}

/// `(|001⟩ + |010⟩ + |100⟩)/√3`.
pub fn w_state() -> PureThreeQubitState {
    let mut a = [Complex64::new(0.0, 0.0); 8];
    for i in [1, 2, 4] {
        a[i] = Complex64::new(1.0, 0.0);
    }
    PureThreeQubitState::normalized(a).expect("nonzero")
}

/// `|000⟩`.
pub fn product_000() -> PureThreeQubitState {
    let mut a = [Complex64::new(0.0, 0.0); 8];
    a[0] = Complex64::new(1.0, 0.0);
    PureThreeQubitState::normalized(a).expect("nonzero")
}

/// One-parameter families that can be scanned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Parameter `p`.
    Werner,
    /// Parameter `λ` at fixed `θ`.
    Gisin { theta: f64 },
}

impl Family {
    pub fn gisin_default() -> Self {
        Family::Gisin { theta: FRAC_PI_4 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Werner => "werner",
            Family::Gisin { .. } => "gisin",
        }
    }

    pub fn parameter_name(&self) -> &'static str {
        match self {
            Family::Werner => "p",
            Family::Gisin { .. } => "lambda",
        }
    }

    pub fn state(&self, x: f64) -> Result<DensityMatrix, FamilyError> {
        match *self {
            Family::Werner => werner(x),
            Family::Gisin { theta } => gisin(x, theta),
        }
    }

    /// Spectrum known in closed form, descending.
    pub fn closed_form_spectrum(&self, x: f64) -> [f64; 4] {
        let mut s = match self {
            Family::Werner => {
                let q = (1.0 - x) / 4.0;
                [(1.0 + 3.0 * x) / 4.0, q, q, q]
            }
            Family::Gisin { .. } => {
                let q = (1.0 - x) / 2.0;
                [x, q, q, 0.0]
            }
        };
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Parameter value where the family leaves AUS₃.
    pub fn closed_form_threshold(&self) -> f64 {
        match self {
            Family::Werner => 1.0 / 3f64.sqrt(),
            Family::Gisin { .. } => 2.0 / 3.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Werner => write!(f, "werner"),
            Family::Gisin { theta } => write!(f, "gisin(theta={theta})"),
        }
    }
}

/// Evenly spaced grid `from, from+step, …` up to and including `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(from: f64, to: f64, step: f64) -> Result<Self, FamilyError> {
        if !(from.is_finite() && to.is_finite() && step.is_finite()) {
            return Err(FamilyError::InvalidGrid("non-finite bound or step".into()));
        }
        if to < from {
            return Err(FamilyError::InvalidGrid(format!("empty range [{from}, {to}]")));
        }
        if step <= 0.0 {
            return Err(FamilyError::InvalidGrid(format!("step {step} must be positive")));
        }
        Ok(Grid { from, to, step })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.to - self.from) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| (self.from + k as f64 * self.step).min(self.to))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyPoint {
    pub family: Family,
    pub parameter: f64,
    pub state: DensityMatrix,
    pub verdict: AbsoluteVerdict,
}

impl FamilyPoint {
    /// `f3_global_max − 1`, the plotted quantity.
    pub fn excess(&self) -> f64 {
        self.verdict.f3_global_max - 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub family: Family,
    pub grid: Grid,
    pub points: Vec<FamilyPoint>,
    /// First exit from AUS₃ along the grid, refined by bisection.
    pub threshold: Option<f64>,
}

impl Scan {
    /// True when membership holds on one initial run of the grid and never
    /// returns afterwards.
    pub fn boundary_is_monotone(&self) -> bool {
        let first_out = self.points.iter().position(|p| !p.verdict.in_aus3);
        match first_out {
            None => true,
            Some(k) => self.points[k..].iter().all(|p| !p.verdict.in_aus3),
        }
    }
}

pub fn family_point(family: Family, x: f64) -> Result<FamilyPoint, FamilyError> {
    let state = family.state(x)?;
    let verdict = decide_aus3(&state)?;
    Ok(FamilyPoint {
        family,
        parameter: x,
        state,
        verdict,
    })
}

pub fn scan_family(family: Family, grid: Grid) -> Result<Scan, FamilyError> {
    let points: Vec<FamilyPoint> = grid
        .points()
        .into_par_iter()
        .map(|x| family_point(family, x))
        .collect::<Result<_, _>>()?;
    let threshold = match points
        .windows(2)
        .find(|w| w[0].verdict.in_aus3 && !w[1].verdict.in_aus3)
    {
        Some(w) => Some(bisect_exit(family, w[0].parameter, w[1].parameter)?),
        None => None,
    };
    Ok(Scan {
        family,
        grid,
        points,
        threshold,
    })
}

/// Root of `f3_global_max − 1` between `lo` (inside) and `hi` (outside).
fn bisect_exit(family: Family, mut lo: f64, mut hi: f64) -> Result<f64, FamilyError> {
    let excess = |x: f64| -> Result<f64, FamilyError> {
        let spec = spectrum_report(&family.state(x)?)?;
        Ok(f3_global_max(&spec) - 1.0)
    };
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
