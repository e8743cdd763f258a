//! The linear n-setting steering functional
//! `F_n(ρ, μ) = (1/√n) |Σ_i ⟨(û_i·s) ⊗ (v̂_i·s)⟩_ρ|` and its maxima over
//! measurement settings.

use std::f64::consts::SQRT_2;

use thiserror::Error;

use crate::numlin::{dot3, norm3, svd_right3, ComplexMatrix4, RealMatrix3};
use crate::states::{pauli_dot, to_bloch, DensityMatrix};

/// Tolerance on unit length and orthonormality of setting directions.
pub const DIRECTION_TOL: f64 = 1e-10;
/// Below this, `|T v_i|` is treated as zero when building optimal settings.
pub const DEGENERATE_TOL: f64 = 1e-12;
/// Slack on the joint-measurability bound `F₃ ≤ √3`.
pub const JM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SteeringError {
    #[error("invalid measurement setting: {0}")]
    InvalidSetting(String),
}

/// `n ∈ {2, 3}` pairs of directions: Alice's unit vectors `u` and Bob's
/// orthonormal vectors `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    u: Vec<[f64; 3]>,
    v: Vec<[f64; 3]>,
}

impl MeasurementSetting {
    pub fn new(u: Vec<[f64; 3]>, v: Vec<[f64; 3]>) -> Result<Self, SteeringError> {
        let invalid = |msg: String| Err(SteeringError::InvalidSetting(msg));
        if u.len() != v.len() {
            return invalid(format!("{} Alice directions but {} Bob directions", u.len(), v.len()));
        }
        if !(2..=3).contains(&u.len()) {
            return invalid(format!("n = {} settings, expected 2 or 3", u.len()));
        }
        for (i, ui) in u.iter().enumerate() {
            if !ui.iter().all(|x| x.is_finite()) || (norm3(ui) - 1.0).abs() > DIRECTION_TOL {
                return invalid(format!("u[{i}] is not a unit vector"));
            }
        }
        for i in 0..v.len() {
            if !v[i].iter().all(|x| x.is_finite()) {
                return invalid(format!("v[{i}] is not finite"));
            }
            for j in i..v.len() {
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot3(&v[i], &v[j]) - target).abs() > DIRECTION_TOL {
                    return invalid(format!("v[{i}], v[{j}] are not orthonormal"));
                }
            }
        }
        Ok(MeasurementSetting { u, v })
    }

    /// `u_i = v_i = e_i` for the first `n` coordinate axes.
    pub fn axes(n: usize) -> Result<Self, SteeringError> {
        let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let dirs: Vec<_> = e.iter().copied().take(n).collect();
        Self::new(dirs.clone(), dirs)
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn alice(&self) -> &[[f64; 3]] {
        &self.u
    }

    pub fn bob(&self) -> &[[f64; 3]] {
        &self.v
    }

    fn prefactor(&self) -> f64 {
        1.0 / (self.n() as f64).sqrt()
    }
}

/// Value of the functional with its violation flag (`value > 1`, exact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringValue {
    pub value: f64,
    pub violated: bool,
}

impl SteeringValue {
    pub fn new(value: f64) -> Self {
        SteeringValue {
            value,
            violated: value > 1.0,
        }
    }
}

/// `(1/√n) Σ u_iᵀ T v_i` before the absolute value.
pub fn signed_functional_bloch(t: &RealMatrix3, mu: &MeasurementSetting) -> f64 {
    let s: f64 = mu.u.iter().zip(&mu.v).map(|(u, v)| t.bilinear(u, v)).sum();
    mu.prefactor() * s
}

/// `(1/√n) Σ_i (û_i·s) ⊗ (v̂_i·s)`.
pub fn correlation_operator(mu: &MeasurementSetting) -> ComplexMatrix4 {
    mu.u
        .iter()
        .zip(&mu.v)
        .fold(ComplexMatrix4::zeros(), |acc, (u, v)| {
            acc + ComplexMatrix4::kron(&pauli_dot(u), &pauli_dot(v))
        })
        .scale(mu.prefactor())
}

/// Same quantity as [`signed_functional_bloch`], evaluated as a matrix trace.
pub fn signed_functional_matrix(rho: &DensityMatrix, mu: &MeasurementSetting) -> f64 {
    rho.expectation(&correlation_operator(mu))
}

pub fn steering_functional(rho: &DensityMatrix, mu: &MeasurementSetting) -> SteeringValue {
    let t = to_bloch(rho).t;
    SteeringValue::new(signed_functional_bloch(&t, mu).abs())
}

/// `max_μ F₃(ρ, μ) = ‖T‖_F`.
pub fn f3_max(rho: &DensityMatrix) -> SteeringValue {
    SteeringValue::new(to_bloch(rho).t.frobenius_norm())
}

/// `max_μ F₂(ρ, μ) = √(s₁² + s₂²)` over the two largest singular values.
pub fn f2_max(rho: &DensityMatrix) -> SteeringValue {
    let (s, _) = svd_right3(&to_bloch(rho).t);
    SteeringValue::new((s[0] * s[0] + s[1] * s[1]).sqrt())
}

/// Maximum of the functional for `n` settings given a correlation matrix.
pub fn fn_max_from_correlations(t: &RealMatrix3, n: usize) -> f64 {
    match n {
        3 => t.frobenius_norm(),
        _ => {
            let (s, _) = svd_right3(t);
            (s[0] * s[0] + s[1] * s[1]).sqrt()
        }
    }
}

/// A setting attaining `max_μ F_n(ρ, μ)`.
///
/// Bob's frame is rotated within the span of the top-`n` right singular
/// vectors of `T` so that every `|T v_i|` is equal; Alice then measures along
/// `T v_i / |T v_i|`. When `|T v_i|` vanishes, `u_i = v_i`; that term
/// contributes nothing to the functional.
pub fn optimal_directions(rho: &DensityMatrix, n: usize) -> Result<MeasurementSetting, SteeringError> {
    optimal_setting_for(&to_bloch(rho).t, n)
}

pub fn optimal_setting_for(t: &RealMatrix3, n: usize) -> Result<MeasurementSetting, SteeringError> {
    if !(2..=3).contains(&n) {
        return Err(SteeringError::InvalidSetting(format!(
            "n = {n} settings, expected 2 or 3"
        )));
    }
    let (s, r) = svd_right3(t);
    let v: Vec<[f64; 3]> = if n == 2 {
        vec![
            combine(&r[0], 1.0 / SQRT_2, &r[1], 1.0 / SQRT_2),
            combine(&r[0], 1.0 / SQRT_2, &r[1], -1.0 / SQRT_2),
        ]
    } else {
        equalizing_frame(&s.map(|x| x * x), &r)
    };
    let u = v
        .iter()
        .map(|vi| {
            let tv = t.apply(vi);
            let len = norm3(&tv);
            if len < DEGENERATE_TOL {
                *vi
            } else {
                tv.map(|x| x / len)
            }
        })
        .collect();
    MeasurementSetting::new(u, v)
}

/// Orthonormal frame in which `G = Σ g_k r_k r_kᵀ` has constant diagonal
/// `(g₁+g₂+g₃)/3`. One rotation in the `(r₁, r₃)` plane moves the first
/// diagonal entry to the mean; a 45° rotation then splits the rest evenly.
fn equalizing_frame(g: &[f64; 3], r: &[[f64; 3]; 3]) -> Vec<[f64; 3]> {
    let spread = g[0] - g[2];
    if spread <= f64::EPSILON * g[0].abs().max(1.0) {
        return r.to_vec();
    }
    let mean = (g[0] + g[1] + g[2]) / 3.0;
    let cos2 = ((mean - g[2]) / spread).clamp(0.0, 1.0);
    let (c, s) = (cos2.sqrt(), (1.0 - cos2).sqrt());
    let w1 = combine(&r[0], c, &r[2], s);
    let w3 = combine(&r[0], -s, &r[2], c);
    let h = 1.0 / SQRT_2;
    vec![w1, combine(&r[1], h, &w3, h), combine(&r[1], h, &w3, -h)]
}

fn combine(a: &[f64; 3], ca: f64, b: &[f64; 3], cb: f64) -> [f64; 3] {
    [
        ca * a[0] + cb * b[0],
        ca * a[1] + cb * b[1],
        ca * a[2] + cb * b[2],
    ]
}

/// `F₃ ≤ √3`: any three qubit observables become jointly measurable at
/// unsharpness `1/√3`, which caps the functional there.
pub fn jm_bound_check(value: &SteeringValue) -> bool {
    value.value <= 3f64.sqrt() + JM_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::ComplexMatrix4;
    use crate::states::{singlet, validate};

    fn ket00() -> DensityMatrix {
        validate(&ComplexMatrix4::from_real_diagonal([1.0, 0.0, 0.0, 0.0])).unwrap()
    }

    fn werner(p: f64) -> DensityMatrix {
        singlet().mix(&DensityMatrix::maximally_mixed(), p)
    }

    #[test]
    fn setting_validation() {
        assert!(MeasurementSetting::axes(3).is_ok());
        assert!(MeasurementSetting::new(vec![[1.0, 0.0, 0.0]; 2], vec![[1.0, 0.0, 0.0]; 2]).is_err());
        assert!(MeasurementSetting::new(
            vec![[2.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
        )
        .is_err());
        assert!(MeasurementSetting::axes(1).is_err());
        // repeated Alice directions are allowed
        assert!(MeasurementSetting::new(
            vec![[0.0, 0.0, 1.0]; 3],
            vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        )
        .is_ok());
    }

    #[test]
    fn functional_examples() {
        let axes = MeasurementSetting::axes(3).unwrap();
        assert_eq!(steering_functional(&DensityMatrix::maximally_mixed(), &axes).value, 0.0);

        let v = steering_functional(&ket00(), &axes);
        assert!((v.value - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!(!v.violated);

        let neg: Vec<_> = axes.bob().iter().map(|d| d.map(|x| -x)).collect();
        let mu = MeasurementSetting::new(neg, axes.bob().to_vec()).unwrap();
        let v = steering_functional(&singlet(), &mu);
        assert!((v.value - 3f64.sqrt()).abs() < 1e-12);
        assert!(v.violated);
    }

    #[test]
    fn bloch_and_matrix_routes_agree() {
        let rho = werner(0.7).mix(&ket00(), 0.6);
        let mu = MeasurementSetting::new(
            vec![[0.6, 0.8, 0.0], [0.0, 0.0, 1.0], [0.0, 0.6, -0.8]],
            vec![[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]],
        )
        .unwrap();
        let t = to_bloch(&rho).t;
        let a = signed_functional_bloch(&t, &mu);
        let b = signed_functional_matrix(&rho, &mu);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn maxima_examples() {
        assert!((f3_max(&singlet()).value - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(f3_max(&DensityMatrix::maximally_mixed()).value, 0.0);
        let p = 1.0 / 3f64.sqrt();
        let v = f3_max(&werner(p));
        assert!((v.value - 1.0).abs() < 1e-12);

        assert!((f2_max(&singlet()).value - SQRT_2).abs() < 1e-12);
        assert_eq!(f2_max(&DensityMatrix::maximally_mixed()).value, 0.0);
        assert!((f2_max(&werner(0.8)).value - SQRT_2 * 0.8).abs() < 1e-12);
    }

    #[test]
    fn optimal_directions_examples() {
        let mu = optimal_directions(&singlet(), 3).unwrap();
        for (u, v) in mu.alice().iter().zip(mu.bob()) {
            assert!((u[0] + v[0]).abs() < 1e-12 && (u[1] + v[1]).abs() < 1e-12 && (u[2] + v[2]).abs() < 1e-12);
            // coordinate axes
            assert!((v.iter().map(|x| x.abs()).fold(0.0, f64::max) - 1.0).abs() < 1e-12);
        }
        assert!((steering_functional(&singlet(), &mu).value - 3f64.sqrt()).abs() < 1e-12);

        let mu = optimal_directions(&ket00(), 3).unwrap();
        assert!((steering_functional(&ket00(), &mu).value - 1.0).abs() < 1e-12);

        let mm = DensityMatrix::maximally_mixed();
        let mu = optimal_directions(&mm, 3).unwrap();
        assert_eq!(steering_functional(&mm, &mu).value, 0.0);
    }

    #[test]
    fn optimal_directions_general_correlations() {
        let t = RealMatrix3([[0.5, 0.1, -0.2], [0.0, -0.3, 0.05], [0.2, 0.0, 0.1]]);
        for n in [2, 3] {
            let mu = optimal_setting_for(&t, n).unwrap();
            let got = signed_functional_bloch(&t, &mu).abs();
            assert!((got - fn_max_from_correlations(&t, n)).abs() < 1e-12, "n={n}");
        }
        assert!(optimal_setting_for(&t, 4).is_err());
    }

    #[test]
    fn jm_bound() {
        assert!(jm_bound_check(&SteeringValue::new(3f64.sqrt())));
        assert!(jm_bound_check(&SteeringValue::new(0.0)));
        assert!(!jm_bound_check(&SteeringValue::new(1.8)));
    }

    #[test]
    fn violation_threshold_is_exact() {
        assert!(!SteeringValue::new(1.0).violated);
        assert!(SteeringValue::new(1.0 + f64::EPSILON).violated);
    }
}
