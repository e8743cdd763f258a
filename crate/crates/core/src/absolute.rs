//! Absolute non-violation of the three-setting steering inequality.
//!
//! A state belongs to AUS₃ when no global unitary `U` makes `UρU†` violate
//! `F₃ ≤ 1`. The maximum of `F₃` over the unitary orbit depends only on the
//! spectrum `x₁ ≥ … ≥ x₄` and is attained by the state diagonal in the Bell
//! basis with those weights:
//!
//! ```text
//! max_U F₃(UρU†)² = 3 Σ x_i² − 2 Σ_{i<j} x_i x_j = 4 Tr ρ² − 1
//! ```
//!
//! so AUS₃ is exactly the set `Tr ρ² ≤ ½`, the Frobenius ball of radius ½
//! about `I/4`, or in Bloch terms `|a|² + |b|² + ‖T‖_F² ≤ 1`.

use thiserror::Error;

use crate::numlin::{hermitian_eigensystem, ComplexMatrix4};
use crate::states::{
    bell_basis, reduce_to_pair, single_qubit_bloch_norm, spectrum_report, to_bloch,
    DensityMatrix, PureThreeQubitState, QubitPair, SpectrumReport, StateError,
};

/// Slack on `f3_global_max ≤ 1`. Every other membership test uses the
/// threshold equivalent to this one, so the four criteria share a boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Numerical agreement required between the algebraically equal quantities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Agreement of `f3_global_max²` with `1 + 2l²` for pure three-qubit reductions.
pub const THREE_QUBIT_TOL: f64 = 1e-9;

/// `(1 + BOUNDARY_TOL)²`, the bound on `f3_global_max²`.
pub fn squared_bound() -> f64 {
    (1.0 + BOUNDARY_TOL).powi(2)
}

/// Purity bound equivalent to [`BOUNDARY_TOL`].
pub fn purity_bound() -> f64 {
    (1.0 + squared_bound()) / 4.0
}

/// Radius of the Frobenius ball about `I/4` equivalent to [`BOUNDARY_TOL`].
pub fn ball_radius() -> f64 {
    (purity_bound() - 0.25).sqrt()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AbsoluteError {
    #[error("membership criteria disagree: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsoluteVerdict {
    pub in_aus3: bool,
    pub f3_global_max: f64,
    /// `3 Tr ρ² − 2 Σ_{i<j} x_i x_j`.
    pub spectrum_lhs: f64,
    /// `Tr ρ²` from the Frobenius norm.
    pub purity: f64,
    /// `|a|² + |b|² + ‖T‖_F²`.
    pub bloch_sum: f64,
}

/// `3 Σ x_i² − 2 Σ_{i<j} x_i x_j`.
pub fn spectrum_lhs(spec: &SpectrumReport) -> f64 {
    3.0 * spec.purity - 2.0 * spec.pairwise_sum
}

/// `max_U F₃(UρU†)` from the spectrum alone.
pub fn f3_global_max(spec: &SpectrumReport) -> f64 {
    spectrum_lhs(spec).max(0.0).sqrt()
}

/// Decide AUS₃ membership by four independent routes and cross-check them:
/// spectrum (eigensolver), purity (Frobenius norm), Bloch data, and the
/// orbit maximum of `F₃`.
pub fn decide_aus3(rho: &DensityMatrix) -> Result<AbsoluteVerdict, AbsoluteError> {
    let spec = spectrum_report(rho)?;
    let lhs = spectrum_lhs(&spec);
    let f3 = f3_global_max(&spec);
    let purity = rho.purity();
    let bloch_sum = to_bloch(rho).norm_sum();

    let by_spectrum = lhs <= squared_bound();
    let by_purity = purity <= purity_bound();
    let by_bloch = bloch_sum <= squared_bound();
    let by_f3 = f3 <= 1.0 + BOUNDARY_TOL;
    let by_ball = frobenius_ball_check(rho);

    let votes = [by_spectrum, by_purity, by_bloch, by_f3, by_ball];
    if votes.iter().any(|&v| v != by_spectrum) {
        return Err(AbsoluteError::InternalInconsistency(format!(
            "spectrum={by_spectrum} purity={by_purity} bloch={by_bloch} f3={by_f3} ball={by_ball} \
             (lhs={lhs:e}, purity={purity:e}, bloch_sum={bloch_sum:e})"
        )));
    }
    let from_purity = 4.0 * purity - 1.0;
    if (lhs - from_purity).abs() > IDENTITY_TOL || (bloch_sum - from_purity).abs() > IDENTITY_TOL {
        return Err(AbsoluteError::InternalInconsistency(format!(
            "lhs={lhs:e}, 4·purity−1={from_purity:e}, bloch_sum={bloch_sum:e}"
        )));
    }
    Ok(AbsoluteVerdict {
        in_aus3: by_spectrum,
        f3_global_max: f3,
        spectrum_lhs: lhs,
        purity,
        bloch_sum,
    })
}

/// `‖ρ − I/4‖_F ≤ ½` (up to [`BOUNDARY_TOL`]).
pub fn frobenius_ball_check(rho: &DensityMatrix) -> bool {
    ball_distance(rho) <= ball_radius()
}

pub fn ball_distance(rho: &DensityMatrix) -> f64 {
    (*rho.matrix() - ComplexMatrix4::identity().scale(0.25)).frobenius_norm()
}

/// The Bell-diagonal state in the unitary orbit of `ρ`, which maximizes `F₃`
/// over that orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct BellDiagonalState {
    /// Weights on `{Φ⁺, Φ⁻, Ψ⁺, Ψ⁻}` (the spectrum, descending).
    pub weights: [f64; 4],
    /// Global unitary with `state = U ρ U†`.
    pub unitary: ComplexMatrix4,
    pub state: DensityMatrix,
}

/// Map the eigenvectors of `ρ` (by descending eigenvalue) onto the Bell
/// vectors `{Φ⁺, Φ⁻, Ψ⁺, Ψ⁻}`: `U = Σ_k |B_k⟩⟨e_k|`.
pub fn bell_diagonal_canonical(rho: &DensityMatrix) -> Result<BellDiagonalState, AbsoluteError> {
    let eig = hermitian_eigensystem(rho.matrix()).map_err(StateError::from)?;
    let bell = bell_basis();
    let unitary = bell
        .iter()
        .zip(eig.eigenvectors.iter())
        .fold(ComplexMatrix4::zeros(), |acc, (b, e)| {
            acc + ComplexMatrix4::outer(b, e)
        });
    Ok(BellDiagonalState {
        weights: eig.eigenvalues,
        unitary,
        state: rho.conjugated(&unitary),
    })
}

/// Verdict for one two-qubit reduction of a pure three-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairVerdict {
    pub pair: QubitPair,
    /// Bloch norm of the traced-out qubit.
    pub complement_bloch_norm: f64,
    pub verdict: AbsoluteVerdict,
}

/// Verdicts for the `AB`, `BC` and `AC` reductions. Each reduction has
/// spectrum `{(1+l)/2, (1−l)/2, 0, 0}`, so `f3_global_max² = 1 + 2l²` and the
/// pair lies in AUS₃ only when the remaining qubit is maximally mixed.
pub fn reduced_pair_verdict(psi: &PureThreeQubitState) -> Result<[PairVerdict; 3], AbsoluteError> {
    let mut out = Vec::with_capacity(3);
    for pair in QubitPair::ALL {
        let verdict = decide_aus3(&reduce_to_pair(psi, pair))?;
        let l = single_qubit_bloch_norm(psi, pair.complement());
        let expected = 1.0 + 2.0 * l * l;
        if (verdict.f3_global_max.powi(2) - expected).abs() > THREE_QUBIT_TOL {
            return Err(AbsoluteError::InternalInconsistency(format!(
                "pair {pair}: f3_global_max² = {:e}, 1 + 2l² = {expected:e}",
                verdict.f3_global_max.powi(2)
            )));
        }
        out.push(PairVerdict {
            pair,
            complement_bloch_norm: l,
            verdict,
        });
    }
    Ok([out[0], out[1], out[2]])
}
