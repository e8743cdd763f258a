//! Two-qubit density matrices, their Bloch (Hilbert–Schmidt) decomposition,
//! spectra, and reductions of pure three-qubit states.
//!
//! Conventions: Pauli matrices `s₁ = X`, `s₂ = Y`, `s₃ = Z`; the two-qubit
//! space is `A ⊗ B` with `A` the left factor and basis order
//! `|00⟩, |01⟩, |10⟩, |11⟩`. Three-qubit amplitudes are indexed
//! lexicographically `|000⟩ … |111⟩` (qubit A is the most significant bit).

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::numlin::{
    hermitian_eigensystem, norm3, ComplexMatrix4, LinalgError, RealMatrix3, HERM_TOL,
};

/// Trace must equal 1 within this.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-POSITIVITY_TOL, 0)` are clamped to zero.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Normalization tolerance for pure three-qubit states.
pub const PURE_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("matrix is not Hermitian (max |ρ - ρ†| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("three-qubit amplitudes have squared norm {norm_sqr}, expected 1")]
    NotNormalized { norm_sqr: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

const Z0: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const R1: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I1: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub type Mat2 = [[Complex64; 2]; 2];

pub const IDENTITY_2: Mat2 = [[R1, Z0], [Z0, R1]];
pub const PAULI_X: Mat2 = [[Z0, R1], [R1, Z0]];
pub const PAULI_Y: Mat2 = [[Z0, Complex64 { re: 0.0, im: -1.0 }], [I1, Z0]];
pub const PAULI_Z: Mat2 = [[R1, Z0], [Z0, Complex64 { re: -1.0, im: 0.0 }]];
/// `[X, Y, Z]`.
pub const PAULIS: [Mat2; 3] = [PAULI_X, PAULI_Y, PAULI_Z];

/// `n·s = n₁X + n₂Y + n₃Z`.
pub fn pauli_dot(n: &[f64; 3]) -> Mat2 {
    let mut m = [[Z0; 2]; 2];
    for (k, p) in PAULIS.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += p[i][j] * n[k];
            }
        }
    }
    m
}

/// The Bell basis in the fixed order `{Φ⁺, Φ⁻, Ψ⁺, Ψ⁻}`.
pub fn bell_basis() -> [[Complex64; 4]; 4] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [
        [h, Z0, Z0, h],
        [h, Z0, Z0, -h],
        [Z0, h, h, Z0],
        [Z0, h, -h, Z0],
    ]
}

/// `|ψ⁻⟩⟨ψ⁻|` with `|ψ⁻⟩ = (|01⟩ − |10⟩)/√2`.
pub fn singlet() -> DensityMatrix {
    DensityMatrix::from_pure(&bell_basis()[3])
}

/// A validated two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix4,
}

impl DensityMatrix {
    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            matrix: ComplexMatrix4::identity().scale(0.25),
        }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized, nonzero) vector.
    pub fn from_pure(psi: &[Complex64; 4]) -> Self {
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        DensityMatrix {
            matrix: ComplexMatrix4::projector(psi).scale(1.0 / n),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix4 {
        &self.matrix
    }

    /// `Tr ρ²` as a squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        let f = self.matrix.frobenius_norm();
        f * f
    }

    /// `U ρ U†`; unitarity of `u` is the caller's responsibility.
    pub fn conjugated(&self, u: &ComplexMatrix4) -> Self {
        DensityMatrix {
            matrix: self.matrix.conjugate_by(u).hermitian_part(),
        }
    }

    /// Convex combination `w·self + (1−w)·other`, `w ∈ [0, 1]`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Self {
        DensityMatrix {
            matrix: self.matrix.scale(w) + other.matrix.scale(1.0 - w),
        }
    }

    /// Expectation `Tr(ρ O)`, real part.
    pub fn expectation(&self, op: &ComplexMatrix4) -> f64 {
        self.matrix.trace_product(op).re
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.matrix.0.iter() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Check a raw matrix and turn it into a [`DensityMatrix`].
///
/// Tiny negative eigenvalues (down to `-POSITIVITY_TOL`) are clamped to zero
/// and the state is renormalized.
pub fn validate(m: &ComplexMatrix4) -> Result<DensityMatrix, StateError> {
    if !m.is_finite() {
        return Err(StateError::NonFinite);
    }
    let deviation = m.hermiticity_defect();
    if deviation > HERM_TOL {
        return Err(StateError::NotHermitian { deviation });
    }
    let h = m.hermitian_part();
    let trace = h.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(StateError::NotUnitTrace { trace });
    }
    let eig = hermitian_eigensystem(&h)?;
    let min_eigenvalue = eig.eigenvalues[3];
    if min_eigenvalue < -POSITIVITY_TOL {
        return Err(StateError::NotPositive { min_eigenvalue });
    }
    if min_eigenvalue < 0.0 {
        let mut clamped = eig.clone();
        clamped.eigenvalues = eig.eigenvalues.map(|x| x.max(0.0));
        let total: f64 = clamped.eigenvalues.iter().sum();
        clamped.eigenvalues = clamped.eigenvalues.map(|x| x / total);
        return Ok(DensityMatrix {
            matrix: clamped.reconstruct().hermitian_part(),
        });
    }
    Ok(DensityMatrix { matrix: h })
}

/// Local Bloch vectors and correlation matrix:
/// `ρ = ¼(I⊗I + a·s⊗I + I⊗b·s + Σ T_ij s_i⊗s_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochForm {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub t: RealMatrix3,
}

impl BlochForm {
    /// `|a|² + |b|² + ‖T‖_F²`, which equals `4 Tr ρ² − 1`.
    pub fn norm_sum(&self) -> f64 {
        let a = norm3(&self.a);
        let b = norm3(&self.b);
        a * a + b * b + self.t.frobenius_norm_sqr()
    }
}

pub fn to_bloch(rho: &DensityMatrix) -> BlochForm {
    let m = rho.matrix();
    let mut a = [0.0; 3];
    let mut b = [0.0; 3];
    let mut t = RealMatrix3::zeros();
    for i in 0..3 {
        a[i] = m.trace_product(&ComplexMatrix4::kron(&PAULIS[i], &IDENTITY_2)).re;
        b[i] = m.trace_product(&ComplexMatrix4::kron(&IDENTITY_2, &PAULIS[i])).re;
        for j in 0..3 {
            t.0[i][j] = m.trace_product(&ComplexMatrix4::kron(&PAULIS[i], &PAULIS[j])).re;
        }
    }
    BlochForm { a, b, t }
}

/// Assemble `¼(I⊗I + a·s⊗I + I⊗b·s + Σ T_ij s_i⊗s_j)` without validation.
pub fn bloch_operator(f: &BlochForm) -> ComplexMatrix4 {
    let mut m = ComplexMatrix4::identity();
    m = m + ComplexMatrix4::kron(&pauli_dot(&f.a), &IDENTITY_2);
    m = m + ComplexMatrix4::kron(&IDENTITY_2, &pauli_dot(&f.b));
    for i in 0..3 {
        for j in 0..3 {
            let tij = f.t.0[i][j];
            if tij != 0.0 {
                m = m + ComplexMatrix4::kron(&PAULIS[i], &PAULIS[j]).scale(tij);
            }
        }
    }
    m.scale(0.25)
}

pub fn from_bloch(f: &BlochForm) -> Result<DensityMatrix, StateError> {
    if !(f.a.iter().chain(f.b.iter()).all(|x| x.is_finite()) && f.t.is_finite()) {
        return Err(StateError::NonFinite);
    }
    validate(&bloch_operator(f))
}

/// Spectrum of a two-qubit state with derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumReport {
    /// `x₁ ≥ x₂ ≥ x₃ ≥ x₄`.
    pub eigenvalues: [f64; 4],
    /// `Σ x_i²`.
    pub purity: f64,
    /// `Σ_{i<j} x_i x_j`.
    pub pairwise_sum: f64,
}

impl SpectrumReport {
    /// Build from any ordering of eigenvalues; they are sorted descending.
    pub fn from_eigenvalues(mut x: [f64; 4]) -> Self {
        x.sort_by(|a, b| b.total_cmp(a));
        let purity = x.iter().map(|v| v * v).sum();
        let mut pairwise_sum = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                pairwise_sum += x[i] * x[j];
            }
        }
        SpectrumReport {
            eigenvalues: x,
            purity,
            pairwise_sum,
        }
    }
}

pub fn spectrum_report(rho: &DensityMatrix) -> Result<SpectrumReport, StateError> {
    let x = hermitian_eigensystem(rho.matrix())?.eigenvalues;
    Ok(SpectrumReport::from_eigenvalues(x))
}

/// A normalized pure state of three qubits A, B, C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureThreeQubitState {
    amplitudes: [Complex64; 8],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitPair {
    AB,
    BC,
    AC,
}

impl QubitPair {
    pub const ALL: [QubitPair; 3] = [QubitPair::AB, QubitPair::BC, QubitPair::AC];

    /// The qubit traced out when keeping this pair.
    pub fn complement(self) -> Qubit {
        match self {
            QubitPair::AB => Qubit::C,
            QubitPair::BC => Qubit::A,
            QubitPair::AC => Qubit::B,
        }
    }
}

impl fmt::Display for QubitPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QubitPair::AB => "AB",
            QubitPair::BC => "BC",
            QubitPair::AC => "AC",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    A,
    B,
    C,
}

impl Qubit {
    /// Bit position in the amplitude index (A is the most significant).
    fn shift(self) -> usize {
        match self {
            Qubit::A => 2,
            Qubit::B => 1,
            Qubit::C => 0,
        }
    }
}

impl PureThreeQubitState {
    /// Requires `Σ|amplitude|² = 1` within [`PURE_NORM_TOL`].
    pub fn new(amplitudes: [Complex64; 8]) -> Result<Self, StateError> {
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !norm_sqr.is_finite() {
            return Err(StateError::NonFinite);
        }
        if (norm_sqr - 1.0).abs() > PURE_NORM_TOL {
            return Err(StateError::NotNormalized { norm_sqr });
        }
        Ok(PureThreeQubitState { amplitudes })
    }

    /// Rescale to unit norm; fails only for the zero vector or non-finite input.
    pub fn normalized(amplitudes: [Complex64; 8]) -> Result<Self, StateError> {
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !norm_sqr.is_finite() {
            return Err(StateError::NonFinite);
        }
        if norm_sqr == 0.0 {
            return Err(StateError::NotNormalized { norm_sqr });
        }
        let s = 1.0 / norm_sqr.sqrt();
        Ok(PureThreeQubitState {
            amplitudes: amplitudes.map(|z| z * s),
        })
    }

    pub fn amplitudes(&self) -> &[Complex64; 8] {
        &self.amplitudes
    }
}

/// Partial trace over the qubit not in `keep`. The kept qubits retain their
/// relative order (A before B before C).
pub fn reduce_to_pair(psi: &PureThreeQubitState, keep: QubitPair) -> DensityMatrix {
    let (hi, lo, gone) = match keep {
        QubitPair::AB => (Qubit::A, Qubit::B, Qubit::C),
        QubitPair::BC => (Qubit::B, Qubit::C, Qubit::A),
        QubitPair::AC => (Qubit::A, Qubit::C, Qubit::B),
    };
    let index = |pair: usize, traced: usize| -> usize {
        (((pair >> 1) & 1) << hi.shift()) | ((pair & 1) << lo.shift()) | (traced << gone.shift())
    };
    let amp = psi.amplitudes();
    let mut m = ComplexMatrix4::zeros();
    for r in 0..4 {
        for c in 0..4 {
            m.0[r][c] = (0..2)
                .map(|k| amp[index(r, k)] * amp[index(c, k)].conj())
                .sum();
        }
    }
    DensityMatrix {
        matrix: m.hermitian_part(),
    }
}

/// Single-qubit reduced state of `which`, as a 2×2 matrix.
pub fn reduce_to_qubit(psi: &PureThreeQubitState, which: Qubit) -> Mat2 {
    let shift = which.shift();
    let amp = psi.amplitudes();
    let mut m = [[Z0; 2]; 2];
    for i in 0..8 {
        for j in 0..8 {
            // same bits on the two traced-out qubits
            if (i & !(1 << shift)) != (j & !(1 << shift)) {
                continue;
            }
            m[(i >> shift) & 1][(j >> shift) & 1] += amp[i] * amp[j].conj();
        }
    }
    m
}

/// `|l|` for the Bloch vector of the single-qubit reduction of `which`.
pub fn single_qubit_bloch_norm(psi: &PureThreeQubitState, which: Qubit) -> f64 {
    let m = reduce_to_qubit(psi, which);
    let z = m[0][0].re - m[1][1].re;
    let off = m[0][1];
    (4.0 * off.norm_sqr() + z * z).sqrt().min(1.0)
}
