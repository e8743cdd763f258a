//! Dense linear algebra for the two fixed shapes used throughout the crate:
//! 4×4 complex matrices (two-qubit operators) and 3×3 real matrices
//! (correlation matrices).
//!
//! Eigenproblems are solved with cyclic Jacobi rotations. At these sizes the
//! method converges in a handful of sweeps and yields orthonormal
//! eigenvectors to machine precision.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Maximum entrywise deviation of `A - A†` accepted as Hermitian.
pub const HERM_TOL: f64 = 1e-10;
/// Reconstruction tolerance for eigendecompositions.
pub const RECON_TOL: f64 = 1e-9;
/// Jacobi stops once the off-diagonal Frobenius norm falls below this
/// (relative to `max(1, ‖A‖_F)`).
pub const JACOBI_TOL: f64 = 1e-12;
/// Sweep cap for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max |A - A†| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

/// A 4×4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix4(pub [[Complex64; 4]; 4]);

impl ComplexMatrix4 {
    pub fn zeros() -> Self {
        ComplexMatrix4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(d: [f64; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = Complex64::new(d[i], 0.0);
        }
        m
    }

    /// Outer product `|x⟩⟨y|`.
    pub fn outer(x: &[Complex64; 4], y: &[Complex64; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = x[i] * y[j].conj();
            }
        }
        m
    }

    /// Projector `|x⟩⟨x|`.
    pub fn projector(x: &[Complex64; 4]) -> Self {
        Self::outer(x, x)
    }

    /// Kronecker product `a ⊗ b` of two 2×2 matrices.
    pub fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Self {
        let mut m = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    /// `self · x`.
    pub fn apply(&self, x: &[Complex64; 4]) -> [Complex64; 4] {
        let mut y = [ZERO; 4];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..4).map(|j| self.0[i][j] * x[j]).sum();
        }
        y
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix4) -> Self {
        *u * *self * u.adjoint()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix4) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                acc += self.0[i][j] * other.0[j][i];
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A†|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_norm()
    }

    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(0.5)
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Self::identity()).frobenius_norm()
    }

    pub fn column(&self, j: usize) -> [Complex64; 4] {
        [self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]]
    }

    pub fn from_columns(cols: &[[Complex64; 4]; 4]) -> Self {
        let mut m = Self::zeros();
        for (j, col) in cols.iter().enumerate() {
            for i in 0..4 {
                m.0[i][j] = col[i];
            }
        }
        m
    }
}

impl Index<(usize, usize)> for ComplexMatrix4 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for ComplexMatrix4 {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl Sub for ComplexMatrix4 {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl Mul for ComplexMatrix4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

/// A 3×3 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealMatrix3(pub [[f64; 3]; 3]);

impl RealMatrix3 {
    pub fn zeros() -> Self {
        RealMatrix3([[0.0; 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diagonal([1.0; 3])
    }

    pub fn diagonal(d: [f64; 3]) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// `xᵀ · self · y`.
    pub fn bilinear(&self, x: &[f64; 3], y: &[f64; 3]) -> f64 {
        dot3(x, &self.apply(y))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    /// True when every off-diagonal entry is at most `tol` in modulus.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || self.0[i][j].abs() <= tol))
    }
}

impl Mul for RealMatrix3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Eigen-decomposition of a Hermitian 4×4 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem4 {
    /// Descending.
    pub eigenvalues: [f64; 4],
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: [[Complex64; 4]; 4],
}

impl EigenSystem4 {
    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> ComplexMatrix4 {
        self.eigenvalues
            .iter()
            .zip(self.eigenvectors.iter())
            .fold(ComplexMatrix4::zeros(), |acc, (&l, v)| {
                acc + ComplexMatrix4::projector(v).scale(l)
            })
    }

    /// Unitary whose k-th column is the k-th eigenvector.
    pub fn eigenvector_matrix(&self) -> ComplexMatrix4 {
        ComplexMatrix4::from_columns(&self.eigenvectors)
    }
}

/// Eigenvalues (descending) and eigenvectors of a Hermitian 4×4 matrix.
pub fn hermitian_eigensystem(a: &ComplexMatrix4) -> Result<EigenSystem4, LinalgError> {
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let deviation = a.hermiticity_defect();
    if deviation > HERM_TOL {
        return Err(LinalgError::NotHermitian { deviation });
    }
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix4::identity();
    let scale = m.frobenius_norm().max(1.0);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm4(&m) < JACOBI_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                rotate4(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm4(&m) >= JACOBI_TOL * scale {
        return Err(LinalgError::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order = [0usize, 1, 2, 3];
    // stable: ties keep original index order
    order.sort_by(|&i, &j| m.0[j][j].re.total_cmp(&m.0[i][i].re));
    let eigenvalues = order.map(|k| m.0[k][k].re);
    let eigenvectors = order.map(|k| v.column(k));
    Ok(EigenSystem4 {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix4) -> Result<[f64; 4], LinalgError> {
    hermitian_eigensystem(a).map(|e| e.eigenvalues)
}

fn off_diagonal_norm4(m: &ComplexMatrix4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += m.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating `m[p][q]`; accumulates into `v`.
fn rotate4(m: &mut ComplexMatrix4, v: &mut ComplexMatrix4, p: usize, q: usize) {
    let b = m.0[p][q];
    let b_abs = b.norm();
    if b_abs == 0.0 {
        return;
    }
    let phase = b / b_abs;
    let app = m.0[p][p].re;
    let aqq = m.0[q][q].re;
    let tau = (aqq - app) / (2.0 * b_abs);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = diag(1, conj(phase)) · [[c, s], [-s, c]] restricted to (p, q)
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    // M ← M G
    for k in 0..4 {
        let mkp = m.0[k][p];
        let mkq = m.0[k][q];
        m.0[k][p] = mkp * g_pp + mkq * g_qp;
        m.0[k][q] = mkp * g_pq + mkq * g_qq;
    }
    // M ← G† M
    for k in 0..4 {
        let mpk = m.0[p][k];
        let mqk = m.0[q][k];
        m.0[p][k] = g_pp.conj() * mpk + g_qp.conj() * mqk;
        m.0[q][k] = g_pq.conj() * mpk + g_qq.conj() * mqk;
    }
    m.0[p][q] = ZERO;
    m.0[q][p] = ZERO;
    m.0[p][p] = Complex64::new(m.0[p][p].re, 0.0);
    m.0[q][q] = Complex64::new(m.0[q][q].re, 0.0);
    // V ← V G
    for k in 0..4 {
        let vkp = v.0[k][p];
        let vkq = v.0[k][q];
        v.0[k][p] = vkp * g_pp + vkq * g_qp;
        v.0[k][q] = vkp * g_pq + vkq * g_qq;
    }
}

/// Eigen-decomposition of a real symmetric 3×3 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen3 {
    /// Descending.
    pub eigenvalues: [f64; 3],
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: [[f64; 3]; 3],
}

/// Cyclic Jacobi on a real symmetric 3×3 matrix. The input is symmetrized
/// first; the iteration starts from the identity frame so already-diagonal
/// (including degenerate) inputs keep the coordinate axes as eigenvectors.
pub fn symmetric_eigen3(a: &RealMatrix3) -> SymmetricEigen3 {
    let mut m = *a;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let avg = 0.5 * (m.0[i][j] + m.0[j][i]);
            m.0[i][j] = avg;
            m.0[j][i] = avg;
        }
    }
    let mut v = RealMatrix3::identity();
    let scale = m.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = (2.0 * (m.0[0][1].powi(2) + m.0[0][2].powi(2) + m.0[1][2].powi(2))).sqrt();
        if off < f64::EPSILON * scale {
            break;
        }
        for p in 0..2 {
            for q in (p + 1)..3 {
                let apq = m.0[p][q];
                if apq == 0.0 {
                    continue;
                }
                let tau = (m.0[q][q] - m.0[p][p]) / (2.0 * apq);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..3 {
                    let mkp = m.0[k][p];
                    let mkq = m.0[k][q];
                    m.0[k][p] = c * mkp - s * mkq;
                    m.0[k][q] = s * mkp + c * mkq;
                }
                for k in 0..3 {
                    let mpk = m.0[p][k];
                    let mqk = m.0[q][k];
                    m.0[p][k] = c * mpk - s * mqk;
                    m.0[q][k] = s * mpk + c * mqk;
                }
                m.0[p][q] = 0.0;
                m.0[q][p] = 0.0;
                for k in 0..3 {
                    let vkp = v.0[k][p];
                    let vkq = v.0[k][q];
                    v.0[k][p] = c * vkp - s * vkq;
                    v.0[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| m.0[j][j].total_cmp(&m.0[i][i]));
    SymmetricEigen3 {
        eigenvalues: order.map(|k| m.0[k][k]),
        eigenvectors: order.map(|k| [v.0[0][k], v.0[1][k], v.0[2][k]]),
    }
}

/// Singular values of `t`, descending, via the eigenvalues of `tᵀt`.
pub fn singular_values_3x3(t: &RealMatrix3) -> [f64; 3] {
    svd_right3(t).0
}

/// Singular values (descending) with the matching right singular vectors.
pub fn svd_right3(t: &RealMatrix3) -> ([f64; 3], [[f64; 3]; 3]) {
    let gram = t.transpose() * *t;
    let eig = symmetric_eigen3(&gram);
    (eig.eigenvalues.map(|u| u.max(0.0).sqrt()), eig.eigenvectors)
}
