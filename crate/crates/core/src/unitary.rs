//! Seeded sampling of Haar unitaries and Hilbert–Schmidt random states, and
//! the Monte Carlo estimators built on them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::absolute::{f3_global_max, purity_bound};
use crate::numlin::{dot3, norm3, ComplexMatrix4};
use crate::states::{spectrum_report, validate, DensityMatrix, PureThreeQubitState, StateError};
use crate::steering::{f3_max, MeasurementSetting, SteeringError};

/// Smallest sample count accepted by [`aus3_volume_estimate`].
pub const MIN_VOLUME_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("need at least one trial")]
    NoTrials,
    #[error(transparent)]
    State(#[from] StateError),
}

/// A reproducible random stream identified by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct SeededGenerator {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl SeededGenerator {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SeededGenerator { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Independent generator for worker `index`, a pure function of
    /// `(seed, stream, index)`.
    pub fn fork(&self, index: u64) -> SeededGenerator {
        let derived = self.seed ^ self.stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        SeededGenerator::new(derived, index)
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    /// Standard complex Gaussian, `E|z|² = 1`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// 4×4 matrix of i.i.d. standard complex Gaussians.
    pub fn ginibre(&mut self) -> ComplexMatrix4 {
        let mut m = ComplexMatrix4::zeros();
        for z in m.0.iter_mut().flatten() {
            *z = self.complex_normal();
        }
        m
    }
}

/// Haar-distributed 4×4 unitary: orthonormalize the columns of a Ginibre
/// matrix. Gram–Schmidt yields the QR factor with positive diagonal `R`,
/// which fixes the column phases and makes the distribution exactly Haar.
pub fn haar_unitary(g: &mut SeededGenerator) -> ComplexMatrix4 {
    loop {
        if let Some(q) = orthonormalize_columns(&g.ginibre()) {
            return q;
        }
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization pass. Returns `None`
/// for (numerically) rank-deficient input.
fn orthonormalize_columns(m: &ComplexMatrix4) -> Option<ComplexMatrix4> {
    let mut cols: [[Complex64; 4]; 4] = [0, 1, 2, 3].map(|j| m.column(j));
    for j in 0..4 {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..4).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..4 {
                    let sub = cols[k][i] * proj;
                    cols[j][i] -= sub;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    Some(ComplexMatrix4::from_columns(&cols))
}

/// Random state from the Hilbert–Schmidt measure: `GG†/Tr(GG†)`.
pub fn random_state(g: &mut SeededGenerator) -> Result<DensityMatrix, SamplingError> {
    let gm = g.ginibre();
    let w = gm * gm.adjoint();
    let tr = w.trace().re;
    Ok(validate(&w.scale(1.0 / tr))?)
}

/// Running maximum of `F₃(UρU†)` over sampled unitaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalSup {
    pub sup: f64,
    /// `f3_global_max` of the spectrum.
    pub bound: f64,
    /// `bound − sup`.
    pub gap: f64,
    pub trials: usize,
}

/// The first trial is the identity; the remaining `trials − 1` are Haar
/// unitaries drawn from `g`.
pub fn empirical_f3_sup(
    rho: &DensityMatrix,
    trials: usize,
    g: &mut SeededGenerator,
) -> Result<EmpiricalSup, SamplingError> {
    if trials == 0 {
        return Err(SamplingError::NoTrials);
    }
    let bound = f3_global_max(&spectrum_report(rho)?);
    let mut sup = f3_max(rho).value;
    for _ in 1..trials {
        let u = haar_unitary(g);
        sup = sup.max(f3_max(&rho.conjugated(&u)).value);
    }
    Ok(EmpiricalSup {
        sup,
        bound,
        gap: bound - sup,
        trials,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub fraction: f64,
    /// `√(f(1−f)/samples)`.
    pub stderr: f64,
    pub samples: usize,
    pub inside: usize,
}

/// Hilbert–Schmidt volume fraction of AUS₃ (`Tr ρ² ≤ ½`), with the binomial
/// standard error.
pub fn aus3_volume_estimate(
    samples: usize,
    g: &mut SeededGenerator,
) -> Result<VolumeEstimate, SamplingError> {
    if samples < MIN_VOLUME_SAMPLES {
        return Err(SamplingError::TooFewSamples {
            min: MIN_VOLUME_SAMPLES,
            got: samples,
        });
    }
    let bound = purity_bound();
    let mut inside = 0;
    for _ in 0..samples {
        if random_state(g)?.purity() <= bound {
            inside += 1;
        }
    }
    let fraction = inside as f64 / samples as f64;
    Ok(VolumeEstimate {
        fraction,
        stderr: (fraction * (1.0 - fraction) / samples as f64).sqrt(),
        samples,
        inside,
    })
}

/// `count` random states, drawn in parallel with one forked generator per
/// index so the output does not depend on the thread count.
pub fn random_states_par(
    count: usize,
    g: &SeededGenerator,
) -> Result<Vec<DensityMatrix>, SamplingError> {
    (0..count)
        .into_par_iter()
        .map(|i| random_state(&mut g.fork(i as u64)))
        .collect()
}

/// Uniformly distributed point on the unit sphere in ℝ³.
pub fn random_unit_vector(g: &mut SeededGenerator) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [0, 1, 2].map(|_| StandardNormal.sample(g.rng()));
        let n = norm3(&v);
        if n > 1e-8 {
            return v.map(|x| x / n);
        }
    }
}

/// Random `n`-setting: independent unit vectors for Alice, a random
/// orthonormal frame (first `n` vectors) for Bob.
pub fn random_setting(g: &mut SeededGenerator, n: usize) -> Result<MeasurementSetting, SteeringError> {
    let u = (0..n).map(|_| random_unit_vector(g)).collect();
    let e1 = random_unit_vector(g);
    let e2 = loop {
        let w = random_unit_vector(g);
        let d = dot3(&w, &e1);
        let r = [w[0] - d * e1[0], w[1] - d * e1[1], w[2] - d * e1[2]];
        let n = norm3(&r);
        if n > 1e-6 {
            break r.map(|x| x / n);
        }
    };
    let e3 = [
        e1[1] * e2[2] - e1[2] * e2[1],
        e1[2] * e2[0] - e1[0] * e2[2],
        e1[0] * e2[1] - e1[1] * e2[0],
    ];
    MeasurementSetting::new(u, [e1, e2, e3].into_iter().take(n).collect())
}

/// `tρ + (1−t)I/4` with `t ≥ 0` chosen so the purity equals `target`
/// (`target ≥ ¼`, and `target ≤ Tr ρ²` unless `ρ = I/4`).
pub fn depolarize_to_purity(rho: &DensityMatrix, target: f64) -> DensityMatrix {
    let excess = rho.purity() - 0.25;
    if excess <= 0.0 {
        return *rho;
    }
    let t = ((target - 0.25).max(0.0) / excess).sqrt();
    rho.mix(&DensityMatrix::maximally_mixed(), t)
}

/// A state with purity at most ½: a Hilbert–Schmidt draw, depolarized by a
/// random amount when it lies outside.
pub fn random_aus3_state(g: &mut SeededGenerator) -> Result<DensityMatrix, SamplingError> {
    let rho = random_state(g)?;
    if rho.purity() <= 0.5 {
        return Ok(rho);
    }
    let target = 0.25 + 0.25 * g.rng().gen::<f64>();
    Ok(depolarize_to_purity(&rho, target))
}

/// A state whose purity is `½ + δ` with `δ` uniform in `[−max_offset, max_offset]`.
pub fn boundary_adjacent_state(
    g: &mut SeededGenerator,
    max_offset: f64,
) -> Result<DensityMatrix, SamplingError> {
    let delta = max_offset * (2.0 * g.rng().gen::<f64>() - 1.0);
    let target = 0.5 + delta;
    loop {
        let rho = random_state(g)?;
        if rho.purity() > target + 1e-3 {
            return Ok(depolarize_to_purity(&rho, target));
        }
    }
}

/// Haar-random pure three-qubit state.
pub fn random_pure_three_qubit(g: &mut SeededGenerator) -> Result<PureThreeQubitState, SamplingError> {
    let a = [0; 8].map(|_| g.complex_normal());
    Ok(PureThreeQubitState::normalized(a)?)
}
