//! Self-check battery run by `abs-steer verify`: each property is evaluated
//! on seeded random samples and reported with its worst-case margin
//! (negative margin means failure).

use std::fmt;

use rayon::prelude::*;

use crate::absolute::{
    bell_diagonal_canonical, decide_aus3, f3_global_max, purity_bound, AbsoluteError,
};
use crate::numlin::{singular_values_3x3, RealMatrix3};
use crate::states::{bloch_operator, spectrum_report, BlochForm, DensityMatrix};
use crate::steering::{jm_bound_check, signed_functional_bloch, signed_functional_matrix, SteeringValue};
use crate::unitary::{
    boundary_adjacent_state, haar_unitary, random_aus3_state, random_setting, random_state,
    SamplingError, SeededGenerator,
};
use crate::witness::activation_witness;

/// Slack for comparisons of computed maxima.
pub const MAX_TOL: f64 = 1e-9;
/// Slack for algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Extracts Bloch data from a state; swapped out only by fault-injection
/// fixtures.
pub type BlochExtractor = fn(&DensityMatrix) -> BlochForm;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub checked: usize,
    /// Smallest `allowed − observed` over all samples.
    pub worst_margin: f64,
    pub passed: bool,
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} checked={} worst_margin={:.6e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.worst_margin
        )
    }
}

#[derive(Debug, Clone)]
pub struct Battery {
    pub trials: usize,
    pub seed: u64,
    pub bloch: BlochExtractor,
}

impl Battery {
    pub fn new(trials: usize, seed: u64) -> Self {
        Battery {
            trials,
            seed,
            bloch: crate::states::to_bloch,
        }
    }

    pub fn run(&self) -> Result<Vec<PropertyResult>, SamplingError> {
        let base = SeededGenerator::new(self.seed, 0);
        let states: Vec<DensityMatrix> = (0..self.trials)
            .into_par_iter()
            .map(|i| random_state(&mut base.fork(i as u64)))
            .collect::<Result<_, _>>()?;

        Ok(vec![
            self.maximality(&states)?,
            self.canonical_attains(&states),
            self.four_criteria(&states)?,
            self.teleportation_bound(&states),
            self.convexity()?,
            self.jm_bound(&states),
            self.witness_sign()?,
            self.conventions(&states)?,
        ])
    }

    fn gen(&self, stream: u64) -> SeededGenerator {
        SeededGenerator::new(self.seed, stream)
    }

    /// `F₃(UρU†) ≤ f3_global_max(ρ)` over `trials` Haar unitaries per state.
    fn maximality(&self, states: &[DensityMatrix]) -> Result<PropertyResult, SamplingError> {
        let gen = self.gen(1);
        let margins: Vec<f64> = states
            .par_iter()
            .enumerate()
            .map(|(i, rho)| {
                let mut g = gen.fork(i as u64);
                let bound = f3_global_max(&spectrum_report(rho)?);
                let mut worst = f64::INFINITY;
                for _ in 0..self.trials {
                    let u = haar_unitary(&mut g);
                    let t = (self.bloch)(&rho.conjugated(&u)).t;
                    worst = worst.min(bound + MAX_TOL - t.frobenius_norm());
                }
                Ok(worst)
            })
            .collect::<Result<_, SamplingError>>()?;
        Ok(summarize("unitary_maximality", &margins))
    }

    fn canonical_attains(&self, states: &[DensityMatrix]) -> PropertyResult {
        let margins: Vec<f64> = states
            .par_iter()
            .map(|rho| {
                let Ok(c) = bell_diagonal_canonical(rho) else {
                    return f64::NEG_INFINITY;
                };
                let Ok(spec) = spectrum_report(rho) else {
                    return f64::NEG_INFINITY;
                };
                let got = (self.bloch)(&c.state).t.frobenius_norm();
                MAX_TOL - (got - f3_global_max(&spec)).abs()
            })
            .collect();
        summarize("canonical_attains_bound", &margins)
    }

    /// All membership criteria agree, on random and near-boundary states.
    fn four_criteria(&self, states: &[DensityMatrix]) -> Result<PropertyResult, SamplingError> {
        let mut g = self.gen(2);
        let mut all: Vec<DensityMatrix> = states.to_vec();
        for _ in 0..self.trials {
            all.push(boundary_adjacent_state(&mut g, 1e-6)?);
        }
        let margins: Vec<f64> = all
            .par_iter()
            .map(|rho| match decide_aus3(rho) {
                Ok(v) => {
                    let bloch_sum = (self.bloch)(rho).norm_sum();
                    let by_bloch = bloch_sum <= crate::absolute::squared_bound();
                    if by_bloch != v.in_aus3 {
                        return f64::NEG_INFINITY;
                    }
                    IDENTITY_TOL - (bloch_sum - (4.0 * v.purity - 1.0)).abs()
                }
                Err(AbsoluteError::InternalInconsistency(_)) | Err(AbsoluteError::State(_)) => {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        Ok(summarize("four_criteria_agreement", &margins))
    }

    /// `F₃ ≤ N`, hence `F₃ > 1 ⇒ N > 1`.
    fn teleportation_bound(&self, states: &[DensityMatrix]) -> PropertyResult {
        let margins: Vec<f64> = states
            .par_iter()
            .map(|rho| {
                let t = (self.bloch)(rho).t;
                let f3 = t.frobenius_norm();
                let n: f64 = singular_values_3x3(&t).iter().sum();
                if f3 > 1.0 && n <= 1.0 {
                    return f64::NEG_INFINITY;
                }
                n + IDENTITY_TOL - f3
            })
            .collect();
        summarize("steering_implies_teleportation", &margins)
    }

    fn convexity(&self) -> Result<PropertyResult, SamplingError> {
        let mut g = self.gen(3);
        let mut margins = Vec::with_capacity(self.trials);
        for _ in 0..self.trials {
            let a = random_aus3_state(&mut g)?;
            let b = random_aus3_state(&mut g)?;
            let w: f64 = rand::Rng::gen(g.rng());
            let mix = a.mix(&b, w);
            margins.push(purity_bound() - mix.purity());
        }
        Ok(summarize("aus3_convexity", &margins))
    }

    fn jm_bound(&self, states: &[DensityMatrix]) -> PropertyResult {
        let margins: Vec<f64> = states
            .iter()
            .map(|rho| {
                let v = SteeringValue::new((self.bloch)(rho).t.frobenius_norm());
                if !jm_bound_check(&v) {
                    return f64::NEG_INFINITY;
                }
                3f64.sqrt() + MAX_TOL - v.value
            })
            .collect();
        summarize("joint_measurability_bound", &margins)
    }

    /// Activation witnesses are negative on their generating state and
    /// nonnegative on AUS₃ samples.
    fn witness_sign(&self) -> Result<PropertyResult, SamplingError> {
        let mut g = self.gen(4);
        let witnesses = self.trials.clamp(1, 20);
        let probes = self.trials.max(1);
        let mut margins = Vec::new();
        let mut built = 0;
        while built < witnesses {
            let rho = random_state(&mut g)?;
            let Ok(w) = activation_witness(&rho) else {
                continue;
            };
            built += 1;
            let spec = spectrum_report(&rho)?;
            let expected = 1.0 - f3_global_max(&spec);
            let own = w.expectation(&rho);
            margins.push(if own < 0.0 { MAX_TOL - (own - expected).abs() } else { f64::NEG_INFINITY });
            for _ in 0..probes {
                let sigma = random_aus3_state(&mut g)?;
                margins.push(w.expectation(&sigma) + MAX_TOL);
            }
        }
        Ok(summarize("witness_separates_aus3", &margins))
    }

    /// Bloch round trip and the two evaluation routes of the functional.
    fn conventions(&self, states: &[DensityMatrix]) -> Result<PropertyResult, SamplingError> {
        let mut g = self.gen(5);
        let mut margins = Vec::with_capacity(2 * states.len());
        for rho in states {
            let f = (self.bloch)(rho);
            let round_trip = (bloch_operator(&f) - *rho.matrix()).max_norm();
            margins.push(IDENTITY_TOL - round_trip);
            let mu = random_setting(&mut g, 3).map_err(|_| SamplingError::NoTrials)?;
            let a = signed_functional_bloch(&f.t, &mu);
            let b = signed_functional_matrix(rho, &mu);
            margins.push(IDENTITY_TOL - (a - b).abs());
        }
        Ok(summarize("pauli_conventions", &margins))
    }
}

fn summarize(name: &'static str, margins: &[f64]) -> PropertyResult {
    let worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    PropertyResult {
        name,
        checked: margins.len(),
        worst_margin,
        passed: worst_margin >= 0.0,
    }
}

/// Bloch extraction with the sign of `Y` flipped on Bob's side. Used as a
/// negative control for the battery.
pub fn corrupted_bloch_y_sign(rho: &DensityMatrix) -> BlochForm {
    let mut f = crate::states::to_bloch(rho);
    f.b[1] = -f.b[1];
    let mut t = RealMatrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            t.0[i][j] = if j == 1 { -f.t.0[i][j] } else { f.t.0[i][j] };
        }
    }
    f.t = t;
    f
}
