//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::f64::consts::FRAC_PI_4;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use abs_steer::absolute::{
    bell_diagonal_canonical, decide_aus3, f3_global_max, frobenius_ball_check,
    reduced_pair_verdict, AbsoluteError,
};
use abs_steer::cli::{cmd_sample, cmd_scan, parse_curve};
use abs_steer::families::{ghz, w_state, werner, Family};
use abs_steer::states::{
    reduce_to_pair, single_qubit_bloch_norm, singlet, spectrum_report, to_bloch, Qubit,
    QubitPair, SpectrumReport,
};
use abs_steer::steering::f3_max;
use abs_steer::telep_chsh::aux_criteria;
use abs_steer::unitary::{
    aus3_volume_estimate, boundary_adjacent_state, haar_unitary, random_aus3_state,
    random_pure_three_qubit, random_state, SeededGenerator,
};
use abs_steer::witness::{activation_witness, WitnessError};
use rand::Rng;
use rayon::prelude::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed >= limit {
            o.passed = false;
            o.detail.push_str(&format!("; runtime {elapsed:.2?} exceeds {limit:.0?}"));
        }
    }
    (o, elapsed)
}

fn scan_threshold(family: Family) -> Option<f64> {
    let text = cmd_scan(family, 0.0, 1.0, 0.001).ok()?;
    parse_curve(&text).ok()?.threshold
}

fn c1_werner_threshold() -> Outcome {
    let th = scan_threshold(Family::Werner);
    let ok = th.is_some_and(|t| (t - 0.5773502692).abs() <= 1e-9);
    outcome(ok, format!("threshold = {th:?}, expected 0.5773502692 ± 1e-9"))
}

fn c2_gisin_threshold() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for theta in [0.1, FRAC_PI_4, 1.4] {
        let th = scan_threshold(Family::Gisin { theta });
        ok &= th.is_some_and(|t| (t - 0.6666666667).abs() <= 1e-9);
        parts.push(format!("θ={theta:.4}: {th:?}"));
    }
    outcome(ok, format!("{}, expected 0.6666666667 ± 1e-9", parts.join(", ")))
}

fn c3_quantum_maximum() -> Outcome {
    let a = f3_max(&singlet()).value;
    let b = f3_global_max(&SpectrumReport::from_eigenvalues([1.0, 0.0, 0.0, 0.0]));
    let ok = (a - 1.7320508076).abs() <= 1e-9 && (b - 1.7320508076).abs() <= 1e-9;
    outcome(ok, format!("f3_max(singlet) = {a:.12}, f3_global_max(pure) = {b:.12}"))
}

fn c4_purity_identity() -> Outcome {
    let mut g = SeededGenerator::new(4, 0);
    let mut worst_spec = 0.0f64;
    for _ in 0..100_000 {
        // uniform point on the simplex via normalized exponentials
        let e: [f64; 4] = [0; 4].map(|_| -(1.0 - g.rng().gen::<f64>()).ln());
        let s: f64 = e.iter().sum();
        let spec = SpectrumReport::from_eigenvalues(e.map(|x| x / s));
        let f = f3_global_max(&spec);
        worst_spec = worst_spec.max((f * f - (4.0 * spec.purity - 1.0)).abs());
    }
    let base = SeededGenerator::new(4, 1);
    let worst_state = (0..10_000u64)
        .into_par_iter()
        .map(|i| {
            let rho = random_state(&mut base.fork(i)).expect("sample");
            let f = f3_global_max(&spectrum_report(&rho).expect("spectrum"));
            (f * f - (4.0 * rho.purity() - 1.0)).abs()
        })
        .reduce(|| 0.0, f64::max);
    let ok = worst_spec < 1e-10 && worst_state < 1e-10;
    outcome(
        ok,
        format!("max deviation: spectra {worst_spec:.2e}, states {worst_state:.2e} (< 1e-10)"),
    )
}

fn c5_four_criteria() -> Outcome {
    let base = SeededGenerator::new(5, 0);
    let mut states: Vec<_> = (0..10_000u64)
        .into_par_iter()
        .map(|i| random_state(&mut base.fork(i)).expect("sample"))
        .collect();
    let mut g = SeededGenerator::new(5, 1);
    for _ in 0..1_000 {
        states.push(boundary_adjacent_state(&mut g, 1e-6).expect("sample"));
    }
    let (disagreements, inconsistencies, inside) = states
        .par_iter()
        .map(|rho| match decide_aus3(rho) {
            Ok(v) => {
                let f = to_bloch(rho);
                let bloch = f.norm_sum() <= abs_steer::absolute::squared_bound();
                let agree = v.in_aus3 == bloch && v.in_aus3 == frobenius_ball_check(rho);
                (usize::from(!agree), 0, usize::from(v.in_aus3))
            }
            Err(AbsoluteError::InternalInconsistency(_)) => (0, 1, 0),
            Err(_) => (1, 0, 0),
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    outcome(
        disagreements == 0 && inconsistencies == 0,
        format!(
            "{} states ({inside} inside): {disagreements} disagreements, {inconsistencies} InternalInconsistency",
            states.len()
        ),
    )
}

fn c6_unitary_maximality() -> Outcome {
    let base = SeededGenerator::new(6, 0);
    let (worst_excess, worst_canonical) = (0..300u64)
        .into_par_iter()
        .map(|i| {
            let mut g = base.fork(i);
            let rho = random_state(&mut g).expect("sample");
            let bound = f3_global_max(&spectrum_report(&rho).expect("spectrum"));
            let mut excess = f64::NEG_INFINITY;
            for _ in 0..300 {
                let u = haar_unitary(&mut g);
                excess = excess.max(f3_max(&rho.conjugated(&u)).value - bound);
            }
            let canonical = bell_diagonal_canonical(&rho).expect("canonical");
            let gap = (f3_max(&canonical.state).value - bound).abs();
            (excess, gap)
        })
        .reduce(
            || (f64::NEG_INFINITY, 0.0),
            |a, b| (a.0.max(b.0), a.1.max(b.1)),
        );
    outcome(
        worst_excess <= 1e-9 && worst_canonical <= 1e-9,
        format!(
            "max f3(UρU†) − bound = {worst_excess:.3e} (≤ 1e-9), canonical gap = {worst_canonical:.2e} (≤ 1e-9)"
        ),
    )
}

fn c7_steering_implies_teleportation() -> Outcome {
    let base = SeededGenerator::new(7, 0);
    let (counterexamples, worst) = (0..10_000u64)
        .into_par_iter()
        .map(|i| {
            let rho = random_state(&mut base.fork(i)).expect("sample");
            let f3 = f3_max(&rho);
            let aux = aux_criteria(&rho);
            (usize::from(f3.violated && aux.n <= 1.0), f3.value - aux.n)
        })
        .reduce(|| (0, f64::NEG_INFINITY), |a, b| (a.0 + b.0, a.1.max(b.1)));
    outcome(
        counterexamples == 0 && worst <= 1e-10,
        format!("{counterexamples} counterexamples, max f3 − N = {worst:.3e} (≤ 1e-10)"),
    )
}

fn c8_witness_contract() -> Outcome {
    let varsigma = werner(0.7).expect("werner");
    let Ok(w) = activation_witness(&varsigma) else {
        return outcome(false, "no witness for Werner p=0.7".into());
    };
    let own = w.expectation(&varsigma);
    let expect = 1.0 - 3f64.sqrt() * 0.7;
    let own_ok = (own - expect).abs() <= 1e-9 && own < 0.0;
    let mut g = SeededGenerator::new(8, 0);
    let mut worst = f64::INFINITY;
    for _ in 0..1_000 {
        let sigma = random_aus3_state(&mut g).expect("sample");
        worst = worst.min(w.expectation(&sigma));
    }
    let rejects = matches!(
        activation_witness(&werner(0.5).expect("werner")),
        Err(WitnessError::NotActivatable { .. })
    );
    outcome(
        own_ok && worst >= -1e-9 && rejects,
        format!(
            "Tr(Wς) = {own:.12} (expected {expect:.12}), min Tr(Wσ) over AUS3 = {worst:.3e}, p=0.5 NotActivatable: {rejects}"
        ),
    )
}

fn c9_three_qubit() -> Outcome {
    let mut g = SeededGenerator::new(9, 0);
    let mut mismatches = 0;
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let psi = random_pure_three_qubit(&mut g).expect("sample");
        let l = single_qubit_bloch_norm(&psi, Qubit::C);
        let v = decide_aus3(&reduce_to_pair(&psi, QubitPair::AB)).expect("verdict");
        if v.in_aus3 != (l < 1e-7) {
            mismatches += 1;
        }
        worst = worst.max((v.f3_global_max.powi(2) - (1.0 + 2.0 * l * l)).abs());
    }
    let ghz_ok = reduced_pair_verdict(&ghz())
        .map(|v| v.iter().all(|p| p.verdict.in_aus3))
        .unwrap_or(false);
    let w_ok = reduced_pair_verdict(&w_state())
        .map(|v| v.iter().all(|p| !p.verdict.in_aus3))
        .unwrap_or(false);
    outcome(
        mismatches == 0 && worst < 1e-9 && ghz_ok && w_ok,
        format!(
            "{mismatches} mismatches, max |f3² − (1+2l²)| = {worst:.2e}, GHZ all in: {ghz_ok}, W all out: {w_ok}"
        ),
    )
}

fn c10_volume_sampling() -> Outcome {
    let a = cmd_sample(100_000, 10);
    let b = cmd_sample(100_000, 10);
    let deterministic = matches!((&a, &b), (Ok(x), Ok(y)) if x == y);
    let v = aus3_volume_estimate(100_000, &mut SeededGenerator::new(10, 0)).expect("estimate");
    let interior = v.fraction > 0.0 && v.fraction < 1.0;
    let f = v.inside as f64 / v.samples as f64;
    let stderr_exact = v.fraction == f && v.stderr == (f * (1.0 - f) / v.samples as f64).sqrt();
    let report_matches = a
        .as_ref()
        .map(|r| r.contains(&format!("inside = {}", v.inside)))
        .unwrap_or(false);
    outcome(
        deterministic && interior && stderr_exact && report_matches,
        format!(
            "fraction = {:.6} ± {:.6}, deterministic: {deterministic}, stderr exact: {stderr_exact}",
            v.fraction, v.stderr
        ),
    )
}

type Criterion = (&'static str, &'static str, Option<Duration>, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("C1", "werner threshold", Some(Duration::from_secs(5)), c1_werner_threshold),
        ("C2", "gisin threshold, theta-independent", Some(Duration::from_secs(5)), c2_gisin_threshold),
        ("C3", "quantum maximum sqrt(3)", None, c3_quantum_maximum),
        ("C4", "purity identity", Some(Duration::from_secs(30)), c4_purity_identity),
        ("C5", "four-criteria agreement", None, c5_four_criteria),
        ("C6", "global-unitary maximality", Some(Duration::from_secs(60)), c6_unitary_maximality),
        ("C7", "steering implies teleportation", None, c7_steering_implies_teleportation),
        ("C8", "witness contract", None, c8_witness_contract),
        ("C9", "three-qubit reductions", None, c9_three_qubit),
        ("C10", "volume sampling properties", None, c10_volume_sampling),
    ];
    let mut failures = 0;
    for (id, name, limit, f) in criteria {
        let (o, elapsed) = timed(limit, f);
        if !o.passed {
            failures += 1;
        }
        println!(
            "[{}] {id} {name}: {} ({elapsed:.2?})",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
