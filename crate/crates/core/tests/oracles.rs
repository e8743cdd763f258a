//! Expected values checked against routes that do not share code with the
//! implementation: determinant expansion, hand-built Pauli products,
//! Monte Carlo moments.

use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use abs_steer::absolute::{decide_aus3, reduced_pair_verdict};
use abs_steer::families::{
    family_point, ghz, gisin, product_000, scan_family, w_state, werner, Family, Grid,
};
use abs_steer::numlin::ComplexMatrix4;
use abs_steer::states::{spectrum_report, to_bloch, DensityMatrix};
use abs_steer::unitary::{
    aus3_volume_estimate, empirical_f3_sup, haar_unitary, random_state, SeededGenerator,
};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Determinant by cofactor expansion.
fn det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut acc = c(0.0, 0.0);
    for j in 0..n {
        let minor: Vec<Vec<Complex64>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v).collect())
            .collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += m[0][j] * det(&minor) * sign;
    }
    acc
}

fn char_poly_at(a: &ComplexMatrix4, lambda: f64) -> Complex64 {
    let rows: Vec<Vec<Complex64>> = (0..4)
        .map(|i| (0..4).map(|j| a.0[i][j] - if i == j { c(lambda, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect();
    det(&rows)
}

/// Werner matrix written out entry by entry.
fn werner_entries(p: f64) -> ComplexMatrix4 {
    let q = (1.0 - p) / 4.0;
    let mut m = ComplexMatrix4::from_real_diagonal([q, q + p / 2.0, q + p / 2.0, q]);
    m.0[1][2] = c(-p / 2.0, 0.0);
    m.0[2][1] = c(-p / 2.0, 0.0);
    m
}

#[test]
fn werner_eigenvalues_are_roots_of_characteristic_polynomial() {
    let m = werner_entries(0.5);
    for lambda in [0.625, 0.125] {
        assert!(char_poly_at(&m, lambda).norm() < 1e-14);
    }
    // multiplicity: the polynomial equals (λ−0.625)(λ−0.125)³
    for probe in [0.0, 0.3, 0.9] {
        let expect = (probe - 0.625) * (probe - 0.125f64).powi(3);
        assert!((char_poly_at(&m, probe).re - expect).abs() < 1e-14);
    }
    let r = spectrum_report(&werner(0.5).unwrap()).unwrap();
    for (x, e) in r.eigenvalues.iter().zip([0.625, 0.125, 0.125, 0.125]) {
        assert!((x - e).abs() < 1e-12);
    }
}

#[test]
fn werner_correlations_by_direct_pauli_traces() {
    // Tr(ρ σ_i⊗σ_i) by hand: XX and YY couple |01⟩↔|10⟩ and |00⟩↔|11⟩,
    // ZZ is diag(1, −1, −1, 1).
    for p in [0.2, 0.6, 0.9] {
        let m = werner_entries(p);
        let xx = 2.0 * (m.0[1][2].re + m.0[0][3].re);
        let yy = 2.0 * (m.0[1][2].re - m.0[0][3].re);
        let zz = m.0[0][0].re - m.0[1][1].re - m.0[2][2].re + m.0[3][3].re;
        let t = to_bloch(&werner(p).unwrap()).t;
        assert!((t.0[0][0] - xx).abs() < 1e-14 && (xx + p).abs() < 1e-14);
        assert!((t.0[1][1] - yy).abs() < 1e-14 && (yy + p).abs() < 1e-14);
        assert!((t.0[2][2] - zz).abs() < 1e-14 && (zz + p).abs() < 1e-14);
    }
}

#[test]
fn haar_moments() {
    // E|U_ij|² = 1/4 and E|U_ij|⁴ = 2/(d(d+1)) = 1/10 for d = 4.
    let mut g = SeededGenerator::new(7, 0);
    let n = 20_000;
    let (mut m2, mut m4, mut m2_rot) = (0.0, 0.0, 0.0);
    let fixed = haar_unitary(&mut SeededGenerator::new(8, 0));
    for _ in 0..n {
        let u = haar_unitary(&mut g);
        let a = u.0[1][2].norm_sqr();
        m2 += a;
        m4 += a * a;
        m2_rot += (fixed * u).0[0][0].norm_sqr().powi(2);
    }
    let n = n as f64;
    assert!((m2 / n - 0.25).abs() < 0.005);
    assert!((m4 / n - 0.1).abs() < 0.005);
    // left-invariance: same fourth moment after a fixed rotation
    assert!((m2_rot / n - 0.1).abs() < 0.005);
}

#[test]
fn random_state_mean_is_maximally_mixed() {
    let mut g = SeededGenerator::new(9, 0);
    let mut acc = ComplexMatrix4::zeros();
    let n = 10_000;
    for _ in 0..n {
        acc = acc + *random_state(&mut g).unwrap().matrix();
    }
    let mean = acc.scale(1.0 / n as f64);
    assert!((mean - ComplexMatrix4::identity().scale(0.25)).max_norm() < 0.01);
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/haar_seed42_stream0.txt")
}

fn render(u: &ComplexMatrix4) -> String {
    let mut s = String::new();
    for row in u.0.iter() {
        let cells: Vec<String> = row.iter().map(|z| format!("{:?} {:?}", z.re, z.im)).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

#[test]
fn haar_golden_seed_42() {
    let u = haar_unitary(&mut SeededGenerator::new(42, 0));
    let text = render(&u);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden_path().parent().unwrap()).unwrap();
        std::fs::write(golden_path(), &text).unwrap();
    }
    let golden = std::fs::read_to_string(golden_path()).expect("golden file");
    assert_eq!(text, golden);
    assert_eq!(text, render(&haar_unitary(&mut SeededGenerator::new(42, 0))));
}

#[test]
fn empirical_sup_approaches_closed_form() {
    let rho = gisin(0.8, FRAC_PI_4).unwrap();
    let target = 1.64f64.sqrt();
    let mut last_gap = f64::INFINITY;
    for trials in [10, 100, 1_000, 10_000] {
        let s = empirical_f3_sup(&rho, trials, &mut SeededGenerator::new(5, 0)).unwrap();
        assert!(s.sup <= target + 1e-9);
        assert!((s.bound - target).abs() < 1e-12);
        // same stream, more trials: running max can only improve
        assert!(s.gap <= last_gap);
        last_gap = s.gap;
    }
    assert!(last_gap < 0.02, "gap {last_gap}");
}

#[test]
fn empirical_sup_on_bell_diagonal_is_tight_immediately() {
    let rho = werner(0.9).unwrap();
    let s = empirical_f3_sup(&rho, 1, &mut SeededGenerator::new(0, 0)).unwrap();
    assert!(s.gap.abs() < 1e-9);
    let mm = DensityMatrix::maximally_mixed();
    let s = empirical_f3_sup(&mm, 50, &mut SeededGenerator::new(0, 0)).unwrap();
    assert!(s.sup < 1e-12);
}

#[test]
fn volume_fraction_is_interior_and_deterministic() {
    let a = aus3_volume_estimate(10_000, &mut SeededGenerator::new(3, 0)).unwrap();
    let b = aus3_volume_estimate(10_000, &mut SeededGenerator::new(3, 0)).unwrap();
    assert_eq!(a, b);
    assert!(a.fraction > 0.0 && a.fraction < 1.0);
    assert_eq!(a.stderr, (a.fraction * (1.0 - a.fraction) / 10_000.0).sqrt());
}

#[test]
fn three_qubit_named_states() {
    let v = reduced_pair_verdict(&ghz()).unwrap();
    assert!(v.iter().all(|p| p.verdict.in_aus3 && p.complement_bloch_norm < 1e-12));

    let v = reduced_pair_verdict(&product_000()).unwrap();
    assert!(!v[0].verdict.in_aus3);
    assert!((v[0].verdict.f3_global_max - 3f64.sqrt()).abs() < 1e-9);

    let v = reduced_pair_verdict(&w_state()).unwrap();
    for p in v {
        assert!(!p.verdict.in_aus3);
        assert!((p.complement_bloch_norm - 1.0 / 3.0).abs() < 1e-12);
        assert!((p.verdict.f3_global_max.powi(2) - 11.0 / 9.0).abs() < 1e-9);
    }
}

#[test]
fn gisin_verdicts_do_not_depend_on_theta() {
    for k in 0..=100 {
        let lambda = k as f64 / 100.0;
        let verdicts: Vec<_> = [0.1, FRAC_PI_4, 1.4]
            .iter()
            .map(|&t| decide_aus3(&gisin(lambda, t).unwrap()).unwrap())
            .collect();
        for v in &verdicts[1..] {
            assert_eq!(v.in_aus3, verdicts[0].in_aus3);
            assert!((v.f3_global_max - verdicts[0].f3_global_max).abs() < 1e-10);
        }
    }
}

#[test]
fn fine_scans_match_closed_forms() {
    let grid = Grid::new(0.0, 1.0, 1e-3).unwrap();
    for family in [
        Family::Werner,
        Family::Gisin { theta: 0.1 },
        Family::Gisin { theta: FRAC_PI_4 },
        Family::Gisin { theta: 1.4 },
    ] {
        let scan = scan_family(family, grid).unwrap();
        assert_eq!(scan.points.len(), 1001);
        assert!(scan.boundary_is_monotone());
        let th = scan.threshold.unwrap();
        assert!((th - family.closed_form_threshold()).abs() < 1e-9, "{family}: {th}");
        for p in &scan.points {
            let x = spectrum_report(&p.state).unwrap().eigenvalues;
            for (a, b) in x.iter().zip(family.closed_form_spectrum(p.parameter)) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn family_points_match_direct_verdicts() {
    let p = family_point(Family::Werner, 0.8).unwrap();
    assert_eq!(p.verdict, decide_aus3(&werner(0.8).unwrap()).unwrap());
    assert!((p.excess() - (3f64.sqrt() * 0.8 - 1.0)).abs() < 1e-9);
}
