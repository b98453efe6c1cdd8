mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;

use gho_core::coherent::{
    coherent_overlap, coherent_wavefunction, expectation_mu, expectation_pi, make_coherent,
    quadrature_moments, uncertainties, CoherentState,
};
use gho_core::mass_model::MassSpec;
use gho_core::oscillator::{eigenfunction, LadderOps};
use gho_core::{GhoError, Grid};

use common::{admissible_cases, auto_grid, setup};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn eigen_residual(spec: &MassSpec, grid: Grid, z: Complex64) -> f64 {
    let (map, rc) = setup(spec);
    let cs = make_coherent(z, 1e-12).unwrap();
    let psi = coherent_wavefunction(&map, rc, &cs, grid).unwrap();
    let a_psi = LadderOps::new(&map, grid).unwrap().lower(&psi).unwrap();
    a_psi.minus_scaled(z, &psi).norm() / psi.norm()
}

#[test]
fn vacuum() {
    let cs = make_coherent(c(0.0, 0.0), 1e-12).unwrap();
    assert_eq!(cs.coeffs()[0], c(1.0, 0.0));
    assert!(cs.coeffs()[1..].iter().all(|v| *v == c(0.0, 0.0)));
}

#[test]
fn poisson_mean_one() {
    let cs = make_coherent(c(1.0, 0.0), 1e-12).unwrap();
    let k = cs.coeffs();
    assert!((k[1].norm_sqr() / k[0].norm_sqr() - 1.0).abs() < 1e-15);
}

#[test]
fn truncation_for_z2() {
    let cs = make_coherent(c(2.0, 0.0), 1e-12).unwrap();
    assert!(cs.retained_weight() >= 1.0 - 1e-12);
    assert!(cs.retained_weight() <= 1.0 + 1e-15);
    assert!(cs.truncation() <= 40, "N = {}", cs.truncation());
    // the previous order would not have met the bound
    let shorter = CoherentState::with_truncation(c(2.0, 0.0), cs.truncation() - 1);
    assert!(shorter.retained_weight() < 1.0 - 1e-12);
}

#[test]
fn coefficients_follow_closed_form() {
    let z = c(0.4, -1.1);
    let cs = make_coherent(z, 1e-12).unwrap();
    let mut fact = 1.0;
    for (n, cn) in cs.coeffs().iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        let expect = (-0.5 * z.norm_sqr()).exp() * z.powu(n as u32) / fact.sqrt();
        assert!((cn - expect).norm() < 1e-15 * (1.0 + expect.norm()));
    }
}

#[test]
fn invalid_requests() {
    assert!(matches!(
        make_coherent(c(1.0, 0.0), 1e-3),
        Err(GhoError::InvalidTolerance(_))
    ));
    assert!(matches!(
        make_coherent(c(9.0, 0.0), 1e-12),
        Err(GhoError::AmplitudeTooLarge { .. })
    ));
    let spec = MassSpec::exponential(1.0).unwrap();
    let (map, rc) = setup(&spec);
    let cs = make_coherent(c(0.5, 0.0), 1e-12).unwrap();
    let r = coherent_wavefunction(&map, rc, &cs, auto_grid(&spec, 101));
    assert!(matches!(r, Err(GhoError::InadmissibleRange(_))));
}

#[test]
fn zero_amplitude_profile_is_ground_state() {
    let spec = MassSpec::rational_square(2.0).unwrap();
    let (map, rc) = setup(&spec);
    let grid = auto_grid(&spec, 1001);
    let cs = make_coherent(c(0.0, 0.0), 1e-12).unwrap();
    let psi = coherent_wavefunction(&map, rc, &cs, grid).unwrap();
    let psi0 = eigenfunction(&map, rc, 0, grid).unwrap();
    assert_eq!(psi.values, psi0.values);
}

#[test]
fn eigenrelation_examples() {
    let grid = Grid::new(-12.0, 12.0, 8001).unwrap();
    let r = eigen_residual(&MassSpec::constant(), grid, c(0.7, 0.0));
    assert!(r < 1e-5, "{r}");
    let spec = MassSpec::rational_square(2.0).unwrap();
    let r = eigen_residual(&spec, auto_grid(&spec, 8001), c(0.7, 0.3));
    assert!(r < 1e-5, "{r}");
}

#[test]
fn eigenrelation_for_moderate_amplitudes() {
    let zs = [
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(0.0, -1.5),
        c(-1.2, 1.2),
        c(2.0, 0.0),
        c(0.0, 2.0),
    ];
    for (spec, grid) in admissible_cases(8001) {
        // the edges need |mu - sqrt2 Re z| large as well
        let (map, _) = setup(&spec);
        let grid = if spec.kind() == gho_core::MassKind::PowerLaw {
            Grid::new((-10.0f64).exp(), grid.x_hi(), 1_600_001).unwrap()
        } else {
            let lo = map.inverse(-11.0).unwrap();
            let hi = map.inverse(11.0).unwrap();
            Grid::new(lo, hi, 12001).unwrap()
        };
        for z in zs {
            let r = eigen_residual(&spec, grid, z);
            assert!(r < 1e-4, "{} z={z}: {r}", spec.id());
        }
    }
}

#[test]
fn closed_form_expectations() {
    let cs = |re, im| make_coherent(c(re, im), 1e-12).unwrap();
    assert_eq!(expectation_mu(&cs(0.0, 0.0)), (0.0, 0.5));
    assert_eq!(expectation_pi(&cs(0.0, 0.0)), (0.0, 0.5));
    let (m1, m2) = expectation_mu(&cs(1.0, 0.0));
    assert!((m1 - SQRT_2).abs() < 1e-15 && (m2 - 2.5).abs() < 1e-15);
    let (m1, _) = expectation_mu(&cs(0.0, 1.0));
    let (p1, p2) = expectation_pi(&cs(0.0, 1.0));
    assert_eq!(m1, 0.0);
    assert!((p1 - SQRT_2).abs() < 1e-15 && (p2 - 2.5).abs() < 1e-15);
}

#[test]
fn minimum_uncertainty() {
    for z in [c(0.0, 0.0), c(2.0, -1.0), c(-0.3, 4.0)] {
        let cs = make_coherent(z, 1e-12).unwrap();
        let (dm, dp) = uncertainties(&cs);
        assert_eq!((dm, dp), (FRAC_1_SQRT_2, FRAC_1_SQRT_2));
        assert!((dm * dp - 0.5).abs() < 1e-15);
        // and from the second moments
        let (m1, m2) = expectation_mu(&cs);
        let (p1, p2) = expectation_pi(&cs);
        assert!(((m2 - m1 * m1).sqrt() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(((p2 - p1 * p1).sqrt() - FRAC_1_SQRT_2).abs() < 1e-12);
    }
}

#[test]
fn quadrature_uncertainty_constant_mass() {
    let grid = Grid::new(-12.0, 12.0, 8001).unwrap();
    let (map, rc) = setup(&MassSpec::constant());
    let cs = make_coherent(c(0.5, 0.0), 1e-12).unwrap();
    let psi = coherent_wavefunction(&map, rc, &cs, grid).unwrap();
    let q = quadrature_moments(&LadderOps::new(&map, grid).unwrap(), &psi).unwrap();
    assert!((q.delta_mu() - FRAC_1_SQRT_2).abs() < 1e-5);
    assert!((q.delta_mu() * q.delta_pi() - 0.5).abs() < 1e-4);
}

/// Σ conj(c_n) c′_n over 65 terms.
fn overlap_by_sum(z: Complex64, zp: Complex64) -> Complex64 {
    let a = CoherentState::with_truncation(z, 64);
    let b = CoherentState::with_truncation(zp, 64);
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

#[test]
fn overlap_examples() {
    let z = c(0.3, -0.8);
    assert!((coherent_overlap(z, z) - c(1.0, 0.0)).norm() < 1e-15);
    let o = coherent_overlap(c(0.0, 0.0), c(1.0, 0.0));
    assert!((o - c((-0.5f64).exp(), 0.0)).norm() < 1e-15);
    let o = coherent_overlap(c(1.0, 0.0), c(0.0, 1.0));
    assert!((o.norm_sqr() - (-2.0f64).exp()).abs() < 1e-15);
    assert!((overlap_by_sum(c(1.0, 0.0), c(0.0, 1.0)).norm_sqr() - (-2.0f64).exp()).abs() < 1e-14);
}

#[test]
fn overlap_matches_coefficient_sum() {
    for (z, zp) in [
        (c(0.5, 0.5), c(-1.0, 0.2)),
        (c(2.0, 0.0), c(1.5, -1.5)),
        (c(0.0, 0.0), c(3.0, 1.0)),
    ] {
        let d = coherent_overlap(z, zp) - overlap_by_sum(z, zp);
        assert!(d.norm() < 1e-13, "{z} {zp}: {d}");
        let mag = (-(z - zp).norm_sqr()).exp();
        assert!((coherent_overlap(z, zp).norm_sqr() - mag).abs() < 1e-14);
    }
}

#[test]
fn grid_overlap_matches_closed_form() {
    let spec = MassSpec::rational_square(2.0).unwrap();
    let (map, rc) = setup(&spec);
    let lo = map.inverse(-11.0).unwrap();
    let hi = map.inverse(11.0).unwrap();
    let grid = Grid::new(lo, hi, 8001).unwrap();
    let (z, zp) = (c(0.6, -0.4), c(-0.2, 1.1));
    let a = coherent_wavefunction(&map, rc, &make_coherent(z, 1e-12).unwrap(), grid).unwrap();
    let b = coherent_wavefunction(&map, rc, &make_coherent(zp, 1e-12).unwrap(), grid).unwrap();
    assert!((a.inner(&b) - coherent_overlap(z, zp)).norm() < 1e-10);
}

/// (1/π) ∫_{|z|≤6} |c_k(z)|² d²z by the midpoint rule on a polar grid.
fn resolution_weight(k: usize) -> f64 {
    let (nr, nt) = (600, 64);
    let dr = 6.0 / nr as f64;
    let dt = 2.0 * PI / nt as f64;
    let mut sum = 0.0;
    for i in 0..nr {
        let r = (i as f64 + 0.5) * dr;
        for j in 0..nt {
            let z = Complex64::from_polar(r, j as f64 * dt);
            let ck = CoherentState::with_truncation(z, k).coeffs()[k];
            sum += ck.norm_sqr() * r * dr * dt;
        }
    }
    sum / PI
}

#[test]
fn resolution_of_identity() {
    for k in [0, 1] {
        let w = resolution_weight(k);
        assert!((w - 1.0).abs() < 1e-3, "k={k}: {w}");
    }
    // ⟨psi_k|z⟩ on the grid agrees with c_k
    let spec = MassSpec::constant();
    let (map, rc) = setup(&spec);
    let grid = Grid::new(-12.0, 12.0, 4001).unwrap();
    let z = c(1.3, -0.9);
    let psi_z = coherent_wavefunction(&map, rc, &make_coherent(z, 1e-12).unwrap(), grid).unwrap();
    for k in [0, 1] {
        let psi_k = eigenfunction(&map, rc, k, grid).unwrap();
        let ck = make_coherent(z, 1e-12).unwrap().coeffs()[k];
        assert!((psi_k.inner(&psi_z) - ck).norm() < 1e-10);
    }
}

#[test]
fn truncation_stability() {
    let spec = MassSpec::rational_square(2.0).unwrap();
    let (map, rc) = setup(&spec);
    let grid = auto_grid(&spec, 4001);
    let ops = LadderOps::new(&map, grid).unwrap();
    for z in [c(0.7, 0.3), c(-1.5, 1.0), c(2.0, 0.0)] {
        let cs = make_coherent(z, 1e-12).unwrap();
        let doubled = CoherentState::with_truncation(z, 2 * cs.truncation());
        assert!((cs.retained_weight() - doubled.retained_weight()).abs() < 1e-10);
        let a = coherent_wavefunction(&map, rc, &cs, grid).unwrap();
        let b = coherent_wavefunction(&map, rc, &doubled, grid).unwrap();
        let qa = quadrature_moments(&ops, &a).unwrap();
        let qb = quadrature_moments(&ops, &b).unwrap();
        for (x, y) in [
            (qa.mean_mu, qb.mean_mu),
            (qa.mean_mu_sq, qb.mean_mu_sq),
            (qa.mean_pi, qb.mean_pi),
            (qa.mean_pi_sq, qb.mean_pi_sq),
            (qa.delta_mu(), qb.delta_mu()),
            (qa.delta_pi(), qb.delta_pi()),
        ] {
            assert!((x - y).abs() < 1e-10, "z={z}: {x} vs {y}");
        }
    }
}
