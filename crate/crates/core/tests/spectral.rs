mod common;

use std::f64::consts::SQRT_2;

use gho_core::mass_model::{Domain, MassSpec, MuMap, RangeClass};
use gho_core::oscillator::{effective_potential, eigenfunction, eigenvalue};
use gho_core::spectral::{
    discretize, eigen_residual, gram_matrix, ladder_matrix_elements, lowest_eigenvalues,
    resolve_grid, GridPolicy, Tolerances,
};
use gho_core::{gho_ordering, verify, GhoError, Grid, Verdict, VerifyConfig};

use common::{admissible_cases, auto_grid, setup};

fn max_offdiag_and_diag(g: &[Vec<f64>]) -> (f64, f64) {
    let mut off: f64 = 0.0;
    let mut diag: f64 = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i == j {
                diag = diag.max((v - 1.0).abs());
            } else {
                off = off.max(v.abs());
            }
        }
    }
    (off, diag)
}

#[test]
fn constant_mass_matrix_is_three_point_laplacian() {
    let (map, _) = setup(&MassSpec::constant());
    let grid = Grid::new(-3.0, 3.0, 61).unwrap();
    let h = discretize(&map, &gho_ordering(), grid).unwrap();
    let h2 = grid.spacing() * grid.spacing();
    assert_eq!(h.offdiag.len(), grid.len() - 1);
    for (i, x) in grid.points().enumerate() {
        assert!((h.diag[i] - (1.0 / h2 + 0.5 * x * x)).abs() < 1e-9);
    }
    for o in &h.offdiag {
        assert!((o + 0.5 / h2).abs() < 1e-9);
    }
}

#[test]
fn row_sums_give_effective_potential() {
    for spec in [
        MassSpec::rational_square(2.0).unwrap(),
        MassSpec::tanh_shift(1.0).unwrap(),
        MassSpec::exponential(-0.5).unwrap(),
    ] {
        let (map, _) = setup(&spec);
        let grid = Grid::new(-2.0, 2.0, 9).unwrap();
        let h = discretize(&map, &gho_ordering(), grid).unwrap();
        for i in 1..grid.len() - 1 {
            let row = h.diag[i] + h.offdiag[i - 1] + h.offdiag[i];
            let v = effective_potential(&map, &gho_ordering(), grid.x(i)).unwrap();
            assert!(
                (row - v).abs() < 1e-12 * (1.0 + h.diag[i].abs()),
                "{} row {i}",
                spec.id()
            );
        }
    }
}

#[test]
fn constant_mass_eigenvalues_follow_second_order_error() {
    let (map, _) = setup(&MassSpec::constant());
    let grid = Grid::new(-12.0, 12.0, 2400).unwrap();
    let h = discretize(&map, &gho_ordering(), grid).unwrap();
    let ev = lowest_eigenvalues(&h, 6).unwrap();
    let step = grid.spacing();
    for (n, v) in ev.iter().enumerate() {
        let nf = n as f64;
        // first-order shift from the h²/12 d⁴ term of the three-point Laplacian
        let predicted = nf + 0.5 - step * step / 32.0 * (2.0 * nf * nf + 2.0 * nf + 1.0);
        assert!((v - predicted).abs() < 1e-7, "n={n}: {v} vs {predicted}");
        assert!((v - eigenvalue(n)).abs() < 2e-4, "n={n}: {v}");
    }
}

#[test]
fn rational_square_isospectral() {
    let spec = MassSpec::rational_square(2.0).unwrap();
    let (map, _) = setup(&spec);
    let h = discretize(&map, &gho_ordering(), auto_grid(&spec, 2401)).unwrap();
    for (n, v) in lowest_eigenvalues(&h, 6).unwrap().iter().enumerate() {
        assert!((v - eigenvalue(n)).abs() < 1e-3, "n={n}: {v}");
    }
}

#[test]
fn exponential_half_line_spectrum() {
    // open sides keep the conceptual range (0, ∞) for classification
    let spec = MassSpec::exponential(1.0)
        .unwrap()
        .with_domain(Domain {
            lo: -30.0,
            hi: 6.0,
            lo_open: true,
            hi_open: true,
        })
        .unwrap();
    let (map, rc) = setup(&spec);
    assert_eq!(rc, RangeClass::HalfLine);
    let h = discretize(&map, &gho_ordering(), Grid::new(-30.0, 6.0, 20001).unwrap()).unwrap();
    let ev = lowest_eigenvalues(&h, 6).unwrap();
    // the Dirichlet problem on the half line keeps only odd oscillator levels
    for (k, v) in ev.iter().enumerate() {
        assert!((v - (2.0 * k as f64 + 1.5)).abs() < 1e-4, "k={k}: {v}");
    }
    assert!((ev[0] - eigenvalue(0)).abs() > 0.9);

    let report = verify(&spec, &VerifyConfig::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Excluded(RangeClass::HalfLine));
    assert!(report.odd_ladder_max_error.unwrap() < 1e-2);
    assert!(!report.warnings.is_empty());
}

#[test]
fn residual_examples() {
    let (map, rc) = setup(&MassSpec::constant());
    let fine = Grid::new(-10.0, 10.0, 20001).unwrap();
    let r = eigen_residual(&map, &gho_ordering(), rc, 0, fine).unwrap();
    assert!(r < 1e-6, "{r}");

    let spec = MassSpec::tanh_shift(1.0).unwrap();
    let (map, rc) = setup(&spec);
    let grid = auto_grid(&spec, 2401);
    let coarse = eigen_residual(&map, &gho_ordering(), rc, 3, grid).unwrap();
    let finer = eigen_residual(&map, &gho_ordering(), rc, 3, grid.refined()).unwrap();
    assert!(coarse < 1e-4, "{coarse}");
    let ratio = coarse / finer;
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");

    let spec = MassSpec::sech_square(1.0).unwrap();
    let (map, rc) = setup(&spec);
    let grid = auto_grid(&spec, 2401);
    let r = eigen_residual(&map, &gho_ordering(), rc, 1, grid).unwrap();
    assert!(r.is_finite());
    assert!(eigenfunction(&map, rc, 1, grid).unwrap().formal);
}

#[test]
fn gram_examples() {
    let (map, rc) = setup(&MassSpec::constant());
    let g = gram_matrix(&map, rc, 7, Grid::new(-12.0, 12.0, 4001).unwrap()).unwrap();
    let (off, diag) = max_offdiag_and_diag(&g);
    assert!(off < 1e-8 && diag < 1e-8, "{off} {diag}");

    let spec = MassSpec::rational_square(2.0).unwrap();
    let (map, rc) = setup(&spec);
    let g = gram_matrix(&map, rc, 7, auto_grid(&spec, 2401)).unwrap();
    let (off, diag) = max_offdiag_and_diag(&g);
    assert!(off < 1e-6 && diag < 1e-6, "{off} {diag}");

    let spec = MassSpec::exponential(1.0).unwrap();
    let (map, rc) = setup(&spec);
    let g = gram_matrix(&map, rc, 3, auto_grid(&spec, 2401)).unwrap();
    assert!(g[0][1].abs() > 0.1, "{}", g[0][1]);
    // ∫_0^∞ 2 sqrt2 mu e^{-mu²}/sqrt(pi) dmu
    assert!((g[0][1] - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-3);

    assert!(matches!(
        gram_matrix(&map, rc, 13, auto_grid(&spec, 101)),
        Err(GhoError::DegreeTooLarge { .. })
    ));
}

#[test]
fn ladder_examples() {
    let (map, rc) = setup(&MassSpec::constant());
    let lad = ladder_matrix_elements(&map, rc, 6, Grid::new(-12.0, 12.0, 4001).unwrap()).unwrap();
    assert!((lad.raising[2][1] - SQRT_2).abs() < 1e-6);

    for (spec, grid) in admissible_cases(2401) {
        let (map, rc) = setup(&spec);
        let lad = ladder_matrix_elements(&map, rc, 6, grid).unwrap();
        assert!((lad.lowering[0][1] - 1.0).abs() < 1e-5, "{}", spec.id());
        assert!(
            lad.max_deviation() < 1e-5,
            "{}: {}",
            spec.id(),
            lad.max_deviation()
        );
    }

    let spec = MassSpec::tanh_shift(1.0).unwrap();
    let (map, rc) = setup(&spec);
    assert!(matches!(
        ladder_matrix_elements(&map, rc, 3, auto_grid(&spec, 101)),
        Err(GhoError::InadmissibleRange(RangeClass::HalfLine))
    ));
}

#[test]
fn verify_examples() {
    let rs = verify(
        &MassSpec::rational_square(2.0).unwrap(),
        &VerifyConfig::default(),
    )
    .unwrap();
    assert_eq!(rs.verdict, Verdict::Pass);
    assert!(rs.eigenvalues.iter().all(|e| e.abs_error < 1e-3));

    let sech = verify(
        &MassSpec::sech_square(1.0).unwrap(),
        &VerifyConfig::default(),
    )
    .unwrap();
    assert_eq!(sech.verdict.to_string(), "excluded (Bounded μ-range)");
    assert!(sech.passed());

    let c = verify(&MassSpec::constant(), &VerifyConfig::default()).unwrap();
    assert_eq!(c.verdict, Verdict::Pass);
    // a=0.5 gets a finer mu-spacing from the auto grid, so only a=2 is compared
    assert!(c.max_eigenvalue_error < rs.max_eigenvalue_error);
    assert!(c.max_residual < rs.max_residual);
    assert!(c.ladder_max_deviation.unwrap() < rs.ladder_max_deviation.unwrap());
    assert!(c.ground_annihilation < rs.ground_annihilation);
}

#[test]
fn verify_fails_under_tight_tolerance() {
    let config = VerifyConfig {
        tolerances: Tolerances {
            eigenvalue: 1e-9,
            ..Tolerances::default()
        },
        ..VerifyConfig::default()
    };
    let r = verify(&MassSpec::constant(), &config).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(!r.passed());
}

#[test]
fn report_serializes() {
    let r = verify(
        &MassSpec::sech_square(1.0).unwrap(),
        &VerifyConfig::default(),
    )
    .unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["verdict"], "excluded (Bounded μ-range)");
    assert_eq!(v["mass_id"], "sech-square(a=1)");
    assert_eq!(v["range_class"], "Bounded");
    assert!(v["eigenvalues"].as_array().unwrap().len() == 6);

    let r = verify(&MassSpec::constant(), &VerifyConfig::default()).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["mu_max"], "inf");
    assert_eq!(v["mu_min"], "-inf");
    assert_eq!(v["verdict"], "PASS");
}

#[test]
fn convergence_order() {
    for spec in [
        MassSpec::constant(),
        MassSpec::rational_square(2.0).unwrap(),
        MassSpec::rational_square(0.5).unwrap(),
    ] {
        let (map, _) = setup(&spec);
        let grid = auto_grid(&spec, 1201);
        let coarse =
            lowest_eigenvalues(&discretize(&map, &gho_ordering(), grid).unwrap(), 4).unwrap();
        let fine = lowest_eigenvalues(
            &discretize(&map, &gho_ordering(), grid.refined()).unwrap(),
            4,
        )
        .unwrap();
        for n in 0..4 {
            let ratio = (coarse[n] - eigenvalue(n)).abs() / (fine[n] - eigenvalue(n)).abs();
            assert!(ratio >= 3.5, "{} n={n}: ratio {ratio}", spec.id());
        }
    }
}

#[test]
fn rayleigh_quotient_bounds_ground_state() {
    for (spec, grid) in admissible_cases(2401) {
        let (map, rc) = setup(&spec);
        let h = discretize(&map, &gho_ordering(), grid).unwrap();
        let lambda0 = lowest_eigenvalues(&h, 1).unwrap()[0];
        let psi0 = eigenfunction(&map, rc, 0, grid).unwrap();
        let rq = h.rayleigh_quotient(&psi0);
        assert!(rq >= lambda0 - 1e-10, "{}: {rq} < {lambda0}", spec.id());
    }
}

#[test]
fn gram_ladder_duality() {
    for spec in [
        MassSpec::constant(),
        MassSpec::rational_square(2.0).unwrap(),
        MassSpec::rational_square(0.5).unwrap(),
    ] {
        let r = verify(&spec, &VerifyConfig::default()).unwrap();
        let d = r.ladder_gram_duality.unwrap();
        assert!(d < 1e-5, "{}: {d}", spec.id());
    }
}

#[test]
fn auto_grid_reaches_mu_8() {
    for spec in [
        MassSpec::constant(),
        MassSpec::rational_square(0.5).unwrap(),
    ] {
        let map = MuMap::new(&spec, None).unwrap();
        let grid = resolve_grid(&map, GridPolicy::Auto { points: 101 }).unwrap();
        assert!((map.mu(grid.x_lo()).unwrap() + 8.0).abs() < 1e-9);
        assert!((map.mu(grid.x_hi()).unwrap() - 8.0).abs() < 1e-9);
    }
    let map = MuMap::new(&MassSpec::constant(), None).unwrap();
    let grid = resolve_grid(&map, GridPolicy::AutoSpacing { h: 0.01 }).unwrap();
    assert!(grid.spacing() <= 0.01);
}

#[test]
fn eigenvalue_request_larger_than_grid() {
    let (map, _) = setup(&MassSpec::constant());
    let h = discretize(&map, &gho_ordering(), Grid::new(-1.0, 1.0, 9).unwrap()).unwrap();
    assert!(matches!(
        lowest_eigenvalues(&h, 10),
        Err(GhoError::TooManyEigenvalues { .. })
    ));
}
