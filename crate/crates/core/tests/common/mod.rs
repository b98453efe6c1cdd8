#![allow(dead_code)]

use gho_core::mass_model::{Domain, MassSpec, MuMap, RangeClass};
use gho_core::spectral::{resolve_grid, GridPolicy};
use gho_core::Grid;

/// Full-line catalog masses with a grid wide enough that |mu| >= 6.5 at both edges.
pub fn admissible_cases(points: usize) -> Vec<(MassSpec, Grid)> {
    let mut out = Vec::new();
    for spec in [
        MassSpec::constant(),
        MassSpec::rational_square(2.0).unwrap(),
        MassSpec::rational_square(0.5).unwrap(),
    ] {
        let map = MuMap::new(&spec, None).unwrap();
        let grid = resolve_grid(&map, GridPolicy::Auto { points }).unwrap();
        out.push((spec, grid));
    }
    out.push(power_law_log_case(400_001));
    out
}

/// m = x^{-2}: mu = ln x, so a log-wide domain and a dense uniform grid.
pub fn power_law_log_case(points: usize) -> (MassSpec, Grid) {
    let spec = MassSpec::power_law(-2.0)
        .unwrap()
        .with_domain(Domain {
            lo: 1e-6,
            hi: 1e3,
            lo_open: true,
            hi_open: true,
        })
        .unwrap();
    let grid = Grid::new((-7.0f64).exp(), 6.5f64.exp(), points).unwrap();
    (spec, grid)
}

pub fn setup(spec: &MassSpec) -> (MuMap, RangeClass) {
    let map = MuMap::new(spec, None).unwrap();
    let rc = map.classify();
    (map, rc)
}

pub fn auto_grid(spec: &MassSpec, points: usize) -> Grid {
    let map = MuMap::new(spec, None).unwrap();
    resolve_grid(&map, GridPolicy::Auto { points }).unwrap()
}

/// Normalized Hermite functions by the three-term recurrence.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let next =
            (2.0 / (k + 1) as f64).sqrt() * x * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}
