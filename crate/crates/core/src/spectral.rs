//! Independent check of the closed-form spectrum: discretize the PDM
//! Hamiltonian on a uniform grid, diagonalize, and compare against
//! E_n = n + 1/2, the Gram matrix and the ladder matrix elements.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{GhoError, Result};
use crate::grid::{tridiagonal_apply, Grid, WaveFunction};
use crate::mass_model::{MassKind, MassSpec, MuMap, RangeClass, RangeThresholds};
use crate::oscillator::{
    effective_potential, eigenvalue, flux_kinetic, gho_ordering, GridSamples, LadderOps,
    OrderingParams,
};
use crate::tridiag;

/// |mu| reached at both edges of an auto grid when the range is unbounded.
pub const AUTO_EDGE_MU: f64 = 8.0;
/// Distance in mu kept from a finite endpoint of the range.
pub const FINITE_EDGE_OFFSET: f64 = 1e-3;
/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 2401;
pub const MAX_GRAM_LEVEL: usize = 12;
pub const MAX_LADDER_LEVEL: usize = 8;

/// Symmetric tridiagonal discretization of -1/2 d/dx (1/m) d/dx + V_eff.
#[derive(Debug, Clone)]
pub struct DiscreteHamiltonian {
    pub grid: Grid,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub mass_id: String,
    pub ordering: OrderingParams,
}

impl DiscreteHamiltonian {
    pub fn apply(&self, values: &[Complex64]) -> Vec<Complex64> {
        tridiagonal_apply(&self.diag, &self.offdiag, values)
    }

    pub fn lowest_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        tridiag::lowest_eigenvalues(&self.diag, &self.offdiag, k)
    }

    /// ⟨psi|H|psi⟩ / ⟨psi|psi⟩ with plain vector sums.
    pub fn rayleigh_quotient(&self, wf: &WaveFunction) -> f64 {
        let hv = self.apply(&wf.values);
        let num: Complex64 = wf.values.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = wf.values.iter().map(|v| v.norm_sqr()).sum();
        num.re / den
    }
}

/// Row i: diag = (w_{i-1/2} + w_{i+1/2})/(2h²) + V_eff(x_i),
/// off_i = -w_{i+1/2}/(2h²), w = 1/m at midpoints, Dirichlet ends.
pub fn discretize(
    mumap: &MuMap,
    ordering: &OrderingParams,
    grid: Grid,
) -> Result<DiscreteHamiltonian> {
    let spec = mumap.spec();
    let (mut diag, offdiag) = flux_kinetic(spec, &grid)?;
    for (d, x) in diag.iter_mut().zip(grid.points()) {
        *d += effective_potential(mumap, ordering, x)?;
    }
    Ok(DiscreteHamiltonian {
        grid,
        diag,
        offdiag,
        mass_id: spec.id(),
        ordering: *ordering,
    })
}

pub fn lowest_eigenvalues(h: &DiscreteHamiltonian, k: usize) -> Result<Vec<f64>> {
    h.lowest_eigenvalues(k)
}

/// Relative residual ‖(H - E)psi‖ / ‖psi‖ over the rows that do not touch
/// the Dirichlet boundary.
pub fn residual_norm(h: &DiscreteHamiltonian, wf: &WaveFunction, energy: f64) -> f64 {
    let hv = h.apply(&wf.values);
    let n = wf.values.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..n - 1 {
        num += (hv[i] - energy * wf.values[i]).norm_sqr();
        den += wf.values[i].norm_sqr();
    }
    (num / den).sqrt()
}

pub fn eigen_residual(
    mumap: &MuMap,
    ordering: &OrderingParams,
    rc: RangeClass,
    n: usize,
    grid: Grid,
) -> Result<f64> {
    let h = discretize(mumap, ordering, grid)?;
    let psi = crate::oscillator::eigenfunction(mumap, rc, n, grid)?;
    Ok(residual_norm(&h, &psi, eigenvalue(n)))
}

fn gram_of(states: &[WaveFunction], n_max: usize) -> Vec<Vec<f64>> {
    (0..=n_max)
        .map(|i| {
            (0..=n_max)
                .map(|j| states[i].inner(&states[j]).re)
                .collect()
        })
        .collect()
}

/// G_nm = ∫ psi_n psi_m dx by the trapezoid rule, n, m ≤ n_max.
pub fn gram_matrix(
    mumap: &MuMap,
    rc: RangeClass,
    n_max: usize,
    grid: Grid,
) -> Result<Vec<Vec<f64>>> {
    if n_max > MAX_GRAM_LEVEL {
        return Err(GhoError::DegreeTooLarge {
            n: n_max,
            max: MAX_GRAM_LEVEL,
        });
    }
    let states = GridSamples::new(mumap, grid)?.eigenfunctions(rc, n_max)?;
    Ok(gram_of(&states, n_max))
}

/// ⟨n|A⁺|n′⟩ and ⟨n|A|n′⟩ for n, n′ ≤ n_max.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderMatrices {
    pub raising: Vec<Vec<f64>>,
    pub lowering: Vec<Vec<f64>>,
}

impl LadderMatrices {
    /// Largest deviation from sqrt(n′+1) δ_{n,n′+1} and sqrt(n′) δ_{n,n′-1}.
    pub fn max_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for (n, (up, down)) in self.raising.iter().zip(&self.lowering).enumerate() {
            for np in 0..up.len() {
                let up_exact = if n == np + 1 {
                    ((np + 1) as f64).sqrt()
                } else {
                    0.0
                };
                let down_exact = if n + 1 == np { (np as f64).sqrt() } else { 0.0 };
                dev = dev
                    .max((up[np] - up_exact).abs())
                    .max((down[np] - down_exact).abs());
            }
        }
        dev
    }
}

fn ladder_of(ops: &LadderOps, states: &[WaveFunction], n_max: usize) -> Result<LadderMatrices> {
    let mut raising = vec![vec![0.0; n_max + 1]; n_max + 1];
    let mut lowering = vec![vec![0.0; n_max + 1]; n_max + 1];
    for np in 0..=n_max {
        let up = ops.raise(&states[np])?;
        let down = ops.lower(&states[np])?;
        for n in 0..=n_max {
            raising[n][np] = states[n].inner(&up).re;
            lowering[n][np] = states[n].inner(&down).re;
        }
    }
    Ok(LadderMatrices { raising, lowering })
}

pub fn ladder_matrix_elements(
    mumap: &MuMap,
    rc: RangeClass,
    n_max: usize,
    grid: Grid,
) -> Result<LadderMatrices> {
    if !rc.admits_orthonormal_family() {
        return Err(GhoError::InadmissibleRange(rc));
    }
    if n_max > MAX_LADDER_LEVEL {
        return Err(GhoError::DegreeTooLarge {
            n: n_max,
            max: MAX_LADDER_LEVEL,
        });
    }
    let samples = GridSamples::new(mumap, grid)?;
    let states = samples.eigenfunctions(rc, n_max)?;
    ladder_of(&LadderOps::from_samples(&samples), &states, n_max)
}

/// How verify() chooses its grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPolicy {
    /// Auto interval with a fixed number of points.
    Auto {
        points: usize,
    },
    /// Auto interval with a target spacing.
    AutoSpacing {
        h: f64,
    },
    Fixed(Grid),
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy::Auto {
            points: DEFAULT_GRID_POINTS,
        }
    }
}

/// Working interval whose edges sit at |mu| = 8 on unbounded sides of the
/// mu-range, and within 1e-3 of the endpoint on finite sides, clamped to the
/// mass domain.
pub fn auto_interval(mumap: &MuMap) -> Result<(f64, f64)> {
    let t = RangeThresholds::default();
    let lo_target = if mumap.mu_min() <= -t.infinite {
        -AUTO_EDGE_MU
    } else {
        mumap.mu_min() + FINITE_EDGE_OFFSET
    };
    let hi_target = if mumap.mu_max() >= t.infinite {
        AUTO_EDGE_MU
    } else {
        mumap.mu_max() - FINITE_EDGE_OFFSET
    };
    let lo = mumap.inverse(lo_target)?;
    let hi = mumap.inverse(hi_target)?;
    if lo >= hi {
        return Err(GhoError::InvalidGrid(format!(
            "auto interval collapsed to [{lo}, {hi}]"
        )));
    }
    Ok((lo, hi))
}

pub fn resolve_grid(mumap: &MuMap, policy: GridPolicy) -> Result<Grid> {
    match policy {
        GridPolicy::Fixed(g) => Ok(g),
        GridPolicy::Auto { points } => {
            let (lo, hi) = auto_interval(mumap)?;
            Grid::new(lo, hi, points)
        }
        GridPolicy::AutoSpacing { h } => {
            if !(h > 0.0) {
                return Err(GhoError::InvalidGrid(format!("spacing {h}")));
            }
            let (lo, hi) = auto_interval(mumap)?;
            Grid::new(lo, hi, ((hi - lo) / h).ceil() as usize + 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub eigenvalue: f64,
    pub residual: f64,
    pub gram: f64,
    pub ladder: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eigenvalue: 1e-3,
            residual: 1e-3,
            gram: 1e-6,
            ladder: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub grid: GridPolicy,
    pub levels: usize,
    pub gram_levels: usize,
    pub ladder_levels: usize,
    pub tolerances: Tolerances,
    /// Integration origin for custom profiles.
    pub origin: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            grid: GridPolicy::default(),
            levels: 6,
            gram_levels: 7,
            ladder_levels: 6,
            tolerances: Tolerances::default(),
            origin: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Excluded(RangeClass),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("PASS"),
            Verdict::Fail => f.write_str("FAIL"),
            Verdict::Excluded(rc) => write!(f, "excluded ({rc} μ-range)"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn extended_real<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSummary {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n: usize,
    pub h: f64,
}

impl From<Grid> for GridSummary {
    fn from(g: Grid) -> Self {
        GridSummary {
            x_lo: g.x_lo(),
            x_hi: g.x_hi(),
            n: g.len(),
            h: g.spacing(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenRow {
    pub n: usize,
    pub computed: f64,
    pub exact: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub mass_id: String,
    pub kind: MassKind,
    pub params: BTreeMap<String, f64>,
    pub range_class: RangeClass,
    #[serde(serialize_with = "extended_real")]
    pub mu_min: f64,
    #[serde(serialize_with = "extended_real")]
    pub mu_max: f64,
    pub admissible: bool,
    pub grid: GridSummary,
    pub eigenvalues: Vec<EigenRow>,
    pub max_eigenvalue_error: f64,
    /// Max |lambda_k - (2k + 3/2)|, recorded for half-line ranges.
    pub odd_ladder_max_error: Option<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub gram_max_offdiag: f64,
    pub gram_max_diag_deviation: f64,
    pub ladder_max_deviation: Option<f64>,
    /// Max difference between quadrature ⟨n|A|n′⟩ and sqrt(n′) G_{n,n′-1}.
    pub ladder_gram_duality: Option<f64>,
    /// Interior max |A psi_0| / max |psi_0|.
    pub ground_annihilation: f64,
    pub tolerances: Tolerances,
    pub warnings: Vec<String>,
    pub verdict: Verdict,
}

impl SpectralReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// Runs every spectral check for one mass spec.
pub fn verify(spec: &MassSpec, config: &VerifyConfig) -> Result<SpectralReport> {
    let mumap = MuMap::new(spec, config.origin)?;
    let rc = mumap.classify();
    let grid = resolve_grid(&mumap, config.grid)?;
    let ordering = gho_ordering();
    let h = discretize(&mumap, &ordering, grid)?;
    let computed = h.lowest_eigenvalues(config.levels)?;
    let eigenvalues: Vec<EigenRow> = computed
        .iter()
        .enumerate()
        .map(|(n, &c)| EigenRow {
            n,
            computed: c,
            exact: eigenvalue(n),
            abs_error: (c - eigenvalue(n)).abs(),
        })
        .collect();
    let max_eigenvalue_error = eigenvalues.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let odd_ladder_max_error = (rc == RangeClass::HalfLine).then(|| {
        computed
            .iter()
            .enumerate()
            .map(|(k, c)| (c - (2.0 * k as f64 + 1.5)).abs())
            .fold(0.0, f64::max)
    });

    let top = config
        .levels
        .saturating_sub(1)
        .max(config.gram_levels)
        .max(config.ladder_levels + 1);
    let samples = GridSamples::new(&mumap, grid)?;
    let states = samples.eigenfunctions(rc, top)?;
    let residuals: Vec<f64> = (0..config.levels)
        .map(|n| residual_norm(&h, &states[n], eigenvalue(n)))
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);

    let gram = gram_of(&states, top);
    let mut gram_max_offdiag: f64 = 0.0;
    let mut gram_max_diag_deviation: f64 = 0.0;
    for i in 0..=config.gram_levels {
        for j in 0..=config.gram_levels {
            if i == j {
                gram_max_diag_deviation = gram_max_diag_deviation.max((gram[i][i] - 1.0).abs());
            } else {
                gram_max_offdiag = gram_max_offdiag.max(gram[i][j].abs());
            }
        }
    }

    let ops = LadderOps::from_samples(&samples);
    let a_psi0 = ops.lower(&states[0])?;
    let ground_annihilation = a_psi0.interior_max_abs(2) / states[0].max_abs();

    let (ladder_max_deviation, ladder_gram_duality) = if rc.admits_orthonormal_family() {
        let lad = ladder_of(&ops, &states, config.ladder_levels)?;
        let mut duality: f64 = 0.0;
        for n in 0..=config.ladder_levels {
            for np in 0..=config.ladder_levels {
                let via_gram = if np == 0 {
                    0.0
                } else {
                    (np as f64).sqrt() * gram[n][np - 1]
                };
                duality = duality.max((lad.lowering[n][np] - via_gram).abs());
                let via_gram_up = ((np + 1) as f64).sqrt() * gram[n][np + 1];
                duality = duality.max((lad.raising[n][np] - via_gram_up).abs());
            }
        }
        (Some(lad.max_deviation()), Some(duality))
    } else {
        (None, None)
    };

    let tol = config.tolerances;
    let verdict = if !rc.admits_orthonormal_family() {
        Verdict::Excluded(rc)
    } else if max_eigenvalue_error < tol.eigenvalue
        && max_residual < tol.residual
        && gram_max_offdiag < tol.gram
        && gram_max_diag_deviation < tol.gram
        && ladder_max_deviation.is_none_or(|d| d < tol.ladder)
    {
        Verdict::Pass
    } else {
        Verdict::Fail
    };

    Ok(SpectralReport {
        mass_id: spec.id(),
        kind: spec.kind(),
        params: spec.params().clone(),
        range_class: rc,
        mu_min: mumap.mu_min(),
        mu_max: mumap.mu_max(),
        admissible: rc.admits_orthonormal_family(),
        grid: grid.into(),
        eigenvalues,
        max_eigenvalue_error,
        odd_ladder_max_error,
        residuals,
        max_residual,
        gram_max_offdiag,
        gram_max_diag_deviation,
        ladder_max_deviation,
        ladder_gram_duality,
        ground_annihilation,
        tolerances: tol,
        warnings: spec.warnings().to_vec(),
        verdict,
    })
}
