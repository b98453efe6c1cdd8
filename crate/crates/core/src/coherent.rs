//! Coherent states |z⟩ = exp(-|z|²/2) Σ zⁿ/√(n!) |n⟩ of the lowering operator.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GhoError, Result};
use crate::grid::{Grid, WaveFunction};
use crate::mass_model::{MuMap, RangeClass};
use crate::oscillator::{GridSamples, LadderOps, MAX_HERMITE_DEGREE};

/// Default Poisson tail bound for truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    z: Complex64,
    coeffs: Vec<Complex64>,
}

/// Closed-form coefficient c_n.
fn coefficient(z: Complex64, n: usize) -> Complex64 {
    let mut c = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for k in 1..=n {
        c *= z / (k as f64).sqrt();
    }
    c
}

/// Σ_{n>N} |c_n|², summed directly so no cancellation against 1.
fn poisson_tail(lambda: f64, n_trunc: usize) -> f64 {
    let mut term = (-lambda).exp();
    for k in 1..=n_trunc {
        term *= lambda / k as f64;
    }
    let mut tail = 0.0;
    let mut k = n_trunc + 1;
    loop {
        term *= lambda / k as f64;
        tail += term;
        if term == 0.0 || term < 1e-30 * tail || k > n_trunc + 1000 {
            break;
        }
        k += 1;
    }
    tail
}

impl CoherentState {
    /// Truncates at the smallest N whose Poisson tail is below `tail_tol`.
    pub fn new(z: Complex64, tail_tol: f64) -> Result<Self> {
        if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
            return Err(GhoError::InvalidTolerance(tail_tol));
        }
        let lambda = z.norm_sqr();
        let n_trunc = (0..=MAX_HERMITE_DEGREE)
            .find(|&n| poisson_tail(lambda, n) < tail_tol)
            .ok_or(GhoError::AmplitudeTooLarge {
                modulus: z.norm(),
                max: MAX_HERMITE_DEGREE,
            })?;
        Ok(CoherentState::with_truncation(z, n_trunc))
    }

    /// Explicit truncation order, no tail check.
    pub fn with_truncation(z: Complex64, n_trunc: usize) -> Self {
        let coeffs = (0..=n_trunc).map(|n| coefficient(z, n)).collect();
        CoherentState { z, coeffs }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Σ |c_n|² over the kept terms.
    pub fn retained_weight(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub fn make_coherent(z: Complex64, tail_tol: f64) -> Result<CoherentState> {
    CoherentState::new(z, tail_tol)
}

/// Σ c_n psi_n(x) on `grid`; needs a full-line mu-range.
pub fn coherent_wavefunction(
    mumap: &MuMap,
    rc: RangeClass,
    cs: &CoherentState,
    grid: Grid,
) -> Result<WaveFunction> {
    if !rc.admits_orthonormal_family() {
        return Err(GhoError::InadmissibleRange(rc));
    }
    let samples = GridSamples::new(mumap, grid)?;
    let states = samples.eigenfunctions(rc, cs.truncation())?;
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (c, psi) in cs.coeffs.iter().zip(&states) {
        for (v, p) in values.iter_mut().zip(&psi.values) {
            *v += c * p;
        }
    }
    WaveFunction::new(grid, values)
}

/// (⟨mu⟩, ⟨mu²⟩) = ((z+z*)/√2, [(z+z*)² + 1]/2).
pub fn expectation_mu(cs: &CoherentState) -> (f64, f64) {
    let s = 2.0 * cs.z.re;
    (FRAC_1_SQRT_2 * s, 0.5 * (s * s + 1.0))
}

/// (⟨pi⟩, ⟨pi²⟩) = (-i(z-z*)/√2, -[(z-z*)² - 1]/2), both real.
pub fn expectation_pi(cs: &CoherentState) -> (f64, f64) {
    // z - z* = 2i Im z
    let d = 2.0 * cs.z.im;
    (FRAC_1_SQRT_2 * d, 0.5 * (d * d + 1.0))
}

/// (Δmu, Δpi). The z-dependent parts of the second moments cancel against
/// the squared means, leaving variance 1/2 for both.
pub fn uncertainties(_cs: &CoherentState) -> (f64, f64) {
    (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
}

/// ⟨z|z′⟩ = exp(-|z|²/2 - |z′|²/2 + z̄ z′).
pub fn coherent_overlap(z: Complex64, z_prime: Complex64) -> Complex64 {
    (-0.5 * z.norm_sqr() - 0.5 * z_prime.norm_sqr() + z.conj() * z_prime).exp()
}

/// Moments of mu and the deformed momentum from grid quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureMoments {
    pub mean_mu: f64,
    pub mean_mu_sq: f64,
    pub mean_pi: f64,
    pub mean_pi_sq: f64,
}

impl QuadratureMoments {
    pub fn delta_mu(&self) -> f64 {
        (self.mean_mu_sq - self.mean_mu * self.mean_mu)
            .max(0.0)
            .sqrt()
    }

    pub fn delta_pi(&self) -> f64 {
        (self.mean_pi_sq - self.mean_pi * self.mean_pi)
            .max(0.0)
            .sqrt()
    }
}

/// ⟨mu⟩, ⟨mu²⟩, ⟨pi⟩, ⟨pi²⟩ of a sampled state by the trapezoid rule,
/// normalized by ⟨psi|psi⟩.
pub fn quadrature_moments(ops: &LadderOps, wf: &WaveFunction) -> Result<QuadratureMoments> {
    let norm = wf.norm_sqr();
    let grid = wf.grid;
    let weighted = |p: i32| -> f64 {
        let v: Vec<f64> = wf
            .values
            .iter()
            .zip(ops.mu())
            .map(|(psi, mu)| mu.powi(p) * psi.norm_sqr())
            .collect();
        grid.integrate(&v) / norm
    };
    let pi_psi = ops.deformed_momentum(wf)?;
    Ok(QuadratureMoments {
        mean_mu: weighted(1),
        mean_mu_sq: weighted(2),
        mean_pi: wf.inner(&pi_psi).re / norm,
        mean_pi_sq: pi_psi.norm_sqr() / norm,
    })
}
