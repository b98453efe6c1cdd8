//! Ladder-operator algebra of the generalized harmonic oscillator.
//!
//! With mu(x) = ∫ sqrt(m) dx the lowering and raising operators are
//!
//! ```text
//! A  = (1/√2) [ m^{-1/4} d/dx m^{-1/4} + mu(x)]
//! A⁺ = (1/√2) [-m^{-1/4} d/dx m^{-1/4} + mu(x)]
//! ```
//!
//! and H = A⁺A + 1/2 is the von Roos Hamiltonian with beta = -1/2,
//! alpha = gamma = -1/4 and potential V = mu²/2.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GhoError, Result};
use crate::grid::{derivative5, tridiagonal_apply, Grid, WaveFunction};
use crate::mass_model::{MassSpec, MuMap, RangeClass};

/// Highest Hermite degree evaluated by the plain recurrence.
pub const MAX_HERMITE_DEGREE: usize = 64;

const ORDERING_TOL: f64 = 1e-12;

/// von Roos exponents (alpha, beta, gamma).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl OrderingParams {
    /// Validates alpha + beta + gamma = -1 and alpha = gamma.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if (alpha + beta + gamma + 1.0).abs() > ORDERING_TOL {
            return Err(GhoError::InvalidOrdering("alpha + beta + gamma = -1"));
        }
        if (alpha - gamma).abs() > ORDERING_TOL {
            return Err(GhoError::InvalidOrdering("alpha = gamma"));
        }
        Ok(OrderingParams { alpha, beta, gamma })
    }

    /// The alpha = gamma ordering with the given beta.
    pub fn symmetric(beta: f64) -> Self {
        let alpha = -0.5 * (1.0 + beta);
        OrderingParams {
            alpha,
            beta,
            gamma: alpha,
        }
    }

    /// Coefficients (c2, c1) of m″/m² and m′²/m³ in the effective potential.
    pub fn potential_coefficients(&self) -> (f64, f64) {
        let OrderingParams { alpha, beta, .. } = *self;
        (
            0.25 * (beta + 1.0),
            -0.5 * (alpha * (alpha + beta + 1.0) + beta + 1.0),
        )
    }
}

/// (alpha, beta, gamma) = (-1/4, -1/2, -1/4).
pub fn gho_ordering() -> OrderingParams {
    OrderingParams::symmetric(-0.5)
}

/// V(x) = mu(x)²/2.
pub fn base_potential(mumap: &MuMap, x: f64) -> Result<f64> {
    let mu = mumap.mu(x)?;
    Ok(0.5 * mu * mu)
}

/// V(x) plus the ordering-dependent kinetic corrections
/// (beta+1)/4 · m″/m² - [alpha(alpha+beta+1) + beta + 1]/2 · m′²/m³.
pub fn effective_potential(mumap: &MuMap, ordering: &OrderingParams, x: f64) -> Result<f64> {
    let d = mumap.spec().derivatives(x)?;
    let (c2, c1) = ordering.potential_coefficients();
    let v = base_potential(mumap, x)?;
    let m = d.m;
    let out = v + c2 * d.d2m / (m * m) + c1 * d.dm * d.dm / (m * m * m);
    if !out.is_finite() {
        return Err(GhoError::DerivativeFailure { x });
    }
    Ok(out)
}

/// E_n = n + 1/2.
pub fn eigenvalue(n: usize) -> f64 {
    n as f64 + 0.5
}

/// Physicists' Hermite polynomial H_n(t).
pub fn hermite(n: usize, t: f64) -> Result<f64> {
    if n > MAX_HERMITE_DEGREE {
        return Err(GhoError::DegreeTooLarge {
            n,
            max: MAX_HERMITE_DEGREE,
        });
    }
    Ok(hermite_unchecked(n, t))
}

fn hermite_unchecked(n: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * t);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = 2.0 * t * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Closed-form normalization 1/sqrt(2^n n! sqrt(pi)) on the full line,
/// 1/sqrt(2^(n-1) n! sqrt(pi)) on the half line.
pub fn normalization_constant(n: usize, rc: RangeClass) -> Result<f64> {
    if n > MAX_HERMITE_DEGREE {
        return Err(GhoError::DegreeTooLarge {
            n,
            max: MAX_HERMITE_DEGREE,
        });
    }
    let power = match rc {
        RangeClass::FullLine => n as i32,
        RangeClass::HalfLine => n as i32 - 1,
        RangeClass::Bounded => return Err(GhoError::BoundedRangeUnsupported),
    };
    Ok(1.0 / (2f64.powi(power) * factorial(n) * PI.sqrt()).sqrt())
}

/// m and mu sampled once on a grid.
#[derive(Debug, Clone)]
pub struct GridSamples {
    pub grid: Grid,
    pub m: Vec<f64>,
    pub mu: Vec<f64>,
}

impl GridSamples {
    pub fn new(mumap: &MuMap, grid: Grid) -> Result<Self> {
        grid.within(&mumap.spec().domain())?;
        let m = grid
            .points()
            .map(|x| mumap.spec().mass(x))
            .collect::<Result<Vec<_>>>()?;
        let mu = grid
            .points()
            .map(|x| mumap.mu(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridSamples { grid, m, mu })
    }

    /// psi_0 .. psi_{n_max} on this grid.
    ///
    /// Full- and half-line ranges use the closed-form normalization; bounded
    /// ranges are normalized numerically. Everything off the full line is
    /// flagged formal.
    pub fn eigenfunctions(&self, rc: RangeClass, n_max: usize) -> Result<Vec<WaveFunction>> {
        if n_max > MAX_HERMITE_DEGREE {
            return Err(GhoError::DegreeTooLarge {
                n: n_max,
                max: MAX_HERMITE_DEGREE,
            });
        }
        let npts = self.grid.len();
        let envelope: Vec<f64> = self
            .m
            .iter()
            .zip(&self.mu)
            .map(|(m, mu)| m.powf(0.25) * (-0.5 * mu * mu).exp())
            .collect();
        // Hermite recurrence carried across all points at once.
        let mut h_prev = vec![0.0; npts];
        let mut h_cur = vec![1.0; npts];
        let mut states = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            if n == 1 {
                h_prev = std::mem::replace(&mut h_cur, self.mu.iter().map(|t| 2.0 * t).collect());
            } else if n > 1 {
                let k = (n - 1) as f64;
                let next: Vec<f64> = (0..npts)
                    .map(|i| 2.0 * self.mu[i] * h_cur[i] - 2.0 * k * h_prev[i])
                    .collect();
                h_prev = std::mem::replace(&mut h_cur, next);
            }
            let raw: Vec<f64> = envelope.iter().zip(&h_cur).map(|(e, h)| e * h).collect();
            let norm = match rc {
                RangeClass::Bounded => {
                    let sq: Vec<f64> = raw.iter().map(|v| v * v).collect();
                    1.0 / self.grid.integrate(&sq).sqrt()
                }
                _ => normalization_constant(n, rc)?,
            };
            let values: Vec<f64> = raw.iter().map(|v| norm * v).collect();
            let mut wf = WaveFunction::from_real(self.grid, &values)?;
            wf.label = Some(n);
            wf.formal = !rc.admits_orthonormal_family();
            states.push(wf);
        }
        Ok(states)
    }
}

/// psi_n(x) = N_n m^{1/4} exp(-mu²/2) H_n(mu) sampled on `grid`.
pub fn eigenfunction(mumap: &MuMap, rc: RangeClass, n: usize, grid: Grid) -> Result<WaveFunction> {
    if n > MAX_HERMITE_DEGREE {
        return Err(GhoError::DegreeTooLarge {
            n,
            max: MAX_HERMITE_DEGREE,
        });
    }
    let samples = GridSamples::new(mumap, grid)?;
    Ok(samples
        .eigenfunctions(rc, n)?
        .pop()
        .expect("n_max + 1 states"))
}

/// Ladder operators applied with five-point stencils on a fixed grid.
#[derive(Debug, Clone)]
pub struct LadderOps {
    grid: Grid,
    m_quarter_inv: Vec<f64>,
    mu: Vec<f64>,
}

impl LadderOps {
    pub fn new(mumap: &MuMap, grid: Grid) -> Result<Self> {
        Ok(LadderOps::from_samples(&GridSamples::new(mumap, grid)?))
    }

    pub fn from_samples(s: &GridSamples) -> Self {
        LadderOps {
            grid: s.grid,
            m_quarter_inv: s.m.iter().map(|m| m.powf(-0.25)).collect(),
            mu: s.mu.clone(),
        }
    }

    fn check(&self, wf: &WaveFunction) -> Result<()> {
        if wf.grid != self.grid {
            return Err(GhoError::InvalidGrid(
                "wavefunction grid differs from operator grid".into(),
            ));
        }
        Ok(())
    }

    /// m^{-1/4} d/dx (m^{-1/4} psi).
    pub fn symmetric_derivative(&self, wf: &WaveFunction) -> Result<Vec<Complex64>> {
        self.check(wf)?;
        let inner: Vec<Complex64> = wf
            .values
            .iter()
            .zip(&self.m_quarter_inv)
            .map(|(v, w)| v * w)
            .collect();
        let mut d = derivative5(&inner, self.grid.spacing())?;
        d.iter_mut()
            .zip(&self.m_quarter_inv)
            .for_each(|(v, w)| *v *= w);
        Ok(d)
    }

    fn combine(&self, wf: &WaveFunction, sign: f64) -> Result<WaveFunction> {
        let t = self.symmetric_derivative(wf)?;
        let values = t
            .iter()
            .zip(&wf.values)
            .zip(&self.mu)
            .map(|((t, v), mu)| FRAC_1_SQRT_2 * (sign * t + mu * v))
            .collect();
        Ok(WaveFunction {
            grid: self.grid,
            values,
            label: None,
            formal: wf.formal,
        })
    }

    pub fn lower(&self, wf: &WaveFunction) -> Result<WaveFunction> {
        self.combine(wf, 1.0)
    }

    pub fn raise(&self, wf: &WaveFunction) -> Result<WaveFunction> {
        self.combine(wf, -1.0)
    }

    /// A⁺A psi.
    pub fn number(&self, wf: &WaveFunction) -> Result<WaveFunction> {
        self.raise(&self.lower(wf)?)
    }

    /// Deformed momentum m^{-1/4} p m^{-1/4} = -i m^{-1/4} d/dx m^{-1/4}.
    pub fn deformed_momentum(&self, wf: &WaveFunction) -> Result<WaveFunction> {
        let minus_i = Complex64::new(0.0, -1.0);
        let values = self
            .symmetric_derivative(wf)?
            .into_iter()
            .map(|t| minus_i * t)
            .collect();
        Ok(WaveFunction {
            grid: self.grid,
            values,
            label: None,
            formal: wf.formal,
        })
    }

    /// mu(x) at the grid points.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }
}

pub fn apply_lowering(mumap: &MuMap, wf: &WaveFunction) -> Result<WaveFunction> {
    LadderOps::new(mumap, wf.grid)?.lower(wf)
}

pub fn apply_raising(mumap: &MuMap, wf: &WaveFunction) -> Result<WaveFunction> {
    LadderOps::new(mumap, wf.grid)?.raise(wf)
}

/// [A, A⁺] for the beta-family of ladder operators:
/// 1 - (2 beta + 1)/(4m) [m″/m - (3/2)(m′/m)²].
pub fn commutator_profile(spec: &MassSpec, beta: f64, x: f64) -> Result<f64> {
    let d = spec.derivatives(x)?;
    let ratio = d.dm / d.m;
    Ok(1.0 - (2.0 * beta + 1.0) / (4.0 * d.m) * (d.d2m / d.m - 1.5 * ratio * ratio))
}

/// Flux-form kinetic operator -1/2 d/dx (1/m) d/dx as a symmetric
/// tridiagonal pair (diag, off) with Dirichlet ends.
///
/// 1/m is taken at the cell midpoints; the two outer midpoints are clamped
/// into the mass domain.
pub fn flux_kinetic(spec: &MassSpec, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
    let domain = spec.domain();
    grid.within(&domain)?;
    let n = grid.len();
    let h = grid.spacing();
    let scale = 1.0 / (2.0 * h * h);
    let w = (0..=n)
        .map(|j| {
            let x = (grid.x_lo() + (j as f64 - 0.5) * h).clamp(domain.lo, domain.hi);
            spec.mass(x).map(|m| 1.0 / m)
        })
        .collect::<Result<Vec<f64>>>()?;
    let diag = (0..n).map(|i| scale * (w[i] + w[i + 1])).collect();
    let off = (0..n - 1).map(|i| -scale * w[i + 1]).collect();
    Ok((diag, off))
}

/// -1/2 d/dx (1/m) d/dx psi + V psi in the flux form used by the
/// spectral checks.
pub fn apply_hamiltonian<F>(
    spec: &MassSpec,
    potential: F,
    wf: &WaveFunction,
) -> Result<WaveFunction>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut diag, off) = flux_kinetic(spec, &wf.grid)?;
    for (d, x) in diag.iter_mut().zip(wf.grid.points()) {
        *d += potential(x)?;
    }
    Ok(WaveFunction {
        grid: wf.grid,
        values: tridiagonal_apply(&diag, &off, &wf.values),
        label: None,
        formal: wf.formal,
    })
}
