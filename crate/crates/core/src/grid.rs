//! Uniform 1D grids, sampled wavefunctions and finite-difference stencils.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GhoError, Result};
use crate::mass_model::Domain;
use crate::quadrature::trapezoid;

/// Smallest grid the five-point stencils accept.
pub const MIN_GRID_POINTS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_lo: f64,
    x_hi: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_lo: f64, x_hi: f64, n: usize) -> Result<Self> {
        if n < MIN_GRID_POINTS {
            return Err(GhoError::GridTooCoarse {
                n,
                min: MIN_GRID_POINTS,
            });
        }
        if !(x_lo.is_finite() && x_hi.is_finite() && x_lo < x_hi) {
            return Err(GhoError::InvalidGrid(format!("[{x_lo}, {x_hi}]")));
        }
        Ok(Grid { x_lo, x_hi, n })
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n - 1 {
            self.x_hi
        } else {
            self.x_lo + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Same interval with half the spacing.
    pub fn refined(&self) -> Grid {
        Grid {
            n: 2 * self.n - 1,
            ..*self
        }
    }

    pub fn within(&self, domain: &Domain) -> Result<()> {
        for x in [self.x_lo, self.x_hi] {
            domain.require(x)?;
        }
        Ok(())
    }

    /// Trapezoid integral of real samples.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        trapezoid(values, self.spacing())
    }
}

/// A function sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    /// Quantum number, when the state is an eigenstate.
    pub label: Option<usize>,
    /// Set for states whose range class has no orthonormal family.
    pub formal: bool,
}

impl WaveFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(GhoError::InvalidGrid(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GhoError::InvalidGrid(
                "non-finite wavefunction value".into(),
            ));
        }
        Ok(WaveFunction {
            grid,
            values,
            label: None,
            formal: false,
        })
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        WaveFunction::new(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Grid, f: F) -> Result<Self> {
        WaveFunction::new(grid, grid.points().map(f).collect())
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// ⟨self|other⟩ by the trapezoid rule.
    pub fn inner(&self, other: &WaveFunction) -> Complex64 {
        let h = self.grid.spacing();
        let n = self.values.len();
        let mut s = Complex64::new(0.0, 0.0);
        for (a, b) in self.values.iter().zip(&other.values) {
            s += a.conj() * b;
        }
        s -= 0.5 * (self.values[0].conj() * other.values[0]);
        s -= 0.5 * (self.values[n - 1].conj() * other.values[n - 1]);
        s * h
    }

    pub fn norm_sqr(&self) -> f64 {
        let v: Vec<f64> = self.values.iter().map(|c| c.norm_sqr()).collect();
        self.grid.integrate(&v)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, s: Complex64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// self - s·other, pointwise.
    pub fn minus_scaled(&self, s: Complex64, other: &WaveFunction) -> WaveFunction {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - s * b)
            .collect();
        WaveFunction {
            grid: self.grid,
            values,
            label: None,
            formal: self.formal || other.formal,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest |value| over indices `skip..n-skip`.
    pub fn interior_max_abs(&self, skip: usize) -> f64 {
        let n = self.values.len();
        self.values[skip..n - skip]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Discrete L2 norm (trapezoid) over indices `skip..n-skip`.
    pub fn interior_norm(&self, skip: usize) -> f64 {
        let n = self.values.len();
        let v: Vec<f64> = self.values[skip..n - skip]
            .iter()
            .map(|c| c.norm_sqr())
            .collect();
        trapezoid(&v, self.grid.spacing()).sqrt()
    }
}

/// First derivative with the five-point central stencil; one-sided
/// five-point stencils at the two outermost points on each side.
pub fn derivative5(values: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    let n = values.len();
    if n < MIN_GRID_POINTS {
        return Err(GhoError::GridTooCoarse {
            n,
            min: MIN_GRID_POINTS,
        });
    }
    let f = values;
    let c = 1.0 / (12.0 * h);
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c;
    }
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
    let k = n - 1;
    d[k] = (25.0 * f[k] - 48.0 * f[k - 1] + 36.0 * f[k - 2] - 16.0 * f[k - 3] + 3.0 * f[k - 4]) * c;
    d[k - 1] = (3.0 * f[k] + 10.0 * f[k - 1] - 18.0 * f[k - 2] + 6.0 * f[k - 3] - f[k - 4]) * c;
    Ok(d)
}

/// y = T·x for the symmetric tridiagonal matrix (diag, off).
pub fn tridiagonal_apply(diag: &[f64], off: &[f64], x: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut y: Vec<Complex64> = diag.iter().zip(x).map(|(d, v)| d * v).collect();
    for i in 0..n - 1 {
        y[i] += off[i] * x[i + 1];
        y[i + 1] += off[i] * x[i];
    }
    y
}
