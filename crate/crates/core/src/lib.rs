//! Generalized harmonic oscillator (GHO) for one-dimensional Schrödinger
//! problems with a position-dependent mass.
//!
//! The crate builds the mass catalog and the coordinate map
//! mu(x) = ∫ sqrt(m) dx ([`mass_model`]), the ladder-operator algebra and
//! eigenstates ([`oscillator`]), coherent states ([`coherent`]), and an
//! independent finite-difference check of the spectrum ([`spectral`]).

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod coherent;
pub mod error;
pub mod grid;
pub mod mass_model;
pub mod oscillator;
pub mod quadrature;
pub mod spectral;
pub mod tridiag;

pub use error::{GhoError, Result};
pub use grid::{Grid, WaveFunction};
pub use mass_model::{
    admissible_for_orthonormal_family, classify_range, Domain, MassKind, MassProfile, MassSpec,
    MuMap, RangeClass, SampledProfile,
};
pub use oscillator::{gho_ordering, OrderingParams};
pub use spectral::{verify, SpectralReport, Verdict, VerifyConfig};
