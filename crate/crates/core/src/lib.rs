//! Massless Dirac operator on a torus with external gauge fields.
//!
//! The crate builds the first-order operator, squares it into a pair of
//! Sturm-Liouville problems, checks intertwining and factorization
//! identities on grids, and evaluates closed-form spectra against numerical
//! eigensolvers.

pub mod analytic;
pub mod discrete;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod numerics;
pub mod operators;
pub mod pseudoherm;

pub use discrete::{DiffScheme, GridFunction, PotentialForm, SparseOp};
pub use error::{Error, Result};
pub use fields::{AuProfile, AxProfile, FermiVelocity, GaugeField, QuantumNumbers};
pub use geometry::{Boundary, Grid, TorusParams};
pub use num_complex::Complex64 as C64;
