//! Numerical laboratory for entropic uncertainty relations of random
//! measurements.
//!
//! Every analytic lower bound on the sum of Shannon entropies of
//! measurement outcomes (Maassen–Uffink, Coles–Piani, tensor-product and
//! direct-sum majorization, the multi-measurement bound) is evaluated on
//! concrete unitaries and checked against a numerical upper value of the
//! true minimum. Submatrix-norm profiles are computed exactly by
//! enumeration at small dimension and by local search beyond it, and the
//! asymptotic laws for Haar-random unitaries are compared against Monte
//! Carlo experiments.
//!
//! All logarithms are natural; divide entropies by `ln 2` for bits.

pub mod asymptotics;
pub mod bounds;
pub mod error;
pub mod experiments;
pub mod haar;
pub mod matrix;
pub mod minimizer;
pub mod quadrature;
pub mod search;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, IndexSet, SingularSpectrum, C64};
