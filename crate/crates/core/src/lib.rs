//! q-calculus special functions, Jackson integrals, Hardy and Riemann-Liouville
//! q-operators, their discrete counterparts, and a verification engine that
//! checks the sharp Hardy-type q-inequalities numerically.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete;
pub mod error;
pub mod integral;
pub mod lattice;
pub mod operators;
pub mod params;
pub mod series;
pub mod special;
pub mod verify;

pub use error::{QError, Result, Tail};
pub use lattice::{make_extremal, ExtremalFamily, LatticeFunction, Positivity, Support};
pub use params::QParams;
pub use series::SeriesResult;
