//! Numerical laboratory for minimal and almost-minimal surfaces.
//!
//! Modules follow the computation: base surfaces of revolution ([`surface`]),
//! the two-circle Plateau family ([`catenoid`]), normal graphs over a base
//! ([`graph`]), almost-minimality deficits ([`deficits`]), prescribed mean
//! curvature and gravity films ([`solver`]), accessibility and the wedge-sum
//! lemma ([`access`]), and the estimate sweeps ([`lab`]). [`check`] re-runs the
//! invariants of every module and [`io`] holds the output helpers.

// negated comparisons reject NaN on purpose; index loops mirror the stencil formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod access;
pub mod catenoid;
pub mod check;
pub mod deficits;
pub mod error;
pub mod graph;
pub mod io;
pub mod lab;
pub mod linalg;
pub mod solver;
pub mod surface;

pub use error::{Error, Result};
