//! Exact computer algebra for ordinary differential polynomials over the
//! rationals: arithmetic and reduction, delta-homogenization, order-truncated
//! differential elimination with Gröbner bases, and certified elimination of
//! Laurent equations in `x` and `x'`.

pub mod diffpoly;
pub mod elim;
pub mod error;
pub mod groebner;
pub mod homogenize;
pub mod poly;
pub mod syntax;
pub mod valuative;

pub use diffpoly::{dvar, leader, reduce, reduce_certified, separant, DiffPoly, DiffVar, RewriteRule};
pub use error::{Error, Result};
pub use poly::{int, ratio, Rational};
