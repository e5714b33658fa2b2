//! Numerical machinery for (ψ,β)-smooth periodic functions: decay families and
//! their α-characteristic, trigonometric polynomials, extremal functions,
//! best orthogonal m-term approximation, and explicit two-sided bounds.

// `!(x > y)` is used on purpose so that NaN fails every admissibility check;
// tabulated constants keep all their digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod approx;
pub mod bounds;
pub mod error;
pub mod extremal;
pub mod psi;
pub mod trig;

pub use error::{Error, Result};
