//! Finite-group quantum reference frames: regular representations, twirls,
//! relative algebras and changes of frame, with executable checks.

// NaN residuals must fail the `!(r <= tol)` checks; index loops mirror the math.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod group;
pub mod invariant;
pub mod linalg;
pub mod relative;
pub mod report;
pub mod repr;
pub mod suite;
pub mod tensor;
pub mod transform;
