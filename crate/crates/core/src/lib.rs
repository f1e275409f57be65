//! Numerical laboratory for `i u_t - L_a u + lambda |x|^{-b} |u|^alpha u = 0`
//! with `L_a = -Laplacian + a/|x|^2`, restricted to radial data.

pub mod dynamics;
pub mod error;
pub mod exponents;
pub mod groundstate;
pub mod linalg;
pub mod model;
pub mod radial;
pub mod special;

pub use error::{Error, Result};
pub use model::{
    check_hypotheses, derive_indices, DerivedIndices, HypothesisReport, ModelParams, Regime, Sign,
};
