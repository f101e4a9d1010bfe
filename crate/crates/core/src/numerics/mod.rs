//! Special functions, adaptive quadrature and scalar concave maximization.

mod optimize;
mod quadrature;
mod special;

pub use optimize::{maximize_concave, maximize_concave_with_derivative, Maximum};
pub use quadrature::{integrate, integrate_line, integrate_piecewise, QuadratureSpec};
pub use special::{
    erfc, ln_gamma, normal_cdf, normal_pdf, normal_upper_tail, regularized_incomplete_beta,
};
