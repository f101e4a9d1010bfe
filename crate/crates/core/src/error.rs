use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(&'static str),

    #[error(
        "quadrature did not converge within {subdivisions} subdivisions \
         (best estimate {estimate:e}, error estimate {error:e})"
    )]
    Quadrature {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("no threshold crossing between the conditional densities: {0}")]
    NoCrossing(&'static str),

    #[error("readout is uninformative: {0}")]
    Uninformative(&'static str),

    #[error("invalid tabulated readout: {0}")]
    InvalidTable(String),

    #[error("target error rate {target:e} not reached for n <= {n_max}")]
    Unreachable { target: f64, n_max: usize },
}
