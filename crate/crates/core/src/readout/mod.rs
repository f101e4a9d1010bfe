//! Readout channels: the conditional outcome densities `P(O|+)` and `P(O|-)`.

mod gaussian;
mod peak;
mod tabulated;

use rand::Rng;

use crate::numerics::{integrate, integrate_piecewise, QuadratureSpec};
use crate::{Error, Result};

pub use gaussian::GaussianReadout;
pub use peak::{
    optimize_peak_parameters, simulate_peak_trace, tabulate_peak_distributions, PeakEnsemble,
    PeakOptimum, PeakSearchGrid, PeakSignalParams, PeakTabulation, TabulationSettings,
    TabulationWarning,
};
pub use tabulated::TabulatedReadout;

/// Qubit state in the readout basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QubitState {
    Plus,
    Minus,
}

impl QubitState {
    pub fn flipped(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }

    /// `+1` for `|+>`, `-1` for `|->`.
    pub fn sign(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }
}

/// Single-shot error rates of a thresholded readout.
///
/// `eps_plus = P(c_-|+)` is the weight of `P(O|+)` below `threshold`, and
/// `eps_minus = P(c_+|-)` is the weight of `P(O|-)` above it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalErrorRates {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub threshold: f64,
}

impl ConditionalErrorRates {
    pub fn new(eps_plus: f64, eps_minus: f64, threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps_plus) || !(0.0..=1.0).contains(&eps_minus) {
            return Err(Error::Domain("conditional error rates must lie in [0, 1]"));
        }
        Ok(Self {
            eps_plus,
            eps_minus,
            threshold,
        })
    }

    pub fn symmetric(eps: f64, threshold: f64) -> Result<Self> {
        Self::new(eps, eps, threshold)
    }

    /// Average single-shot error `(eps_plus + eps_minus) / 2`.
    pub fn average(&self) -> f64 {
        0.5 * (self.eps_plus + self.eps_minus)
    }
}

/// A readout channel.
pub trait Readout {
    /// Conditional density `P(outcome | state)`.
    fn pdf(&self, outcome: f64, state: QubitState) -> f64;

    /// `ln P(outcome | state)`; `-inf` where the density vanishes.
    fn log_pdf(&self, outcome: f64, state: QubitState) -> f64 {
        libm::log(self.pdf(outcome, state))
    }

    /// Conditional CDF `P(O <= outcome | state)`.
    fn cdf(&self, outcome: f64, state: QubitState) -> f64;

    /// Draws one outcome from `P(O|state)`.
    fn sample<R: Rng + ?Sized>(&self, state: QubitState, rng: &mut R) -> f64;

    /// Finite interval that carries all of the probability mass of both
    /// densities up to a negligible tail.
    fn support(&self) -> (f64, f64);

    /// Points where the densities are not smooth, including the support
    /// endpoints. Quadrature splits at these.
    fn breakpoints(&self) -> Option<&[f64]> {
        None
    }

    /// Threshold minimizing the average single-shot error, i.e. the crossing
    /// point `P(nu|+) = P(nu|-)` between the modes.
    fn optimal_threshold(&self) -> Result<f64>;

    fn conditional_error_rates(&self, threshold: f64) -> ConditionalErrorRates {
        let eps_plus = self.cdf(threshold, QubitState::Plus).clamp(0.0, 1.0);
        let eps_minus = (1.0 - self.cdf(threshold, QubitState::Minus)).clamp(0.0, 1.0);
        ConditionalErrorRates {
            eps_plus,
            eps_minus,
            threshold,
        }
    }
}

/// Integral of `f` over the support of `readout`, splitting at its
/// breakpoints when it has any.
pub fn integrate_over<R, F>(readout: &R, f: F, spec: &QuadratureSpec) -> Result<f64>
where
    R: Readout + ?Sized,
    F: FnMut(f64) -> f64,
{
    match readout.breakpoints() {
        Some(points) => integrate_piecewise(f, points, spec),
        None => {
            let (lo, hi) = readout.support();
            integrate(f, lo, hi, spec)
        }
    }
}

/// Either kind of readout channel.
#[derive(Clone, Debug, PartialEq)]
pub enum ReadoutModel {
    Gaussian(GaussianReadout),
    Tabulated(TabulatedReadout),
}

impl From<GaussianReadout> for ReadoutModel {
    fn from(model: GaussianReadout) -> Self {
        Self::Gaussian(model)
    }
}

impl From<TabulatedReadout> for ReadoutModel {
    fn from(model: TabulatedReadout) -> Self {
        Self::Tabulated(model)
    }
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            ReadoutModel::Gaussian($m) => $e,
            ReadoutModel::Tabulated($m) => $e,
        }
    };
}

impl Readout for ReadoutModel {
    fn pdf(&self, outcome: f64, state: QubitState) -> f64 {
        dispatch!(self, m => m.pdf(outcome, state))
    }
    fn log_pdf(&self, outcome: f64, state: QubitState) -> f64 {
        dispatch!(self, m => m.log_pdf(outcome, state))
    }
    fn cdf(&self, outcome: f64, state: QubitState) -> f64 {
        dispatch!(self, m => m.cdf(outcome, state))
    }
    fn sample<R: Rng + ?Sized>(&self, state: QubitState, rng: &mut R) -> f64 {
        dispatch!(self, m => m.sample(state, rng))
    }
    fn support(&self) -> (f64, f64) {
        dispatch!(self, m => m.support())
    }
    fn breakpoints(&self) -> Option<&[f64]> {
        dispatch!(self, m => m.breakpoints())
    }
    fn optimal_threshold(&self) -> Result<f64> {
        dispatch!(self, m => m.optimal_threshold())
    }
    fn conditional_error_rates(&self, threshold: f64) -> ConditionalErrorRates {
        dispatch!(self, m => m.conditional_error_rates(threshold))
    }
}
