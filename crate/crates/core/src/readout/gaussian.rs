#[allow(unused_imports)] // needed without std; the lint misfires
use num_traits::Float;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{QubitState, Readout};
use crate::numerics::{erfc, normal_cdf};
use crate::{Error, Result};

/// Unit-separated Gaussian readout:
/// `P(O|+-) = sqrt(r / 2 pi) exp(-(O -+ 1)^2 r / 2)` with power SNR `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianReadout {
    r: f64,
}

/// Support is cut where the density falls below this fraction of its peak.
const SUPPORT_CUTOFF: f64 = 1e-14;

impl GaussianReadout {
    pub fn new(snr: f64) -> Result<Self> {
        if !(snr > 0.0 && snr.is_finite()) {
            return Err(Error::Domain("signal-to-noise ratio must be positive and finite"));
        }
        Ok(Self { r: snr })
    }

    pub fn snr(&self) -> f64 {
        self.r
    }

    pub fn sigma(&self) -> f64 {
        self.r.recip().sqrt()
    }

    /// Symmetric single-shot error at the optimal threshold,
    /// `1/2 erfc(sqrt(r/2))`.
    pub fn single_shot_error(&self) -> f64 {
        0.5 * erfc((0.5 * self.r).sqrt())
    }
}

impl Readout for GaussianReadout {
    fn pdf(&self, outcome: f64, state: QubitState) -> f64 {
        self.log_pdf(outcome, state).exp()
    }

    fn log_pdf(&self, outcome: f64, state: QubitState) -> f64 {
        let d = outcome - state.sign();
        0.5 * (self.r / (2.0 * PI)).ln() - 0.5 * d * d * self.r
    }

    fn cdf(&self, outcome: f64, state: QubitState) -> f64 {
        normal_cdf((outcome - state.sign()) * self.r.sqrt())
    }

    fn sample<R: Rng + ?Sized>(&self, state: QubitState, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        state.sign() + z * self.sigma()
    }

    fn support(&self) -> (f64, f64) {
        let half_width = (-2.0 * SUPPORT_CUTOFF.ln() / self.r).sqrt();
        (-1.0 - half_width, 1.0 + half_width)
    }

    fn optimal_threshold(&self) -> Result<f64> {
        Ok(0.0)
    }
}
