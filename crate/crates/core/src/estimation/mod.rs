//! Estimating `s0 = <sigma_z>` from `N` independent readouts.
//!
//! Each outcome is drawn from the mixture
//! `P(O|s0) = (1+s0)/2 P(O|+) + (1-s0)/2 P(O|-)`. Three estimators are
//! provided: the bias-corrected thresholded average (TA), the rescaled soft
//! average (SA), and the maximum-likelihood estimate on the analog outcomes
//! (SD). Mean squared errors are reported normalized, as `N * mse`.

mod asymptotic;
mod mc;

use core::fmt;

use rand::Rng;

use crate::numerics::{maximize_concave_with_derivative, QuadratureSpec};
use crate::readout::{integrate_over, ConditionalErrorRates, QubitState, Readout};
use crate::{Error, Result};

pub use asymptotic::{
    asymptotic_mse, conditional_moments, fisher_information, fisher_information_score, overlap_integral,
    ConditionalMoments,
};
pub use mc::{mse_monte_carlo, MseReport};

/// Expectation value `s` in `[-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct ExpectationValue(f64);

impl ExpectationValue {
    pub fn new(s: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::Domain("expectation value must lie in [-1, 1]"));
        }
        Ok(Self(s))
    }

    /// Clamps `s` into `[-1, 1]`; `None` for NaN.
    pub fn clamped(s: f64) -> Option<Self> {
        if s.is_nan() {
            None
        } else {
            Some(Self(s.clamp(-1.0, 1.0)))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Probability `(1 + s)/2` of collapsing onto `|+>`.
    pub fn plus_weight(self) -> f64 {
        0.5 * (1.0 + self.0)
    }
}

/// Outcome distribution of a qubit with expectation value `s0`.
#[derive(Clone, Copy, Debug)]
pub struct MixtureDistribution<'a, R: ?Sized> {
    readout: &'a R,
    s0: ExpectationValue,
}

impl<'a, R: Readout + ?Sized> MixtureDistribution<'a, R> {
    pub fn new(readout: &'a R, s0: ExpectationValue) -> Self {
        Self { readout, s0 }
    }

    pub fn s0(&self) -> ExpectationValue {
        self.s0
    }

    pub fn pdf(&self, outcome: f64) -> f64 {
        let w = self.s0.plus_weight();
        w * self.readout.pdf(outcome, QubitState::Plus) + (1.0 - w) * self.readout.pdf(outcome, QubitState::Minus)
    }

    /// Collapses onto `|+>` or `|->`, then reads out.
    pub fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> f64 {
        let state = if rng.random::<f64>() < self.s0.plus_weight() {
            QubitState::Plus
        } else {
            QubitState::Minus
        };
        self.readout.sample(state, rng)
    }

    /// Total probability mass, 1 up to quadrature and tabulation error.
    pub fn mass(&self, spec: &QuadratureSpec) -> Result<f64> {
        integrate_over(self.readout, |o| self.pdf(o), spec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Bias-corrected thresholded average.
    ThresholdedAverage,
    /// Soft average of the rescaled outcomes `(O - B)/A`.
    SoftAverage,
    /// Maximum-likelihood estimate from the analog outcomes.
    SoftDecoded,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::ThresholdedAverage, Method::SoftAverage, Method::SoftDecoded];

    pub fn abbreviation(self) -> &'static str {
        match self {
            Self::ThresholdedAverage => "TA",
            Self::SoftAverage => "SA",
            Self::SoftDecoded => "SD",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbreviation())
    }
}

/// `(c_+, c_-)`, the values that make the thresholded average unbiased.
pub fn bias_corrected_outcomes(rates: &ConditionalErrorRates) -> Result<(f64, f64)> {
    let sum = rates.eps_plus + rates.eps_minus;
    if sum >= 1.0 {
        return Err(Error::Uninformative("thresholded readout carries no information (eps_+ + eps_- >= 1)"));
    }
    let diff = rates.eps_plus - rates.eps_minus;
    Ok(((1.0 + diff) / (1.0 - sum), -(1.0 - diff) / (1.0 - sum)))
}

/// One estimate of `s0` from a record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: ExpectationValue,
    /// Estimate before clamping into `[-1, 1]`.
    pub raw: f64,
    /// Every outcome was impossible under one of the two states, so the
    /// likelihood is monotone (soft-decoded estimates only).
    pub degenerate: bool,
}

impl Estimate {
    fn from_raw(raw: f64) -> Result<Self> {
        let value = ExpectationValue::clamped(raw).ok_or(Error::Domain("estimate is not a number"))?;
        Ok(Self {
            value,
            raw,
            degenerate: false,
        })
    }

    pub fn clamped(&self) -> bool {
        self.raw != self.value.value()
    }
}

/// An estimator with its readout-dependent constants worked out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Estimator {
    ThresholdedAverage { threshold: f64, c_plus: f64, c_minus: f64 },
    SoftAverage { a: f64, b: f64 },
    SoftDecoded { tol: f64 },
}

/// Tolerance on `s` of the maximum-likelihood search.
pub const MLE_TOLERANCE: f64 = 1e-10;

impl Estimator {
    /// Prepares `method`. TA thresholds at the readout's optimal threshold.
    pub fn prepare<R: Readout + ?Sized>(readout: &R, method: Method, spec: &QuadratureSpec) -> Result<Self> {
        match method {
            Method::ThresholdedAverage => Self::thresholded(readout, readout.optimal_threshold()?),
            Method::SoftAverage => {
                let m = conditional_moments(readout, spec)?;
                Self::soft_average(m.scale(), m.offset())
            }
            Method::SoftDecoded => Ok(Self::SoftDecoded { tol: MLE_TOLERANCE }),
        }
    }

    pub fn thresholded<R: Readout + ?Sized>(readout: &R, threshold: f64) -> Result<Self> {
        let (c_plus, c_minus) = bias_corrected_outcomes(&readout.conditional_error_rates(threshold))?;
        Ok(Self::ThresholdedAverage {
            threshold,
            c_plus,
            c_minus,
        })
    }

    pub fn soft_average(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::Uninformative("conditional means coincide (A = 0)"));
        }
        Ok(Self::SoftAverage { a, b })
    }

    pub fn method(&self) -> Method {
        match self {
            Self::ThresholdedAverage { .. } => Method::ThresholdedAverage,
            Self::SoftAverage { .. } => Method::SoftAverage,
            Self::SoftDecoded { .. } => Method::SoftDecoded,
        }
    }

    pub fn estimate<R: Readout + ?Sized>(&self, readout: &R, outcomes: &[f64]) -> Result<Estimate> {
        if outcomes.is_empty() {
            return Err(Error::Domain("record must not be empty"));
        }
        let n = outcomes.len() as f64;
        match *self {
            Self::ThresholdedAverage {
                threshold,
                c_plus,
                c_minus,
            } => {
                let n_plus = outcomes.iter().filter(|&&o| o > threshold).count() as f64;
                Estimate::from_raw((n_plus * c_plus + (n - n_plus) * c_minus) / n)
            }
            Self::SoftAverage { a, b } => {
                let mean = outcomes.iter().sum::<f64>() / n;
                Estimate::from_raw((mean - b) / a)
            }
            Self::SoftDecoded { tol } => soft_decoded(readout, outcomes, tol),
        }
    }
}

fn soft_decoded<R: Readout + ?Sized>(readout: &R, outcomes: &[f64], tol: f64) -> Result<Estimate> {
    let mut densities = alloc::vec::Vec::with_capacity(outcomes.len());
    let (mut only_plus, mut only_minus) = (true, true);
    for &o in outcomes {
        let p = readout.pdf(o, QubitState::Plus);
        let m = readout.pdf(o, QubitState::Minus);
        if !(p + m > 0.0) {
            return Err(Error::Uninformative("outcome has zero density under both states"));
        }
        only_plus &= m == 0.0;
        only_minus &= p == 0.0;
        densities.push((p, m));
    }
    let ell = |s: f64| {
        let (wp, wm) = (0.5 * (1.0 + s), 0.5 * (1.0 - s));
        densities.iter().map(|&(p, m)| libm::log(wp * p + wm * m)).sum::<f64>() / densities.len() as f64
    };
    let slope = |s: f64| {
        densities
            .iter()
            .map(|&(p, m)| (p - m) / ((1.0 + s) * p + (1.0 - s) * m))
            .sum::<f64>()
    };
    let best = maximize_concave_with_derivative(ell, slope, -1.0, 1.0, tol);
    let mut estimate = Estimate::from_raw(best.argmax)?;
    estimate.degenerate = only_plus || only_minus;
    Ok(estimate)
}

/// Thresholds each outcome at `threshold` and averages the bias-corrected
/// values, clamped to `[-1, 1]`.
pub fn thresholded_average<R: Readout + ?Sized>(outcomes: &[f64], readout: &R, threshold: f64) -> Result<ExpectationValue> {
    Ok(Estimator::thresholded(readout, threshold)?.estimate(readout, outcomes)?.value)
}

/// Mean of `(O_i - B)/A`, clamped to `[-1, 1]`.
pub fn soft_average<R: Readout + ?Sized>(outcomes: &[f64], readout: &R) -> Result<ExpectationValue> {
    let e = Estimator::prepare(readout, Method::SoftAverage, &QuadratureSpec::default())?;
    Ok(e.estimate(readout, outcomes)?.value)
}

/// Maximizer of `l(s) = N^-1 sum_i ln P(O_i|s)` over `[-1, 1]`.
pub fn mle_soft_decoded<R: Readout + ?Sized>(outcomes: &[f64], readout: &R) -> Result<Estimate> {
    Estimator::SoftDecoded { tol: MLE_TOLERANCE }.estimate(readout, outcomes)
}
