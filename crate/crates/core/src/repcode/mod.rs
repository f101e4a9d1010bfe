//! Maximum-likelihood decoding of the N-qubit repetition code.
//!
//! The logical state `|1>` (`|0>`) is encoded as `|+>^N` (`|->^N`). Each
//! physical qubit flips independently with probability `eta` during encoding,
//! so a qubit of logical state `|1>` reads out from
//! `(1 - eta) P(O|+) + eta P(O|-)`. Decoders return the log-likelihood ratio
//! `ln P(record | 1) / P(record | 0)`; [`decide`] turns it into a bit.

mod analytic;
mod mc;

use rand::Rng;

use crate::readout::{ConditionalErrorRates, QubitState, Readout};
use crate::{Error, Result};

pub use analytic::{
    asymptotic_soft_qubit_count, gaussian_majority_error, gaussian_majority_error_asymptotic,
    gaussian_soft_error, gaussian_soft_error_asymptotic, min_qubits_to_reach,
};
pub use mc::{
    estimate_error_rate_mc, estimate_with_decoder, run_trial, DecodingMode, ErrorRateEstimate, Trial, TrialDecoder,
};

/// Uncorrelated encoding bit flips with probability `eta` per qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncodingChannel {
    eta: f64,
}

impl EncodingChannel {
    pub const NOISELESS: Self = Self { eta: 0.0 };

    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&eta) {
            return Err(Error::Domain("bit-flip probability must lie in [0, 0.5]"));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Analog outcomes of one repetition-code shot, in qubit order.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    outcomes: alloc::vec::Vec<f64>,
}

impl MeasurementRecord {
    pub fn new(outcomes: alloc::vec::Vec<f64>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::Domain("measurement record needs at least one outcome"));
        }
        if outcomes.iter().any(|o| !o.is_finite()) {
            return Err(Error::Domain("measurement outcomes must be finite"));
        }
        Ok(Self { outcomes })
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// `ln Lambda`. Infinite when one hypothesis has zero likelihood.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogLikelihoodRatio(pub f64);

impl LogLikelihoodRatio {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Decoded logical state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LogicalBit {
    Zero,
    One,
}

impl LogicalBit {
    /// Physical state every qubit is prepared in.
    pub fn encoded_state(self) -> QubitState {
        match self {
            Self::Zero => QubitState::Minus,
            Self::One => QubitState::Plus,
        }
    }
}

/// `|1>` if `ln Lambda > 0`, `|0>` if `ln Lambda < 0`; ties (and the NaN of
/// conflicting certainties) are settled by a fair coin.
pub fn decide<R: Rng + ?Sized>(llr: LogLikelihoodRatio, rng: &mut R) -> LogicalBit {
    let v = llr.value();
    if v > 0.0 {
        LogicalBit::One
    } else if v < 0.0 {
        LogicalBit::Zero
    } else if rng.random::<bool>() {
        LogicalBit::One
    } else {
        LogicalBit::Zero
    }
}

/// `ln(e^a + e^b)`, symmetric in its arguments.
fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + libm::log1p(libm::exp(lo - hi))
}

/// Running sum of per-qubit analog log-likelihood ratios.
#[derive(Clone, Copy, Debug)]
pub(crate) struct AnalogAccumulator {
    ln_keep: f64,
    ln_flip: f64,
    finite: f64,
    plus_certain: usize,
    minus_certain: usize,
    uninformative: usize,
}

impl AnalogAccumulator {
    pub(crate) fn new(channel: EncodingChannel) -> Self {
        Self {
            ln_keep: libm::log1p(-channel.eta),
            ln_flip: libm::log(channel.eta),
            finite: 0.0,
            plus_certain: 0,
            minus_certain: 0,
            uninformative: 0,
        }
    }

    pub(crate) fn push<R: Readout + ?Sized>(&mut self, readout: &R, outcome: f64) {
        let lp = readout.log_pdf(outcome, QubitState::Plus);
        let lm = readout.log_pdf(outcome, QubitState::Minus);
        if lp == f64::NEG_INFINITY && lm == f64::NEG_INFINITY {
            self.uninformative += 1;
            return;
        }
        let term = if self.ln_flip == f64::NEG_INFINITY {
            lp - lm
        } else {
            log_add_exp(self.ln_keep + lp, self.ln_flip + lm) - log_add_exp(self.ln_keep + lm, self.ln_flip + lp)
        };
        if term == f64::INFINITY {
            self.plus_certain += 1;
        } else if term == f64::NEG_INFINITY {
            self.minus_certain += 1;
        } else {
            self.finite += term;
        }
    }

    pub(crate) fn finish(&self) -> AnalogLlr {
        let value = match (self.plus_certain > 0, self.minus_certain > 0) {
            (true, true) => 0.0,
            (true, false) => f64::INFINITY,
            (false, true) => f64::NEG_INFINITY,
            (false, false) => self.finite,
        };
        AnalogLlr {
            llr: LogLikelihoodRatio(value),
            uninformative: self.uninformative,
            conflicting: self.plus_certain > 0 && self.minus_certain > 0,
        }
    }
}

/// Result of [`log_lr_analog`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalogLlr {
    pub llr: LogLikelihoodRatio,
    /// Outcomes where both densities vanish; they contribute nothing.
    pub uninformative: usize,
    /// Some outcomes were impossible under `|1>` and others under `|0>`.
    /// The ratio is then reported as a tie.
    pub conflicting: bool,
}

/// Soft decoding: `sum_i ln [((1-eta) P(O_i|+) + eta P(O_i|-)) / ((1-eta) P(O_i|-) + eta P(O_i|+))]`,
/// evaluated in the log domain.
pub fn log_lr_analog<R: Readout + ?Sized>(readout: &R, outcomes: &[f64], channel: EncodingChannel) -> AnalogLlr {
    let mut acc = AnalogAccumulator::new(channel);
    for &o in outcomes {
        acc.push(readout, o);
    }
    acc.finish()
}

/// Per-outcome log ratios `(ln a/b, ln c/d)` for an observed `c_+` and `c_-`.
fn thresholded_terms(rates: &ConditionalErrorRates, channel: EncodingChannel) -> (f64, f64) {
    let (ep, em, eta) = (rates.eps_plus, rates.eps_minus, channel.eta());
    let a = (1.0 - eta) * (1.0 - ep) + eta * em;
    let b = (1.0 - eta) * em + eta * (1.0 - ep);
    let c = (1.0 - eta) * ep + eta * (1.0 - em);
    let d = (1.0 - eta) * (1.0 - em) + eta * ep;
    let ratio = |num: f64, den: f64| if num == den { 0.0 } else { libm::log(num) - libm::log(den) };
    (ratio(a, b), ratio(c, d))
}

fn combine(n_plus: usize, plus_term: f64, n_minus: usize, minus_term: f64) -> f64 {
    let part = |n: usize, t: f64| if n == 0 { 0.0 } else { n as f64 * t };
    let v = part(n_plus, plus_term) + part(n_minus, minus_term);
    if v.is_nan() {
        0.0
    } else {
        v
    }
}

/// Hard decoding from the number `n_plus` of outcomes thresholded to `c_+`.
pub fn log_lr_thresholded(
    rates: &ConditionalErrorRates,
    n_plus: usize,
    n_total: usize,
    channel: EncodingChannel,
) -> Result<LogLikelihoodRatio> {
    if n_plus > n_total {
        return Err(Error::Domain("n_plus cannot exceed n_total"));
    }
    let (plus_term, minus_term) = thresholded_terms(rates, channel);
    Ok(LogLikelihoodRatio(combine(n_plus, plus_term, n_total - n_plus, minus_term)))
}
