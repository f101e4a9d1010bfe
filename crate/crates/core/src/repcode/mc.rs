//! Monte Carlo estimate of the repetition-code logical error rate.

use alloc::vec::Vec;

use rand::Rng;

use super::{combine, decide, thresholded_terms, AnalogAccumulator, EncodingChannel, LogLikelihoodRatio, LogicalBit};
use crate::readout::{ConditionalErrorRates, Readout};
use crate::rng::{stream, Domain, StreamRng};
use crate::{Error, Executor, Result};

/// Trials per unit of work handed to the executor. Random streams are keyed
/// by trial, so this only affects scheduling granularity.
const BLOCK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecodingMode {
    /// Likelihood ratio of the analog outcomes.
    Analog,
    /// Likelihood ratio of the outcomes thresholded at the optimal threshold.
    Thresholded,
}

/// Logical error count over a number of trials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorRateEstimate {
    pub errors: u64,
    pub trials: u64,
    pub rate: f64,
    /// Binomial standard error `sqrt(rate (1 - rate) / trials)`.
    pub std_err: f64,
    /// Outcomes for which both densities vanished (analog mode only).
    pub uninformative: u64,
}

impl ErrorRateEstimate {
    pub fn from_counts(errors: u64, trials: u64) -> Result<Self> {
        if trials == 0 || errors > trials {
            return Err(Error::Domain("need 0 <= errors <= trials and trials >= 1"));
        }
        let rate = errors as f64 / trials as f64;
        Ok(Self {
            errors,
            trials,
            rate,
            std_err: libm::sqrt(rate * (1.0 - rate) / trials as f64),
            uninformative: 0,
        })
    }
}

/// Decoder state shared by all trials of one `(mode, n, channel)` cell.
#[derive(Clone, Debug)]
pub struct TrialDecoder {
    mode: DecodingMode,
    n: usize,
    channel: EncodingChannel,
    threshold: f64,
    /// `ln Lambda_c` indexed by the number of `c_+` outcomes.
    hard_llr: Vec<f64>,
}

impl TrialDecoder {
    /// Thresholded mode uses the readout's optimal threshold.
    pub fn new<R: Readout + ?Sized>(readout: &R, mode: DecodingMode, n: usize, channel: EncodingChannel) -> Result<Self> {
        let threshold = match mode {
            DecodingMode::Analog => 0.0,
            DecodingMode::Thresholded => readout.optimal_threshold()?,
        };
        Self::with_threshold(readout, mode, n, channel, threshold)
    }

    pub fn with_threshold<R: Readout + ?Sized>(
        readout: &R,
        mode: DecodingMode,
        n: usize,
        channel: EncodingChannel,
        threshold: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("the code needs at least one qubit"));
        }
        let hard_llr = match mode {
            DecodingMode::Analog => Vec::new(),
            DecodingMode::Thresholded => {
                let rates = readout.conditional_error_rates(threshold);
                let (p, m) = thresholded_terms(&rates, channel);
                (0..=n).map(|k| combine(k, p, n - k, m)).collect()
            }
        };
        Ok(Self {
            mode,
            n,
            channel,
            threshold,
            hard_llr,
        })
    }

    pub fn mode(&self) -> DecodingMode {
        self.mode
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn rates<R: Readout + ?Sized>(&self, readout: &R) -> ConditionalErrorRates {
        readout.conditional_error_rates(self.threshold)
    }
}

/// Outcome of a single trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Trial {
    pub encoded: LogicalBit,
    pub decoded: LogicalBit,
    pub uninformative: usize,
}

/// Trial `index` under `seed`: draws the logical bit, samples every qubit
/// from the flipped-or-not conditional density, and decodes.
pub fn run_trial<R: Readout + ?Sized>(readout: &R, decoder: &TrialDecoder, seed: u64, index: u64) -> Trial {
    let mut rng = stream(seed, Domain::RepetitionTrial, index);
    let encoded = if rng.random::<bool>() {
        LogicalBit::One
    } else {
        LogicalBit::Zero
    };
    let eta = decoder.channel.eta();
    let draw = |rng: &mut StreamRng| {
        let mut state = encoded.encoded_state();
        if eta > 0.0 && rng.random::<f64>() < eta {
            state = state.flipped();
        }
        readout.sample(state, rng)
    };
    let (llr, uninformative) = match decoder.mode {
        DecodingMode::Analog => {
            let mut acc = AnalogAccumulator::new(decoder.channel);
            for _ in 0..decoder.n {
                let o = draw(&mut rng);
                acc.push(readout, o);
            }
            let out = acc.finish();
            (out.llr, out.uninformative)
        }
        DecodingMode::Thresholded => {
            let mut n_plus = 0;
            for _ in 0..decoder.n {
                if draw(&mut rng) > decoder.threshold {
                    n_plus += 1;
                }
            }
            (LogLikelihoodRatio(decoder.hard_llr[n_plus]), 0)
        }
    };
    Trial {
        encoded,
        decoded: decide(llr, &mut rng),
        uninformative,
    }
}

/// Logical error rate of `n`-qubit repetition decoding over `trials`
/// independent trials. The result depends only on the arguments, never on
/// how `exec` schedules the work.
pub fn estimate_error_rate_mc<R, E>(
    readout: &R,
    mode: DecodingMode,
    n: usize,
    channel: EncodingChannel,
    trials: u64,
    seed: u64,
    exec: &E,
) -> Result<ErrorRateEstimate>
where
    R: Readout + Sync + ?Sized,
    E: Executor,
{
    let decoder = TrialDecoder::new(readout, mode, n, channel)?;
    estimate_with_decoder(readout, &decoder, trials, seed, exec)
}

/// [`estimate_error_rate_mc`] with a prepared decoder.
pub fn estimate_with_decoder<R, E>(
    readout: &R,
    decoder: &TrialDecoder,
    trials: u64,
    seed: u64,
    exec: &E,
) -> Result<ErrorRateEstimate>
where
    R: Readout + Sync + ?Sized,
    E: Executor,
{
    if trials == 0 {
        return Err(Error::Domain("need at least one trial"));
    }
    let blocks = trials.div_ceil(BLOCK);
    let counts = exec.map_indexed(blocks, |b| {
        let (mut errors, mut uninformative) = (0u64, 0u64);
        for index in b * BLOCK..((b + 1) * BLOCK).min(trials) {
            let t = run_trial(readout, decoder, seed, index);
            errors += (t.encoded != t.decoded) as u64;
            uninformative += t.uninformative as u64;
        }
        (errors, uninformative)
    });
    let errors = counts.iter().map(|c| c.0).sum();
    let mut estimate = ErrorRateEstimate::from_counts(errors, trials)?;
    estimate.uninformative = counts.iter().map(|c| c.1).sum();
    Ok(estimate)
}
