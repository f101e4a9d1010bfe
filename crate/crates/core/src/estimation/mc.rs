//! Monte Carlo mean squared error of the estimators at finite `N`.

use alloc::vec::Vec;

use super::{Estimate, Estimator, ExpectationValue, Method, MixtureDistribution};
use crate::numerics::QuadratureSpec;
use crate::readout::Readout;
use crate::rng::{stream, Domain};
use crate::{Error, Executor, Result};

/// Spread of `n_records` estimates around the true `s0`.
///
/// `variance` is the population variance of the estimates, so
/// `mse = variance + bias^2` is their mean squared deviation from `s0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MseReport {
    pub method: Method,
    pub n_per_record: usize,
    pub n_records: u64,
    pub variance: f64,
    pub bias: f64,
    pub mse: f64,
    /// `n_per_record * mse`.
    pub normalized_mse: f64,
    /// Estimates that fell outside `[-1, 1]` and were clamped. They enter
    /// the statistics clamped.
    pub clamped: u64,
    /// Records the estimator rejected; they are left out of the statistics.
    pub failures: u64,
    /// Soft-decoded records whose likelihood was monotone.
    pub degenerate: u64,
}

/// Draws `n_records` records of `n_per_record` outcomes from `P(O|s0)` and
/// applies `method` to each. Record `k` uses its own random stream, and the
/// reduction runs in record order, so the report depends only on the
/// arguments.
pub fn mse_monte_carlo<R, E>(
    readout: &R,
    s0: ExpectationValue,
    method: Method,
    n_per_record: usize,
    n_records: u64,
    seed: u64,
    exec: &E,
) -> Result<MseReport>
where
    R: Readout + Sync + ?Sized,
    E: Executor,
{
    if n_per_record == 0 || n_records == 0 {
        return Err(Error::Domain("record size and record count must be at least 1"));
    }
    let estimator = Estimator::prepare(readout, method, &QuadratureSpec::default())?;
    let mix = MixtureDistribution::new(readout, s0);
    let estimates: Vec<Option<Estimate>> = exec.map_indexed(n_records, |k| {
        let mut rng = stream(seed, Domain::EstimationRecord, k);
        let record: Vec<f64> = (0..n_per_record).map(|_| mix.sample(&mut rng)).collect();
        estimator.estimate(readout, &record).ok()
    });

    let ok: Vec<&Estimate> = estimates.iter().flatten().collect();
    if ok.is_empty() {
        return Err(Error::Uninformative("estimator failed on every record"));
    }
    let count = ok.len() as f64;
    let mean = ok.iter().map(|e| e.value.value()).sum::<f64>() / count;
    let variance = ok.iter().map(|e| (e.value.value() - mean).powi(2)).sum::<f64>() / count;
    let bias = mean - s0.value();
    let mse = variance + bias * bias;
    Ok(MseReport {
        method,
        n_per_record,
        n_records,
        variance,
        bias,
        mse,
        normalized_mse: n_per_record as f64 * mse,
        clamped: ok.iter().filter(|e| e.clamped()).count() as u64,
        failures: n_records - ok.len() as u64,
        degenerate: ok.iter().filter(|e| e.degenerate).count() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::asymptotic_mse;
    use crate::readout::GaussianReadout;
    use crate::Sequential;

    #[test]
    fn small_run_tracks_asymptotics() {
        let g = GaussianReadout::new(2.0).unwrap();
        let s0 = ExpectationValue::new(0.0).unwrap();
        let spec = QuadratureSpec::default();
        for method in Method::ALL {
            let rep = mse_monte_carlo(&g, s0, method, 100, 4000, 1, &Sequential).unwrap();
            let want = asymptotic_mse(&g, s0, method, &spec).unwrap();
            assert!((rep.normalized_mse / want - 1.0).abs() < 0.1, "{method}: {} {want}", rep.normalized_mse);
            assert_eq!(rep.mse, rep.variance + rep.bias * rep.bias);
            assert_eq!(rep.failures, 0);
        }
    }

    #[test]
    fn clamping_is_counted() {
        let g = GaussianReadout::new(2.0).unwrap();
        let rep = mse_monte_carlo(&g, ExpectationValue::new(1.0).unwrap(), Method::SoftAverage, 1, 1000, 2, &Sequential).unwrap();
        assert!(rep.clamped > 300, "{rep:?}");
        assert!(mse_monte_carlo(&g, ExpectationValue::new(0.0).unwrap(), Method::SoftAverage, 0, 10, 2, &Sequential).is_err());
    }
}
