//! Large-`N` mean squared errors, normalized as `N * mse`.

use super::{bias_corrected_outcomes, ExpectationValue, Method, MixtureDistribution};
use crate::numerics::QuadratureSpec;
use crate::readout::{integrate_over, QubitState, Readout};
use crate::{Error, Result};

/// First and second conditional moments of the outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalMoments {
    pub mean_plus: f64,
    pub mean_minus: f64,
    pub second_plus: f64,
    pub second_minus: f64,
}

impl ConditionalMoments {
    /// `A = (<O>_+ - <O>_-)/2`.
    pub fn scale(&self) -> f64 {
        0.5 * (self.mean_plus - self.mean_minus)
    }

    /// `B = (<O>_+ + <O>_-)/2`.
    pub fn offset(&self) -> f64 {
        0.5 * (self.mean_plus + self.mean_minus)
    }
}

pub fn conditional_moments<R: Readout + ?Sized>(readout: &R, spec: &QuadratureSpec) -> Result<ConditionalMoments> {
    let moment = |k: i32, state| integrate_over(readout, |o| o.powi(k) * readout.pdf(o, state), spec);
    Ok(ConditionalMoments {
        mean_plus: moment(1, QubitState::Plus)?,
        mean_minus: moment(1, QubitState::Minus)?,
        second_plus: moment(2, QubitState::Plus)?,
        second_minus: moment(2, QubitState::Minus)?,
    })
}

fn interior(s0: ExpectationValue) -> Result<()> {
    if s0.value().abs() >= 1.0 {
        return Err(Error::Domain("s0 must lie strictly inside (-1, 1)"));
    }
    Ok(())
}

/// `I = int P(O|+) P(O|-) / P(O|s0) dO`, between 0 (disjoint densities)
/// and 1 (identical densities).
pub fn overlap_integral<R: Readout + ?Sized>(readout: &R, s0: ExpectationValue, spec: &QuadratureSpec) -> Result<f64> {
    interior(s0)?;
    let mix = MixtureDistribution::new(readout, s0);
    integrate_over(
        readout,
        |o| {
            let d = mix.pdf(o);
            if d > 0.0 {
                readout.pdf(o, QubitState::Plus) * readout.pdf(o, QubitState::Minus) / d
            } else {
                0.0
            }
        },
        spec,
    )
}

/// Fisher information `(1 - I)/(1 - s0^2)` of `P(O|s0)`.
pub fn fisher_information<R: Readout + ?Sized>(readout: &R, s0: ExpectationValue, spec: &QuadratureSpec) -> Result<f64> {
    let i = overlap_integral(readout, s0, spec)?;
    Ok((1.0 - i) / (1.0 - s0.value() * s0.value()))
}

/// Fisher information as the expected squared score,
/// `1/4 int (P(O|+) - P(O|-))^2 / P(O|s0) dO`.
pub fn fisher_information_score<R: Readout + ?Sized>(readout: &R, s0: ExpectationValue, spec: &QuadratureSpec) -> Result<f64> {
    interior(s0)?;
    let mix = MixtureDistribution::new(readout, s0);
    integrate_over(
        readout,
        |o| {
            let d = mix.pdf(o);
            if d > 0.0 {
                let diff = readout.pdf(o, QubitState::Plus) - readout.pdf(o, QubitState::Minus);
                0.25 * diff * diff / d
            } else {
                0.0
            }
        },
        spec,
    )
}

/// Normalized asymptotic mean squared error `N * zeta` of `method`.
pub fn asymptotic_mse<R: Readout + ?Sized>(
    readout: &R,
    s0: ExpectationValue,
    method: Method,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let s = s0.value();
    let w = s0.plus_weight();
    match method {
        Method::ThresholdedAverage => {
            let rates = readout.conditional_error_rates(readout.optimal_threshold()?);
            let (c_plus, c_minus) = bias_corrected_outcomes(&rates)?;
            let p_plus = w * (1.0 - rates.eps_plus) + (1.0 - w) * rates.eps_minus;
            Ok(p_plus * c_plus * c_plus + (1.0 - p_plus) * c_minus * c_minus - s * s)
        }
        Method::SoftAverage => {
            let m = conditional_moments(readout, spec)?;
            let a = m.scale();
            if a == 0.0 {
                return Err(Error::Uninformative("conditional means coincide (A = 0)"));
            }
            let second = w * m.second_plus + (1.0 - w) * m.second_minus;
            let mean = a * s + m.offset();
            Ok((second - mean * mean) / (a * a))
        }
        Method::SoftDecoded => {
            let i = overlap_integral(readout, s0, spec)?;
            if i >= 1.0 {
                return Err(Error::Uninformative("readout densities are identical (I = 1)"));
            }
            Ok((1.0 - s * s) / (1.0 - i))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::readout::{GaussianReadout, TabulatedReadout};
    use alloc::vec;

    fn s(v: f64) -> ExpectationValue {
        ExpectationValue::new(v).unwrap()
    }

    #[test]
    fn gaussian_closed_forms() {
        let spec = QuadratureSpec::default();
        for r in [0.5, 2.0, 6.0] {
            let g = GaussianReadout::new(r).unwrap();
            let eps = g.single_shot_error();
            for s0 in [0.0, 0.3, -0.7] {
                let ta = asymptotic_mse(&g, s(s0), Method::ThresholdedAverage, &spec).unwrap();
                let sa = asymptotic_mse(&g, s(s0), Method::SoftAverage, &spec).unwrap();
                let sd = asymptotic_mse(&g, s(s0), Method::SoftDecoded, &spec).unwrap();
                let want_ta = 1.0 / ((1.0 - 2.0 * eps) * (1.0 - 2.0 * eps)) - s0 * s0;
                let want_sa = 1.0 + 1.0 / r - s0 * s0;
                assert!((ta - want_ta).abs() < 1e-10 * want_ta, "{r} {s0}: {ta} {want_ta}");
                assert!((sa - want_sa).abs() < 1e-8 * want_sa, "{r} {s0}: {sa} {want_sa}");
                assert!(sd <= ta * (1.0 + 1e-8) && sd <= sa * (1.0 + 1e-8), "{r} {s0}");
            }
        }
        let g = GaussianReadout::new(2.0).unwrap();
        let ta = asymptotic_mse(&g, s(0.0), Method::ThresholdedAverage, &spec).unwrap();
        assert!((ta - 1.408).abs() < 5e-4, "{ta}");
    }

    #[test]
    fn overlap_matches_riemann_sum() {
        let g = GaussianReadout::new(2.0).unwrap();
        let got = overlap_integral(&g, s(0.0), &QuadratureSpec::default()).unwrap();
        let (lo, hi) = (-12.0, 12.0);
        let n = 1_000_000;
        let h = (hi - lo) / n as f64;
        let mut sum = 0.0;
        for k in 0..n {
            let o = lo + (k as f64 + 0.5) * h;
            let (p, m) = (g.pdf(o, QubitState::Plus), g.pdf(o, QubitState::Minus));
            sum += p * m / (0.5 * (p + m));
        }
        let oracle = sum * h;
        assert!((got - oracle).abs() < 1e-6 * oracle, "{got} {oracle}");
        assert!(got > 0.0 && got < 1.0);
    }

    #[test]
    fn overlap_extremes() {
        let spec = QuadratureSpec::default();
        let disjoint = TabulatedReadout::normalized(
            vec![0.0, 1.0, 1.5, 2.0, 3.0],
            vec![0.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0],
        )
        .unwrap();
        for s0 in [0.0, 0.6] {
            assert!(overlap_integral(&disjoint, s(s0), &spec).unwrap().abs() < 1e-12);
            let sd = asymptotic_mse(&disjoint, s(s0), Method::SoftDecoded, &spec).unwrap();
            assert!((sd - (1.0 - s0 * s0)).abs() < 1e-12);
            let f = fisher_information(&disjoint, s(s0), &spec).unwrap();
            assert!((f - 1.0 / (1.0 - s0 * s0)).abs() < 1e-12);
        }
        let same = TabulatedReadout::normalized(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert!((overlap_integral(&same, s(0.2), &spec).unwrap() - 1.0).abs() < 1e-9);
        assert!(fisher_information(&same, s(0.0), &spec).unwrap().abs() < 1e-9);
        assert!(overlap_integral(&same, s(1.0), &spec).is_err());
    }

    #[test]
    fn dual_fisher_forms_agree() {
        let spec = QuadratureSpec::default();
        let g = GaussianReadout::new(2.0).unwrap();
        let t = TabulatedReadout::normalized(
            vec![-2.0, -1.0, 0.0, 0.5, 1.0, 3.0],
            vec![0.0, 0.05, 0.4, 1.0, 0.6, 0.0],
            vec![0.2, 1.0, 0.5, 0.1, 0.0, 0.0],
        )
        .unwrap();
        for s0 in [-0.5, 0.0, 0.8] {
            let a = fisher_information(&g, s(s0), &spec).unwrap();
            let b = fisher_information_score(&g, s(s0), &spec).unwrap();
            assert!((a - b).abs() < 1e-6 * a, "{a} {b}");
            let a = fisher_information(&t, s(s0), &spec).unwrap();
            let b = fisher_information_score(&t, s(s0), &spec).unwrap();
            assert!((a - b).abs() < 1e-6 * a, "{a} {b}");
        }
    }

    #[test]
    fn soft_methods_converge_at_low_snr() {
        let spec = QuadratureSpec::default();
        let ratio = |r: f64| {
            let g = GaussianReadout::new(r).unwrap();
            let sa = asymptotic_mse(&g, s(0.0), Method::SoftAverage, &spec).unwrap();
            let sd = asymptotic_mse(&g, s(0.0), Method::SoftDecoded, &spec).unwrap();
            sa / sd
        };
        let ratios = [ratio(1.0), ratio(0.1), ratio(0.01)];
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2], "{ratios:?}");
        assert!((ratios[2] - 1.0).abs() < 0.02, "{ratios:?}");
    }
}
