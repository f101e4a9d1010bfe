//! Closed-form error rates of the repetition code over the Gaussian channel.

use crate::numerics::{erfc, ln_gamma, regularized_incomplete_beta};
use crate::{Error, Result};

fn check(r: f64, n: usize) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain("signal-to-noise ratio must be positive and finite"));
    }
    if n == 0 {
        return Err(Error::Domain("the code needs at least one qubit"));
    }
    Ok(())
}

/// Majority-vote error rate `I_eps((M+1)/2, (M+1)/2)` with
/// `eps = erfc(sqrt(r/2))/2`, where `M` is `n` rounded down to an odd number
/// (a tie among an even number of votes is settled by a coin).
pub fn gaussian_majority_error(r: f64, n: usize) -> Result<f64> {
    check(r, n)?;
    let m = if n % 2 == 1 { n } else { n - 1 };
    let eps = 0.5 * erfc(libm::sqrt(0.5 * r));
    let k = 0.5 * (m as f64 + 1.0);
    regularized_incomplete_beta(eps, k, k)
}

/// Soft-decoding error rate `erfc(sqrt(n r / 2)) / 2`.
pub fn gaussian_soft_error(r: f64, n: usize) -> Result<f64> {
    check(r, n)?;
    Ok(0.5 * erfc(libm::sqrt(0.5 * n as f64 * r)))
}

/// Large-`r` form of [`gaussian_majority_error`] for odd `n`:
/// `C(n, (n+1)/2) (2 pi r)^{-(n+1)/4} exp(-(n+1) r / 4)`.
pub fn gaussian_majority_error_asymptotic(r: f64, n: usize) -> Result<f64> {
    check(r, n)?;
    if n.is_multiple_of(2) {
        return Err(Error::Domain("asymptotic majority-vote rate needs an odd qubit count"));
    }
    let nf = n as f64;
    let k = 0.5 * (nf + 1.0);
    let ln_binom = ln_gamma(nf + 1.0) - ln_gamma(k + 1.0) - ln_gamma(nf - k + 1.0);
    let q = 0.25 * (nf + 1.0);
    Ok(libm::exp(ln_binom - q * libm::log(2.0 * core::f64::consts::PI * r) - q * r))
}

/// Large-`r` form of [`gaussian_soft_error`]: `exp(-n r / 2) / sqrt(2 pi n r)`.
pub fn gaussian_soft_error_asymptotic(r: f64, n: usize) -> Result<f64> {
    check(r, n)?;
    let x = n as f64 * r;
    Ok(libm::exp(-0.5 * x) / libm::sqrt(2.0 * core::f64::consts::PI * x))
}

/// Soft-decoding qubit count matching majority vote over `n_c` qubits, to
/// subleading order in large `r`: `(n_c+1)/2 + (n_c-1)/2 * ln(r)/r`.
pub fn asymptotic_soft_qubit_count(n_c: usize, r: f64) -> Result<f64> {
    check(r, n_c)?;
    if n_c.is_multiple_of(2) {
        return Err(Error::Domain("majority-vote qubit count must be odd"));
    }
    let n = n_c as f64;
    Ok(0.5 * (n + 1.0) + 0.5 * (n - 1.0) * libm::log(r) / r)
}

/// Smallest `n` in `1..=n_max` with `error(n) <= target`.
pub fn min_qubits_to_reach<F>(mut error: F, target: f64, n_max: usize) -> Result<usize>
where
    F: FnMut(usize) -> Result<f64>,
{
    for n in 1..=n_max {
        if error(n)? <= target {
            return Ok(n);
        }
    }
    Err(Error::Unreachable { target, n_max })
}
