//! Peak-signal readout.
//!
//! In state `|->` the detector signal sits at `-1`; in state `|+>` it is a
//! square pulse at `+1` that turns on after an exponentially distributed time
//! `t_i` and lasts an exponentially distributed duration. White noise is
//! added, the measurement window `tau_M` is cut into `N_b = floor(tau_M /
//! tau_b)` bins, and the outcome is the largest bin average.
//!
//! Noise calibration: a time average over a window `T` has variance
//! `<t_f - t_i> / (r T)`, so averaging over one mean pulse duration reproduces
//! the Gaussian readout with SNR `r`. Each bin average therefore has variance
//! `sigma_b^2 = <t_f - t_i> / (r tau_b)`.
//!
//! The tabulated distributions are built by conditioning on the pulse: given
//! `(t_i, t_f)`, the bin averages are independent Gaussians with known means,
//! so `P(O <= x | pulse)` is an exact product of normal CDFs. Only the pulse
//! timing is averaged by Monte Carlo. The ground state needs no sampling at
//! all: `P(O <= x | -) = Phi((x + 1) / sigma_b)^N_b`.

#[allow(unused_imports)] // needed without std; the lint misfires
use num_traits::Float;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{ConditionalErrorRates, QubitState, TabulatedReadout};
use crate::numerics::{normal_cdf, normal_pdf};
use crate::rng::{stream, Domain};
use crate::{Error, Executor, Result};

/// Physical parameters of the peak-signal process. Times share one unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakSignalParams {
    mean_turn_on: f64,
    mean_duration: f64,
    snr: f64,
    meas_time: f64,
    bin_time: f64,
}

impl PeakSignalParams {
    pub fn new(mean_turn_on: f64, mean_duration: f64, snr: f64, meas_time: f64, bin_time: f64) -> Result<Self> {
        let all = [mean_turn_on, mean_duration, snr, meas_time, bin_time];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain("peak-signal parameters must be positive and finite"));
        }
        let params = Self {
            mean_turn_on,
            mean_duration,
            snr,
            meas_time,
            bin_time,
        };
        if params.n_bins() == 0 {
            return Err(Error::Domain("measurement time must hold at least one bin"));
        }
        Ok(params)
    }

    /// Same process with a different measurement window and bin length.
    pub fn with_times(&self, meas_time: f64, bin_time: f64) -> Result<Self> {
        Self::new(self.mean_turn_on, self.mean_duration, self.snr, meas_time, bin_time)
    }

    pub fn with_snr(&self, snr: f64) -> Result<Self> {
        Self::new(self.mean_turn_on, self.mean_duration, snr, self.meas_time, self.bin_time)
    }

    pub fn mean_turn_on(&self) -> f64 {
        self.mean_turn_on
    }
    pub fn mean_duration(&self) -> f64 {
        self.mean_duration
    }
    pub fn snr(&self) -> f64 {
        self.snr
    }
    pub fn meas_time(&self) -> f64 {
        self.meas_time
    }
    pub fn bin_time(&self) -> f64 {
        self.bin_time
    }

    pub fn n_bins(&self) -> usize {
        // tolerate tau_M / tau_b landing a hair below an integer
        (self.meas_time / self.bin_time * (1.0 + 1e-12)).floor() as usize
    }

    /// Standard deviation of one bin average.
    pub fn bin_sigma(&self) -> f64 {
        (self.mean_duration / (self.snr * self.bin_time)).sqrt()
    }

    fn window(&self) -> f64 {
        self.n_bins() as f64 * self.bin_time
    }

    fn draw_pulse<R: Rng + ?Sized>(&self, rng: &mut R) -> Pulse {
        let a: f64 = rng.sample(Exp1);
        let b: f64 = rng.sample(Exp1);
        Pulse {
            turn_on: self.mean_turn_on * a,
            duration: self.mean_duration * b,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pulse {
    turn_on: f64,
    duration: f64,
}

/// Mean of every bin given a pulse, grouped by value: `ground` bins at `-1`,
/// `full` bins at `+1`, and up to two partially covered edge bins.
#[derive(Clone, Copy, Debug, PartialEq)]
struct BinProfile {
    ground: u32,
    full: u32,
    partial: [f64; 2],
    n_partial: u8,
}

impl BinProfile {
    fn new(params: &PeakSignalParams, pulse: Pulse) -> Self {
        let n_bins = params.n_bins();
        let tau = params.bin_time;
        let start = pulse.turn_on;
        let end = (pulse.turn_on + pulse.duration).min(params.meas_time).min(params.window());
        let mut profile = Self {
            ground: n_bins as u32,
            full: 0,
            partial: [0.0; 2],
            n_partial: 0,
        };
        if !(end > start) {
            return profile;
        }
        let first = ((start / tau) as usize).min(n_bins - 1);
        let last = (((end / tau).ceil() as usize).max(1) - 1).min(n_bins - 1);
        let overlap = |l: usize| {
            let lo = (l as f64 * tau).max(start);
            let hi = ((l + 1) as f64 * tau).min(end);
            (hi - lo).max(0.0)
        };
        let mut classify = |cover: f64| {
            if cover >= tau * (1.0 - 1e-12) {
                profile.full += 1;
                profile.ground -= 1;
            } else if cover > 0.0 {
                profile.partial[profile.n_partial as usize] = -1.0 + 2.0 * cover / tau;
                profile.n_partial += 1;
                profile.ground -= 1;
            }
        };
        classify(overlap(first));
        if last > first {
            classify(overlap(last));
            let interior = (last - first - 1) as u32;
            profile.full += interior;
            profile.ground -= interior;
        }
        profile
    }

    fn means(&self) -> impl Iterator<Item = f64> + '_ {
        core::iter::repeat_n(-1.0, self.ground as usize)
            .chain(core::iter::repeat_n(1.0, self.full as usize))
            .chain(self.partial[..self.n_partial as usize].iter().copied())
    }
}

/// Draws one outcome of the peak-signal process by simulating every bin.
pub fn simulate_peak_trace<R: Rng + ?Sized>(params: &PeakSignalParams, state: QubitState, rng: &mut R) -> f64 {
    let sigma = params.bin_sigma();
    let profile = match state {
        QubitState::Minus => BinProfile::new(
            params,
            Pulse {
                turn_on: f64::INFINITY,
                duration: 0.0,
            },
        ),
        QubitState::Plus => BinProfile::new(params, params.draw_pulse(rng)),
    };
    profile
        .means()
        .map(|mean| {
            let z: f64 = rng.sample(StandardNormal);
            mean + sigma * z
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// CDF and density of the largest of a few groups of iid Gaussians.
///
/// Each factor is `(Phi, phi / sigma, multiplicity)`.
fn max_cdf_pdf(factors: &[(f64, f64, u32)]) -> (f64, f64) {
    let powers: [f64; 4] = core::array::from_fn(|k| factors.get(k).map_or(1.0, |f| f.0.powi(f.2 as i32)));
    let cdf = powers.iter().product();
    let mut pdf = 0.0;
    for (k, &(phi_cdf, density, m)) in factors.iter().enumerate() {
        if m == 0 || density == 0.0 {
            continue;
        }
        let mut term = f64::from(m) * density * phi_cdf.powi(m as i32 - 1);
        for (j, p) in powers.iter().enumerate().take(factors.len()) {
            if j != k {
                term *= p;
            }
        }
        pdf += term;
    }
    (cdf, pdf)
}

/// Pulse-timing ensemble of the peak-signal process at fixed parameters.
#[derive(Clone, Debug)]
pub struct PeakEnsemble {
    params: PeakSignalParams,
    profiles: Vec<BinProfile>,
    misses: usize,
    draws: usize,
}

impl PeakEnsemble {
    /// Draws `n_samples` pulses from the stream keyed by `seed`. The pulse
    /// draws depend only on `seed` and the timing means, so ensembles for
    /// different windows and bin times share them.
    pub fn new(params: PeakSignalParams, n_samples: usize, seed: u64) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::Domain("pulse ensemble needs at least one sample"));
        }
        let mut rng = stream(seed, Domain::PulseEnsemble, 0);
        let pulses: Vec<Pulse> = (0..n_samples).map(|_| params.draw_pulse(&mut rng)).collect();
        Ok(Self::from_pulses(params, &pulses))
    }

    fn from_pulses(params: PeakSignalParams, pulses: &[Pulse]) -> Self {
        let n_bins = params.n_bins() as u32;
        let mut profiles = Vec::new();
        let mut misses = 0;
        for &pulse in pulses {
            let profile = BinProfile::new(&params, pulse);
            if profile.ground == n_bins {
                misses += 1;
            } else {
                profiles.push(profile);
            }
        }
        Self {
            params,
            profiles,
            misses,
            draws: pulses.len(),
        }
    }

    pub fn params(&self) -> &PeakSignalParams {
        &self.params
    }

    /// Pulse draws that overlap the measurement window.
    pub fn overlapping(&self) -> usize {
        self.profiles.len()
    }

    pub fn draws(&self) -> usize {
        self.draws
    }

    /// `(P(O <= x | state), P(x | state))`.
    pub fn cdf_pdf(&self, x: f64, state: QubitState) -> (f64, f64) {
        let sigma = self.params.bin_sigma();
        let n_bins = self.params.n_bins() as u32;
        let zg = (x + 1.0) / sigma;
        let ground = (normal_cdf(zg), normal_pdf(zg) / sigma);
        let ground_only = max_cdf_pdf(&[(ground.0, ground.1, n_bins)]);
        if state == QubitState::Minus {
            return ground_only;
        }
        let zf = (x - 1.0) / sigma;
        let full = (normal_cdf(zf), normal_pdf(zf) / sigma);
        let (mut cdf, mut pdf) = (self.misses as f64 * ground_only.0, self.misses as f64 * ground_only.1);
        let mut factors = [(0.0, 0.0, 0u32); 4];
        for p in &self.profiles {
            factors[0] = (ground.0, ground.1, p.ground);
            factors[1] = (full.0, full.1, p.full);
            for k in 0..p.n_partial as usize {
                let z = (x - p.partial[k]) / sigma;
                factors[2 + k] = (normal_cdf(z), normal_pdf(z) / sigma, 1);
            }
            let (c, d) = max_cdf_pdf(&factors[..2 + p.n_partial as usize]);
            cdf += c;
            pdf += d;
        }
        let n = self.draws as f64;
        (cdf / n, pdf / n)
    }

    pub fn cdf(&self, x: f64, state: QubitState) -> f64 {
        let sigma = self.params.bin_sigma();
        let ground = normal_cdf((x + 1.0) / sigma);
        let ground_only = ground.powi(self.params.n_bins() as i32);
        if state == QubitState::Minus {
            return ground_only;
        }
        let full = normal_cdf((x - 1.0) / sigma);
        let mut total = self.misses as f64 * ground_only;
        for p in &self.profiles {
            let mut c = ground.powi(p.ground as i32) * full.powi(p.full as i32);
            for &mean in &p.partial[..p.n_partial as usize] {
                c *= normal_cdf((x - mean) / sigma);
            }
            total += c;
        }
        total / self.draws as f64
    }

    /// Average single-shot error `(eps_+ + eps_-) / 2` at threshold `nu`.
    pub fn average_error(&self, nu: f64) -> f64 {
        0.5 * (self.cdf(nu, QubitState::Plus) + 1.0 - self.cdf(nu, QubitState::Minus))
    }

    pub fn error_rates(&self, nu: f64) -> ConditionalErrorRates {
        ConditionalErrorRates {
            eps_plus: self.cdf(nu, QubitState::Plus).clamp(0.0, 1.0),
            eps_minus: (1.0 - self.cdf(nu, QubitState::Minus)).clamp(0.0, 1.0),
            threshold: nu,
        }
    }

    /// Smallest `x` with `P(O <= x | state) >= p`, by bisection.
    pub fn quantile(&self, p: f64, state: QubitState) -> f64 {
        let sigma = self.params.bin_sigma();
        let (mut lo, mut hi) = (-1.0 - 40.0 * sigma, 1.0 + 40.0 * sigma);
        let resolution = 1e-12 * (hi - lo);
        while hi - lo > resolution {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid, state) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Threshold minimizing the average error: scan `points` values between
    /// the ground-signal level and the upper tail of the excited state, then
    /// refine around the best one by golden-section search.
    pub fn optimal_threshold(&self, points: usize) -> (f64, f64) {
        let points = points.max(3);
        let lo = -1.0;
        let hi = self.quantile(1.0 - 1e-3, QubitState::Plus).max(lo + 1e-6);
        let step = (hi - lo) / (points - 1) as f64;
        let (best, _) = (0..points)
            .map(|i| (i, self.average_error(lo + step * i as f64)))
            .fold((0, f64::INFINITY), |b, (i, e)| if e < b.1 { (i, e) } else { b });
        let left = lo + step * best.saturating_sub(1) as f64;
        let right = lo + step * (best + 1).min(points - 1) as f64;
        let m = crate::numerics::maximize_concave(|x| -self.average_error(x), left, right, 1e-7 * (1.0 + right.abs()));
        (m.argmax, -m.value)
    }
}

/// Settings for [`tabulate_peak_distributions`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TabulationSettings {
    /// Pulse-timing draws averaged over for the excited state.
    pub n_samples: usize,
    /// Points of the shared outcome grid.
    pub grid_size: usize,
    /// Probability weight cut from each tail of each density.
    pub tail_weight: f64,
    /// Points of each inverse-CDF table.
    pub inverse_points: usize,
    pub seed: u64,
}

impl Default for TabulationSettings {
    fn default() -> Self {
        Self {
            n_samples: 100_000,
            grid_size: 1024,
            tail_weight: 1e-7,
            inverse_points: super::tabulated::DEFAULT_INVERSE_POINTS,
            seed: 0,
        }
    }
}

/// Non-fatal problems found while tabulating.
#[derive(Clone, Debug, PartialEq)]
pub enum TabulationWarning {
    /// Fewer than ten pulse draws per grid cell on average.
    SparseSamples { n_samples: usize, grid_size: usize },
    /// Fewer than ten pulse draws overlapped the measurement window.
    FewOverlappingPulses { overlapping: usize },
    /// The grid is too coarse: the trapezoid mass before renormalization is
    /// off from the retained probability by more than `1e-3`.
    CoarseGrid { state: QubitState, mass_defect: f64 },
}

/// Result of [`tabulate_peak_distributions`].
#[derive(Clone, Debug)]
pub struct PeakTabulation {
    pub readout: TabulatedReadout,
    pub params: PeakSignalParams,
    pub settings: TabulationSettings,
    /// Probability cut below and above the grid for `|+>`, before renormalization.
    pub lost_plus: (f64, f64),
    /// Same for `|->`.
    pub lost_minus: (f64, f64),
    pub warnings: Vec<TabulationWarning>,
}

impl PeakTabulation {
    pub fn total_lost_weight(&self, state: QubitState) -> f64 {
        let (a, b) = match state {
            QubitState::Plus => self.lost_plus,
            QubitState::Minus => self.lost_minus,
        };
        a + b
    }
}

/// Tabulates `P(O|+-)` of the peak-signal process.
///
/// Each density's tails are cut where the excluded weight reaches
/// `tail_weight`; the grid spans the union of both retained intervals, so no
/// tail loses more than that. Densities are then renormalized on the grid and
/// the CDF and inverse-CDF tables built from them.
pub fn tabulate_peak_distributions<E: Executor>(
    params: &PeakSignalParams,
    settings: &TabulationSettings,
    exec: &E,
) -> Result<PeakTabulation> {
    if settings.grid_size < 2 {
        return Err(Error::Domain("tabulation grid needs at least two points"));
    }
    if !(settings.tail_weight > 0.0 && settings.tail_weight < 0.5) {
        return Err(Error::Domain("tail weight must lie in (0, 0.5)"));
    }
    let ensemble = PeakEnsemble::new(*params, settings.n_samples, settings.seed)?;
    let tail = settings.tail_weight;
    let lo = ensemble
        .quantile(tail, QubitState::Minus)
        .min(ensemble.quantile(tail, QubitState::Plus));
    let hi = ensemble
        .quantile(1.0 - tail, QubitState::Minus)
        .max(ensemble.quantile(1.0 - tail, QubitState::Plus));
    let n = settings.grid_size;
    let grid: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect();

    let values = exec.map_indexed(n as u64, |i| {
        let x = grid[i as usize];
        (
            ensemble.cdf_pdf(x, QubitState::Plus).1,
            ensemble.cdf_pdf(x, QubitState::Minus).1,
        )
    });
    let (pdf_plus, pdf_minus): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();

    let lost = |state| (ensemble.cdf(lo, state), 1.0 - ensemble.cdf(hi, state));
    let lost_plus = lost(QubitState::Plus);
    let lost_minus = lost(QubitState::Minus);

    let mut warnings = Vec::new();
    if settings.n_samples < 10 * n {
        warnings.push(TabulationWarning::SparseSamples {
            n_samples: settings.n_samples,
            grid_size: n,
        });
    }
    if ensemble.overlapping() < 10 {
        warnings.push(TabulationWarning::FewOverlappingPulses {
            overlapping: ensemble.overlapping(),
        });
    }
    for (state, pdf, cut) in [
        (QubitState::Plus, &pdf_plus, lost_plus),
        (QubitState::Minus, &pdf_minus, lost_minus),
    ] {
        let mass: f64 = grid
            .windows(2)
            .zip(pdf.windows(2))
            .map(|(x, p)| 0.5 * (x[1] - x[0]) * (p[0] + p[1]))
            .sum();
        let mass_defect = mass - (1.0 - cut.0 - cut.1);
        if mass_defect.abs() > 1e-3 {
            warnings.push(TabulationWarning::CoarseGrid { state, mass_defect });
        }
    }

    let readout = TabulatedReadout::normalized_with_inverse_points(grid, pdf_plus, pdf_minus, settings.inverse_points)?;
    Ok(PeakTabulation {
        readout,
        params: *params,
        settings: *settings,
        lost_plus,
        lost_minus,
        warnings,
    })
}

/// Candidate measurement windows and bin times for
/// [`optimize_peak_parameters`].
#[derive(Clone, Debug, PartialEq)]
pub struct PeakSearchGrid {
    pub meas_times: Vec<f64>,
    pub bin_times: Vec<f64>,
    /// Pulse draws per candidate (shared by all candidates).
    pub n_samples: usize,
    /// Threshold scan resolution per candidate.
    pub scan_points: usize,
}

impl PeakSearchGrid {
    /// `tau_M / <t_i>` in `{2, 4, ..., 20}` and `tau_b / <t_i>` on 24
    /// log-spaced points over `[0.05, 20]`. The bin range reaches `tau_M`
    /// because at low SNR the best readout is a single bin spanning the
    /// whole window.
    pub fn default_for(params: &PeakSignalParams) -> Self {
        let unit = params.mean_turn_on();
        let meas_times = (1..=10).map(|k| 2.0 * k as f64 * unit).collect();
        let (a, b) = (0.05f64.ln(), 20.0f64.ln());
        let bin_times = (0..24).map(|k| (a + (b - a) * k as f64 / 23.0).exp() * unit).collect();
        Self {
            meas_times,
            bin_times,
            n_samples: 10_000,
            scan_points: 64,
        }
    }

    /// Only the given window and bin time.
    pub fn single(meas_time: f64, bin_time: f64) -> Self {
        Self {
            meas_times: alloc::vec![meas_time],
            bin_times: alloc::vec![bin_time],
            n_samples: 10_000,
            scan_points: 64,
        }
    }
}

/// Outcome of [`optimize_peak_parameters`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakOptimum {
    pub params: PeakSignalParams,
    pub threshold: f64,
    pub rates: ConditionalErrorRates,
}

/// Grid search over `(tau_M, tau_b)` minimizing the single-shot average
/// error at the optimal threshold. Candidates with `tau_b > tau_M` are
/// skipped. All candidates share the same pulse draws, so the comparison is
/// free of independent sampling noise.
pub fn optimize_peak_parameters<E: Executor>(
    base: &PeakSignalParams,
    grid: &PeakSearchGrid,
    seed: u64,
    exec: &E,
) -> Result<PeakOptimum> {
    if grid.n_samples == 0 {
        return Err(Error::Domain("search needs at least one pulse sample"));
    }
    let candidates: Vec<PeakSignalParams> = grid
        .meas_times
        .iter()
        .flat_map(|&m| grid.bin_times.iter().map(move |&b| (m, b)))
        .filter_map(|(m, b)| base.with_times(m, b).ok())
        .collect();
    if candidates.is_empty() {
        return Err(Error::Domain("search grid has no valid (tau_M, tau_b) candidate"));
    }
    let mut rng = stream(seed, Domain::PulseEnsemble, 0);
    let pulses: Vec<Pulse> = (0..grid.n_samples).map(|_| base.draw_pulse(&mut rng)).collect();

    let scores = exec.map_indexed(candidates.len() as u64, |i| {
        let ensemble = PeakEnsemble::from_pulses(candidates[i as usize], &pulses);
        let (nu, err) = ensemble.optimal_threshold(grid.scan_points);
        (nu, err, ensemble.error_rates(nu))
    });
    let (best, (threshold, _, rates)) = scores
        .into_iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, (f64, f64, ConditionalErrorRates))>, (i, s)| match acc {
            Some((_, b)) if b.1 <= s.1 => acc,
            _ => Some((i, s)),
        })
        .expect("candidates is non-empty");
    Ok(PeakOptimum {
        params: candidates[best],
        threshold,
        rates,
    })
}
