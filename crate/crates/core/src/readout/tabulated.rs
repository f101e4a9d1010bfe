use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::{QubitState, Readout};
use crate::{Error, Result};

/// Allowed deviation of a stored density's trapezoid mass from one.
pub(crate) const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Default resolution of the inverse-CDF tables.
pub const DEFAULT_INVERSE_POINTS: usize = 16_385;

/// Readout densities tabulated on a shared, strictly increasing grid.
///
/// Between grid nodes the densities are linear; outside the grid they vanish.
/// The CDF tables are the exact integrals of those piecewise-linear
/// densities, and sampling goes through a piecewise-linear inverse CDF
/// stored on a uniform probability grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedReadout {
    grid: Vec<f64>,
    pdf_plus: Vec<f64>,
    pdf_minus: Vec<f64>,
    cdf_plus: Vec<f64>,
    cdf_minus: Vec<f64>,
    inv_cdf_plus: Vec<f64>,
    inv_cdf_minus: Vec<f64>,
}

fn trapezoid(grid: &[f64], pdf: &[f64]) -> f64 {
    grid.windows(2)
        .zip(pdf.windows(2))
        .map(|(x, p)| 0.5 * (x[1] - x[0]) * (p[0] + p[1]))
        .sum()
}

fn cumulative(grid: &[f64], pdf: &[f64]) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    cdf.push(0.0);
    for (x, p) in grid.windows(2).zip(pdf.windows(2)) {
        acc += 0.5 * (x[1] - x[0]) * (p[0] + p[1]);
        cdf.push(acc.min(1.0));
    }
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    cdf
}

/// Exact inverse of the integrated piecewise-linear density.
fn invert(grid: &[f64], pdf: &[f64], cdf: &[f64], p: f64) -> f64 {
    if p <= 0.0 {
        let first = cdf.partition_point(|&c| c <= 0.0);
        return grid[first.saturating_sub(1)];
    }
    let idx = cdf.partition_point(|&c| c < p);
    if idx == 0 {
        return grid[0];
    }
    if idx >= grid.len() {
        return grid[grid.len() - 1];
    }
    let i = idx - 1;
    let h = grid[i + 1] - grid[i];
    let d = p - cdf[i];
    let a = pdf[i];
    let slope = (pdf[i + 1] - pdf[i]) / h;
    let t = if slope.abs() * d <= 1e-14 * a * a {
        d / a
    } else {
        let disc = (a * a + 2.0 * slope * d).max(0.0);
        2.0 * d / (a + libm::sqrt(disc))
    };
    grid[i] + t.clamp(0.0, h)
}

fn inverse_table(grid: &[f64], pdf: &[f64], cdf: &[f64], points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    let mut table: Vec<f64> = (0..points)
        .map(|k| invert(grid, pdf, cdf, k as f64 / last))
        .collect();
    for k in 1..table.len() {
        if table[k] < table[k - 1] {
            table[k] = table[k - 1];
        }
    }
    table
}

fn validate_density(grid: &[f64], pdf: &[f64], name: &str) -> Result<f64> {
    if pdf.len() != grid.len() {
        return Err(Error::InvalidTable(format!(
            "{name} has {} values for a grid of {}",
            pdf.len(),
            grid.len()
        )));
    }
    if let Some(bad) = pdf.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidTable(format!("{name} contains invalid density {bad}")));
    }
    let mass = trapezoid(grid, pdf);
    if !(mass > 0.0) {
        return Err(Error::InvalidTable(format!("{name} has no probability mass")));
    }
    Ok(mass)
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidTable("grid needs at least two points".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidTable("grid contains non-finite values".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTable("grid is not strictly increasing".into()));
    }
    Ok(())
}

impl TabulatedReadout {
    /// Builds a readout from densities that are already normalized: each
    /// trapezoid mass must be within `1e-6` of one.
    pub fn new(grid: Vec<f64>, pdf_plus: Vec<f64>, pdf_minus: Vec<f64>) -> Result<Self> {
        Self::build(grid, pdf_plus, pdf_minus, true, DEFAULT_INVERSE_POINTS)
    }

    /// Builds a readout after rescaling each density to unit trapezoid mass.
    pub fn normalized(grid: Vec<f64>, pdf_plus: Vec<f64>, pdf_minus: Vec<f64>) -> Result<Self> {
        Self::build(grid, pdf_plus, pdf_minus, false, DEFAULT_INVERSE_POINTS)
    }

    /// Like [`TabulatedReadout::normalized`] with a custom number of
    /// inverse-CDF points (at least 2).
    pub fn normalized_with_inverse_points(
        grid: Vec<f64>,
        pdf_plus: Vec<f64>,
        pdf_minus: Vec<f64>,
        inverse_points: usize,
    ) -> Result<Self> {
        if inverse_points < 2 {
            return Err(Error::InvalidTable("inverse CDF needs at least two points".into()));
        }
        Self::build(grid, pdf_plus, pdf_minus, false, inverse_points)
    }

    fn build(
        grid: Vec<f64>,
        mut pdf_plus: Vec<f64>,
        mut pdf_minus: Vec<f64>,
        strict: bool,
        inverse_points: usize,
    ) -> Result<Self> {
        validate_grid(&grid)?;
        for (pdf, name) in [(&mut pdf_plus, "pdf_plus"), (&mut pdf_minus, "pdf_minus")] {
            let mass = validate_density(&grid, pdf, name)?;
            if strict && (mass - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::InvalidTable(format!(
                    "{name} integrates to {mass}, not 1 within {NORMALIZATION_TOLERANCE:e}"
                )));
            }
            pdf.iter_mut().for_each(|v| *v /= mass);
        }
        let cdf_plus = cumulative(&grid, &pdf_plus);
        let cdf_minus = cumulative(&grid, &pdf_minus);
        let inv_cdf_plus = inverse_table(&grid, &pdf_plus, &cdf_plus, inverse_points);
        let inv_cdf_minus = inverse_table(&grid, &pdf_minus, &cdf_minus, inverse_points);
        Ok(Self {
            grid,
            pdf_plus,
            pdf_minus,
            cdf_plus,
            cdf_minus,
            inv_cdf_plus,
            inv_cdf_minus,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn pdf_table(&self, state: QubitState) -> &[f64] {
        match state {
            QubitState::Plus => &self.pdf_plus,
            QubitState::Minus => &self.pdf_minus,
        }
    }

    pub fn cdf_table(&self, state: QubitState) -> &[f64] {
        match state {
            QubitState::Plus => &self.cdf_plus,
            QubitState::Minus => &self.cdf_minus,
        }
    }

    /// Inverse-CDF values at probabilities `k / (len - 1)`.
    pub fn inverse_cdf_table(&self, state: QubitState) -> &[f64] {
        match state {
            QubitState::Plus => &self.inv_cdf_plus,
            QubitState::Minus => &self.inv_cdf_minus,
        }
    }

    /// Trapezoid mass of the stored density (one up to rounding).
    pub fn mass(&self, state: QubitState) -> f64 {
        trapezoid(&self.grid, self.pdf_table(state))
    }

    /// Interpolated inverse CDF `Q^-1(p)`; this is what [`Readout::sample`]
    /// evaluates at a uniform draw.
    pub fn quantile(&self, p: f64, state: QubitState) -> f64 {
        let table = self.inverse_cdf_table(state);
        let pos = p.clamp(0.0, 1.0) * (table.len() - 1) as f64;
        let k = (pos as usize).min(table.len() - 2);
        let t = pos - k as f64;
        table[k] + t * (table[k + 1] - table[k])
    }

    /// Exact inverse of the stored CDF (no interpolation table).
    pub fn exact_quantile(&self, p: f64, state: QubitState) -> f64 {
        invert(&self.grid, self.pdf_table(state), self.cdf_table(state), p)
    }

    fn average_error_at(&self, x: f64) -> f64 {
        0.5 * (self.cdf(x, QubitState::Plus) + 1.0 - self.cdf(x, QubitState::Minus))
    }
}

impl Readout for TabulatedReadout {
    fn pdf(&self, outcome: f64, state: QubitState) -> f64 {
        let grid = &self.grid;
        if !(outcome >= grid[0] && outcome <= grid[grid.len() - 1]) {
            return 0.0;
        }
        let pdf = self.pdf_table(state);
        let idx = grid.partition_point(|&x| x <= outcome).clamp(1, grid.len() - 1);
        let (x0, x1) = (grid[idx - 1], grid[idx]);
        let t = (outcome - x0) / (x1 - x0);
        pdf[idx - 1] + t * (pdf[idx] - pdf[idx - 1])
    }

    fn cdf(&self, outcome: f64, state: QubitState) -> f64 {
        let grid = &self.grid;
        if outcome <= grid[0] {
            return 0.0;
        }
        if outcome >= grid[grid.len() - 1] {
            return 1.0;
        }
        let pdf = self.pdf_table(state);
        let cdf = self.cdf_table(state);
        let i = grid.partition_point(|&x| x <= outcome) - 1;
        let h = grid[i + 1] - grid[i];
        let t = outcome - grid[i];
        let slope = (pdf[i + 1] - pdf[i]) / h;
        (cdf[i] + pdf[i] * t + 0.5 * slope * t * t).min(1.0)
    }

    fn sample<R: Rng + ?Sized>(&self, state: QubitState, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>(), state)
    }

    fn support(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    fn breakpoints(&self) -> Option<&[f64]> {
        Some(&self.grid)
    }

    fn optimal_threshold(&self) -> Result<f64> {
        let diff = |i: usize| self.pdf_plus[i] - self.pdf_minus[i];
        let mut best: Option<(f64, f64)> = None;
        let mut consider = |x: f64| {
            let err = self.average_error_at(x);
            if best.is_none_or(|(_, e)| err < e) {
                best = Some((x, err));
            }
        };
        // The average error decreases while P(O|+) < P(O|-) and increases
        // after, so its minima sit at upward crossings of the difference.
        for i in 0..self.grid.len() - 1 {
            let (d0, d1) = (diff(i), diff(i + 1));
            if d0 < 0.0 && d1 > 0.0 {
                let t = d0 / (d0 - d1);
                consider(self.grid[i] + t * (self.grid[i + 1] - self.grid[i]));
            } else if d0 == 0.0 && d1 > 0.0 && i > 0 && diff(i - 1) < 0.0 {
                consider(self.grid[i]);
            }
        }
        best.map(|(x, _)| x)
            .ok_or(Error::NoCrossing("P(O|+) - P(O|-) never changes sign from negative to positive on the grid"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::readout::GaussianReadout;
    use crate::rng::{stream, Domain};

    fn gaussian_table(r: f64, points: usize, shift: f64) -> TabulatedReadout {
        let g = GaussianReadout::new(r).unwrap();
        let (lo, hi) = g.support();
        let grid: Vec<f64> = (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64 + shift)
            .collect();
        let plus = grid.iter().map(|&x| g.pdf(x - shift, QubitState::Plus)).collect();
        let minus = grid.iter().map(|&x| g.pdf(x - shift, QubitState::Minus)).collect();
        TabulatedReadout::normalized(grid, plus, minus).unwrap()
    }

    #[test]
    fn invariants_hold() {
        let t = gaussian_table(2.0, 801, 0.0);
        for state in [QubitState::Plus, QubitState::Minus] {
            assert!((t.mass(state) - 1.0).abs() < 1e-12);
            let cdf = t.cdf_table(state);
            assert_eq!(cdf[0], 0.0);
            assert_eq!(*cdf.last().unwrap(), 1.0);
            assert!(cdf.windows(2).all(|w| w[1] >= w[0]));
            assert!(t.inverse_cdf_table(state).windows(2).all(|w| w[1] >= w[0]));
            for k in 1..200 {
                let p = k as f64 / 200.0;
                assert!((t.cdf(t.quantile(p, state), state) - p).abs() < 1e-6);
                assert!((t.cdf(t.exact_quantile(p, state), state) - p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn median_is_table_midpoint() {
        let t = gaussian_table(2.0, 801, 0.0);
        let median = t.quantile(0.5, QubitState::Minus);
        assert!((t.cdf(median, QubitState::Minus) - 0.5).abs() < 1e-12);
        assert!((median + 1.0).abs() < 1e-3);
    }

    #[test]
    fn gaussian_table_threshold_is_zero() {
        let t = gaussian_table(2.0, 801, 0.0);
        let step = t.grid()[1] - t.grid()[0];
        assert!(t.optimal_threshold().unwrap().abs() <= step);
        // also when zero is not a grid node
        let t = gaussian_table(2.0, 800, 0.0);
        assert!(t.optimal_threshold().unwrap().abs() <= step);
        let rates = t.conditional_error_rates(0.0);
        assert!((rates.eps_plus - 0.0786).abs() < 1e-4);
    }

    #[test]
    fn strict_constructor_checks_normalization() {
        let grid = alloc::vec![0.0, 1.0, 2.0];
        let ok = alloc::vec![0.0, 1.0, 0.0];
        assert!(TabulatedReadout::new(grid.clone(), ok.clone(), ok.clone()).is_ok());
        let heavy = alloc::vec![0.0, 1.1, 0.0];
        assert!(matches!(
            TabulatedReadout::new(grid.clone(), heavy, ok.clone()),
            Err(Error::InvalidTable(_))
        ));
        assert!(TabulatedReadout::new(alloc::vec![0.0, 0.0, 1.0], ok.clone(), ok.clone()).is_err());
        assert!(TabulatedReadout::new(grid.clone(), alloc::vec![0.0, -1.0, 0.0], ok.clone()).is_err());
        assert!(TabulatedReadout::new(grid, alloc::vec![0.0, 1.0], ok).is_err());
    }

    #[test]
    fn no_crossing_is_reported() {
        let grid = alloc::vec![0.0, 1.0, 2.0, 3.0];
        let plus = alloc::vec![0.0, 0.5, 0.5, 0.0];
        let t = TabulatedReadout::normalized(grid, plus.clone(), plus).unwrap();
        assert!(matches!(t.optimal_threshold(), Err(Error::NoCrossing(_))));
    }

    #[test]
    fn degenerate_thresholds_and_outside_support() {
        let t = gaussian_table(2.0, 401, 0.0);
        let r = t.conditional_error_rates(-100.0);
        assert_eq!((r.eps_plus, r.eps_minus), (0.0, 1.0));
        assert_eq!(t.pdf(100.0, QubitState::Plus), 0.0);
        assert_eq!(t.log_pdf(-100.0, QubitState::Plus), f64::NEG_INFINITY);
    }

    #[test]
    fn samples_follow_stored_cdf() {
        let t = gaussian_table(1.0, 601, 0.3);
        let n = 200_000;
        let mut rng = stream(5, Domain::Sampling, 0);
        let mut xs: Vec<f64> = (0..n).map(|_| t.sample(QubitState::Plus, &mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = t.cdf(x, QubitState::Plus);
                (c - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - c).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.005, "{ks}");
    }
}
