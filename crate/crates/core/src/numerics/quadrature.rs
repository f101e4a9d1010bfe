#![allow(clippy::excessive_precision)]

#[allow(unused_imports)] // needed without std; the lint misfires
use num_traits::Float;
use alloc::vec::Vec;


use crate::{Error, Result};

/// Tolerances for [`integrate`] and friends.
///
/// Integration stops once the summed local error estimate is below
/// `max(absolute_tolerance, relative_tolerance * |estimate|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-8,
            absolute_tolerance: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(relative_tolerance: f64, absolute_tolerance: f64, max_subdivisions: usize) -> Result<Self> {
        if !(relative_tolerance > 0.0 && absolute_tolerance > 0.0) {
            return Err(Error::Domain("quadrature tolerances must be positive"));
        }
        if max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be at least 1"));
        }
        Ok(Self {
            relative_tolerance,
            absolute_tolerance,
            max_subdivisions,
        })
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy)]
struct Segment {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, lower: f64, upper: f64) -> Segment {
    let center = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        lower,
        upper,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of `f` over a finite
/// interval. The segment with the largest error estimate is bisected until
/// the tolerance in `spec` is met or `max_subdivisions` is exhausted.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, lower: f64, upper: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(lower.is_finite() && upper.is_finite()) {
        return Err(Error::Domain("integration limits must be finite; use integrate_line"));
    }
    if lower == upper {
        return Ok(0.0);
    }
    if lower > upper {
        return integrate(f, upper, lower, spec).map(|v| -v);
    }
    let mut segments = Vec::with_capacity(64);
    segments.push(kronrod15(&mut f, lower, upper));
    let mut subdivisions = 0;
    loop {
        let (value, error) = segments
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        if !value.is_finite() {
            return Err(Error::Domain("integrand is not finite on the interval"));
        }
        if error <= spec.absolute_tolerance.max(spec.relative_tolerance * value.abs()) {
            return Ok(value);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: value,
                error,
                subdivisions,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, s)| if s.error > best.1 { (i, s.error) } else { best });
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.lower + s.upper);
        if mid <= s.lower || mid >= s.upper {
            // Interval can no longer be split in floating point.
            return Err(Error::Quadrature {
                estimate: value,
                error,
                subdivisions,
            });
        }
        segments.push(kronrod15(&mut f, s.lower, mid));
        segments.push(kronrod15(&mut f, mid, s.upper));
        subdivisions += 1;
    }
}

/// Integral of `f` over the whole real line.
///
/// Uses `x = center + scale * atanh(t)`, mapping `t in (-1, 1)` onto the line
/// with `dx = scale / (1 - t^2) dt`. Choose `scale` comparable to the width of
/// the integrand; the endpoints `t = +-1` are never evaluated.
pub fn integrate_line<F: FnMut(f64) -> f64>(mut f: F, center: f64, scale: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::Domain("integrate_line requires a positive scale"));
    }
    integrate(
        |t| {
            let x = center + scale * t.atanh();
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * scale / (1.0 - t * t)
            }
        },
        -1.0,
        1.0,
        spec,
    )
}

/// Sum of [`integrate`] over consecutive cells `[points[i], points[i+1]]`.
///
/// Used for integrands that are smooth only between known breakpoints, such
/// as functions of a piecewise-linear table. The absolute tolerance is
/// shared evenly between cells.
pub fn integrate_piecewise<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Domain("integrate_piecewise needs at least two points"));
    }
    let cells = (points.len() - 1) as f64;
    let cell_spec = QuadratureSpec {
        absolute_tolerance: spec.absolute_tolerance / cells,
        ..*spec
    };
    points
        .windows(2)
        .try_fold(0.0, |acc, w| Ok(acc + integrate(&mut f, w[0], w[1], &cell_spec)?))
}
