/// Location and value of a maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a concave `f` on `[lower, upper]` by golden-section search.
///
/// The endpoints are compared against the interior result at the end, so a
/// maximum on the boundary is returned exactly.
pub fn maximize_concave<F: FnMut(f64) -> f64>(mut f: F, lower: f64, upper: f64, tol: f64) -> Maximum {
    debug_assert!(lower <= upper);
    let (mut a, mut b) = (lower, upper);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let mut best = Maximum { argmax: x, value: f(x) };
    for edge in [lower, upper] {
        let v = f(edge);
        if v >= best.value {
            best = Maximum { argmax: edge, value: v };
        }
    }
    best
}

/// Maximizes a concave `f` on `[lower, upper]` by bisection on the sign of
/// its derivative `df`.
///
/// If `df` does not change sign on the interval, the corresponding endpoint
/// is returned exactly.
pub fn maximize_concave_with_derivative<F, D>(mut f: F, mut df: D, lower: f64, upper: f64, tol: f64) -> Maximum
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    if df(lower) <= 0.0 {
        return Maximum { argmax: lower, value: f(lower) };
    }
    if df(upper) >= 0.0 {
        return Maximum { argmax: upper, value: f(upper) };
    }
    let (mut a, mut b) = (lower, upper);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let slope = df(mid);
        if slope > 0.0 {
            a = mid;
        } else if slope < 0.0 {
            b = mid;
        } else {
            a = mid;
            b = mid;
        }
    }
    let x = 0.5 * (a + b);
    Maximum { argmax: x, value: f(x) }
}
