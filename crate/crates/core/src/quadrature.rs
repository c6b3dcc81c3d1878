//! Quadrature and interpolation rules shared by the energy bookkeeping.

/// Composite Simpson rule on `[a, b]` with `panels` subintervals (rounded up to even).
/// Works for `b < a` (returns the negated integral).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    if b < a {
        return -simpson(f, b, a, panels);
    }
    let n = (panels.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Line integral of `y dx` along a sampled path using the trapezoid rule.
pub fn trapezoid_path(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (ys[0] + ys[1]) * (xs[1] - xs[0]))
        .sum()
}

pub fn lerp(a: f64, b: f64, s: f64) -> f64 {
    a + s * (b - a)
}

/// Cubic Hermite value at `s` in [0, 1] across a step of length `h`, from end
/// values `y0`, `y1` and slopes `d0`, `d1`.
pub fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

/// Root in [0, 1] of the Hermite cubic, given end values of opposite sign
/// (or `y1 == 0`). Bisection, so it cannot leave the step.
pub fn hermite_root(y0: f64, y1: f64, d0: f64, d1: f64, h: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    let positive = y0 > 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let v = hermite(y0, y1, d0, d1, h, mid);
        if (v > 0.0) == positive && v != 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
