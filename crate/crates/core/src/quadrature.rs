//! Composite trapezoid rules. On the circle the rule is exact for
//! trigonometric polynomials of degree below the number of nodes.

use std::f64::consts::PI;

/// `points` equispaced nodes `t_i = -pi + 2 pi i / points` on `[-pi, pi)`.
pub fn circle_grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| -PI + 2.0 * PI * i as f64 / points as f64)
}

/// `(1 / 2 pi) * integral of f over the circle`.
pub fn circle_mean(f: impl Fn(f64) -> f64, points: usize) -> f64 {
    circle_grid(points).map(f).sum::<f64>() / points as f64
}

/// Composite trapezoid on `[a, b]` with `intervals` panels.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let inner: f64 = (1..intervals).map(|i| f(a + h * i as f64)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}
