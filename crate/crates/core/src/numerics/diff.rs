//! Central finite differences.

/// Default step `max(1e-6, 1e-6·|x|)`.
pub fn fd_step(x: f64) -> f64 {
    1e-6_f64.max(1e-6 * x.abs())
}

/// Fourth-order central difference with step `h`.
pub fn central_derivative<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// One Richardson step on top of [`central_derivative`] (steps `h` and
/// `h/2`), sixth order overall.
pub fn richardson_derivative<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    let coarse = central_derivative(&mut f, x, h);
    let fine = central_derivative(&mut f, x, 0.5 * h);
    fine + (fine - coarse) / 15.0
}
