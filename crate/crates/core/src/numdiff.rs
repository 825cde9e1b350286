//! Central finite differences with one level of Richardson extrapolation.

/// A derivative estimate with its truncation-error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

/// Estimate `f'(x)` from central differences at steps `h` and `h/2`.
///
/// `D(h) = (f(x+h) − f(x−h)) / 2h` has an `O(h²)` leading error, so
/// `(4·D(h/2) − D(h)) / 3` cancels it. The returned error is
/// `|R − D(h/2)|`, which bounds the error of the unextrapolated
/// half-step difference and is a conservative bound for `R`.
pub fn central_richardson<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> Derivative {
    let d_full = (f(x + h) - f(x - h)) / (2.0 * h);
    let half = 0.5 * h;
    let d_half = (f(x + half) - f(x - half)) / h;
    let value = (4.0 * d_half - d_full) / 3.0;
    Derivative {
        value,
        error: (value - d_half).abs(),
    }
}
