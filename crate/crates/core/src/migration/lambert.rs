use crate::error::{Error, Result};

/// Principal branch of the Lambert W function on `[0, ∞)` via Halley's method.
pub fn lambert_w(v: f64) -> Result<f64> {
    if !(v >= 0.0) || v.is_infinite() {
        return Err(Error::invalid("Lambert W is evaluated on finite nonnegative inputs"));
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    let mut w = if v < std::f64::consts::E {
        v.ln_1p() * 0.75
    } else {
        let l = v.ln();
        l - l.ln()
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - v;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// Bound on the expected windowed mistakes of sampled predictions.
///
/// With `L = ln(n − w + 1)` and `t = W(L/u) + 1` the convex bound is
/// `f(u) = (u(eᵗ − 1) + L) / (t w)`, defined as 0 at `u = 0`; the linear
/// relaxation is `(e·u + (2/e)·L) / w`. Returns `(f, linear)`.
pub fn lemma2_bound(u: f64, n: usize, window: usize) -> Result<(f64, f64)> {
    if !(u >= 0.0) {
        return Err(Error::invalid("window loss must be nonnegative"));
    }
    if window == 0 || window > n {
        return Err(Error::invalid(format!("window {window} must lie in 1..={n}")));
    }
    let e = std::f64::consts::E;
    let w = window as f64;
    let l = ((n - window + 1) as f64).ln();
    let linear = (e * u + (2.0 / e) * l) / w;
    if u == 0.0 {
        return Ok((0.0, linear));
    }
    let t = lambert_w(l / u)? + 1.0;
    let f = (u * t.exp_m1() + l) / (t * w);
    Ok((f, linear))
}
