//! Jacobi polynomials `P_j^{(0,b)}` normalized in `L²([-1, 1], (1+t)^b dt)`.

use crate::error::{Error, Result};

/// Squared norm `∫₋₁¹ (P_j^{(0,b)})² (1+t)^b dt = 2^{b+1} / (2j + b + 1)`.
fn norm_sq(j: usize, b: f64) -> f64 {
    2f64.powf(b + 1.0) / (2.0 * j as f64 + b + 1.0)
}

/// Normalized Jacobi polynomial `p_j^{(0,b)}(t)` and its derivative.
pub fn jacobi_p(j: usize, b: f64, t: f64) -> Result<(f64, f64)> {
    if !(b > -1.0) || !b.is_finite() {
        return Err(Error::invalid(
            "b",
            format!("must be finite and > -1, got {b}"),
        ));
    }
    let mut values = vec![0.0; j + 1];
    let mut derivs = vec![0.0; j + 1];
    jacobi_p_all(b, t, &mut values, &mut derivs);
    Ok((values[j], derivs[j]))
}

/// Fills `values[k] = p_k^{(0,b)}(t)` and `derivs[k] = d/dt p_k^{(0,b)}(t)`
/// for `k < values.len()`. Assumes `b > -1`.
pub fn jacobi_p_all(b: f64, t: f64, values: &mut [f64], derivs: &mut [f64]) {
    debug_assert_eq!(values.len(), derivs.len());
    let n = values.len();
    if n == 0 {
        return;
    }
    // Unnormalized recurrence (α = 0), then rescale.
    values[0] = 1.0;
    derivs[0] = 0.0;
    if n > 1 {
        values[1] = 1.0 + 0.5 * (b + 2.0) * (t - 1.0);
        derivs[1] = 0.5 * (b + 2.0);
    }
    for k in 2..n {
        let kf = k as f64;
        let s = 2.0 * kf + b;
        let a = 2.0 * kf * (kf + b) * (s - 2.0);
        let c = (s - 1.0) * s * (s - 2.0);
        let d = -(s - 1.0) * b * b;
        let e = 2.0 * (kf - 1.0) * (kf + b - 1.0) * s;
        values[k] = ((c * t + d) * values[k - 1] - e * values[k - 2]) / a;
        derivs[k] = (c * values[k - 1] + (c * t + d) * derivs[k - 1] - e * derivs[k - 2]) / a;
    }
    for k in 0..n {
        let scale = norm_sq(k, b).sqrt().recip();
        values[k] *= scale;
        derivs[k] *= scale;
    }
}
