/// Chebyshev polynomial of the second kind `U_n(t)` and its derivative.
///
/// Uses the three-term recurrences for both the values and the derivatives,
/// so arguments slightly outside `[-1, 1]` are fine.
pub fn chebyshev_u(n: usize, t: f64) -> (f64, f64) {
    let (mut u_prev, mut u) = (0.0, 1.0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for _ in 0..n {
        let u_next = 2.0 * t * u - u_prev;
        let d_next = 2.0 * u + 2.0 * t * d - d_prev;
        u_prev = u;
        u = u_next;
        d_prev = d;
        d = d_next;
    }
    (u, d)
}

/// Fills `values[k] = U_k(t)` and `derivs[k] = U_k'(t)` for `k < values.len()`.
pub fn chebyshev_u_all(t: f64, values: &mut [f64], derivs: &mut [f64]) {
    debug_assert_eq!(values.len(), derivs.len());
    let n = values.len();
    if n == 0 {
        return;
    }
    values[0] = 1.0;
    derivs[0] = 0.0;
    if n == 1 {
        return;
    }
    values[1] = 2.0 * t;
    derivs[1] = 2.0;
    for k in 2..n {
        values[k] = 2.0 * t * values[k - 1] - values[k - 2];
        derivs[k] = 2.0 * values[k - 1] + 2.0 * t * derivs[k - 1] - derivs[k - 2];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn low_degrees() {
        assert_eq!(chebyshev_u(0, 0.7), (1.0, 0.0));
        assert_eq!(chebyshev_u(1, 0.5), (1.0, 2.0));
        let (v, _) = chebyshev_u(3, 0.5);
        assert!((v + 1.0).abs() < 1e-15);
    }

    #[test]
    fn all_matches_single() {
        let mut v = [0.0; 12];
        let mut d = [0.0; 12];
        chebyshev_u_all(-0.37, &mut v, &mut d);
        for k in 0..12 {
            let (u, du) = chebyshev_u(k, -0.37);
            assert_eq!(v[k], u);
            assert_eq!(d[k], du);
        }
    }

    #[test]
    fn derivative_matches_closed_form() {
        // U_n(cos θ) = sin((n+1)θ)/sin θ; differentiate in θ and divide by dt/dθ = -sin θ.
        for n in 0..20usize {
            for &theta in &[0.3_f64, 1.1, 2.0, 2.9] {
                let m = (n + 1) as f64;
                let s = theta.sin();
                let d_theta =
                    (m * (m * theta).cos() * s - (m * theta).sin() * theta.cos()) / (s * s);
                let exact = d_theta / -s;
                let (_, du) = chebyshev_u(n, theta.cos());
                assert!((du - exact).abs() <= 1e-10 * (1.0 + exact.abs()), "n={n}");
            }
        }
    }

    proptest! {
        #[test]
        fn matches_sine_ratio(n in 0usize..=30, theta in 0.01f64..3.13) {
            let (u, _) = chebyshev_u(n, theta.cos());
            let exact = (((n + 1) as f64) * theta).sin() / theta.sin();
            prop_assert!((u - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
        }
    }
}
