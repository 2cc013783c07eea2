//! Quadrature on the unit disk, unit ball, and their boundaries.
//!
//! All rules are products of Gauss-Legendre rules (radius, `cos θ`) with the
//! trapezoidal rule in the periodic azimuth.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes in a `P`-dimensional parameter space with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<const P: usize> {
    nodes: Vec<[f64; P]>,
    weights: Vec<f64>,
    exactness: usize,
}

impl<const P: usize> QuadratureRule<P> {
    pub fn new(nodes: Vec<[f64; P]>, weights: Vec<f64>, exactness: usize) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::invalid(
                "weights",
                format!("{} weights for {} nodes", weights.len(), nodes.len()),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::invalid(
                "weights",
                format!("non-positive weight {w}"),
            ));
        }
        Ok(Self {
            nodes,
            weights,
            exactness,
        })
    }

    pub fn nodes(&self) -> &[[f64; P]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total polynomial degree integrated exactly (for the periodic rules,
    /// the highest trigonometric degree).
    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(&[f64; P]) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; P], f64)> {
        self.nodes.iter().zip(self.weights.iter().copied())
    }
}

/// `points`-point Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Newton iteration on the Legendre three-term recurrence from Chebyshev
/// initial guesses.
pub fn gauss_legendre(points: usize) -> (Vec<f64>, Vec<f64>) {
    let n = points;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                dp = legendre_with_derivative(n, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `(q+1)`-point Gauss-Legendre rule on `[0, 1]`, exact to degree `2q + 1`.
pub fn gauss_legendre_01(q: usize) -> QuadratureRule<1> {
    let (x, w) = gauss_legendre(q + 1);
    let nodes = x.iter().map(|&t| [0.5 * (t + 1.0)]).collect();
    let weights = w.iter().map(|&wi| 0.5 * wi).collect();
    QuadratureRule {
        nodes,
        weights,
        exactness: 2 * q + 1,
    }
}

/// Polar product rule on the unit disk, exact on `Π_{2q}`.
///
/// `(q+1)` Gauss-Legendre radii on `[0,1]` times `2q+1` equispaced angles
/// `2πm/(2q+1)`; the node weight is `ω_l · 2π/(2q+1) · r_l`. Nodes are
/// returned in Cartesian coordinates.
pub fn disk_rule(q: usize) -> Result<QuadratureRule<2>> {
    if q < 1 {
        return Err(Error::invalid("q", "disk rule needs q >= 1"));
    }
    let radial = gauss_legendre_01(q);
    let na = 2 * q + 1;
    let dtheta = 2.0 * PI / na as f64;
    let mut nodes = Vec::with_capacity(radial.len() * na);
    let mut weights = Vec::with_capacity(radial.len() * na);
    for (r, w) in radial.iter() {
        let r = r[0];
        for m in 0..na {
            let theta = dtheta * m as f64;
            nodes.push([r * theta.cos(), r * theta.sin()]);
            weights.push(w * dtheta * r);
        }
    }
    QuadratureRule::new(nodes, weights, 2 * q)
}

/// Spherical product rule on the unit ball, exact on `Π_{2q}`.
///
/// Radius: `q+2` Gauss-Legendre points on `[0,1]` with `r²` folded into the
/// weight (the radial factor of a degree-`2q` integrand has degree `2q+2`).
/// Polar: `q+1` Gauss-Legendre points in `cos θ`. Azimuth: `2q+1` trapezoid points.
pub fn ball_rule(q: usize) -> Result<QuadratureRule<3>> {
    if q < 1 {
        return Err(Error::invalid("q", "ball rule needs q >= 1"));
    }
    let radial = gauss_legendre_01(q + 1);
    let sphere = sphere_boundary_rule(q);
    let mut nodes = Vec::with_capacity(radial.len() * sphere.len());
    let mut weights = Vec::with_capacity(radial.len() * sphere.len());
    for (r, wr) in radial.iter() {
        let r = r[0];
        for (angles, wa) in sphere.iter() {
            let w = spherical_to_cartesian(angles[0], angles[1]);
            nodes.push([r * w[0], r * w[1], r * w[2]]);
            weights.push(wr * r * r * wa);
        }
    }
    QuadratureRule::new(nodes, weights, 2 * q)
}

/// Trapezoidal rule with `2q+1` equispaced nodes on `[0, 2π)`.
pub fn circle_boundary_rule(q: usize) -> QuadratureRule<1> {
    let n = 2 * q + 1;
    let h = 2.0 * PI / n as f64;
    QuadratureRule {
        nodes: (0..n).map(|m| [h * m as f64]).collect(),
        weights: vec![h; n],
        exactness: 2 * q,
    }
}

/// Product rule on `(θ, φ) ∈ [0,π] × [0,2π)` against the surface measure of `S²`.
///
/// Gauss-Legendre in `cos θ` (`q+1` points) times trapezoid in `φ` (`2q+1`
/// points). Because the polar rule lives in `cos θ`, the `sin θ` area
/// factor is already inside the weights.
pub fn sphere_boundary_rule(q: usize) -> QuadratureRule<2> {
    let (z, wz) = gauss_legendre(q + 1);
    let na = 2 * q + 1;
    let h = 2.0 * PI / na as f64;
    let mut nodes = Vec::with_capacity(z.len() * na);
    let mut weights = Vec::with_capacity(z.len() * na);
    for (&zi, &wi) in z.iter().zip(&wz) {
        let theta = zi.acos();
        for m in 0..na {
            nodes.push([theta, h * m as f64]);
            weights.push(wi * h);
        }
    }
    QuadratureRule {
        nodes,
        weights,
        exactness: 2 * q,
    }
}

/// Unit vector `Υ(1, θ, φ)`.
pub fn spherical_to_cartesian(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial(n: i64) -> f64 {
        if n <= 0 {
            1.0
        } else {
            (n as f64) * double_factorial(n - 2)
        }
    }

    /// ∫_{B₂} x^i y^j via the beta-function closed form.
    fn disk_monomial(i: usize, j: usize) -> f64 {
        if i % 2 == 1 || j % 2 == 1 {
            return 0.0;
        }
        // ∫₀^{2π} cos^i sin^j dθ · ∫₀¹ r^{i+j+1} dr
        let angular = 2.0 * PI * double_factorial(i as i64 - 1) * double_factorial(j as i64 - 1)
            / double_factorial((i + j) as i64);
        angular / (i + j + 2) as f64
    }

    /// ∫_{B₃} x^i y^j z^k.
    fn ball_monomial(i: usize, j: usize, k: usize) -> f64 {
        if i % 2 == 1 || j % 2 == 1 || k % 2 == 1 {
            return 0.0;
        }
        let s = i + j + k;
        let sphere = 4.0
            * PI
            * double_factorial(i as i64 - 1)
            * double_factorial(j as i64 - 1)
            * double_factorial(k as i64 - 1)
            / double_factorial(s as i64 + 1);
        sphere / (s + 3) as f64
    }

    #[test]
    fn midpoint_rule() {
        let r = gauss_legendre_01(0);
        assert_eq!(r.nodes(), &[[0.5]]);
        assert_eq!(r.weights(), &[1.0]);
    }

    #[test]
    fn gauss_legendre_exactness() {
        let r = gauss_legendre_01(5);
        assert!((r.integrate(|x| x[0].powi(11)) - 1.0 / 12.0).abs() < 1e-15);
        let r = gauss_legendre_01(10);
        assert!((r.integrate(|x| x[0].exp()) - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_symmetric_and_positive() {
        for n in 1..40 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for i in 0..n {
                assert!(w[i] > 0.0);
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-15);
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn disk_measures() {
        let r = disk_rule(1).unwrap();
        assert!((r.total_weight() - PI).abs() < 1e-14);
        let r = disk_rule(2).unwrap();
        assert!((r.integrate(|x| x[0] * x[0]) - PI / 4.0).abs() < 1e-14);
        assert!(disk_rule(0).is_err());
    }

    #[test]
    fn disk_monomials_exact_to_degree_2q() {
        let q = 4;
        let r = disk_rule(q).unwrap();
        assert_eq!(r.len(), (q + 1) * (2 * q + 1));
        for i in 0..=2 * q {
            for j in 0..=(2 * q - i) {
                let exact = disk_monomial(i, j);
                let approx = r.integrate(|x| x[0].powi(i as i32) * x[1].powi(j as i32));
                assert!(
                    (approx - exact).abs() < 1e-13,
                    "x^{i} y^{j}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn ball_measures() {
        let r = ball_rule(1).unwrap();
        assert!((r.total_weight() - 4.0 * PI / 3.0).abs() < 1e-13);
        let r = ball_rule(2).unwrap();
        assert!((r.integrate(|x| x[0] * x[0]) - 4.0 * PI / 15.0).abs() < 1e-13);
        assert!(ball_rule(0).is_err());
    }

    #[test]
    fn ball_monomials_exact_to_degree_2q() {
        let q = 4;
        let r = ball_rule(q).unwrap();
        for i in 0..=2 * q {
            for j in 0..=(2 * q - i) {
                for k in 0..=(2 * q - i - j) {
                    let exact = ball_monomial(i, j, k);
                    let approx = r.integrate(|x| {
                        x[0].powi(i as i32) * x[1].powi(j as i32) * x[2].powi(k as i32)
                    });
                    assert!(
                        (approx - exact).abs() < 1e-12,
                        "{i} {j} {k}: {approx} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn circle_rule() {
        let r = circle_boundary_rule(3);
        assert_eq!(r.total_weight(), 2.0 * PI);
        let r = circle_boundary_rule(2);
        assert!((r.integrate(|t| t[0].cos().powi(2)) - PI).abs() < 1e-14);
        // 2π I₀(1), I₀(1) from its power series Σ (1/4)^k / (k!)²
        let mut i0 = 0.0;
        let mut term = 1.0;
        for k in 0..30 {
            if k > 0 {
                term *= 0.25 / (k * k) as f64;
            }
            i0 += term;
        }
        let r = circle_boundary_rule(8);
        assert!((r.integrate(|t| t[0].cos().exp()) - 2.0 * PI * i0).abs() < 1e-12);
    }

    #[test]
    fn sphere_rule() {
        let r = sphere_boundary_rule(1);
        assert!((r.total_weight() - 4.0 * PI).abs() < 1e-13);
        let r = sphere_boundary_rule(2);
        assert!((r.integrate(|a| a[0].cos().powi(2)) - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn error_does_not_grow_with_q() {
        let exact = {
            // ∫_B e^{x+y}: rotate to e^{√2 u}; ∫_{-1}^{1} e^{√2 u} 2√(1-u²) du = π·2·I₁(√2)/√2
            let z = 2f64.sqrt();
            let mut i1 = 0.0;
            let mut term = z / 2.0;
            for k in 0..40 {
                if k > 0 {
                    term *= (z / 2.0).powi(2) / (k * (k + 1)) as f64;
                }
                i1 += term;
            }
            2.0 * PI * i1 / z
        };
        let mut last = f64::INFINITY;
        for q in [2, 4, 8, 16] {
            let r = disk_rule(q).unwrap();
            let err = (r.integrate(|x| (x[0] + x[1]).exp()) - exact).abs();
            assert!(err <= last.max(1e-14), "q={q}: {err} > {last}");
            last = err;
        }
        assert!(last < 1e-13);
    }
}
