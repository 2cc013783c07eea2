//! Ridge-polynomial basis on the unit disk.
//!
//! `φ_{n,k}(x, y) = U_n(x cos(kh) + y sin(kh)) / √π` with `h = π/(n+1)` and
//! `k = 0..=n` spans the degree-`n` orthogonal complement; stacking the
//! degrees gives an orthonormal basis of `Π_n` in lexicographic `(n, k)` order.

use std::f64::consts::PI;

use super::chebyshev::{chebyshev_u, chebyshev_u_all};
use super::BasisSet;
use crate::error::{Error, Result};

/// `(n, k)` index of a ridge polynomial, `0 ≤ k ≤ n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiskIndex {
    pub degree: usize,
    pub angle: usize,
}

impl DiskIndex {
    pub fn new(degree: usize, angle: usize) -> Result<Self> {
        if angle > degree {
            return Err(Error::IndexOutOfRange(format!(
                "k={angle} exceeds n={degree}"
            )));
        }
        Ok(Self { degree, angle })
    }

    /// Zero-based position `n(n+1)/2 + k`.
    pub fn linear(self) -> usize {
        self.degree * (self.degree + 1) / 2 + self.angle
    }

    pub fn from_linear(l: usize) -> Self {
        // Largest n with n(n+1)/2 <= l.
        let mut n = (((8 * l + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
        while (n + 1) * (n + 2) / 2 <= l {
            n += 1;
        }
        while n * (n + 1) / 2 > l {
            n -= 1;
        }
        Self {
            degree: n,
            angle: l - n * (n + 1) / 2,
        }
    }

    fn direction(self) -> (f64, f64) {
        let h = PI / (self.degree + 1) as f64;
        let a = self.angle as f64 * h;
        (a.cos(), a.sin())
    }
}

/// Value and gradient of a single ridge polynomial at `(x, y)`.
pub fn ridge_eval(idx: DiskIndex, point: &[f64; 2]) -> (f64, [f64; 2]) {
    let (c, s) = idx.direction();
    let t = point[0] * c + point[1] * s;
    let (u, du) = chebyshev_u(idx.degree, t);
    let scale = 1.0 / PI.sqrt();
    (scale * u, [scale * du * c, scale * du * s])
}

/// Orthonormal ridge basis of `Π_n` on the unit disk.
#[derive(Debug, Clone)]
pub struct DiskBasis {
    degree: usize,
    // (cos, sin) of each member's ridge direction, in basis order.
    directions: Vec<(f64, f64)>,
}

impl DiskBasis {
    pub fn new(degree: usize) -> Self {
        let directions = (0..=degree)
            .flat_map(|n| {
                (0..=n).map(move |k| {
                    DiskIndex {
                        degree: n,
                        angle: k,
                    }
                    .direction()
                })
            })
            .collect();
        Self { degree, directions }
    }

    pub fn index(&self, l: usize) -> DiskIndex {
        DiskIndex::from_linear(l)
    }
}

impl BasisSet<2> for DiskBasis {
    fn degree(&self) -> usize {
        self.degree
    }

    fn len(&self) -> usize {
        self.directions.len()
    }

    fn eval_into(&self, x: &[f64; 2], values: &mut [f64], grads: &mut [[f64; 2]]) {
        let scale = 1.0 / PI.sqrt();
        let mut u = vec![0.0; self.degree + 1];
        let mut du = vec![0.0; self.degree + 1];
        let mut l = 0;
        for n in 0..=self.degree {
            for _ in 0..=n {
                let (c, s) = self.directions[l];
                let t = x[0] * c + x[1] * s;
                chebyshev_u_all(t, &mut u[..=n], &mut du[..=n]);
                values[l] = scale * u[n];
                let d = scale * du[n];
                grads[l] = [d * c, d * s];
                l += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::disk_rule;

    #[test]
    fn constant_member() {
        let (v, g) = ridge_eval(DiskIndex::new(0, 0).unwrap(), &[0.3, -0.4]);
        assert!((v - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert_eq!(g, [0.0, 0.0]);
    }

    #[test]
    fn first_degree_member() {
        let p = [0.25, 0.6];
        let (v, g) = ridge_eval(DiskIndex::new(1, 0).unwrap(), &p);
        let r = 1.0 / PI.sqrt();
        assert!((v - 2.0 * p[0] * r).abs() < 1e-15);
        assert!((g[0] - 2.0 * r).abs() < 1e-15 && g[1].abs() < 1e-15);
    }

    #[test]
    fn index_validation() {
        assert!(DiskIndex::new(2, 3).is_err());
    }

    #[test]
    fn linear_index_round_trip() {
        let mut l = 0;
        for n in 0..=25 {
            for k in 0..=n {
                let idx = DiskIndex::new(n, k).unwrap();
                assert_eq!(idx.linear(), l);
                assert_eq!(DiskIndex::from_linear(l), idx);
                l += 1;
            }
        }
    }

    #[test]
    fn set_matches_single_evaluations() {
        let basis = DiskBasis::new(6);
        let p = [-0.31, 0.52];
        let (v, g) = basis.eval(&p);
        for l in 0..basis.len() {
            let (vs, gs) = ridge_eval(basis.index(l), &p);
            assert!((v[l] - vs).abs() < 1e-14);
            assert!((g[l][0] - gs[0]).abs() < 1e-13 && (g[l][1] - gs[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn gram_degree_four() {
        let basis = DiskBasis::new(4);
        let rule = disk_rule(8).unwrap();
        let n = basis.len();
        let mut gram = vec![0.0; n * n];
        for (x, &w) in rule.nodes().iter().zip(rule.weights()) {
            let (v, _) = basis.eval(x);
            for i in 0..n {
                for j in 0..n {
                    gram[i * n + j] += w * v[i] * v[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i * n + j] - e).abs() < 1e-10);
            }
        }
    }
}
