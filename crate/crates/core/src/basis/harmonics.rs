//! Real spherical harmonics, evaluated as solid harmonics `r^l Y(x/r)`.
//!
//! Working with the homogeneous polynomial form keeps evaluation and
//! gradients smooth at the origin. Convention: associated Legendre functions
//! without the Condon-Shortley phase, with index `β` running over the
//! `m = 0` term (`β = 0`), then `cos mφ` (`β = m`, `1 ≤ m ≤ l`), then
//! `sin mφ` (`β = l + m`).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Number of real harmonics of degree `≤ max_degree`.
pub fn harmonic_count(max_degree: usize) -> usize {
    (max_degree + 1) * (max_degree + 1)
}

/// `(β, l)` pair identifying one real spherical harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HarmonicIndex {
    pub beta: usize,
    pub degree: usize,
}

impl HarmonicIndex {
    pub fn new(beta: usize, degree: usize) -> Result<Self> {
        if beta > 2 * degree {
            return Err(Error::IndexOutOfRange(format!(
                "harmonic index β={beta} exceeds 2l={}",
                2 * degree
            )));
        }
        Ok(Self { beta, degree })
    }

    /// Position within the flat `(l, β)` layout used by [`SolidHarmonics`].
    pub fn flat(self) -> usize {
        self.degree * self.degree + self.beta
    }

    /// Azimuthal order `m` and whether the factor is `sin mφ`.
    pub fn order(self) -> (usize, bool) {
        if self.beta <= self.degree {
            (self.beta, false)
        } else {
            (self.beta - self.degree, true)
        }
    }
}

/// Evaluator for all real solid harmonics up to a fixed degree.
#[derive(Debug, Clone)]
pub struct SolidHarmonics {
    max_degree: usize,
    // norms[l * (L+1) + m]
    norms: Vec<f64>,
}

impl SolidHarmonics {
    pub fn new(max_degree: usize) -> Self {
        let stride = max_degree + 1;
        let mut norms = vec![0.0; stride * stride];
        for l in 0..=max_degree {
            for m in 0..=l {
                // (l-m)!/(l+m)! as a running product.
                let ratio: f64 = ((l - m + 1)..=(l + m)).map(|k| 1.0 / k as f64).product();
                let base = (2 * l + 1) as f64 / (4.0 * PI) * ratio;
                norms[l * stride + m] = if m == 0 {
                    base.sqrt()
                } else {
                    (2.0 * base).sqrt()
                };
            }
        }
        Self { max_degree, norms }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        harmonic_count(self.max_degree)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Values and Cartesian gradients of `r^l Y_{β,l}(x/r)` at `x`, laid out
    /// by [`HarmonicIndex::flat`].
    pub fn eval_into(&self, x: &[f64; 3], values: &mut [f64], grads: &mut [[f64; 3]]) {
        let big_l = self.max_degree;
        let stride = big_l + 1;
        let [px, py, pz] = *x;
        let r2 = px * px + py * py + pz * pz;

        // (x + iy)^m = C_m + i S_m
        let mut c = vec![0.0; stride];
        let mut s = vec![0.0; stride];
        let mut gc = vec![[0.0; 3]; stride];
        let mut gs = vec![[0.0; 3]; stride];
        c[0] = 1.0;
        for m in 1..stride {
            c[m] = px * c[m - 1] - py * s[m - 1];
            s[m] = px * s[m - 1] + py * c[m - 1];
            let mf = m as f64;
            gc[m] = [mf * c[m - 1], -mf * s[m - 1], 0.0];
            gs[m] = [mf * s[m - 1], mf * c[m - 1], 0.0];
        }

        let mut q = vec![0.0; stride];
        let mut gq = vec![[0.0; 3]; stride];
        let mut double_factorial = 1.0;
        for m in 0..=big_l {
            if m > 0 {
                double_factorial *= (2 * m - 1) as f64;
            }
            q[m] = double_factorial;
            gq[m] = [0.0; 3];
            if m < big_l {
                let f = (2 * m + 1) as f64;
                q[m + 1] = f * pz * q[m];
                gq[m + 1] = [0.0, 0.0, f * q[m]];
            }
            for l in (m + 2)..=big_l {
                let a = (2 * l - 1) as f64;
                let b = (l + m - 1) as f64;
                let inv = 1.0 / (l - m) as f64;
                q[l] = (a * pz * q[l - 1] - b * r2 * q[l - 2]) * inv;
                for k in 0..3 {
                    let dz = if k == 2 { q[l - 1] } else { 0.0 };
                    gq[l][k] = (a * (dz + pz * gq[l - 1][k])
                        - b * (2.0 * x[k] * q[l - 2] + r2 * gq[l - 2][k]))
                        * inv;
                }
            }
            for l in m..=big_l {
                let norm = self.norms[l * stride + m];
                let base = l * l;
                if m == 0 {
                    values[base] = norm * q[l];
                    grads[base] = gq[l].map(|g| norm * g);
                } else {
                    let ic = base + m;
                    let is = base + l + m;
                    values[ic] = norm * q[l] * c[m];
                    values[is] = norm * q[l] * s[m];
                    for k in 0..3 {
                        grads[ic][k] = norm * (gq[l][k] * c[m] + q[l] * gc[m][k]);
                        grads[is][k] = norm * (gq[l][k] * s[m] + q[l] * gs[m][k]);
                    }
                }
            }
        }
    }
}

/// Real spherical harmonic `S_{β,l}` at a unit `direction`, with its surface
/// gradient on `S²`.
pub fn spherical_harmonic(
    beta: usize,
    degree: usize,
    direction: &[f64; 3],
) -> Result<(f64, [f64; 3])> {
    let idx = HarmonicIndex::new(beta, degree)?;
    let len = crate::small::norm(direction);
    if (len - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(
            "direction",
            format!("must be a unit vector, norm is {len}"),
        ));
    }
    let sh = SolidHarmonics::new(degree);
    let mut values = vec![0.0; sh.len()];
    let mut grads = vec![[0.0; 3]; sh.len()];
    sh.eval_into(direction, &mut values, &mut grads);
    let v = values[idx.flat()];
    let g = grads[idx.flat()];
    // Euler: ω·∇H = l H for homogeneous H of degree l.
    let lf = degree as f64;
    let surface = [
        g[0] - lf * v * direction[0],
        g[1] - lf * v * direction[1],
        g[2] - lf * v * direction[2],
    ];
    Ok((v, surface))
}
