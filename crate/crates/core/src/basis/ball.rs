//! Orthonormal basis of `Π_n` on the unit ball in `R³`.
//!
//! `φ_{m,j,β}(x) = c_{m,j} p_j^{(0, l+1/2)}(2‖x‖² − 1) r^l S_{β,l}(x/r)` with
//! `l = m − 2j` and `c_{m,j} = 2^{5/4 + m/2 − j}`. The factor `r^l S_{β,l}` is
//! evaluated as a solid harmonic so everything stays polynomial.

use super::harmonics::SolidHarmonics;
use super::jacobi::jacobi_p_all;
use super::BasisSet;
use crate::error::{Error, Result};

/// `(m, j, β)` with `0 ≤ j ≤ ⌊m/2⌋` and `0 ≤ β ≤ 2(m − 2j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallIndex {
    pub degree: usize,
    pub radial: usize,
    pub harmonic: usize,
}

impl BallIndex {
    pub fn new(degree: usize, radial: usize, harmonic: usize) -> Result<Self> {
        if 2 * radial > degree {
            return Err(Error::IndexOutOfRange(format!(
                "j={radial} exceeds ⌊m/2⌋ for m={degree}"
            )));
        }
        let l = degree - 2 * radial;
        if harmonic > 2 * l {
            return Err(Error::IndexOutOfRange(format!(
                "β={harmonic} exceeds 2(m-2j)={}",
                2 * l
            )));
        }
        Ok(Self {
            degree,
            radial,
            harmonic,
        })
    }

    /// Degree of the spherical-harmonic factor, `m − 2j`.
    pub fn harmonic_degree(self) -> usize {
        self.degree - 2 * self.radial
    }

    /// Zero-based lexicographic position in `(m, j, β)` order.
    pub fn linear(self) -> usize {
        let m = self.degree;
        let below = m * (m + 1) * (m + 2) / 6;
        let within: usize = (0..self.radial).map(|j| 2 * (m - 2 * j) + 1).sum();
        below + within + self.harmonic
    }

    pub fn from_linear(mut l: usize) -> Self {
        let mut m = 0;
        loop {
            let count = (m + 1) * (m + 2) / 2;
            if l < count {
                break;
            }
            l -= count;
            m += 1;
        }
        let mut j = 0;
        loop {
            let count = 2 * (m - 2 * j) + 1;
            if l < count {
                return Self {
                    degree: m,
                    radial: j,
                    harmonic: l,
                };
            }
            l -= count;
            j += 1;
        }
    }

    pub fn normalization(self) -> f64 {
        2f64.powf(1.25 + 0.5 * self.degree as f64 - self.radial as f64)
    }
}

#[derive(Debug, Clone)]
struct Member {
    radial: usize,
    harmonic_degree: usize,
    // flat index into the solid-harmonic table
    harmonic_flat: usize,
    scale: f64,
}

/// Orthonormal Jacobi × spherical-harmonic basis of `Π_n` on the unit ball.
#[derive(Debug, Clone)]
pub struct BallBasis {
    degree: usize,
    harmonics: SolidHarmonics,
    members: Vec<Member>,
}

impl BallBasis {
    pub fn new(degree: usize) -> Self {
        let mut members = Vec::with_capacity((degree + 1) * (degree + 2) * (degree + 3) / 6);
        for m in 0..=degree {
            for j in 0..=m / 2 {
                let l = m - 2 * j;
                for beta in 0..=2 * l {
                    let idx = BallIndex {
                        degree: m,
                        radial: j,
                        harmonic: beta,
                    };
                    members.push(Member {
                        radial: j,
                        harmonic_degree: l,
                        harmonic_flat: l * l + beta,
                        scale: idx.normalization(),
                    });
                }
            }
        }
        Self {
            degree,
            harmonics: SolidHarmonics::new(degree),
            members,
        }
    }

    pub fn index(&self, l: usize) -> BallIndex {
        BallIndex::from_linear(l)
    }
}

/// Value and gradient of a single ball basis member at `x`.
pub fn ball_basis_eval(idx: BallIndex, x: &[f64; 3]) -> (f64, [f64; 3]) {
    let basis = BallBasis::new(idx.degree);
    let (v, g) = basis.eval(x);
    (v[idx.linear()], g[idx.linear()])
}

impl BasisSet<3> for BallBasis {
    fn degree(&self) -> usize {
        self.degree
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    fn eval_into(&self, x: &[f64; 3], values: &mut [f64], grads: &mut [[f64; 3]]) {
        let n = self.degree;
        let hn = self.harmonics.len();
        let mut hv = vec![0.0; hn];
        let mut hg = vec![[0.0; 3]; hn];
        self.harmonics.eval_into(x, &mut hv, &mut hg);

        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let t = 2.0 * r2 - 1.0;
        // Jacobi tables p_j^{(0, l+1/2)}(t), one row per harmonic degree l.
        let jmax = n / 2 + 1;
        let mut pv = vec![0.0; (n + 1) * jmax];
        let mut pd = vec![0.0; (n + 1) * jmax];
        for l in 0..=n {
            let count = (n - l) / 2 + 1;
            let row = l * jmax;
            jacobi_p_all(
                l as f64 + 0.5,
                t,
                &mut pv[row..row + count],
                &mut pd[row..row + count],
            );
        }

        for (k, mem) in self.members.iter().enumerate() {
            let p = pv[mem.harmonic_degree * jmax + mem.radial];
            let dp = pd[mem.harmonic_degree * jmax + mem.radial];
            let h = hv[mem.harmonic_flat];
            let gh = hg[mem.harmonic_flat];
            values[k] = mem.scale * p * h;
            // d/dx p(2|x|²-1) = 4x p'
            for c in 0..3 {
                grads[k][c] = mem.scale * (4.0 * x[c] * dp * h + p * gh[c]);
            }
        }
    }
}
