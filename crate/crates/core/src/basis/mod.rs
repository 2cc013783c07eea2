//! Orthonormal polynomial bases of `Π_n` on the unit disk and unit ball.
//!
//! Both bases are orthonormal in `L²(B_d)` and are ordered so that the first
//! member is the constant function, which the constrained (zero-mean) mode
//! relies on.

mod ball;
mod chebyshev;
mod disk;
mod harmonics;
mod jacobi;

pub use ball::{ball_basis_eval, BallBasis, BallIndex};
pub use chebyshev::{chebyshev_u, chebyshev_u_all};
pub use disk::{ridge_eval, DiskBasis, DiskIndex};
pub use harmonics::{harmonic_count, spherical_harmonic, HarmonicIndex, SolidHarmonics};
pub use jacobi::{jacobi_p, jacobi_p_all};

use crate::error::{Error, Result};

/// Dimension of the space of `d`-variate polynomials of total degree `≤ n`.
pub fn dim_pi(d: usize, n: usize) -> Result<usize> {
    match d {
        2 => Ok((n + 1) * (n + 2) / 2),
        3 => Ok((n + 1) * (n + 2) * (n + 3) / 6),
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// An ordered basis of `Π_n` on the closed unit ball in `R^D`.
///
/// Implementations are immutable after construction and safe to evaluate
/// from several threads at once.
pub trait BasisSet<const D: usize>: Send + Sync {
    /// Total degree `n`.
    fn degree(&self) -> usize;

    /// Number of basis members, `dim Π_n`.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Evaluates every member and its gradient at `x`.
    ///
    /// `values` and `grads` must both have length [`BasisSet::len`].
    fn eval_into(&self, x: &[f64; D], values: &mut [f64], grads: &mut [[f64; D]]);

    fn eval(&self, x: &[f64; D]) -> (Vec<f64>, Vec<[f64; D]>) {
        let mut values = vec![0.0; self.len()];
        let mut grads = vec![[0.0; D]; self.len()];
        self.eval_into(x, &mut values, &mut grads);
        (values, grads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_counts() {
        assert_eq!(dim_pi(2, 2).unwrap(), 6);
        assert_eq!(dim_pi(2, 0).unwrap(), 1);
        assert_eq!(dim_pi(3, 16).unwrap(), 969);
        assert_eq!(dim_pi(2, 24).unwrap(), 325);
        assert_eq!(dim_pi(4, 1), Err(Error::UnsupportedDimension(4)));
        assert_eq!(dim_pi(1, 1), Err(Error::UnsupportedDimension(1)));
    }
}
