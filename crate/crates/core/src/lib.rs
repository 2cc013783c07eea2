//! Spectral Galerkin solver for the Neumann problem `-Δu + γu = f`,
//! `∂u/∂n = g` on smooth bounded domains in two and three dimensions.
//!
//! The domain `Ω` is described by a smooth invertible map `Φ` from the closed
//! unit ball onto `Ω̄`. The variational problem is pulled back to the ball,
//! where it is discretized with orthonormal polynomial bases (ridge
//! polynomials on the disk, Jacobi × spherical harmonics on the 3-ball) and
//! product quadrature. The pure Poisson problem (`γ ≡ 0`) is handled in the
//! space of functions with zero weighted mean.
//!
//! Module overview:
//!
//! * [`basis`]: orthonormal bases of `Π_n` on the unit disk and unit ball.
//! * [`quadrature`]: Gauss-Legendre and trapezoidal product rules.
//! * [`mapping`]: domain maps, Jacobians and boundary measure factors.
//! * [`galerkin`]: assembly of the linear system in both modes.
//! * [`solve`]: dense solves, conditioning, evaluation and error metrics.
//! * [`cases`]: the manufactured test problems used for convergence studies.

pub mod basis;
pub mod cases;
pub mod error;
pub mod galerkin;
pub mod mapping;
pub mod quadrature;
pub mod small;
pub mod solve;

pub use basis::{dim_pi, BallBasis, BasisSet, DiskBasis};
pub use cases::{Case, ManufacturedProblem};
pub use error::{Error, Result};
pub use galerkin::{assemble, Ball, GalerkinSystem, Mode, ProblemSpec, ReferenceBall};
pub use mapping::{DomainMapping, IdentityMap, LinearMap, PlanarQuadraticMap, StarShapedMap};
pub use quadrature::QuadratureRule;
pub use solve::{condition_number, solve_dense, RunReport, SpectralSolution};
