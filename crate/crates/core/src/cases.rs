//! Manufactured-solution test problems.
//!
//! Each problem fixes a mapping `Φ`, a coefficient `γ` and an exact solution
//! `u*`; the source and flux are derived from `u*` as `f = −Δu* + γu*` and
//! `g = ∇u*·n`, so the discretization error is directly measurable.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::Result;
use crate::galerkin::{Ball, FluxField, Mode, ProblemSpec, ReferenceBall, ScalarField};
use crate::mapping::{
    ellipsoid_matrix, linear_map_3d, DomainMapping, PlanarQuadraticMap, StarShapedMap, TestSurface,
};
use crate::small::{self, Matrix, Point};
use crate::solve::{run, RunReport};

pub type VectorField<const D: usize> = Arc<dyn Fn(&Point<D>) -> Point<D> + Send + Sync>;

/// Mapping, coefficient and exact solution with its first and second derivatives.
#[derive(Clone)]
pub struct ManufacturedProblem<const D: usize> {
    pub mapping: Arc<dyn DomainMapping<D>>,
    /// `γ` for [`Mode::Helmholtz`]; ignored in pure-Poisson mode.
    pub gamma: Option<ScalarField<D>>,
    pub exact: ScalarField<D>,
    pub gradient: VectorField<D>,
    pub laplacian: ScalarField<D>,
}

impl<const D: usize> ManufacturedProblem<D> {
    pub fn source(&self, mode: Mode) -> ScalarField<D> {
        let lap = self.laplacian.clone();
        match (mode, &self.gamma) {
            (Mode::Helmholtz, Some(gamma)) => {
                let (gamma, u) = (gamma.clone(), self.exact.clone());
                Arc::new(move |s| -lap(s) + gamma(s) * u(s))
            }
            _ => Arc::new(move |s| -lap(s)),
        }
    }

    pub fn flux(&self) -> FluxField<D> {
        let grad = self.gradient.clone();
        Arc::new(move |s, n| small::dot(&grad(s), n))
    }

    pub fn spec(&self, mode: Mode, degree: usize, quad_order: usize) -> ProblemSpec<D> {
        ProblemSpec {
            mapping: self.mapping.clone(),
            gamma: match mode {
                Mode::Helmholtz => self.gamma.clone(),
                Mode::PurePoisson => None,
            },
            source: self.source(mode),
            flux: self.flux(),
            degree,
            quad_order,
            mode,
        }
    }

    pub fn run(&self, mode: Mode, degree: usize, quad_order: usize) -> Result<RunReport>
    where
        Ball<D>: ReferenceBall<D>,
    {
        let exact = self.exact.clone();
        run(&self.spec(mode, degree, quad_order), &move |s| exact(s)).map(|(report, _, _)| report)
    }
}

/// `Φ(x, y) = (x − y + a x², x + y)`, `γ = e^{s−t}`, `u* = e^{−s²} cos(πt)`.
pub fn planar_problem(a: f64) -> Result<ManufacturedProblem<2>> {
    let mapping = PlanarQuadraticMap::new(a)?;
    Ok(ManufacturedProblem {
        mapping: Arc::new(mapping),
        gamma: Some(Arc::new(|s| (s[0] - s[1]).exp())),
        exact: Arc::new(|s| (-s[0] * s[0]).exp() * (PI * s[1]).cos()),
        gradient: Arc::new(|s| {
            let e = (-s[0] * s[0]).exp();
            let (sn, cs) = (PI * s[1]).sin_cos();
            [-2.0 * s[0] * e * cs, -PI * e * sn]
        }),
        laplacian: Arc::new(|s| {
            let e = (-s[0] * s[0]).exp() * (PI * s[1]).cos();
            e * (4.0 * s[0] * s[0] - 2.0 - PI * PI)
        }),
    })
}

fn analytic_3d(mapping: Arc<dyn DomainMapping<3>>) -> ManufacturedProblem<3> {
    // u* = s₁ e^{s₂} sin s₃ is harmonic.
    ManufacturedProblem {
        mapping,
        gamma: Some(Arc::new(|_| 1.0)),
        exact: Arc::new(|s| s[0] * s[1].exp() * s[2].sin()),
        gradient: Arc::new(|s| {
            let e = s[1].exp();
            let (sn, cs) = s[2].sin_cos();
            [e * sn, s[0] * e * sn, s[0] * e * cs]
        }),
        laplacian: Arc::new(|_| 0.0),
    }
}

/// Linear ellipsoid map with `γ ≡ 1` and `u* = s₁ e^{s₂} sin s₃`.
pub fn ellipsoid_problem() -> ManufacturedProblem<3> {
    linear_problem(ellipsoid_matrix()).expect("ellipsoid matrix is nonsingular")
}

/// `Φ(x) = M x` with the same data as [`ellipsoid_problem`].
pub fn linear_problem(matrix: Matrix<3>) -> Result<ManufacturedProblem<3>> {
    Ok(analytic_3d(Arc::new(linear_map_3d(matrix)?)))
}

/// Star-shaped map over the test surface with `γ ≡ 1` and `u* = s₁ e^{s₂} sin s₃`.
pub fn star_problem(smoothness: u32) -> Result<ManufacturedProblem<3>> {
    Ok(analytic_3d(Arc::new(StarShapedMap::new(
        TestSurface,
        smoothness,
    )?)))
}

/// The built-in test problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Case {
    Planar { a: f64 },
    Ellipsoid,
    Star { smoothness: u32 },
}

impl Case {
    pub fn dimension(&self) -> usize {
        match self {
            Case::Planar { .. } => 2,
            Case::Ellipsoid | Case::Star { .. } => 3,
        }
    }

    /// Assembly order used when none is given.
    pub fn default_quad_order(degree: usize) -> usize {
        degree + 4
    }

    pub fn run(&self, mode: Mode, degree: usize, quad_order: Option<usize>) -> Result<RunReport> {
        let q = quad_order.unwrap_or_else(|| Self::default_quad_order(degree));
        match *self {
            Case::Planar { a } => planar_problem(a)?.run(mode, degree, q),
            Case::Ellipsoid => ellipsoid_problem().run(mode, degree, q),
            Case::Star { smoothness } => star_problem(smoothness)?.run(mode, degree, q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_derivatives<const D: usize>(p: &ManufacturedProblem<D>, s: Point<D>) {
        let h = 1e-4;
        let g = (p.gradient)(&s);
        let mut lap = 0.0;
        for k in 0..D {
            let mut sp = s;
            let mut sm = s;
            sp[k] += h;
            sm[k] -= h;
            let (up, u0, um) = ((p.exact)(&sp), (p.exact)(&s), (p.exact)(&sm));
            assert!((g[k] - (up - um) / (2.0 * h)).abs() < 1e-6);
            lap += (up - 2.0 * u0 + um) / (h * h);
        }
        assert!(((p.laplacian)(&s) - lap).abs() < 1e-5);
    }

    #[test]
    fn manufactured_derivatives() {
        check_derivatives(&planar_problem(0.5).unwrap(), [0.3, -0.7]);
        check_derivatives(&ellipsoid_problem(), [0.3, -0.7, 1.1]);
    }

    #[test]
    fn case_dimensions() {
        assert_eq!(Case::Planar { a: 0.5 }.dimension(), 2);
        assert_eq!(Case::Star { smoothness: 5 }.dimension(), 3);
        assert!(Case::Planar { a: 1.5 }
            .run(Mode::Helmholtz, 2, None)
            .is_err());
    }
}
