//! Dense solves, conditioning, solution evaluation and error metrics.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::galerkin::{
    assemble, Ball, GalerkinSystem, MeanZeroProjection, Mode, ProblemSpec, ReferenceBall,
};
use crate::mapping::DomainMapping;
use crate::quadrature::spherical_to_cartesian;
use crate::small::{self, Point};

/// `ũ_n = Σ α_k φ_k` (or `Σ α_j φ̂_j` in pure-Poisson mode).
#[derive(Clone)]
pub struct SpectralSolution<const D: usize> {
    coefficients: DVector<f64>,
    // Coefficients over the unconstrained basis plus a constant offset, so that
    // evaluation is the same in both modes.
    full: Vec<f64>,
    offset: f64,
    basis: Arc<dyn BasisSet<D>>,
    mapping: Arc<dyn DomainMapping<D>>,
    mode: Mode,
    quad_order: usize,
    residual: f64,
}

impl<const D: usize> std::fmt::Debug for SpectralSolution<D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralSolution")
            .field("size", &self.coefficients.len())
            .field("mode", &self.mode)
            .field("residual", &self.residual)
            .finish()
    }
}

impl<const D: usize> SpectralSolution<D> {
    /// Wraps a coefficient vector for `system`'s (possibly constrained) basis.
    pub fn from_coefficients(
        system: &GalerkinSystem<D>,
        coefficients: DVector<f64>,
    ) -> Result<Self> {
        if coefficients.len() != system.size() {
            return Err(Error::invalid(
                "coefficients",
                format!(
                    "expected {} entries, got {}",
                    system.size(),
                    coefficients.len()
                ),
            ));
        }
        let (full, offset) = match &system.constraint {
            Some(c) => {
                let mut full = vec![0.0; c.shifts.len()];
                full[1..].copy_from_slice(coefficients.as_slice());
                let offset = -coefficients
                    .iter()
                    .zip(&c.shifts[1..])
                    .map(|(a, s)| a * s)
                    .sum::<f64>();
                (full, offset)
            }
            None => (coefficients.as_slice().to_vec(), 0.0),
        };
        let residual = relative_residual(&system.matrix, &coefficients, &system.rhs);
        Ok(Self {
            coefficients,
            full,
            offset,
            basis: system.basis.clone(),
            mapping: system.mapping.clone(),
            mode: system.mode,
            quad_order: system.quad_order,
            residual,
        })
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coefficients
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn mapping(&self) -> &Arc<dyn DomainMapping<D>> {
        &self.mapping
    }

    /// `‖Mα − b‖ / ‖b‖` of the solve that produced this solution.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `ũ_n(x)` without the domain check.
    pub fn value(&self, x: &Point<D>) -> f64 {
        let (v, _) = self.basis.eval(x);
        v.iter().zip(&self.full).map(|(a, b)| a * b).sum::<f64>() + self.offset
    }

    /// Values at reference points, paired with their images `s = Φ(x)`.
    pub fn evaluate(&self, points: &[Point<D>]) -> Result<Vec<(f64, Point<D>)>> {
        let n = self.basis.len();
        let mut v = vec![0.0; n];
        let mut g = vec![[0.0; D]; n];
        points
            .iter()
            .map(|x| {
                if small::norm(x) > 1.0 + 1e-12 {
                    return Err(Error::OutsideBall(x.to_vec()));
                }
                self.basis.eval_into(x, &mut v, &mut g);
                let u = v.iter().zip(&self.full).map(|(a, b)| a * b).sum::<f64>() + self.offset;
                Ok((u, self.mapping.forward(x)))
            })
            .collect()
    }
}

fn relative_residual(m: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let r = (m * x - b).norm();
    let scale = b.norm();
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

/// Direct solve: Cholesky when the matrix is SPD, pivoted LU otherwise.
pub fn solve_dense<const D: usize>(system: &GalerkinSystem<D>) -> Result<SpectralSolution<D>> {
    let alpha = solve_symmetric(&system.matrix, &system.rhs)?;
    SpectralSolution::from_coefficients(system, alpha)
}

/// Solves `M x = b` for a symmetric `M`.
pub fn solve_symmetric(matrix: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    if matrix.nrows() != matrix.ncols() || matrix.nrows() != rhs.len() {
        return Err(Error::invalid("matrix", "dimension mismatch"));
    }
    if matrix.iter().chain(rhs.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Factorization("non-finite entries".into()));
    }
    let x = match matrix.clone().cholesky() {
        Some(chol) => chol.solve(rhs),
        None => matrix
            .clone()
            .lu()
            .solve(rhs)
            .ok_or_else(|| Error::Factorization("matrix is singular".into()))?,
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Factorization("solution is not finite".into()));
    }
    Ok(x)
}

/// Spectral condition number `max|λ| / min|λ|` of the symmetric system matrix.
pub fn condition_number<const D: usize>(system: &GalerkinSystem<D>) -> Result<f64> {
    matrix_condition(&system.matrix)
}

pub fn matrix_condition(matrix: &DMatrix<f64>) -> Result<f64> {
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Factorization("non-finite entries".into()));
    }
    let eig = SymmetricEigen::new(matrix.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), l| {
            (lo.min(l.abs()), hi.max(l.abs()))
        });
    if !(lo > 0.0) {
        return Err(Error::Factorization("matrix is singular".into()));
    }
    Ok(hi / lo)
}

/// `αᵀ M α`, the discrete energy of the solution.
pub fn energy<const D: usize>(system: &GalerkinSystem<D>, solution: &SpectralSolution<D>) -> f64 {
    let a = solution.coefficients();
    a.dot(&(&system.matrix * a))
}

/// Reference points `(r_i cos θ_j, r_i sin θ_j)`, `r_i = i/10` (`i = 0..=10`),
/// `θ_j = jπ/10` (`j = 1..=20`).
pub fn planar_grid() -> Vec<Point<2>> {
    let mut pts = Vec::with_capacity(11 * 20);
    for i in 0..=10 {
        let r = i as f64 / 10.0;
        for j in 1..=20 {
            let t = j as f64 * PI / 10.0;
            pts.push([r * t.cos(), r * t.sin()]);
        }
    }
    pts
}

/// The origin plus `ρ_i = i/10` (`i = 1..=10`), `θ_j = (j − ½)π/10`
/// (`j = 1..=10`), `φ_k = kπ/10` (`k = 1..=20`).
pub fn ball_grid() -> Vec<Point<3>> {
    let mut pts = Vec::with_capacity(1 + 10 * 10 * 20);
    pts.push([0.0; 3]);
    for i in 1..=10 {
        let rho = i as f64 / 10.0;
        for j in 1..=10 {
            let theta = (j as f64 - 0.5) * PI / 10.0;
            for k in 1..=20 {
                let w = spherical_to_cartesian(theta, k as f64 * PI / 10.0);
                pts.push(w.map(|c| rho * c));
            }
        }
    }
    pts
}

/// Default error grid for the dimension.
pub fn evaluation_grid<const D: usize>() -> Vec<Point<D>> {
    let copy = |p: &[f64]| -> Point<D> {
        let mut x = [0.0; D];
        x.copy_from_slice(p);
        x
    };
    match D {
        2 => planar_grid().iter().map(|p| copy(p)).collect(),
        3 => ball_grid().iter().map(|p| copy(p)).collect(),
        _ => Vec::new(),
    }
}

/// `max_x |u*(Φ(x)) − ũ_n(x)|` over the reference `grid`.
///
/// In pure-Poisson mode `u*∘Φ` is first shifted to zero weighted mean, since
/// `ũ_n` is the zero-mean representative.
pub fn max_grid_error<const D: usize>(
    solution: &SpectralSolution<D>,
    exact: &dyn Fn(&Point<D>) -> f64,
    grid: &[Point<D>],
) -> Result<f64>
where
    Ball<D>: ReferenceBall<D>,
{
    let pulled = |x: &Point<D>| exact(&solution.mapping.forward(x));
    let shift = match solution.mode {
        Mode::PurePoisson => {
            MeanZeroProjection::new(solution.mapping.as_ref(), solution.quad_order)?
                .weighted_mean(&pulled)
        }
        Mode::Helmholtz => 0.0,
    };
    let values = solution.evaluate(grid)?;
    Ok(values
        .iter()
        .map(|(u, s)| (exact(s) - shift - u).abs())
        .fold(0.0, f64::max))
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub degree: usize,
    /// Number of unknowns `N_n` of the basis (before the constraint drops one).
    pub size: usize,
    pub max_error: f64,
    pub condition: f64,
    pub quad_order: usize,
    pub seconds: f64,
}

/// Assembles, solves and measures one problem against an exact solution.
pub fn run<const D: usize>(
    spec: &ProblemSpec<D>,
    exact: &dyn Fn(&Point<D>) -> f64,
) -> Result<(RunReport, GalerkinSystem<D>, SpectralSolution<D>)>
where
    Ball<D>: ReferenceBall<D>,
{
    let start = Instant::now();
    let system = assemble(spec)?;
    let solution = solve_dense(&system)?;
    let condition = condition_number(&system)?;
    let max_error = max_grid_error(&solution, exact, &evaluation_grid::<D>())?;
    let report = RunReport {
        degree: spec.degree,
        size: system.basis.len(),
        max_error,
        condition,
        quad_order: spec.quad_order,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((report, system, solution))
}

/// Least-squares line `y ≈ slope·x + intercept` with its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("ys", "length differs from xs"));
    }
    if xs.len() < 2 {
        return Err(Error::invalid("xs", "need at least two points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("xs", "all abscissae are equal"));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}
