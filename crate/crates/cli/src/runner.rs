//! Turns a [`RunConfig`] into problems and runs the degree sweep.

use std::sync::Arc;
use std::time::Instant;

use log::{info, warn};

use neumann_spectral::cases::{ellipsoid_problem, linear_problem, planar_problem, star_problem};
use neumann_spectral::galerkin::{assemble, FluxField, ScalarField};
use neumann_spectral::mapping::{
    ellipsoid_matrix, IdentityMap, LinearMap, StarShapedMap, TestSurface,
};
use neumann_spectral::solve::{condition_number, run};
use neumann_spectral::{
    solve_dense, Ball, DomainMapping, ManufacturedProblem, Mode, PlanarQuadraticMap, ProblemSpec,
    ReferenceBall, RunReport,
};

use crate::config::{CaseName, MapName, RunConfig};
use crate::expr::{Expr, Variables};
use crate::CliError;

/// Data for one problem, independent of the degree.
pub struct Prepared<const D: usize> {
    pub mapping: Arc<dyn DomainMapping<D>>,
    pub gamma: Option<ScalarField<D>>,
    pub source: ScalarField<D>,
    pub flux: FluxField<D>,
    pub exact: Option<ScalarField<D>>,
    pub mode: Mode,
}

impl<const D: usize> Prepared<D>
where
    Ball<D>: ReferenceBall<D>,
{
    fn from_manufactured(p: ManufacturedProblem<D>, mode: Mode) -> Self {
        Self {
            gamma: match mode {
                Mode::Helmholtz => p.gamma.clone(),
                Mode::PurePoisson => None,
            },
            source: p.source(mode),
            flux: p.flux(),
            exact: Some(p.exact.clone()),
            mapping: p.mapping,
            mode,
        }
    }

    pub fn spec(&self, degree: usize, quad_order: usize) -> ProblemSpec<D> {
        ProblemSpec {
            mapping: self.mapping.clone(),
            gamma: self.gamma.clone(),
            source: self.source.clone(),
            flux: self.flux.clone(),
            degree,
            quad_order,
            mode: self.mode,
        }
    }

    /// One table row. Without an exact solution the error is NaN.
    pub fn run(&self, degree: usize, quad_order: usize) -> Result<RunReport, CliError> {
        let spec = self.spec(degree, quad_order);
        if let Some(exact) = &self.exact {
            let exact = exact.clone();
            return Ok(run(&spec, &move |s| exact(s))?.0);
        }
        let start = Instant::now();
        let system = assemble(&spec)?;
        solve_dense(&system)?;
        let condition = condition_number(&system)?;
        Ok(RunReport {
            degree,
            size: system.basis.len(),
            max_error: f64::NAN,
            condition,
            quad_order,
            seconds: start.elapsed().as_secs_f64(),
        })
    }
}

fn field_from<const D: usize>(expr: Expr) -> ScalarField<D> {
    Arc::new(move |s: &[f64; D]| expr.eval(s))
}

fn custom<const D: usize>(
    cfg: &RunConfig,
    mapping: Arc<dyn DomainMapping<D>>,
) -> Result<Prepared<D>, CliError> {
    let coords = Variables::coordinates(D);
    let parse = |name: &str, text: &str, vars| {
        Expr::parse(text, vars).map_err(|e| CliError::validation(name, e.to_string()))
    };
    let mode: Mode = cfg.mode.into();
    let gamma = match &cfg.gamma {
        Some(text) => Some(parse("gamma", text, coords)?),
        None => None,
    };
    let exact = match &cfg.exact {
        Some(text) => Some(parse("exact", text, coords)?),
        None => None,
    };
    let source = match (&cfg.source, &exact) {
        (Some(text), _) => parse("source", text, coords)?,
        (None, Some(u)) => {
            // f = −Δu + γu
            let lap = u.laplacian(D);
            match &gamma {
                Some(g) => Expr::Sub(
                    Box::new(Expr::Mul(Box::new(g.clone()), Box::new(u.clone()))),
                    Box::new(lap),
                ),
                None => Expr::Neg(Box::new(lap)),
            }
        }
        (None, None) => {
            return Err(CliError::validation(
                "source",
                "required without an exact solution",
            ))
        }
    };
    let flux: FluxField<D> = match (&cfg.flux, &exact) {
        (Some(text), _) => {
            let g = parse("flux", text, Variables::with_normals(D))?;
            Arc::new(move |s, n| {
                let mut v = [0.0; 6];
                v[..D].copy_from_slice(s);
                v[D..2 * D].copy_from_slice(n);
                g.eval(&v)
            })
        }
        (None, Some(u)) => {
            let grad: Vec<Expr> = (0..D).map(|k| u.derivative(k)).collect();
            Arc::new(move |s, n| grad.iter().zip(n).map(|(g, nk)| g.eval(s) * nk).sum())
        }
        (None, None) => {
            return Err(CliError::validation(
                "flux",
                "required without an exact solution",
            ))
        }
    };
    Ok(Prepared {
        mapping,
        gamma: gamma.map(field_from),
        source: field_from(source),
        flux,
        exact: exact.map(field_from),
        mode,
    })
}

pub enum Problem {
    Planar(Prepared<2>),
    Spatial(Prepared<3>),
}

impl Problem {
    pub fn from_config(cfg: &RunConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        let mode: Mode = cfg.mode.into();
        Ok(match cfg.case {
            CaseName::PlanarQuadratic => {
                Problem::Planar(Prepared::from_manufactured(planar_problem(cfg.a)?, mode))
            }
            CaseName::Ellipsoid => {
                let p = match cfg.matrix_as::<3>()? {
                    Some(m) if m != ellipsoid_matrix() => linear_problem(m)?,
                    _ => ellipsoid_problem(),
                };
                Problem::Spatial(Prepared::from_manufactured(p, mode))
            }
            CaseName::Star => {
                Problem::Spatial(Prepared::from_manufactured(star_problem(cfg.e_s)?, mode))
            }
            CaseName::Custom => match cfg.dimension() {
                2 => Problem::Planar(custom(cfg, custom_map_2d(cfg)?)?),
                _ => Problem::Spatial(custom(cfg, custom_map_3d(cfg)?)?),
            },
        })
    }

    pub fn run(&self, degree: usize, quad_order: usize) -> Result<RunReport, CliError> {
        match self {
            Problem::Planar(p) => p.run(degree, quad_order),
            Problem::Spatial(p) => p.run(degree, quad_order),
        }
    }
}

fn custom_map_2d(cfg: &RunConfig) -> Result<Arc<dyn DomainMapping<2>>, CliError> {
    match cfg.map {
        Some(MapName::PlanarQuadratic) => Ok(Arc::new(PlanarQuadraticMap::new(cfg.a)?)),
        _ => common_map::<2>(cfg),
    }
}

fn custom_map_3d(cfg: &RunConfig) -> Result<Arc<dyn DomainMapping<3>>, CliError> {
    match cfg.map {
        Some(MapName::Star) => Ok(Arc::new(StarShapedMap::new(TestSurface, cfg.e_s)?)),
        _ => common_map::<3>(cfg),
    }
}

/// Maps available in both dimensions.
fn common_map<const D: usize>(cfg: &RunConfig) -> Result<Arc<dyn DomainMapping<D>>, CliError> {
    match cfg.map {
        Some(MapName::Identity) => Ok(Arc::new(IdentityMap::<D>)),
        Some(MapName::Linear) => {
            let m = cfg
                .matrix_as::<D>()?
                .ok_or_else(|| CliError::validation("matrix", "required for the linear map"))?;
            Ok(Arc::new(LinearMap::new(m)?))
        }
        _ => Err(CliError::validation(
            "map",
            format!("not available with dim = {D}"),
        )),
    }
}

/// Runs every configured degree in ascending order.
pub fn run_config(cfg: &RunConfig) -> Result<Vec<RunReport>, CliError> {
    let problem = Problem::from_config(cfg)?;
    cfg.degrees
        .iter()
        .map(|&n| {
            let q = cfg.quad.order_for(n);
            if q < n + 1 {
                warn!("quadrature order {q} is below n + 1 = {}", n + 1);
            }
            let report = problem.run(n, q)?;
            info!(
                "n={n} N={} error={:.3e} cond={:.1} ({:.2}s)",
                report.size, report.max_error, report.condition, report.seconds
            );
            Ok(report)
        })
        .collect()
}
