//! Assembly of the spectral Galerkin system on the reference ball.
//!
//! For trial/test members `φ_k`, `φ_ℓ` the matrix entry is
//!
//! ```text
//! ∫_B [ (∇φ_ℓ)ᵀ A(x) ∇φ_k + γ(Φ(x)) φ_k φ_ℓ ] |det J(x)| dx
//! ```
//!
//! and the load is `∫_B f(Φ) φ_ℓ |det J| dx + ∫_{∂B} g(Φ) φ_ℓ |J_bdy|`.
//! Since `(∇φ)ᵀ A ∇ψ = (J⁻ᵀ∇φ)·(J⁻ᵀ∇ψ)`, the stiffness part is accumulated
//! as `GᵀG` with `G` holding the weighted physical gradients at each node.
//!
//! In [`Mode::PurePoisson`] the basis is replaced by the zero-weighted-mean
//! members `φ̂_j = φ_j − (1/C)∫_B φ_j |det J|`, `j ≥ 2`.

use std::sync::Arc;

use log::warn;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::basis::{BallBasis, BasisSet, DiskBasis};
use crate::error::{Error, Result};
use crate::mapping::{
    boundary_point_2d, boundary_point_3d, BoundaryPoint, DomainMapping, LocalGeometry,
};
use crate::quadrature::{
    ball_rule, circle_boundary_rule, disk_rule, sphere_boundary_rule, QuadratureRule,
};
use crate::small::Point;

/// Nodes per work unit in the parallel assembly loops.
const CHUNK: usize = 512;

pub type ScalarField<const D: usize> = Arc<dyn Fn(&Point<D>) -> f64 + Send + Sync>;

/// Boundary flux `g(s, n)` evaluated at a boundary point `s` with outward unit normal `n`.
pub type FluxField<const D: usize> = Arc<dyn Fn(&Point<D>, &Point<D>) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// `−Δu + γu = f` with `γ > 0`: uniquely solvable.
    Helmholtz,
    /// `−Δu = f`: solution normalized to zero mean over `Ω`.
    PurePoisson,
}

/// Quadrature weights paired with a boundary point.
#[derive(Debug, Clone, Copy)]
pub struct BoundarySample<const D: usize> {
    pub point: BoundaryPoint<D>,
    /// Weight such that `Σ weight · h(point)` approximates `∫_{∂Ω} h ds`.
    pub weight: f64,
}

/// Marker for the reference unit ball in `R^D`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ball<const D: usize>;

/// Dimension-specific ingredients: basis, quadrature, boundary sampling.
pub trait ReferenceBall<const D: usize> {
    type Basis: BasisSet<D> + 'static;

    fn basis(degree: usize) -> Self::Basis;

    fn interior_rule(q: usize) -> Result<QuadratureRule<D>>;

    fn boundary_samples(map: &dyn DomainMapping<D>, q: usize) -> Result<Vec<BoundarySample<D>>>;

    /// Volume of the unit ball.
    fn measure() -> f64;
}

impl ReferenceBall<2> for Ball<2> {
    type Basis = DiskBasis;

    fn basis(degree: usize) -> DiskBasis {
        DiskBasis::new(degree)
    }

    fn interior_rule(q: usize) -> Result<QuadratureRule<2>> {
        disk_rule(q)
    }

    fn boundary_samples(map: &dyn DomainMapping<2>, q: usize) -> Result<Vec<BoundarySample<2>>> {
        circle_boundary_rule(q)
            .iter()
            .map(|(theta, w)| {
                let point = boundary_point_2d(map, theta[0])?;
                Ok(BoundarySample {
                    point,
                    weight: w * point.factor,
                })
            })
            .collect()
    }

    fn measure() -> f64 {
        std::f64::consts::PI
    }
}

impl ReferenceBall<3> for Ball<3> {
    type Basis = BallBasis;

    fn basis(degree: usize) -> BallBasis {
        BallBasis::new(degree)
    }

    fn interior_rule(q: usize) -> Result<QuadratureRule<3>> {
        ball_rule(q)
    }

    fn boundary_samples(map: &dyn DomainMapping<3>, q: usize) -> Result<Vec<BoundarySample<3>>> {
        // The sphere rule integrates against sin θ dθ dφ, so divide it back out.
        sphere_boundary_rule(q)
            .iter()
            .map(|(angles, w)| {
                let point = boundary_point_3d(map, angles[0], angles[1])?;
                Ok(BoundarySample {
                    point,
                    weight: w * point.factor / angles[0].sin(),
                })
            })
            .collect()
    }

    fn measure() -> f64 {
        4.0 * std::f64::consts::PI / 3.0
    }
}

/// Problem data for one solve.
#[derive(Clone)]
pub struct ProblemSpec<const D: usize> {
    pub mapping: Arc<dyn DomainMapping<D>>,
    /// `γ(s)`; must be `None` in [`Mode::PurePoisson`] and `Some` otherwise.
    pub gamma: Option<ScalarField<D>>,
    pub source: ScalarField<D>,
    pub flux: FluxField<D>,
    pub degree: usize,
    pub quad_order: usize,
    pub mode: Mode,
}

impl<const D: usize> std::fmt::Debug for ProblemSpec<D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("dimension", &D)
            .field("degree", &self.degree)
            .field("quad_order", &self.quad_order)
            .field("mode", &self.mode)
            .field("has_gamma", &self.gamma.is_some())
            .finish()
    }
}

impl<const D: usize> ProblemSpec<D> {
    pub fn validate(&self) -> Result<()> {
        if D != 2 && D != 3 {
            return Err(Error::UnsupportedDimension(D));
        }
        match (self.mode, &self.gamma) {
            (Mode::PurePoisson, Some(_)) => {
                return Err(Error::InconsistentProblem(
                    "pure Poisson mode requires γ ≡ 0 (omit gamma)".into(),
                ))
            }
            (Mode::Helmholtz, None) => {
                return Err(Error::InconsistentProblem(
                    "γ ≡ 0 has no unique solution; use pure Poisson mode".into(),
                ))
            }
            _ => {}
        }
        if self.quad_order < 1 {
            return Err(Error::invalid("q", "quadrature order must be >= 1"));
        }
        if self.quad_order < self.degree + 1 {
            warn!(
                "quadrature order q={} is below n+1={}; integrals will be inexact",
                self.quad_order,
                self.degree + 1
            );
        }
        Ok(())
    }
}

/// Shifts turning the `L²` basis into the zero-weighted-mean basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedBasis {
    /// `C = ∫_B |det J| dx`.
    pub c: f64,
    /// `shifts[j] = (1/C) ∫_B φ_j |det J| dx`, so `φ̂_j = φ_j − shifts[j]`.
    /// Entry 0 belongs to the constant member, whose `φ̂` vanishes.
    pub shifts: Vec<f64>,
}

impl ConstrainedBasis {
    /// Number of retained members (`N − 1`).
    pub fn len(&self) -> usize {
        self.shifts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Quadrature nodes of the reference ball paired with the pullback geometry.
#[derive(Debug, Clone)]
pub(crate) struct GeometryNodes<const D: usize> {
    pub x: Vec<Point<D>>,
    pub weight: Vec<f64>,
    pub geometry: Vec<LocalGeometry<D>>,
}

impl<const D: usize> GeometryNodes<D> {
    pub fn new(map: &dyn DomainMapping<D>, rule: &QuadratureRule<D>) -> Result<Self> {
        let geometry = rule
            .nodes()
            .par_iter()
            .map(|x| LocalGeometry::at(map, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            x: rule.nodes().to_vec(),
            weight: rule.weights().to_vec(),
            geometry,
        })
    }

    /// `w · |det J|` at node `i`.
    pub fn volume_weight(&self, i: usize) -> f64 {
        self.weight[i] * self.geometry[i].det.abs()
    }
}

fn check_leading_constant<const D: usize>(basis: &dyn BasisSet<D>) -> Result<()> {
    let probes: [f64; 3] = [0.0, 0.37, -0.61];
    let mut values = vec![0.0; basis.len()];
    let mut grads = vec![[0.0; D]; basis.len()];
    let mut first = None;
    for (i, &p) in probes.iter().enumerate() {
        let mut x = [0.0; D];
        x[i % D] = p;
        x[(i + 1) % D] = 0.5 * p;
        basis.eval_into(&x, &mut values, &mut grads);
        let v0 = values[0];
        let reference = *first.get_or_insert(v0);
        if v0 == 0.0
            || (v0 - reference).abs() > 1e-12 * reference.abs()
            || grads[0].iter().any(|g| *g != 0.0)
        {
            return Err(Error::NonConstantLeadingBasis);
        }
    }
    Ok(())
}

fn constrained_from_nodes<const D: usize>(
    basis: &dyn BasisSet<D>,
    nodes: &GeometryNodes<D>,
) -> Result<ConstrainedBasis> {
    if basis.is_empty() {
        return Err(Error::NonConstantLeadingBasis);
    }
    check_leading_constant(basis)?;
    let n = basis.len();
    let (c, moments) = (0..nodes.x.len())
        .into_par_iter()
        .fold(
            || (0.0, vec![0.0; n], vec![0.0; n], vec![[0.0; D]; n]),
            |(mut c, mut m, mut v, mut g), i| {
                basis.eval_into(&nodes.x[i], &mut v, &mut g);
                let w = nodes.volume_weight(i);
                c += w;
                for (mk, vk) in m.iter_mut().zip(&v) {
                    *mk += w * vk;
                }
                (c, m, v, g)
            },
        )
        .map(|(c, m, _, _)| (c, m))
        .reduce(
            || (0.0, vec![0.0; n]),
            |(c1, mut m1), (c2, m2)| {
                m1.iter_mut().zip(&m2).for_each(|(a, b)| *a += b);
                (c1 + c2, m1)
            },
        );
    Ok(ConstrainedBasis {
        c,
        shifts: moments.into_iter().map(|m| m / c).collect(),
    })
}

/// `C` and the basis shifts defining `φ̂_j`, with the integrals done by the
/// interior rule of order `q`.
pub fn constrained_basis<const D: usize>(
    basis: &dyn BasisSet<D>,
    mapping: &dyn DomainMapping<D>,
    q: usize,
) -> Result<ConstrainedBasis>
where
    Ball<D>: ReferenceBall<D>,
{
    let rule = Ball::<D>::interior_rule(q)?;
    let nodes = GeometryNodes::new(mapping, &rule)?;
    constrained_from_nodes(basis, &nodes)
}

/// The projection `(Pũ)(x) = ũ(x) − (1/C) ∫_B |det J| ũ dy`.
#[derive(Clone)]
pub struct MeanZeroProjection<const D: usize> {
    nodes: Arc<GeometryNodes<D>>,
    c: f64,
}

impl<const D: usize> MeanZeroProjection<D> {
    pub fn new(mapping: &dyn DomainMapping<D>, q: usize) -> Result<Self>
    where
        Ball<D>: ReferenceBall<D>,
    {
        let rule = Ball::<D>::interior_rule(q)?;
        let nodes = GeometryNodes::new(mapping, &rule)?;
        let c = (0..nodes.x.len()).map(|i| nodes.volume_weight(i)).sum();
        Ok(Self {
            nodes: Arc::new(nodes),
            c,
        })
    }

    /// `C = ∫_B |det J|`, the measure of `Ω`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `∫_B |det J| ũ dx`.
    pub fn weighted_integral(&self, u: &dyn Fn(&Point<D>) -> f64) -> f64 {
        (0..self.nodes.x.len())
            .map(|i| self.nodes.volume_weight(i) * u(&self.nodes.x[i]))
            .sum()
    }

    /// `(1/C) ∫_B |det J| ũ dx`.
    pub fn weighted_mean(&self, u: &dyn Fn(&Point<D>) -> f64) -> f64 {
        self.weighted_integral(u) / self.c
    }

    /// `Pũ` as a new function on the reference ball.
    pub fn apply<'a>(&self, u: &'a dyn Fn(&Point<D>) -> f64) -> impl Fn(&Point<D>) -> f64 + 'a {
        let mean = self.weighted_mean(u);
        move |x| u(x) - mean
    }
}

/// `∫_Ω f ds + ∫_{∂Ω} g ds`, pulled back to the ball. Zero for compatible
/// pure-Poisson data.
pub fn compatibility_check<const D: usize>(spec: &ProblemSpec<D>) -> Result<f64>
where
    Ball<D>: ReferenceBall<D>,
{
    let (interior, boundary) = data_integrals(spec)?;
    Ok(interior + boundary)
}

fn data_integrals<const D: usize>(spec: &ProblemSpec<D>) -> Result<(f64, f64)>
where
    Ball<D>: ReferenceBall<D>,
{
    let rule = Ball::<D>::interior_rule(spec.quad_order)?;
    let nodes = GeometryNodes::new(spec.mapping.as_ref(), &rule)?;
    let interior = (0..nodes.x.len())
        .map(|i| nodes.volume_weight(i) * (spec.source)(&nodes.geometry[i].image))
        .sum();
    let boundary = Ball::<D>::boundary_samples(spec.mapping.as_ref(), spec.quad_order)?
        .iter()
        .map(|b| b.weight * (spec.flux)(&b.point.image, &b.point.normal))
        .sum();
    Ok((interior, boundary))
}

/// Assembled linear system `M α = b`.
#[derive(Clone)]
pub struct GalerkinSystem<const D: usize> {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub mode: Mode,
    pub degree: usize,
    pub quad_order: usize,
    pub basis: Arc<dyn BasisSet<D>>,
    pub mapping: Arc<dyn DomainMapping<D>>,
    /// Present in [`Mode::PurePoisson`].
    pub constraint: Option<ConstrainedBasis>,
    /// `∫f + ∫g` for pure-Poisson data.
    pub compatibility: Option<f64>,
}

impl<const D: usize> std::fmt::Debug for GalerkinSystem<D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GalerkinSystem")
            .field("size", &self.rhs.len())
            .field("mode", &self.mode)
            .field("degree", &self.degree)
            .field("quad_order", &self.quad_order)
            .field("constraint", &self.constraint)
            .field("compatibility", &self.compatibility)
            .finish()
    }
}

impl<const D: usize> GalerkinSystem<D> {
    pub fn size(&self) -> usize {
        self.rhs.len()
    }

    /// `‖M − Mᵀ‖_∞ / ‖M‖_∞`
    pub fn asymmetry(&self) -> f64 {
        let m = &self.matrix;
        let row_sum = |a: &DMatrix<f64>| {
            a.row_iter()
                .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        let diff = m - m.transpose();
        row_sum(&diff) / row_sum(m)
    }
}

struct Accumulator {
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl Accumulator {
    fn zeros(n: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(n, n),
            rhs: DVector::zeros(n),
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.matrix += other.matrix;
        self.rhs += other.rhs;
        self
    }
}

/// Builds the Galerkin system for `spec`.
pub fn assemble<const D: usize>(spec: &ProblemSpec<D>) -> Result<GalerkinSystem<D>>
where
    Ball<D>: ReferenceBall<D>,
{
    spec.validate()?;
    let basis: Arc<dyn BasisSet<D>> = Arc::new(Ball::<D>::basis(spec.degree));
    let n = basis.len();
    let rule = Ball::<D>::interior_rule(spec.quad_order)?;
    let nodes = GeometryNodes::new(spec.mapping.as_ref(), &rule)?;

    let constraint = match spec.mode {
        Mode::PurePoisson => Some(constrained_from_nodes(basis.as_ref(), &nodes)?),
        Mode::Helmholtz => None,
    };
    let shifts = constraint.as_ref().map(|c| c.shifts.as_slice());

    let indices: Vec<usize> = (0..nodes.x.len()).collect();
    let acc = indices
        .par_chunks(CHUNK)
        .map(|chunk| {
            let rows = chunk.len();
            let mut grads_w = DMatrix::<f64>::zeros(rows * D, n);
            let mut values = DMatrix::<f64>::zeros(rows, n);
            let mut mass_w = DMatrix::<f64>::zeros(rows, n);
            let mut load_w = DVector::<f64>::zeros(rows);
            let mut v = vec![0.0; n];
            let mut g = vec![[0.0; D]; n];
            for (r, &i) in chunk.iter().enumerate() {
                basis.eval_into(&nodes.x[i], &mut v, &mut g);
                if let Some(s) = shifts {
                    v.iter_mut().zip(s).for_each(|(vk, sk)| *vk -= sk);
                }
                let geo = &nodes.geometry[i];
                let w = nodes.volume_weight(i);
                let sw = w.sqrt();
                let gamma = spec.gamma.as_ref().map_or(0.0, |f| f(&geo.image));
                for k in 0..n {
                    let pg = geo.physical_gradient(&g[k]);
                    for c in 0..D {
                        grads_w[(r * D + c, k)] = sw * pg[c];
                    }
                    values[(r, k)] = v[k];
                    mass_w[(r, k)] = w * gamma * v[k];
                }
                load_w[r] = w * (spec.source)(&geo.image);
            }
            let mut acc = Accumulator::zeros(n);
            acc.matrix.gemm_tr(1.0, &grads_w, &grads_w, 0.0);
            if spec.gamma.is_some() {
                acc.matrix.gemm_tr(1.0, &values, &mass_w, 1.0);
            }
            acc.rhs.gemv_tr(1.0, &values, &load_w, 0.0);
            acc
        })
        .reduce(|| Accumulator::zeros(n), Accumulator::merge);

    let mut matrix = acc.matrix;
    let mut rhs = acc.rhs;

    let boundary = Ball::<D>::boundary_samples(spec.mapping.as_ref(), spec.quad_order)?;
    let mut v = vec![0.0; n];
    let mut g = vec![[0.0; D]; n];
    for b in &boundary {
        let flux = (spec.flux)(&b.point.image, &b.point.normal);
        if flux == 0.0 {
            continue;
        }
        basis.eval_into(&b.point.reference, &mut v, &mut g);
        let scale = b.weight * flux;
        for k in 0..n {
            let vk = v[k] - shifts.map_or(0.0, |s| s[k]);
            rhs[k] += scale * vk;
        }
    }

    // exact symmetry
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
            matrix[(i, j)] = avg;
            matrix[(j, i)] = avg;
        }
    }

    let mut compatibility = None;
    if let Some(c) = &constraint {
        matrix = matrix.view((1, 1), (n - 1, n - 1)).into_owned();
        rhs = rhs.rows(1, n - 1).into_owned();
        let (fi, gi) = data_integrals(spec)?;
        let residual = fi + gi;
        let tol = 1e-8 * (fi.abs() + gi.abs() + 1.0);
        if residual.abs() > tol {
            warn!(
                "pure Poisson data violate ∫f + ∫g = 0 (residual {residual:e}, C = {:.6})",
                c.c
            );
        }
        compatibility = Some(residual);
    }

    Ok(GalerkinSystem {
        matrix,
        rhs,
        mode: spec.mode,
        degree: spec.degree,
        quad_order: spec.quad_order,
        basis,
        mapping: spec.mapping.clone(),
        constraint,
        compatibility,
    })
}
