//! Smooth invertible maps `Φ` from the closed unit ball onto `Ω̄`.
//!
//! A mapping supplies `Φ` and its Jacobian `J = DΦ`; the inverse `Ψ` is
//! optional. Everything the transformed variational problem needs
//! (`A = J⁻¹J⁻ᵀ`, `|det J|`, boundary measure factors and outward normals)
//! is derived from those two.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::spherical_to_cartesian;
use crate::small::{self, Matrix, Point};

/// Jacobians with `|det J|` below this are treated as singular.
pub const SINGULAR_DET: f64 = 1e-13;

pub trait DomainMapping<const D: usize>: Send + Sync {
    /// `Φ(x)`
    fn forward(&self, x: &Point<D>) -> Point<D>;

    /// `J(x) = DΦ(x)`, row `i` holding `∂Φ_i/∂x_j`.
    fn jacobian(&self, x: &Point<D>) -> Matrix<D>;

    /// `Ψ(s) = Φ⁻¹(s)` when known in closed form.
    fn inverse(&self, _s: &Point<D>) -> Option<Point<D>> {
        None
    }
}

/// `A(x) = J⁻¹J⁻ᵀ` and `|det J(x)|` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientField<const D: usize> {
    pub a: Matrix<D>,
    pub jac_det: f64,
}

/// Pullback data at one reference point.
#[derive(Debug, Clone, Copy)]
pub struct LocalGeometry<const D: usize> {
    pub image: Point<D>,
    pub jacobian: Matrix<D>,
    pub inverse: Matrix<D>,
    pub det: f64,
}

impl<const D: usize> LocalGeometry<D> {
    pub fn at(map: &dyn DomainMapping<D>, x: &Point<D>) -> Result<Self> {
        let jacobian = map.jacobian(x);
        let det = small::det(&jacobian);
        if !(det.abs() >= SINGULAR_DET) {
            return Err(Error::SingularJacobian {
                point: x.to_vec(),
                det: det.abs(),
            });
        }
        let inverse = small::inverse(&jacobian).ok_or(Error::SingularJacobian {
            point: x.to_vec(),
            det: det.abs(),
        })?;
        Ok(Self {
            image: map.forward(x),
            jacobian,
            inverse,
            det,
        })
    }

    /// `J⁻ᵀ v`, the physical gradient of a function whose reference gradient is `v`.
    pub fn physical_gradient(&self, v: &Point<D>) -> Point<D> {
        small::mat_t_vec(&self.inverse, v)
    }
}

/// `A = J⁻¹J⁻ᵀ` (symmetric by construction) together with `|det J|`.
pub fn coefficient_matrix<const D: usize>(
    map: &dyn DomainMapping<D>,
    x: &Point<D>,
) -> Result<CoefficientField<D>> {
    let g = LocalGeometry::at(map, x)?;
    let mut a = [[0.0; D]; D];
    for i in 0..D {
        for j in i..D {
            let v: f64 = (0..D).map(|k| g.inverse[i][k] * g.inverse[j][k]).sum();
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    Ok(CoefficientField {
        a,
        jac_det: g.det.abs(),
    })
}

/// A boundary point of `Ω` parameterized from `∂B_d`.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint<const D: usize> {
    /// Point on the unit sphere/circle.
    pub reference: Point<D>,
    /// `Φ(reference)` on `∂Ω`.
    pub image: Point<D>,
    /// Outward unit normal of `∂Ω` at `image`.
    pub normal: Point<D>,
    /// `|χ′(θ)|` in 2D, `‖(Φ∘Υ)_θ × (Φ∘Υ)_φ‖` in 3D.
    pub factor: f64,
}

fn outward_normal<const D: usize>(g: &LocalGeometry<D>, reference: &Point<D>) -> Point<D> {
    // Cofactor transport of the reference normal.
    let n = g.physical_gradient(reference);
    let len = small::norm(&n) * g.det.signum();
    n.map(|c| c / len)
}

/// Boundary point for `χ(θ) = Φ(cos θ, sin θ)`.
pub fn boundary_point_2d(map: &dyn DomainMapping<2>, theta: f64) -> Result<BoundaryPoint<2>> {
    let (s, c) = theta.sin_cos();
    let reference = [c, s];
    let g = LocalGeometry::at(map, &reference)?;
    let tangent = small::mat_vec(&g.jacobian, &[-s, c]);
    Ok(BoundaryPoint {
        reference,
        image: g.image,
        normal: outward_normal(&g, &reference),
        factor: small::norm(&tangent),
    })
}

/// Boundary point for `Φ∘Υ(1, θ, φ)`.
pub fn boundary_point_3d(
    map: &dyn DomainMapping<3>,
    theta: f64,
    phi: f64,
) -> Result<BoundaryPoint<3>> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let reference = [st * cp, st * sp, ct];
    let g = LocalGeometry::at(map, &reference)?;
    let d_theta = small::mat_vec(&g.jacobian, &[ct * cp, ct * sp, -st]);
    let d_phi = small::mat_vec(&g.jacobian, &[-st * sp, st * cp, 0.0]);
    Ok(BoundaryPoint {
        reference,
        image: g.image,
        normal: outward_normal(&g, &reference),
        factor: small::norm(&small::cross(&d_theta, &d_phi)),
    })
}

/// `|χ′(θ)|` for a planar mapping.
pub fn boundary_factor_2d(map: &dyn DomainMapping<2>, theta: f64) -> Result<f64> {
    Ok(boundary_point_2d(map, theta)?.factor)
}

/// `‖(Φ∘Υ)_θ × (Φ∘Υ)_φ‖` at `ρ = 1`.
pub fn boundary_factor_3d(map: &dyn DomainMapping<3>, theta: f64, phi: f64) -> Result<f64> {
    Ok(boundary_point_3d(map, theta, phi)?.factor)
}

/// Samples `det J` on a grid of at least `10⁴` points of the closed ball and
/// returns `(min, max)` of `det J`. Fails if the determinant changes sign or
/// comes within [`SINGULAR_DET`] of zero.
pub fn check_invertible<const D: usize>(map: &dyn DomainMapping<D>) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut visit = |x: Point<D>| -> Result<()> {
        let d = small::det(&map.jacobian(&x));
        if !(d.abs() >= SINGULAR_DET) {
            return Err(Error::SingularJacobian {
                point: x.to_vec(),
                det: d.abs(),
            });
        }
        lo = lo.min(d);
        hi = hi.max(d);
        Ok(())
    };
    match D {
        2 => {
            for i in 0..=100 {
                let r = i as f64 / 100.0;
                for j in 0..100 {
                    let t = 2.0 * PI * j as f64 / 100.0;
                    let mut x = [0.0; D];
                    x[0] = r * t.cos();
                    x[1] = r * t.sin();
                    visit(x)?;
                }
            }
        }
        3 => {
            for i in 0..=22 {
                let r = i as f64 / 22.0;
                for j in 0..=22 {
                    let theta = PI * j as f64 / 22.0;
                    for k in 0..22 {
                        let w = spherical_to_cartesian(theta, 2.0 * PI * k as f64 / 22.0);
                        let mut x = [0.0; D];
                        x.copy_from_slice(&w.map(|c| r * c)[..D]);
                        visit(x)?;
                    }
                }
            }
        }
        _ => return Err(Error::UnsupportedDimension(D)),
    }
    if lo < 0.0 && hi > 0.0 {
        return Err(Error::InconsistentProblem(format!(
            "det J changes sign on the ball (range [{lo:e}, {hi:e}])"
        )));
    }
    Ok((lo, hi))
}

/// `Φ = id`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMap<const D: usize>;

impl<const D: usize> DomainMapping<D> for IdentityMap<D> {
    fn forward(&self, x: &Point<D>) -> Point<D> {
        *x
    }

    fn jacobian(&self, _x: &Point<D>) -> Matrix<D> {
        small::identity()
    }

    fn inverse(&self, s: &Point<D>) -> Option<Point<D>> {
        Some(*s)
    }
}

/// `Φ(x, y) = (x − y + a x², x + y)` with `0 < a < 1`.
#[derive(Debug, Clone, Copy)]
pub struct PlanarQuadraticMap {
    a: f64,
}

impl PlanarQuadraticMap {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::invalid("a", format!("must lie in (0, 1), got {a}")));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

impl DomainMapping<2> for PlanarQuadraticMap {
    fn forward(&self, x: &Point<2>) -> Point<2> {
        [x[0] - x[1] + self.a * x[0] * x[0], x[0] + x[1]]
    }

    fn jacobian(&self, x: &Point<2>) -> Matrix<2> {
        [[1.0 + 2.0 * self.a * x[0], -1.0], [1.0, 1.0]]
    }

    fn inverse(&self, s: &Point<2>) -> Option<Point<2>> {
        let a = self.a;
        let disc = 1.0 + a * (s[0] + s[1]);
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt() - 1.0;
        Some([root / a, (a * s[1] - root) / a])
    }
}

/// `Φ(x) = M x` for a nonsingular matrix `M`.
#[derive(Debug, Clone, Copy)]
pub struct LinearMap<const D: usize> {
    matrix: Matrix<D>,
    inverse: Matrix<D>,
}

impl<const D: usize> LinearMap<D> {
    pub fn new(matrix: Matrix<D>) -> Result<Self> {
        let det = small::det(&matrix);
        if !(det.abs() >= SINGULAR_DET) {
            return Err(Error::SingularJacobian {
                point: vec![0.0; D],
                det: det.abs(),
            });
        }
        let inverse = small::inverse(&matrix).ok_or(Error::SingularJacobian {
            point: vec![0.0; D],
            det: det.abs(),
        })?;
        Ok(Self { matrix, inverse })
    }

    pub fn matrix(&self) -> &Matrix<D> {
        &self.matrix
    }
}

/// The ellipsoid map with rows `(1, −3, 0), (2, 1, 0), (1, 1, 1)`.
pub fn ellipsoid_matrix() -> Matrix<3> {
    [[1.0, -3.0, 0.0], [2.0, 1.0, 0.0], [1.0, 1.0, 1.0]]
}

pub fn linear_map_3d(matrix: Matrix<3>) -> Result<LinearMap<3>> {
    LinearMap::new(matrix)
}

impl<const D: usize> DomainMapping<D> for LinearMap<D> {
    fn forward(&self, x: &Point<D>) -> Point<D> {
        small::mat_vec(&self.matrix, x)
    }

    fn jacobian(&self, _x: &Point<D>) -> Matrix<D> {
        self.matrix
    }

    fn inverse(&self, s: &Point<D>) -> Option<Point<D>> {
        Some(small::mat_vec(&self.inverse, s))
    }
}

/// Boundary radius `R(ω)` of a star-shaped domain, as a function of the unit
/// direction `ω`.
pub trait SphereRadius: Send + Sync {
    fn radius(&self, direction: &Point<3>) -> f64;

    /// Tangential gradient `∇_S R` on the unit sphere.
    fn surface_gradient(&self, direction: &Point<3>) -> Point<3>;
}

/// `R ≡ c`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantRadius(pub f64);

impl SphereRadius for ConstantRadius {
    fn radius(&self, _direction: &Point<3>) -> f64 {
        self.0
    }

    fn surface_gradient(&self, _direction: &Point<3>) -> Point<3> {
        [0.0; 3]
    }
}

/// `R(θ, φ) = 2 + ¾ cos(2φ) sin²θ (7cos²θ − 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TestSurface;

/// The test surface radius in spherical angles.
pub fn test_surface_r(theta: f64, phi: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    2.0 + 0.75 * (2.0 * phi).cos() * st * st * (7.0 * ct * ct - 1.0)
}

impl SphereRadius for TestSurface {
    fn radius(&self, w: &Point<3>) -> f64 {
        // cos(2φ) sin²θ = x² − y², cos θ = z on the unit sphere
        2.0 + 0.75 * (w[0] * w[0] - w[1] * w[1]) * (7.0 * w[2] * w[2] - 1.0)
    }

    fn surface_gradient(&self, w: &Point<3>) -> Point<3> {
        let p = w[0] * w[0] - w[1] * w[1];
        let q = 7.0 * w[2] * w[2] - 1.0;
        let g = [
            0.75 * 2.0 * w[0] * q,
            -0.75 * 2.0 * w[1] * q,
            0.75 * p * 14.0 * w[2],
        ];
        let radial = small::dot(&g, w);
        [
            g[0] - radial * w[0],
            g[1] - radial * w[1],
            g[2] - radial * w[2],
        ]
    }
}

/// `Φ₂(x) = Υ(R̃(ρ, θ, φ), θ, φ)` with `R̃ = t(ρ) R + (1 − t(ρ)) ρ`,
/// `t = 0` on `[0, ½]` and `t = (2ρ − 1)^{e_s}` on `(½, 1]`.
///
/// Equal to the identity on the ball of radius ½.
#[derive(Debug, Clone)]
pub struct StarShapedMap<R> {
    radius: R,
    smoothness: i32,
}

impl<R: SphereRadius> StarShapedMap<R> {
    pub fn new(radius: R, smoothness: u32) -> Result<Self> {
        if smoothness < 2 {
            return Err(Error::invalid(
                "e_s",
                format!("smoothness exponent must be >= 2, got {smoothness}"),
            ));
        }
        for i in 0..=100 {
            let theta = PI * i as f64 / 100.0;
            for j in 0..200 {
                let w = spherical_to_cartesian(theta, 2.0 * PI * j as f64 / 200.0);
                let r = radius.radius(&w);
                if !(r > 1.0) {
                    return Err(Error::invalid(
                        "R",
                        format!("boundary radius must exceed 1, found {r} at θ={theta:.4}"),
                    ));
                }
            }
        }
        Ok(Self {
            radius,
            smoothness: smoothness as i32,
        })
    }

    pub fn blend(&self, rho: f64) -> (f64, f64) {
        if rho <= 0.5 {
            return (0.0, 0.0);
        }
        let e = self.smoothness;
        let u = 2.0 * rho - 1.0;
        (u.powi(e), 2.0 * e as f64 * u.powi(e - 1))
    }

    /// `R̃(ρ, ω)` and `∂R̃/∂ρ`.
    pub fn blended_radius(&self, rho: f64, direction: &Point<3>) -> (f64, f64) {
        let (t, dt) = self.blend(rho);
        let r = self.radius.radius(direction);
        (t * r + (1.0 - t) * rho, dt * (r - rho) + (1.0 - t))
    }
}

impl<R: SphereRadius> DomainMapping<3> for StarShapedMap<R> {
    fn forward(&self, x: &Point<3>) -> Point<3> {
        let rho = small::norm(x);
        if rho <= 0.5 {
            return *x;
        }
        let w = x.map(|c| c / rho);
        let (rt, _) = self.blended_radius(rho, &w);
        w.map(|c| c * rt)
    }

    fn jacobian(&self, x: &Point<3>) -> Matrix<3> {
        let rho = small::norm(x);
        if rho <= 0.5 {
            return small::identity();
        }
        let w = x.map(|c| c / rho);
        let (t, dt) = self.blend(rho);
        let r = self.radius.radius(&w);
        let gs = self.radius.surface_gradient(&w);
        // Φ = s(x) x with s = t R/ρ + 1 − t
        let s = t * r / rho + 1.0 - t;
        let ds_drho = dt * r / rho - t * r / (rho * rho) - dt;
        let grad_s: Point<3> = std::array::from_fn(|k| ds_drho * w[k] + t * gs[k] / (rho * rho));
        let mut j = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                j[a][b] = x[a] * grad_s[b] + if a == b { s } else { 0.0 };
            }
        }
        j
    }

    fn inverse(&self, s: &Point<3>) -> Option<Point<3>> {
        let len = small::norm(s);
        if len <= 0.5 {
            return Some(*s);
        }
        let w = s.map(|c| c / len);
        if len > self.radius.radius(&w) * (1.0 + 1e-12) {
            return None;
        }
        // R̃ is increasing in ρ on [½, 1]: safeguarded Newton.
        let (mut lo, mut hi) = (0.5, 1.0);
        let mut rho = 0.75;
        for _ in 0..200 {
            let (f, df) = self.blended_radius(rho, &w);
            let f = f - len;
            if f > 0.0 {
                hi = rho;
            } else {
                lo = rho;
            }
            let mut next = rho - f / df;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - rho).abs() < 1e-16 {
                rho = next;
                break;
            }
            rho = next;
        }
        Some(w.map(|c| c * rho))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_in_ball<const D: usize>(rng: &mut impl Rng) -> Point<D> {
        loop {
            let p: Point<D> = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            if small::norm(&p) < 1.0 {
                return p;
            }
        }
    }

    fn fd_jacobian<const D: usize>(map: &dyn DomainMapping<D>, x: &Point<D>) -> Matrix<D> {
        let h = 1e-6;
        let mut j = [[0.0; D]; D];
        for c in 0..D {
            let mut xp = *x;
            let mut xm = *x;
            xp[c] += h;
            xm[c] -= h;
            let fp = map.forward(&xp);
            let fm = map.forward(&xm);
            for r in 0..D {
                j[r][c] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        j
    }

    fn assert_jacobian_matches<const D: usize>(map: &dyn DomainMapping<D>, seed: u64) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        for _ in 0..100 {
            let x = random_in_ball::<D>(&mut rng);
            let j = map.jacobian(&x);
            let f = fd_jacobian(map, &x);
            let scale = j.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            for r in 0..D {
                for c in 0..D {
                    assert!((j[r][c] - f[r][c]).abs() <= 1e-5 * scale, "{x:?} ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn identity_coefficients() {
        let f = coefficient_matrix(&IdentityMap::<3>, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(f.a, small::identity());
        assert_eq!(f.jac_det, 1.0);
        assert!((boundary_factor_2d(&IdentityMap::<2>, 1.3).unwrap() - 1.0).abs() < 1e-15);
        let bf = boundary_factor_3d(&IdentityMap::<3>, 0.8, 2.0).unwrap();
        assert!((bf - 0.8f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn planar_map_closed_forms() {
        let map = PlanarQuadraticMap::new(0.5).unwrap();
        assert_eq!(map.forward(&[0.0, 0.0]), [0.0, 0.0]);
        assert_eq!(map.forward(&[1.0, 0.0]), [1.5, 1.0]);
        let f = coefficient_matrix(&map, &[0.0, 0.0]).unwrap();
        assert!((f.jac_det - 2.0).abs() < 1e-15);
        assert!((f.a[0][0] - 0.5).abs() < 1e-15 && f.a[0][1].abs() < 1e-15);
        assert!((f.a[1][1] - 0.5).abs() < 1e-15);

        let (a, x) = (0.5, 0.4);
        let f = coefficient_matrix(&map, &[x, 0.1]).unwrap();
        let pre = 1.0 / (2.0 * (1.0 + a * x) * (1.0 + a * x));
        let expected = [
            [pre, pre * a * x],
            [pre * a * x, pre * (2.0 * a * a * x * x + 2.0 * a * x + 1.0)],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!((f.a[i][j] - expected[i][j]).abs() < 1e-14);
            }
        }
        assert!((f.jac_det - 2.0 * (1.0 + a * x)).abs() < 1e-14);
    }

    #[test]
    fn planar_map_rejects_bad_parameter() {
        assert!(PlanarQuadraticMap::new(0.0).is_err());
        assert!(PlanarQuadraticMap::new(1.0).is_err());
        assert!(PlanarQuadraticMap::new(f64::NAN).is_err());
    }

    #[test]
    fn inverses_round_trip() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let planar = PlanarQuadraticMap::new(0.5).unwrap();
        let linear = linear_map_3d(ellipsoid_matrix()).unwrap();
        let star = StarShapedMap::new(TestSurface, 5).unwrap();
        for _ in 0..100 {
            let x = random_in_ball::<2>(&mut rng);
            let back = planar.inverse(&planar.forward(&x)).unwrap();
            assert!((back[0] - x[0]).abs() < 1e-12 && (back[1] - x[1]).abs() < 1e-12);
            let y = random_in_ball::<3>(&mut rng);
            let back = linear.inverse(&linear.forward(&y)).unwrap();
            assert!((0..3).all(|k| (back[k] - y[k]).abs() < 1e-13));
            let back = star.inverse(&star.forward(&y)).unwrap();
            assert!(
                (0..3).all(|k| (back[k] - y[k]).abs() < 1e-12),
                "{y:?} {back:?}"
            );
        }
    }

    #[test]
    fn linear_map_determinant() {
        let m = linear_map_3d(ellipsoid_matrix()).unwrap();
        let f = coefficient_matrix(&m, &[0.2, 0.0, 0.0]).unwrap();
        assert!((f.jac_det - 7.0).abs() < 1e-14);
        let id = linear_map_3d(small::identity()).unwrap();
        assert_eq!(
            coefficient_matrix(&id, &[0.0; 3]).unwrap().a,
            small::identity()
        );
        assert!(linear_map_3d([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]]).is_err());
    }

    #[test]
    fn jacobians_match_finite_differences() {
        assert_jacobian_matches(&PlanarQuadraticMap::new(0.5).unwrap(), 11);
        assert_jacobian_matches(&linear_map_3d(ellipsoid_matrix()).unwrap(), 12);
        assert_jacobian_matches(&StarShapedMap::new(TestSurface, 5).unwrap(), 13);
        assert_jacobian_matches(&StarShapedMap::new(ConstantRadius(1.7), 3).unwrap(), 14);
    }

    #[test]
    fn coefficient_matrix_is_spd() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(21);
        let planar = PlanarQuadraticMap::new(0.5).unwrap();
        let star = StarShapedMap::new(TestSurface, 5).unwrap();
        for _ in 0..200 {
            let f = coefficient_matrix(&planar, &random_in_ball::<2>(&mut rng)).unwrap();
            assert_eq!(f.a[0][1], f.a[1][0]);
            let m = nalgebra::Matrix2::from_fn(|i, j| f.a[i][j]);
            assert!(m.cholesky().is_some());
            let f = coefficient_matrix(&star, &random_in_ball::<3>(&mut rng)).unwrap();
            let m = nalgebra::Matrix3::from_fn(|i, j| f.a[i][j]);
            assert!(m.transpose() == m);
            assert!(m.cholesky().is_some());
        }
    }

    #[test]
    fn planar_boundary_factor_matches_finite_difference() {
        let map = PlanarQuadraticMap::new(0.5).unwrap();
        let chi = |t: f64| map.forward(&[t.cos(), t.sin()]);
        let h = 1e-6;
        for i in 0..32 {
            let t = 2.0 * PI * i as f64 / 32.0;
            let (p, m) = (chi(t + h), chi(t - h));
            let fd = ((p[0] - m[0]).hypot(p[1] - m[1])) / (2.0 * h);
            let f = boundary_factor_2d(&map, t).unwrap();
            assert!((f - fd).abs() < 1e-6, "{f} vs {fd}");
        }
    }

    #[test]
    fn normals_are_outward_unit_vectors() {
        let map = PlanarQuadraticMap::new(0.5).unwrap();
        for i in 0..16 {
            let t = 2.0 * PI * i as f64 / 16.0;
            let b = boundary_point_2d(&map, t).unwrap();
            assert!((small::norm(&b.normal) - 1.0).abs() < 1e-14);
            // nudging outwards along the normal leaves the domain
            let outside = [
                b.image[0] + 1e-6 * b.normal[0],
                b.image[1] + 1e-6 * b.normal[1],
            ];
            let back = map.inverse(&outside).unwrap();
            assert!(small::norm(&back) > 1.0);
            // normal is orthogonal to χ'
            let tangent = small::mat_vec(&map.jacobian(&b.reference), &[-t.sin(), t.cos()]);
            assert!(small::dot(&tangent, &b.normal).abs() < 1e-13);
        }
        let star = StarShapedMap::new(TestSurface, 5).unwrap();
        let b = boundary_point_3d(&star, 1.0, 0.3).unwrap();
        assert!(small::dot(&b.normal, &b.reference) > 0.0);
    }

    #[test]
    fn test_surface_values() {
        assert!((test_surface_r(0.0, 1.234) - 2.0).abs() < 1e-15);
        assert!((test_surface_r(PI / 2.0, 0.0) - 1.25).abs() < 1e-15);
        let mut min = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..800 {
                let theta = PI * i as f64 / 400.0;
                let phi = 2.0 * PI * j as f64 / 800.0;
                let r = test_surface_r(theta, phi);
                let w = spherical_to_cartesian(theta, phi);
                assert!((TestSurface.radius(&w) - r).abs() < 1e-13);
                min = min.min(r);
            }
        }
        assert!(min > 1.0);
    }

    #[test]
    fn star_map_identity_inside_half_ball() {
        let star = StarShapedMap::new(TestSurface, 5).unwrap();
        let x = [0.2, -0.3, 0.1];
        assert_eq!(star.forward(&x), x);
        assert_eq!(star.jacobian(&x), small::identity());
        let w = spherical_to_cartesian(0.9, 4.0);
        let s = star.forward(&w);
        let r = test_surface_r(0.9, 4.0);
        assert!((0..3).all(|k| (s[k] - r * w[k]).abs() < 1e-14));
    }

    #[test]
    fn star_map_radial_derivative_positive() {
        let star = StarShapedMap::new(TestSurface, 5).unwrap();
        for i in 0..50 {
            let rho = (i as f64 + 0.5) / 50.0;
            for j in 0..20 {
                let theta = PI * (j as f64 + 0.5) / 20.0;
                for k in 0..40 {
                    let w = spherical_to_cartesian(theta, 2.0 * PI * k as f64 / 40.0);
                    assert!(star.blended_radius(rho, &w).1 > 0.0);
                }
            }
        }
    }

    #[test]
    fn constant_radius_maps_boundary_to_sphere() {
        let star = StarShapedMap::new(ConstantRadius(1.8), 4).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let theta = rng.random_range(0.0..PI);
            let phi = rng.random_range(0.0..2.0 * PI);
            let s = star.forward(&spherical_to_cartesian(theta, phi));
            assert!((small::norm(&s) - 1.8).abs() < 1e-12);
        }
    }

    #[test]
    fn star_map_validation() {
        assert!(StarShapedMap::new(TestSurface, 1).is_err());
        assert!(StarShapedMap::new(ConstantRadius(0.9), 5).is_err());
    }

    #[test]
    fn invertibility_sampling() {
        let (lo, _) = check_invertible(&PlanarQuadraticMap::new(0.5).unwrap()).unwrap();
        assert!(lo > 0.0);
        check_invertible(&StarShapedMap::new(TestSurface, 5).unwrap()).unwrap();
        struct Fold;
        impl DomainMapping<2> for Fold {
            fn forward(&self, x: &Point<2>) -> Point<2> {
                [x[0] * x[0], x[1]]
            }
            fn jacobian(&self, x: &Point<2>) -> Matrix<2> {
                [[2.0 * x[0], 0.0], [0.0, 1.0]]
            }
        }
        assert!(check_invertible(&Fold).is_err());
    }
}
