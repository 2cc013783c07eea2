use std::sync::Arc;

use neumann_spectral::cases::{ellipsoid_problem, planar_problem, star_problem};
use neumann_spectral::galerkin::{assemble, FluxField, Mode, ProblemSpec, ScalarField};
use neumann_spectral::mapping::{ellipsoid_matrix, linear_map_3d, LinearMap};
use neumann_spectral::solve::{energy, evaluation_grid, max_grid_error, run, solve_dense};
use neumann_spectral::{Ball, ReferenceBall};

fn assert_spd<const D: usize>(spec: &ProblemSpec<D>)
where
    Ball<D>: ReferenceBall<D>,
{
    let system = assemble(spec).unwrap();
    assert!(
        system.asymmetry() < 1e-12,
        "n={} asymmetry {}",
        spec.degree,
        system.asymmetry()
    );
    assert!(
        system.matrix.clone().cholesky().is_some(),
        "n={} not SPD",
        spec.degree
    );
}

#[test]
fn matrices_are_spd_up_to_degree_12() {
    let planar = planar_problem(0.5).unwrap();
    for n in 0..=12 {
        assert_spd(&planar.spec(Mode::Helmholtz, n, n + 4));
    }
    let ellipsoid = ellipsoid_problem();
    let star = star_problem(5).unwrap();
    for n in [1, 4, 8, 12] {
        assert_spd(&ellipsoid.spec(Mode::Helmholtz, n, n + 4));
        assert_spd(&star.spec(Mode::Helmholtz, n, n + 4));
    }
}

#[test]
fn galerkin_residual_vanishes_per_member() {
    let planar = planar_problem(0.5).unwrap();
    for mode in [Mode::Helmholtz, Mode::PurePoisson] {
        let system = assemble(&planar.spec(mode, 14, 18)).unwrap();
        let solution = solve_dense(&system).unwrap();
        let r = &system.matrix * solution.coefficients() - &system.rhs;
        let tol = 1e-10 * system.rhs.norm();
        assert!(r.amax() < tol, "{mode:?}: residual {} vs {tol}", r.amax());
    }
    let system = assemble(&ellipsoid_problem().spec(Mode::Helmholtz, 6, 10)).unwrap();
    let solution = solve_dense(&system).unwrap();
    let r = &system.matrix * solution.coefficients() - &system.rhs;
    assert!(r.amax() < 1e-10 * system.rhs.norm());
}

#[test]
fn energy_is_non_decreasing_in_degree() {
    let planar = planar_problem(0.5).unwrap();
    let mut last = 0.0;
    for n in 0..=12 {
        let system = assemble(&planar.spec(Mode::Helmholtz, n, 16)).unwrap();
        let e = energy(&system, &solve_dense(&system).unwrap());
        assert!(e >= last * (1.0 - 1e-12), "n={n}: {e} < {last}");
        last = e;
    }
    let ellipsoid = ellipsoid_problem();
    let mut last = 0.0;
    for n in 0..=7 {
        let system = assemble(&ellipsoid.spec(Mode::Helmholtz, n, 11)).unwrap();
        let e = energy(&system, &solve_dense(&system).unwrap());
        assert!(e >= last * (1.0 - 1e-12), "n={n}: {e} < {last}");
        last = e;
    }
}

fn cubic_2d() -> (ProblemSpec<2>, ScalarField<2>) {
    // u = s²t − 3t + 1 with γ = 1 on a sheared ellipse; u∘Φ has degree 3.
    let map = LinearMap::new([[2.0, 1.0], [0.0, 1.0]]).unwrap();
    let exact: ScalarField<2> = Arc::new(|s| s[0] * s[0] * s[1] - 3.0 * s[1] + 1.0);
    let u = exact.clone();
    let source: ScalarField<2> = Arc::new(move |s| -2.0 * s[1] + u(s));
    let flux: FluxField<2> = Arc::new(|s, n| 2.0 * s[0] * s[1] * n[0] + (s[0] * s[0] - 3.0) * n[1]);
    let spec = ProblemSpec {
        mapping: Arc::new(map),
        gamma: Some(Arc::new(|_| 1.0)),
        source,
        flux,
        degree: 3,
        quad_order: 6,
        mode: Mode::Helmholtz,
    };
    (spec, exact)
}

#[test]
fn polynomial_solutions_are_reproduced() {
    let (mut spec, exact) = cubic_2d();
    for n in [3, 5] {
        spec.degree = n;
        let (report, _, _) = run(&spec, &|s| exact(s)).unwrap();
        assert!(report.max_error < 1e-9, "2D n={n}: {}", report.max_error);
    }

    // u = s₁s₂ + s₃² with γ = 1 on the ellipsoid.
    let exact: ScalarField<3> = Arc::new(|s| s[0] * s[1] + s[2] * s[2]);
    let u = exact.clone();
    let spec = ProblemSpec {
        mapping: Arc::new(linear_map_3d(ellipsoid_matrix()).unwrap()),
        gamma: Some(Arc::new(|_| 1.0)),
        source: Arc::new(move |s| -2.0 + u(s)),
        flux: Arc::new(|s, n| s[1] * n[0] + s[0] * n[1] + 2.0 * s[2] * n[2]),
        degree: 2,
        quad_order: 5,
        mode: Mode::Helmholtz,
    };
    let (report, _, _) = run(&spec, &|s| exact(s)).unwrap();
    assert!(report.max_error < 1e-9, "3D: {}", report.max_error);
}

#[test]
fn pure_poisson_reproduces_polynomial_up_to_constant() {
    let (spec, exact) = cubic_2d();
    let spec = ProblemSpec {
        gamma: None,
        source: Arc::new(|s| -2.0 * s[1]),
        mode: Mode::PurePoisson,
        degree: 4,
        ..spec
    };
    let system = assemble(&spec).unwrap();
    assert!(system.compatibility.unwrap().abs() < 1e-10);
    let solution = solve_dense(&system).unwrap();
    let err = max_grid_error(&solution, &|s| exact(s), &evaluation_grid::<2>()).unwrap();
    assert!(err < 1e-9, "{err}");
}

#[test]
fn assembly_is_independent_of_thread_count() {
    let spec = star_problem(5).unwrap().spec(Mode::Helmholtz, 6, 10);
    let build = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| assemble(&spec).unwrap())
    };
    let one = build(1);
    let four = build(4);
    let scale = one.matrix.amax();
    assert!((&one.matrix - &four.matrix).amax() <= 1e-13 * scale);
    assert!((&one.rhs - &four.rhs).amax() <= 1e-13 * one.rhs.amax());
}
