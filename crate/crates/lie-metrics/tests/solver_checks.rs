//! Solver-level checks: metric axioms within tolerance, agreement with the
//! grid oracle and closed-form values, lifts, and the submetry suite.

use lie_core::deform::DeformedFamily;
use lie_core::grading::{build_asymptotic_grading, Side};
use lie_core::subspace::Subspace;
use lie_core::tensor::{heisenberg, StructureTensor};
use lie_metrics::norm::NormSpec;
use lie_metrics::oracle::{grid_distance, GridOracleConfig};
use lie_metrics::probe::{projected_ball_vertices, submetry_quadratic_check};
use lie_metrics::solver::{estimate_distance, lift_control, rho, SolverConfig};
use lie_metrics::structure::MetricFamily;

fn carnot_heis(norm: NormSpec) -> MetricFamily {
    let t = heisenberg();
    let g = build_asymptotic_grading(&t, None).unwrap();
    let fam = DeformedFamily::new(t, g, Side::Asymptotic).unwrap();
    MetricFamily::new(fam, Subspace::coordinate(3, &[0, 1]), norm).unwrap()
}

fn riem_heis() -> MetricFamily {
    let t = heisenberg();
    let g = build_asymptotic_grading(&t, None).unwrap();
    let fam = DeformedFamily::new(t, g, Side::Asymptotic).unwrap();
    MetricFamily::new(fam, Subspace::full(3), NormSpec::Euclidean).unwrap()
}

fn abelian_plane() -> MetricFamily {
    let t = StructureTensor::new(2, None);
    let g = build_asymptotic_grading(&t, None).unwrap();
    let fam = DeformedFamily::new(t, g, Side::Asymptotic).unwrap();
    MetricFamily::new(fam, Subspace::full(2), NormSpec::Euclidean).unwrap()
}

fn quick_cfg() -> SolverConfig {
    SolverConfig {
        segments: 16,
        starts: 4,
        iters_per_round: 80,
        ..Default::default()
    }
}

#[test]
fn abelian_distance_is_euclidean() {
    let fam = abelian_plane();
    let s = fam.structure_at(&lie_core::rat::rint(1)).unwrap();
    let est = estimate_distance(&s, &[0.0, 0.0], &[3.0, 4.0], &quick_cfg(), &[]).unwrap();
    assert!((est.value - 5.0).abs() < 5e-3, "value {}", est.value);
    assert!(est.report.closure_exact);
}

#[test]
fn heisenberg_center_distance_matches_the_isoperimetric_value() {
    // d(0, e3) is the least perimeter enclosing unit area: 2 sqrt(pi).
    let fam = carnot_heis(NormSpec::Euclidean);
    let s = fam.structure_at(&lie_core::rat::rint(1)).unwrap();
    let cfg = SolverConfig {
        segments: 32,
        starts: 6,
        ..Default::default()
    };
    let est = estimate_distance(&s, &[0.0; 3], &[0.0, 0.0, 1.0], &cfg, &[]).unwrap();
    let exact = 2.0 * std::f64::consts::PI.sqrt();
    assert!(
        est.value >= exact - 1e-6,
        "upper bound {} below the true value {exact}",
        est.value
    );
    assert!(
        est.value <= exact * 1.05,
        "estimate {} too loose vs {exact}",
        est.value
    );
}

#[test]
fn planar_targets_are_straight_lines() {
    let fam = carnot_heis(NormSpec::Euclidean);
    let s = fam.structure_at(&lie_core::rat::rint(1)).unwrap();
    let est = estimate_distance(&s, &[0.0; 3], &[1.0, 1.0, 0.5], &quick_cfg(), &[]).unwrap();
    // The projection onto the plane is 1-Lipschitz, so sqrt(2) is a lower
    // bound; the estimate must stay within a few percent of any feasible
    // competitor found by the coarse oracle.
    assert!(est.value >= 2f64.sqrt() - 1e-9);
    let oracle = grid_distance(&s, &[0.0; 3], &[1.0, 1.0, 0.5], &GridOracleConfig::default())
        .unwrap()
        .unwrap();
    assert!(est.value <= oracle * 1.05, "est {} oracle {oracle}", est.value);
}

#[test]
fn solver_matches_grid_oracle_on_expressible_instances() {
    // Same segment budget on both sides, targets whose optimal few-segment
    // controls lie on the grid: the two independent routes must agree.
    let fam = carnot_heis(NormSpec::Euclidean);
    let s = fam.structure_at(&lie_core::rat::rint(1)).unwrap();
    let cfg = SolverConfig {
        segments: 4,
        starts: 6,
        ..Default::default()
    };
    let oracle_cfg = GridOracleConfig::default();
    for q in [
        [0.75, 0.0, 0.0],
        [0.75, -0.75, 0.0],
        [0.0, 0.0, 0.140625], // square loop of side 0.375: value 1.5 on the grid
    ] {
        let est = estimate_distance(&s, &[0.0; 3], &q, &cfg, &[]).unwrap();
        let oracle = grid_distance(&s, &[0.0; 3], &q, &oracle_cfg).unwrap().unwrap();
        let gap = (est.value - oracle).abs() / oracle.max(1e-9);
        assert!(
            gap <= 0.05,
            "target {q:?}: est {} oracle {oracle}",
            est.value
        );
    }
}

#[test]
fn solver_never_loses_to_the_grid() {
    // On arbitrary targets a coarse grid cannot certify optimality, but the
    // descent must never end up materially worse than exhaustive coarse
    // search.
    let fam = carnot_heis(NormSpec::Euclidean);
    let s = fam.structure_at(&lie_core::rat::rint(1)).unwrap();
    for q in [[0.8, 0.0, 0.3], [0.0, 0.0, 0.6], [-0.5, 0.7, 0.2]] {
        let est = estimate_distance(&s, &[0.0; 3], &q, &quick_cfg(), &[]).unwrap();
        let oracle = grid_distance(&s, &[0.0; 3], &q, &GridOracleConfig::default())
            .unwrap()
            .unwrap();
        assert!(
            est.value <= oracle * 1.05,
            "target {q:?}: est {} oracle {oracle}",
            est.value
        );
    }
}

#[test]
fn metric_axioms_within_tolerance() {
    let fam = riem_heis();
    let s = fam.structure_at(&lie_core::rat::rint(1)).unwrap();
    let cfg = quick_cfg();
    let p = [0.2, -0.3, 0.1];
    let q = [0.6, 0.4, -0.2];
    let r = [0.0, 0.5, 0.3];
    let dpq = estimate_distance(&s, &p, &q, &cfg, &[]).unwrap().value;
    let dqp = estimate_distance(&s, &q, &p, &cfg, &[]).unwrap().value;
    let dpr = estimate_distance(&s, &p, &r, &cfg, &[]).unwrap().value;
    let dqr = estimate_distance(&s, &q, &r, &cfg, &[]).unwrap().value;
    let tol = 0.05 * dpq.max(dqp);
    assert!((dpq - dqp).abs() <= 2.0 * tol, "symmetry: {dpq} vs {dqp}");
    assert!(dpr <= dpq + dqr + 2.0 * tol, "triangle: {dpr} vs {dpq}+{dqr}");

    // Left invariance: d(p, q) = d(0, p^{-1} q).
    let disp = s.product_f(&s.inverse_f(&p), &q);
    let d0 = estimate_distance(&s, &[0.0; 3], &disp, &cfg, &[]).unwrap().value;
    assert!((dpq - d0).abs() <= 2.0 * tol, "left invariance: {dpq} vs {d0}");
}

#[test]
fn rho_at_one_equals_plain_distance_and_carnot_is_flat() {
    let fam = carnot_heis(NormSpec::Euclidean);
    let cfg = quick_cfg();
    let q = [0.7, 0.2, 0.15];
    let d1 = rho(&fam, 1.0, &[0.0; 3], &q, &cfg).unwrap().value;
    for eps in [0.0, 0.25, 0.5] {
        let de = rho(&fam, eps, &[0.0; 3], &q, &cfg).unwrap().value;
        let rel = (de - d1).abs() / d1;
        assert!(rel < 0.02, "eps {eps}: {de} vs {d1}");
    }
}

#[test]
fn lift_is_identity_when_distribution_is_first_layer() {
    let fam = carnot_heis(NormSpec::Euclidean);
    let segs = vec![(1.0, vec![0.3, -0.4])];
    let lifted = lift_control(&fam, 0.5, &segs).unwrap();
    assert!((lifted[0].1[0] - 0.3).abs() < 1e-12);
    assert!((lifted[0].1[1] + 0.4).abs() < 1e-12);
}

#[test]
fn riemannian_lift_of_horizontal_direction_is_minimal() {
    // Lifting e1 from the first layer of the Riemannian Heisenberg: the
    // minimal lift is e1 itself (orthogonal minimality).
    let fam = riem_heis();
    let segs = vec![(1.0, vec![1.0, 0.0])];
    let lifted = lift_control(&fam, 0.25, &segs).unwrap();
    assert!((lifted[0].1[0] - 1.0).abs() < 1e-12);
    assert!(lifted[0].1[1].abs() < 1e-12);
    assert!(lifted[0].1[2].abs() < 1e-12);
}

#[test]
fn lift_norm_equals_limit_norm_for_polytope() {
    // Riemannian Heisenberg with the sup norm: the limit ball is the
    // projected cube; lifts of limit-unit vectors have norm one.
    let t = heisenberg();
    let g = build_asymptotic_grading(&t, None).unwrap();
    let fam = DeformedFamily::new(t, g, Side::Asymptotic).unwrap();
    let family = MetricFamily::new(fam, Subspace::full(3), NormSpec::Linf).unwrap();
    let s0 = family.structure_at(&lie_core::rat::rint(0)).unwrap();
    for v in [[1.0, 0.0], [1.0, 1.0], [-1.0, 0.5]] {
        let nv = s0.norm_coords(&v);
        let unit: Vec<f64> = v.iter().map(|x| x / nv).collect();
        let lifted = lift_control(&family, 0.5, &[(1.0, unit)]).unwrap();
        let spec_norm = lifted[0].1.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!((spec_norm - 1.0).abs() < 1e-6, "direction {v:?}: {spec_norm}");
    }
}

#[test]
fn submetry_vertex_projection_is_exact() {
    let t = heisenberg();
    let g = build_asymptotic_grading(&t, None).unwrap();
    let fam = DeformedFamily::new(t, g, Side::Asymptotic).unwrap();
    let family = MetricFamily::new(fam, Subspace::full(3), NormSpec::Linf).unwrap();
    let projected = projected_ball_vertices(&family).unwrap();
    // The cube's corners project onto the four corners of the unit square,
    // each hit twice.
    let mut distinct: Vec<Vec<lie_core::rat::Rat>> = Vec::new();
    for p in projected {
        if !distinct.contains(&p) {
            distinct.push(p);
        }
    }
    assert_eq!(distinct.len(), 4);
    let one = lie_core::rat::rint(1);
    let minus_one = lie_core::rat::rint(-1);
    for corner in &distinct {
        assert!(corner[0] == one || corner[0] == minus_one);
        assert!(corner[1] == one || corner[1] == minus_one);
    }
}

#[test]
fn submetry_quadratic_boundary_samples() {
    let fam = riem_heis();
    let dirs = vec![
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![0.6, 0.8],
        vec![-0.8, 0.6],
    ];
    assert!(submetry_quadratic_check(&fam, &dirs, 1e-6).unwrap());
}
