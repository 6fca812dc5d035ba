//! Analysis-pipeline paths: grading sources, side filters, user-supplied
//! beta candidates, and degenerate inputs.

use lie_core::invariants::BetaStrategy;
use lie_core::subspace::Subspace;
use lie_lab::analyze::{analyze, AnalyzeOptions, GradingSource};
use lie_lab::format::AlgebraFile;

fn heis_no_grading() -> AlgebraFile {
    AlgebraFile::parse(
        "dim = 3\nbasis = e1,e2,e3\nbracket e1 e2 = e3\ndistribution = span(e1,e2,e3)\n",
    )
    .unwrap()
}

#[test]
fn file_grading_source_requires_grading_lines() {
    let f = heis_no_grading();
    let opts = AnalyzeOptions {
        grading_source: GradingSource::File,
        ..Default::default()
    };
    assert!(analyze(&f, &opts).is_err());
}

#[test]
fn side_filters_limit_the_report() {
    let f = heis_no_grading();
    let asym_only = AnalyzeOptions {
        side_filter: Some(lie_core::grading::Side::Asymptotic),
        ..Default::default()
    };
    let r = analyze(&f, &asym_only).unwrap();
    assert!(r.asymptotic.is_some());
    assert!(r.tangent.is_none());

    let tan_only = AnalyzeOptions {
        side_filter: Some(lie_core::grading::Side::Tangent),
        ..Default::default()
    };
    let r = analyze(&f, &tan_only).unwrap();
    assert!(r.asymptotic.is_none());
    assert!(r.tangent.is_some());
}

#[test]
fn user_supplied_beta_candidates_flow_through() {
    let f = lie_lab::canned::load("n522").unwrap();
    let rows = f.parse_span_expr("span(e5)").unwrap();
    let ideal = Subspace::span(5, &rows).unwrap();
    let opts = AnalyzeOptions {
        beta_strategy: BetaStrategy::UserSupplied(vec![ideal]),
        ..Default::default()
    };
    let r = analyze(&f, &opts).unwrap();
    let side = r.asymptotic.unwrap();
    assert_eq!(side.beta_hat, 3);
    assert!(!side.beta_exhaustive);
    assert_eq!(side.witness_dim, 1);
}

#[test]
fn non_bracket_generating_distribution_reports_and_skips_sides() {
    let f = AlgebraFile::parse(
        "dim = 3\nbasis = e1,e2,e3\nbracket e1 e2 = e3\ndistribution = span(e1)\n",
    )
    .unwrap();
    let r = analyze(&f, &AnalyzeOptions::default()).unwrap();
    assert!(!r.bracket_generating);
    assert!(r.tangent.is_none());
}

#[test]
fn non_nilpotent_input_keeps_the_tangent_side() {
    // The two-dimensional solvable algebra [e1, e2] = e2 is not nilpotent:
    // no asymptotic side, but the tangent side still computes.
    let f = AlgebraFile::parse(
        "dim = 2\nbasis = e1,e2\nbracket e1 e2 = e2\ndistribution = span(e1,e2)\n",
    )
    .unwrap();
    let r = analyze(&f, &AnalyzeOptions::default()).unwrap();
    assert!(!r.nilpotent);
    assert!(r.asymptotic.is_none());
    let tan = r.tangent.expect("tangent side exists");
    // Single-layer tangent grading W1 = g: alpha0 is finite (not a
    // stratification since [W1, W1] != 0) and the full algebra witnesses
    // beta at level one.
    assert_eq!(tan.alpha0.as_deref(), Some("1"));
    assert_eq!(tan.beta_hat, 1);
}

#[test]
fn oracle_value_attaches_to_estimates() {
    use lie_core::deform::DeformedFamily;
    use lie_core::grading::{build_asymptotic_grading, Side};
    use lie_metrics::oracle::{with_oracle, GridOracleConfig};
    use lie_metrics::solver::{estimate_distance, SolverConfig};
    use lie_metrics::structure::MetricFamily;

    let f = lie_lab::canned::load("heis_carnot").unwrap();
    let t = f.tensor().unwrap();
    let g = build_asymptotic_grading(&t, None).unwrap();
    let fam = DeformedFamily::new(t, g, Side::Asymptotic).unwrap();
    let family = MetricFamily::new(fam, f.delta().unwrap(), lie_metrics::NormSpec::Euclidean)
        .unwrap();
    let s = family.structure_at(&lie_core::rat::rint(1)).unwrap();
    let cfg = SolverConfig {
        segments: 4,
        starts: 3,
        ..Default::default()
    };
    let est = estimate_distance(&s, &[0.0; 3], &[0.75, 0.0, 0.0], &cfg, &[]).unwrap();
    let est = with_oracle(est, &s, &[0.0; 3], &[0.75, 0.0, 0.0], &GridOracleConfig::default())
        .unwrap();
    let oracle = est.oracle_value.expect("oracle attached");
    assert!((est.value - oracle).abs() / oracle < 0.05);
}
