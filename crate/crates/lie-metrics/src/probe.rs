//! Convergence probes and comparison suites: the endpoint-gap probe behind
//! the Gronwall-type estimates, the ball-box band, the Guivarc'h constant
//! fit, and the first-layer submetry checks.

use crate::norm::NormEval;
use crate::solver::{estimate_distance, SolverConfig};
use crate::structure::MetricFamily;
use crate::MetricError;
use lie_core::grading::Side;
use lie_core::linalg::mat_vec;
use lie_core::rat::{to_f64, vec_to_f64, vsub, Rat};

/// Endpoint gap between the flow at ε and the reference flow at 0, for a
/// fixed control given in distribution coordinates. Flows are exact; the
/// gap is the Euclidean norm of the exact difference.
///
/// Asymptotic side: the ε-flow drives `X` with the ε-embedded control and is
/// compared against the cone flow of the first-layer projection of the
/// control. Tangent side: both flows use the same control, under the ε and
/// cone products respectively.
pub fn gronwall_probe(
    family: &MetricFamily,
    control: &[(f64, Vec<f64>)],
    eps_grid: &[f64],
) -> Result<Vec<(f64, f64)>, MetricError> {
    let zero = family.structure_at(&lie_core::rat::rint(0))?;
    let exact_segments = |map: &dyn Fn(&[Rat]) -> Vec<Rat>| -> Vec<(Rat, Vec<Rat>)> {
        control
            .iter()
            .map(|(d, u)| {
                let ur: Vec<Rat> = u.iter().map(|x| Rat::from_float(*x).unwrap()).collect();
                (Rat::from_float(*d).unwrap(), map(&ur))
            })
            .collect()
    };

    // Reference control coordinates on the ε = 0 structure.
    let reference: Vec<(Rat, Vec<Rat>)> = match family.side() {
        Side::Tangent => exact_segments(&|u| u.to_vec()),
        Side::Asymptotic => {
            let a = family.layer1_matrix();
            exact_segments(&|u| mat_vec(&a, u))
        }
    };
    let origin = lie_core::rat::vzero(zero.dim);
    let eta = zero.flow_exact(&reference, &origin);

    let mut out = Vec::with_capacity(eps_grid.len());
    for &e in eps_grid {
        let s = family.structure_at_f64(e)?;
        let segs = exact_segments(&|u| u.to_vec());
        let gamma = s.flow_exact(&segs, &origin);
        let gap = crate::fast::euclid(&vec_to_f64(&vsub(&gamma, &eta)));
        out.push((e, gap));
    }
    Ok(out)
}

/// Ratio band of the estimated cone distance against the homogeneous
/// quasi-norm on the given sample points: returns `(min, max)` of
/// `d(0,x) / N(x)`.
pub fn ballbox_band(
    family: &MetricFamily,
    samples: &[Vec<f64>],
    cfg: &SolverConfig,
) -> Result<(f64, f64), MetricError> {
    let s = family.structure_at(&lie_core::rat::rint(0))?;
    let origin = vec![0.0; s.dim];
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for x in samples {
        let n = s.quasi_norm(x);
        if n < 1e-9 {
            continue;
        }
        let d = estimate_distance(&s, &origin, x, cfg, &[])?.value;
        let r = d / n;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

/// Smallest C ≥ 1 with `ρ_0/C - Cε ≤ ρ_ε ≤ Cρ_0 + Cε` over the sampled
/// points and grid. `rho0[i]` and `rho_eps[k][i]` are precomputed distance
/// estimates.
pub fn guivarch_constant(rho0: &[f64], eps_grid: &[f64], rho_eps: &[Vec<f64>]) -> f64 {
    let mut c: f64 = 1.0;
    for (k, &e) in eps_grid.iter().enumerate() {
        for (i, &r0) in rho0.iter().enumerate() {
            let re = rho_eps[k][i];
            // Upper: re ≤ C r0 + C e.
            if r0 + e > 0.0 {
                c = c.max(re / (r0 + e));
            }
            // Lower: re ≥ r0/C - C e, i.e. C² e + C re - r0 ≥ 0.
            if e > 0.0 {
                let disc = re * re + 4.0 * e * r0;
                c = c.max((-re + disc.sqrt()) / (2.0 * e));
            } else if re > 0.0 {
                c = c.max(r0 / re);
            }
        }
    }
    c
}

/// Exact first-layer projection of the unit-ball vertices: for polytope-like
/// norms the projected vertex set is independent of ε and spans the limit
/// ball. Returns the projected vertices (first-layer coordinates).
pub fn projected_ball_vertices(family: &MetricFamily) -> Option<Vec<Vec<Rat>>> {
    let verts = family.norm_spec().ball_vertices(family.delta().dim())?;
    let a = family.layer1_matrix();
    Some(verts.iter().map(|w| mat_vec(&a, w)).collect())
}

/// Boundary consistency of the limit norm for quadratic-type norms: for
/// sample directions v on the limit unit sphere, the minimal lift has norm
/// 1 within tolerance, and no sampled lift beats it.
pub fn submetry_quadratic_check(
    family: &MetricFamily,
    directions: &[Vec<f64>],
    tol: f64,
) -> Result<bool, MetricError> {
    let s0 = family.structure_at(&lie_core::rat::rint(0))?;
    let spec_eval = NormEval::from_spec(family.norm_spec(), family.delta().dim());
    for v in directions {
        let nv = s0.norm_coords(v);
        if nv < 1e-12 {
            continue;
        }
        let unit: Vec<f64> = v.iter().map(|x| x / nv).collect();
        let segs = vec![(1.0, unit.clone())];
        let lifted = crate::solver::lift_control(family, 1.0, &segs)?;
        let lift_norm = spec_eval.eval(&lifted[0].1);
        if (lift_norm - 1.0).abs() > tol {
            return Ok(false);
        }
        // The lift projects back to the direction.
        let a = family.layer1_matrix();
        let a_f: Vec<Vec<f64>> = a
            .iter()
            .map(|row| row.iter().map(to_f64).collect())
            .collect();
        let back = crate::fast::mat_vec_f64(&a_f, &lifted[0].1);
        let err = crate::fast::euclid(&crate::fast::sub(&back, &unit));
        if err > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
