//! Coarse exhaustive grid oracle for distance estimates.
//!
//! Enumerates all piecewise-constant controls whose segment coordinates take
//! values on a small grid, scores them by length plus a mismatch penalty,
//! and exactly closes the few best candidates. The search is entirely
//! independent of the descent solver; only the endpoint closure is shared.

use crate::correct::{close_residual, segments_length};
use crate::structure::MetricStructure;
use crate::MetricError;
use lie_core::rat::Rat;

#[derive(Debug, Clone)]
pub struct GridOracleConfig {
    pub segments: usize,
    /// Candidate values per coordinate axis.
    pub axis: Vec<f64>,
    /// How many leading candidates receive the exact closure.
    pub closures: usize,
}

impl Default for GridOracleConfig {
    fn default() -> Self {
        Self {
            segments: 4,
            axis: vec![-1.5, -0.75, 0.0, 0.75, 1.5],
            closures: 4,
        }
    }
}

/// Attach a grid-oracle cross-check to a solver estimate.
pub fn with_oracle(
    mut est: crate::solver::DistanceEstimate,
    s: &MetricStructure,
    p: &[f64],
    q: &[f64],
    cfg: &GridOracleConfig,
) -> Result<crate::solver::DistanceEstimate, MetricError> {
    est.oracle_value = grid_distance(s, p, q, cfg)?;
    Ok(est)
}

/// Upper bound for the distance from `p` to `q` by grid search. Returns
/// `None` only if every closure fails (non-bracket-generating input).
pub fn grid_distance(
    s: &MetricStructure,
    p: &[f64],
    q: &[f64],
    cfg: &GridOracleConfig,
) -> Result<Option<f64>, MetricError> {
    let m = cfg.segments;
    let d = s.dist_dim;
    let params = m * d;
    let g = cfg.axis.len();
    let total = (g as f64).powi(params as i32);
    if total > 5e7 {
        return Err(MetricError::NoConvergence(format!(
            "grid of {total} candidates is too large"
        )));
    }
    let dur = 1.0 / m as f64;
    let mut counters = vec![0usize; params];
    let mut best: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
    let scale = 1.0 + s.quasi_norm(&crate::fast::sub(q, p));
    loop {
        // Decode the counter into segment values.
        let vals: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..d).map(|c| cfg.axis[counters[i * d + c]]).collect())
            .collect();
        let mut acc = p.to_vec();
        let mut len = 0.0;
        for u in &vals {
            let inc: Vec<f64> = s.embed_f(u).iter().map(|v| v * dur).collect();
            acc = s.product_f(&acc, &inc);
            len += dur * s.norm_coords(u);
        }
        let r = s.product_f(&s.inverse_f(&acc), q);
        let score = len + 3.0 * scale * s.quasi_norm(&r);
        if best.len() < cfg.closures {
            best.push((score, vals));
            best.sort_by(|a, b| a.0.total_cmp(&b.0));
        } else if score < best.last().unwrap().0 {
            best.pop();
            best.push((score, vals));
            best.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        // Advance.
        let mut i = 0;
        loop {
            if i == params {
                break;
            }
            counters[i] += 1;
            if counters[i] < g {
                break;
            }
            counters[i] = 0;
            i += 1;
        }
        if i == params {
            break;
        }
    }

    let p_exact: Vec<Rat> = p.iter().map(|x| Rat::from_float(*x).unwrap()).collect();
    let q_exact: Vec<Rat> = q.iter().map(|x| Rat::from_float(*x).unwrap()).collect();
    let dur_exact = Rat::from_float(dur).unwrap();
    let mut best_value: Option<f64> = None;
    for (_, vals) in &best {
        let segs: Vec<(Rat, Vec<Rat>)> = vals
            .iter()
            .map(|u| {
                (
                    dur_exact.clone(),
                    u.iter().map(|x| Rat::from_float(*x).unwrap()).collect(),
                )
            })
            .collect();
        let end = s.flow_exact(&segs, &p_exact);
        let residual = s.product_exact(&lie_core::rat::vneg(&end), &q_exact);
        let Ok(closure) = close_residual(s, &residual) else {
            continue;
        };
        if !closure.exact && closure.residual_gap > 1e-9 {
            continue;
        }
        let value: f64 = vals
            .iter()
            .map(|u| dur * s.norm_coords(u))
            .sum::<f64>()
            + segments_length(s, &closure.segments);
        best_value = Some(match best_value {
            None => value,
            Some(v) => v.min(value),
        });
    }
    Ok(best_value)
}
