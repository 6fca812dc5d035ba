//! Piecewise-constant horizontal controls.

use crate::structure::MetricStructure;
use crate::MetricError;
use lie_core::grading::Side;

/// Control `u : [0,1] → Δ^{(ε)}` with per-segment constant values, stored as
/// coordinates in the distribution basis (membership is structural).
#[derive(Debug, Clone)]
pub struct ControlPath {
    pub segments: Vec<(f64, Vec<f64>)>,
    pub epsilon: f64,
    pub side: Side,
}

impl ControlPath {
    pub fn new(
        segments: Vec<(f64, Vec<f64>)>,
        structure: &MetricStructure,
    ) -> Result<Self, MetricError> {
        for (dur, u) in &segments {
            if !(*dur > 0.0) {
                return Err(MetricError::NoConvergence(format!(
                    "segment duration {dur} must be positive"
                )));
            }
            if u.len() != structure.dist_dim {
                return Err(MetricError::SegmentDimension {
                    got: u.len(),
                    want: structure.dist_dim,
                });
            }
        }
        let total: f64 = segments.iter().map(|(d, _)| d).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(MetricError::NoConvergence(format!(
                "segment durations sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            segments,
            epsilon: structure.eps_f,
            side: structure.side,
        })
    }

    /// Uniform-duration path from raw segment values.
    pub fn uniform(values: Vec<Vec<f64>>, structure: &MetricStructure) -> Result<Self, MetricError> {
        let m = values.len();
        let dur = 1.0 / m as f64;
        Self::new(values.into_iter().map(|v| (dur, v)).collect(), structure)
    }

    pub fn length(&self, structure: &MetricStructure) -> f64 {
        self.segments
            .iter()
            .map(|(d, u)| d * structure.norm_coords(u))
            .sum()
    }

    pub fn endpoint(&self, structure: &MetricStructure, x0: &[f64]) -> Vec<f64> {
        structure.flow_f(&self.segments, x0)
    }

    /// Renormalize durations to sum to one, scaling values inversely so the
    /// flow endpoint and the length are unchanged.
    pub fn renormalized(mut self) -> Self {
        let total: f64 = self.segments.iter().map(|(d, _)| d).sum();
        for (d, u) in &mut self.segments {
            let scale = total / *d;
            *d /= total;
            let _ = scale;
            for v in u.iter_mut() {
                *v *= total;
            }
        }
        self
    }
}

/// Flow of a control from `x0` on the given structure; checks the ε tag.
pub fn flow(
    structure: &MetricStructure,
    path: &ControlPath,
    x0: &[f64],
) -> Result<Vec<f64>, MetricError> {
    if path.epsilon != structure.eps_f {
        return Err(MetricError::EpsilonMismatch {
            path: path.epsilon,
            structure: structure.eps_f,
        });
    }
    Ok(structure.flow_f(&path.segments, x0))
}
