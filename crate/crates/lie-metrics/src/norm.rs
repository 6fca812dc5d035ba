//! Norms on the distribution, their unit balls, and the projected limit
//! norm on the first layer.

use crate::MetricError;
use lie_core::linalg::{invert, mat_vec};
use lie_core::rat::{to_f64, Rat};
use num_traits::Zero;

/// Norm descriptor in the coordinates of the distribution basis.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    Euclidean,
    L1,
    Linf,
    /// Symmetric positive definite matrix; the norm is `sqrt(x^T Q x)`.
    Quadratic(Vec<Vec<Rat>>),
    /// Gauge of the symmetric convex hull of the listed vertices.
    Polytope(Vec<Vec<Rat>>),
}

impl NormSpec {
    pub fn validate(&self, dim: usize) -> Result<(), MetricError> {
        match self {
            NormSpec::Euclidean | NormSpec::L1 | NormSpec::Linf => Ok(()),
            NormSpec::Quadratic(q) => {
                if q.len() != dim || q.iter().any(|r| r.len() != dim) {
                    return Err(MetricError::BadNorm(format!(
                        "quadratic form must be {dim}x{dim}"
                    )));
                }
                for i in 0..dim {
                    for j in 0..dim {
                        if q[i][j] != q[j][i] {
                            return Err(MetricError::BadNorm("form not symmetric".into()));
                        }
                    }
                }
                // Positive definiteness via leading principal minors.
                for k in 1..=dim {
                    let sub: Vec<Vec<Rat>> =
                        (0..k).map(|i| q[i][..k].to_vec()).collect();
                    if det(&sub) <= Rat::zero() {
                        return Err(MetricError::BadNorm("form not positive definite".into()));
                    }
                }
                Ok(())
            }
            NormSpec::Polytope(verts) => {
                if verts.is_empty() || verts.iter().any(|v| v.len() != dim) {
                    return Err(MetricError::BadNorm(
                        "polytope vertices must be nonempty and of the right dimension".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Vertices of the unit ball when it is a polytope. `L1` is the cross
    /// polytope, `Linf` the cube, `Polytope` is closed under negation here.
    pub fn ball_vertices(&self, dim: usize) -> Option<Vec<Vec<Rat>>> {
        match self {
            NormSpec::L1 => {
                let mut v = Vec::new();
                for i in 0..dim {
                    let mut e = lie_core::rat::vzero(dim);
                    e[i] = lie_core::rat::rint(1);
                    v.push(e.clone());
                    v.push(lie_core::rat::vneg(&e));
                }
                Some(v)
            }
            NormSpec::Linf => {
                let mut v = Vec::new();
                for mask in 0..(1u32 << dim) {
                    v.push(
                        (0..dim)
                            .map(|i| {
                                lie_core::rat::rint(if mask >> i & 1 == 1 { -1 } else { 1 })
                            })
                            .collect(),
                    );
                }
                Some(v)
            }
            NormSpec::Polytope(verts) => {
                let mut v = verts.clone();
                for w in verts {
                    v.push(lie_core::rat::vneg(w));
                }
                Some(v)
            }
            _ => None,
        }
    }
}

fn det(a: &[Vec<Rat>]) -> Rat {
    // Bareiss-free plain elimination; sizes here are tiny.
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a.to_vec();
    let mut d = lie_core::rat::rint(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c].clone();
        let inv = m[c][c].clone().recip();
        for r in (c + 1)..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] * &inv;
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    d
}

/// Evaluator for a norm in fixed coordinates, with fast f64 paths.
#[derive(Debug, Clone)]
pub enum NormEval {
    Euclidean,
    L1,
    Linf,
    Quadratic(Vec<Vec<f64>>),
    /// Vertex matrix columns for the gauge linear program.
    Polytope(Vec<Vec<f64>>),
}

impl NormEval {
    pub fn from_spec(spec: &NormSpec, dim: usize) -> Self {
        match spec {
            NormSpec::Euclidean => NormEval::Euclidean,
            NormSpec::L1 => NormEval::L1,
            NormSpec::Linf => NormEval::Linf,
            NormSpec::Quadratic(q) => NormEval::Quadratic(
                q.iter()
                    .map(|row| row.iter().map(to_f64).collect())
                    .collect(),
            ),
            NormSpec::Polytope(_) => {
                let verts = spec.ball_vertices(dim).expect("polytope has vertices");
                NormEval::Polytope(
                    verts
                        .iter()
                        .map(|v| v.iter().map(to_f64).collect())
                        .collect(),
                )
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            NormEval::Euclidean => crate::fast::euclid(x),
            NormEval::L1 => x.iter().map(|v| v.abs()).sum(),
            NormEval::Linf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            NormEval::Quadratic(q) => {
                let mut s = 0.0;
                for (i, row) in q.iter().enumerate() {
                    for (j, c) in row.iter().enumerate() {
                        s += x[i] * c * x[j];
                    }
                }
                s.max(0.0).sqrt()
            }
            NormEval::Polytope(verts) => gauge_lp(verts, x).unwrap_or(f64::INFINITY),
        }
    }
}

/// Gauge of `conv(vertices)` at `x`: the least t ≥ 0 with `x ∈ t·conv(V)`,
/// solved as `min Σλ s.t. Σ λ_i v_i = x, λ ≥ 0`.
pub fn gauge_lp(vertices: &[Vec<f64>], x: &[f64]) -> Option<f64> {
    Some(gauge_lp_with_weights(vertices, x)?.0)
}

/// Gauge value together with the optimal vertex weights.
pub fn gauge_lp_with_weights(vertices: &[Vec<f64>], x: &[f64]) -> Option<(f64, Vec<f64>)> {
    let m = x.len();
    let n = vertices.len();
    let mut a: Vec<Vec<f64>> = vec![vec![0.0; n]; m];
    for (j, v) in vertices.iter().enumerate() {
        for i in 0..m {
            a[i][j] = v[i];
        }
    }
    let c = vec![1.0; n];
    simplex_min_with_solution(&a, x, &c)
}

/// Two-phase dense simplex for `min c^T x, A x = b, x ≥ 0`. Sizes here are
/// tiny (tens of variables), so Bland's rule and a fixed tolerance suffice.
pub fn simplex_min(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<f64> {
    Some(simplex_min_with_solution(a, b, c)?.0)
}

pub fn simplex_min_with_solution(
    a: &[Vec<f64>],
    b: &[f64],
    c: &[f64],
) -> Option<(f64, Vec<f64>)> {
    const TOL: f64 = 1e-9;
    let m = a.len();
    let n = c.len();
    // Tableau with artificial variables: columns = n original + m artificial
    // + rhs.
    let mut t = vec![vec![0.0; n + m + 1]; m + 1];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][n + m] = flip * b[i];
    }
    // Phase-1 objective: minimize sum of artificials.
    for j in 0..n + m + 1 {
        let s: f64 = (0..m).map(|i| t[i][j]).sum();
        t[m][j] = -s;
    }
    for i in 0..m {
        t[m][n + i] = 0.0;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    run_simplex(&mut t, &mut basis, n + m, TOL)?;
    if t[m][n + m].abs() > 1e-7 {
        return None; // infeasible
    }
    // Drive artificials out of the basis where possible; then phase 2.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[i][j].abs() > TOL) {
                pivot(&mut t, &mut basis, i, j);
            }
        }
    }
    // Rebuild objective row for phase 2 over original columns.
    for j in 0..n + m + 1 {
        t[m][j] = 0.0;
    }
    for j in 0..n {
        t[m][j] = c[j];
    }
    for i in 0..m {
        if basis[i] < n {
            let coef = c[basis[i]];
            if coef != 0.0 {
                for j in 0..n + m + 1 {
                    let v = t[i][j];
                    t[m][j] -= coef * v;
                }
            }
        }
    }
    // Forbid artificial columns in phase 2.
    for i in 0..m {
        for j in n..n + m {
            if basis.contains(&j) {
                continue;
            }
            t[i][j] = 0.0;
        }
    }
    run_simplex(&mut t, &mut basis, n, TOL)?;
    let mut x = vec![0.0; n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            x[bi] = t[i][n + m];
        }
    }
    Some((-t[m][n + m], x))
}

fn run_simplex(t: &mut [Vec<f64>], basis: &mut [usize], ncols: usize, tol: f64) -> Option<()> {
    let m = basis.len();
    let rhs = t[0].len() - 1;
    for _ in 0..10_000 {
        // Entering column: most negative reduced cost (Dantzig), Bland on
        // ties to avoid cycling.
        let mut enter = None;
        let mut best = -tol;
        for j in 0..ncols {
            if t[m][j] < best {
                best = t[m][j];
                enter = Some(j);
            }
        }
        let Some(j) = enter else {
            return Some(());
        };
        let mut leave = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            if t[i][j] > tol {
                let ratio = t[i][rhs] / t[i][j];
                if ratio < best_ratio - 1e-12 {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let i = leave?; // unbounded
        pivot_full(t, basis, i, j);
    }
    None
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    pivot_full(t, basis, row, col);
}

fn pivot_full(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let ncols = t[0].len();
    let nrows = t.len();
    let p = t[row][col];
    for j in 0..ncols {
        t[row][j] /= p;
    }
    for i in 0..nrows {
        if i != row && t[i][col] != 0.0 {
            let f = t[i][col];
            for j in 0..ncols {
                t[i][j] -= f * t[row][j];
            }
        }
    }
    basis[row] = col;
}

/// Exact limit quadratic form on the first layer: for a quadratic base norm
/// `Q` on the distribution and the layer-one map `A` (distribution
/// coordinates to first-layer coordinates), the projected norm has form
/// `(A Q^{-1} A^T)^{-1}`.
pub fn limit_quadratic(a: &[Vec<Rat>], q: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let qinv = invert(q)?;
    let rows = a.len();
    let cols = q.len();
    // M = A Q^{-1} A^T
    let mut aq: Vec<Vec<Rat>> = Vec::with_capacity(rows);
    for r in a {
        aq.push(mat_vec(&qinv, r));
    }
    let mut m = vec![lie_core::rat::vzero(rows); rows];
    for i in 0..rows {
        for j in 0..rows {
            let mut s = Rat::zero();
            for k in 0..cols {
                s += &aq[i][k] * &a[j][k];
            }
            m[i][j] = s;
        }
    }
    invert(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lie_core::rat::{rat, rint};

    #[test]
    fn basic_norms() {
        let x = [3.0, -4.0];
        assert_eq!(NormEval::Euclidean.eval(&x), 5.0);
        assert_eq!(NormEval::L1.eval(&x), 7.0);
        assert_eq!(NormEval::Linf.eval(&x), 4.0);
    }

    #[test]
    fn polytope_gauge_matches_linf() {
        // The unit cube's gauge is the sup norm.
        let spec = NormSpec::Linf;
        let verts = spec.ball_vertices(2).unwrap();
        let ev = NormEval::Polytope(
            verts
                .iter()
                .map(|v| v.iter().map(lie_core::rat::to_f64).collect())
                .collect(),
        );
        for (x, want) in [
            ([0.5, 0.25], 0.5),
            ([-1.0, 1.0], 1.0),
            ([0.0, 2.0], 2.0),
        ] {
            assert!((ev.eval(&x) - want).abs() < 1e-7, "{x:?}");
        }
    }

    #[test]
    fn gauge_matches_l1() {
        let spec = NormSpec::L1;
        let verts = spec.ball_vertices(3).unwrap();
        let ev = NormEval::Polytope(
            verts
                .iter()
                .map(|v| v.iter().map(lie_core::rat::to_f64).collect())
                .collect(),
        );
        let x = [0.5, -0.25, 1.0];
        assert!((ev.eval(&x) - 1.75).abs() < 1e-7);
    }

    #[test]
    fn quadratic_validation() {
        let good = NormSpec::Quadratic(vec![
            vec![rint(2), rint(1)],
            vec![rint(1), rint(2)],
        ]);
        assert!(good.validate(2).is_ok());
        let asym = NormSpec::Quadratic(vec![
            vec![rint(2), rint(1)],
            vec![rint(0), rint(2)],
        ]);
        assert!(asym.validate(2).is_err());
        let indef = NormSpec::Quadratic(vec![
            vec![rint(1), rint(3)],
            vec![rint(3), rint(1)],
        ]);
        assert!(indef.validate(2).is_err());
    }

    #[test]
    fn limit_quadratic_projects_the_euclidean_ball() {
        // Distribution R^3 with the identity form; first-layer map keeps the
        // first two coordinates. The projected form is the 2x2 identity.
        let a = vec![
            vec![rint(1), rint(0), rint(0)],
            vec![rint(0), rint(1), rint(0)],
        ];
        let q = vec![
            vec![rint(1), rint(0), rint(0)],
            vec![rint(0), rint(1), rint(0)],
            vec![rint(0), rint(0), rint(1)],
        ];
        let m = limit_quadratic(&a, &q).unwrap();
        assert_eq!(m, vec![vec![rint(1), rint(0)], vec![rint(0), rint(1)]]);
    }

    #[test]
    fn limit_quadratic_accounts_for_cheap_directions() {
        // Mixing in a cheap third direction shrinks the projected norm:
        // Q = diag(1, 1, 1/4), layer map (x1 + x3, x2). The minimal lift of
        // (v, 0) spends on the cheap coordinate: form entry (0,0) is 1/5.
        let a = vec![
            vec![rint(1), rint(0), rint(1)],
            vec![rint(0), rint(1), rint(0)],
        ];
        let q = vec![
            vec![rint(1), rint(0), rint(0)],
            vec![rint(0), rint(1), rint(0)],
            vec![rint(0), rint(0), rat(1, 4)],
        ];
        let m = limit_quadratic(&a, &q).unwrap();
        assert_eq!(m[0][0], rat(1, 5));
        assert_eq!(m[1][1], rint(1));
        assert_eq!(m[0][1], rint(0));
    }
}
