//! Convergence experiments: sample the contracted or dilated metrics over an
//! ε-grid, fit the log-log decay of the gap to the limit metric, and compare
//! the slope against the theoretical exponent.

use crate::analyze::{asymptotic_grading_for, AnalyzeError, GradingSource};
use crate::fit::{fit_exponent, Fit, ERR_FLOOR};
use crate::format::AlgebraFile;
use crate::par::parallel_map;
use lie_core::deform::DeformedFamily;
use lie_core::grading::{build_tangent_grading, Side};
use lie_core::invariants::{beta_search, compute_alpha0, compute_alphas, AlphaValue, BetaStrategy};
use lie_core::rat::to_f64;
use lie_metrics::solver::{estimate_distance, SolverConfig};
use lie_metrics::structure::MetricFamily;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Pansu,
    Mitchell,
    Gronwall,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Pansu => "pansu",
            Mode::Mitchell => "mitchell",
            Mode::Gronwall => "gronwall",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergeOptions {
    pub mode: Mode,
    pub eps_grid: Vec<f64>,
    /// Point pairs in ambient coordinates; defaults to dilation-spread
    /// points when empty.
    pub points: Vec<(Vec<f64>, Vec<f64>)>,
    pub segments: usize,
    pub starts: usize,
    pub seed: u64,
    /// Verdict slack: pass iff slope >= theory - slack.
    pub slack: f64,
    /// Errors below this level count as "metrics coincide" for the trivial
    /// (Carnot) verdict.
    pub trivial_tol: f64,
    /// Segment count of the fixed random control in gronwall mode.
    pub probe_segments: usize,
}

impl Default for ConvergeOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Pansu,
            eps_grid: log_grid(0.05, 1.0, 6),
            points: Vec::new(),
            segments: 32,
            starts: 8,
            seed: 1,
            slack: 0.15,
            trivial_tol: 5e-3,
            probe_segments: 6,
        }
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub epsilon: f64,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub err: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub schema: u32,
    pub mode: String,
    /// Theoretical exponent; absent when infinite (Carnot case).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory: Option<f64>,
    pub slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_residual: Option<f64>,
    pub verdict: String,
    pub unusable_fraction: f64,
    pub rows: Vec<Row>,
}

impl ExperimentResult {
    pub fn passed(&self) -> bool {
        self.verdict.starts_with("pass")
    }
}

pub fn run(file: &AlgebraFile, opts: &ConvergeOptions) -> Result<ExperimentResult, AnalyzeError> {
    let tensor = file.tensor()?;
    let delta = file.delta()?;
    if !tensor.delta_filtration(&delta)?.bracket_generating {
        return Err(AnalyzeError::Input(
            "experiments require a bracket-generating distribution".into(),
        ));
    }

    match opts.mode {
        Mode::Pansu | Mode::Gronwall => {
            if tensor.validate().step().is_none() {
                return Err(AnalyzeError::Input(
                    "the asymptotic side requires a nilpotent algebra".into(),
                ));
            }
            let grading = asymptotic_grading_for(file, &tensor, GradingSource::Auto)?
                .expect("nilpotent");
            let alphas = compute_alphas(&tensor, &grading, &delta)?;
            let beta = beta_search(&tensor, &grading, &delta, &BetaStrategy::Coordinate)?;
            let family = DeformedFamily::new(tensor, grading, Side::Asymptotic)?;
            let metric = MetricFamily::new(family, delta, file.norm.clone())
                .map_err(|e| AnalyzeError::Input(e.to_string()))?;
            match opts.mode {
                Mode::Pansu => {
                    let theory = finite_ratio(alphas.alpha_inf, beta.beta_hat);
                    metric_experiment(&metric, opts, theory)
                }
                Mode::Gronwall => {
                    let theory = match alphas.alpha_inf {
                        AlphaValue::Infinity => None,
                        AlphaValue::Finite(a) => Some(a as f64),
                    };
                    gronwall_experiment(&metric, opts, theory)
                }
                Mode::Mitchell => unreachable!(),
            }
        }
        Mode::Mitchell => {
            let grading = build_tangent_grading(&tensor, &delta, None)?;
            let alpha0 = compute_alpha0(&tensor, &grading)?;
            let beta = beta_search(&tensor, &grading, &delta, &BetaStrategy::Coordinate)?;
            let theory = finite_ratio(alpha0, beta.beta_hat);
            let family = DeformedFamily::new(tensor, grading, Side::Tangent)?;
            let metric = MetricFamily::new(family, delta, file.norm.clone())
                .map_err(|e| AnalyzeError::Input(e.to_string()))?;
            metric_experiment(&metric, opts, theory)
        }
    }
}

fn finite_ratio(alpha: AlphaValue, beta: usize) -> Option<f64> {
    match alpha {
        AlphaValue::Infinity => None,
        AlphaValue::Finite(a) => {
            if beta == 0 {
                None
            } else {
                Some(a as f64 / beta as f64)
            }
        }
    }
}

/// Default point pairs: dilation-spread targets mixing all coordinate
/// directions of every grading layer, scaled down on the tangent side to
/// stay near the identity. A dilated copy of the main target keeps the
/// samples spread across scales without landing near a cut locus.
fn default_points(metric: &MetricFamily, mode: Mode) -> Vec<(Vec<f64>, Vec<f64>)> {
    let grading = metric.grading();
    let dim = grading.dim();
    let scale = match mode {
        Mode::Mitchell => 0.55,
        _ => 0.8,
    };
    let mut spread = vec![0.0; dim];
    let mut reversed = vec![0.0; dim];
    for j in 1..=grading.step() {
        let layer = grading.layer(j);
        let rows = layer.basis();
        for (r, row) in rows.iter().enumerate() {
            let w = scale * 0.8f64.powi(j as i32 - 1) / (1.0 + r as f64);
            let wr = scale * 0.6f64.powi(j as i32 - 1) / (1.0 + (rows.len() - 1 - r) as f64);
            for (i, x) in row.iter().map(to_f64).enumerate() {
                spread[i] += w * x;
                reversed[i] -= 0.7 * wr * x;
            }
        }
    }
    let origin = vec![0.0; dim];
    let half = rat_from(0.5);
    let spread_exact: Vec<lie_core::rat::Rat> = spread
        .iter()
        .map(|x| lie_core::rat::from_f64(*x).unwrap())
        .collect();
    let shrunk: Vec<f64> = grading
        .dilate(&half, &spread_exact)
        .iter()
        .map(to_f64)
        .collect();
    vec![
        (origin.clone(), spread.clone()),
        (origin.clone(), shrunk),
        (origin, reversed.clone()),
        (reversed, spread),
    ]
}

fn rat_from(x: f64) -> lie_core::rat::Rat {
    lie_core::rat::from_f64(x).unwrap()
}

fn metric_experiment(
    metric: &MetricFamily,
    opts: &ConvergeOptions,
    theory: Option<f64>,
) -> Result<ExperimentResult, AnalyzeError> {
    let points = if opts.points.is_empty() {
        default_points(metric, opts.mode)
    } else {
        opts.points.clone()
    };
    let cfg = SolverConfig {
        segments: opts.segments,
        starts: opts.starts,
        seed: opts.seed,
        ..Default::default()
    };

    // One task per point pair: estimate the limit distance once, then sweep
    // the grid from large to small ε, warm-starting from the previous path.
    let mut eps_desc = opts.eps_grid.clone();
    eps_desc.sort_by(|a, b| b.total_cmp(a));
    let tasks: Vec<(Vec<f64>, Vec<f64>)> = points.clone();
    let results = parallel_map(tasks, |(p, q)| {
        let mut rows: Vec<(f64, Result<f64, String>)> = Vec::new();
        let zero = match metric.structure_at(&lie_core::rat::rint(0)) {
            Ok(s) => s,
            Err(e) => {
                return eps_desc
                    .iter()
                    .map(|&e2| (e2, Err(format!("limit structure: {e}")), p.clone(), q.clone()))
                    .collect::<Vec<_>>()
            }
        };
        let d0 = estimate_distance(&zero, &p, &q, &cfg, &[]);
        let mut warm: Vec<Vec<Vec<f64>>> = Vec::new();
        for &eps in &eps_desc {
            let r = (|| -> Result<f64, String> {
                let d0 = d0.as_ref().map_err(|e| e.to_string())?;
                let s = metric.structure_at_f64(eps).map_err(|e| e.to_string())?;
                let de = estimate_distance(&s, &p, &q, &cfg, &warm)
                    .map_err(|e| e.to_string())?;
                warm = vec![de
                    .path
                    .segments
                    .iter()
                    .map(|(_, v)| v.clone())
                    .collect()];
                Ok((de.value - d0.value).abs())
            })();
            rows.push((eps, r));
        }
        rows.into_iter()
            .map(|(e, r)| (e, r, p.clone(), q.clone()))
            .collect::<Vec<_>>()
    });

    let mut rows: Vec<Row> = Vec::new();
    for pair_rows in results {
        for (epsilon, r, p, q) in pair_rows {
            match r {
                Ok(err) => rows.push(Row {
                    epsilon,
                    p,
                    q,
                    err: Some(err),
                    note: String::new(),
                }),
                Err(note) => rows.push(Row {
                    epsilon,
                    p,
                    q,
                    err: None,
                    note,
                }),
            }
        }
    }
    rows.sort_by(|a, b| {
        a.epsilon
            .total_cmp(&b.epsilon)
            .then_with(|| a.p.partial_cmp(&b.p).unwrap_or(std::cmp::Ordering::Equal))
            .then_with(|| a.q.partial_cmp(&b.q).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(finish(opts, theory, rows))
}

fn gronwall_experiment(
    metric: &MetricFamily,
    opts: &ConvergeOptions,
    theory: Option<f64>,
) -> Result<ExperimentResult, AnalyzeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let ddim = metric.delta().dim();
    let m = opts.probe_segments.max(2);
    let control: Vec<(f64, Vec<f64>)> = (0..m)
        .map(|_| {
            (
                1.0 / m as f64,
                (0..ddim)
                    .map(|_| {
                        // Dyadic steps keep the exact flows cheap.
                        (rng.gen_range(-8i32..=8) as f64) / 8.0
                    })
                    .collect(),
            )
        })
        .collect();
    let gaps = lie_metrics::probe::gronwall_probe(metric, &control, &opts.eps_grid)
        .map_err(|e| AnalyzeError::Input(e.to_string()))?;
    let mut rows: Vec<Row> = gaps
        .into_iter()
        .map(|(epsilon, gap)| Row {
            epsilon,
            p: Vec::new(),
            q: Vec::new(),
            err: Some(gap),
            note: String::new(),
        })
        .collect();
    rows.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    Ok(finish(opts, theory, rows))
}

fn finish(opts: &ConvergeOptions, theory: Option<f64>, rows: Vec<Row>) -> ExperimentResult {
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.err.map(|e| (r.epsilon, e)))
        .collect();
    let unusable_fraction = 1.0 - usable.len() as f64 / rows.len().max(1) as f64;
    let fit: Option<Fit> = fit_exponent(&usable).ok();
    let max_err = usable.iter().map(|(_, e)| *e).fold(0.0, f64::max);
    let fittable = usable
        .iter()
        .filter(|(e, err)| *e > 0.0 && *err >= ERR_FLOOR)
        .count();

    let verdict = match theory {
        None => {
            // Infinite exponent: the metrics must coincide within noise.
            if max_err <= opts.trivial_tol {
                "pass-trivial"
            } else {
                "fail"
            }
        }
        Some(t) => match &fit {
            Some(f) => {
                if f.slope >= t - opts.slack {
                    "pass"
                } else {
                    "fail"
                }
            }
            None => {
                // Too few rows above the floor: errors collapsed to zero,
                // which beats any finite decay rate.
                if fittable < 4 && max_err <= opts.trivial_tol {
                    "pass-trivial"
                } else {
                    "fail"
                }
            }
        },
    };

    ExperimentResult {
        schema: 1,
        mode: opts.mode.as_str().into(),
        theory,
        slack: opts.slack,
        slope: fit.as_ref().map(|f| f.slope),
        intercept: fit.as_ref().map(|f| f.intercept),
        fit_residual: fit.as_ref().map(|f| f.residual),
        verdict: verdict.into(),
        unusable_fraction,
        rows,
    }
}

fn fmt_point(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// CSV with the documented column layout, rows already sorted.
pub fn to_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("mode,epsilon,p,q,err,slope,theory\n");
    let slope = result
        .slope
        .map(|s| s.to_string())
        .unwrap_or_default();
    let theory = result
        .theory
        .map(|t| t.to_string())
        .unwrap_or_default();
    for row in &result.rows {
        let err = row.err.map(|e| e.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            result.mode,
            row.epsilon,
            fmt_point(&row.p),
            fmt_point(&row.q),
            err,
            slope,
            theory
        ));
    }
    out
}
