//! Structural analysis of an algebra file: gradings, classification, alpha
//! and beta invariants, Carnot-quotient-ideal witnesses, and expectation
//! checks.

use crate::format::AlgebraFile;
use lie_core::grading::{
    build_asymptotic_grading, build_tangent_grading, classify_grading, Grading, GradingKind,
};
use lie_core::invariants::{
    beta_search, compute_alpha0, compute_alphas, AlphaValue, BetaResult, BetaStrategy,
};
use lie_core::subspace::Subspace;
use lie_core::tensor::StructureTensor;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradingSource {
    /// Use the file's grading when present, otherwise build one.
    Auto,
    /// Require the file's grading.
    File,
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub grading_source: GradingSource,
    pub beta_strategy: BetaStrategy,
    /// Report only one side when set.
    pub side_filter: Option<lie_core::grading::Side>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            grading_source: GradingSource::Auto,
            beta_strategy: BetaStrategy::Coordinate,
            side_filter: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyJson {
    pub asymptotic: bool,
    pub tangent: Option<bool>,
    pub stratification: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SideReport {
    pub side: String,
    pub layer_dims: Vec<usize>,
    pub layers: Vec<Vec<String>>,
    pub classify: ClassifyJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1_inf: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha2_inf: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_inf: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<String>,
    pub beta_hat: usize,
    pub beta_exhaustive: bool,
    pub witness_dim: usize,
    pub witness: Vec<String>,
    pub witness_valid: bool,
    /// alpha/beta as a float; absent in the Carnot case (infinite).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    pub carnot: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub jacobi_ok: bool,
    pub nilpotent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    pub distribution_dim: usize,
    pub bracket_generating: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<SideReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangent: Option<SideReport>,
    pub expect_failures: Vec<String>,
}

#[derive(Debug)]
pub enum AnalyzeError {
    Algebra(lie_core::AlgebraError),
    Input(String),
}

impl std::fmt::Display for AnalyzeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnalyzeError::Algebra(e) => write!(f, "{e}"),
            AnalyzeError::Input(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for AnalyzeError {}

impl From<lie_core::AlgebraError> for AnalyzeError {
    fn from(e: lie_core::AlgebraError) -> Self {
        AnalyzeError::Algebra(e)
    }
}

fn subspace_rows(s: &Subspace) -> Vec<String> {
    s.basis()
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect()
}

fn alpha_str(a: AlphaValue) -> String {
    a.to_string()
}

fn exponent_of(alpha: AlphaValue, beta: usize) -> (Option<f64>, bool) {
    match alpha {
        AlphaValue::Infinity => (None, true),
        AlphaValue::Finite(a) => {
            if beta == 0 {
                (None, true)
            } else {
                (Some(a as f64 / beta as f64), false)
            }
        }
    }
}

fn side_report_asymptotic(
    tensor: &StructureTensor,
    grading: &Grading,
    delta: &Subspace,
    strategy: &BetaStrategy,
) -> Result<SideReport, AnalyzeError> {
    let classify = classify_grading(tensor, grading, Some(delta))?;
    let alphas = compute_alphas(tensor, grading, delta)?;
    let beta: BetaResult = beta_search(tensor, grading, delta, strategy)?;
    let witness = beta.witness.as_ref();
    let (exponent, carnot) = exponent_of(alphas.alpha_inf, beta.beta_hat);
    Ok(SideReport {
        side: "asymptotic".into(),
        layer_dims: grading.layers().iter().map(Subspace::dim).collect(),
        layers: grading.layers().iter().map(subspace_rows).collect(),
        classify: ClassifyJson {
            asymptotic: classify.asymptotic,
            tangent: classify.tangent,
            stratification: classify.stratification,
        },
        alpha1_inf: Some(alpha_str(alphas.alpha1_inf)),
        alpha2_inf: Some(alpha_str(alphas.alpha2_inf)),
        alpha_inf: Some(alpha_str(alphas.alpha_inf)),
        alpha0: None,
        beta_hat: beta.beta_hat,
        beta_exhaustive: beta.exhaustive,
        witness_dim: witness.map(|w| w.ideal.dim()).unwrap_or(0),
        witness: witness.map(|w| subspace_rows(&w.ideal)).unwrap_or_default(),
        witness_valid: witness.map(|w| w.valid()).unwrap_or(false),
        exponent,
        carnot,
    })
}

fn side_report_tangent(
    tensor: &StructureTensor,
    grading: &Grading,
    delta: &Subspace,
    strategy: &BetaStrategy,
) -> Result<SideReport, AnalyzeError> {
    let classify = classify_grading(tensor, grading, Some(delta))?;
    let alpha0 = compute_alpha0(tensor, grading)?;
    let beta = beta_search(tensor, grading, delta, strategy)?;
    let witness = beta.witness.as_ref();
    let (exponent, carnot) = exponent_of(alpha0, beta.beta_hat);
    Ok(SideReport {
        side: "tangent".into(),
        layer_dims: grading.layers().iter().map(Subspace::dim).collect(),
        layers: grading.layers().iter().map(subspace_rows).collect(),
        classify: ClassifyJson {
            asymptotic: classify.asymptotic,
            tangent: classify.tangent,
            stratification: classify.stratification,
        },
        alpha1_inf: None,
        alpha2_inf: None,
        alpha_inf: None,
        alpha0: Some(alpha_str(alpha0)),
        beta_hat: beta.beta_hat,
        beta_exhaustive: beta.exhaustive,
        witness_dim: witness.map(|w| w.ideal.dim()).unwrap_or(0),
        witness: witness.map(|w| subspace_rows(&w.ideal)).unwrap_or_default(),
        witness_valid: witness.map(|w| w.valid()).unwrap_or(false),
        exponent,
        carnot,
    })
}

/// The asymptotic-side grading for a file: the file's own (verified) or a
/// freshly built one.
pub fn asymptotic_grading_for(
    file: &AlgebraFile,
    tensor: &StructureTensor,
    source: GradingSource,
) -> Result<Option<Grading>, AnalyzeError> {
    if tensor.validate().step().is_none() {
        return match source {
            GradingSource::File => Err(AnalyzeError::Input(
                "asymptotic grading requested on a non-nilpotent algebra".into(),
            )),
            GradingSource::Auto => Ok(None),
        };
    }
    match (source, file.grading_layers()?) {
        (_, Some(layers)) => {
            let g = Grading::new(layers, GradingKind::Unverified)?;
            let report = classify_grading(tensor, &g, None)?;
            if !report.asymptotic {
                return Err(AnalyzeError::Input(
                    "the file's grading does not verify as asymptotic".into(),
                ));
            }
            Ok(Some(g.with_kind(if report.stratification {
                GradingKind::Stratification
            } else {
                GradingKind::Asymptotic
            })))
        }
        (GradingSource::File, None) => Err(AnalyzeError::Input(
            "--grading file requires grading lines in the file".into(),
        )),
        (GradingSource::Auto, None) => Ok(Some(build_asymptotic_grading(tensor, None)?)),
    }
}

pub fn analyze(file: &AlgebraFile, opts: &AnalyzeOptions) -> Result<AnalysisReport, AnalyzeError> {
    let tensor = file.tensor()?;
    let report = tensor.validate();
    let delta = file.delta()?;
    let filtration = tensor.delta_filtration(&delta)?;

    let want_asym = opts.side_filter != Some(lie_core::grading::Side::Tangent);
    let want_tan = opts.side_filter != Some(lie_core::grading::Side::Asymptotic);

    let asymptotic = if want_asym {
        match asymptotic_grading_for(file, &tensor, opts.grading_source)? {
            Some(g) => Some(side_report_asymptotic(
                &tensor,
                &g,
                &delta,
                &opts.beta_strategy,
            )?),
            None => None,
        }
    } else {
        None
    };

    let tangent = if want_tan && filtration.bracket_generating {
        let g = build_tangent_grading(&tensor, &delta, None)?;
        Some(side_report_tangent(&tensor, &g, &delta, &opts.beta_strategy)?)
    } else {
        None
    };

    let mut out = AnalysisReport {
        schema: 1,
        name: file.name.clone(),
        dim: file.dim,
        jacobi_ok: report.jacobi_ok,
        nilpotent: report.step().is_some(),
        step: report.step(),
        distribution_dim: delta.dim(),
        bracket_generating: filtration.bracket_generating,
        asymptotic,
        tangent,
        expect_failures: Vec::new(),
    };
    out.expect_failures = check_expects(file, &out);
    Ok(out)
}

fn check_expects(file: &AlgebraFile, report: &AnalysisReport) -> Vec<String> {
    let mut failures = Vec::new();
    let mut check = |key: &str, actual: Option<String>| {
        if let Some(want) = file.expects.get(key) {
            match actual {
                Some(got) if &got == want => {}
                Some(got) => failures.push(format!("expect {key} = {want}, got {got}")),
                None => failures.push(format!("expect {key} = {want}, got nothing")),
            }
        }
    };
    check("step", report.step.map(|s| s.to_string()));
    let asym = report.asymptotic.as_ref();
    check("alpha1_inf", asym.and_then(|a| a.alpha1_inf.clone()));
    check("alpha2_inf", asym.and_then(|a| a.alpha2_inf.clone()));
    check("alpha_inf", asym.and_then(|a| a.alpha_inf.clone()));
    check("beta", asym.map(|a| a.beta_hat.to_string()));
    let tan = report.tangent.as_ref();
    check("alpha0", tan.and_then(|t| t.alpha0.clone()));
    check("beta_tangent", tan.map(|t| t.beta_hat.to_string()));
    failures
}

pub fn render_text(report: &AnalysisReport) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    if let Some(name) = &report.name {
        let _ = writeln!(s, "algebra: {name}");
    }
    let _ = writeln!(
        s,
        "dim {} | jacobi {} | {} | distribution dim {} ({})",
        report.dim,
        if report.jacobi_ok { "ok" } else { "FAIL" },
        match report.step {
            Some(st) => format!("nilpotent, step {st}"),
            None => "not nilpotent".into(),
        },
        report.distribution_dim,
        if report.bracket_generating {
            "bracket-generating"
        } else {
            "NOT bracket-generating"
        }
    );
    for side in [&report.asymptotic, &report.tangent].into_iter().flatten() {
        let _ = writeln!(
            s,
            "[{}] layers {:?} | asymptotic {} tangent {} stratification {}",
            side.side,
            side.layer_dims,
            side.classify.asymptotic,
            side.classify
                .tangent
                .map(|b| b.to_string())
                .unwrap_or_else(|| "-".into()),
            side.classify.stratification
        );
        if let (Some(a1), Some(a2), Some(a)) =
            (&side.alpha1_inf, &side.alpha2_inf, &side.alpha_inf)
        {
            let _ = writeln!(s, "  alpha1_inf = {a1}, alpha2_inf = {a2}, alpha_inf = {a}");
        }
        if let Some(a0) = &side.alpha0 {
            let _ = writeln!(s, "  alpha0 = {a0}");
        }
        let _ = writeln!(
            s,
            "  beta_hat = {}{} | witness dim {} ({})",
            side.beta_hat,
            if side.beta_exhaustive {
                " (exhaustive)"
            } else {
                " (upper bound)"
            },
            side.witness_dim,
            if side.witness_valid {
                "certificate valid"
            } else {
                "NO certificate"
            }
        );
        let _ = match (side.carnot, side.exponent) {
            (true, _) => writeln!(s, "  Carnot: metrics coincide, exponent infinite"),
            (false, Some(e)) => writeln!(s, "  exponent = {e}"),
            (false, None) => writeln!(s, "  exponent unavailable"),
        };
    }
    if report.expect_failures.is_empty() {
        let _ = writeln!(s, "expectations: all hold");
    } else {
        for f in &report.expect_failures {
            let _ = writeln!(s, "EXPECT FAIL: {f}");
        }
    }
    s
}
