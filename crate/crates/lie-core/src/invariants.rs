//! Integer invariants of a polarized grading: the alpha exponents, Carnot
//! quotient ideals, and the beta search.

use crate::error::AlgebraError;
use crate::grading::{classify_grading, Grading, GradingKind};
use crate::rat::{vis_zero, Rat};
use crate::subspace::Subspace;
use crate::tensor::{Nilpotency, StructureTensor};
use num_traits::Zero;
use std::collections::BTreeSet;
use std::fmt;

/// A positive integer or infinity. Infinity is a dedicated marker, never a
/// sentinel integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AlphaValue {
    Finite(usize),
    Infinity,
}

impl AlphaValue {
    pub fn finite(self) -> Option<usize> {
        match self {
            AlphaValue::Finite(n) => Some(n),
            AlphaValue::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, AlphaValue::Infinity)
    }
}

impl fmt::Display for AlphaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaValue::Finite(n) => write!(f, "{n}"),
            AlphaValue::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AsymptoticAlphas {
    pub alpha1_inf: AlphaValue,
    pub alpha2_inf: AlphaValue,
    pub alpha_inf: AlphaValue,
}

fn require_asymptotic(grading: &Grading) -> Result<(), AlgebraError> {
    match grading.kind() {
        GradingKind::Asymptotic | GradingKind::Stratification => Ok(()),
        _ => Err(AlgebraError::KindMismatch("asymptotic")),
    }
}

fn require_tangent(grading: &Grading) -> Result<(), AlgebraError> {
    match grading.kind() {
        GradingKind::Tangent | GradingKind::Stratification => Ok(()),
        _ => Err(AlgebraError::KindMismatch("tangent")),
    }
}

/// Largest j such that every left-iterated bracket of layers lands in
/// `V_{|p|} ⊕ V_{≥ |p|+j}`. Infinity exactly when the grading is a
/// stratification; otherwise found by enumerating tuples with `|p| ≤ s`
/// (heavier tuples bracket to zero).
fn alpha1_inf(tensor: &StructureTensor, grading: &Grading) -> Result<AlphaValue, AlgebraError> {
    let report = classify_grading(tensor, grading, None)?;
    if report.stratification {
        return Ok(AlphaValue::Infinity);
    }
    let s = grading.step();
    let mut min_defect: Option<usize> = None;
    // DFS over suffixes: (span of the iterated bracket, total weight, length).
    let mut stack: Vec<(Subspace, usize)> = Vec::new();
    for j in 1..=s {
        let layer = grading.layer(j);
        if !layer.is_zero() {
            stack.push((layer, j));
        }
    }
    while let Some((span, weight)) = stack.pop() {
        for i in 1..=s {
            if weight + i > s {
                continue;
            }
            let layer = grading.layer(i);
            if layer.is_zero() {
                continue;
            }
            let next = tensor.subspace_bracket(&layer, &span)?;
            if next.is_zero() {
                continue;
            }
            let w = weight + i;
            // Defect: lowest layer strictly above |p| hit by the bracket.
            for m in (w + 1)..=s {
                let hit = next
                    .basis()
                    .iter()
                    .any(|row| !vis_zero(&grading.component(row, m)));
                if hit {
                    let d = m - w;
                    min_defect = Some(min_defect.map_or(d, |cur| cur.min(d)));
                    break;
                }
            }
            stack.push((next, w));
        }
    }
    let d = min_defect.ok_or_else(|| {
        AlgebraError::Invalid(
            "non-stratified asymptotic grading must have a finite alpha1 defect".into(),
        )
    })?;
    Ok(AlphaValue::Finite(d))
}

/// Largest j with `v - (v)_1 ∈ g^(j+1)` for all v in the distribution.
/// Infinity exactly when `Δ ⊆ V_1`.
fn alpha2_inf(
    tensor: &StructureTensor,
    grading: &Grading,
    delta: &Subspace,
) -> Result<AlphaValue, AlgebraError> {
    let dim = tensor.dim();
    let mut tails = Vec::new();
    for v in delta.basis() {
        let head = grading.component(v, 1);
        let tail = crate::rat::vsub(v, &head);
        if !vis_zero(&tail) {
            tails.push(tail);
        }
    }
    if tails.is_empty() {
        return Ok(AlphaValue::Infinity);
    }
    let tail_span = Subspace::span(dim, &tails)?;
    let lcs = tensor.lower_central_series();
    let mut best = 0usize;
    let mut j = 1usize;
    loop {
        let term = StructureTensor::lcs_term(&lcs, j + 1, dim);
        if term.contains(&tail_span) {
            best = j;
            j += 1;
        } else {
            break;
        }
        if term.is_zero() {
            // Tail span inside the zero space is impossible here.
            break;
        }
    }
    debug_assert!(best >= 1, "distribution tail always sits in g^(2)");
    Ok(AlphaValue::Finite(best))
}

/// Alpha exponents of the asymptotic side. Requires a verified asymptotic
/// grading over a nilpotent algebra.
pub fn compute_alphas(
    tensor: &StructureTensor,
    grading: &Grading,
    delta: &Subspace,
) -> Result<AsymptoticAlphas, AlgebraError> {
    require_asymptotic(grading)?;
    if matches!(tensor.validate().nilpotency, Nilpotency::NotNilpotent) {
        return Err(AlgebraError::NotNilpotent);
    }
    let a1 = alpha1_inf(tensor, grading)?;
    let a2 = alpha2_inf(tensor, grading, delta)?;
    Ok(AsymptoticAlphas {
        alpha1_inf: a1,
        alpha2_inf: a2,
        alpha_inf: a1.min(a2),
    })
}

/// Largest j such that every left-iterated bracket of tangent layers lands
/// in `W_{|p|} ⊕ W_{≤ |p|-j}`. Infinity exactly when the grading is a
/// stratification. Works for non-nilpotent algebras: the search is pruned
/// once deeper tuples can no longer lower the defect.
pub fn compute_alpha0(
    tensor: &StructureTensor,
    grading: &Grading,
) -> Result<AlphaValue, AlgebraError> {
    require_tangent(grading)?;
    let report = classify_grading(tensor, grading, None)?;
    if report.stratification {
        return Ok(AlphaValue::Infinity);
    }
    let s = grading.step();
    let mut min_defect: Option<usize> = None;
    // Frontier of (span, weight) pairs for suffix tuples, deduplicated.
    let mut frontier: Vec<(Subspace, usize)> = Vec::new();
    for j in 1..=s {
        let layer = grading.layer(j);
        if !layer.is_zero() {
            frontier.push((layer, j));
        }
    }
    loop {
        let mut next_frontier: Vec<(Subspace, usize)> = Vec::new();
        let mut seen: BTreeSet<(usize, Vec<Vec<String>>)> = BTreeSet::new();
        for (span, weight) in &frontier {
            for i in 1..=s {
                let layer = grading.layer(i);
                if layer.is_zero() {
                    continue;
                }
                let w = weight + i;
                // A component at m < |p| gives defect |p| - m ≥ |p| - s, so
                // heavier tuples cannot improve on the current minimum.
                if let Some(cur) = min_defect {
                    if w.saturating_sub(s) >= cur {
                        continue;
                    }
                }
                let next = tensor.subspace_bracket(&layer, span)?;
                if next.is_zero() {
                    continue;
                }
                let mut max_low: Option<usize> = None;
                for m in (1..w.min(s + 1)).rev() {
                    let hit = next
                        .basis()
                        .iter()
                        .any(|row| !vis_zero(&grading.component(row, m)));
                    if hit {
                        max_low = Some(m);
                        break;
                    }
                }
                if let Some(m) = max_low {
                    let d = w - m;
                    min_defect = Some(min_defect.map_or(d, |cur| cur.min(d)));
                }
                let key = (
                    w,
                    next.basis()
                        .iter()
                        .map(|r| r.iter().map(|x| x.to_string()).collect())
                        .collect(),
                );
                if seen.insert(key) {
                    next_frontier.push((next, w));
                }
            }
        }
        if next_frontier.is_empty() {
            break;
        }
        frontier = next_frontier;
    }
    let d = min_defect.ok_or_else(|| {
        AlgebraError::Invalid(
            "non-stratified tangent grading must have a finite alpha0 defect".into(),
        )
    })?;
    Ok(AlphaValue::Finite(d))
}

/// Certificate for the three Carnot-quotient-ideal conditions. Valid only
/// when all three hold. The quotient tensor is expressed on the basis of a
/// deterministic complement of the ideal.
#[derive(Debug, Clone)]
pub struct CqiCertificate {
    pub ideal: Subspace,
    pub is_ideal: bool,
    pub quotient_stratified: bool,
    pub distribution_condition: bool,
    pub quotient_tensor: StructureTensor,
    /// Complement basis used for the quotient coordinates.
    pub complement: Subspace,
    /// Grading layers pushed to the quotient, in quotient coordinates.
    pub quotient_layers: Vec<Subspace>,
}

impl CqiCertificate {
    pub fn valid(&self) -> bool {
        self.is_ideal && self.quotient_stratified && self.distribution_condition
    }
}

/// Decompose `v = c + i` with `c` in the complement and `i` in the ideal;
/// returns the complement coordinates.
fn quotient_coords(
    complement: &Subspace,
    ideal: &Subspace,
    v: &[Rat],
) -> Option<Vec<Rat>> {
    let dim = v.len();
    let cols: Vec<&Vec<Rat>> = complement.basis().iter().chain(ideal.basis()).collect();
    let mut a = vec![crate::rat::vzero(cols.len()); dim];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..dim {
            a[i][j] = col[i].clone();
        }
    }
    let sol = crate::linalg::solve(&a, v)?;
    Some(sol[..complement.dim()].to_vec())
}

/// Check whether `ideal` is a Carnot quotient ideal of `(tensor, delta)`
/// with respect to `grading`.
pub fn check_cqi(
    tensor: &StructureTensor,
    grading: &Grading,
    delta: &Subspace,
    ideal: &Subspace,
) -> Result<CqiCertificate, AlgebraError> {
    let dim = tensor.dim();
    if ideal.ambient_dim() != dim {
        return Err(AlgebraError::DimensionMismatch {
            expected: dim,
            got: ideal.ambient_dim(),
        });
    }
    let full = Subspace::full(dim);
    let is_ideal = ideal.contains(&tensor.subspace_bracket(&full, ideal)?);

    let complement = ideal.complement_within(&full, None)?;
    let qdim = complement.dim();

    // Quotient tensor on the complement basis.
    let mut quotient_tensor = StructureTensor::new(qdim, None);
    let mut coords_ok = true;
    for a in 0..qdim {
        for b in (a + 1)..qdim {
            let w = tensor.bracket(&complement.basis()[a], &complement.basis()[b])?;
            match quotient_coords(&complement, ideal, &w) {
                Some(coords) => {
                    let targets: Vec<(usize, Rat)> = coords
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .collect();
                    if !targets.is_empty() {
                        quotient_tensor.set_bracket(a, b, targets)?;
                    }
                }
                None => coords_ok = false,
            }
        }
    }

    // Projected layers in quotient coordinates.
    let mut quotient_layers = Vec::with_capacity(grading.step());
    for layer in grading.layers() {
        let mut rows = Vec::new();
        for v in layer.basis() {
            match quotient_coords(&complement, ideal, v) {
                Some(c) => rows.push(c),
                None => coords_ok = false,
            }
        }
        quotient_layers.push(Subspace::span(qdim, &rows)?);
    }

    let quotient_stratified = if !coords_ok {
        false
    } else if qdim == 0 {
        // Quotient by the whole algebra: the zero algebra is degenerately
        // stratified.
        true
    } else {
        match Grading::new(quotient_layers.clone(), GradingKind::Unverified) {
            Ok(qg) => classify_grading(&quotient_tensor, &qg, None)?.stratification,
            Err(_) => false,
        }
    };

    let distribution_condition = grading.layer(1).sum(ideal)?.contains(delta);

    Ok(CqiCertificate {
        ideal: ideal.clone(),
        is_ideal,
        quotient_stratified,
        distribution_condition,
        quotient_tensor,
        complement,
        quotient_layers,
    })
}

#[derive(Debug, Clone)]
pub enum BetaStrategy {
    /// Graded coordinate subspaces: spans of subsets of the concatenated
    /// layer bases, layer by layer. Justified by dilation invariance of
    /// Carnot quotient ideals.
    Coordinate,
    /// Candidate ideals supplied by the caller.
    UserSupplied(Vec<Subspace>),
}

#[derive(Debug, Clone)]
pub struct BetaResult {
    /// Least k admitting a witness among the searched candidates; an upper
    /// bound for the true beta, exact when `exhaustive`.
    pub beta_hat: usize,
    pub witness: Option<CqiCertificate>,
    pub exhaustive: bool,
}

/// The bracket action is monomial in the graded basis and injective per
/// generator: each `[b_i, b_j]` is a multiple of a single basis vector, and
/// for fixed `i` distinct `j` never map to the same target. Under these two
/// conditions the coordinate support of any Carnot quotient ideal is again a
/// Carnot quotient ideal in the same `D_{≤k}`, so the coordinate search is
/// provably complete.
fn coordinate_search_exhaustive(tensor: &StructureTensor, pool: &[Vec<Rat>]) -> bool {
    let Ok(graded) = tensor.in_basis(pool) else {
        return false;
    };
    let n = pool.len();
    for i in 0..n {
        let mut targets = BTreeSet::new();
        for j in 0..n {
            if i == j {
                continue;
            }
            let w = graded.bracket_basis(i.min(j), i.max(j));
            let nz: Vec<usize> = (0..n).filter(|&k| !w[k].is_zero()).collect();
            match nz.len() {
                0 => {}
                1 => {
                    if !targets.insert(nz[0]) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    }
    true
}

/// Search for the least k with a Carnot quotient ideal inside `D_{≤k}`.
/// Candidates at each level are enumerated largest-first so the witness is
/// the maximal valid coordinate ideal at the optimal level.
pub fn beta_search(
    tensor: &StructureTensor,
    grading: &Grading,
    delta: &Subspace,
    strategy: &BetaStrategy,
) -> Result<BetaResult, AlgebraError> {
    let s = grading.step();
    let dim = tensor.dim();

    let exhaustive = match strategy {
        BetaStrategy::Coordinate => {
            let pool: Vec<Vec<Rat>> = grading
                .layers()
                .iter()
                .flat_map(|l| l.basis().iter().cloned())
                .collect();
            coordinate_search_exhaustive(tensor, &pool)
        }
        BetaStrategy::UserSupplied(_) => false,
    };

    for k in 0..=s {
        let mut candidates: Vec<Subspace> = Vec::new();
        match strategy {
            BetaStrategy::Coordinate => {
                let pool: Vec<Vec<Rat>> = grading
                    .layers()
                    .iter()
                    .take(k)
                    .flat_map(|l| l.basis().iter().cloned())
                    .collect();
                let n = pool.len();
                if n > 22 {
                    return Err(AlgebraError::Invalid(format!(
                        "coordinate beta search over {n} generators is too large"
                    )));
                }
                // All subsets, largest first, then lexicographic.
                let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
                masks.sort_by_key(|m| (usize::MAX - m.count_ones() as usize, *m));
                for mask in masks {
                    let rows: Vec<Vec<Rat>> = (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| pool[i].clone())
                        .collect();
                    candidates.push(Subspace::span(dim, &rows)?);
                }
            }
            BetaStrategy::UserSupplied(list) => {
                let dk = grading.weight_leq(k);
                for cand in list {
                    if dk.contains(cand) {
                        candidates.push(cand.clone());
                    }
                }
                if k == 0 {
                    candidates.push(Subspace::zero(dim));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for cand in candidates {
            let key: Vec<Vec<String>> = cand
                .basis()
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect();
            if !seen.insert(key) {
                continue;
            }
            let cert = check_cqi(tensor, grading, delta, &cand)?;
            if cert.valid() {
                return Ok(BetaResult {
                    beta_hat: k,
                    witness: Some(cert),
                    exhaustive,
                });
            }
        }
    }
    Err(AlgebraError::Invalid(
        "no Carnot quotient ideal found up to k = s; this cannot happen for a \
         verified grading"
            .into(),
    ))
}
