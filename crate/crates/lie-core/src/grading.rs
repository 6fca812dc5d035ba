//! Linear gradings of a Lie algebra: asymptotic, tangent, stratification.

use crate::error::AlgebraError;
use crate::linalg::{invert, mat_vec};
use crate::rat::{vaxpy, vzero, Rat};
use crate::subspace::Subspace;
use crate::tensor::{Nilpotency, StructureTensor};
use num_traits::{One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradingKind {
    Asymptotic,
    Tangent,
    Stratification,
    Unverified,
}

/// Ordered layers `D_1, ..., D_s` forming a direct-sum decomposition, with
/// the projections and dilations they induce. Layer `j` has weight `j`.
/// Zero layers are permitted (degenerate quotients use them).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    layers: Vec<Subspace>,
    kind: GradingKind,
    dim: usize,
    /// Projection matrix onto each layer along the others.
    projections: Vec<Vec<Vec<Rat>>>,
}

impl Grading {
    /// Build from layers, verifying the direct-sum property exactly.
    pub fn new(layers: Vec<Subspace>, kind: GradingKind) -> Result<Self, AlgebraError> {
        let dim = layers
            .first()
            .map(Subspace::ambient_dim)
            .ok_or(AlgebraError::NotDirectSum)?;
        if layers.iter().any(|l| l.ambient_dim() != dim) {
            return Err(AlgebraError::NotDirectSum);
        }
        let total: usize = layers.iter().map(Subspace::dim).sum();
        if total != dim {
            return Err(AlgebraError::NotDirectSum);
        }
        // Concatenated layer bases as columns of P; invertibility is exactly
        // the direct-sum condition once dimensions add up.
        let mut p = vec![vzero(dim); dim];
        let mut col = 0;
        let mut starts: Vec<usize> = Vec::new();
        for layer in &layers {
            starts.push(col);
            for row in layer.basis() {
                for i in 0..dim {
                    p[i][col] = row[i].clone();
                }
                col += 1;
            }
        }
        let pinv = invert(&p).ok_or(AlgebraError::NotDirectSum)?;
        let mut projections = Vec::with_capacity(layers.len());
        for (layer, start) in layers.iter().zip(&starts) {
            // P_layer = B_layer * (the corresponding rows of P^{-1})
            let mut proj = vec![vzero(dim); dim];
            for (r, row) in layer.basis().iter().enumerate() {
                let prow = &pinv[start + r];
                for i in 0..dim {
                    if row[i].is_zero() {
                        continue;
                    }
                    for j in 0..dim {
                        let t = &row[i] * &prow[j];
                        proj[i][j] += t;
                    }
                }
            }
            projections.push(proj);
        }
        Ok(Self {
            layers,
            kind,
            dim,
            projections,
        })
    }

    pub fn layers(&self) -> &[Subspace] {
        &self.layers
    }

    pub fn layer(&self, j: usize) -> Subspace {
        debug_assert!(j >= 1);
        if j <= self.layers.len() {
            self.layers[j - 1].clone()
        } else {
            Subspace::zero(self.dim)
        }
    }

    pub fn step(&self) -> usize {
        self.layers.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GradingKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: GradingKind) -> Self {
        self.kind = kind;
        self
    }

    /// Projection matrix onto layer `j` along the other layers.
    pub fn projection_matrix(&self, j: usize) -> &[Vec<Rat>] {
        &self.projections[j - 1]
    }

    /// Component of `x` in layer `j` (1-based), in ambient coordinates.
    pub fn component(&self, x: &[Rat], j: usize) -> Vec<Rat> {
        debug_assert!(j >= 1);
        if j > self.layers.len() {
            return vzero(self.dim);
        }
        mat_vec(&self.projections[j - 1], x)
    }

    /// All layer components of `x`.
    pub fn components(&self, x: &[Rat]) -> Vec<Vec<Rat>> {
        (1..=self.layers.len()).map(|j| self.component(x, j)).collect()
    }

    /// `D_{<=j}` as a subspace.
    pub fn weight_leq(&self, j: usize) -> Subspace {
        let mut acc = Subspace::zero(self.dim);
        for l in self.layers.iter().take(j) {
            acc = acc.sum(l).unwrap();
        }
        acc
    }

    /// `D_{>=j}` as a subspace.
    pub fn weight_geq(&self, j: usize) -> Subspace {
        let mut acc = Subspace::zero(self.dim);
        for l in self.layers.iter().skip(j.saturating_sub(1)) {
            acc = acc.sum(l).unwrap();
        }
        acc
    }

    /// Dilation `δ_ε(x) = Σ ε^j (x)_j`, exact. `δ_0` is the zero map since
    /// all weights are at least one.
    pub fn dilate(&self, eps: &Rat, x: &[Rat]) -> Vec<Rat> {
        let mut out = vzero(self.dim);
        let mut pow = Rat::one();
        for j in 1..=self.layers.len() {
            pow *= eps;
            if pow.is_zero() {
                break;
            }
            let comp = self.component(x, j);
            vaxpy(&mut out, &pow, &comp);
        }
        out
    }

    /// `δ_ε` applied to every basis vector of a subspace.
    pub fn dilate_subspace(&self, eps: &Rat, s: &Subspace) -> Subspace {
        let rows: Vec<Vec<Rat>> = s.basis().iter().map(|r| self.dilate(eps, r)).collect();
        Subspace::span(self.dim, &rows).unwrap()
    }

    /// Effective top: largest layer index with a nonzero layer (0 if all are
    /// zero).
    pub fn effective_step(&self) -> usize {
        self.layers
            .iter()
            .rposition(|l| !l.is_zero())
            .map(|i| i + 1)
            .unwrap_or(0)
    }
}

/// Outcome of [`classify_grading`]: which verifications pass, all exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifyReport {
    pub asymptotic: bool,
    /// Only present when a distribution was supplied.
    pub tangent: Option<bool>,
    pub stratification: bool,
}

impl ClassifyReport {
    pub fn dominant_kind(&self) -> GradingKind {
        if self.stratification {
            GradingKind::Stratification
        } else if self.asymptotic {
            GradingKind::Asymptotic
        } else if self.tangent == Some(true) {
            GradingKind::Tangent
        } else {
            GradingKind::Unverified
        }
    }
}

/// Check the asymptotic condition (`g^(j) = V_j ⊕ g^(j+1)`), the tangent
/// condition (`Δ^[j] = W_j ⊕ Δ^[j-1]`, given `Δ`), and the stratification
/// conditions (`[D_1, D_j] = D_{j+1}`, `[D_1, D_top] = 0`), all exactly.
pub fn classify_grading(
    tensor: &StructureTensor,
    grading: &Grading,
    delta: Option<&Subspace>,
) -> Result<ClassifyReport, AlgebraError> {
    if grading.dim() != tensor.dim() {
        return Err(AlgebraError::DimensionMismatch {
            expected: tensor.dim(),
            got: grading.dim(),
        });
    }
    let report = tensor.validate();
    let dim = tensor.dim();

    let asymptotic = match report.nilpotency {
        Nilpotency::NotNilpotent => false,
        Nilpotency::Step(_) => {
            let lcs = &report.lcs;
            let mut ok = true;
            let count = grading.step().max(lcs.len().saturating_sub(1));
            for j in 1..=count {
                let gj = StructureTensor::lcs_term(lcs, j, dim);
                let gj1 = StructureTensor::lcs_term(lcs, j + 1, dim);
                let vj = grading.layer(j);
                // g^(j) = V_j ⊕ g^(j+1): containments, zero intersection,
                // and dimensions adding up.
                if !gj.contains(&vj)
                    || !vj.intersection(&gj1)?.is_zero()
                    || vj.sum(&gj1)? != gj
                {
                    ok = false;
                    break;
                }
            }
            ok
        }
    };

    let tangent = match delta {
        None => None,
        Some(delta) => {
            let filtration = tensor.delta_filtration(delta)?;
            let flag = filtration.flag();
            let mut ok = filtration.bracket_generating;
            if ok {
                let count = grading.step().max(flag.len());
                for j in 1..=count {
                    let fj = flag
                        .get(j - 1)
                        .cloned()
                        .unwrap_or_else(|| flag.last().unwrap().clone());
                    let fjm1 = if j == 1 {
                        Subspace::zero(dim)
                    } else {
                        flag.get(j - 2)
                            .cloned()
                            .unwrap_or_else(|| flag.last().unwrap().clone())
                    };
                    let wj = grading.layer(j);
                    if !fj.contains(&wj)
                        || !wj.intersection(&fjm1)?.is_zero()
                        || wj.sum(&fjm1)? != fj
                    {
                        ok = false;
                        break;
                    }
                }
            }
            Some(ok)
        }
    };

    let stratification = {
        let top = grading.effective_step();
        if top == 0 {
            // Zero algebra: degenerate but stratified.
            true
        } else {
            let d1 = grading.layer(1);
            let mut ok = true;
            for j in 1..top {
                if tensor.subspace_bracket(&d1, &grading.layer(j))? != grading.layer(j + 1) {
                    ok = false;
                    break;
                }
            }
            if ok {
                ok = tensor.subspace_bracket(&d1, &grading.layer(top))?.is_zero();
            }
            ok
        }
    };

    Ok(ClassifyReport {
        asymptotic,
        tangent,
        stratification,
    })
}

/// Layer-wise complements along the lower central series:
/// `V_j = complement(g^(j+1) ⊆ g^(j))`, greedy over `prefer`.
pub fn build_asymptotic_grading(
    tensor: &StructureTensor,
    prefer: Option<&[usize]>,
) -> Result<Grading, AlgebraError> {
    let report = tensor.validate();
    let Nilpotency::Step(step) = report.nilpotency else {
        return Err(AlgebraError::NotNilpotent);
    };
    let dim = tensor.dim();
    let mut layers = Vec::with_capacity(step);
    for j in 1..=step {
        let gj = StructureTensor::lcs_term(&report.lcs, j, dim);
        let gj1 = StructureTensor::lcs_term(&report.lcs, j + 1, dim);
        layers.push(gj1.complement_within(&gj, prefer)?);
    }
    let grading = Grading::new(layers, GradingKind::Unverified)?;
    let report = classify_grading(tensor, &grading, None)?;
    debug_assert!(report.asymptotic);
    Ok(grading.with_kind(if report.stratification {
        GradingKind::Stratification
    } else {
        GradingKind::Asymptotic
    }))
}

/// Layer-wise complements along the distribution filtration: `W_1 = Δ`,
/// `W_j = complement(Δ^[j-1] ⊆ Δ^[j])`, greedy over `prefer`.
pub fn build_tangent_grading(
    tensor: &StructureTensor,
    delta: &Subspace,
    prefer: Option<&[usize]>,
) -> Result<Grading, AlgebraError> {
    let filtration = tensor.delta_filtration(delta)?;
    if !filtration.bracket_generating {
        return Err(AlgebraError::NotBracketGenerating);
    }
    let flag = filtration.flag();
    let step = filtration.step().expect("bracket generating");
    let mut layers = vec![delta.clone()];
    for j in 2..=step {
        layers.push(flag[j - 2].complement_within(&flag[j - 1], prefer)?);
    }
    let grading = Grading::new(layers, GradingKind::Unverified)?;
    let report = classify_grading(tensor, &grading, Some(delta))?;
    debug_assert_eq!(report.tangent, Some(true));
    Ok(grading.with_kind(if report.stratification {
        GradingKind::Stratification
    } else {
        GradingKind::Tangent
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Asymptotic,
    Tangent,
}

/// Cone bracket: for homogeneous `v ∈ D_i`, `w ∈ D_j` the bracket keeps the
/// layer-`(i+j)` component of `[v, w]` and drops the rest.
#[derive(Debug, Clone)]
pub struct ConeAlgebra {
    pub tensor: StructureTensor,
    pub grading: Grading,
    pub side: Side,
}

/// Build the cone tensor of `tensor` with respect to a verified grading.
/// The identified basis is the ambient basis itself.
pub fn cone_tensor(
    tensor: &StructureTensor,
    grading: &Grading,
    side: Side,
) -> Result<ConeAlgebra, AlgebraError> {
    match (side, grading.kind()) {
        (_, GradingKind::Stratification) => {}
        (Side::Asymptotic, GradingKind::Asymptotic) => {}
        (Side::Tangent, GradingKind::Tangent) => {}
        _ => {
            return Err(AlgebraError::KindMismatch(match side {
                Side::Asymptotic => "asymptotic",
                Side::Tangent => "tangent",
            }))
        }
    }
    let dim = tensor.dim();
    let s = grading.step();
    let mut cone = StructureTensor::new(dim, Some(tensor.basis_names().to_vec()));
    for a in 0..dim {
        for b in (a + 1)..dim {
            let ea = crate::rat::basis_vec(dim, a);
            let eb = crate::rat::basis_vec(dim, b);
            let ca = grading.components(&ea);
            let cb = grading.components(&eb);
            let mut out = vzero(dim);
            for i in 1..=s {
                if crate::rat::vis_zero(&ca[i - 1]) {
                    continue;
                }
                for j in 1..=s {
                    if i + j > s || crate::rat::vis_zero(&cb[j - 1]) {
                        continue;
                    }
                    let w = tensor.bracket(&ca[i - 1], &cb[j - 1])?;
                    let keep = grading.component(&w, i + j);
                    for (o, k) in out.iter_mut().zip(keep) {
                        *o += k;
                    }
                }
            }
            let targets: Vec<(usize, Rat)> = out
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .collect();
            if !targets.is_empty() {
                cone.set_bracket(a, b, targets)?;
            }
        }
    }
    Ok(ConeAlgebra {
        tensor: cone,
        grading: grading.clone(),
        side,
    })
}
