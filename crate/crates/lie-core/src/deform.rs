//! One-parameter families of deformed brackets and the product difference
//! formulas they induce.
//!
//! Conjugating the bracket by dilations gives, on the asymptotic side,
//! `[x,y]^(ε) = δ_ε [δ_ε^{-1} x, δ_ε^{-1} y]`: the layer-k output of a
//! bracket of layers i and j scales by `ε^{k-i-j}`. On the tangent side the
//! conjugation is by `δ_ε^{-1}` and the scale is `ε^{i+j-k}`. Both extend
//! polynomially to `ε = 0`, where they agree with the cone bracket.

use crate::bch::{bch_table, BchTable};
use crate::error::AlgebraError;
use crate::grading::{cone_tensor, Grading, Side};
use crate::rat::{vzero, Rat};
use crate::subspace::Subspace;
use crate::tensor::{Nilpotency, StructureTensor};
use num_traits::{One, Zero};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct DeformedFamily {
    base: StructureTensor,
    grading: Grading,
    side: Side,
    cone: StructureTensor,
    step: usize,
    table: Arc<BchTable>,
}

impl DeformedFamily {
    /// Requires a grading verified for the requested side; the asymptotic
    /// side additionally requires nilpotency.
    pub fn new(
        base: StructureTensor,
        grading: Grading,
        side: Side,
    ) -> Result<Self, AlgebraError> {
        let cone = cone_tensor(&base, &grading, side)?.tensor;
        let report = base.validate();
        let step = match (side, report.step()) {
            (Side::Asymptotic, None) => return Err(AlgebraError::NotNilpotent),
            (_, Some(s)) => s.max(grading.step()),
            // Tangent side on a non-nilpotent algebra: products are local;
            // truncate at the grading depth.
            (Side::Tangent, None) => grading.step().max(2),
        };
        let table = bch_table(step.min(crate::bch::MAX_STEP_CAP))?;
        Ok(Self {
            base,
            grading,
            side,
            cone,
            step,
            table,
        })
    }

    pub fn base(&self) -> &StructureTensor {
        &self.base
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn cone(&self) -> &StructureTensor {
        &self.cone
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn table(&self) -> &Arc<BchTable> {
        &self.table
    }

    /// Deformed bracket of two vectors at rational ε, evaluated exactly via
    /// the layer-scaling formula.
    pub fn bracket_at(&self, eps: &Rat, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>, AlgebraError> {
        let s = self.grading.step();
        let cx = self.grading.components(x);
        let cy = self.grading.components(y);
        let mut out = vzero(self.base.dim());
        for i in 1..=s {
            if crate::rat::vis_zero(&cx[i - 1]) {
                continue;
            }
            for j in 1..=s {
                if crate::rat::vis_zero(&cy[j - 1]) {
                    continue;
                }
                let w = self.base.bracket(&cx[i - 1], &cy[j - 1])?;
                for k in 1..=s {
                    let comp = self.grading.component(&w, k);
                    if crate::rat::vis_zero(&comp) {
                        continue;
                    }
                    let scale = self.eps_power(eps, i, j, k);
                    crate::rat::vaxpy(&mut out, &scale, &comp);
                }
            }
        }
        Ok(out)
    }

    /// `ε^(k-i-j)` on the asymptotic side, `ε^(i+j-k)` on the tangent side,
    /// with the polynomial extension at ε = 0 (negative powers cannot occur
    /// for verified gradings; they are treated as dropping the term).
    fn eps_power(&self, eps: &Rat, i: usize, j: usize, k: usize) -> Rat {
        let exp: i64 = match self.side {
            Side::Asymptotic => k as i64 - i as i64 - j as i64,
            Side::Tangent => i as i64 + j as i64 - k as i64,
        };
        if exp < 0 {
            // Outside the containment guaranteed by the grading kind.
            return Rat::zero();
        }
        let mut pow = Rat::one();
        for _ in 0..exp {
            pow *= eps;
        }
        pow
    }

    /// Deformed structure tensor at rational ε. `at(1)` is the base tensor
    /// and `at(0)` is the cone tensor, both exactly.
    pub fn at(&self, eps: &Rat) -> StructureTensor {
        let dim = self.base.dim();
        let mut t = StructureTensor::new(dim, Some(self.base.basis_names().to_vec()));
        for a in 0..dim {
            for b in (a + 1)..dim {
                let ea = crate::rat::basis_vec(dim, a);
                let eb = crate::rat::basis_vec(dim, b);
                let w = self.bracket_at(eps, &ea, &eb).unwrap();
                let targets: Vec<(usize, Rat)> = w
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                if !targets.is_empty() {
                    t.set_bracket(a, b, targets).unwrap();
                }
            }
        }
        t
    }

    /// Group product at ε (exact for nilpotent tensors; tangent-side
    /// non-nilpotent families use the truncated local product).
    pub fn product_at(&self, eps: &Rat, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>, AlgebraError> {
        let tensor = self.at(eps);
        let steps = self.effective_steps(&tensor)?;
        self.table.product(&tensor, steps, x, y)
    }

    fn effective_steps(&self, tensor: &StructureTensor) -> Result<usize, AlgebraError> {
        match tensor.validate().nilpotency {
            Nilpotency::Step(s) => {
                if s > crate::bch::MAX_STEP_CAP {
                    return Err(AlgebraError::StepCapExceeded(s, crate::bch::MAX_STEP_CAP));
                }
                Ok(s)
            }
            Nilpotency::NotNilpotent => Ok(self.table.max_step()),
        }
    }

    /// `x *_ε y - x *_0 y` via the explicit layered sum over product words,
    /// tuples of layers, and output layers. This is an independent route to
    /// the same value as subtracting the two products directly; the
    /// redundancy is the module's core self-test.
    pub fn product_difference(
        &self,
        eps: &Rat,
        x: &[Rat],
        y: &[Rat],
    ) -> Result<Vec<Rat>, AlgebraError> {
        let coeffs = self.difference_polynomial(x, y)?;
        let mut out = vzero(self.base.dim());
        let mut pow = Rat::one();
        for c in coeffs {
            crate::rat::vaxpy(&mut out, &pow, &c);
            pow *= eps;
        }
        Ok(out)
    }

    /// Coefficient vectors of the ε-polynomial `x *_ε y - x *_0 y`, index m
    /// holding the coefficient of `ε^m`. Computed from the layered sum: on
    /// the asymptotic side a word of layer weights p contributes its output
    /// layer j > |p| at power `ε^{j-|p|}`; on the tangent side layers
    /// j < |p| contribute at `ε^{|p|-j}`.
    pub fn difference_polynomial(
        &self,
        x: &[Rat],
        y: &[Rat],
    ) -> Result<Vec<Vec<Rat>>, AlgebraError> {
        let s = self.grading.step();
        let dim = self.base.dim();
        let cx = self.grading.components(x);
        let cy = self.grading.components(y);
        let steps = self.step.min(self.table.max_step());
        // Asymptotic powers are j - |p| with j ≤ s and |p| ≥ 2; tangent
        // powers are |p| - j with |p| ≤ s * k.
        let max_pow = match self.side {
            Side::Asymptotic => s.saturating_sub(2),
            Side::Tangent => s * steps,
        };
        let mut coeffs: Vec<Vec<Rat>> = vec![vzero(dim); max_pow + 1];
        for k in 2..=steps {
            for (word, b) in self.table.words_at(k) {
                // Tuples p of layer weights for each factor.
                let mut tuple = vec![1usize; k];
                loop {
                    let weight: usize = tuple.iter().sum();
                    let within = match self.side {
                        Side::Asymptotic => weight <= s,
                        Side::Tangent => true,
                    };
                    if within {
                        let factors: Vec<&[Rat]> = word
                            .iter()
                            .zip(&tuple)
                            .map(|(&letter, &p)| {
                                let comp =
                                    if letter == 1 { &cx[p - 1] } else { &cy[p - 1] };
                                comp.as_slice()
                            })
                            .collect();
                        if factors.iter().all(|f| !crate::rat::vis_zero(f)) {
                            let owned: Vec<Vec<Rat>> =
                                factors.iter().map(|f| f.to_vec()).collect();
                            let v = self.base.iterated_bracket(&owned)?;
                            if !crate::rat::vis_zero(&v) {
                                for j in 1..=s {
                                    let m = match self.side {
                                        Side::Asymptotic if j > weight => j - weight,
                                        Side::Tangent if j < weight => weight - j,
                                        _ => continue,
                                    };
                                    if m > max_pow {
                                        continue;
                                    }
                                    let comp = self.grading.component(&v, j);
                                    if !crate::rat::vis_zero(&comp) {
                                        crate::rat::vaxpy(&mut coeffs[m], &b, &comp);
                                    }
                                }
                            }
                        }
                    }
                    // Next tuple in {1..s}^k.
                    let mut idx = 0;
                    loop {
                        if idx == k {
                            break;
                        }
                        if tuple[idx] < s {
                            tuple[idx] += 1;
                            break;
                        }
                        tuple[idx] = 1;
                        idx += 1;
                    }
                    if idx == k {
                        break;
                    }
                }
            }
        }
        Ok(coeffs)
    }
}

/// Quotient of a tensor by an ideal on a fixed complement basis; used to
/// check that deformed tensors all induce the same quotient bracket.
pub fn quotient_on_complement(
    tensor: &StructureTensor,
    ideal: &Subspace,
    complement: &Subspace,
) -> Result<StructureTensor, AlgebraError> {
    let qdim = complement.dim();
    let mut q = StructureTensor::new(qdim, None);
    let dim = tensor.dim();
    let cols: Vec<Vec<Rat>> = complement
        .basis()
        .iter()
        .chain(ideal.basis())
        .cloned()
        .collect();
    let mut a = vec![vzero(cols.len()); dim];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..dim {
            a[i][j] = col[i].clone();
        }
    }
    for r in 0..qdim {
        for c in (r + 1)..qdim {
            let w = tensor.bracket(&complement.basis()[r], &complement.basis()[c])?;
            let sol = crate::linalg::solve(&a, &w).ok_or_else(|| {
                AlgebraError::Invalid("complement + ideal do not span".into())
            })?;
            let targets: Vec<(usize, Rat)> = sol[..qdim]
                .iter()
                .cloned()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .collect();
            if !targets.is_empty() {
                q.set_bracket(r, c, targets)?;
            }
        }
    }
    Ok(q)
}
