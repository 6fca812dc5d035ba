//! A metric family bundles a deformed bracket family with a distribution
//! and a norm; a `MetricStructure` is the family frozen at one ε, ready for
//! flows and distance estimation.
//!
//! On the asymptotic side the structure at ε > 0 carries the distribution
//! `δ_ε Δ` with norm `ε ‖δ_ε^{-1} ·‖`; parametrizing it by the basis
//! `δ_ε(b_l)/ε` makes the norm of a coordinate vector independent of ε. At
//! ε = 0 the structure switches to the cone bracket, the first layer as
//! distribution, and the projected limit norm. On the tangent side the
//! distribution and norm are fixed and only the bracket deforms.

use crate::fast::{ProjectionsF64, TableF64, TensorF64};
use crate::norm::{limit_quadratic, NormEval, NormSpec};
use crate::MetricError;
use lie_core::bch::BchTable;
use lie_core::deform::DeformedFamily;
use lie_core::grading::{Grading, Side};
use lie_core::rat::{to_f64, vec_to_f64, Rat};
use lie_core::subspace::Subspace;
use lie_core::tensor::StructureTensor;
use num_traits::{One, Zero};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct MetricFamily {
    family: DeformedFamily,
    delta: Subspace,
    norm_spec: NormSpec,
}

impl MetricFamily {
    pub fn new(
        family: DeformedFamily,
        delta: Subspace,
        norm_spec: NormSpec,
    ) -> Result<Self, MetricError> {
        norm_spec.validate(delta.dim())?;
        if !family
            .base()
            .delta_filtration(&delta)?
            .bracket_generating
        {
            return Err(MetricError::Algebra(
                lie_core::AlgebraError::NotBracketGenerating,
            ));
        }
        Ok(Self {
            family,
            delta,
            norm_spec,
        })
    }

    pub fn family(&self) -> &DeformedFamily {
        &self.family
    }

    pub fn delta(&self) -> &Subspace {
        &self.delta
    }

    pub fn norm_spec(&self) -> &NormSpec {
        &self.norm_spec
    }

    pub fn side(&self) -> Side {
        self.family.side()
    }

    pub fn grading(&self) -> &Grading {
        self.family.grading()
    }

    /// Matrix of the first-layer projection restricted to the distribution:
    /// distribution coordinates to first-layer coordinates (in the canonical
    /// basis of layer one). Independent of ε by the dilation scaling.
    pub fn layer1_matrix(&self) -> Vec<Vec<Rat>> {
        let grading = self.family.grading();
        let v1 = grading.layer(1);
        let pivots = v1.pivots();
        let mut rows = vec![Vec::with_capacity(self.delta.dim()); v1.dim()];
        for b in self.delta.basis() {
            let p1 = grading.component(b, 1);
            for (r, &piv) in pivots.iter().enumerate() {
                rows[r].push(p1[piv].clone());
            }
        }
        rows
    }

    /// Freeze the family at exact ε.
    pub fn structure_at(&self, eps: &Rat) -> Result<MetricStructure, MetricError> {
        let side = self.family.side();
        let grading = self.family.grading().clone();
        let tensor = self.family.at(eps);
        let ddim = self.delta.dim();

        let (dist_basis, norm, limit_form): (Vec<Vec<Rat>>, NormEval, Option<Vec<Vec<Rat>>>) =
            match (side, eps.is_zero()) {
                (Side::Tangent, _) => (
                    self.delta.basis().to_vec(),
                    NormEval::from_spec(&self.norm_spec, ddim),
                    None,
                ),
                (Side::Asymptotic, false) => {
                    let inv = Rat::one() / eps;
                    let basis = self
                        .delta
                        .basis()
                        .iter()
                        .map(|b| {
                            let d = grading.dilate(eps, b);
                            d.iter().map(|x| x * &inv).collect()
                        })
                        .collect();
                    (basis, NormEval::from_spec(&self.norm_spec, ddim), None)
                }
                (Side::Asymptotic, true) => {
                    let v1 = grading.layer(1);
                    let a = self.layer1_matrix();
                    let (norm, form) = match &self.norm_spec {
                        NormSpec::Euclidean => {
                            let q: Vec<Vec<Rat>> = (0..ddim)
                                .map(|i| {
                                    (0..ddim)
                                        .map(|j| lie_core::rat::rint((i == j) as i64))
                                        .collect()
                                })
                                .collect();
                            let form = limit_quadratic(&a, &q).ok_or_else(|| {
                                MetricError::BadNorm("degenerate limit form".into())
                            })?;
                            (quadratic_eval(&form), Some(form))
                        }
                        NormSpec::Quadratic(q) => {
                            let form = limit_quadratic(&a, q).ok_or_else(|| {
                                MetricError::BadNorm("degenerate limit form".into())
                            })?;
                            (quadratic_eval(&form), Some(form))
                        }
                        spec => {
                            let verts = spec
                                .ball_vertices(ddim)
                                .expect("polytope-like norm has vertices");
                            let mut projected: Vec<Vec<f64>> = Vec::new();
                            for w in &verts {
                                let img = lie_core::linalg::mat_vec(&a, w);
                                projected.push(vec_to_f64(&img));
                            }
                            (NormEval::Polytope(projected), None)
                        }
                    };
                    (v1.basis().to_vec(), norm, form)
                }
            };

        let step = tensor
            .validate()
            .step()
            .unwrap_or_else(|| self.family.table().max_step());
        let step = step.min(self.family.table().max_step());
        let tensor_f = TensorF64::from_exact(&tensor);
        let table = self.family.table().clone();
        let table_f = TableF64::from_exact(&table, step);
        let proj = ProjectionsF64::from_grading(&grading);

        Ok(MetricStructure {
            dim: tensor.dim(),
            eps: eps.clone(),
            eps_f: to_f64(eps),
            side,
            dist_dim: dist_basis.len(),
            dist_basis_f: dist_basis.iter().map(|b| vec_to_f64(b)).collect(),
            dist_basis,
            tensor,
            tensor_f,
            step,
            table,
            table_f,
            norm,
            norm_spec: self.norm_spec.clone(),
            limit_form,
            grading,
            proj,
        })
    }

    pub fn structure_at_f64(&self, eps: f64) -> Result<MetricStructure, MetricError> {
        let e = Rat::from_float(eps)
            .ok_or_else(|| MetricError::BadNorm(format!("epsilon {eps} is not finite")))?;
        self.structure_at(&e)
    }
}

fn quadratic_eval(form: &[Vec<Rat>]) -> NormEval {
    NormEval::Quadratic(
        form.iter()
            .map(|row| row.iter().map(to_f64).collect())
            .collect(),
    )
}

#[derive(Debug, Clone)]
pub struct MetricStructure {
    pub dim: usize,
    pub eps: Rat,
    pub eps_f: f64,
    pub side: Side,
    pub tensor: StructureTensor,
    pub tensor_f: TensorF64,
    /// Truncation depth of the group product (the nilpotency step).
    pub step: usize,
    pub table: Arc<BchTable>,
    pub table_f: TableF64,
    /// Ambient embeddings of the distribution coordinate directions.
    pub dist_basis: Vec<Vec<Rat>>,
    pub dist_basis_f: Vec<Vec<f64>>,
    pub dist_dim: usize,
    /// Norm of a distribution coordinate vector.
    pub norm: NormEval,
    pub norm_spec: NormSpec,
    /// Exact limit form when the ε = 0 norm is quadratic.
    pub limit_form: Option<Vec<Vec<Rat>>>,
    pub grading: Grading,
    pub proj: ProjectionsF64,
}

impl MetricStructure {
    pub fn embed_f(&self, coords: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for (c, b) in coords.iter().zip(&self.dist_basis_f) {
            if *c != 0.0 {
                for (o, x) in v.iter_mut().zip(b) {
                    *o += c * x;
                }
            }
        }
        v
    }

    pub fn embed_exact(&self, coords: &[Rat]) -> Vec<Rat> {
        let mut v = lie_core::rat::vzero(self.dim);
        for (c, b) in coords.iter().zip(&self.dist_basis) {
            lie_core::rat::vaxpy(&mut v, c, b);
        }
        v
    }

    pub fn product_f(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.table_f.product(&self.tensor_f, x, y)
    }

    pub fn product_exact(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        self.table
            .product(&self.tensor, self.step, x, y)
            .expect("dimension-checked product")
    }

    pub fn inverse_f(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| -v).collect()
    }

    /// Endpoint of a piecewise-constant control from `x0`: the exact finite
    /// product of the segment increments (f64 evaluation).
    pub fn flow_f(&self, segments: &[(f64, Vec<f64>)], x0: &[f64]) -> Vec<f64> {
        let mut acc = x0.to_vec();
        for (dur, u) in segments {
            let inc: Vec<f64> = self.embed_f(u).iter().map(|v| v * dur).collect();
            acc = self.product_f(&acc, &inc);
        }
        acc
    }

    /// Exact flow for rational segment data.
    pub fn flow_exact(&self, segments: &[(Rat, Vec<Rat>)], x0: &[Rat]) -> Vec<Rat> {
        let mut acc = x0.to_vec();
        for (dur, u) in segments {
            let emb = self.embed_exact(u);
            let inc: Vec<Rat> = emb.iter().map(|v| v * dur).collect();
            acc = self.product_exact(&acc, &inc);
        }
        acc
    }

    pub fn norm_coords(&self, u: &[f64]) -> f64 {
        self.norm.eval(u)
    }

    /// Homogeneous quasi-norm of an ambient vector.
    pub fn quasi_norm(&self, x: &[f64]) -> f64 {
        self.proj.quasi_norm(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lie_core::grading::build_asymptotic_grading;
    use lie_core::rat::{rat, rint};
    use lie_core::tensor::heisenberg;

    fn riem_heis() -> MetricFamily {
        let t = heisenberg();
        let g = build_asymptotic_grading(&t, None).unwrap();
        let fam = DeformedFamily::new(t, g, Side::Asymptotic).unwrap();
        MetricFamily::new(fam, Subspace::full(3), NormSpec::Euclidean).unwrap()
    }

    #[test]
    fn epsilon_one_is_the_plain_structure() {
        let m = riem_heis();
        let s = m.structure_at(&rint(1)).unwrap();
        assert_eq!(s.dist_basis, Subspace::full(3).basis().to_vec());
        assert_eq!(&s.tensor, m.family().base());
    }

    #[test]
    fn contracted_basis_scales_layers() {
        // δ_ε(e3)/ε = ε e3: the vertical direction gets expensive because a
        // unit coordinate step moves only ε in space... and indeed the norm
        // of the coordinate vector stays 1 while its spatial reach shrinks.
        let m = riem_heis();
        let e = rat(1, 4);
        let s = m.structure_at(&e).unwrap();
        assert_eq!(s.dist_basis[0], vec![rint(1), rint(0), rint(0)]);
        assert_eq!(s.dist_basis[2], vec![rint(0), rint(0), rat(1, 4)]);
        assert_eq!(s.norm_coords(&[0.0, 0.0, 1.0]), 1.0);
    }

    #[test]
    fn limit_structure_uses_first_layer_and_projected_norm() {
        let m = riem_heis();
        let s = m.structure_at(&rint(0)).unwrap();
        assert_eq!(s.dist_dim, 2);
        // Projection of the Euclidean unit 3-ball onto the plane is the unit
        // disk.
        let f = s.limit_form.as_ref().unwrap();
        assert_eq!(f[0][0], rint(1));
        assert_eq!(f[1][1], rint(1));
        assert_eq!(f[0][1], rint(0));
        // The cone of a Carnot algebra is itself.
        assert_eq!(&s.tensor, m.family().base());
    }

    #[test]
    fn flow_of_square_word_reaches_center() {
        let m = riem_heis();
        let s = m.structure_at(&rint(1)).unwrap();
        let segs = vec![
            (0.25, vec![4.0, 0.0, 0.0]),
            (0.25, vec![0.0, 4.0, 0.0]),
            (0.25, vec![-4.0, 0.0, 0.0]),
            (0.25, vec![0.0, -4.0, 0.0]),
        ];
        let end = s.flow_f(&segs, &[0.0; 3]);
        assert!((end[0]).abs() < 1e-12 && (end[1]).abs() < 1e-12);
        assert!((end[2] - 1.0).abs() < 1e-12);
    }
}
