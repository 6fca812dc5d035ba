//! Structure tensors of Lie algebras in a fixed basis.

use crate::error::AlgebraError;
use crate::linalg::{invert, mat_vec};
use crate::rat::{basis_vec, vis_zero, vzero, Rat};
use crate::subspace::Subspace;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Sparse bracket coefficients `c_{ij}^k`, stored for `i < j` only;
/// antisymmetry is synthesized on read. Jacobi is checked, never assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureTensor {
    dim: usize,
    basis_names: Vec<String>,
    coeffs: BTreeMap<(usize, usize), Vec<(usize, Rat)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nilpotency {
    Step(usize),
    NotNilpotent,
}

/// Result of [`StructureTensor::validate`].
#[derive(Debug, Clone)]
pub struct AlgebraReport {
    pub jacobi_ok: bool,
    pub nilpotency: Nilpotency,
    /// Lower central series `g^(1) = g, g^(i+1) = [g, g^(i)]`, listed until it
    /// stabilizes (ending with the zero space iff nilpotent).
    pub lcs: Vec<Subspace>,
}

impl AlgebraReport {
    pub fn step(&self) -> Option<usize> {
        match self.nilpotency {
            Nilpotency::Step(s) => Some(s),
            Nilpotency::NotNilpotent => None,
        }
    }
}

/// Result of [`StructureTensor::delta_filtration`].
#[derive(Debug, Clone)]
pub struct DeltaFiltration {
    /// `(Δ^k, Δ^[k])` for k = 1.. until the flag stabilizes.
    pub stages: Vec<(Subspace, Subspace)>,
    pub bracket_generating: bool,
}

impl DeltaFiltration {
    /// Step of the distribution: least k with `Δ^[k]` = full space.
    pub fn step(&self) -> Option<usize> {
        if !self.bracket_generating {
            return None;
        }
        let full_dim = self.stages.last().unwrap().1.dim();
        self.stages.iter().position(|(_, f)| f.dim() == full_dim).map(|i| i + 1)
    }

    pub fn flag(&self) -> Vec<Subspace> {
        self.stages.iter().map(|(_, f)| f.clone()).collect()
    }
}

impl StructureTensor {
    pub fn new(dim: usize, basis_names: Option<Vec<String>>) -> Self {
        let basis_names =
            basis_names.unwrap_or_else(|| (1..=dim).map(|i| format!("e{i}")).collect());
        assert_eq!(basis_names.len(), dim);
        Self {
            dim,
            basis_names,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    /// Set `[e_i, e_j] = sum c_k e_k` for `i < j`. Zero entries are dropped.
    pub fn set_bracket(
        &mut self,
        i: usize,
        j: usize,
        targets: Vec<(usize, Rat)>,
    ) -> Result<(), AlgebraError> {
        if i >= j || j >= self.dim {
            return Err(AlgebraError::Invalid(format!(
                "bracket indices must satisfy i < j < dim, got ({i}, {j})"
            )));
        }
        let mut merged: BTreeMap<usize, Rat> = BTreeMap::new();
        for (k, c) in targets {
            if k >= self.dim {
                return Err(AlgebraError::DimensionMismatch {
                    expected: self.dim,
                    got: k,
                });
            }
            *merged.entry(k).or_insert_with(Rat::zero) += c;
        }
        let entry: Vec<(usize, Rat)> =
            merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if entry.is_empty() {
            self.coeffs.remove(&(i, j));
        } else {
            self.coeffs.insert((i, j), entry);
        }
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &[(usize, Rat)])> {
        self.coeffs.iter().map(|(&(i, j), v)| (i, j, v.as_slice()))
    }

    /// `[e_i, e_j]` as a dense vector, any index order.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<Rat> {
        let mut out = vzero(self.dim);
        if i == j {
            return out;
        }
        let (a, b, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
        if let Some(targets) = self.coeffs.get(&(a, b)) {
            for (k, c) in targets {
                out[*k] = if sign > 0 { c.clone() } else { -c.clone() };
            }
        }
        out
    }

    /// Bilinear antisymmetric evaluation `[x, y]`.
    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Result<Vec<Rat>, AlgebraError> {
        if x.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if y.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        let mut out = vzero(self.dim);
        for (&(i, j), targets) in &self.coeffs {
            let c = &x[i] * &y[j] - &x[j] * &y[i];
            if c.is_zero() {
                continue;
            }
            for (k, coeff) in targets {
                out[*k] += &c * coeff;
            }
        }
        Ok(out)
    }

    /// Left-iterated bracket `[v_0, [v_1, [... v_m]]]`.
    pub fn iterated_bracket(&self, vs: &[Vec<Rat>]) -> Result<Vec<Rat>, AlgebraError> {
        let mut acc = match vs.last() {
            Some(v) => v.clone(),
            None => return Ok(vzero(self.dim)),
        };
        for v in vs[..vs.len() - 1].iter().rev() {
            acc = self.bracket(v, &acc)?;
        }
        Ok(acc)
    }

    pub fn jacobi_ok(&self) -> bool {
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                for k in (j + 1)..self.dim {
                    let ei = basis_vec(self.dim, i);
                    let ej = basis_vec(self.dim, j);
                    let ek = basis_vec(self.dim, k);
                    let mut s = self.bracket(&ei, &self.bracket(&ej, &ek).unwrap()).unwrap();
                    let t = self.bracket(&ej, &self.bracket(&ek, &ei).unwrap()).unwrap();
                    let u = self.bracket(&ek, &self.bracket(&ei, &ej).unwrap()).unwrap();
                    for ((a, b), c) in s.iter_mut().zip(t).zip(u) {
                        *a += b + c;
                    }
                    if !vis_zero(&s) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Span of `{[a, b]}` over basis pairs of the operands.
    pub fn subspace_bracket(
        &self,
        a: &Subspace,
        b: &Subspace,
    ) -> Result<Subspace, AlgebraError> {
        if a.ambient_dim() != self.dim || b.ambient_dim() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                got: a.ambient_dim().max(b.ambient_dim()),
            });
        }
        let mut gens = Vec::with_capacity(a.dim() * b.dim());
        for ar in a.basis() {
            for br in b.basis() {
                gens.push(self.bracket(ar, br)?);
            }
        }
        Subspace::span(self.dim, &gens)
    }

    /// Lower central series, listed until stabilization.
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let full = Subspace::full(self.dim);
        let mut series = vec![full.clone()];
        loop {
            let prev = series.last().unwrap();
            let next = self.subspace_bracket(&full, prev).unwrap();
            if &next == prev {
                break;
            }
            series.push(next);
            if series.last().unwrap().is_zero() {
                break;
            }
        }
        series
    }

    pub fn validate(&self) -> AlgebraReport {
        let lcs = self.lower_central_series();
        let nilpotency = if lcs.last().unwrap().is_zero() {
            Nilpotency::Step(lcs.len() - 1)
        } else {
            Nilpotency::NotNilpotent
        };
        AlgebraReport {
            jacobi_ok: self.jacobi_ok(),
            nilpotency,
            lcs,
        }
    }

    /// `g^(j)` with `g^(1)` the full space; zero beyond the series length.
    pub fn lcs_term(lcs: &[Subspace], j: usize, dim: usize) -> Subspace {
        debug_assert!(j >= 1);
        if j - 1 < lcs.len() {
            lcs[j - 1].clone()
        } else {
            Subspace::zero(dim)
        }
    }

    /// Distribution filtration `Δ^1 = Δ`, `Δ^{k+1} = [Δ, Δ^k]`,
    /// `Δ^[k] = Δ^[k-1] + Δ^k`, iterated until `Δ^[k]` stabilizes.
    pub fn delta_filtration(&self, delta: &Subspace) -> Result<DeltaFiltration, AlgebraError> {
        if delta.ambient_dim() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                got: delta.ambient_dim(),
            });
        }
        let mut stages: Vec<(Subspace, Subspace)> = vec![(delta.clone(), delta.clone())];
        loop {
            let (prev_power, prev_flag) = stages.last().unwrap().clone();
            let power = self.subspace_bracket(delta, &prev_power)?;
            let flag = prev_flag.sum(&power)?;
            if flag == prev_flag {
                break;
            }
            stages.push((power, flag));
        }
        let bracket_generating = stages.last().unwrap().1.dim() == self.dim;
        Ok(DeltaFiltration {
            stages,
            bracket_generating,
        })
    }

    /// Direct product of two algebras on the concatenated basis.
    pub fn direct_sum(&self, other: &StructureTensor) -> StructureTensor {
        let dim = self.dim + other.dim;
        let mut names = self.basis_names.clone();
        names.extend(other.basis_names.iter().cloned());
        let mut t = StructureTensor::new(dim, Some(names));
        for (i, j, targets) in self.entries() {
            t.set_bracket(i, j, targets.to_vec()).unwrap();
        }
        for (i, j, targets) in other.entries() {
            let shifted: Vec<(usize, Rat)> = targets
                .iter()
                .map(|(k, c)| (k + self.dim, c.clone()))
                .collect();
            t.set_bracket(i + self.dim, j + self.dim, shifted).unwrap();
        }
        t
    }

    /// Re-express the tensor in the basis given by `rows` (each row a vector
    /// of the current ambient space). Fails when the rows are not a basis.
    pub fn in_basis(&self, rows: &[Vec<Rat>]) -> Result<StructureTensor, AlgebraError> {
        let n = rows.len();
        if n != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                got: n,
            });
        }
        // Columns of P are the new basis vectors; coordinates transform by
        // P^{-1}.
        let mut p = vec![vzero(n); n];
        for (j, row) in rows.iter().enumerate() {
            for i in 0..n {
                p[i][j] = row[i].clone();
            }
        }
        let pinv = invert(&p).ok_or(AlgebraError::NotDirectSum)?;
        let mut t = StructureTensor::new(n, None);
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.bracket(&rows[i], &rows[j])?;
                let coords = mat_vec(&pinv, &w);
                let targets: Vec<(usize, Rat)> = coords
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                if !targets.is_empty() {
                    t.set_bracket(i, j, targets)?;
                }
            }
        }
        Ok(t)
    }
}

/// The 3-dimensional Heisenberg algebra `[e1, e2] = e3`.
pub fn heisenberg() -> StructureTensor {
    let mut t = StructureTensor::new(3, None);
    t.set_bracket(0, 1, vec![(2, crate::rat::rint(1))]).unwrap();
    t
}

/// `N_{5,2,2}`: `[e1,e2] = e4`, `[e1,e4] = [e2,e3] = e5`.
pub fn n522() -> StructureTensor {
    let mut t = StructureTensor::new(5, None);
    let one = || crate::rat::rint(1);
    t.set_bracket(0, 1, vec![(3, one())]).unwrap();
    t.set_bracket(0, 3, vec![(4, one())]).unwrap();
    t.set_bracket(1, 2, vec![(4, one())]).unwrap();
    t
}

/// The filiform algebra `N_{5,2,1}`: `[e1,e2] = e3`, `[e1,e3] = e4`,
/// `[e1,e4] = e5`.
pub fn n521() -> StructureTensor {
    let mut t = StructureTensor::new(5, None);
    let one = || crate::rat::rint(1);
    t.set_bracket(0, 1, vec![(2, one())]).unwrap();
    t.set_bracket(0, 2, vec![(3, one())]).unwrap();
    t.set_bracket(0, 3, vec![(4, one())]).unwrap();
    t
}
