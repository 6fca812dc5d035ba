//! Linear subspaces of Q^n in canonical reduced row-echelon form.
//!
//! The canonical representation makes equality structural: two `Subspace`
//! values are equal as Rust values exactly when they are equal as subspaces.

use crate::error::AlgebraError;
use crate::linalg::{kernel, rref};
use crate::rat::{basis_vec, vaxpy, vis_zero, vzero, Rat};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vec<Rat>>,
}

impl Subspace {
    /// Span of arbitrary vectors, canonicalized.
    pub fn span(ambient: usize, vectors: &[Vec<Rat>]) -> Result<Self, AlgebraError> {
        for v in vectors {
            if v.len() != ambient {
                return Err(AlgebraError::DimensionMismatch {
                    expected: ambient,
                    got: v.len(),
                });
            }
        }
        let mut rows = vectors.to_vec();
        rref(&mut rows);
        Ok(Self { ambient, rows })
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            rows: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            rows: (0..ambient).map(|i| basis_vec(ambient, i)).collect(),
        }
    }

    /// Span of coordinate directions.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let mut idx: Vec<usize> = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        Self {
            ambient,
            rows: idx.into_iter().map(|i| basis_vec(ambient, i)).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Canonical basis rows (RREF).
    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.rows
    }

    /// Pivot column of each basis row.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row"))
            .collect()
    }

    /// Residual of `v` after eliminating against the basis; zero iff `v` is a
    /// member.
    pub fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        let mut w = v.to_vec();
        for row in &self.rows {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            if !w[p].is_zero() {
                let f = -w[p].clone();
                vaxpy(&mut w, &f, row);
            }
        }
        w
    }

    pub fn contains_vec(&self, v: &[Rat]) -> bool {
        v.len() == self.ambient && vis_zero(&self.reduce(v))
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains_vec(r))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, AlgebraError> {
        self.check_ambient(other)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.clone());
        rref(&mut rows);
        Ok(Subspace {
            ambient: self.ambient,
            rows,
        })
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, AlgebraError> {
        self.check_ambient(other)?;
        // Kernel of [A^T | -B^T]: a solution (lambda, mu) encodes a common
        // point sum(lambda_i a_i) = sum(mu_j b_j).
        let a = self.dim();
        let b = other.dim();
        if a == 0 || b == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        let mut eqs: Vec<Vec<Rat>> = Vec::with_capacity(self.ambient);
        for coord in 0..self.ambient {
            let mut row = vzero(a + b);
            for (i, ar) in self.rows.iter().enumerate() {
                row[i] = ar[coord].clone();
            }
            for (j, br) in other.rows.iter().enumerate() {
                row[a + j] = -br[coord].clone();
            }
            eqs.push(row);
        }
        let null = kernel(&eqs, a + b);
        let mut vectors = Vec::with_capacity(null.len());
        for coeffs in null {
            let mut v = vzero(self.ambient);
            for (i, ar) in self.rows.iter().enumerate() {
                vaxpy(&mut v, &coeffs[i], ar);
            }
            vectors.push(v);
        }
        Subspace::span(self.ambient, &vectors)
    }

    /// Deterministic complement `C` with `self ⊕ C = within`, greedy over the
    /// preferred coordinate directions first, then over the canonical basis
    /// of `within`. `prefer` is a permutation of coordinate indices; `None`
    /// means natural order.
    pub fn complement_within(
        &self,
        within: &Subspace,
        prefer: Option<&[usize]>,
    ) -> Result<Subspace, AlgebraError> {
        self.check_ambient(within)?;
        if !within.contains(self) {
            return Err(AlgebraError::NotContained);
        }
        let natural: Vec<usize> = (0..self.ambient).collect();
        let order = prefer.unwrap_or(&natural);
        let mut current = self.clone();
        let mut picked: Vec<Vec<Rat>> = Vec::new();
        let mut candidates: Vec<Vec<Rat>> =
            order.iter().map(|&i| basis_vec(self.ambient, i)).collect();
        candidates.extend(within.rows.clone());
        for cand in candidates {
            if current.dim() == within.dim() {
                break;
            }
            if within.contains_vec(&cand) && !current.contains_vec(&cand) {
                picked.push(cand.clone());
                current = current.sum(&Subspace::span(self.ambient, &[cand])?)?;
            }
        }
        debug_assert_eq!(current, *within);
        Subspace::span(self.ambient, &picked)
    }

    /// Coordinates that appear with a nonzero entry in some basis row.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = Vec::new();
        for i in 0..self.ambient {
            if self.rows.iter().any(|r| !r[i].is_zero()) {
                s.push(i);
            }
        }
        s
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), AlgebraError> {
        if self.ambient != other.ambient {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.ambient,
                got: other.ambient,
            });
        }
        Ok(())
    }
}
