//! f64 mirrors of the exact tensors, product tables, and projections, for
//! the optimizer's inner loop. The exact layer remains the authority; these
//! are evaluations of the same closed-form expressions in doubles.

use lie_core::bch::BchTable;
use lie_core::grading::Grading;
use lie_core::rat::to_f64;
use lie_core::tensor::StructureTensor;

#[derive(Debug, Clone)]
pub struct TensorF64 {
    pub dim: usize,
    entries: Vec<(usize, usize, Vec<(usize, f64)>)>,
}

impl TensorF64 {
    pub fn from_exact(t: &StructureTensor) -> Self {
        let entries = t
            .entries()
            .map(|(i, j, targets)| {
                (
                    i,
                    j,
                    targets.iter().map(|(k, c)| (*k, to_f64(c))).collect(),
                )
            })
            .collect();
        Self {
            dim: t.dim(),
            entries,
        }
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, j, targets) in &self.entries {
            let c = x[*i] * y[*j] - x[*j] * y[*i];
            if c == 0.0 {
                continue;
            }
            for (k, coeff) in targets {
                out[*k] += c * coeff;
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct TableF64 {
    /// Per word length k: list of (letters, coefficient).
    words: Vec<Vec<(Vec<u8>, f64)>>,
}

impl TableF64 {
    pub fn from_exact(table: &BchTable, steps: usize) -> Self {
        let mut words = vec![Vec::new(); steps + 1];
        for k in 2..=steps.min(table.max_step()) {
            words[k] = table
                .words_at(k)
                .into_iter()
                .map(|(w, c)| (w, to_f64(&c)))
                .collect();
        }
        Self { words }
    }

    /// Group product via the bracket series, truncated at the table depth.
    pub fn product(&self, tensor: &TensorF64, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut acc: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        for k in 2..self.words.len() {
            for (word, b) in &self.words[k] {
                let mut v = if word[k - 1] == 1 {
                    x.to_vec()
                } else {
                    y.to_vec()
                };
                let mut dead = false;
                for &letter in word[..k - 1].iter().rev() {
                    let w = if letter == 1 { x } else { y };
                    v = tensor.bracket(w, &v);
                    if v.iter().all(|c| *c == 0.0) {
                        dead = true;
                        break;
                    }
                }
                if dead {
                    continue;
                }
                for (a, c) in acc.iter_mut().zip(&v) {
                    *a += b * c;
                }
            }
        }
        acc
    }
}

/// f64 layer projections of a grading.
#[derive(Debug, Clone)]
pub struct ProjectionsF64 {
    pub dim: usize,
    mats: Vec<Vec<Vec<f64>>>,
}

impl ProjectionsF64 {
    pub fn from_grading(g: &Grading) -> Self {
        let dim = g.dim();
        let mats = (1..=g.step())
            .map(|j| {
                g.projection_matrix(j)
                    .iter()
                    .map(|row| row.iter().map(to_f64).collect())
                    .collect()
            })
            .collect();
        Self { dim, mats }
    }

    pub fn layers(&self) -> usize {
        self.mats.len()
    }

    pub fn component(&self, x: &[f64], j: usize) -> Vec<f64> {
        self.mats[j - 1]
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Homogeneous quasi-norm: sum over layers of the Euclidean layer norm
    /// raised to 1/j. Scale-consistent across layers, used for endpoint
    /// mismatch measurements.
    pub fn quasi_norm(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for j in 1..=self.layers() {
            let c = self.component(x, j);
            let n2: f64 = c.iter().map(|v| v * v).sum();
            if n2 > 0.0 {
                total += n2.sqrt().powf(1.0 / j as f64);
            }
        }
        total
    }
}

pub fn mat_vec_f64(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(c, v)| c * v).sum())
        .collect()
}

pub fn euclid(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
