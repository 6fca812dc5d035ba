//! Coefficients of the group product series and the Dynkin product.
//!
//! The product of `exp(x)exp(y)` expands as
//! `x + y + Σ_{k≥2} Σ_{q ∈ {1,2}^k} b_{k,q} [x_{q_1}, [..., x_{q_k}]]`
//! with left-iterated brackets. The coefficient of the word `q` is obtained
//! by summing, over all decompositions of `q` into blocks `x^r y^s`, the
//! classical term `(-1)^{n-1} / (n · k · Π r_i! s_i!)`. The table is
//! validated against associativity in the truncated free algebra (see
//! [`crate::freealg`]); the tests there are the authority for correctness.

use crate::error::AlgebraError;
use crate::rat::{rint, vadd, vzero, Rat};
use crate::tensor::StructureTensor;
use num_traits::Zero;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Hard cap on the table depth; factorials and word counts beyond this are
/// outside the artifact's scope.
pub const MAX_STEP_CAP: usize = 8;

/// Coefficients `b_{k,q}` for `k ≤ max_step`, with words `q ∈ {1,2}^k`
/// encoded as bitmasks (bit `i` set means `q_{i+1} = 2`).
#[derive(Debug, Clone)]
pub struct BchTable {
    max_step: usize,
    /// `coeffs[k]` maps word masks of length `k` to `b_{k,q}`; index 0 and 1
    /// are unused and k = 1 is the implicit linear term.
    coeffs: Vec<HashMap<u16, Rat>>,
}

fn factorial(n: usize) -> Rat {
    let mut f = rint(1);
    for i in 2..=n {
        f *= rint(i as i64);
    }
    f
}

/// Coefficient contribution of one block decomposition: the word is cut into
/// `n` consecutive blocks, each of the shape `x^r y^s` with `r + s > 0`.
fn word_coefficient(word: &[u8]) -> Rat {
    let k = word.len();
    let mut total = Rat::zero();
    // Enumerate cut masks between positions; each segment must match x^r y^s,
    // i.e. contain no "x after y" transition.
    let cuts = 1u32 << (k - 1);
    'outer: for cut in 0..cuts {
        let mut blocks: Vec<(usize, usize)> = Vec::new();
        let mut r = 0usize;
        let mut s = 0usize;
        for (i, &letter) in word.iter().enumerate() {
            if i > 0 && cut >> (i - 1) & 1 == 1 {
                blocks.push((r, s));
                r = 0;
                s = 0;
            }
            if letter == 1 {
                if s > 0 {
                    // An x after a y inside one block: not of the shape x^r y^s.
                    continue 'outer;
                }
                r += 1;
            } else {
                s += 1;
            }
        }
        blocks.push((r, s));
        let n = blocks.len();
        let mut denom = rint((n as i64) * (k as i64));
        for &(ri, si) in &blocks {
            denom *= factorial(ri) * factorial(si);
        }
        let sign = if n % 2 == 1 { rint(1) } else { rint(-1) };
        total += sign / denom;
    }
    total
}

fn build_table(max_step: usize) -> BchTable {
    let mut coeffs: Vec<HashMap<u16, Rat>> = vec![HashMap::new(); max_step + 1];
    for k in 2..=max_step {
        let words = 1u16 << k;
        for mask in 0..words {
            // The innermost bracket [x_{q_{k-1}}, x_{q_k}] vanishes when the
            // last two letters agree.
            let last = mask >> (k - 1) & 1;
            let prev = mask >> (k - 2) & 1;
            if last == prev {
                continue;
            }
            let word: Vec<u8> = (0..k)
                .map(|i| if mask >> i & 1 == 1 { 2 } else { 1 })
                .collect();
            let c = word_coefficient(&word);
            if !c.is_zero() {
                coeffs[k].insert(mask, c);
            }
        }
    }
    BchTable { max_step, coeffs }
}

/// Shared table cache keyed by depth.
pub fn bch_table(max_step: usize) -> Result<Arc<BchTable>, AlgebraError> {
    if max_step > MAX_STEP_CAP {
        return Err(AlgebraError::StepCapExceeded(max_step, MAX_STEP_CAP));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<BchTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    Ok(guard
        .entry(max_step)
        .or_insert_with(|| Arc::new(build_table(max_step)))
        .clone())
}

impl BchTable {
    pub fn max_step(&self) -> usize {
        self.max_step
    }

    /// `b_{k,q}` with the word given as letters in `{1, 2}`.
    pub fn coefficient(&self, word: &[u8]) -> Rat {
        let k = word.len();
        if k == 1 {
            return rint(1);
        }
        if k > self.max_step {
            return Rat::zero();
        }
        let mut mask = 0u16;
        for (i, &l) in word.iter().enumerate() {
            debug_assert!(l == 1 || l == 2);
            if l == 2 {
                mask |= 1 << i;
            }
        }
        self.coeffs[k].get(&mask).cloned().unwrap_or_else(Rat::zero)
    }

    /// Nonzero coefficients at length `k` as `(word, b)` pairs.
    pub fn words_at(&self, k: usize) -> Vec<(Vec<u8>, Rat)> {
        if k > self.max_step {
            return Vec::new();
        }
        let mut out: Vec<(Vec<u8>, Rat)> = self.coeffs[k]
            .iter()
            .map(|(&mask, c)| {
                let word = (0..k)
                    .map(|i| if mask >> i & 1 == 1 { 2u8 } else { 1u8 })
                    .collect();
                (word, c.clone())
            })
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Group product `x * y` on a nilpotent algebra via the bracket series,
    /// truncated at `steps` (series terms of length > steps vanish when
    /// `steps` is the nilpotency step, so the truncation is exact there).
    pub fn product(
        &self,
        tensor: &StructureTensor,
        steps: usize,
        x: &[Rat],
        y: &[Rat],
    ) -> Result<Vec<Rat>, AlgebraError> {
        if steps > self.max_step {
            return Err(AlgebraError::StepCapExceeded(steps, self.max_step));
        }
        let mut acc = vadd(x, y);
        for k in 2..=steps {
            for (word, b) in self.words_at(k) {
                // Left-iterated bracket, built right to left.
                let mut v = if word[k - 1] == 1 { x.to_vec() } else { y.to_vec() };
                for &letter in word[..k - 1].iter().rev() {
                    let w = if letter == 1 { x } else { y };
                    v = tensor.bracket(w, &v)?;
                    if v.iter().all(Zero::is_zero) {
                        break;
                    }
                }
                if v.iter().all(Zero::is_zero) {
                    continue;
                }
                crate::rat::vaxpy(&mut acc, &b, &v);
            }
        }
        Ok(acc)
    }
}

/// Group product on a nilpotent structure tensor. Errors when the tensor is
/// not nilpotent (the series would not terminate); use
/// [`dynkin_product_truncated`] for best-effort local products.
pub fn dynkin_product(
    tensor: &StructureTensor,
    x: &[Rat],
    y: &[Rat],
) -> Result<Vec<Rat>, AlgebraError> {
    let report = tensor.validate();
    let Some(step) = report.step() else {
        return Err(AlgebraError::NotNilpotent);
    };
    let table = bch_table(step.min(MAX_STEP_CAP))?;
    if step > MAX_STEP_CAP {
        return Err(AlgebraError::StepCapExceeded(step, MAX_STEP_CAP));
    }
    table.product(tensor, step, x, y)
}

/// Truncated product for non-nilpotent tensors; only trustworthy in a small
/// neighborhood of the origin, which the caller is responsible for.
pub fn dynkin_product_truncated(
    tensor: &StructureTensor,
    cutoff: usize,
    x: &[Rat],
    y: &[Rat],
) -> Result<Vec<Rat>, AlgebraError> {
    let table = bch_table(cutoff.min(MAX_STEP_CAP))?;
    table.product(tensor, cutoff.min(MAX_STEP_CAP), x, y)
}

/// Group inverse: `-x` (exp coordinates).
pub fn dynkin_inverse(x: &[Rat]) -> Vec<Rat> {
    crate::rat::vneg(x)
}

/// Fold a sequence of factors into a product, left to right.
pub fn dynkin_product_seq(
    tensor: &StructureTensor,
    steps: usize,
    table: &BchTable,
    factors: &[Vec<Rat>],
) -> Result<Vec<Rat>, AlgebraError> {
    let mut acc = vzero(tensor.dim());
    for f in factors {
        acc = table.product(tensor, steps, &acc, f)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{basis_vec, rat, vneg, vis_zero};
    use crate::tensor::{heisenberg, n521};

    #[test]
    fn linear_terms_are_one() {
        let t = bch_table(4).unwrap();
        assert_eq!(t.coefficient(&[1]), rint(1));
        assert_eq!(t.coefficient(&[2]), rint(1));
    }

    #[test]
    fn order_two_words() {
        // [x,y] picks up 1/4 from the word xy and 1/4 more from yx via
        // antisymmetry: the evaluated product carries (1/2)[x,y].
        let t = bch_table(2).unwrap();
        assert_eq!(t.coefficient(&[1, 2]), rat(1, 4));
        assert_eq!(t.coefficient(&[2, 1]), rat(-1, 4));
    }

    #[test]
    fn step_one_product_is_addition() {
        let t = StructureTensor::new(2, None);
        let x = vec![rint(1), rint(0)];
        let y = vec![rint(0), rint(2)];
        assert_eq!(dynkin_product(&t, &x, &y).unwrap(), vec![rint(1), rint(2)]);
    }

    #[test]
    fn heisenberg_product() {
        let t = heisenberg();
        let e1 = basis_vec(3, 0);
        let e2 = basis_vec(3, 1);
        let p = dynkin_product(&t, &e1, &e2).unwrap();
        assert_eq!(p, vec![rint(1), rint(1), rat(1, 2)]);
    }

    #[test]
    fn inverse_law() {
        let t = n521();
        let x = vec![rint(1), rat(1, 3), rint(-2), rat(2, 7), rint(5)];
        let p = dynkin_product(&t, &x, &vneg(&x)).unwrap();
        assert!(vis_zero(&p));
    }

    #[test]
    fn associativity_on_a_step_four_algebra() {
        let t = n521();
        let x = vec![rint(1), rint(0), rat(1, 2), rint(0), rint(0)];
        let y = vec![rint(0), rint(1), rint(0), rat(-1, 3), rint(0)];
        let z = vec![rat(1, 5), rint(1), rint(0), rint(0), rint(2)];
        let xy_z = dynkin_product(&t, &dynkin_product(&t, &x, &y).unwrap(), &z).unwrap();
        let x_yz = dynkin_product(&t, &x, &dynkin_product(&t, &y, &z).unwrap()).unwrap();
        assert_eq!(xy_z, x_yz);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            bch_table(9),
            Err(AlgebraError::StepCapExceeded(9, 8))
        ));
    }
}
