//! Truncated free associative algebra over the rationals.
//!
//! Noncommutative polynomials in a fixed set of generators, with every
//! monomial of degree greater than the cap discarded. The commutator
//! `[a, b] = ab - ba` makes the generators span a free nilpotent Lie algebra
//! inside, which is what validates the product coefficient table: the
//! series product must be associative here, and any wrong coefficient shows
//! up as an exact rational discrepancy.

use crate::bch::BchTable;
use crate::rat::Rat;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Element of the truncated free algebra: monomials are generator words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeElement {
    max_deg: usize,
    terms: BTreeMap<Vec<u8>, Rat>,
}

impl FreeElement {
    pub fn zero(max_deg: usize) -> Self {
        Self {
            max_deg,
            terms: BTreeMap::new(),
        }
    }

    pub fn generator(max_deg: usize, g: u8) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![g], crate::rat::rint(1));
        Self { max_deg, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign_scaled(&mut self, c: &Rat, other: &FreeElement) {
        if c.is_zero() {
            return;
        }
        for (w, coeff) in &other.terms {
            let entry = self.terms.entry(w.clone()).or_insert_with(Rat::zero);
            *entry += c * coeff;
            if entry.is_zero() {
                self.terms.remove(w);
            }
        }
    }

    pub fn mul(&self, other: &FreeElement) -> FreeElement {
        use std::collections::btree_map::Entry;
        let mut out = FreeElement::zero(self.max_deg);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                if wa.len() + wb.len() > self.max_deg {
                    continue;
                }
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                let c = ca * cb;
                match out.terms.entry(w) {
                    Entry::Occupied(mut e) => {
                        *e.get_mut() += c;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    Entry::Vacant(e) => {
                        if !c.is_zero() {
                            e.insert(c);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &FreeElement) -> FreeElement {
        let mut out = self.mul(other);
        let ba = other.mul(self);
        out.add_assign_scaled(&crate::rat::rint(-1), &ba);
        out
    }
}

/// Series product of two free elements using the coefficient table,
/// truncating bracket words at the algebra's degree cap.
pub fn free_product(table: &BchTable, a: &FreeElement, b: &FreeElement) -> FreeElement {
    let max_deg = a.max_deg;
    let mut acc = FreeElement::zero(max_deg);
    acc.add_assign_scaled(&crate::rat::rint(1), a);
    acc.add_assign_scaled(&crate::rat::rint(1), b);
    for k in 2..=table.max_step().min(max_deg) {
        for (word, coeff) in table.words_at(k) {
            let mut v = if word[k - 1] == 1 { a.clone() } else { b.clone() };
            for &letter in word[..k - 1].iter().rev() {
                let w = if letter == 1 { a } else { b };
                v = w.commutator(&v);
                if v.is_zero() {
                    break;
                }
            }
            acc.add_assign_scaled(&coeff, &v);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bch::bch_table;
    use crate::rat::{rat, rint};

    fn gens(max_deg: usize) -> (FreeElement, FreeElement, FreeElement) {
        (
            FreeElement::generator(max_deg, 0),
            FreeElement::generator(max_deg, 1),
            FreeElement::generator(max_deg, 2),
        )
    }

    #[test]
    fn commutator_of_generators() {
        let (x, y, _) = gens(3);
        let c = x.commutator(&y);
        assert_eq!(c.terms.len(), 2);
        assert_eq!(c.terms[&vec![0u8, 1u8]], rint(1));
        assert_eq!(c.terms[&vec![1u8, 0u8]], rint(-1));
    }

    #[test]
    fn product_matches_known_low_order_terms() {
        // x * y = x + y + 1/2 xy - 1/2 yx + ... ; check the degree-2 part.
        let table = bch_table(2).unwrap();
        let (x, y, _) = gens(2);
        let p = free_product(&table, &x, &y);
        assert_eq!(p.terms[&vec![0u8]], rint(1));
        assert_eq!(p.terms[&vec![1u8]], rint(1));
        assert_eq!(p.terms[&vec![0u8, 1u8]], rat(1, 2));
        assert_eq!(p.terms[&vec![1u8, 0u8]], rat(-1, 2));
    }

    #[test]
    fn degree_three_terms_match_the_classical_series() {
        // Degree-3 part of log(exp x exp y):
        // 1/12 [x,[x,y]] + 1/12 [y,[y,x]].
        let table = bch_table(3).unwrap();
        let (x, y, _) = gens(3);
        let p = free_product(&table, &x, &y);
        let mut expected = FreeElement::zero(3);
        expected.add_assign_scaled(&rat(1, 12), &x.commutator(&x.commutator(&y)));
        expected.add_assign_scaled(&rat(1, 12), &y.commutator(&y.commutator(&x)));
        for (w, c) in &expected.terms {
            assert_eq!(p.terms.get(w), Some(c), "monomial {w:?}");
        }
    }

    // The real validation: associativity of the series product on three free
    // generators, exact at each step. A wrong table coefficient at step k
    // breaks this at degree k.
    fn assert_associative_at(step: usize) {
        let table = bch_table(step).unwrap();
        let (x, y, z) = gens(step);
        let lhs = free_product(&table, &free_product(&table, &x, &y), &z);
        let rhs = free_product(&table, &x, &free_product(&table, &y, &z));
        assert_eq!(lhs, rhs, "associativity fails at step {step}");
    }

    #[test]
    fn associativity_steps_2_to_5() {
        for step in 2..=5 {
            assert_associative_at(step);
        }
    }

    #[test]
    fn associativity_step_6() {
        assert_associative_at(6);
    }

    #[test]
    fn associativity_steps_7_and_8() {
        assert_associative_at(7);
        assert_associative_at(8);
    }

    #[test]
    fn unit_and_inverse_in_free_algebra() {
        let table = bch_table(4).unwrap();
        let (x, _, _) = gens(4);
        let zero = FreeElement::zero(4);
        assert_eq!(free_product(&table, &zero, &x), x);
        let mut neg = FreeElement::zero(4);
        neg.add_assign_scaled(&rint(-1), &x);
        assert!(free_product(&table, &x, &neg).is_zero());
    }
}
