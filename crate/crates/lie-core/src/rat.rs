//! Rational scalar type and small helpers used throughout the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact scalar: arbitrary-precision rational.
pub type Rat = BigRational;

/// `p/q` as a [`Rat`]. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a [`Rat`].
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Out-of-range ratio of huge integers; fall back to sign * inf.
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact conversion of a finite float (floats are dyadic rationals).
pub fn from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn vzero(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}

pub fn vis_zero(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn vadd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vsub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vneg(a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| -x).collect()
}

pub fn vscale(c: &Rat, a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| c * x).collect()
}

/// `acc += c * a`, in place.
pub fn vaxpy(acc: &mut [Rat], c: &Rat, a: &[Rat]) {
    debug_assert_eq!(acc.len(), a.len());
    if c.is_zero() {
        return;
    }
    for (s, x) in acc.iter_mut().zip(a) {
        *s += c * x;
    }
}

/// Basis vector `e_i` of length `n`.
pub fn basis_vec(n: usize, i: usize) -> Vec<Rat> {
    let mut v = vzero(n);
    v[i] = Rat::from_integer(BigInt::from(1));
    v
}

pub fn vec_to_f64(v: &[Rat]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}
