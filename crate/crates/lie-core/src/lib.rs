//! Exact arithmetic for polarized nilpotent Lie algebras.
//!
//! Everything in this crate is computed over arbitrary-precision rationals:
//! structure tensors and brackets, the subspace lattice in canonical reduced
//! row-echelon form, lower central series and distribution filtrations,
//! asymptotic/tangent gradings with their dilations, the integer invariants
//! attached to a polarized grading, Carnot quotient ideals, and the
//! one-parameter families of deformed brackets and group products.
//!
//! Floating point never enters here; the numeric metric machinery lives in
//! the `lie-metrics` crate on top of these types.

pub mod bch;
pub mod deform;
pub mod error;
pub mod freealg;
pub mod grading;
pub mod invariants;
pub mod linalg;
pub mod rat;
pub mod subspace;
pub mod tensor;

pub use bch::{bch_table, BchTable};
pub use deform::DeformedFamily;
pub use error::AlgebraError;
pub use grading::{ClassifyReport, ConeAlgebra, Grading, GradingKind, Side};
pub use invariants::{
    beta_search, check_cqi, compute_alpha0, compute_alphas, AlphaValue, AsymptoticAlphas,
    BetaResult, BetaStrategy, CqiCertificate,
};
pub use rat::Rat;
pub use subspace::Subspace;
pub use tensor::{AlgebraReport, DeltaFiltration, Nilpotency, StructureTensor};
