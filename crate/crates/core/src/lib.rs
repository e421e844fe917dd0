//! Nevanlinna–Pick interpolation for algebras of functions on the disk that
//! are invariant under a Fuchsian group.

// `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blaschke;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod mobius;
pub mod orbit;
pub mod pick;
pub mod schur;
pub mod suite;

pub use error::{Error, Result};
pub use mobius::{DiskAutomorphism, DiskPoint};
pub use num_complex::Complex64;
