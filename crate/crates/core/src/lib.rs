//! Exact analysis of vector and Hermite subdivision schemes.
//!
//! Masks are finitely supported matrix sequences with Gaussian-rational
//! coefficients, so every structural identity (sum rules, normal form,
//! factorization, polynomial reproduction) is checked by exact equality.
//! Floating point enters only when estimating norms and eigenvalue moduli.

pub mod cascade;
pub mod catalog;
pub mod convergence;
pub mod error;
pub mod jet;
pub mod mask_file;
pub mod matrix;
pub mod normal_form;
pub mod poly;
pub mod samples;
pub mod scalar;
pub mod seq;
pub mod subdivision;
pub mod sum_rules;

pub use error::{Error, Result};
pub use jet::{Jet, Point};
pub use matrix::CMat;
pub use scalar::CRat;
pub use seq::MatSeq;
