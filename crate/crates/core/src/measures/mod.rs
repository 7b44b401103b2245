//! Nonconformity measure catalog.
//!
//! Two polynomial families generate every closed-form interval in
//! [`crate::exact`]; [`catalog`] holds the counterexample measures used to
//! probe how monotonicity, score comparisons and region shape relate.

pub mod catalog;
mod polynomial;

pub use catalog::{counterexample_catalog, CatalogEntry, Monotonicity, Setting};
pub use polynomial::{
    polynomial_supervised, polynomial_unsupervised, PolynomialSupervisedParams,
    PolynomialUnsupervisedParams,
};
