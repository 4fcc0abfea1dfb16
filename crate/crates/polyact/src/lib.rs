//! Exact computational models for local actions of totally disconnected
//! groups, translation-finite (polynomial) functions on them, isotypic
//! decompositions and convolution algebras.
//!
//! Everything is computed in exact arithmetic over cyclotomic extensions of
//! the rationals. Spaces and groups are presented by finitely describable
//! models (finite groups, p-adic additive and affine groups and products of
//! these), open sets and functions by finite unions of basic compact open
//! cells, and all operations either return exact certificates or report a
//! concrete witness of failure.

pub mod action;
pub mod algebras;
pub mod func;
pub mod gen;
pub mod group;
pub mod induced;
pub mod isotypic;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod space;

pub use scalar::{Cyclotomic, Rational, ScalarError};

/// Library-level error: misuse of an API or a request outside the computable
/// fragment. Violations of mathematical laws are not errors; checker
/// functions report those as explicit witness values.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("not an element of the model: {0}")]
    NotInModel(String),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("outside the action's domain: {0}")]
    OutsideDomain(String),
    #[error("actions do not commute: {0}")]
    NotCommuting(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
