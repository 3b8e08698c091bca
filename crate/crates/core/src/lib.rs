//! Certified hyperplane-potential game engine and winning strategy for the
//! weighted singular-vector target set.

pub mod adversary;
pub mod arith;
pub mod error;
pub mod game;
pub mod lattice;
pub mod geometry;
pub mod lemmas;
pub mod strategy;
pub mod transcript;

pub use arith::{
    cert_compare, exp_sqrt, format_rational, parse_rational, pow_real, CertInterval, Comparison,
    ExactScalar, Precision,
};
pub use error::{Error, Result};
