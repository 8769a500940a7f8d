//! Symbolic dynamics over finite alphabets: shifts of finite type and their
//! sofic images, inverse sequences of shifts, chain-component towers,
//! distributional chaos constructions and brute-force shadowing checks.

pub mod chaos;
pub mod codes;
pub mod decomposition;
pub mod error;
pub mod fixtures;
pub mod inverse_systems;
pub mod scalar;
pub mod selftest;
pub mod shadow_lab;
pub mod shift_core;
pub mod towers;

pub use error::{Error, Result};
pub use scalar::{Exact, Real};
pub use shift_core::{distance, Dyadic, SftGraph, SymbolicPoint};

/// Exact rational used for distance matrices.
pub type Rational = num_rational::BigRational;
/// Machine-sized exact rational.
pub type SmallRational = num_rational::Ratio<i64>;
