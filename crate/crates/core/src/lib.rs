//! Generalized Hausdorff-type operators
//! `(H f)(x) = ∫_Ω Φ(u) f(A(u)(x)) dμ(u)` over pluggable parameter measures,
//! underlying spaces and automorphism families.

pub mod automorphism;
pub mod catalog;
pub mod cli;
pub mod domain;
pub mod error;
pub mod hardy;
pub mod measure;
pub mod operator;
pub mod point;

pub use error::{Error, Result};
pub use num_complex::Complex64;
