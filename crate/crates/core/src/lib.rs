//! Truncated and supplemented Pascal matrices over GF(p^h).
//!
//! The crate builds the binomial-polynomial matrix `P_q` (entry `(m, n)` is
//! `f_m(n) = Π_{i=1..m} (σ(n) - σ(i-1)) / σ(i)`), its first-`k`-rows
//! truncation and the supplemented form `H_{q,k}` with an extra unit column,
//! checks the MDS property by exhaustive subset enumeration, and uses the
//! matrices as erasure-code generators and network-coding coefficient
//! schedules.
//!
//! Modules, bottom up:
//!
//! - [`fields`]: GF(p^h) arithmetic on canonical element indices.
//! - [`matrices`]: dense matrices, rank, elimination, solving.
//! - [`pascal`]: `f_m(n)`, `P_q`, `P_{q,k}`, `H_{q,k}`, sparsity.
//! - [`codes`]: MDS verification, Reed-Solomon generators, matroid representations.
//! - [`codec`]: erasure encode/decode and the share file format.
//! - [`ncsim`]: broadcast network-coding simulator.

pub mod codec;
pub mod codes;
pub mod error;
pub mod fields;
pub mod matrices;
pub mod ncsim;
pub mod pascal;
pub mod rng;

pub use error::{Error, Result};
pub use fields::{make_field, FieldElement, FieldParams};
pub use matrices::MatrixGF;
