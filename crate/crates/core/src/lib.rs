//! Sextic-residue double circulant codes over GF(2) and GF(4).
//!
//! Cyclotomy of order six for primes `p ≡ 7 (mod 12)`, the circulant
//! algebra built on the sextic classes, pure and bordered double circulant
//! generators, self-duality tests, minimum distance engines and a search
//! driver over the coefficient space.

pub mod circulant;
pub mod cli;
pub mod codes;
pub mod cyclotomy;
pub mod error;
pub mod field;
pub mod matrix;
pub mod search;

pub use error::{Error, Result};
