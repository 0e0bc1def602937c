//! Exact computation of χ_y-type genera and twisted elliptic genera of
//! almost-complex manifolds from their Chern numbers.

pub mod arith;
pub mod cohomology;
pub mod elliptic;
pub mod error;
pub mod genus;
pub mod manifolds;
pub mod poly;
pub mod qforms;
pub mod series;
pub mod suite;

pub use arith::Rat;
pub use error::{Error, Result};
