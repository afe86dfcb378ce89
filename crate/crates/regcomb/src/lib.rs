//! Exact-arithmetic toolkit for regular combinatorial structures:
//! orthogonal arrays, block designs and t-wise permutations, with their
//! lattice invariants, counting formulas and the underlying lattice
//! random walk.

pub mod config;
pub mod design;
pub mod error;
pub mod exact;
pub mod framework;
pub mod hp;
pub mod jsonio;
pub mod lclt;
pub mod oa;
pub mod perm;

pub use error::{Error, Result};
pub use exact::{ExactMatrix, Int, IntegerLattice, Rat};
