pub mod lattice;
pub mod matrix;

pub use lattice::{IntegerLattice, Snf, smith_normal_form};
pub use matrix::{ExactMatrix, Int, Rat, det_bareiss, gram_determinant, solve_spd};
