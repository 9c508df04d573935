//! Exact integer linear algebra: arbitrary-precision matrices, Smith normal
//! form with unimodular transforms, and solvers for linear Diophantine and
//! congruence systems. Everything above this layer reduces its questions to
//! these primitives.

mod matrix;
mod snf;
mod solve;

pub use matrix::{mod_floor, BigMatrix, JsonInt};
pub use snf::{smith_normal_form, SmithDecomposition};
pub use solve::{
    hermite_columns, in_lattice_span, integer_kernel, lattice_contained, preimage_lattice,
    reduce_mod_lattice, solve_bilinear_membership, solve_linear, with_modulus_gens,
    AffineSolutionSet, BlockSystem,
};
