//! The ambient category: finitely presented modules over Z or Z/n, morphisms
//! given by matrices on generators, and the finite limits and colimits the
//! higher layers consume. All arithmetic is exact.

mod colimits;
mod hom;
mod module;
mod morphism;
mod ring;
mod submodule;

pub use colimits::{
    chain_colimit, coproduct, finite_colimit, is_pushout_square, pullback, pushout, ColimitResult,
    Diagram, PullbackResult, PushoutResult,
};
pub use hom::{
    are_isomorphic_arrows, are_isomorphic_under, are_isomorphic_under_over, distinct_solutions,
    find_under_isomorphism,
    hom_enumerate,
    hom_group_order, hom_lattice, morphism_solutions, quotient_coset_reps, HomConstraint,
    HomLattice,
};
pub use module::{CanonicalForm, FpModule};
pub use morphism::{
    compose, cokernel_projection, image_factorization, kernel_inclusion, quotient_of_mono,
    FpMorphism,
};
pub use ring::Ring;
pub use submodule::submodule_inclusions;
