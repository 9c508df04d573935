//! Class-level reasoning over finite universes: polarity operators between
//! object classes and morphism classes, lifting-relation operators, and
//! certified membership in pushout/chain/retract closures.

mod membership;
mod polar;
mod types;
mod universe;

pub use membership::{
    ch_membership, cof_membership, lambda_g_sandwich_witness, po_closure_membership,
    re_membership, ChCertificate, ChStep, CofCertificate, Membership, PoCertificate,
    RetractCertificate,
};
pub use polar::{
    box_left, box_relation, box_right, downarrow, fp_injectivity_test, perp_objects,
    top_morphisms, triangle_morphisms, triangle_objects, unique_box_relation, uparrow,
};
pub(crate) use polar::{solved_square_lattice, square_group};
pub use types::{ClosureFlags, MorphismClass, ObjectClass};
pub use universe::{universe_objects, Universe};
