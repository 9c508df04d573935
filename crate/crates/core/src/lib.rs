//! Exact-arithmetic laboratory for factorization systems, injectivity classes and
//! reflection constructions in categories of finitely presented modules over the
//! integers or the integers modulo N.
//!
//! The layers build on each other:
//!
//! * [`exactlin`]: dense arbitrary-precision matrices, Smith normal form, and
//!   Diophantine / linear congruence solvers.
//! * [`fpmod`]: finitely presented modules and their morphisms, canonical forms,
//!   finite limits and colimits, hom-set enumeration.
//! * [`lifting`]: extension and lifting-square solvers with a brute-force oracle.
//! * [`classes`]: injectivity and orthogonality class operators over finite
//!   universes of modules.
//! * [`soa`]: the stagewise factorization engine (attach-and-quotient
//!   construction) producing weak and orthogonal factorizations and reflections.
//! * [`wfscheck`]: axiom checkers for weak factorization systems, factorization
//!   systems, and related exactness properties.

pub mod classes;
pub mod error;
pub mod exactlin;
pub mod fpmod;
pub mod lifting;
pub mod soa;
pub mod wfscheck;

pub use error::CoreError;
