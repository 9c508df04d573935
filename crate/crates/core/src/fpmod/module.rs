use super::ring::Ring;
use crate::error::{CoreError, Result};
use crate::exactlin::{
    in_lattice_span, reduce_mod_lattice, smith_normal_form, BigMatrix, JsonInt,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A finitely presented module: `generators` free generators modulo the column
/// span of `relations` (plus the implicit relations `n·e_i` over `Z/n`).
///
/// Presentations are kept exactly as constructed; nothing is canonicalized
/// behind the caller's back. Use [`FpModule::canonical_form`] for the
/// isomorphism invariant and [`FpModule::reduced`] for an isomorphic minimal
/// presentation with the comparison isomorphisms.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "FpModuleWire", try_from = "FpModuleWire")]
pub struct FpModule {
    ring: Ring,
    generators: usize,
    relations: BigMatrix,
}

impl FpModule {
    /// `relations` has one row per generator; each column is a relator.
    pub fn new(ring: Ring, generators: usize, relations: BigMatrix) -> Self {
        assert_eq!(
            relations.rows(),
            generators,
            "relation matrix must have one row per generator"
        );
        FpModule {
            ring,
            generators,
            relations,
        }
    }

    pub fn from_relation_columns(ring: Ring, generators: usize, cols: Vec<Vec<BigInt>>) -> Self {
        let relations = if cols.is_empty() {
            BigMatrix::zeros(generators, 0)
        } else {
            BigMatrix::from_cols(cols)
        };
        Self::new(ring, generators, relations)
    }

    pub fn zero(ring: Ring) -> Self {
        Self::new(ring, 0, BigMatrix::zeros(0, 0))
    }

    /// The cyclic module on one generator killed by `k`.
    pub fn cyclic(ring: Ring, k: impl Into<BigInt>) -> Self {
        let k = k.into();
        Self::new(ring, 1, BigMatrix::col_from_vec(vec![k]))
    }

    pub fn free_module(ring: Ring, rank: usize) -> Self {
        Self::new(ring, rank, BigMatrix::zeros(rank, 0))
    }

    pub fn direct_sum(a: &FpModule, b: &FpModule) -> FpModule {
        assert_eq!(a.ring, b.ring, "direct sum across different rings");
        FpModule::new(
            a.ring.clone(),
            a.generators + b.generators,
            BigMatrix::block_diag(&[&a.relations, &b.relations]),
        )
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &BigMatrix {
        &self.relations
    }

    /// All relations made explicit: the given columns plus `n·e_i` over `Z/n`.
    /// This is a generating set of the full relation lattice inside Z^g.
    pub fn relation_lattice(&self) -> Vec<Vec<BigInt>> {
        let mut cols: Vec<Vec<BigInt>> = (0..self.relations.cols())
            .map(|j| self.relations.col(j))
            .collect();
        if let Some(n) = self.ring.modulus() {
            for i in 0..self.generators {
                let mut e = vec![BigInt::zero(); self.generators];
                e[i] = n.clone();
                cols.push(e);
            }
        }
        cols
    }

    /// Full relation lattice as a matrix (columns are relators), for solvers.
    pub fn relation_matrix_full(&self) -> BigMatrix {
        match self.ring.modulus() {
            None => self.relations.clone(),
            Some(n) => self
                .relations
                .hstack(&BigMatrix::identity(self.generators).scale(n)),
        }
    }

    /// Coordinate change `y = U·x` under which the relation lattice becomes
    /// diagonal: coordinate `i` lives mod `diag[i]`, with 0 meaning free.
    pub(crate) fn structure(&self) -> Structure {
        let full = self.relation_matrix_full();
        let d = smith_normal_form(&full);
        let k = self.generators.min(full.cols());
        let diag = (0..self.generators)
            .map(|i| if i < k { d.s.get(i, i).clone() } else { BigInt::zero() })
            .collect();
        Structure {
            u: d.u,
            u_inv: d.u_inv,
            diag,
        }
    }

    /// Isomorphism invariant: free rank plus the invariant factor chain
    /// (each factor at least 2, each dividing the next). Two modules are
    /// isomorphic exactly when these agree.
    pub fn canonical_form(&self) -> CanonicalForm {
        let st = self.structure();
        let one = BigInt::one();
        let mut invariant_factors = Vec::new();
        let mut free_rank = 0usize;
        for d in &st.diag {
            if d.is_zero() {
                free_rank += 1;
            } else if *d != one {
                invariant_factors.push(d.clone());
            }
        }
        CanonicalForm {
            free_rank,
            invariant_factors,
        }
    }

    /// Number of elements, when finite.
    pub fn order(&self) -> Option<BigInt> {
        let st = self.structure();
        let mut n = BigInt::one();
        for d in &st.diag {
            if d.is_zero() {
                return None;
            }
            n *= d;
        }
        Some(n)
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn is_zero_module(&self) -> bool {
        self.order().map_or(false, |n| n.is_one())
    }

    /// Canonical representative of the coset of `x`: unique per element, so it
    /// doubles as an equality/hash key.
    pub fn canonical_rep(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.generators);
        reduce_mod_lattice(x, &self.relation_lattice())
    }

    /// Are `x` and `y` the same element of the module?
    pub fn elements_eq(&self, x: &[BigInt], y: &[BigInt]) -> bool {
        let diff: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        in_lattice_span(&diff, &self.relation_lattice(), None)
    }

    /// Every element once, as canonical representatives, in a deterministic
    /// order. Errors when the module is infinite.
    pub fn elements(&self) -> Result<Vec<Vec<BigInt>>> {
        let st = self.structure();
        if st.diag.iter().any(|d| d.is_zero()) {
            return Err(CoreError::InfiniteHomSet(format!(
                "cannot enumerate elements of the infinite module {self:?}"
            )));
        }
        let mut out = Vec::new();
        let mut y = vec![BigInt::zero(); self.generators];
        loop {
            let x = st.u_inv.mul_vec(&y);
            out.push(self.canonical_rep(&x));
            // odometer increment over the mixed radix given by diag
            let mut i = self.generators;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                y[i] += 1;
                if y[i] < st.diag[i] {
                    break;
                }
                y[i] = BigInt::zero();
            }
        }
    }
}

pub(crate) struct Structure {
    pub u: BigMatrix,
    pub u_inv: BigMatrix,
    pub diag: Vec<BigInt>,
}

impl fmt::Debug for FpModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<Vec<BigInt>> = (0..self.relations.cols())
            .map(|j| self.relations.col(j))
            .collect();
        write!(
            f,
            "FpModule({}, gens={}, rels={:?})",
            self.ring, self.generators, cols
        )
    }
}

/// Decomposition invariants of a module: `Z^free_rank` plus one cyclic summand
/// per invariant factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "CanonicalFormWire", from = "CanonicalFormWire")]
pub struct CanonicalForm {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CanonicalFormWire {
    free_rank: usize,
    invariant_factors: Vec<JsonInt>,
}

impl From<CanonicalForm> for CanonicalFormWire {
    fn from(c: CanonicalForm) -> Self {
        CanonicalFormWire {
            free_rank: c.free_rank,
            invariant_factors: c.invariant_factors.into_iter().map(JsonInt).collect(),
        }
    }
}

impl From<CanonicalFormWire> for CanonicalForm {
    fn from(w: CanonicalFormWire) -> Self {
        CanonicalForm {
            free_rank: w.free_rank,
            invariant_factors: w.invariant_factors.into_iter().map(|x| x.0).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FpModuleWire {
    ring: Ring,
    generators: usize,
    relations: Vec<Vec<JsonInt>>,
}

impl From<FpModule> for FpModuleWire {
    fn from(m: FpModule) -> Self {
        FpModuleWire {
            ring: m.ring.clone(),
            generators: m.generators,
            relations: (0..m.relations.cols())
                .map(|j| m.relations.col(j).into_iter().map(JsonInt).collect())
                .collect(),
        }
    }
}

impl TryFrom<FpModuleWire> for FpModule {
    type Error = String;

    fn try_from(w: FpModuleWire) -> std::result::Result<Self, String> {
        let mut cols = Vec::with_capacity(w.relations.len());
        for (j, c) in w.relations.into_iter().enumerate() {
            if c.len() != w.generators {
                return Err(format!(
                    "relation column {j} has length {}, expected {} (one entry per generator)",
                    c.len(),
                    w.generators
                ));
            }
            cols.push(c.into_iter().map(|x| x.0).collect());
        }
        Ok(FpModule::from_relation_columns(w.ring, w.generators, cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(free: usize, factors: &[i64]) -> CanonicalForm {
        CanonicalForm {
            free_rank: free,
            invariant_factors: factors.iter().map(|&d| BigInt::from(d)).collect(),
        }
    }

    #[test]
    fn cyclic_canonical_form() {
        let m = FpModule::cyclic(Ring::Z, 4);
        assert_eq!(m.canonical_form(), cf(0, &[4]));
        assert_eq!(m.order(), Some(BigInt::from(4)));
    }

    #[test]
    fn two_generator_canonical_form() {
        // columns (4,0), (0,4), (2,-2): invariant factors 2, 4
        let m = FpModule::from_relation_columns(
            Ring::Z,
            2,
            vec![
                vec![BigInt::from(4), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(4)],
                vec![BigInt::from(2), BigInt::from(-2)],
            ],
        );
        assert_eq!(m.canonical_form(), cf(0, &[2, 4]));
        assert_eq!(m.order(), Some(BigInt::from(8)));
    }

    #[test]
    fn free_module_canonical_form() {
        let m = FpModule::free_module(Ring::Z, 2);
        assert_eq!(m.canonical_form(), cf(2, &[]));
        assert_eq!(m.order(), None);
        assert!(!m.is_finite());
        assert!(m.elements().is_err());
    }

    #[test]
    fn implicit_modulus_relations() {
        // no explicit relations, but over Z/4 the one-generator module is Z/4
        let m = FpModule::free_module(Ring::zmod(4), 1);
        assert_eq!(m.canonical_form(), cf(0, &[4]));
        assert_eq!(m.order(), Some(BigInt::from(4)));
    }

    #[test]
    fn zero_module_properties() {
        let z = FpModule::zero(Ring::zmod(4));
        assert!(z.is_zero_module());
        assert_eq!(z.elements().unwrap(), vec![Vec::<BigInt>::new()]);
        // a presentation of the zero module with a unit relation
        let z2 = FpModule::cyclic(Ring::Z, 1);
        assert!(z2.is_zero_module());
        assert_eq!(z2.canonical_form(), cf(0, &[]));
    }

    #[test]
    fn element_enumeration_distinct_and_complete() {
        let m = FpModule::from_relation_columns(
            Ring::Z,
            2,
            vec![
                vec![BigInt::from(4), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(4)],
                vec![BigInt::from(2), BigInt::from(-2)],
            ],
        );
        let els = m.elements().unwrap();
        assert_eq!(els.len(), 8);
        for (i, a) in els.iter().enumerate() {
            assert_eq!(&m.canonical_rep(a), a);
            for b in &els[i + 1..] {
                assert!(!m.elements_eq(a, b));
            }
        }
        // closed under addition
        for a in &els {
            for b in &els {
                let sum: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                assert!(els.contains(&m.canonical_rep(&sum)));
            }
        }
    }

    #[test]
    fn canonical_form_survives_presentation_noise() {
        // append redundant relators and mix generators; the invariant holds
        let base = FpModule::from_relation_columns(
            Ring::Z,
            2,
            vec![
                vec![BigInt::from(2), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(4)],
            ],
        );
        // same lattice, redundant generators: (2,4) = c1 + c2, (6,-4) = 3c1 - c2
        let redundant = FpModule::from_relation_columns(
            Ring::Z,
            2,
            vec![
                vec![BigInt::from(2), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(4)],
                vec![BigInt::from(2), BigInt::from(4)],
                vec![BigInt::from(6), BigInt::from(-4)],
            ],
        );
        assert_eq!(redundant.canonical_form(), base.canonical_form());
        // module generators mixed by a unimodular change of basis
        let mixed = FpModule::from_relation_columns(
            Ring::Z,
            2,
            vec![
                vec![BigInt::from(2), BigInt::from(0)],
                vec![BigInt::from(4), BigInt::from(4)],
            ],
        );
        assert_eq!(mixed.canonical_form(), base.canonical_form());
    }

    #[test]
    fn module_json_round_trip() {
        let m = FpModule::from_relation_columns(
            Ring::zmod(4),
            2,
            vec![vec![BigInt::from(2), BigInt::from(0)]],
        );
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(
            s,
            r#"{"ring":{"kind":"Zmod","n":4},"generators":2,"relations":[[2,0]]}"#
        );
        let back: FpModule = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        // ragged relation column rejected
        let bad = r#"{"ring":{"kind":"Z"},"generators":2,"relations":[[2]]}"#;
        assert!(serde_json::from_str::<FpModule>(bad).is_err());
    }
}
