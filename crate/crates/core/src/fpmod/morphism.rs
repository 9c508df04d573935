use super::module::FpModule;
use crate::error::{CoreError, Result};
use crate::exactlin::{
    hermite_columns, in_lattice_span, lattice_contained, preimage_lattice,
    solve_bilinear_membership, AffineSolutionSet, BigMatrix,
};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A morphism between finitely presented modules, given by a matrix sending
/// domain generator coordinates to codomain generator coordinates (one column
/// per domain generator).
///
/// Construction checks well-definedness: the matrix must send every domain
/// relator into the codomain's relation lattice. The witness retains the full
/// solution set of that membership problem. Two morphisms are the same map iff
/// their matrices agree modulo the codomain relations; use [`FpMorphism::equals`],
/// not matrix comparison.
#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "FpMorphismWire", try_from = "FpMorphismWire")]
pub struct FpMorphism {
    dom: FpModule,
    cod: FpModule,
    matrix: BigMatrix,
    witness: AffineSolutionSet,
}

impl FpMorphism {
    pub fn new(dom: FpModule, cod: FpModule, matrix: BigMatrix) -> Result<Self> {
        assert_eq!(dom.ring(), cod.ring(), "morphism across different rings");
        assert_eq!(
            matrix.rows(),
            cod.generators(),
            "matrix must have one row per codomain generator"
        );
        assert_eq!(
            matrix.cols(),
            dom.generators(),
            "matrix must have one column per domain generator"
        );
        let witness = solve_bilinear_membership(
            &matrix,
            &dom.relation_matrix_full(),
            &cod.relation_matrix_full(),
            None,
        );
        if !witness.is_solvable() {
            return Err(CoreError::NotWellDefined(format!(
                "matrix {matrix:?} does not send the relations of {dom:?} into those of {cod:?}"
            )));
        }
        Ok(FpMorphism {
            dom,
            cod,
            matrix,
            witness,
        })
    }

    /// For morphisms correct by construction; still checks, but panics instead
    /// of returning an error.
    pub(crate) fn expect_new(dom: FpModule, cod: FpModule, matrix: BigMatrix) -> Self {
        Self::new(dom, cod, matrix).expect("constructed matrix must define a morphism")
    }

    pub fn identity(m: &FpModule) -> Self {
        Self::expect_new(m.clone(), m.clone(), BigMatrix::identity(m.generators()))
    }

    pub fn zero_morphism(dom: &FpModule, cod: &FpModule) -> Self {
        Self::expect_new(
            dom.clone(),
            cod.clone(),
            BigMatrix::zeros(cod.generators(), dom.generators()),
        )
    }

    pub fn dom(&self) -> &FpModule {
        &self.dom
    }

    pub fn cod(&self) -> &FpModule {
        &self.cod
    }

    pub fn matrix(&self) -> &BigMatrix {
        &self.matrix
    }

    pub fn witness(&self) -> &AffineSolutionSet {
        &self.witness
    }

    /// Image of an element given in domain generator coordinates.
    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }

    /// Same map as `other`: equal matrices modulo codomain relations.
    pub fn equals(&self, other: &FpMorphism) -> bool {
        assert_eq!(self.dom, other.dom, "comparing morphisms with different domains");
        assert_eq!(self.cod, other.cod, "comparing morphisms with different codomains");
        let diff = self.matrix.sub(&other.matrix);
        let rel = self.cod.relation_lattice();
        (0..diff.cols()).all(|j| in_lattice_span(&diff.col(j), &rel, None))
    }

    pub fn is_zero_morphism(&self) -> bool {
        self.equals(&FpMorphism::zero_morphism(&self.dom, &self.cod))
    }

    /// Preimage of the codomain relation lattice: the kernel of the map on
    /// generator coordinates, as a lattice containing the domain relations.
    pub(crate) fn kernel_lattice(&self) -> Vec<Vec<BigInt>> {
        let mut gens = preimage_lattice(&self.matrix, &self.cod.relation_matrix_full(), None);
        gens.extend(self.dom.relation_lattice());
        hermite_columns(self.dom.generators(), &gens)
    }

    pub fn is_mono(&self) -> bool {
        lattice_contained(&self.kernel_lattice(), &self.dom.relation_lattice(), None)
    }

    pub fn is_epi(&self) -> bool {
        let mut span = Vec::new();
        for j in 0..self.matrix.cols() {
            span.push(self.matrix.col(j));
        }
        span.extend(self.cod.relation_lattice());
        let n = self.cod.generators();
        (0..n).all(|i| {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::from(1);
            in_lattice_span(&e, &span, None)
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }
}

/// `g∘f`: apply `f` first.
pub fn compose(g: &FpMorphism, f: &FpMorphism) -> FpMorphism {
    assert_eq!(
        f.cod, g.dom,
        "compose: codomain of the first map must be the domain of the second"
    );
    FpMorphism::expect_new(f.dom.clone(), g.cod.clone(), g.matrix.mul(&f.matrix))
}

/// Inclusion of the kernel: a mono whose domain presents `ker f` and whose
/// composite with `f` is zero.
pub fn kernel_inclusion(f: &FpMorphism) -> FpMorphism {
    let gens = f.kernel_lattice();
    let k = gens.len();
    let mat = if k == 0 {
        BigMatrix::zeros(f.dom.generators(), 0)
    } else {
        BigMatrix::from_cols(gens)
    };
    let rels = preimage_lattice(&mat, &f.dom.relation_matrix_full(), None);
    let kernel_mod = FpModule::from_relation_columns(
        f.dom.ring().clone(),
        k,
        hermite_columns(k, &rels),
    );
    FpMorphism::expect_new(kernel_mod, f.dom.clone(), mat)
}

/// Projection onto the cokernel: an epi from `cod f` presenting `cod f / im f`.
pub fn cokernel_projection(f: &FpMorphism) -> FpMorphism {
    let q = FpModule::new(
        f.cod.ring().clone(),
        f.cod.generators(),
        f.cod.relations().hstack(&f.matrix),
    );
    FpMorphism::expect_new(f.cod.clone(), q, BigMatrix::identity(f.cod.generators()))
}

/// Epi-mono factorization `f = m∘e` through the image.
pub fn image_factorization(f: &FpMorphism) -> (FpMorphism, FpMorphism) {
    let image = FpModule::from_relation_columns(
        f.dom.ring().clone(),
        f.dom.generators(),
        f.kernel_lattice(),
    );
    let e = FpMorphism::expect_new(
        f.dom.clone(),
        image.clone(),
        BigMatrix::identity(f.dom.generators()),
    );
    let m = FpMorphism::expect_new(image, f.cod.clone(), f.matrix.clone());
    (e, m)
}

/// The cokernel of a mono, i.e. the quotient by its image.
pub fn quotient_of_mono(f: &FpMorphism) -> Result<FpModule> {
    if !f.is_mono() {
        return Err(CoreError::NotMono(format!(
            "quotient requested along the non-mono {f:?}"
        )));
    }
    Ok(cokernel_projection(f).cod().clone())
}

impl FpModule {
    /// Minimal presentation of this module together with the isomorphisms
    /// to and from it: `to∘from = id` on the reduced side and `from∘to` equals
    /// the identity of `self`.
    pub fn reduced(&self) -> (FpModule, FpMorphism, FpMorphism) {
        let st = self.structure();
        let keep: Vec<usize> = (0..self.generators())
            .filter(|&i| st.diag[i] != BigInt::from(1))
            .collect();
        let mut rel_cols = Vec::new();
        for (new_idx, &i) in keep.iter().enumerate() {
            let d = &st.diag[i];
            let explicit = if let Some(n) = self.ring().modulus() {
                !d.is_zero() && d != n
            } else {
                !d.is_zero()
            };
            if explicit {
                let mut c = vec![BigInt::zero(); keep.len()];
                c[new_idx] = d.clone();
                rel_cols.push(c);
            }
        }
        let reduced = FpModule::from_relation_columns(self.ring().clone(), keep.len(), rel_cols);
        let to_matrix = BigMatrix::from_fn(keep.len(), self.generators(), |i, j| {
            st.u.get(keep[i], j).clone()
        });
        let from_matrix = BigMatrix::from_fn(self.generators(), keep.len(), |i, j| {
            st.u_inv.get(i, keep[j]).clone()
        });
        let to = FpMorphism::expect_new(self.clone(), reduced.clone(), to_matrix);
        let from = FpMorphism::expect_new(reduced.clone(), self.clone(), from_matrix);
        (reduced, to, from)
    }
}

impl fmt::Debug for FpMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FpMorphism({:?} -> {:?}, matrix={:?})",
            self.dom, self.cod, self.matrix
        )
    }
}

#[derive(Serialize, Deserialize)]
struct FpMorphismWire {
    dom: FpModule,
    cod: FpModule,
    matrix: BigMatrix,
}

impl From<FpMorphism> for FpMorphismWire {
    fn from(f: FpMorphism) -> Self {
        FpMorphismWire {
            dom: f.dom,
            cod: f.cod,
            matrix: f.matrix,
        }
    }
}

impl TryFrom<FpMorphismWire> for FpMorphism {
    type Error = String;

    fn try_from(w: FpMorphismWire) -> std::result::Result<Self, String> {
        let mut w = w;
        // A matrix with no rows serializes as an empty list, so restore the
        // column count from the domain.
        if w.cod.generators() == 0 && w.matrix.rows() == 0 && w.matrix.cols() == 0 {
            w.matrix = BigMatrix::zeros(0, w.dom.generators());
        }
        if w.matrix.rows() != w.cod.generators() || w.matrix.cols() != w.dom.generators() {
            return Err(format!(
                "morphism matrix is {}x{}, expected {}x{} (codomain generators x domain generators)",
                w.matrix.rows(),
                w.matrix.cols(),
                w.cod.generators(),
                w.dom.generators()
            ));
        }
        if w.dom.ring() != w.cod.ring() {
            return Err("morphism endpoints live over different rings".to_string());
        }
        FpMorphism::new(w.dom, w.cod, w.matrix).map_err(|e| e.to_string())
    }
}
