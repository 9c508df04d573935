use super::module::FpModule;
use super::morphism::FpMorphism;
use crate::error::{CoreError, Result};
use crate::exactlin::{
    integer_kernel, preimage_lattice, smith_normal_form, solve_linear, BigMatrix,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// The abelian group Hom(dom, cod) presented by lattices of vectorized
/// matrices: `matrix_gens` spans all well-defined matrices, `zero_gens` spans
/// the matrices that are the zero morphism. Hom is the quotient of the first
/// by the second. Vectorization is column-major.
pub struct HomLattice {
    pub dom: FpModule,
    pub cod: FpModule,
    pub matrix_gens: Vec<Vec<BigInt>>,
    pub zero_gens: Vec<Vec<BigInt>>,
}

pub fn hom_lattice(dom: &FpModule, cod: &FpModule) -> HomLattice {
    assert_eq!(dom.ring(), cod.ring(), "hom across different rings");
    let gd = dom.generators();
    let gc = cod.generators();
    let vlen = gd * gc;
    let rd = dom.relation_matrix_full();
    // well-definedness of H is (R_dom^T (x) I)·vec(H) landing in the codomain
    // relations, one block per domain relator
    let kron = rd.transpose().kronecker(&BigMatrix::identity(gc));
    let rels_cod = cod.relation_matrix_full();
    let blocks: Vec<&BigMatrix> = std::iter::repeat(&rels_cod).take(rd.cols()).collect();
    let target = BigMatrix::block_diag(&blocks);
    let mut matrix_gens = preimage_lattice(&kron, &target, None);
    if rd.cols() == 0 {
        // no relations to respect: every matrix is well defined
        matrix_gens = (0..vlen)
            .map(|i| {
                let mut e = vec![BigInt::zero(); vlen];
                e[i] = BigInt::one();
                e
            })
            .collect();
    }
    let mut zero_gens = Vec::new();
    for j in 0..gd {
        for r in cod.relation_lattice() {
            let mut v = vec![BigInt::zero(); vlen];
            v[j * gc..(j + 1) * gc].clone_from_slice(&r);
            zero_gens.push(v);
        }
    }
    HomLattice {
        dom: dom.clone(),
        cod: cod.clone(),
        matrix_gens,
        zero_gens,
    }
}

struct QuotientStructure {
    a_mat: Option<BigMatrix>,
    u_inv: BigMatrix,
    diag: Vec<BigInt>,
}

/// Structure of span(ambient)/span(sub). `sub` must lie inside the ambient span.
fn quotient_structure(n: usize, ambient: &[Vec<BigInt>], sub: &[Vec<BigInt>]) -> QuotientStructure {
    ambient.iter().for_each(|g| assert_eq!(g.len(), n));
    if ambient.is_empty() {
        return QuotientStructure {
            a_mat: None,
            u_inv: BigMatrix::identity(0),
            diag: Vec::new(),
        };
    }
    let a_mat = BigMatrix::from_cols(ambient.to_vec());
    let k = a_mat.cols();
    let mut cols: Vec<Vec<BigInt>> = integer_kernel(&a_mat, None);
    for s in sub {
        let c = solve_linear(&a_mat, s, None)
            .particular
            .expect("sub lattice must lie inside the ambient lattice");
        cols.push(c);
    }
    let m = if cols.is_empty() {
        BigMatrix::zeros(k, 0)
    } else {
        BigMatrix::from_cols(cols)
    };
    let d = smith_normal_form(&m);
    let lim = k.min(m.cols());
    let diag = (0..k)
        .map(|i| if i < lim { d.s.get(i, i).clone() } else { BigInt::zero() })
        .collect();
    QuotientStructure {
        a_mat: Some(a_mat),
        u_inv: d.u_inv,
        diag,
    }
}

/// Order of span(ambient)/span(sub), or None when infinite.
pub(crate) fn quotient_order(n: usize, ambient: &[Vec<BigInt>], sub: &[Vec<BigInt>]) -> Option<BigInt> {
    let st = quotient_structure(n, ambient, sub);
    let mut total = BigInt::one();
    for d in &st.diag {
        if d.is_zero() {
            return None;
        }
        total *= d;
    }
    Some(total)
}

/// One representative vector per coset of span(sub) inside span(ambient), in a
/// deterministic order starting with zero. Errors when the quotient is infinite.
pub fn quotient_coset_reps(
    n: usize,
    ambient: &[Vec<BigInt>],
    sub: &[Vec<BigInt>],
) -> Result<Vec<Vec<BigInt>>> {
    let st = quotient_structure(n, ambient, sub);
    if st.diag.iter().any(|d| d.is_zero()) {
        return Err(CoreError::InfiniteHomSet(
            "coset enumeration over an infinite quotient".to_string(),
        ));
    }
    let Some(a_mat) = st.a_mat else {
        return Ok(vec![vec![BigInt::zero(); n]]);
    };
    let k = st.diag.len();
    let mut out = Vec::new();
    let mut y = vec![BigInt::zero(); k];
    loop {
        let x = st.u_inv.mul_vec(&y);
        out.push(a_mat.mul_vec(&x));
        let mut i = k;
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

/// Number of morphisms dom -> cod, or None when the hom group is infinite.
pub fn hom_group_order(dom: &FpModule, cod: &FpModule) -> Option<BigInt> {
    let lat = hom_lattice(dom, cod);
    quotient_order(
        dom.generators() * cod.generators(),
        &lat.matrix_gens,
        &lat.zero_gens,
    )
}

/// Every morphism dom -> cod exactly once (under `equals`), deterministically
/// ordered, starting with the zero morphism.
pub fn hom_enumerate(dom: &FpModule, cod: &FpModule) -> Result<Vec<FpMorphism>> {
    let lat = hom_lattice(dom, cod);
    let gd = dom.generators();
    let gc = cod.generators();
    let reps = quotient_coset_reps(gd * gc, &lat.matrix_gens, &lat.zero_gens).map_err(|_| {
        CoreError::InfiniteHomSet(format!(
            "hom set from {dom:?} to {cod:?} is infinite"
        ))
    })?;
    Ok(reps
        .into_iter()
        .map(|v| {
            FpMorphism::expect_new(dom.clone(), cod.clone(), BigMatrix::from_vectorized(gc, gd, &v))
        })
        .collect())
}

/// One linear side condition on an unknown morphism `H: dom -> cod`:
/// `left · H · right ≡ value` modulo the column span of `target_rels`.
/// `left` must be a well-defined morphism matrix out of `cod`; `right` is any
/// matrix whose columns are domain coordinate vectors.
pub struct HomConstraint {
    pub left: BigMatrix,
    pub right: BigMatrix,
    pub value: BigMatrix,
    pub target_rels: BigMatrix,
}

impl HomConstraint {
    /// `H·right ≡ value` inside `target` (no post-composition).
    pub fn plain(right: BigMatrix, value: BigMatrix, target: &FpModule) -> Self {
        HomConstraint {
            left: BigMatrix::identity(target.generators()),
            right,
            value,
            target_rels: target.relation_matrix_full(),
        }
    }
}

/// Full solution set, over vectorized matrices, of the system "H is a
/// well-defined morphism dom -> cod and satisfies every constraint". The
/// kernel directions include all matrices equal to zero as morphisms, so
/// distinct solutions are cosets of the zero sublattice.
pub fn morphism_solutions(
    dom: &FpModule,
    cod: &FpModule,
    constraints: &[HomConstraint],
) -> crate::exactlin::AffineSolutionSet {
    let gd = dom.generators();
    let gc = cod.generators();
    let vlen = gd * gc;
    // each block contributes: coeff·v - lattice·aux = rhs
    let mut blocks: Vec<(BigMatrix, BigMatrix, Vec<BigInt>)> = Vec::new();
    let rd = dom.relation_matrix_full();
    let rels_cod = cod.relation_matrix_full();
    let wd_coeff = rd.transpose().kronecker(&BigMatrix::identity(gc));
    let wd_blocks: Vec<&BigMatrix> = std::iter::repeat(&rels_cod).take(rd.cols()).collect();
    let wd_lattice = BigMatrix::block_diag(&wd_blocks);
    let wd_rhs = vec![BigInt::zero(); wd_coeff.rows()];
    blocks.push((wd_coeff, wd_lattice, wd_rhs));
    for c in constraints {
        assert_eq!(c.left.cols(), gc, "constraint left factor must accept codomain coordinates");
        assert_eq!(c.right.rows(), gd, "constraint right factor must produce domain coordinates");
        assert_eq!(c.value.rows(), c.left.rows());
        assert_eq!(c.value.cols(), c.right.cols());
        assert_eq!(c.target_rels.rows(), c.left.rows());
        let coeff = c.right.transpose().kronecker(&c.left);
        let lat_blocks: Vec<&BigMatrix> =
            std::iter::repeat(&c.target_rels).take(c.right.cols()).collect();
        let lattice = BigMatrix::block_diag(&lat_blocks);
        blocks.push((coeff, lattice, c.value.vectorize()));
    }
    let aux_cols: Vec<usize> = blocks.iter().map(|b| b.1.cols()).collect();
    let total_cols = vlen + aux_cols.iter().sum::<usize>();
    let mut rows: Option<BigMatrix> = None;
    let mut rhs: Vec<BigInt> = Vec::new();
    let mut aux_offset = vlen;
    for (coeff, lattice, block_rhs) in &blocks {
        let mut row = coeff.clone();
        if aux_offset > vlen {
            row = row.hstack(&BigMatrix::zeros(coeff.rows(), aux_offset - vlen));
        }
        row = row.hstack(&lattice.neg());
        let used = aux_offset - vlen + lattice.cols();
        let remaining = total_cols - vlen - used;
        if remaining > 0 {
            row = row.hstack(&BigMatrix::zeros(coeff.rows(), remaining));
        }
        aux_offset += lattice.cols();
        rows = Some(match rows {
            None => row,
            Some(r) => r.vstack(&row),
        });
        rhs.extend(block_rhs.iter().cloned());
    }
    let big = rows.expect("at least the well-definedness block is present");
    let sol = solve_linear(&big, &rhs, None);
    let particular = sol.particular.map(|p| p[..vlen].to_vec());
    let mut kernel = Vec::new();
    for k in sol.kernel_basis {
        let proj = k[..vlen].to_vec();
        if proj.iter().any(|x| !x.is_zero()) {
            kernel.push(proj);
        }
    }
    crate::exactlin::AffineSolutionSet {
        particular,
        kernel_basis: kernel,
        modulus: None,
    }
}

/// Materialize every distinct morphism in a solution set produced by
/// [`morphism_solutions`]. Errors when there are infinitely many.
pub fn distinct_solutions(
    dom: &FpModule,
    cod: &FpModule,
    sol: &crate::exactlin::AffineSolutionSet,
) -> Result<Vec<FpMorphism>> {
    let Some(p) = &sol.particular else {
        return Ok(Vec::new());
    };
    let gd = dom.generators();
    let gc = cod.generators();
    let lat = hom_lattice(dom, cod);
    let reps = quotient_coset_reps(gd * gc, &sol.kernel_basis, &lat.zero_gens)?;
    Ok(reps
        .into_iter()
        .map(|r| {
            let v: Vec<BigInt> = p.iter().zip(&r).map(|(a, b)| a + b).collect();
            FpMorphism::expect_new(dom.clone(), cod.clone(), BigMatrix::from_vectorized(gc, gd, &v))
        })
        .collect())
}

impl FpMorphism {
    /// A retraction `r` with `r∘self = id`, when one exists.
    pub fn is_split_mono(&self) -> Option<FpMorphism> {
        let a = self.dom();
        let b = self.cod();
        let constraint = HomConstraint::plain(
            self.matrix().clone(),
            BigMatrix::identity(a.generators()),
            a,
        );
        let sol = morphism_solutions(b, a, &[constraint]);
        sol.particular.as_ref().map(|p| {
            FpMorphism::expect_new(
                b.clone(),
                a.clone(),
                BigMatrix::from_vectorized(a.generators(), b.generators(), p),
            )
        })
    }
}

/// First isomorphism `phi` between the codomains with `phi∘f = g`, when the
/// two maps out of a shared domain are isomorphic under it.
pub fn find_under_isomorphism(f: &FpMorphism, g: &FpMorphism) -> Result<Option<FpMorphism>> {
    assert_eq!(f.dom(), g.dom(), "comparing maps out of different objects");
    if f.cod().canonical_form() != g.cod().canonical_form() {
        return Ok(None);
    }
    let constraint = HomConstraint::plain(f.matrix().clone(), g.matrix().clone(), g.cod());
    let sol = morphism_solutions(f.cod(), g.cod(), &[constraint]);
    for phi in distinct_solutions(f.cod(), g.cod(), &sol)? {
        if phi.is_iso() {
            return Ok(Some(phi));
        }
    }
    Ok(None)
}

/// Are two maps out of the same object isomorphic under it, i.e. is there an
/// isomorphism between the codomains commuting with the maps?
pub fn are_isomorphic_under(f: &FpMorphism, g: &FpMorphism) -> Result<bool> {
    Ok(find_under_isomorphism(f, g)?.is_some())
}

/// Are two maps isomorphic as objects of the arrow category: are there
/// isomorphisms `phi` between the domains and `psi` between the codomains
/// with `psi∘f = g∘phi`? Quantifies over the domain isomorphisms, so both
/// hom sets involved must be finite.
pub fn are_isomorphic_arrows(f: &FpMorphism, g: &FpMorphism) -> Result<bool> {
    if f.dom().canonical_form() != g.dom().canonical_form()
        || f.cod().canonical_form() != g.cod().canonical_form()
    {
        return Ok(false);
    }
    for phi in hom_enumerate(f.dom(), g.dom())? {
        if !phi.is_iso() {
            continue;
        }
        let shifted = crate::fpmod::morphism::compose(g, &phi);
        if find_under_isomorphism(f, &shifted)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Same as [`are_isomorphic_under`] but for spans `h: A -> X, q: X -> B`: the
/// connecting isomorphism must commute with both the maps in and the maps out.
pub fn are_isomorphic_under_over(
    h1: &FpMorphism,
    q1: &FpMorphism,
    h2: &FpMorphism,
    q2: &FpMorphism,
) -> Result<bool> {
    assert_eq!(h1.dom(), h2.dom(), "spans start at different objects");
    assert_eq!(q1.cod(), q2.cod(), "spans end at different objects");
    assert_eq!(h1.cod(), q1.dom(), "first span does not compose");
    assert_eq!(h2.cod(), q2.dom(), "second span does not compose");
    if h1.cod().canonical_form() != h2.cod().canonical_form() {
        return Ok(false);
    }
    let under = HomConstraint::plain(h1.matrix().clone(), h2.matrix().clone(), h2.cod());
    let over = HomConstraint {
        left: q2.matrix().clone(),
        right: BigMatrix::identity(h1.cod().generators()),
        value: q1.matrix().clone(),
        target_rels: q1.cod().relation_matrix_full(),
    };
    let sol = morphism_solutions(h1.cod(), h2.cod(), &[under, over]);
    for phi in distinct_solutions(h1.cod(), h2.cod(), &sol)? {
        if phi.is_iso() {
            return Ok(true);
        }
    }
    Ok(false)
}
