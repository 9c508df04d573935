//! Solvers for extension and lifting problems: given maps into a corner, find
//! the diagonals that make the triangles commute. Everything reduces to affine
//! systems over vectorized matrices, so solution sets are exact and complete;
//! a brute-force oracle re-derives answers by hom-set enumeration.

use crate::error::{CoreError, Result};
use crate::exactlin::{
    hermite_columns, lattice_contained, reduce_mod_lattice, solve_linear, AffineSolutionSet,
    BigMatrix,
};
use crate::fpmod::{
    compose, distinct_solutions, hom_enumerate, hom_group_order, hom_lattice, morphism_solutions,
    FpModule, FpMorphism, HomConstraint,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeSet;

/// Extend `u: A -> K` along `n: A -> B`: find all `w: B -> K` with `w∘n = u`.
pub struct ExtensionProblem {
    pub n: FpMorphism,
    pub u: FpMorphism,
}

impl ExtensionProblem {
    pub fn new(n: FpMorphism, u: FpMorphism) -> Self {
        assert_eq!(n.dom(), u.dom(), "extension data must share a domain");
        ExtensionProblem { n, u }
    }
}

/// A commuting square `i∘u = v∘p` asking for a diagonal `w` with `w∘p = u`
/// and `i∘w = v`.
///
/// `p: A -> B` is the left edge, `i: C -> D` the right edge, `u: A -> C` the
/// top, `v: B -> D` the bottom.
pub struct LiftingSquare {
    pub p: FpMorphism,
    pub i: FpMorphism,
    pub u: FpMorphism,
    pub v: FpMorphism,
}

impl LiftingSquare {
    pub fn new(p: FpMorphism, i: FpMorphism, u: FpMorphism, v: FpMorphism) -> Result<Self> {
        let sq = LiftingSquare { p, i, u, v };
        sq.check_commutes()?;
        Ok(sq)
    }

    pub fn check_commutes(&self) -> Result<()> {
        assert_eq!(self.p.dom(), self.u.dom());
        assert_eq!(self.p.cod(), self.v.dom());
        assert_eq!(self.u.cod(), self.i.dom());
        assert_eq!(self.v.cod(), self.i.cod());
        if compose(&self.i, &self.u).equals(&compose(&self.v, &self.p)) {
            Ok(())
        } else {
            Err(CoreError::NonCommutingSquare(
                "i∘u and v∘p disagree".to_string(),
            ))
        }
    }
}

/// The complete set of diagonals of a problem: an affine family of matrices
/// whose kernel directions include everything equal to the zero morphism.
pub struct DiagonalSet {
    dom: FpModule,
    cod: FpModule,
    solutions: AffineSolutionSet,
}

impl DiagonalSet {
    fn new(dom: FpModule, cod: FpModule, solutions: AffineSolutionSet) -> Self {
        DiagonalSet {
            dom,
            cod,
            solutions,
        }
    }

    pub fn solutions(&self) -> &AffineSolutionSet {
        &self.solutions
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.particular.is_none()
    }

    /// The canonical diagonal: the particular solution reduced against the
    /// homogeneous lattice, which is the same vector no matter how the solver
    /// arrived at the family.
    pub fn witness(&self) -> Option<FpMorphism> {
        self.solutions.particular.as_ref().map(|p| {
            let v = reduce_mod_lattice(p, &self.solutions.kernel_basis);
            FpMorphism::expect_new(
                self.dom.clone(),
                self.cod.clone(),
                BigMatrix::from_vectorized(self.cod.generators(), self.dom.generators(), &v),
            )
        })
    }

    /// Number of distinct diagonals, or None when infinite.
    pub fn count(&self) -> Option<BigInt> {
        if self.is_empty() {
            return Some(BigInt::zero());
        }
        let lat = hom_lattice(&self.dom, &self.cod);
        crate::fpmod::quotient_coset_reps(
            self.dom.generators() * self.cod.generators(),
            &self.solutions.kernel_basis,
            &lat.zero_gens,
        )
        .ok()
        .map(|reps| BigInt::from(reps.len()))
    }

    /// Exactly one diagonal: solvable, with every homogeneous direction the
    /// zero morphism.
    pub fn is_unique(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        let lat = hom_lattice(&self.dom, &self.cod);
        lattice_contained(&self.solutions.kernel_basis, &lat.zero_gens, None)
    }

    /// Every distinct diagonal, materialized. Errors when infinite.
    pub fn list(&self) -> Result<Vec<FpMorphism>> {
        distinct_solutions(&self.dom, &self.cod, &self.solutions)
    }
}

/// All solutions `w: B -> K` of `w∘n = u`.
pub fn extensions(prob: &ExtensionProblem) -> DiagonalSet {
    let b = prob.n.cod();
    let k = prob.u.cod();
    let constraint = HomConstraint::plain(prob.n.matrix().clone(), prob.u.matrix().clone(), k);
    let sol = morphism_solutions(b, k, &[constraint]);
    DiagonalSet::new(b.clone(), k.clone(), sol)
}

fn require_enumerable_test_side(k: &FpModule, n: &FpMorphism) -> Result<()> {
    if hom_group_order(n.dom(), k).is_none() {
        return Err(CoreError::InfiniteHomSet(format!(
            "cannot quantify over the infinite hom set from {:?} to {k:?}",
            n.dom()
        )));
    }
    Ok(())
}

/// Does every `u: A -> K` extend along `n: A -> B`? Decided by containment of
/// matrix lattices: the restriction map on hom groups must be onto.
pub fn is_injective_wrt(k: &FpModule, n: &FpMorphism) -> Result<bool> {
    require_enumerable_test_side(k, n)?;
    let a = n.dom();
    let b = n.cod();
    let lat_b = hom_lattice(b, k);
    let lat_a = hom_lattice(a, k);
    let restrict = n.matrix().transpose().kronecker(&BigMatrix::identity(k.generators()));
    let mut image: Vec<Vec<BigInt>> = lat_b
        .matrix_gens
        .iter()
        .map(|w| restrict.mul_vec(w))
        .collect();
    image.extend(lat_a.zero_gens.iter().cloned());
    Ok(lattice_contained(&lat_a.matrix_gens, &image, None))
}

/// Does every `u: A -> K` extend uniquely? Ontoness as above plus triviality
/// of the restriction map's kernel.
pub fn is_orthogonal_to(k: &FpModule, n: &FpMorphism) -> Result<bool> {
    if !is_injective_wrt(k, n)? {
        return Ok(false);
    }
    let b = n.cod();
    // homogeneous solutions of w∘n = 0 must all be the zero morphism
    let zero_target = FpMorphism::zero_morphism(n.dom(), k);
    let sol = morphism_solutions(
        b,
        k,
        &[HomConstraint::plain(
            n.matrix().clone(),
            zero_target.matrix().clone(),
            k,
        )],
    );
    let lat_b = hom_lattice(b, k);
    Ok(lattice_contained(&sol.kernel_basis, &lat_b.zero_gens, None))
}

/// All diagonals of a lifting square.
pub fn lifting_diagonals(sq: &LiftingSquare) -> Result<DiagonalSet> {
    sq.check_commutes()?;
    let b = sq.p.cod();
    let c = sq.i.dom();
    let constraints = vec![
        HomConstraint::plain(sq.p.matrix().clone(), sq.u.matrix().clone(), c),
        HomConstraint {
            left: sq.i.matrix().clone(),
            right: BigMatrix::identity(b.generators()),
            value: sq.v.matrix().clone(),
            target_rels: sq.i.cod().relation_matrix_full(),
        },
    ];
    let sol = morphism_solutions(b, c, &constraints);
    Ok(DiagonalSet::new(b.clone(), c.clone(), sol))
}

/// A diagonal making both triangles commute, canonically chosen, if any.
pub fn has_lifting(sq: &LiftingSquare) -> Result<Option<FpMorphism>> {
    Ok(lifting_diagonals(sq)?.witness())
}

/// The diagonal, when it exists and is unique.
pub fn has_unique_lifting(sq: &LiftingSquare) -> Result<Option<FpMorphism>> {
    let d = lifting_diagonals(sq)?;
    if d.is_unique() {
        Ok(d.witness())
    } else {
        Ok(None)
    }
}

/// Which squares to quantify over when testing purity.
pub enum SquareSource {
    /// Every map `z` between modules of order at most the bound, one domain
    /// and codomain per isomorphism class.
    Exhaustive { max_order: u64 },
    /// Every matrix-shaped `z` between free modules of rank at most the bound;
    /// these are the shapes of finite linear systems with constants.
    FreeSystems { max_rank: usize },
}

/// Is `f` a pure mono: for every square `t∘z = f∘s` drawn from the source,
/// does some `d` satisfy `d∘z = s`? Non-monos are never pure monos.
///
/// For a fixed `z` both sides are subgroups of Hom(dom z, dom f): the maps `s`
/// admitting a `t`, and the maps factoring through `z`. The check is lattice
/// containment, so no quantification over individual `s` happens.
pub fn is_pure_mono(f: &FpMorphism, source: &SquareSource) -> Result<bool> {
    if !f.is_mono() {
        return Ok(false);
    }
    let zs: Vec<FpMorphism> = match source {
        SquareSource::Exhaustive { max_order } => {
            if !f.dom().is_finite() || !f.cod().is_finite() {
                return Err(CoreError::InfiniteHomSet(
                    "exhaustive purity checking needs finite endpoints".to_string(),
                ));
            }
            let objs = crate::classes::universe_objects(f.dom().ring(), *max_order);
            let mut out = Vec::new();
            for c in &objs {
                for d in &objs {
                    out.extend(hom_enumerate(c, d)?);
                }
            }
            out
        }
        SquareSource::FreeSystems { max_rank } => {
            let Some(n) = f.dom().ring().modulus() else {
                return Err(CoreError::InfiniteHomSet(
                    "free-system squares over Z form an infinite family".to_string(),
                ));
            };
            let mut out = Vec::new();
            for l in 1..=*max_rank {
                for k in 1..=*max_rank {
                    let c = FpModule::free_module(f.dom().ring().clone(), l);
                    let d = FpModule::free_module(f.dom().ring().clone(), k);
                    // odometer over all k x l matrices with entries mod n
                    let cells = k * l;
                    let mut digits = vec![BigInt::zero(); cells];
                    loop {
                        let m = BigMatrix::from_vectorized(k, l, &digits);
                        out.push(FpMorphism::expect_new(c.clone(), d.clone(), m));
                        let mut i = cells;
                        loop {
                            if i == 0 {
                                break;
                            }
                            i -= 1;
                            digits[i] += 1;
                            if &digits[i] < n {
                                break;
                            }
                            digits[i] = BigInt::zero();
                        }
                        if digits.iter().all(|x| x.is_zero()) {
                            break;
                        }
                    }
                }
            }
            out
        }
    };
    for z in &zs {
        if !square_diagonal_condition(f, z) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For one `z`: every `s` fitting in a square over `f` factors through `z`.
fn square_diagonal_condition(f: &FpMorphism, z: &FpMorphism) -> bool {
    let a = f.dom();
    let b = f.cod();
    let c = z.dom();
    let d = z.cod();
    let (ga, gb, gc, gd) = (a.generators(), b.generators(), c.generators(), d.generators());
    let s_len = gc * ga;
    let t_len = gd * gb;
    // homogeneous system in (vec s, vec t, aux): s, t well defined, f∘s = t∘z
    let ra = a.relation_matrix_full();
    let rb = b.relation_matrix_full();
    let rc = c.relation_matrix_full();
    let rd = d.relation_matrix_full();
    let mut row_blocks: Vec<(BigMatrix, BigMatrix, BigMatrix)> = Vec::new();
    // (coeff on s, coeff on t, lattice block)
    let wd_s = rc.transpose().kronecker(&BigMatrix::identity(ga));
    let wd_s_lat =
        BigMatrix::block_diag(&std::iter::repeat(&ra).take(rc.cols()).collect::<Vec<_>>());
    row_blocks.push((wd_s, BigMatrix::zeros(0, 0), wd_s_lat));
    let wd_t = rd.transpose().kronecker(&BigMatrix::identity(gb));
    let wd_t_lat =
        BigMatrix::block_diag(&std::iter::repeat(&rb).take(rd.cols()).collect::<Vec<_>>());
    row_blocks.push((BigMatrix::zeros(0, 0), wd_t, wd_t_lat));
    let glue_s = BigMatrix::identity(gc).kronecker(f.matrix());
    let glue_t = z.matrix().transpose().kronecker(&BigMatrix::identity(gb));
    let glue_lat = BigMatrix::block_diag(&std::iter::repeat(&rb).take(gc).collect::<Vec<_>>());
    row_blocks.push((glue_s, glue_t.neg(), glue_lat));
    let aux_total: usize = row_blocks.iter().map(|b| b.2.cols()).sum();
    let total_cols = s_len + t_len + aux_total;
    let mut stacked: Option<BigMatrix> = None;
    let mut aux_used = 0usize;
    for (cs, ct, lat) in &row_blocks {
        let nrows = lat.rows().max(cs.rows()).max(ct.rows());
        if nrows == 0 {
            aux_used += lat.cols();
            continue;
        }
        let cs_m = if cs.rows() == 0 {
            BigMatrix::zeros(nrows, s_len)
        } else {
            cs.clone()
        };
        let ct_m = if ct.rows() == 0 {
            BigMatrix::zeros(nrows, t_len)
        } else {
            ct.clone()
        };
        let mut row = cs_m.hstack(&ct_m);
        row = row.hstack(&BigMatrix::zeros(nrows, aux_used));
        row = row.hstack(&lat.neg());
        let rest = aux_total - aux_used - lat.cols();
        row = row.hstack(&BigMatrix::zeros(nrows, rest));
        aux_used += lat.cols();
        stacked = Some(match stacked {
            None => row,
            Some(m) => m.vstack(&row),
        });
    }
    let s_with_t: Vec<Vec<BigInt>> = match stacked {
        None => (0..s_len)
            .map(|i| {
                let mut e = vec![BigInt::zero(); s_len];
                e[i] = BigInt::one();
                e
            })
            .collect(),
        Some(m) => {
            assert_eq!(m.cols(), total_cols);
            let rhs = vec![BigInt::zero(); m.rows()];
            let sol = solve_linear(&m, &rhs, None);
            sol.kernel_basis
                .into_iter()
                .map(|v| v[..s_len].to_vec())
                .filter(|v| v.iter().any(|x| !x.is_zero()))
                .collect()
        }
    };
    // the maps factoring through z: images of d-matrices, plus zero directions
    let lat_da = hom_lattice(d, a);
    let lat_ca = hom_lattice(c, a);
    let through = z.matrix().transpose().kronecker(&BigMatrix::identity(ga));
    let mut factoring: Vec<Vec<BigInt>> = lat_da
        .matrix_gens
        .iter()
        .map(|w| through.mul_vec(w))
        .collect();
    factoring.extend(lat_ca.zero_gens.iter().cloned());
    let factoring = hermite_columns(s_len, &factoring);
    lattice_contained(&s_with_t, &factoring, None)
}

/// A problem the oracle can recompute from scratch.
pub enum LiftingProblem {
    Extension(ExtensionProblem),
    Lifting(LiftingSquare),
}

/// Outcome of comparing a solver answer against brute-force enumeration.
pub struct OracleReport {
    pub agree: bool,
    pub solver_count: usize,
    pub oracle_count: usize,
    pub detail: String,
}

/// Brute-force all diagonals of an extension problem by enumerating Hom(B, K).
pub fn brute_force_extensions(prob: &ExtensionProblem) -> Result<Vec<FpMorphism>> {
    let all = hom_enumerate(prob.n.cod(), prob.u.cod())?;
    Ok(all
        .into_iter()
        .filter(|w| compose(w, &prob.n).equals(&prob.u))
        .collect())
}

/// Brute-force all diagonals of a lifting square by enumerating Hom(B, C).
pub fn brute_force_liftings(sq: &LiftingSquare) -> Result<Vec<FpMorphism>> {
    sq.check_commutes()?;
    let all = hom_enumerate(sq.p.cod(), sq.i.dom())?;
    Ok(all
        .into_iter()
        .filter(|w| {
            compose(w, &sq.p).equals(&sq.u) && compose(&sq.i, w).equals(&sq.v)
        })
        .collect())
}

/// Compare a claimed solution list for an extension problem with the oracle.
pub fn oracle_check_extensions(
    prob: &ExtensionProblem,
    claimed: &[FpMorphism],
) -> Result<OracleReport> {
    let expected = brute_force_extensions(prob)?;
    compare_lists(claimed, &expected)
}

/// Compare a claimed solution list for a lifting square with the oracle.
pub fn oracle_check_liftings(sq: &LiftingSquare, claimed: &[FpMorphism]) -> Result<OracleReport> {
    let expected = brute_force_liftings(sq)?;
    compare_lists(claimed, &expected)
}

fn compare_lists(claimed: &[FpMorphism], expected: &[FpMorphism]) -> Result<OracleReport> {
    let Some(sample) = claimed.first().or_else(|| expected.first()) else {
        return Ok(OracleReport {
            agree: true,
            solver_count: 0,
            oracle_count: 0,
            detail: "agree".to_string(),
        });
    };
    // Different matrices can present the same morphism, so key both lists by
    // the canonical residue of the column-stacked matrix modulo the lattice of
    // zero presentations; pairwise `equals` scans are quadratic and the lists
    // can run to tens of thousands of entries.
    let lat = hom_lattice(sample.dom(), sample.cod());
    let vlen = sample.dom().generators() * sample.cod().generators();
    let basis = hermite_columns(vlen, &lat.zero_gens);
    let canon = |w: &FpMorphism| -> Vec<BigInt> {
        let m = w.matrix();
        let mut v = Vec::with_capacity(vlen);
        for j in 0..m.cols() {
            for i in 0..m.rows() {
                v.push(m.get(i, j).clone());
            }
        }
        reduce_mod_lattice(&v, &basis)
    };
    let mut pool: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    for e in expected {
        pool.insert(canon(e));
    }
    let mut detail = String::new();
    let mut agree = true;
    let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    for w in claimed {
        let k = canon(w);
        if !pool.contains(&k) {
            agree = false;
            detail = format!("solver lists a non-solution: {w:?}");
            break;
        }
        if !seen.insert(k) {
            agree = false;
            detail = format!("solver lists a duplicate diagonal: {w:?}");
            break;
        }
    }
    if agree && claimed.len() != expected.len() {
        agree = false;
        detail = format!(
            "solver found {} diagonals, enumeration found {}",
            claimed.len(),
            expected.len()
        );
    }
    if agree {
        detail = "agree".to_string();
    }
    Ok(OracleReport {
        agree,
        solver_count: claimed.len(),
        oracle_count: expected.len(),
        detail,
    })
}

/// Run the solver and the oracle on the same problem and compare.
pub fn oracle_check(problem: &LiftingProblem) -> Result<OracleReport> {
    match problem {
        LiftingProblem::Extension(prob) => {
            let solved = extensions(prob).list()?;
            oracle_check_extensions(prob, &solved)
        }
        LiftingProblem::Lifting(sq) => {
            let solved = lifting_diagonals(sq)?.list()?;
            oracle_check_liftings(sq, &solved)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpmod::Ring;

    fn zn(n: i64, k: i64) -> FpModule {
        FpModule::cyclic(Ring::zmod(n), k)
    }

    fn doubling_z4() -> FpMorphism {
        FpMorphism::new(zn(4, 2), zn(4, 4), BigMatrix::from_i64_rows(&[&[2]])).unwrap()
    }

    #[test]
    fn extensions_along_identity() {
        let m = zn(4, 4);
        let u = FpMorphism::new(m.clone(), zn(4, 2), BigMatrix::from_i64_rows(&[&[1]])).unwrap();
        let prob = ExtensionProblem::new(FpMorphism::identity(&m), u.clone());
        let d = extensions(&prob);
        assert!(d.is_unique());
        assert!(d.witness().unwrap().equals(&u));
    }

    #[test]
    fn obstructed_extension() {
        // u = id on Z/2 cannot extend along the doubling into Z/4
        let n = doubling_z4();
        let u = FpMorphism::identity(n.dom());
        let d = extensions(&ExtensionProblem::new(n, u));
        assert!(d.is_empty());
        assert!(d.witness().is_none());
        assert_eq!(d.count(), Some(BigInt::zero()));
    }

    #[test]
    fn unobstructed_extension() {
        let n = doubling_z4();
        let u = n.clone();
        let d = extensions(&ExtensionProblem::new(n.clone(), u));
        assert!(!d.is_empty());
        let w = d.witness().unwrap();
        assert!(compose(&w, &n).equals(&n));
    }

    #[test]
    fn injectivity_and_orthogonality_instances() {
        let n = doubling_z4();
        // the full ring is injective for the doubling, but not orthogonal
        assert!(is_injective_wrt(&zn(4, 4), &n).unwrap());
        assert!(!is_orthogonal_to(&zn(4, 4), &n).unwrap());
        // Z/2 is not even injective: the identity obstruction
        assert!(!is_injective_wrt(&zn(4, 2), &n).unwrap());
        // identities are injective and orthogonal for anything
        let id = FpMorphism::identity(&zn(4, 4));
        assert!(is_injective_wrt(&zn(4, 2), &id).unwrap());
        assert!(is_orthogonal_to(&zn(4, 2), &id).unwrap());
    }

    #[test]
    fn lifting_squares() {
        // p = i = doubling, u = v = identity-shaped maps: no diagonal
        let p = doubling_z4();
        let sq = LiftingSquare::new(
            p.clone(),
            p.clone(),
            FpMorphism::identity(p.dom()),
            FpMorphism::identity(p.cod()),
        )
        .unwrap();
        assert!(has_lifting(&sq).unwrap().is_none());
        // zero square always lifts through zero
        let zsq = LiftingSquare::new(
            p.clone(),
            p.clone(),
            FpMorphism::zero_morphism(p.dom(), p.dom()),
            FpMorphism::zero_morphism(p.cod(), p.cod()),
        )
        .unwrap();
        let w = has_lifting(&zsq).unwrap().unwrap();
        assert!(w.is_zero_morphism());
        // iso left edge gives a unique diagonal
        let iso = FpMorphism::new(zn(4, 4), zn(4, 4), BigMatrix::from_i64_rows(&[&[3]])).unwrap();
        let sq2 = LiftingSquare::new(
            iso.clone(),
            p.clone(),
            FpMorphism::zero_morphism(&zn(4, 4), p.dom()),
            FpMorphism::zero_morphism(&zn(4, 4), p.cod()),
        )
        .unwrap();
        let w2 = has_unique_lifting(&sq2).unwrap().expect("iso edge forces a diagonal");
        assert!(w2.is_zero_morphism());
        // non-commuting data is a typed error
        let bad = LiftingSquare::new(
            p.clone(),
            p.clone(),
            FpMorphism::identity(p.dom()),
            FpMorphism::zero_morphism(p.cod(), p.cod()),
        );
        assert!(matches!(bad, Err(CoreError::NonCommutingSquare(_))));
    }

    #[test]
    fn unique_liftings_against_iso_edge() {
        let iso = FpMorphism::new(zn(4, 4), zn(4, 4), BigMatrix::from_i64_rows(&[&[3]])).unwrap();
        let target = zn(4, 2);
        let u = FpMorphism::new(zn(4, 4), target.clone(), BigMatrix::from_i64_rows(&[&[1]]))
            .unwrap();
        let i = FpMorphism::identity(&target);
        let v = compose(&i, &compose(&u, &iso_inverse(&iso)));
        let sq = LiftingSquare::new(iso.clone(), i, u.clone(), v).unwrap();
        let w = has_unique_lifting(&sq).unwrap().expect("iso edge forces a unique diagonal");
        assert!(compose(&w, &iso).equals(&u));
    }

    fn iso_inverse(f: &FpMorphism) -> FpMorphism {
        // tiny helper: invert by solving g∘f = id
        let sol = morphism_solutions(
            f.cod(),
            f.dom(),
            &[HomConstraint::plain(
                f.matrix().clone(),
                BigMatrix::identity(f.dom().generators()),
                f.dom(),
            )],
        );
        let p = sol.particular.expect("isomorphisms invert");
        FpMorphism::expect_new(
            f.cod().clone(),
            f.dom().clone(),
            BigMatrix::from_vectorized(f.dom().generators(), f.cod().generators(), &p),
        )
    }

    #[test]
    fn purity_examples() {
        let free_source = SquareSource::FreeSystems { max_rank: 2 };
        let small_exhaustive = SquareSource::Exhaustive { max_order: 8 };
        // identities are pure
        let id = FpMorphism::identity(&zn(4, 4));
        assert!(is_pure_mono(&id, &free_source).unwrap());
        // the doubling into Z/4 is mono but not pure
        let f = doubling_z4();
        assert!(f.is_mono());
        assert!(!is_pure_mono(&f, &free_source).unwrap());
        assert!(!is_pure_mono(&f, &small_exhaustive).unwrap());
        // split monos are pure
        let sum = FpModule::direct_sum(&zn(4, 2), &zn(4, 4));
        let incl =
            FpMorphism::new(zn(4, 2), sum, BigMatrix::from_i64_rows(&[&[1], &[0]])).unwrap();
        assert!(incl.is_split_mono().is_some());
        assert!(is_pure_mono(&incl, &free_source).unwrap());
        assert!(is_pure_mono(&incl, &small_exhaustive).unwrap());
        // non-monos are never pure monos
        let q = FpMorphism::new(zn(4, 4), zn(4, 2), BigMatrix::from_i64_rows(&[&[1]])).unwrap();
        assert!(!is_pure_mono(&q, &free_source).unwrap());
    }

    #[test]
    fn oracle_agreement_on_small_problems() {
        let n = doubling_z4();
        for u_mat in 0..2i64 {
            let u = FpMorphism::new(
                n.dom().clone(),
                zn(4, 4),
                BigMatrix::from_i64_rows(&[&[2 * u_mat]]),
            )
            .unwrap();
            let prob = LiftingProblem::Extension(ExtensionProblem::new(n.clone(), u));
            let report = oracle_check(&prob).unwrap();
            assert!(report.agree, "{}", report.detail);
        }
        // corrupted solver output is flagged
        let prob = ExtensionProblem::new(n.clone(), FpMorphism::zero_morphism(n.dom(), &zn(4, 4)));
        let mut claimed = extensions(&prob).list().unwrap();
        claimed.pop();
        let report = oracle_check_extensions(&prob, &claimed).unwrap();
        assert!(!report.agree);
        assert!(report.detail.contains("diagonals"));
    }

    #[test]
    fn lifting_invariant_under_iso_replacement() {
        // replacing the left edge by an isomorphic one preserves lifting
        let p = doubling_z4();
        let unit = FpMorphism::new(zn(4, 2), zn(4, 2), BigMatrix::from_i64_rows(&[&[1]])).unwrap();
        let p_twisted = compose(&p, &unit);
        for (umat, vmat) in [(0i64, 0i64), (1, 2)] {
            let u = FpMorphism::new(
                p.dom().clone(),
                p.dom().clone(),
                BigMatrix::from_i64_rows(&[&[umat]]),
            )
            .unwrap();
            let v = FpMorphism::new(
                p.cod().clone(),
                p.cod().clone(),
                BigMatrix::from_i64_rows(&[&[vmat]]),
            )
            .unwrap();
            let sq = LiftingSquare::new(p.clone(), p.clone(), u.clone(), v.clone());
            let sq_twisted = LiftingSquare::new(p_twisted.clone(), p.clone(), u, v);
            if let (Ok(a), Ok(b)) = (sq, sq_twisted) {
                assert_eq!(
                    has_lifting(&a).unwrap().is_some(),
                    has_lifting(&b).unwrap().is_some()
                );
            }
        }
    }
}
