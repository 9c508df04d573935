use super::hom::{morphism_solutions, HomConstraint};
use super::module::FpModule;
use super::morphism::{compose, FpMorphism};
use crate::error::{CoreError, Result};
use crate::exactlin::{hermite_columns, preimage_lattice, BigMatrix};
use num_bigint::BigInt;

/// Pushout of a span `f: A -> B`, `g: A -> C`, glued as `(B + C)/(f(a) = g(a))`.
pub struct PushoutResult {
    pub apex: FpModule,
    /// `B -> apex`
    pub leg_left: FpMorphism,
    /// `C -> apex`
    pub leg_right: FpMorphism,
}

impl PushoutResult {
    /// The unique map out of the apex agreeing with a commuting cocone
    /// `(u: B -> Q, v: C -> Q)`.
    pub fn mediator(&self, u: &FpMorphism, v: &FpMorphism) -> Result<FpMorphism> {
        assert_eq!(u.dom(), self.leg_left.dom(), "cocone left map has the wrong domain");
        assert_eq!(v.dom(), self.leg_right.dom(), "cocone right map has the wrong domain");
        assert_eq!(u.cod(), v.cod(), "cocone maps must share a codomain");
        let mat = u.matrix().hstack(v.matrix());
        FpMorphism::new(self.apex.clone(), u.cod().clone(), mat).map_err(|_| {
            CoreError::NonCommutingSquare(
                "cocone does not commute with the span being pushed out".to_string(),
            )
        })
    }
}

pub fn pushout(f: &FpMorphism, g: &FpMorphism) -> PushoutResult {
    assert_eq!(f.dom(), g.dom(), "pushout needs a common domain");
    let b = f.cod();
    let c = g.cod();
    let gb = b.generators();
    let gc = c.generators();
    let glue = f.matrix().vstack(&g.matrix().neg());
    let relations = BigMatrix::block_diag(&[b.relations(), c.relations()]).hstack(&glue);
    let apex = FpModule::new(b.ring().clone(), gb + gc, relations);
    let left_mat = BigMatrix::identity(gb).vstack(&BigMatrix::zeros(gc, gb));
    let right_mat = BigMatrix::zeros(gb, gc).vstack(&BigMatrix::identity(gc));
    PushoutResult {
        leg_left: FpMorphism::expect_new(b.clone(), apex.clone(), left_mat),
        leg_right: FpMorphism::expect_new(c.clone(), apex.clone(), right_mat),
        apex,
    }
}

/// Pullback of a cospan `f: B -> D`, `g: C -> D`, the pairs with equal images.
pub struct PullbackResult {
    pub apex: FpModule,
    /// `apex -> B`
    pub proj_left: FpMorphism,
    /// `apex -> C`
    pub proj_right: FpMorphism,
}

impl PullbackResult {
    /// The unique map into the apex agreeing with a commuting cone
    /// `(u: Q -> B, v: Q -> C)`.
    pub fn mediator(&self, u: &FpMorphism, v: &FpMorphism) -> Result<FpMorphism> {
        assert_eq!(u.cod(), self.proj_left.cod(), "cone left map has the wrong codomain");
        assert_eq!(v.cod(), self.proj_right.cod(), "cone right map has the wrong codomain");
        assert_eq!(u.dom(), v.dom(), "cone maps must share a domain");
        let q = u.dom();
        let constraints = vec![
            HomConstraint {
                left: self.proj_left.matrix().clone(),
                right: BigMatrix::identity(q.generators()),
                value: u.matrix().clone(),
                target_rels: u.cod().relation_matrix_full(),
            },
            HomConstraint {
                left: self.proj_right.matrix().clone(),
                right: BigMatrix::identity(q.generators()),
                value: v.matrix().clone(),
                target_rels: v.cod().relation_matrix_full(),
            },
        ];
        let sol = morphism_solutions(q, &self.apex, &constraints);
        match sol.particular {
            Some(p) => Ok(FpMorphism::expect_new(
                q.clone(),
                self.apex.clone(),
                BigMatrix::from_vectorized(self.apex.generators(), q.generators(), &p),
            )),
            None => Err(CoreError::NonCommutingSquare(
                "cone does not commute with the cospan being pulled back".to_string(),
            )),
        }
    }
}

pub fn pullback(f: &FpMorphism, g: &FpMorphism) -> PullbackResult {
    assert_eq!(f.cod(), g.cod(), "pullback needs a common codomain");
    let b = f.dom();
    let c = g.dom();
    let d = f.cod();
    let gb = b.generators();
    let gc = c.generators();
    let stacked = f.matrix().hstack(&g.matrix().neg());
    let mut pair_gens = preimage_lattice(&stacked, &d.relation_matrix_full(), None);
    // the pair lattice always contains both relation lattices
    for r in b.relation_lattice() {
        let mut v = r;
        v.extend(vec![BigInt::from(0); gc]);
        pair_gens.push(v);
    }
    for r in c.relation_lattice() {
        let mut v = vec![BigInt::from(0); gb];
        v.extend(r);
        pair_gens.push(v);
    }
    let pair_gens = hermite_columns(gb + gc, &pair_gens);
    let k = pair_gens.len();
    let p_mat = if k == 0 {
        BigMatrix::zeros(gb + gc, 0)
    } else {
        BigMatrix::from_cols(pair_gens)
    };
    let target = BigMatrix::block_diag(&[&b.relation_matrix_full(), &c.relation_matrix_full()]);
    let rels = hermite_columns(k, &preimage_lattice(&p_mat, &target, None));
    let apex = FpModule::from_relation_columns(b.ring().clone(), k, rels);
    let top = p_mat.submatrix(0, gb, 0, k);
    let bottom = p_mat.submatrix(gb, gb + gc, 0, k);
    PullbackResult {
        proj_left: FpMorphism::expect_new(apex.clone(), b.clone(), top),
        proj_right: FpMorphism::expect_new(apex.clone(), c.clone(), bottom),
        apex,
    }
}

pub fn coproduct(a: &FpModule, b: &FpModule) -> (FpModule, FpMorphism, FpMorphism) {
    let sum = FpModule::direct_sum(a, b);
    let ga = a.generators();
    let gb = b.generators();
    let left = BigMatrix::identity(ga).vstack(&BigMatrix::zeros(gb, ga));
    let right = BigMatrix::zeros(ga, gb).vstack(&BigMatrix::identity(gb));
    (
        sum.clone(),
        FpMorphism::expect_new(a.clone(), sum.clone(), left),
        FpMorphism::expect_new(b.clone(), sum, right),
    )
}

/// Does the commuting square `p∘f = q∘g` exhibit its corner as the pushout of
/// `f` and `g`? Decided by whether the mediator out of the canonical pushout
/// is an isomorphism.
pub fn is_pushout_square(
    f: &FpMorphism,
    g: &FpMorphism,
    p: &FpMorphism,
    q: &FpMorphism,
) -> Result<bool> {
    if !compose(p, f).equals(&compose(q, g)) {
        return Err(CoreError::NonCommutingSquare(
            "p∘f and q∘g disagree, so the square cannot be a pushout".to_string(),
        ));
    }
    let po = pushout(f, g);
    let u = po.mediator(p, q)?;
    Ok(u.is_iso())
}

/// A finite diagram: objects indexed by position, arrows between them.
pub struct Diagram {
    objects: Vec<FpModule>,
    arrows: Vec<(usize, usize, FpMorphism)>,
}

impl Diagram {
    pub fn new(objects: Vec<FpModule>) -> Self {
        assert!(!objects.is_empty(), "diagram needs at least one object");
        Diagram {
            objects,
            arrows: Vec::new(),
        }
    }

    pub fn add_arrow(&mut self, from: usize, to: usize, f: FpMorphism) {
        assert_eq!(f.dom(), &self.objects[from], "arrow domain mismatch");
        assert_eq!(f.cod(), &self.objects[to], "arrow codomain mismatch");
        self.arrows.push((from, to, f));
    }

    pub fn objects(&self) -> &[FpModule] {
        &self.objects
    }

    pub fn arrows(&self) -> &[(usize, usize, FpMorphism)] {
        &self.arrows
    }
}

/// A colimit cocone: the object and one leg per diagram object.
pub struct ColimitResult {
    pub object: FpModule,
    pub legs: Vec<FpMorphism>,
}

impl ColimitResult {
    /// The unique map out of the colimit restricting to the given cocone.
    /// Errors when the cocone does not commute with the diagram.
    pub fn mediator(&self, cocone: &[FpMorphism]) -> Result<FpMorphism> {
        assert_eq!(cocone.len(), self.legs.len(), "one cocone map per diagram object");
        let q = cocone[0].cod().clone();
        for c in cocone {
            assert_eq!(c.cod(), &q, "cocone maps must share a codomain");
        }
        let constraints: Vec<HomConstraint> = self
            .legs
            .iter()
            .zip(cocone)
            .map(|(leg, c)| HomConstraint::plain(leg.matrix().clone(), c.matrix().clone(), &q))
            .collect();
        let sol = morphism_solutions(&self.object, &q, &constraints);
        match sol.particular {
            Some(p) => Ok(FpMorphism::expect_new(
                self.object.clone(),
                q.clone(),
                BigMatrix::from_vectorized(q.generators(), self.object.generators(), &p),
            )),
            None => Err(CoreError::NonCommutingSquare(
                "cocone does not commute with the diagram".to_string(),
            )),
        }
    }
}

/// Colimit of a finite diagram, presented as the coproduct of the objects
/// modulo one glue relation per arrow and domain generator.
pub fn finite_colimit(d: &Diagram) -> ColimitResult {
    let ring = d.objects[0].ring().clone();
    for o in &d.objects {
        assert_eq!(o.ring(), &ring, "diagram mixes rings");
    }
    let mut offsets = Vec::with_capacity(d.objects.len());
    let mut total = 0usize;
    for o in &d.objects {
        offsets.push(total);
        total += o.generators();
    }
    let rel_blocks: Vec<&BigMatrix> = d.objects.iter().map(|o| o.relations()).collect();
    let mut relations = BigMatrix::block_diag(&rel_blocks);
    let mut glue_cols = Vec::new();
    for (from, to, a) in &d.arrows {
        for k in 0..d.objects[*from].generators() {
            let mut col = vec![BigInt::from(0); total];
            let image = a.matrix().col(k);
            for (i, v) in image.into_iter().enumerate() {
                col[offsets[*to] + i] += v;
            }
            col[offsets[*from] + k] -= 1;
            glue_cols.push(col);
        }
    }
    if !glue_cols.is_empty() {
        relations = relations.hstack(&BigMatrix::from_cols(glue_cols));
    }
    let object = FpModule::new(ring, total, relations);
    let legs = d
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let mat = BigMatrix::from_fn(total, o.generators(), |r, c| {
                if r == offsets[i] + c {
                    BigInt::from(1)
                } else {
                    BigInt::from(0)
                }
            });
            FpMorphism::expect_new(o.clone(), object.clone(), mat)
        })
        .collect();
    ColimitResult { object, legs }
}

/// Colimit of a finite composable chain `M_0 -> M_1 -> ... -> M_k`: the last
/// object, with the composites as legs.
pub fn chain_colimit(fs: &[FpMorphism]) -> Result<ColimitResult> {
    if fs.is_empty() {
        return Err(CoreError::InvalidInput(
            "chain colimit needs at least one morphism".to_string(),
        ));
    }
    for w in fs.windows(2) {
        if w[0].cod() != w[1].dom() {
            return Err(CoreError::InvalidInput(
                "chain morphisms do not compose".to_string(),
            ));
        }
    }
    let last = fs.last().unwrap().cod().clone();
    let mut legs = vec![FpMorphism::identity(&last)];
    for f in fs.iter().rev() {
        let next = compose(&legs[legs.len() - 1], f);
        legs.push(next);
    }
    legs.reverse();
    Ok(ColimitResult { object: last, legs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpmod::hom::hom_enumerate;
    use crate::fpmod::ring::Ring;

    fn zc(k: i64) -> FpModule {
        FpModule::cyclic(Ring::Z, k)
    }

    fn doubling() -> FpMorphism {
        FpMorphism::new(zc(2), zc(4), BigMatrix::from_i64_rows(&[&[2]])).unwrap()
    }

    #[test]
    fn pushout_of_doubling_along_itself() {
        let f = doubling();
        let po = pushout(&f, &f);
        assert!(compose(&po.leg_left, &f).equals(&compose(&po.leg_right, &f)));
        assert_eq!(po.apex.canonical_form().to_string(), "Z/2 + Z/4");
        assert!(is_pushout_square(&f, &f, &po.leg_left, &po.leg_right).unwrap());
    }

    #[test]
    fn pushout_along_identity_is_the_map_itself() {
        let f = doubling();
        let ida = FpMorphism::identity(f.dom());
        let idb = FpMorphism::identity(f.cod());
        assert!(is_pushout_square(&f, &ida, &idb, &f).unwrap());
    }

    #[test]
    fn pushout_from_zero_is_coproduct() {
        let zero = FpModule::zero(Ring::Z);
        let to_b = FpMorphism::zero_morphism(&zero, &zc(2));
        let to_c = FpMorphism::zero_morphism(&zero, &zc(4));
        let po = pushout(&to_b, &to_c);
        let (sum, _, _) = coproduct(&zc(2), &zc(4));
        assert_eq!(po.apex.canonical_form(), sum.canonical_form());
    }

    #[test]
    fn mediator_is_unique_and_commutes() {
        let f = doubling();
        let po = pushout(&f, &f);
        // cocone into Z/4: both legs the identity of Z/4
        let u = FpMorphism::identity(&zc(4));
        let med = po.mediator(&u, &u).unwrap();
        assert!(compose(&med, &po.leg_left).equals(&u));
        assert!(compose(&med, &po.leg_right).equals(&u));
        // unique among all maps out of the apex
        let all = hom_enumerate(&po.apex, &zc(4)).unwrap();
        let commuting: Vec<_> = all
            .iter()
            .filter(|h| {
                compose(h, &po.leg_left).equals(&u) && compose(h, &po.leg_right).equals(&u)
            })
            .collect();
        assert_eq!(commuting.len(), 1);
        assert!(commuting[0].equals(&med));
        // non-commuting cocone rejected
        let bad = po.mediator(&u, &FpMorphism::zero_morphism(&zc(4), &zc(4)));
        assert!(matches!(bad, Err(CoreError::NonCommutingSquare(_))));
    }

    #[test]
    fn pullback_of_reductions_mod_two() {
        let red = FpMorphism::new(zc(4), zc(2), BigMatrix::from_i64_rows(&[&[1]])).unwrap();
        let pb = pullback(&red, &red);
        assert_eq!(pb.apex.canonical_form().to_string(), "Z/2 + Z/4");
        assert!(compose(&red, &pb.proj_left).equals(&compose(&red, &pb.proj_right)));
        // the diagonal of Z/4 factors through the pullback
        let id4 = FpMorphism::identity(&zc(4));
        let med = pb.mediator(&id4, &id4).unwrap();
        assert!(compose(&pb.proj_left, &med).equals(&id4));
        assert!(compose(&pb.proj_right, &med).equals(&id4));
    }

    #[test]
    fn non_pushout_corner_is_rejected() {
        // commuting square over the oversized corner Z/8 is not a pushout
        let f = doubling();
        let ida = FpMorphism::identity(f.dom());
        let p = FpMorphism::new(zc(4), zc(8), BigMatrix::from_i64_rows(&[&[2]])).unwrap();
        let q = FpMorphism::new(zc(2), zc(8), BigMatrix::from_i64_rows(&[&[4]])).unwrap();
        assert!(!is_pushout_square(&f, &ida, &p, &q).unwrap());
        // non-commuting squares are a typed error
        let bad = is_pushout_square(&f, &ida, &p, &FpMorphism::zero_morphism(&zc(2), &zc(8)));
        assert!(matches!(bad, Err(CoreError::NonCommutingSquare(_))));
    }

    #[test]
    fn finite_colimit_agrees_with_pushout() {
        let f = doubling();
        let mut d = Diagram::new(vec![zc(2), zc(4), zc(4)]);
        d.add_arrow(0, 1, f.clone());
        d.add_arrow(0, 2, f.clone());
        let colim = finite_colimit(&d);
        let po = pushout(&f, &f);
        assert_eq!(colim.object.canonical_form(), po.apex.canonical_form());
        // the pushout cocone factors through the colimit by an iso
        let cocone = vec![
            compose(&po.leg_left, &f),
            po.leg_left.clone(),
            po.leg_right.clone(),
        ];
        let med = colim.mediator(&cocone).unwrap();
        assert!(med.is_iso());
    }

    #[test]
    fn chain_colimits() {
        let id = FpMorphism::identity(&zc(6));
        let c = chain_colimit(&[id.clone()]).unwrap();
        assert_eq!(c.object, zc(6));
        assert!(c.legs[0].equals(&id));
        let f01 = FpMorphism::new(zc(2), zc(4), BigMatrix::from_i64_rows(&[&[2]])).unwrap();
        let f12 = FpMorphism::new(zc(4), zc(8), BigMatrix::from_i64_rows(&[&[2]])).unwrap();
        let c2 = chain_colimit(&[f01.clone(), f12.clone()]).unwrap();
        assert_eq!(c2.object, zc(8));
        assert!(c2.legs[0].equals(&compose(&f12, &f01)));
        assert!(c2.legs[2].equals(&FpMorphism::identity(&zc(8))));
        // mismatched chain rejected
        assert!(chain_colimit(&[f12, f01]).is_err());
    }
}
