//! Axiom checkers for lifting pairs over a finite universe, plus the
//! exactness properties of module categories the staged constructions lean
//! on: pushout stability of monomorphisms, effective unions, and the
//! splitting of injectivity into its finitely presented and pure halves.
//!
//! Every failing verdict carries a replayable witness: a commuting square
//! with no diagonal, a morphism sitting on the wrong side of a membership
//! test, or a concrete pullback-pushout diagram whose induced map is not
//! mono. Class equalities are checked on the universe's morphisms only;
//! that restriction and any search bounds appear in the report.

use crate::classes::{
    box_relation, ch_membership, po_closure_membership, re_membership, solved_square_lattice,
    square_group, unique_box_relation, Membership, MorphismClass, Universe,
};
use crate::error::{CoreError, Result};
use crate::exactlin::{lattice_contained, BigMatrix};
use crate::fpmod::{
    are_isomorphic_arrows, compose, pullback, pushout, submodule_inclusions, FpModule, FpMorphism,
};
use crate::lifting::{
    is_injective_wrt, is_pure_mono, lifting_diagonals, LiftingSquare, SquareSource,
};
use crate::soa::FactorizationTrace;
use serde::Serialize;
use std::collections::BTreeMap;

/// Produces the two-part factorization `f = right ∘ left` the axiom checks
/// consume. For retract-closed generated classes the left part is also
/// trusted to be a composite of pushouts of the class generators; the staged
/// engine guarantees that and its traces carry the certificate.
pub type Factorizer<'a> = dyn FnMut(&FpMorphism) -> Result<(FpMorphism, FpMorphism)> + 'a;

/// How membership in one side of a candidate pair is decided.
///
/// A side given by a finite list only makes sense up to arrow isomorphism,
/// and polar sides are decided by lifting against the generators, which
/// stays meaningful for maps whose endpoints leave the universe (factor
/// parts routinely do).
pub enum SideSpec<'a> {
    /// Every morphism.
    All,
    /// The isomorphisms.
    Isos,
    /// The listed maps, up to arrow isomorphism.
    Listed(&'a MorphismClass),
    /// The closure of the generators described by the class flags: pushouts,
    /// bounded chains of pushouts, retracts of those.
    Generated(&'a MorphismClass),
    /// Maps lifting on the right against every generator, in the diagonal
    /// sense of the surrounding check.
    RightPolarOf(&'a MorphismClass),
    /// Maps lifting on the left against every generator.
    LeftPolarOf(&'a MorphismClass),
}

impl SideSpec<'_> {
    fn describe(&self) -> String {
        match self {
            SideSpec::All => "all morphisms".to_string(),
            SideSpec::Isos => "isomorphisms".to_string(),
            SideSpec::Listed(c) => format!(
                "{} listed morphism(s), up to arrow isomorphism",
                c.generators().len()
            ),
            SideSpec::Generated(c) => {
                let flags = c.closure();
                let mut parts = Vec::new();
                if flags.po {
                    parts.push("pushouts".to_string());
                }
                if let Some(k) = flags.ch {
                    parts.push(format!("chains of length <= {k}"));
                }
                if flags.re {
                    parts.push("retracts".to_string());
                }
                if parts.is_empty() {
                    parts.push("no closure".to_string());
                }
                format!(
                    "{} of {} generator(s)",
                    parts.join(" + "),
                    c.generators().len()
                )
            }
            SideSpec::RightPolarOf(c) => format!(
                "right lifting against {} generator(s)",
                c.generators().len()
            ),
            SideSpec::LeftPolarOf(c) => {
                format!("left lifting against {} generator(s)", c.generators().len())
            }
        }
    }
}

/// A commuting square recorded as evidence: `right ∘ top = bottom ∘ left`
/// with no diagonal (or, for unique-diagonal checks, without a unique one).
#[derive(Clone, Debug, Serialize)]
pub struct SquareWitness {
    pub left: FpMorphism,
    pub right: FpMorphism,
    pub top: FpMorphism,
    pub bottom: FpMorphism,
}

impl SquareWitness {
    /// Re-run the diagonal search; true when the square still certifies the
    /// failure it was recorded for.
    pub fn still_fails(&self, unique: bool) -> bool {
        let Ok(square) = LiftingSquare::new(
            self.left.clone(),
            self.right.clone(),
            self.top.clone(),
            self.bottom.clone(),
        ) else {
            return false;
        };
        let Ok(diagonals) = lifting_diagonals(&square) else {
            return false;
        };
        let solved = if unique {
            !diagonals.is_empty() && diagonals.is_unique()
        } else {
            !diagonals.is_empty()
        };
        !solved
    }
}

/// One witnessed failure inside a [`WfsReport`].
#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WfsCounterexample {
    /// Lifts on the left against the whole right class but failed the left
    /// membership test.
    LeftLifterNotMember { map: FpMorphism },
    /// Lifts on the right against the whole left class but failed the right
    /// membership test.
    RightLifterNotMember { map: FpMorphism },
    /// A claimed member pair with a square admitting no (unique) diagonal.
    SquareWithoutDiagonal { square: SquareWitness },
    /// A bounded membership search came back inconclusive, so the class
    /// equalities could not be decided.
    MembershipUndecided { map: FpMorphism, side: String },
    /// The factorizer failed or its parts do not compose to the input.
    FactorizationBroken { map: FpMorphism, reason: String },
    /// A factor part landed outside its class.
    FactorPartNotMember {
        map: FpMorphism,
        part: FpMorphism,
        side: String,
    },
}

/// Outcome of checking a candidate pair against the three axioms: the left
/// class equals the left polar of the right class, the right class equals
/// the right polar of the left class, and every universe morphism factors
/// as a right-class map after a left-class map.
#[derive(Debug, Serialize)]
pub struct WfsReport {
    pub left_class: String,
    pub right_class: String,
    /// True when diagonals were additionally required to be unique.
    pub unique_diagonals: bool,
    pub morphisms_checked: usize,
    pub left_polar_ok: bool,
    pub right_polar_ok: bool,
    pub factorization_ok: bool,
    pub counterexamples: Vec<WfsCounterexample>,
    pub bounds: String,
}

impl WfsReport {
    pub fn passed(&self) -> bool {
        self.left_polar_ok && self.right_polar_ok && self.factorization_ok
    }

    pub fn to_markdown(&self) -> String {
        let verdict = |ok: bool| if ok { "pass" } else { "fail" };
        let mut out = String::new();
        out.push_str("## lifting pair check\n");
        out.push_str(&format!("- left class: {}\n", self.left_class));
        out.push_str(&format!("- right class: {}\n", self.right_class));
        out.push_str(&format!(
            "- diagonal requirement: {}\n",
            if self.unique_diagonals { "unique" } else { "some" }
        ));
        out.push_str(&format!("- scope: {}\n", self.bounds));
        out.push_str(&format!(
            "- left polar equality: {}\n",
            verdict(self.left_polar_ok)
        ));
        out.push_str(&format!(
            "- right polar equality: {}\n",
            verdict(self.right_polar_ok)
        ));
        out.push_str(&format!(
            "- factorizations: {}\n",
            verdict(self.factorization_ok)
        ));
        out.push_str(&format!(
            "- counterexamples: {}\n",
            self.counterexamples.len()
        ));
        out.push_str(&format!("- overall: {}\n", verdict(self.passed())));
        out
    }
}

struct CachedFactorizer<'a, 'b> {
    inner: &'a mut Factorizer<'b>,
    seen: BTreeMap<String, (FpMorphism, FpMorphism)>,
}

impl CachedFactorizer<'_, '_> {
    fn factor(&mut self, f: &FpMorphism) -> Result<(FpMorphism, FpMorphism)> {
        let key = serde_json::to_string(f)
            .map_err(|e| CoreError::InvalidInput(format!("unserializable morphism: {e}")))?;
        if let Some(hit) = self.seen.get(&key) {
            return Ok(hit.clone());
        }
        let pair = (self.inner)(f)?;
        self.seen.insert(key, pair.clone());
        Ok(pair)
    }
}

fn same_map(x: &FpMorphism, y: &FpMorphism) -> bool {
    x.dom() == y.dom() && x.cod() == y.cod() && x.equals(y)
}

/// Is `f` one of the listed maps, up to arrow isomorphism? Exact hits are
/// tried first since the lists usually come from the same enumeration as
/// the candidates.
fn listed_membership(f: &FpMorphism, class: &MorphismClass) -> Result<bool> {
    for g in class.generators() {
        if same_map(f, g) {
            return Ok(true);
        }
    }
    for g in class.generators() {
        if are_isomorphic_arrows(f, g)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Membership in the closure described by the class flags. `None` means the
/// bounded search came back inconclusive.
///
/// Retract-closed classes with a chain or pushout flag are decided through
/// the factorizer: `f` belongs exactly when it is a retract of the chain
/// part of its own factorization, which one diagonal search settles. The
/// refusal branch is only sound when the residual part lifts on the right
/// against every generator, and that is verified before refusing.
fn generated_membership(
    f: &FpMorphism,
    class: &MorphismClass,
    u: &Universe,
    fac: &mut CachedFactorizer,
) -> Result<Option<bool>> {
    let flags = class.closure();
    if flags.compose {
        return Err(CoreError::InvalidInput(
            "plain composition closure has no membership search; use a chain bound".to_string(),
        ));
    }
    match (flags.re, flags.ch, flags.po) {
        (true, None, false) => Ok(Some(re_membership(f, class, u)?.is_member())),
        (true, _, _) => {
            let (e_part, m_part) = match fac.factor(f) {
                Ok(pair) => pair,
                Err(CoreError::Truncated(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            if e_part.dom() != f.dom()
                || m_part.cod() != f.cod()
                || !compose(&m_part, &e_part).equals(f)
            {
                return Err(CoreError::InvalidInput(
                    "factorizer output does not compose to its input".to_string(),
                ));
            }
            let square = LiftingSquare::new(
                f.clone(),
                m_part.clone(),
                e_part.clone(),
                FpMorphism::identity(f.cod()),
            )?;
            if !lifting_diagonals(&square)?.is_empty() {
                return Ok(Some(true));
            }
            if class.generators().iter().all(|g| box_relation(g, &m_part)) {
                return Ok(Some(false));
            }
            Ok(None)
        }
        (false, Some(k), _) => Ok(match ch_membership(f, class, u, k)? {
            Membership::Member { .. } => Some(true),
            Membership::NotMember => Some(false),
            Membership::Unknown { .. } => None,
        }),
        (false, None, true) => Ok(Some(po_closure_membership(f, class, u)?.is_member())),
        (false, None, false) => Ok(Some(listed_membership(f, class)?)),
    }
}

fn side_membership(
    f: &FpMorphism,
    spec: &SideSpec,
    u: &Universe,
    fac: &mut CachedFactorizer,
    rel: &dyn Fn(&FpMorphism, &FpMorphism) -> bool,
) -> Result<Option<bool>> {
    match spec {
        SideSpec::All => Ok(Some(true)),
        SideSpec::Isos => Ok(Some(f.is_iso())),
        SideSpec::Listed(c) => Ok(Some(listed_membership(f, c)?)),
        SideSpec::Generated(c) => generated_membership(f, c, u, fac),
        SideSpec::RightPolarOf(c) => Ok(Some(c.generators().iter().all(|g| rel(g, f)))),
        SideSpec::LeftPolarOf(c) => Ok(Some(c.generators().iter().all(|g| rel(f, g)))),
    }
}

/// Extract one commuting square from `p` to `i` without a (unique) diagonal.
/// The squares form a group and the solvable ones a sublattice, so a failing
/// lattice generator is a concrete witness; when every square is solvable
/// but some diagonal is not unique, the zero square carries the redundancy.
fn lifting_failure_square(p: &FpMorphism, i: &FpMorphism, unique: bool) -> Option<SquareWitness> {
    let solved = solved_square_lattice(p, i);
    let len_u = p.dom().generators() * i.dom().generators();
    for g in &square_group(p, i) {
        if !lattice_contained(std::slice::from_ref(g), &solved, None) {
            let top = FpMorphism::expect_new(
                p.dom().clone(),
                i.dom().clone(),
                BigMatrix::from_vectorized(i.dom().generators(), p.dom().generators(), &g[..len_u]),
            );
            let bottom = FpMorphism::expect_new(
                p.cod().clone(),
                i.cod().clone(),
                BigMatrix::from_vectorized(i.cod().generators(), p.cod().generators(), &g[len_u..]),
            );
            return Some(SquareWitness {
                left: p.clone(),
                right: i.clone(),
                top,
                bottom,
            });
        }
    }
    if unique && !unique_box_relation(p, i) {
        return Some(SquareWitness {
            left: p.clone(),
            right: i.clone(),
            top: FpMorphism::zero_morphism(p.dom(), i.dom()),
            bottom: FpMorphism::zero_morphism(p.cod(), i.cod()),
        });
    }
    None
}

fn polar_pair_check(
    left: &SideSpec,
    right: &SideSpec,
    u: &Universe,
    factorizer: &mut Factorizer,
    unique: bool,
) -> Result<WfsReport> {
    let maps = u.all_morphisms()?;
    let rel = |p: &FpMorphism, i: &FpMorphism| {
        if unique {
            unique_box_relation(p, i)
        } else {
            box_relation(p, i)
        }
    };
    let mut fac = CachedFactorizer {
        inner: factorizer,
        seen: BTreeMap::new(),
    };
    let mut counterexamples = Vec::new();
    let mut left_in = Vec::with_capacity(maps.len());
    let mut right_in = Vec::with_capacity(maps.len());
    let mut undecided = false;
    for f in &maps {
        for (side, spec, store) in [
            ("left", left, &mut left_in),
            ("right", right, &mut right_in),
        ] {
            match side_membership(f, spec, u, &mut fac, &rel)? {
                Some(b) => store.push(b),
                None => {
                    undecided = true;
                    counterexamples.push(WfsCounterexample::MembershipUndecided {
                        map: f.clone(),
                        side: side.to_string(),
                    });
                    store.push(false);
                }
            }
        }
    }
    let left_members: Vec<&FpMorphism> = maps
        .iter()
        .enumerate()
        .filter(|(i, _)| left_in[*i])
        .map(|(_, f)| f)
        .collect();
    let right_members: Vec<&FpMorphism> = maps
        .iter()
        .enumerate()
        .filter(|(i, _)| right_in[*i])
        .map(|(_, f)| f)
        .collect();

    // the left class must be exactly the maps lifting on the left against
    // the right class
    let mut left_polar_ok = !undecided;
    for (idx, f) in maps.iter().enumerate() {
        let lifts = right_members.iter().all(|i| rel(f, i));
        if lifts && !left_in[idx] {
            left_polar_ok = false;
            counterexamples.push(WfsCounterexample::LeftLifterNotMember { map: f.clone() });
        } else if !lifts && left_in[idx] {
            left_polar_ok = false;
            let partner = right_members
                .iter()
                .find(|i| !rel(f, i))
                .expect("a failing partner exists");
            let square = lifting_failure_square(f, partner, unique)
                .expect("a failed lifting relation yields a square");
            counterexamples.push(WfsCounterexample::SquareWithoutDiagonal { square });
        }
    }

    // and dually for the right class
    let mut right_polar_ok = !undecided;
    for (idx, i) in maps.iter().enumerate() {
        let lifts = left_members.iter().all(|e| rel(e, i));
        if lifts && !right_in[idx] {
            right_polar_ok = false;
            counterexamples.push(WfsCounterexample::RightLifterNotMember { map: i.clone() });
        } else if !lifts && right_in[idx] {
            right_polar_ok = false;
            let partner = left_members
                .iter()
                .find(|e| !rel(e, i))
                .expect("a failing partner exists");
            let square = lifting_failure_square(partner, i, unique)
                .expect("a failed lifting relation yields a square");
            counterexamples.push(WfsCounterexample::SquareWithoutDiagonal { square });
        }
    }

    // every universe morphism must factor through the pair
    let mut factorization_ok = true;
    for f in &maps {
        let (e_part, m_part) = match fac.factor(f) {
            Ok(pair) => pair,
            Err(CoreError::Truncated(_)) => {
                factorization_ok = false;
                counterexamples.push(WfsCounterexample::FactorizationBroken {
                    map: f.clone(),
                    reason: "stage budget exhausted".to_string(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        if e_part.dom() != f.dom()
            || m_part.cod() != f.cod()
            || e_part.cod() != m_part.dom()
            || !compose(&m_part, &e_part).equals(f)
        {
            factorization_ok = false;
            counterexamples.push(WfsCounterexample::FactorizationBroken {
                map: f.clone(),
                reason: "parts do not compose to the input".to_string(),
            });
            continue;
        }
        for (side, spec, part) in [("left", left, &e_part), ("right", right, &m_part)] {
            match side_membership(part, spec, u, &mut fac, &rel)? {
                Some(true) => {}
                Some(false) => {
                    factorization_ok = false;
                    counterexamples.push(WfsCounterexample::FactorPartNotMember {
                        map: f.clone(),
                        part: part.clone(),
                        side: side.to_string(),
                    });
                }
                None => {
                    factorization_ok = false;
                    counterexamples.push(WfsCounterexample::MembershipUndecided {
                        map: part.clone(),
                        side: format!("{side} factor"),
                    });
                }
            }
        }
    }

    Ok(WfsReport {
        left_class: left.describe(),
        right_class: right.describe(),
        unique_diagonals: unique,
        morphisms_checked: maps.len(),
        left_polar_ok,
        right_polar_ok,
        factorization_ok,
        counterexamples,
        bounds: format!(
            "{} morphisms among the {} objects of order <= {}",
            maps.len(),
            u.objects().len(),
            u.order_bound()
        ),
    })
}

/// Check the three axioms of a weak factorization pair on a finite universe:
/// each side is the polar of the other under the diagonal-filling relation,
/// and the factorizer splits every universe morphism into a certified
/// left-class part followed by a right-class part.
pub fn check_wfs_axioms(
    left: &SideSpec,
    right: &SideSpec,
    u: &Universe,
    factorizer: &mut Factorizer,
) -> Result<WfsReport> {
    polar_pair_check(left, right, u, factorizer, false)
}

/// Same as [`check_wfs_axioms`] with diagonals required to be unique, the
/// defining condition of an orthogonal factorization pair.
pub fn check_factorization_system(
    left: &SideSpec,
    right: &SideSpec,
    u: &Universe,
    factorizer: &mut Factorizer,
) -> Result<WfsReport> {
    polar_pair_check(left, right, u, factorizer, true)
}

/// The full diagram built by [`effective_unions_check`], kept as a witness.
#[derive(Clone, Debug, Serialize)]
pub struct UnionDiagram {
    /// `B0 -> B`.
    pub left: FpMorphism,
    /// `C -> B`.
    pub right: FpMorphism,
    pub intersection: FpModule,
    /// `intersection -> B0`.
    pub into_left: FpMorphism,
    /// `intersection -> C`.
    pub into_right: FpMorphism,
    pub union: FpModule,
    /// `B0 -> union`.
    pub left_leg: FpMorphism,
    /// `C -> union`.
    pub right_leg: FpMorphism,
    /// The induced map `union -> B` whose monicity is the point.
    pub induced: FpMorphism,
}

/// Verdict on one pair of subobjects.
#[derive(Debug, Serialize)]
pub struct UnionReport {
    pub diagram: UnionDiagram,
    pub induced_mono: bool,
    /// Present in the pure variant only.
    pub induced_pure: Option<bool>,
    pub purity: Option<String>,
}

impl UnionReport {
    pub fn passed(&self) -> bool {
        self.induced_mono && self.induced_pure != Some(false)
    }
}

fn purity_description(source: &SquareSource) -> String {
    match source {
        SquareSource::Exhaustive { max_order } => format!(
            "pure = upper diagonals against every map among modules of order <= {max_order}"
        ),
        SquareSource::FreeSystems { max_rank } => {
            format!("pure = upper diagonals against every free system of rank <= {max_rank}")
        }
    }
}

/// Intersect two subobjects by pullback, unite them by pushout, and test
/// whether the induced map to the common codomain is mono (and pure, when a
/// square source for purity is supplied).
pub fn effective_unions_check(
    left: &FpMorphism,
    right: &FpMorphism,
    purity: Option<&SquareSource>,
) -> Result<UnionReport> {
    if left.cod() != right.cod() {
        return Err(CoreError::InvalidInput(
            "subobjects of different modules have no union".to_string(),
        ));
    }
    if !left.is_mono() {
        return Err(CoreError::NotMono("left input to the union check".to_string()));
    }
    if !right.is_mono() {
        return Err(CoreError::NotMono(
            "right input to the union check".to_string(),
        ));
    }
    let pb = pullback(left, right);
    let po = pushout(&pb.proj_left, &pb.proj_right);
    let induced = po.mediator(left, right)?;
    let induced_mono = induced.is_mono();
    let induced_pure = match purity {
        Some(source) => Some(is_pure_mono(&induced, source)?),
        None => None,
    };
    Ok(UnionReport {
        diagram: UnionDiagram {
            left: left.clone(),
            right: right.clone(),
            intersection: pb.apex.clone(),
            into_left: pb.proj_left,
            into_right: pb.proj_right,
            union: po.apex.clone(),
            left_leg: po.leg_left,
            right_leg: po.leg_right,
            induced,
        },
        induced_mono,
        induced_pure,
        purity: purity.map(purity_description),
    })
}

/// Sweep verdict over every pair of subobjects in a universe.
#[derive(Debug, Serialize)]
pub struct UnionSweep {
    pub pairs_checked: u64,
    pub failures: Vec<UnionReport>,
    pub bounds: String,
}

impl UnionSweep {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_markdown(&self) -> String {
        format!(
            "## effective unions\n- scope: {}\n- pairs checked: {}\n- failures: {}\n- overall: {}\n",
            self.bounds,
            self.pairs_checked,
            self.failures.len(),
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

/// Run [`effective_unions_check`] on every pair of subobject inclusions of
/// every universe object. In the pure variant only pairs of pure subobjects
/// are in scope, matching the statement being tested.
pub fn effective_unions_sweep(u: &Universe, purity: Option<&SquareSource>) -> Result<UnionSweep> {
    let mut pairs_checked = 0u64;
    let mut failures = Vec::new();
    for b in u.objects() {
        let inclusions = submodule_inclusions(b)?;
        let in_scope: Vec<bool> = match purity {
            Some(source) => inclusions
                .iter()
                .map(|i| is_pure_mono(i, source))
                .collect::<Result<_>>()?,
            None => vec![true; inclusions.len()],
        };
        for (xi, x) in inclusions.iter().enumerate() {
            if !in_scope[xi] {
                continue;
            }
            for (yi, y) in inclusions.iter().enumerate() {
                if !in_scope[yi] {
                    continue;
                }
                let report = effective_unions_check(x, y, purity)?;
                pairs_checked += 1;
                if !report.passed() {
                    failures.push(report);
                }
            }
        }
    }
    Ok(UnionSweep {
        pairs_checked,
        failures,
        bounds: format!(
            "subobject pairs across {} objects of order <= {}{}",
            u.objects().len(),
            u.order_bound(),
            match purity {
                Some(source) => format!("; {}", purity_description(source)),
                None => String::new(),
            }
        ),
    })
}

/// A pushout that destroyed monicity: replay by pushing `mono` out along
/// `along` and checking the far leg.
#[derive(Clone, Debug, Serialize)]
pub struct TransferWitness {
    pub mono: FpMorphism,
    pub along: FpMorphism,
    pub pushed: FpMorphism,
}

/// Verdict of the pushout-stability sweep.
#[derive(Debug, Serialize)]
pub struct TransferReport {
    pub pushouts_checked: u64,
    pub failures: Vec<TransferWitness>,
    pub bounds: String,
}

impl TransferReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_markdown(&self) -> String {
        format!(
            "## pushout stability of monos\n- scope: {}\n- pushouts checked: {}\n- failures: {}\n- overall: {}\n",
            self.bounds,
            self.pushouts_checked,
            self.failures.len(),
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

/// Push every subobject inclusion of every universe object out along every
/// map from its submodule into the universe, and check that the pushed-out
/// map is still mono. Every mono is isomorphic under its domain to such an
/// inclusion, so the sweep is exhaustive up to that reparametrization.
pub fn transferability_check(u: &Universe) -> Result<TransferReport> {
    let mut checked = 0u64;
    let mut failures = Vec::new();
    for b in u.objects() {
        for incl in submodule_inclusions(b)? {
            if !u.contains_iso_class(incl.dom()) {
                continue;
            }
            for c in u.objects() {
                for along in crate::fpmod::hom_enumerate(incl.dom(), c)? {
                    let po = pushout(&along, &incl);
                    checked += 1;
                    if !po.leg_left.is_mono() {
                        failures.push(TransferWitness {
                            mono: incl.clone(),
                            along,
                            pushed: po.leg_left,
                        });
                    }
                }
            }
        }
    }
    Ok(TransferReport {
        pushouts_checked: checked,
        failures,
        bounds: format!(
            "inclusions into {} objects of order <= {}, pushed along all maps",
            u.objects().len(),
            u.order_bound()
        ),
    })
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonoChainFailure {
    /// The trace did not replay.
    UnverifiedTrace { index: usize },
    /// A single stage map of a mono-generated trace is not mono.
    NonMonoLink { index: usize, map: FpMorphism },
    /// The composed chain part of a mono-generated trace is not mono.
    NonMonoComposite { index: usize, map: FpMorphism },
}

/// Verdict on a batch of traces: wherever all generators are mono, the
/// stage maps and their composite must be mono too.
#[derive(Debug, Serialize)]
pub struct MonoChainReport {
    pub traces_checked: usize,
    /// Traces whose generators were all mono; the others carry no claim.
    pub applicable: usize,
    pub failures: Vec<MonoChainFailure>,
}

impl MonoChainReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn mono_chain_check(traces: &[FactorizationTrace]) -> MonoChainReport {
    let mut failures = Vec::new();
    let mut applicable = 0usize;
    for (index, trace) in traces.iter().enumerate() {
        if !trace.verify() {
            failures.push(MonoChainFailure::UnverifiedTrace { index });
            continue;
        }
        if !trace
            .config
            .generators
            .generators()
            .iter()
            .all(|g| g.is_mono())
        {
            continue;
        }
        applicable += 1;
        for link in &trace.stage_maps {
            if !link.is_mono() {
                failures.push(MonoChainFailure::NonMonoLink {
                    index,
                    map: link.clone(),
                });
            }
        }
        if !trace.f_star.is_mono() {
            failures.push(MonoChainFailure::NonMonoComposite {
                index,
                map: trace.f_star.clone(),
            });
        }
    }
    MonoChainReport {
        traces_checked: traces.len(),
        applicable,
        failures,
    }
}

/// One object's line in the injectivity decomposition.
#[derive(Debug, Serialize)]
pub struct DecompositionRow {
    pub object: FpModule,
    /// Injective against every mono between universe objects.
    pub injective: bool,
    /// Injective against every mono with finitely presented endpoints. The
    /// universes here consist of finitely presented modules, so this is the
    /// same quantifier as `injective` and the field records that fact.
    pub fp_injective: bool,
    /// Injective against every pure mono between universe objects.
    pub pure_injective: bool,
    /// Whether `injective` agrees with `fp_injective && pure_injective`.
    pub equivalent: bool,
    /// A mono the object fails to be injective against, when one exists.
    pub witness: Option<FpMorphism>,
}

/// Verdict of [`injectivity_decomposition_check`].
#[derive(Debug, Serialize)]
pub struct DecompositionReport {
    pub rows: Vec<DecompositionRow>,
    pub purity: String,
    /// Inclusions where splitness and the square-based purity test disagree;
    /// expected empty, recorded if the cross-check ever fails.
    pub purity_disagreements: Vec<FpMorphism>,
    pub all_equivalent: bool,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.all_equivalent && self.purity_disagreements.is_empty()
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("## injectivity decomposition\n");
        out.push_str(&format!("- purity notion: {}\n", self.purity));
        for row in &self.rows {
            out.push_str(&format!(
                "- {}: injective {}, fp-injective {}, pure-injective {}, decomposition {}\n",
                row.object.canonical_form(),
                row.injective,
                row.fp_injective,
                row.pure_injective,
                if row.equivalent { "holds" } else { "FAILS" }
            ));
        }
        out.push_str(&format!(
            "- overall: {}\n",
            if self.passed() { "pass" } else { "fail" }
        ));
        out
    }
}

/// For every universe object, compare plain injectivity with the
/// conjunction of its finitely presented and pure halves.
///
/// In a finite module universe every pure mono splits, so objects are
/// always pure-injective and the comparison degenerates to an identity;
/// the report keeps all three columns and the purity cross-check anyway,
/// so the degeneracy is visible rather than assumed.
pub fn injectivity_decomposition_check(u: &Universe) -> Result<DecompositionReport> {
    let mut monos = Vec::new();
    for b in u.objects() {
        for incl in submodule_inclusions(b)? {
            if u.contains_iso_class(incl.dom()) {
                monos.push(incl);
            }
        }
    }
    let source = SquareSource::FreeSystems { max_rank: 2 };
    let cross_check = u.ring().modulus().is_some();
    let mut split_flags = Vec::with_capacity(monos.len());
    let mut purity_disagreements = Vec::new();
    for m in &monos {
        let split = m.is_split_mono().is_some();
        if cross_check && is_pure_mono(m, &source)? != split {
            purity_disagreements.push(m.clone());
        }
        split_flags.push(split);
    }
    let mut rows = Vec::new();
    for k in u.objects() {
        let mut injective = true;
        let mut witness = None;
        for m in &monos {
            if !is_injective_wrt(k, m)? {
                injective = false;
                witness = Some(m.clone());
                break;
            }
        }
        // the same quantifier: every mono here is finitely presented
        let fp_injective = injective;
        let mut pure_injective = true;
        for (m, split) in monos.iter().zip(&split_flags) {
            if *split && !is_injective_wrt(k, m)? {
                pure_injective = false;
                break;
            }
        }
        rows.push(DecompositionRow {
            object: k.clone(),
            injective,
            fp_injective,
            pure_injective,
            equivalent: injective == (fp_injective && pure_injective),
            witness,
        });
    }
    let all_equivalent = rows.iter().all(|r| r.equivalent);
    Ok(DecompositionReport {
        rows,
        purity: format!(
            "split monos, cross-checked against {}",
            purity_description(&source)
        ),
        purity_disagreements,
        all_equivalent,
    })
}
