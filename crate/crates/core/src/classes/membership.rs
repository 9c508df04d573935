//! Certified membership in the closure of a generated morphism class:
//! pushouts of generators, bounded chains of such pushouts, and retracts of
//! chain composites. Every positive answer carries a certificate that
//! re-verifies independently of the search that found it.

use crate::error::{CoreError, Result};
use crate::exactlin::BigMatrix;
use crate::fpmod::{
    compose, distinct_solutions, find_under_isomorphism, hom_enumerate, image_factorization,
    is_pushout_square, morphism_solutions, pushout, FpModule, FpMorphism, HomConstraint,
};
use serde::Serialize;

use super::types::MorphismClass;
use super::universe::Universe;

/// Outcome of a bounded membership search. `NotMember` is only returned when
/// the search space was exhausted; a bounded search that comes up empty
/// reports `Unknown` with the bound it ran under.
#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Membership<C> {
    Member { certificate: C },
    NotMember,
    Unknown { bound: String },
}

impl<C> Membership<C> {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }

    pub fn certificate(&self) -> Option<&C> {
        match self {
            Membership::Member { certificate } => Some(certificate),
            _ => None,
        }
    }
}

/// Exhibits a map `f: A -> B` as the pushout of `generator: X -> Y` along
/// `attaching: X -> A`; `top: Y -> B` completes the square.
#[derive(Clone, Serialize)]
pub struct PoCertificate {
    pub generator: FpMorphism,
    pub attaching: FpMorphism,
    pub top: FpMorphism,
}

impl PoCertificate {
    /// Re-check the certified square against an independent pushout
    /// computation.
    pub fn verify(&self, f: &FpMorphism) -> bool {
        if self.attaching.dom() != self.generator.dom()
            || self.attaching.cod() != f.dom()
            || self.top.dom() != self.generator.cod()
            || self.top.cod() != f.cod()
        {
            return false;
        }
        matches!(
            is_pushout_square(&self.attaching, &self.generator, f, &self.top),
            Ok(true)
        )
    }
}

/// Is `f` a pushout of one of the class generators? The attaching maps range
/// over entire finite hom sets, so a miss is definitive.
pub fn po_closure_membership(
    f: &FpMorphism,
    m: &MorphismClass,
    _universe: &Universe,
) -> Result<Membership<PoCertificate>> {
    for gen in m.generators() {
        if gen.dom().ring() != f.dom().ring() {
            continue;
        }
        for d in hom_enumerate(gen.dom(), f.dom())? {
            let po = pushout(&d, gen);
            if po.apex.canonical_form() != f.cod().canonical_form() {
                continue;
            }
            if let Some(phi) = find_under_isomorphism(&po.leg_left, f)? {
                let top = compose(&phi, &po.leg_right);
                let cert = PoCertificate {
                    generator: gen.clone(),
                    attaching: d,
                    top,
                };
                debug_assert!(cert.verify(f));
                return Ok(Membership::Member { certificate: cert });
            }
        }
    }
    Ok(Membership::NotMember)
}

/// One link of a certified chain: the step map together with its pushout
/// certificate.
#[derive(Clone, Serialize)]
pub struct ChStep {
    pub map: FpMorphism,
    pub witness: PoCertificate,
}

/// A factorization of `f` as a bounded chain of pushouts of generators,
/// up to an isomorphism `final_iso` from the chain end onto the codomain.
#[derive(Clone, Serialize)]
pub struct ChCertificate {
    pub steps: Vec<ChStep>,
    pub final_iso: FpMorphism,
}

impl ChCertificate {
    pub fn verify(&self, f: &FpMorphism) -> bool {
        let mut at = f.dom().clone();
        let mut composite = FpMorphism::identity(f.dom());
        for step in &self.steps {
            if step.map.dom() != &at {
                return false;
            }
            if !step.witness.verify(&step.map) {
                return false;
            }
            composite = compose(&step.map, &composite);
            at = step.map.cod().clone();
        }
        if self.final_iso.dom() != &at || !self.final_iso.is_iso() {
            return false;
        }
        compose(&self.final_iso, &composite).equals(f)
    }
}

struct ChainState {
    composite: FpMorphism,
    steps: Vec<ChStep>,
}

struct ChainSearch {
    states: Vec<ChainState>,
    /// Did the search visit every reachable state, as opposed to stopping at
    /// the length bound or skipping oversized pushouts?
    complete: bool,
}

/// All chain-reachable maps out of `start`: composites of at most `k`
/// pushouts of generators, one state per isomorphism class under `start`,
/// in breadth-first order. Intermediate objects are kept inside the universe
/// order bound.
fn chain_states(
    m: &MorphismClass,
    universe: &Universe,
    start: &FpModule,
    k: u64,
) -> Result<ChainSearch> {
    let bound = universe.order_bound();
    let mut states = vec![ChainState {
        composite: FpMorphism::identity(start),
        steps: Vec::new(),
    }];
    let mut skipped_oversized = false;
    let mut saturated = false;
    let mut frontier = 0usize;
    for _ in 0..k {
        let next_frontier = states.len();
        for idx in frontier..next_frontier {
            let current = states[idx].composite.clone();
            let here = current.cod().clone();
            for gen in m.generators() {
                for d in hom_enumerate(gen.dom(), &here)? {
                    let po = pushout(&d, gen);
                    match po.apex.order() {
                        Some(o) if o <= bound => {}
                        _ => {
                            skipped_oversized = true;
                            continue;
                        }
                    }
                    let (_, to, _) = po.apex.reduced();
                    let step_map = compose(&to, &po.leg_left);
                    let step_top = compose(&to, &po.leg_right);
                    let composite = compose(&step_map, &current);
                    let mut seen = false;
                    for s in &states {
                        if crate::fpmod::are_isomorphic_under(&s.composite, &composite)? {
                            seen = true;
                            break;
                        }
                    }
                    if seen {
                        continue;
                    }
                    let mut steps = states[idx].steps.clone();
                    steps.push(ChStep {
                        map: step_map,
                        witness: PoCertificate {
                            generator: gen.clone(),
                            attaching: d,
                            top: step_top,
                        },
                    });
                    states.push(ChainState { composite, steps });
                }
            }
        }
        if states.len() == next_frontier {
            saturated = true;
            break;
        }
        frontier = next_frontier;
    }
    Ok(ChainSearch {
        states,
        complete: saturated && !skipped_oversized,
    })
}

/// Is `f` a composite of at most `k` pushouts of generators? Chains longer
/// than `k` or passing through objects larger than the universe bound are out
/// of reach, so a miss is only "not found".
pub fn ch_membership(
    f: &FpMorphism,
    m: &MorphismClass,
    universe: &Universe,
    k: u64,
) -> Result<Membership<ChCertificate>> {
    let search = chain_states(m, universe, f.dom(), k)?;
    for state in &search.states {
        if let Some(phi) = find_under_isomorphism(&state.composite, f)? {
            let cert = ChCertificate {
                steps: state.steps.clone(),
                final_iso: phi,
            };
            debug_assert!(cert.verify(f));
            return Ok(Membership::Member { certificate: cert });
        }
    }
    if search.complete {
        return Ok(Membership::NotMember);
    }
    Ok(Membership::Unknown {
        bound: format!(
            "chains of length <= {k} through objects of order <= {}",
            universe.order_bound()
        ),
    })
}

/// Exhibits `f: A -> B` as a retract of `through: A -> Z` in the category of
/// maps out of `A`: `section∘f = through`, `retraction∘through = f`, and
/// `retraction∘section = id`.
#[derive(Clone, Serialize)]
pub struct RetractCertificate {
    pub through: FpMorphism,
    pub section: FpMorphism,
    pub retraction: FpMorphism,
}

impl RetractCertificate {
    pub fn verify(&self, f: &FpMorphism) -> bool {
        if self.through.dom() != f.dom()
            || self.section.dom() != f.cod()
            || self.section.cod() != self.through.cod()
            || self.retraction.dom() != self.through.cod()
            || self.retraction.cod() != f.cod()
        {
            return false;
        }
        compose(&self.section, f).equals(&self.through)
            && compose(&self.retraction, &self.through).equals(f)
            && compose(&self.retraction, &self.section)
                .equals(&FpMorphism::identity(f.cod()))
    }
}

/// Search for a retract presentation of `f` through a given map `n` sharing
/// its domain. Enumerates sections, then solves for a retraction.
fn retract_through(f: &FpMorphism, n: &FpMorphism) -> Result<Option<RetractCertificate>> {
    if n.dom() != f.dom() {
        return Ok(None);
    }
    let b = f.cod();
    let z = n.cod();
    let section_sols = morphism_solutions(
        b,
        z,
        &[HomConstraint::plain(
            f.matrix().clone(),
            n.matrix().clone(),
            z,
        )],
    );
    for s in distinct_solutions(b, z, &section_sols)? {
        let wants = vec![
            HomConstraint::plain(n.matrix().clone(), f.matrix().clone(), b),
            HomConstraint::plain(
                s.matrix().clone(),
                BigMatrix::identity(b.generators()),
                b,
            ),
        ];
        let retraction_sols = morphism_solutions(z, b, &wants);
        if let Some(p) = &retraction_sols.particular {
            let r = FpMorphism::expect_new(
                z.clone(),
                b.clone(),
                BigMatrix::from_vectorized(b.generators(), z.generators(), p),
            );
            let cert = RetractCertificate {
                through: n.clone(),
                section: s,
                retraction: r,
            };
            debug_assert!(cert.verify(f));
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// Is `f` a retract, among maps out of its domain, of one of the generators?
/// Sections and retractions are searched exhaustively, so a miss is
/// definitive.
pub fn re_membership(
    f: &FpMorphism,
    n: &MorphismClass,
    _universe: &Universe,
) -> Result<Membership<RetractCertificate>> {
    for gen in n.generators() {
        if let Some(cert) = retract_through(f, gen)? {
            return Ok(Membership::Member { certificate: cert });
        }
    }
    Ok(Membership::NotMember)
}

/// A retract of a certified chain of pushouts of generators.
#[derive(Clone, Serialize)]
pub struct CofCertificate {
    pub chain: ChCertificate,
    pub retract: RetractCertificate,
}

impl CofCertificate {
    pub fn verify(&self, f: &FpMorphism) -> bool {
        self.chain.verify(&self.retract.through) && self.retract.verify(f)
    }
}

/// Is `f` a retract of some composite of at most `k` pushouts of generators?
pub fn cof_membership(
    f: &FpMorphism,
    m: &MorphismClass,
    universe: &Universe,
    k: u64,
) -> Result<Membership<CofCertificate>> {
    let search = chain_states(m, universe, f.dom(), k)?;
    for state in &search.states {
        if let Some(retract) = retract_through(f, &state.composite)? {
            let cert = CofCertificate {
                chain: ChCertificate {
                    steps: state.steps.clone(),
                    final_iso: FpMorphism::identity(state.composite.cod()),
                },
                retract,
            };
            debug_assert!(cert.verify(f));
            return Ok(Membership::Member { certificate: cert });
        }
    }
    if search.complete {
        return Ok(Membership::NotMember);
    }
    Ok(Membership::Unknown {
        bound: format!(
            "retracts of chains of length <= {k} through objects of order <= {}",
            universe.order_bound()
        ),
    })
}

/// Present a mono `f: A -> B` as the pushout of a mono `m` out of the image
/// of a free cover: cover `A` by a free module `F`, image-factorize the
/// composite `F -> B`, and attach the image back onto `A`. The certificate
/// has `f` as its bottom edge and the identity on `B` as its right edge.
pub fn lambda_g_sandwich_witness(f: &FpMorphism) -> Result<PoCertificate> {
    if !f.is_mono() {
        return Err(CoreError::NotMono(
            "sandwich witness requires a mono".to_string(),
        ));
    }
    let a = f.dom();
    let cover = FpModule::free_module(a.ring().clone(), a.generators());
    let q = FpMorphism::new(
        cover.clone(),
        a.clone(),
        BigMatrix::identity(a.generators()),
    )?;
    let through = compose(f, &q);
    let (_e, m) = image_factorization(&through);
    // the image is presented on the cover generators, so the cover map also
    // attaches the image onto the original domain; monicity of f makes it
    // well defined
    let d = FpMorphism::new(
        m.dom().clone(),
        a.clone(),
        BigMatrix::identity(a.generators()),
    )?;
    let cert = PoCertificate {
        generator: m,
        attaching: d,
        top: FpMorphism::identity(f.cod()),
    };
    debug_assert!(cert.verify(f));
    Ok(cert)
}
