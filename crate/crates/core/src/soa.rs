//! Staged factorization engine.
//!
//! Given a finite list of generator morphisms, any map `f: A -> B` is factored
//! as a chain of pushouts of generators followed by a residual map.  Each
//! stage collects the commuting squares from the generators to the current
//! residual, glues them on by successive pushouts, and induces the next
//! residual.  A whole run leaves a replayable [`FactorizationTrace`].
//!
//! Two squares whose difference admits a diagonal attach isomorphic material:
//! the pushout along one is carried onto the pushout along the other by an
//! isomorphism commuting with the maps in and out.  Stage cones therefore list
//! one representative per such class, and since the classes are cosets of a
//! lattice the enumeration never materializes a hom-set.  For the same reason
//! the run loop attaches squares one at a time and skips any square that
//! already admits a diagonal against the partially built stage: attaching it
//! would only glue on a retract, and skipping makes stationary runs
//! detectable.  [`advance_stage`] stays policy-free and attaches exactly what
//! it is given, in the given order.

use crate::classes::{
    box_relation, solved_square_lattice, square_group, ChCertificate, ChStep, MorphismClass,
    PoCertificate,
};
use crate::error::{CoreError, Result};
use crate::exactlin::{hermite_columns, reduce_mod_lattice, BigMatrix};
use crate::fpmod::{
    are_isomorphic_under, compose, distinct_solutions, finite_colimit, hom_enumerate,
    is_pushout_square, morphism_solutions, pushout, CanonicalForm, Diagram, FpModule, FpMorphism,
    HomConstraint,
};
use crate::lifting::{is_injective_wrt, is_orthogonal_to};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// How stage cones treat squares whose attachments would coincide.
///
/// `Strict` keeps one square per attachment class.  `Loose` further merges
/// classes whose pushed-out legs are isomorphic under the stage object,
/// ignoring the map to the codomain.  `Discard` enumerates like `Strict` but
/// replaces any attachment step that fails to be monic by an identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Strict,
    Loose,
    Discard,
}

/// When a staged run stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Stop once a stage map is an isomorphism (nothing new was attached).
    Iso,
    /// Stop once every generator has the left lifting property against the
    /// residual, checked exactly on the relation lattices.
    BoxCertified,
    /// Run the full stage budget and flag the result as truncated.
    MaxStage,
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    /// The run became stationary: a stage attached nothing new.
    Iso,
    /// The residual acquired the lifting property against every generator.
    BoxCertified,
    /// The stage budget ran out under the `MaxStage` stop rule.
    MaxStage,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EngineConfig {
    pub generators: MorphismClass,
    pub variant: Variant,
    pub stop_rule: StopRule,
    /// Upper bound on the number of stages, at least 1.
    pub max_stage: u64,
    /// Upper bound on the number of attachment classes enumerated per stage.
    pub square_bound: u64,
}

impl EngineConfig {
    pub fn new(generators: MorphismClass) -> Self {
        EngineConfig {
            generators,
            variant: Variant::Strict,
            stop_rule: StopRule::Iso,
            max_stage: 8,
            square_bound: 4096,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_stage == 0 {
            return Err(CoreError::InvalidInput(
                "stage budget must be at least 1".to_string(),
            ));
        }
        if self.square_bound == 0 {
            return Err(CoreError::InvalidInput(
                "square bound must be at least 1".to_string(),
            ));
        }
        Ok(())
    }

    fn check_ring(&self, f: &FpMorphism) -> Result<()> {
        if let Some(g) = self.generators.generators().first() {
            if g.dom().ring() != f.dom().ring() {
                return Err(CoreError::InvalidInput(
                    "generators and the map being factored live over different rings".to_string(),
                ));
            }
        }
        Ok(())
    }
}

/// One commuting square from a generator to a residual `f`: `attach` lands in
/// the domain of `f`, `over` in its codomain, and `f∘attach = over∘generator`.
///
/// Each listed square represents its whole attachment class: every square
/// differing from it by one that admits a diagonal glues on the same material,
/// and becomes solvable in the chain as soon as the representative is
/// attached.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeSquare {
    pub generator_index: usize,
    pub attach: FpMorphism,
    pub over: FpMorphism,
}

/// A merge performed in the loose variant: `dropped` pushes out to a leg
/// isomorphic under the stage object to the one of `squares[kept]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DedupMerge {
    pub kept: usize,
    pub dropped: ConeSquare,
}

/// The squares of one stage, one per attachment class, in the canonical
/// processing order: by generator index, then lexicographically by the
/// attaching matrix and the matrix over the codomain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageCone {
    pub stage: usize,
    pub squares: Vec<ConeSquare>,
    pub dedup_record: Vec<DedupMerge>,
}

fn matrix_key(m: &BigMatrix) -> Vec<BigInt> {
    let mut key = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            key.push(m.get(i, j).clone());
        }
    }
    key
}

/// All maps `t` out of the generator codomain with `t∘m = f∘s`.
fn squares_over(f: &FpMorphism, m: &FpMorphism, s: &FpMorphism) -> Result<Vec<FpMorphism>> {
    let fs = compose(f, s);
    let constraint = HomConstraint::plain(m.matrix().clone(), fs.matrix().clone(), f.cod());
    let sol = morphism_solutions(m.cod(), f.cod(), &[constraint]);
    distinct_solutions(m.cod(), f.cod(), &sol)
}

/// List one commuting square per attachment class from the generators to `f`,
/// merging classes with isomorphic legs when the loose variant is configured.
pub fn stage_cone(f: &FpMorphism, cfg: &EngineConfig) -> Result<StageCone> {
    stage_cone_at(0, f, cfg)
}

fn square_sort_key(sq: &ConeSquare) -> (usize, Vec<BigInt>, Vec<BigInt>) {
    (
        sq.generator_index,
        matrix_key(sq.attach.matrix()),
        matrix_key(sq.over.matrix()),
    )
}

fn stage_cone_at(stage: usize, f: &FpMorphism, cfg: &EngineConfig) -> Result<StageCone> {
    cfg.validate()?;
    cfg.check_ring(f)?;
    let a = f.dom();
    let b = f.cod();
    // The commuting squares from a generator form a group in concatenated
    // matrix coordinates and the squares with a diagonal form a sublattice, so
    // the attachment classes are the cosets.  Walk them breadth-first through
    // canonical representatives instead of enumerating any hom-set.
    let mut reps: Vec<ConeSquare> = Vec::new();
    for (gi, m) in cfg.generators.generators().iter().enumerate() {
        let len_u = m.dom().generators() * a.generators();
        let n = len_u + m.cod().generators() * b.generators();
        let solved = hermite_columns(n, &solved_square_lattice(m, f));
        let group = square_group(m, f);
        let start = reduce_mod_lattice(&vec![BigInt::from(0); n], &solved);
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for g in &group {
                for negate in [false, true] {
                    let moved: Vec<BigInt> = x
                        .iter()
                        .zip(g)
                        .map(|(xi, gi)| if negate { xi - gi } else { xi + gi })
                        .collect();
                    let y = reduce_mod_lattice(&moved, &solved);
                    if seen.contains(&y) {
                        continue;
                    }
                    if (reps.len() + seen.len()) as u64 >= cfg.square_bound {
                        return Err(CoreError::BoundExceeded(format!(
                            "stage {}: more than {} attachment classes",
                            stage, cfg.square_bound
                        )));
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        for x in seen {
            let attach = FpMorphism::expect_new(
                m.dom().clone(),
                a.clone(),
                BigMatrix::from_vectorized(a.generators(), m.dom().generators(), &x[..len_u]),
            );
            let over = FpMorphism::expect_new(
                m.cod().clone(),
                b.clone(),
                BigMatrix::from_vectorized(b.generators(), m.cod().generators(), &x[len_u..]),
            );
            reps.push(ConeSquare {
                generator_index: gi,
                attach,
                over,
            });
        }
    }

    // Loose mode keeps the first representative of each leg class, bucketing
    // candidates by the canonical form of the pushout apex so the isomorphism
    // searches only run within a bucket.
    struct Kept {
        square: ConeSquare,
        h: FpMorphism,
        form: CanonicalForm,
    }
    let mut kept: Vec<Kept> = Vec::new();
    let mut drops: Vec<(usize, ConeSquare)> = Vec::new();
    for square in reps {
        if cfg.variant != Variant::Loose {
            kept.push(Kept {
                square,
                h: FpMorphism::identity(a),
                form: a.canonical_form(),
            });
            continue;
        }
        let m = &cfg.generators.generators()[square.generator_index];
        let h = pushout(&square.attach, m).leg_left;
        let form = h.cod().canonical_form();
        let mut merged_into = None;
        for (ki, k) in kept.iter().enumerate() {
            if k.form == form && are_isomorphic_under(&h, &k.h)? {
                merged_into = Some(ki);
                break;
            }
        }
        match merged_into {
            Some(ki) => drops.push((ki, square)),
            None => kept.push(Kept { square, h, form }),
        }
    }

    let mut order: Vec<usize> = (0..kept.len()).collect();
    order.sort_by_key(|&i| square_sort_key(&kept[i].square));
    let mut final_position = vec![0usize; kept.len()];
    for (pos, &i) in order.iter().enumerate() {
        final_position[i] = pos;
    }
    let mut squares: Vec<ConeSquare> = Vec::with_capacity(kept.len());
    for &i in &order {
        squares.push(kept[i].square.clone());
    }
    let dedup_record = drops
        .into_iter()
        .map(|(ki, dropped)| DedupMerge {
            kept: final_position[ki],
            dropped,
        })
        .collect();
    Ok(StageCone {
        stage,
        squares,
        dedup_record,
    })
}

/// Is there a `w` out of the generator codomain with `w∘m = attach` and
/// `residual∘w = over`?
fn diagonal_exists(
    m: &FpMorphism,
    attach: &FpMorphism,
    residual: &FpMorphism,
    over: &FpMorphism,
) -> bool {
    let under = HomConstraint::plain(m.matrix().clone(), attach.matrix().clone(), residual.dom());
    let over = HomConstraint {
        left: residual.matrix().clone(),
        right: BigMatrix::identity(m.cod().generators()),
        value: over.matrix().clone(),
        target_rels: residual.cod().relation_matrix_full(),
    };
    morphism_solutions(m.cod(), residual.dom(), &[under, over])
        .particular
        .is_some()
}

/// Does the square already admit a diagonal `w` with `w∘m = attach` and
/// `f∘w = over`?
pub fn square_is_solved(f: &FpMorphism, m: &FpMorphism, square: &ConeSquare) -> bool {
    diagonal_exists(m, &square.attach, f, &square.over)
}

/// One pushout in the successive attachment of a stage's squares.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PushoutStep {
    pub generator_index: usize,
    /// The square's attaching map composed into the current chain object.
    pub attach: FpMorphism,
    /// The pushout of the generator along `attach`; an identity when the step
    /// was discarded.
    pub step: FpMorphism,
    /// The generator codomain's leg into the new chain object; absent when the
    /// step was discarded.
    pub glue: Option<FpMorphism>,
    /// The updated map from the stage's input object into the chain.
    pub chain: FpMorphism,
    pub discarded: bool,
}

/// The output of one stage before the run loop records it.
pub struct StageAdvance {
    pub object: FpModule,
    /// The stage map from the input object into `object`.
    pub map: FpMorphism,
    /// The induced residual out of `object`.
    pub residual: FpMorphism,
    pub steps: Vec<PushoutStep>,
    /// Isomorphism from the last chain object onto the reduced `object`.
    pub closing_to: FpMorphism,
    pub closing_from: FpMorphism,
}

struct StageBuild {
    advance: StageAdvance,
    /// Positions in the cone of squares skipped as already solvable.
    skipped: Vec<usize>,
}

fn attach_cone(
    f: &FpMorphism,
    cone: &StageCone,
    cfg: &EngineConfig,
    skip_solvable: bool,
) -> Result<StageBuild> {
    cfg.validate()?;
    let a = f.dom().clone();
    let mut chain = FpMorphism::identity(&a);
    let mut residual = f.clone();
    let mut steps = Vec::new();
    let mut skipped = Vec::new();
    for (index, square) in cone.squares.iter().enumerate() {
        let m = &cfg.generators.generators()[square.generator_index];
        let attach = compose(&chain, &square.attach);
        if skip_solvable && diagonal_exists(m, &attach, &residual, &square.over) {
            skipped.push(index);
            continue;
        }
        let po = pushout(&attach, m);
        if cfg.variant == Variant::Discard && !po.leg_left.is_mono() {
            steps.push(PushoutStep {
                generator_index: square.generator_index,
                attach,
                step: FpMorphism::identity(chain.cod()),
                glue: None,
                chain: chain.clone(),
                discarded: true,
            });
            continue;
        }
        let next_residual = po.mediator(&residual, &square.over)?;
        let next_chain = compose(&po.leg_left, &chain);
        steps.push(PushoutStep {
            generator_index: square.generator_index,
            attach,
            step: po.leg_left,
            glue: Some(po.leg_right),
            chain: next_chain.clone(),
            discarded: false,
        });
        chain = next_chain;
        residual = next_residual;
    }
    if steps.is_empty() {
        let id = FpMorphism::identity(&a);
        return Ok(StageBuild {
            advance: StageAdvance {
                object: a,
                map: id.clone(),
                residual: f.clone(),
                steps,
                closing_to: id.clone(),
                closing_from: id,
            },
            skipped,
        });
    }
    let (object, closing_to, closing_from) = chain.cod().reduced();
    let map = compose(&closing_to, &chain);
    let residual = compose(&residual, &closing_from);
    Ok(StageBuild {
        advance: StageAdvance {
            object,
            map,
            residual,
            steps,
            closing_to,
            closing_from,
        },
        skipped,
    })
}

/// Attach every square of the cone by successive pushouts, in the cone's
/// order, and induce the next residual.  The result is independent of the
/// order up to an isomorphism under the input object.
pub fn advance_stage(
    f: &FpMorphism,
    cone: &StageCone,
    cfg: &EngineConfig,
) -> Result<StageAdvance> {
    attach_cone(f, cone, cfg, false).map(|build| build.advance)
}

/// Everything one stage of a run recorded.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageLog {
    /// The full cone, including squares the run then skipped.
    pub cone: StageCone,
    /// Positions of cone squares that already admitted a diagonal against the
    /// partially built stage when their turn came.
    pub skipped: Vec<usize>,
    pub steps: Vec<PushoutStep>,
    pub closing_to: FpMorphism,
    pub closing_from: FpMorphism,
}

/// A complete replayable run: stage objects, stage maps, residuals, the two
/// output maps, and every pushout performed along the way.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationTrace {
    pub config: EngineConfig,
    /// The stage objects, starting with the domain of the factored map.
    pub objects: Vec<FpModule>,
    /// Stage maps between consecutive objects.
    pub stage_maps: Vec<FpMorphism>,
    /// Residual maps to the codomain, one per object.
    pub residuals: Vec<FpMorphism>,
    /// Composites from each object to the final object.
    pub composites: Vec<FpMorphism>,
    pub stages: Vec<StageLog>,
    /// The chain-of-pushouts part: first object to final object.
    pub f_star: FpMorphism,
    /// The residual part: final object to the codomain.
    pub f_lambda: FpMorphism,
    pub termination: TerminationReason,
}

fn same_map(x: &FpMorphism, y: &FpMorphism) -> bool {
    x.dom() == y.dom() && x.cod() == y.cod() && x.equals(y)
}

impl FactorizationTrace {
    /// Re-checks every recorded equation: the two-part factorization composes
    /// to the input, residuals are compatible with stage maps, every
    /// non-discarded step is a genuine pushout of its generator, and the
    /// stage maps agree with the recorded pushout chains.
    pub fn verify(&self) -> bool {
        self.try_verify().unwrap_or(false)
    }

    fn try_verify(&self) -> Result<bool> {
        let n = self.objects.len();
        if self.residuals.len() != n
            || self.composites.len() != n
            || self.stage_maps.len() + 1 != n
            || self.stages.len() + 1 != n
        {
            return Ok(false);
        }
        if !same_map(&compose(&self.f_lambda, &self.f_star), &self.residuals[0]) {
            return Ok(false);
        }
        if !same_map(&self.f_star, &self.composites[0]) {
            return Ok(false);
        }
        if !same_map(&self.f_lambda, &self.residuals[n - 1]) {
            return Ok(false);
        }
        if !self.composites[n - 1].matrix().is_identity() {
            return Ok(false);
        }
        for alpha in 0..n - 1 {
            let g = &self.stage_maps[alpha];
            if !same_map(&compose(&self.residuals[alpha + 1], g), &self.residuals[alpha]) {
                return Ok(false);
            }
            if !same_map(&compose(&self.composites[alpha + 1], g), &self.composites[alpha]) {
                return Ok(false);
            }
            if !self.verify_stage(alpha)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn verify_stage(&self, alpha: usize) -> Result<bool> {
        let stage = &self.stages[alpha];
        let generators = self.config.generators.generators();
        let mut chain = FpMorphism::identity(&self.objects[alpha]);
        let mut residual = self.residuals[alpha].clone();
        let mut step_iter = stage.steps.iter();
        for (index, square) in stage.cone.squares.iter().enumerate() {
            let m = &generators[square.generator_index];
            let attach = compose(&chain, &square.attach);
            if stage.skipped.contains(&index) {
                if !diagonal_exists(m, &attach, &residual, &square.over) {
                    return Ok(false);
                }
                continue;
            }
            let Some(step) = step_iter.next() else {
                return Ok(false);
            };
            if step.generator_index != square.generator_index {
                return Ok(false);
            }
            if !same_map(&step.attach, &attach) {
                return Ok(false);
            }
            if step.discarded {
                if self.config.variant != Variant::Discard {
                    return Ok(false);
                }
                if !step.step.matrix().is_identity() || step.glue.is_some() {
                    return Ok(false);
                }
                if !same_map(&step.chain, &chain) {
                    return Ok(false);
                }
                continue;
            }
            let Some(glue) = &step.glue else {
                return Ok(false);
            };
            if !matches!(is_pushout_square(&attach, m, &step.step, glue), Ok(true)) {
                return Ok(false);
            }
            let po = pushout(&attach, m);
            if !same_map(&po.leg_left, &step.step) || !same_map(&po.leg_right, glue) {
                return Ok(false);
            }
            residual = po.mediator(&residual, &square.over)?;
            let expected_chain = compose(&step.step, &chain);
            if !same_map(&step.chain, &expected_chain) {
                return Ok(false);
            }
            chain = expected_chain;
        }
        if step_iter.next().is_some() {
            return Ok(false);
        }
        let outer_id = FpMorphism::identity(stage.closing_to.cod());
        let inner_id = FpMorphism::identity(stage.closing_from.cod());
        if !compose(&stage.closing_to, &stage.closing_from).equals(&outer_id)
            || !compose(&stage.closing_from, &stage.closing_to).equals(&inner_id)
        {
            return Ok(false);
        }
        let g = compose(&stage.closing_to, &chain);
        if !same_map(&g, &self.stage_maps[alpha]) {
            return Ok(false);
        }
        let reduced_residual = compose(&residual, &stage.closing_from);
        Ok(same_map(&reduced_residual, &self.residuals[alpha + 1]))
    }

    /// The `(stage, step)` positions of discarded attachment steps.
    pub fn discard_log(&self) -> Vec<(usize, usize)> {
        let mut log = Vec::new();
        for (alpha, stage) in self.stages.iter().enumerate() {
            for (i, step) in stage.steps.iter().enumerate() {
                if step.discarded {
                    log.push((alpha, i));
                }
            }
        }
        log
    }

    /// Repackage the recorded steps as a chain certificate for `f_star`: one
    /// certified pushout square per attachment, with each stage's closing
    /// isomorphism absorbed into the stage's last step. Fails on discarded
    /// steps, which leave no pushout square behind.
    pub fn chain_certificate(&self) -> Result<ChCertificate> {
        let mut steps = Vec::new();
        for stage in &self.stages {
            let last = stage.steps.len().saturating_sub(1);
            for (i, st) in stage.steps.iter().enumerate() {
                if st.discarded {
                    return Err(CoreError::InvalidInput(
                        "a discarded step leaves no pushout square to certify".to_string(),
                    ));
                }
                let glue = st.glue.as_ref().ok_or_else(|| {
                    CoreError::InvalidInput("attachment step without a glue map".to_string())
                })?;
                let generator = self.config.generators.generators()[st.generator_index].clone();
                let (map, top) = if i == last {
                    (
                        compose(&stage.closing_to, &st.step),
                        compose(&stage.closing_to, glue),
                    )
                } else {
                    (st.step.clone(), glue.clone())
                };
                steps.push(ChStep {
                    map,
                    witness: PoCertificate {
                        generator,
                        attaching: st.attach.clone(),
                        top,
                    },
                });
            }
        }
        let cert = ChCertificate {
            steps,
            final_iso: FpMorphism::identity(self.f_star.cod()),
        };
        if !cert.verify(&self.f_star) {
            return Err(CoreError::InvalidInput(
                "recorded steps do not certify the chain part".to_string(),
            ));
        }
        Ok(cert)
    }
}

fn assemble_trace(
    cfg: &EngineConfig,
    objects: Vec<FpModule>,
    stage_maps: Vec<FpMorphism>,
    residuals: Vec<FpMorphism>,
    stages: Vec<StageLog>,
    termination: TerminationReason,
) -> FactorizationTrace {
    let mut composites = vec![FpMorphism::identity(objects.last().expect("nonempty run"))];
    for g in stage_maps.iter().rev() {
        let last = composites.last().expect("composite chain");
        composites.push(compose(last, g));
    }
    composites.reverse();
    let f_star = composites[0].clone();
    let f_lambda = residuals.last().expect("nonempty run").clone();
    FactorizationTrace {
        config: cfg.clone(),
        objects,
        stage_maps,
        residuals,
        composites,
        stages,
        f_star,
        f_lambda,
        termination,
    }
}

fn generators_box_certify(f: &FpMorphism, cfg: &EngineConfig) -> bool {
    cfg.generators.generators().iter().all(|m| box_relation(m, f))
}

/// Factor `f` as `f_lambda ∘ f_star` by running stages until the stop rule
/// fires.
///
/// Under the `Iso` and `BoxCertified` stop rules, exhausting the stage budget
/// is an error: the returned [`CoreError::Truncated`] carries the partial
/// trace serialized as JSON.  Under `MaxStage` the budget is the intended
/// stopping point and the trace is flagged accordingly.
pub fn run_factorization(f: &FpMorphism, cfg: &EngineConfig) -> Result<FactorizationTrace> {
    cfg.validate()?;
    cfg.check_ring(f)?;
    let mut objects = vec![f.dom().clone()];
    let mut stage_maps: Vec<FpMorphism> = Vec::new();
    let mut residuals = vec![f.clone()];
    let mut stages: Vec<StageLog> = Vec::new();
    let termination = loop {
        let alpha = stages.len();
        let current = residuals.last().expect("residual chain").clone();
        if cfg.stop_rule == StopRule::BoxCertified && generators_box_certify(&current, cfg) {
            break TerminationReason::BoxCertified;
        }
        if alpha as u64 >= cfg.max_stage {
            if cfg.stop_rule == StopRule::MaxStage {
                break TerminationReason::MaxStage;
            }
            let partial = assemble_trace(
                cfg,
                objects,
                stage_maps,
                residuals,
                stages,
                TerminationReason::MaxStage,
            );
            let payload = serde_json::to_string(&partial)
                .unwrap_or_else(|_| "unserializable partial trace".to_string());
            return Err(CoreError::Truncated(payload));
        }
        let cone = stage_cone_at(alpha, &current, cfg)?;
        let build = attach_cone(&current, &cone, cfg, true)?;
        if build.advance.steps.is_empty() {
            break TerminationReason::Iso;
        }
        let adv = build.advance;
        let map_is_iso = adv.map.is_iso();
        objects.push(adv.object);
        stage_maps.push(adv.map);
        residuals.push(adv.residual);
        stages.push(StageLog {
            cone,
            skipped: build.skipped,
            steps: adv.steps,
            closing_to: adv.closing_to,
            closing_from: adv.closing_from,
        });
        if cfg.stop_rule == StopRule::Iso && map_is_iso {
            break TerminationReason::Iso;
        }
    };
    let trace = assemble_trace(cfg, objects, stage_maps, residuals, stages, termination);
    debug_assert!(trace.verify(), "assembled trace failed self-verification");
    Ok(trace)
}

/// A reflection computed by factoring the map to the zero module.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReflectionResult {
    /// The unit from the input into the reflected object.
    pub unit: FpMorphism,
    pub a_star: FpModule,
    pub trace: FactorizationTrace,
}

/// Reflect `a` into the class of modules absorbing every generator, by
/// running the factorization engine on `a -> 0`.
///
/// A strict run that terminates cleanly is checked to produce an object with
/// the extension property along every generator; the other variants merge or
/// refuse attachments and only return what they built.  The unit is checked
/// to be monic whenever all generators are.
pub fn weak_reflect(a: &FpModule, cfg: &EngineConfig) -> Result<ReflectionResult> {
    let zero = FpModule::zero(a.ring().clone());
    let f = FpMorphism::zero_morphism(a, &zero);
    let trace = run_factorization(&f, cfg)?;
    let unit = trace.f_star.clone();
    let a_star = trace.objects.last().expect("nonempty run").clone();
    if trace.termination != TerminationReason::MaxStage {
        if cfg.variant == Variant::Strict {
            for m in cfg.generators.generators() {
                assert!(
                    matches!(is_injective_wrt(&a_star, m), Ok(true)),
                    "reflected object must absorb every generator"
                );
            }
        }
        if cfg.generators.generators().iter().all(|m| m.is_mono()) {
            assert!(unit.is_mono(), "unit must be monic for monic generators");
        }
    }
    Ok(ReflectionResult { unit, a_star, trace })
}

/// Transport a commuting square `(u, v)` from `f` to `f2` through their
/// traces: produce `w` between the final objects with `w∘f_star = f2_star∘u`
/// and `f2_lambda∘w = v∘f_lambda`.
///
/// Both traces must come from the strict variant.  The target trace must have
/// terminated cleanly, otherwise some stage square may have no mediator and
/// the transport fails with a non-commuting-square error.
pub fn functorial_transport(
    u: &FpMorphism,
    v: &FpMorphism,
    trace: &FactorizationTrace,
    target: &FactorizationTrace,
) -> Result<FpMorphism> {
    if trace.config.variant != Variant::Strict || target.config.variant != Variant::Strict {
        return Err(CoreError::VariantMismatch(
            "stage transport is only defined between strict traces".to_string(),
        ));
    }
    let f = &trace.residuals[0];
    let f2 = &target.residuals[0];
    assert_eq!(u.dom(), f.dom(), "square side u must start at the first domain");
    assert_eq!(u.cod(), f2.dom(), "square side u must end at the second domain");
    assert_eq!(v.dom(), f.cod(), "square side v must start at the first codomain");
    assert_eq!(v.cod(), f2.cod(), "square side v must end at the second codomain");
    if !compose(v, f).equals(&compose(f2, u)) {
        return Err(CoreError::NonCommutingSquare(
            "transport square does not commute".to_string(),
        ));
    }
    let lambda2 = &target.f_lambda;
    let generators = trace.config.generators.generators();
    // w runs from the current stage object all the way to the target's final
    // object; each pushout step extends it by a mediator.
    let mut w = compose(&target.f_star, u);
    for stage in &trace.stages {
        let live: Vec<&ConeSquare> = stage
            .cone
            .squares
            .iter()
            .enumerate()
            .filter(|(index, _)| !stage.skipped.contains(index))
            .map(|(_, sq)| sq)
            .collect();
        let mut w_chain = w.clone();
        for (step, square) in stage.steps.iter().zip(&live) {
            if step.discarded {
                continue;
            }
            let m = &generators[step.generator_index];
            let under_value = compose(&w_chain, &step.attach);
            let over_value = compose(v, &square.over);
            let under = HomConstraint::plain(
                m.matrix().clone(),
                under_value.matrix().clone(),
                w.cod(),
            );
            let over = HomConstraint {
                left: lambda2.matrix().clone(),
                right: BigMatrix::identity(m.cod().generators()),
                value: over_value.matrix().clone(),
                target_rels: lambda2.cod().relation_matrix_full(),
            };
            let sol = morphism_solutions(m.cod(), w.cod(), &[under, over]);
            let Some(p) = sol.particular else {
                return Err(CoreError::NonCommutingSquare(
                    "no mediator for a stage square; the target trace is not certified far enough"
                        .to_string(),
                ));
            };
            let c = FpMorphism::expect_new(
                m.cod().clone(),
                w.cod().clone(),
                BigMatrix::from_vectorized(w.cod().generators(), m.cod().generators(), &p),
            );
            let po = pushout(&step.attach, m);
            w_chain = po.mediator(&w_chain, &c)?;
        }
        w = compose(&w_chain, &stage.closing_from);
    }
    if !compose(&w, &trace.f_star).equals(&compose(&target.f_star, u)) {
        return Err(CoreError::NonCommutingSquare(
            "transported map does not commute with the chain parts".to_string(),
        ));
    }
    if !compose(lambda2, &w).equals(&compose(v, &trace.f_lambda)) {
        return Err(CoreError::NonCommutingSquare(
            "transported map does not commute with the residual parts".to_string(),
        ));
    }
    Ok(w)
}

/// Factor `f` through the colimit of its one-stage attachment diagram.
///
/// The diagram is rooted at the domain: one object per commuting square from
/// a generator (the pushout apex), the root's maps into the apexes, and every
/// map between apexes commuting with the maps in and out.  The colimit leg of
/// the root is the first factor; the induced map to the codomain the second.
pub fn orthogonal_factorize_one_step(
    f: &FpMorphism,
    class: &MorphismClass,
) -> Result<(FpMorphism, FpMorphism)> {
    let a = f.dom();
    let mut legs = vec![FpMorphism::identity(a)];
    let mut outs = vec![f.clone()];
    for m in class.generators() {
        for s in hom_enumerate(m.dom(), a)? {
            for t in squares_over(f, m, &s)? {
                let po = pushout(&s, m);
                let q = po.mediator(f, &t)?;
                legs.push(po.leg_left);
                outs.push(q);
            }
        }
    }
    let objects: Vec<FpModule> = legs.iter().map(|h| h.cod().clone()).collect();
    let mut diagram = Diagram::new(objects.clone());
    for (i, h) in legs.iter().enumerate().skip(1) {
        diagram.add_arrow(0, i, h.clone());
    }
    for i in 1..legs.len() {
        for j in 1..legs.len() {
            let under =
                HomConstraint::plain(legs[i].matrix().clone(), legs[j].matrix().clone(), &objects[j]);
            let over = HomConstraint {
                left: outs[j].matrix().clone(),
                right: BigMatrix::identity(objects[i].generators()),
                value: outs[i].matrix().clone(),
                target_rels: f.cod().relation_matrix_full(),
            };
            let sol = morphism_solutions(&objects[i], &objects[j], &[under, over]);
            for r in distinct_solutions(&objects[i], &objects[j], &sol)? {
                if i == j && r.matrix().is_identity() {
                    continue;
                }
                diagram.add_arrow(i, j, r);
            }
        }
    }
    let col = finite_colimit(&diagram);
    let g_raw = col.mediator(&outs)?;
    let h_raw = col.legs[0].clone();
    let (_, closing_to, closing_from) = col.object.reduced();
    let h = compose(&closing_to, &h_raw);
    let g = compose(&g_raw, &closing_from);
    Ok((h, g))
}

/// Reflect `a` into the class of modules orthogonal to every generator, by
/// iterating [`orthogonal_factorize_one_step`] on the map to zero until the
/// object stabilizes.
pub fn orthogonal_reflect(
    a: &FpModule,
    class: &MorphismClass,
    max_stage: u64,
) -> Result<(FpMorphism, FpModule)> {
    let zero = FpModule::zero(a.ring().clone());
    let mut unit = FpMorphism::identity(a);
    let mut current = a.clone();
    for _ in 0..=max_stage {
        let mut orthogonal = true;
        for m in class.generators() {
            if !is_orthogonal_to(&current, m)? {
                orthogonal = false;
                break;
            }
        }
        if orthogonal {
            return Ok((unit, current));
        }
        let f = FpMorphism::zero_morphism(&current, &zero);
        let (h, _) = orthogonal_factorize_one_step(&f, class)?;
        unit = compose(&h, &unit);
        current = h.cod().clone();
    }
    Err(CoreError::Truncated(format!(
        "orthogonal reflection did not stabilize within {} steps",
        max_stage
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{fp_injectivity_test, Universe};
    use crate::exactlin::BigMatrix;
    use crate::fpmod::Ring;
    use crate::lifting::{has_lifting, LiftingSquare};

    fn r4() -> Ring {
        Ring::Zmod(4.into())
    }

    fn z2() -> FpModule {
        FpModule::cyclic(r4(), 2)
    }

    fn z4() -> FpModule {
        FpModule::cyclic(r4(), 4)
    }

    fn times_two() -> FpMorphism {
        FpMorphism::expect_new(z2(), z4(), BigMatrix::from_i64_rows(&[&[2]]))
    }

    fn config(generators: Vec<FpMorphism>) -> EngineConfig {
        EngineConfig::new(MorphismClass::new(generators).unwrap())
    }

    fn to_zero(a: &FpModule) -> FpMorphism {
        FpMorphism::zero_morphism(a, &FpModule::zero(a.ring().clone()))
    }

    #[test]
    fn stage_cone_lists_commuting_squares() {
        let cfg = config(vec![times_two()]);
        let f = to_zero(&z2());
        let cone = stage_cone(&f, &cfg).unwrap();
        assert_eq!(cone.squares.len(), 2);
        let attach_values: Vec<BigInt> = cone
            .squares
            .iter()
            .map(|sq| sq.attach.matrix().get(0, 0).clone())
            .collect();
        assert_eq!(attach_values, vec![BigInt::from(0), BigInt::from(1)]);
        for sq in &cone.squares {
            assert_eq!(sq.generator_index, 0);
            assert_eq!(sq.over.cod().generators(), 0);
        }

        let mut loose = cfg.clone();
        loose.variant = Variant::Loose;
        assert_eq!(stage_cone(&f, &loose).unwrap().squares.len(), 2);
    }

    #[test]
    fn advance_attaches_every_square_of_the_cone() {
        let cfg = config(vec![times_two()]);
        let f = to_zero(&z2());
        let cone = stage_cone(&f, &cfg).unwrap();
        let adv = advance_stage(&f, &cone, &cfg).unwrap();
        assert_eq!(adv.object.order(), Some(8.into()));
        assert!(adv.map.is_mono());
        assert_eq!(adv.steps.len(), 2);
        let m = times_two();
        for step in &adv.steps {
            assert!(!step.discarded);
            let glue = step.glue.as_ref().unwrap();
            assert!(crate::fpmod::is_pushout_square(&step.attach, &m, &step.step, glue).unwrap());
        }
        assert_eq!(adv.residual.dom(), &adv.object);

        let empty = StageCone {
            stage: 0,
            squares: Vec::new(),
            dedup_record: Vec::new(),
        };
        let trivial = advance_stage(&f, &empty, &cfg).unwrap();
        assert!(trivial.map.matrix().is_identity());
        assert_eq!(trivial.object, z2());
    }

    #[test]
    fn run_with_no_generators_is_the_trivial_factorization() {
        let cfg = config(Vec::new());
        let f = times_two();
        let trace = run_factorization(&f, &cfg).unwrap();
        assert_eq!(trace.objects.len(), 1);
        assert!(trace.f_star.matrix().is_identity());
        assert!(trace.f_lambda.equals(&f));
        assert_eq!(trace.termination, TerminationReason::Iso);
        assert!(trace.verify());
    }

    #[test]
    fn weak_reflection_absorbs_the_generator() {
        for variant in [Variant::Strict, Variant::Loose, Variant::Discard] {
            let mut cfg = config(vec![times_two()]);
            cfg.variant = variant;
            let r = weak_reflect(&z2(), &cfg).unwrap();
            assert_eq!(r.a_star.canonical_form().to_string(), "Z/4");
            assert!(r.unit.is_mono());
            assert_eq!(r.trace.objects.len(), 2);
            assert_eq!(r.trace.termination, TerminationReason::Iso);
            assert!(r.trace.verify());
            assert!(r.trace.discard_log().is_empty());
        }
        let universe = Universe::all_modules(r4(), 16);
        let cfg = config(vec![times_two()]);
        let r = weak_reflect(&z2(), &cfg).unwrap();
        assert!(fp_injectivity_test(&r.a_star, &universe).unwrap());
    }

    #[test]
    fn reflecting_an_absorbing_module_changes_nothing() {
        let cfg = config(vec![times_two()]);
        let r = weak_reflect(&z4(), &cfg).unwrap();
        assert_eq!(r.trace.objects.len(), 1);
        assert!(r.unit.matrix().is_identity());
        assert_eq!(r.a_star, z4());
    }

    #[test]
    fn box_certified_run_inverts_the_residual_here() {
        let mut cfg = config(vec![times_two()]);
        cfg.stop_rule = StopRule::BoxCertified;
        let f = times_two();
        let trace = run_factorization(&f, &cfg).unwrap();
        assert_eq!(trace.termination, TerminationReason::BoxCertified);
        assert!(trace.verify());
        assert!(box_relation(&times_two(), &trace.f_lambda));
        assert!(trace.f_lambda.is_iso());

        // The factored map lifts against its own residual, giving the
        // retract-style diagonal.
        let sq = LiftingSquare::new(
            f.clone(),
            trace.f_lambda.clone(),
            trace.f_star.clone(),
            FpMorphism::identity(f.cod()),
        )
        .unwrap();
        let d = has_lifting(&sq).unwrap().expect("diagonal");
        assert!(compose(&d, &f).equals(&trace.f_star));
        assert!(compose(&trace.f_lambda, &d).matrix().is_identity());
    }

    #[test]
    fn traces_repackage_into_verified_chain_certificates() {
        let f = FpMorphism::expect_new(
            z2(),
            FpModule::direct_sum(&z4(), &z2()),
            BigMatrix::from_i64_rows(&[&[2], &[0]]),
        );
        let cfg = config(vec![times_two()]);
        let trace = run_factorization(&f, &cfg).unwrap();
        let cert = trace.chain_certificate().unwrap();
        assert!(cert.verify(&trace.f_star));
        assert!(!cert.steps.is_empty());
        for step in &cert.steps {
            assert!(step.witness.verify(&step.map));
        }
        // a zero-stage run certifies through the empty chain
        let idle = run_factorization(&times_two(), &config(vec![])).unwrap();
        let cert = idle.chain_certificate().unwrap();
        assert!(cert.steps.is_empty());
        assert!(cert.verify(&idle.f_star));
    }

    #[test]
    fn complete_generator_set_makes_the_residual_invertible() {
        let universe = Universe::all_modules(r4(), 4);
        let generators = universe.all_morphisms().unwrap();
        let mut cfg = config(generators);
        cfg.stop_rule = StopRule::BoxCertified;
        let f = times_two();
        let trace = run_factorization(&f, &cfg).unwrap();
        assert_eq!(trace.termination, TerminationReason::BoxCertified);
        assert!(trace.f_lambda.is_iso());
        assert!(trace.verify());
    }

    #[test]
    fn loose_runs_merge_squares_with_isomorphic_legs() {
        let f = FpMorphism::expect_new(
            z2(),
            FpModule::direct_sum(&z4(), &z2()),
            BigMatrix::from_i64_rows(&[&[2], &[0]]),
        );
        let mut strict_cfg = config(vec![times_two()]);
        strict_cfg.stop_rule = StopRule::BoxCertified;
        let mut loose_cfg = strict_cfg.clone();
        loose_cfg.variant = Variant::Loose;
        loose_cfg.stop_rule = StopRule::Iso;
        let strict = run_factorization(&f, &strict_cfg).unwrap();
        let loose = run_factorization(&f, &loose_cfg).unwrap();
        assert_eq!(strict.termination, TerminationReason::BoxCertified);
        assert!(box_relation(&times_two(), &strict.f_lambda));
        assert_eq!(loose.termination, TerminationReason::Iso);
        assert!(strict.verify());
        assert!(loose.verify());
        // Strict keeps every attachment class; loose merges squares whose
        // legs agree up to an isomorphism under the stage object, so it can
        // go stationary while attaching strictly less.
        assert!(strict.stages.iter().all(|s| s.cone.dedup_record.is_empty()));
        assert!(loose.stages.iter().any(|s| !s.cone.dedup_record.is_empty()));
        let strict_attached: usize = strict.stages.iter().map(|s| s.steps.len()).sum();
        let loose_attached: usize = loose.stages.iter().map(|s| s.steps.len()).sum();
        assert!(loose_attached < strict_attached);
    }

    #[test]
    fn discard_skips_collapsing_attachments() {
        let quotient = FpMorphism::expect_new(z4(), z2(), BigMatrix::from_i64_rows(&[&[1]]));

        let mut strict_cfg = config(vec![quotient.clone()]);
        strict_cfg.variant = Variant::Strict;
        let strict = weak_reflect(&z4(), &strict_cfg).unwrap();
        assert_eq!(strict.a_star.canonical_form().to_string(), "Z/2");

        let mut discard_cfg = config(vec![quotient]);
        discard_cfg.variant = Variant::Discard;
        let discard = weak_reflect(&z4(), &discard_cfg).unwrap();
        assert_eq!(discard.a_star.canonical_form().to_string(), "Z/4");
        assert!(discard.unit.is_iso());
        assert!(!discard.trace.discard_log().is_empty());
        assert!(discard.trace.verify());
    }

    #[test]
    fn truncation_carries_the_partial_trace() {
        let mut cfg = config(vec![times_two()]);
        cfg.max_stage = 1;
        let f = to_zero(&z2());
        // One stage puts the object at Z/4; the run needs a second look to see
        // that it is stationary, so a budget of one truncates.
        let err = run_factorization(&f, &cfg).unwrap_err();
        let CoreError::Truncated(payload) = err else {
            panic!("expected truncation");
        };
        let partial: FactorizationTrace = serde_json::from_str(&payload).unwrap();
        assert_eq!(partial.objects.len(), 2);
        assert_eq!(partial.objects[1].canonical_form().to_string(), "Z/4");
        assert_eq!(partial.termination, TerminationReason::MaxStage);

        let mut flagged = cfg.clone();
        flagged.stop_rule = StopRule::MaxStage;
        let trace = run_factorization(&f, &flagged).unwrap();
        assert_eq!(trace.termination, TerminationReason::MaxStage);
        assert_eq!(trace.objects.len(), 2);
        assert!(trace.verify());
    }

    #[test]
    fn transport_commutes_with_both_factorization_parts() {
        let mut cfg = config(vec![times_two()]);
        cfg.stop_rule = StopRule::BoxCertified;
        let f = times_two();
        let first = run_factorization(&f, &cfg).unwrap();

        let wide = FpModule::direct_sum(&z4(), &z2());
        let incl = FpMorphism::expect_new(z4(), wide.clone(), BigMatrix::from_i64_rows(&[&[1], &[0]]));
        let f2 = compose(&incl, &f);
        let second = run_factorization(&f2, &cfg).unwrap();

        let u = FpMorphism::identity(&z2());
        let w = functorial_transport(&u, &incl, &first, &second).unwrap();
        assert!(compose(&w, &first.f_star).equals(&compose(&second.f_star, &u)));
        assert!(compose(&second.f_lambda, &w).equals(&compose(&incl, &first.f_lambda)));
    }

    #[test]
    fn transport_requires_strict_traces() {
        let mut cfg = config(vec![times_two()]);
        cfg.variant = Variant::Loose;
        let f = times_two();
        let trace = run_factorization(&f, &cfg).unwrap();
        let u = FpMorphism::identity(&z2());
        let v = FpMorphism::identity(&z4());
        let err = functorial_transport(&u, &v, &trace, &trace).unwrap_err();
        assert!(matches!(err, CoreError::VariantMismatch(_)));
    }

    #[test]
    fn one_step_factorization_with_no_generators_is_trivial() {
        let class = MorphismClass::new(Vec::new()).unwrap();
        let f = times_two();
        let (h, g) = orthogonal_factorize_one_step(&f, &class).unwrap();
        assert!(h.is_iso());
        assert!(compose(&g, &h).equals(&f));
    }

    #[test]
    fn one_step_factorization_collapses_along_the_quotient() {
        let quotient = FpMorphism::expect_new(z4(), z2(), BigMatrix::from_i64_rows(&[&[1]]));
        let class = MorphismClass::new(vec![quotient.clone()]).unwrap();
        let (h, g) = orthogonal_factorize_one_step(&quotient, &class).unwrap();
        assert_eq!(h.cod().canonical_form().to_string(), "Z/2");
        assert!(g.is_iso());
        assert!(compose(&g, &h).equals(&quotient));
    }

    #[test]
    fn orthogonal_reflection_is_reduction_mod_two() {
        let quotient = FpMorphism::expect_new(z4(), z2(), BigMatrix::from_i64_rows(&[&[1]]));
        let class = MorphismClass::new(vec![quotient]).unwrap();

        let (unit, star) = orthogonal_reflect(&z4(), &class, 4).unwrap();
        assert_eq!(star.canonical_form().to_string(), "Z/2");
        assert!(unit.is_epi());

        let mixed = FpModule::direct_sum(&z2(), &z4());
        let (_, star2) = orthogonal_reflect(&mixed, &class, 4).unwrap();
        assert_eq!(star2.canonical_form().to_string(), "Z/2 + Z/2");

        let (unit3, star3) = orthogonal_reflect(&z2(), &class, 4).unwrap();
        assert!(unit3.matrix().is_identity());
        assert_eq!(star3, z2());
    }

    #[test]
    fn orthogonal_unit_is_universal() {
        let quotient = FpMorphism::expect_new(z4(), z2(), BigMatrix::from_i64_rows(&[&[1]]));
        let class = MorphismClass::new(vec![quotient.clone()]).unwrap();
        let a = FpModule::direct_sum(&z2(), &z4());
        let (unit, star) = orthogonal_reflect(&a, &class, 4).unwrap();
        let universe = Universe::all_modules(r4(), 8);
        for k in universe.objects() {
            if !is_orthogonal_to(k, &quotient).unwrap() {
                continue;
            }
            for u in hom_enumerate(&a, k).unwrap() {
                let through: Vec<FpMorphism> = hom_enumerate(&star, k)
                    .unwrap()
                    .into_iter()
                    .filter(|w| compose(w, &unit).equals(&u))
                    .collect();
                assert_eq!(through.len(), 1);
            }
        }
    }

    #[test]
    fn stage_output_ignores_the_attachment_order() {
        let wide = FpModule::direct_sum(&z2(), &z2());
        let f = to_zero(&wide);
        let cfg = config(vec![times_two()]);
        let cone = stage_cone(&f, &cfg).unwrap();
        assert!(cone.squares.len() >= 2);
        let base = advance_stage(&f, &cone, &cfg).unwrap();
        let mut permuted = cone.clone();
        permuted.squares.reverse();
        let swapped = advance_stage(&f, &permuted, &cfg).unwrap();
        assert_eq!(
            base.object.canonical_form(),
            swapped.object.canonical_form()
        );
        assert!(crate::fpmod::find_under_isomorphism(&base.map, &swapped.map)
            .unwrap()
            .is_some());
    }

    #[test]
    fn trace_serialization_round_trips_byte_for_byte() {
        let mut cfg = config(vec![times_two()]);
        cfg.stop_rule = StopRule::BoxCertified;
        let trace = run_factorization(&times_two(), &cfg).unwrap();
        let json = serde_json::to_string(&trace).unwrap();
        let back: FactorizationTrace = serde_json::from_str(&json).unwrap();
        assert!(back.verify());
        let json_again = serde_json::to_string(&back).unwrap();
        assert_eq!(json, json_again);
    }

    #[test]
    fn enumeration_bounds_and_config_validation() {
        let mut cfg = config(vec![times_two()]);
        cfg.square_bound = 1;
        let f = to_zero(&z2());
        assert!(matches!(
            stage_cone(&f, &cfg),
            Err(CoreError::BoundExceeded(_))
        ));

        let mut bad = config(vec![times_two()]);
        bad.max_stage = 0;
        assert!(matches!(
            run_factorization(&times_two(), &bad),
            Err(CoreError::InvalidInput(_))
        ));

        let over_z = FpMorphism::expect_new(
            FpModule::cyclic(Ring::Z, 2),
            FpModule::cyclic(Ring::Z, 4),
            BigMatrix::from_i64_rows(&[&[2]]),
        );
        let cfg = config(vec![times_two()]);
        assert!(matches!(
            run_factorization(&over_z, &cfg),
            Err(CoreError::InvalidInput(_))
        ));
    }
}
