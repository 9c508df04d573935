//! One driver per subcommand. Every driver returns a [`CommandOutcome`]:
//! a JSON envelope, a markdown rendering of the same result, and the exit
//! code encoding pass/fail. Output ordering is canonical (sorted keys,
//! deterministic sweeps), so repeated runs produce identical bytes.

use crate::problem::{OracleProblemWire, ProblemFile, SideWire, TaskSpec};
use crate::{Failure, RunArgs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use soalab_core::classes::{
    box_left, box_right, downarrow, fp_injectivity_test, perp_objects, top_morphisms,
    triangle_morphisms, triangle_objects, uparrow, MorphismClass, ObjectClass, Universe,
};
use soalab_core::error::Result as CoreResult;
use soalab_core::fpmod::{compose, hom_enumerate, FpMorphism};
use soalab_core::lifting::{
    oracle_check, ExtensionProblem, LiftingProblem, LiftingSquare, SquareSource,
};
use soalab_core::soa::{
    orthogonal_factorize_one_step, orthogonal_reflect, run_factorization, weak_reflect,
    EngineConfig, FactorizationTrace, Variant,
};
use soalab_core::wfscheck::{
    check_factorization_system, check_wfs_axioms, effective_unions_sweep,
    injectivity_decomposition_check, transferability_check, SideSpec,
};
use soalab_core::CoreError;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::rc::Rc;

pub struct CommandOutcome {
    pub json: Value,
    pub markdown: String,
    pub exit: u8,
}

fn envelope(command: &str, seed: u64, payload: Value) -> Value {
    json!({ "command": command, "seed": seed, "result": payload })
}

/// The serialized name of a fieldless enum variant, e.g. a termination
/// reason or engine variant.
fn enum_str<T: serde::Serialize>(t: &T) -> String {
    match serde_json::to_value(t) {
        Ok(Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

fn map_line(f: &FpMorphism) -> String {
    format!("{} -> {}", f.dom().canonical_form(), f.cod().canonical_form())
}

fn universe_line(u: &Universe) -> String {
    format!(
        "{} objects of order <= {} over {}",
        u.objects().len(),
        u.order_bound(),
        u.ring()
    )
}

fn engine_config(file: &ProblemFile, args: &RunArgs, generators: MorphismClass) -> EngineConfig {
    let mut cfg = EngineConfig::new(generators);
    if let Some(v) = file.engine.variant {
        cfg.variant = v;
    }
    if let Some(k) = file.engine.max_stages {
        cfg.max_stage = k;
    }
    if let Some(s) = file.engine.stop {
        cfg.stop_rule = s;
    }
    if let Some(b) = file.engine.square_bound {
        cfg.square_bound = b;
    }
    if let Some(v) = args.variant {
        cfg.variant = v.into();
    }
    if let Some(k) = args.max_stages {
        cfg.max_stage = k;
    }
    if let Some(s) = args.stop {
        cfg.stop_rule = s.into();
    }
    if let Some(b) = args.square_bound {
        cfg.square_bound = b;
    }
    cfg
}

fn universe(file: &ProblemFile, args: &RunArgs) -> Universe {
    Universe::all_modules(file.ring.clone(), args.universe_max_order)
}

pub fn cmd_factorize(file: &ProblemFile, args: &RunArgs) -> Result<CommandOutcome, Failure> {
    let TaskSpec::Factorize {
        morphism,
        generators,
    } = &file.task
    else {
        unreachable!("task kind checked by the dispatcher");
    };
    let f = &file.morphisms[morphism];
    let cfg = engine_config(file, args, file.classes[generators].clone());
    let trace = match run_factorization(f, &cfg) {
        Ok(trace) => trace,
        Err(CoreError::Truncated(partial)) => {
            let partial: Value =
                serde_json::from_str(&partial).unwrap_or_else(|_| Value::String(partial));
            let payload = json!({
                "morphism": morphism,
                "termination": "truncated",
                "trace": partial,
            });
            let markdown = format!(
                "## factorization: {morphism}\n- map: {}\n- termination: truncated (stage budget exhausted)\n- partial trace written\n",
                map_line(f)
            );
            return Ok(CommandOutcome {
                json: envelope("factorize", args.seed, payload),
                markdown,
                exit: 4,
            });
        }
        Err(e) => return Err(Failure::from_core(e)),
    };

    let verified = if args.verify {
        Some(verify_trace(&trace))
    } else {
        None
    };
    let attachments: usize = trace.stages.iter().map(|s| s.steps.len()).sum();
    let chain: Vec<String> = trace
        .objects
        .iter()
        .map(|o| o.canonical_form().to_string())
        .collect();

    let payload = json!({
        "morphism": morphism,
        "map": map_line(f),
        "variant": enum_str(&cfg.variant),
        "stop_rule": enum_str(&cfg.stop_rule),
        "termination": enum_str(&trace.termination),
        "stages": trace.stage_maps.len(),
        "attachments": attachments,
        "chain": chain,
        "f_star": trace.f_star,
        "f_lambda": trace.f_lambda,
        "f_lambda_is_iso": trace.f_lambda.is_iso(),
        "f_lambda_is_split_mono": trace.f_lambda.is_split_mono().is_some(),
        "verified": verified,
        "trace": serde_json::to_value(&trace).map_err(Failure::emit)?,
    });

    let mut md = String::new();
    let _ = writeln!(md, "## factorization: {morphism}");
    let _ = writeln!(md, "- map: {}", map_line(f));
    let _ = writeln!(
        md,
        "- variant: {}, stop rule: {}, stage budget: {}",
        enum_str(&cfg.variant),
        enum_str(&cfg.stop_rule),
        cfg.max_stage
    );
    let _ = writeln!(md, "- termination: {}", enum_str(&trace.termination));
    if trace.stage_maps.is_empty() {
        let _ = writeln!(md, "- 0 stages, f_lambda = f");
    } else {
        let _ = writeln!(
            md,
            "- stages: {}, attachments: {}",
            trace.stage_maps.len(),
            attachments
        );
        let _ = writeln!(md, "- chain: {}", chain.join(" -> "));
    }
    let _ = writeln!(
        md,
        "- f_star: {} (mono: {})",
        map_line(&trace.f_star),
        trace.f_star.is_mono()
    );
    let _ = writeln!(
        md,
        "- f_lambda: {} (iso: {}, split mono: {})",
        map_line(&trace.f_lambda),
        trace.f_lambda.is_iso(),
        trace.f_lambda.is_split_mono().is_some()
    );
    let _ = writeln!(md, "- certificates: {}", verdict_line(verified));

    Ok(CommandOutcome {
        json: envelope("factorize", args.seed, payload),
        markdown: md,
        exit: if verified == Some(false) { 1 } else { 0 },
    })
}

fn verdict_line(verified: Option<bool>) -> &'static str {
    match verified {
        Some(true) => "verified",
        Some(false) => "FAILED verification",
        None => "not checked (pass --verify)",
    }
}

/// Replay everything the trace claims: the internal certificates, a JSON
/// round trip, and for strict runs the chain-of-pushouts certificate.
fn verify_trace(trace: &FactorizationTrace) -> bool {
    if !trace.verify() {
        return false;
    }
    let Ok(text) = serde_json::to_string(trace) else {
        return false;
    };
    let Ok(back) = serde_json::from_str::<FactorizationTrace>(&text) else {
        return false;
    };
    if !back.verify() {
        return false;
    }
    if trace.config.variant == Variant::Strict && trace.chain_certificate().is_err() {
        return false;
    }
    true
}

pub fn cmd_reflect(file: &ProblemFile, args: &RunArgs) -> Result<CommandOutcome, Failure> {
    let TaskSpec::Reflect {
        object,
        generators,
        orthogonal,
    } = &file.task
    else {
        unreachable!("task kind checked by the dispatcher");
    };
    let a = &file.objects[object];
    let class = &file.classes[generators];

    if *orthogonal {
        let cfg = engine_config(file, args, class.clone());
        let (unit, target) =
            orthogonal_reflect(a, class, cfg.max_stage).map_err(Failure::from_core)?;
        let verified = if args.verify {
            Some(orthogonal_universal(&unit, class, &universe(file, args)).map_err(Failure::from_core)?)
        } else {
            None
        };
        let payload = json!({
            "object": object,
            "mode": "orthogonal",
            "unit": unit,
            "unit_line": map_line(&unit),
            "target": target,
            "target_form": target.canonical_form().to_string(),
            "universal_property": verified,
        });
        let mut md = String::new();
        let _ = writeln!(md, "## orthogonal reflection: {object}");
        let _ = writeln!(md, "- unit: {}", map_line(&unit));
        let _ = writeln!(md, "- target: {}", target.canonical_form());
        let _ = writeln!(md, "- universal property: {}", verdict_line(verified));
        return Ok(CommandOutcome {
            json: envelope("reflect", args.seed, payload),
            markdown: md,
            exit: if verified == Some(false) { 1 } else { 0 },
        });
    }

    let cfg = engine_config(file, args, class.clone());
    let res = weak_reflect(a, &cfg).map_err(Failure::from_core)?;
    let injectivity = if args.verify {
        Some(fp_injectivity_test(&res.a_star, &universe(file, args)).map_err(Failure::from_core)?)
    } else {
        None
    };
    let trace_ok = if args.verify {
        Some(verify_trace(&res.trace))
    } else {
        None
    };
    let passed = injectivity != Some(false) && trace_ok != Some(false);
    let payload = json!({
        "object": object,
        "mode": "weak",
        "unit": res.unit,
        "unit_line": map_line(&res.unit),
        "unit_mono": res.unit.is_mono(),
        "target": res.a_star,
        "target_form": res.a_star.canonical_form().to_string(),
        "termination": enum_str(&res.trace.termination),
        "injectivity": injectivity,
        "trace_verified": trace_ok,
        "trace": serde_json::to_value(&res.trace).map_err(Failure::emit)?,
    });
    let mut md = String::new();
    let _ = writeln!(md, "## weak reflection: {object}");
    let _ = writeln!(
        md,
        "- unit: {} (mono: {})",
        map_line(&res.unit),
        res.unit.is_mono()
    );
    let _ = writeln!(md, "- target: {}", res.a_star.canonical_form());
    let _ = writeln!(md, "- termination: {}", enum_str(&res.trace.termination));
    let _ = writeln!(md, "- injectivity certificate: {}", verdict_line(injectivity));
    Ok(CommandOutcome {
        json: envelope("reflect", args.seed, payload),
        markdown: md,
        exit: if passed { 0 } else { 1 },
    })
}

/// Does every map from the unit's domain into a class-orthogonal universe
/// object factor through the unit exactly once?
fn orthogonal_universal(
    unit: &FpMorphism,
    class: &MorphismClass,
    u: &Universe,
) -> CoreResult<bool> {
    let perp = perp_objects(class, u)?;
    for k in &perp.members {
        let candidates = hom_enumerate(unit.cod(), k)?;
        for m in hom_enumerate(unit.dom(), k)? {
            let count = candidates
                .iter()
                .filter(|h| compose(h, unit).equals(&m))
                .count();
            if count != 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn cmd_classify(file: &ProblemFile, args: &RunArgs) -> Result<CommandOutcome, Failure> {
    let TaskSpec::Classify {
        operator,
        class,
        objects,
    } = &file.task
    else {
        unreachable!("task kind checked by the dispatcher");
    };
    let u = universe(file, args);

    let outcome = |payload: Value, md: String| -> Result<CommandOutcome, Failure> {
        Ok(CommandOutcome {
            json: envelope("classify", args.seed, payload),
            markdown: md,
            exit: 0,
        })
    };

    // the two object-valued operators
    if matches!(operator.as_str(), "injective-objects" | "orthogonal-objects") {
        let n = &file.classes[class.as_ref().expect("validated at parse")];
        let result = match operator.as_str() {
            "injective-objects" => triangle_objects(n, &u),
            _ => perp_objects(n, &u),
        }
        .map_err(Failure::from_core)?;
        let forms: Vec<String> = result
            .members
            .iter()
            .map(|m| m.canonical_form().to_string())
            .collect();
        let payload = json!({
            "operator": operator,
            "class": class,
            "universe": universe_line(&u),
            "count": forms.len(),
            "members": forms,
            "defining_relation": result.defining_relation,
        });
        let mut md = String::new();
        let _ = writeln!(md, "## classification: {operator}");
        let _ = writeln!(md, "- class: {}", class.as_deref().unwrap_or("-"));
        let _ = writeln!(md, "- universe: {}", universe_line(&u));
        let _ = writeln!(
            md,
            "- members ({} of {}): {}",
            forms.len(),
            u.objects().len(),
            forms.join(", ")
        );
        return outcome(payload, md);
    }

    // everything else filters the universe's morphisms
    let maps = u.all_morphisms().map_err(Failure::from_core)?;
    let members: Vec<FpMorphism> = match operator.as_str() {
        "right-lifting" => box_right(&file.classes[class.as_ref().unwrap()], &maps),
        "left-lifting" => box_left(&maps, &file.classes[class.as_ref().unwrap()]),
        "unique-right-lifting" => downarrow(&file.classes[class.as_ref().unwrap()], &maps),
        "unique-left-lifting" => uparrow(&maps, &file.classes[class.as_ref().unwrap()]),
        name => {
            let oc = ObjectClass {
                members: objects.iter().map(|n| file.objects[n].clone()).collect(),
                defining_relation: "listed in the problem file".to_string(),
            };
            match name {
                "injective-morphisms" => triangle_morphisms(&oc, &maps),
                _ => top_morphisms(&oc, &maps),
            }
            .map_err(Failure::from_core)?
        }
    };
    let payload = json!({
        "operator": operator,
        "class": class,
        "objects": objects,
        "universe": universe_line(&u),
        "candidates": maps.len(),
        "count": members.len(),
        "members": members,
    });
    let mut md = String::new();
    let _ = writeln!(md, "## classification: {operator}");
    if let Some(c) = class {
        let _ = writeln!(md, "- class: {c}");
    }
    if !objects.is_empty() {
        let _ = writeln!(md, "- objects: {}", objects.join(", "));
    }
    let _ = writeln!(md, "- universe: {}", universe_line(&u));
    let _ = writeln!(md, "- members: {} of {} morphisms", members.len(), maps.len());
    outcome(payload, md)
}

pub fn cmd_check(file: &ProblemFile, args: &RunArgs) -> Result<CommandOutcome, Failure> {
    let TaskSpec::Check {
        suite,
        left,
        right,
        factorizer,
        pure,
    } = &file.task
    else {
        unreachable!("task kind checked by the dispatcher");
    };
    let u = universe(file, args);

    let (payload, md, passed) = match suite.as_str() {
        "wfs" | "ofs" => {
            let left = side_spec(file, left.as_ref().expect("validated at parse"));
            let right = side_spec(file, right.as_ref().expect("validated at parse"));
            let wire = factorizer.as_ref().expect("validated at parse");
            let mut fac: Box<dyn FnMut(&FpMorphism) -> CoreResult<(FpMorphism, FpMorphism)>> =
                match wire.kind.as_str() {
                    "as-left" => Box::new(|f| Ok((f.clone(), FpMorphism::identity(f.cod())))),
                    "as-right" => Box::new(|f| Ok((FpMorphism::identity(f.dom()), f.clone()))),
                    "engine" => {
                        let cfg = engine_config(
                            file,
                            args,
                            file.classes[wire.generators.as_ref().unwrap()].clone(),
                        );
                        Box::new(move |f| {
                            let t = run_factorization(f, &cfg)?;
                            Ok((t.f_star, t.f_lambda))
                        })
                    }
                    _ => {
                        let class = file.classes[wire.generators.as_ref().unwrap()].clone();
                        Box::new(move |f| orthogonal_factorize_one_step(f, &class))
                    }
                };
            let report = if suite == "wfs" {
                check_wfs_axioms(&left, &right, &u, &mut *fac)
            } else {
                check_factorization_system(&left, &right, &u, &mut *fac)
            }
            .map_err(Failure::from_core)?;
            let passed = report.passed();
            (
                serde_json::to_value(&report).map_err(Failure::emit)?,
                report.to_markdown(),
                passed,
            )
        }
        "unions" => {
            let source = SquareSource::FreeSystems { max_rank: 2 };
            let purity = if *pure { Some(&source) } else { None };
            let sweep = effective_unions_sweep(&u, purity).map_err(Failure::from_core)?;
            let passed = sweep.passed();
            (
                serde_json::to_value(&sweep).map_err(Failure::emit)?,
                sweep.to_markdown(),
                passed,
            )
        }
        "transfer" => {
            let report = transferability_check(&u).map_err(Failure::from_core)?;
            let passed = report.passed();
            (
                serde_json::to_value(&report).map_err(Failure::emit)?,
                report.to_markdown(),
                passed,
            )
        }
        _ => {
            let report = injectivity_decomposition_check(&u).map_err(Failure::from_core)?;
            let passed = report.passed();
            (
                serde_json::to_value(&report).map_err(Failure::emit)?,
                report.to_markdown(),
                passed,
            )
        }
    };

    Ok(CommandOutcome {
        json: envelope("check", args.seed, json!({ "suite": suite, "report": payload })),
        markdown: md,
        exit: if passed { 0 } else { 1 },
    })
}

fn side_spec<'a>(file: &'a ProblemFile, wire: &SideWire) -> SideSpec<'a> {
    let class = || &file.classes[wire.class.as_ref().expect("validated at parse")];
    match wire.spec.as_str() {
        "all" => SideSpec::All,
        "isos" => SideSpec::Isos,
        "listed" => SideSpec::Listed(class()),
        "generated" => SideSpec::Generated(class()),
        "right-polar" => SideSpec::RightPolarOf(class()),
        _ => SideSpec::LeftPolarOf(class()),
    }
}

pub fn cmd_oracle(file: &ProblemFile, args: &RunArgs) -> Result<CommandOutcome, Failure> {
    let TaskSpec::Oracle {
        problems,
        instances,
    } = &file.task
    else {
        unreachable!("task kind checked by the dispatcher");
    };

    let mut checked = 0u64;
    let mut failures: Vec<Value> = Vec::new();

    if !problems.is_empty() {
        for (i, wire) in problems.iter().enumerate() {
            let problem = build_problem(file, wire, i)?;
            let report = oracle_check(&problem).map_err(Failure::from_core)?;
            checked += 1;
            if !report.agree {
                failures.push(json!({
                    "problem": i,
                    "solver_count": report.solver_count,
                    "oracle_count": report.oracle_count,
                    "detail": report.detail,
                }));
            }
        }
    } else {
        let u = universe(file, args);
        run_batch(&u, *instances, args.seed, &mut checked, &mut failures)
            .map_err(Failure::from_core)?;
    }

    let discrepancies = failures.len();
    let payload = json!({
        "mode": if problems.is_empty() { "batch" } else { "listed" },
        "instances": checked,
        "discrepancies": discrepancies,
        "failures": failures,
    });
    let mut md = String::new();
    let _ = writeln!(md, "## oracle comparison");
    let _ = writeln!(md, "- instances: {checked}");
    let _ = writeln!(md, "- discrepancies: {discrepancies}");
    let _ = writeln!(md, "- seed: {}", args.seed);
    let exit = u8::from(discrepancies != 0);
    Ok(CommandOutcome {
        json: envelope("oracle", args.seed, payload),
        markdown: md,
        exit,
    })
}

fn build_problem(
    file: &ProblemFile,
    wire: &OracleProblemWire,
    index: usize,
) -> Result<LiftingProblem, Failure> {
    match wire {
        OracleProblemWire::Extension { n, u } => Ok(LiftingProblem::Extension(
            ExtensionProblem::new(file.morphisms[n].clone(), file.morphisms[u].clone()),
        )),
        OracleProblemWire::Lifting { p, i, u, v } => {
            let square = LiftingSquare::new(
                file.morphisms[p].clone(),
                file.morphisms[i].clone(),
                file.morphisms[u].clone(),
                file.morphisms[v].clone(),
            )
            .map_err(|e| Failure::Input(format!("task.problems[{index}]: {e}")))?;
            Ok(LiftingProblem::Lifting(square))
        }
    }
}

/// Seeded random solver-versus-enumeration comparison over a universe.
/// Extension problems are drawn directly; lifting squares are drawn by
/// sampling the commuting completions, which always include the zero square.
fn run_batch(
    u: &Universe,
    instances: u64,
    seed: u64,
    checked: &mut u64,
    failures: &mut Vec<Value>,
) -> CoreResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objects = u.objects();
    let mut cache: BTreeMap<(usize, usize), Rc<Vec<FpMorphism>>> = BTreeMap::new();
    let hom = |cache: &mut BTreeMap<(usize, usize), Rc<Vec<FpMorphism>>>,
                   i: usize,
                   j: usize|
     -> CoreResult<Rc<Vec<FpMorphism>>> {
        if let Some(hit) = cache.get(&(i, j)) {
            return Ok(hit.clone());
        }
        let list = Rc::new(hom_enumerate(&objects[i], &objects[j])?);
        cache.insert((i, j), list.clone());
        Ok(list)
    };

    for _ in 0..instances {
        let pick = |rng: &mut ChaCha8Rng| rng.gen_range(0..objects.len());
        let problem = if rng.gen_bool(0.5) {
            let (a, b, k) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let ns = hom(&mut cache, a, b)?;
            let us = hom(&mut cache, a, k)?;
            let n = ns[rng.gen_range(0..ns.len())].clone();
            let uu = us[rng.gen_range(0..us.len())].clone();
            LiftingProblem::Extension(ExtensionProblem::new(n, uu))
        } else {
            let (a, b, c, d) = (
                pick(&mut rng),
                pick(&mut rng),
                pick(&mut rng),
                pick(&mut rng),
            );
            let ps = hom(&mut cache, a, b)?;
            let is = hom(&mut cache, c, d)?;
            let tops = hom(&mut cache, a, c)?;
            let bottoms = hom(&mut cache, b, d)?;
            let p = ps[rng.gen_range(0..ps.len())].clone();
            let i = is[rng.gen_range(0..is.len())].clone();
            let mut squares = Vec::new();
            for top in tops.iter() {
                for bottom in bottoms.iter() {
                    if compose(&i, top).equals(&compose(bottom, &p)) {
                        squares.push((top.clone(), bottom.clone()));
                    }
                }
            }
            let (top, bottom) = squares[rng.gen_range(0..squares.len())].clone();
            LiftingProblem::Lifting(LiftingSquare::new(p, i, top, bottom)?)
        };
        let report = oracle_check(&problem)?;
        *checked += 1;
        if !report.agree {
            let detail = match &problem {
                LiftingProblem::Extension(prob) => json!({
                    "kind": "extension", "n": prob.n, "u": prob.u,
                }),
                LiftingProblem::Lifting(sq) => json!({
                    "kind": "lifting", "p": sq.p, "i": sq.i, "u": sq.u, "v": sq.v,
                }),
            };
            failures.push(json!({
                "problem": detail,
                "solver_count": report.solver_count,
                "oracle_count": report.oracle_count,
                "detail": report.detail,
            }));
        }
    }
    Ok(())
}
