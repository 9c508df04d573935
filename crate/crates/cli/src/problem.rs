//! Problem file ingestion: a single JSON document declaring a ring, named
//! objects, morphisms and classes, the task to run, and engine overrides.
//!
//! Parsing is a manual walk over the JSON tree so that every complaint can
//! name the exact field (`morphisms.f.matrix[0][1]` and the like) instead
//! of a deserializer's guess. All numbers must be exact integers; anything
//! with a decimal point or exponent is rejected at the field that holds it.

use crate::Failure;
use num_bigint::BigInt;
use serde_json::Value;
use soalab_core::classes::{ClosureFlags, MorphismClass};
use soalab_core::exactlin::BigMatrix;
use soalab_core::fpmod::{FpModule, FpMorphism, Ring};
use soalab_core::soa::{StopRule, Variant};
use std::collections::BTreeMap;

pub struct ProblemFile {
    pub ring: Ring,
    pub objects: BTreeMap<String, FpModule>,
    pub morphisms: BTreeMap<String, FpMorphism>,
    pub classes: BTreeMap<String, MorphismClass>,
    pub task: TaskSpec,
    pub engine: EngineSpec,
}

/// Engine settings from the file; command-line flags override these, and
/// anything still unset falls back to the engine defaults.
#[derive(Default)]
pub struct EngineSpec {
    pub variant: Option<Variant>,
    pub max_stages: Option<u64>,
    pub stop: Option<StopRule>,
    pub square_bound: Option<u64>,
}

pub enum TaskSpec {
    Factorize {
        morphism: String,
        generators: String,
    },
    Reflect {
        object: String,
        generators: String,
        orthogonal: bool,
    },
    Classify {
        operator: String,
        class: Option<String>,
        objects: Vec<String>,
    },
    Check {
        suite: String,
        left: Option<SideWire>,
        right: Option<SideWire>,
        factorizer: Option<FactorizerWire>,
        pure: bool,
    },
    Oracle {
        problems: Vec<OracleProblemWire>,
        instances: u64,
    },
}

impl TaskSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::Factorize { .. } => "factorize",
            TaskSpec::Reflect { .. } => "reflect",
            TaskSpec::Classify { .. } => "classify",
            TaskSpec::Check { .. } => "check",
            TaskSpec::Oracle { .. } => "oracle",
        }
    }
}

pub struct SideWire {
    pub spec: String,
    pub class: Option<String>,
}

pub struct FactorizerWire {
    pub kind: String,
    pub generators: Option<String>,
}

pub enum OracleProblemWire {
    Extension { n: String, u: String },
    Lifting { p: String, i: String, u: String, v: String },
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn as_object<'a>(
    v: &'a Value,
    path: &str,
) -> Result<&'a serde_json::Map<String, Value>, Failure> {
    v.as_object()
        .ok_or_else(|| input(format!("{path}: expected an object")))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, Failure> {
    v.as_array()
        .ok_or_else(|| input(format!("{path}: expected an array")))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, Failure> {
    v.as_str()
        .ok_or_else(|| input(format!("{path}: expected a string")))
}

fn get<'a>(
    obj: &'a serde_json::Map<String, Value>,
    key: &str,
    path: &str,
) -> Result<&'a Value, Failure> {
    obj.get(key)
        .ok_or_else(|| input(format!("{path}: missing required field '{key}'")))
}

/// Exact integer or bust. With arbitrary-precision JSON numbers the literal
/// text survives parsing, so `2.0` and `1e3` are still visible as floats.
fn take_integer(v: &Value, path: &str) -> Result<BigInt, Failure> {
    let Value::Number(n) = v else {
        return Err(input(format!("{path}: expected an integer")));
    };
    let text = n.to_string();
    if text.contains(['.', 'e', 'E']) {
        return Err(input(format!(
            "{path}: expected an exact integer, found the float {text}"
        )));
    }
    text.parse::<BigInt>()
        .map_err(|_| input(format!("{path}: unreadable integer {text}")))
}

fn take_u64(v: &Value, path: &str) -> Result<u64, Failure> {
    let n = take_integer(v, path)?;
    u64::try_from(n).map_err(|_| input(format!("{path}: expected a small nonnegative integer")))
}

fn string_list(v: &Value, path: &str) -> Result<Vec<String>, Failure> {
    let mut out = Vec::new();
    for (i, item) in as_array(v, path)?.iter().enumerate() {
        out.push(as_str(item, &format!("{path}[{i}]"))?.to_string());
    }
    Ok(out)
}

fn reject_unknown_keys(
    obj: &serde_json::Map<String, Value>,
    allowed: &[&str],
    path: &str,
) -> Result<(), Failure> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(input(format!("{path}: unknown field '{key}'")));
        }
    }
    Ok(())
}

fn integer_matrix(v: &Value, path: &str) -> Result<Vec<Vec<BigInt>>, Failure> {
    let mut rows = Vec::new();
    for (i, row) in as_array(v, path)?.iter().enumerate() {
        let row_path = format!("{path}[{i}]");
        let mut entries = Vec::new();
        for (j, entry) in as_array(row, &row_path)?.iter().enumerate() {
            entries.push(take_integer(entry, &format!("{row_path}[{j}]"))?);
        }
        rows.push(entries);
    }
    Ok(rows)
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile, Failure> {
        let root: Value = serde_json::from_str(text)
            .map_err(|e| input(format!("invalid JSON: {e}")))?;
        let top = as_object(&root, "problem file")?;
        reject_unknown_keys(
            top,
            &["ring", "objects", "morphisms", "classes", "task", "engine"],
            "problem file",
        )?;

        let ring: Ring = serde_json::from_value(get(top, "ring", "problem file")?.clone())
            .map_err(|e| input(format!("ring: {e}")))?;

        let mut objects = BTreeMap::new();
        if let Some(section) = top.get("objects") {
            for (name, spec) in as_object(section, "objects")? {
                let path = format!("objects.{name}");
                let spec = as_object(spec, &path)?;
                reject_unknown_keys(spec, &["generators", "relations"], &path)?;
                let gens_val = get(spec, "generators", &path)?;
                let gens = take_u64(gens_val, &format!("{path}.generators"))? as usize;
                let mut cols = Vec::new();
                if let Some(rels) = spec.get("relations") {
                    let rel_path = format!("{path}.relations");
                    for (i, rel) in as_array(rels, &rel_path)?.iter().enumerate() {
                        let col_path = format!("{rel_path}[{i}]");
                        let mut col = Vec::new();
                        for (j, entry) in as_array(rel, &col_path)?.iter().enumerate() {
                            col.push(take_integer(entry, &format!("{col_path}[{j}]"))?);
                        }
                        if col.len() != gens {
                            return Err(input(format!(
                                "{col_path}: relation has {} entries for {gens} generator(s)",
                                col.len()
                            )));
                        }
                        cols.push(col);
                    }
                }
                let relations = if cols.is_empty() {
                    BigMatrix::zeros(gens, 0)
                } else {
                    BigMatrix::from_cols(cols)
                };
                objects.insert(name.clone(), FpModule::new(ring.clone(), gens, relations));
            }
        }

        let mut morphisms = BTreeMap::new();
        if let Some(section) = top.get("morphisms") {
            for (name, spec) in as_object(section, "morphisms")? {
                let path = format!("morphisms.{name}");
                let spec = as_object(spec, &path)?;
                reject_unknown_keys(spec, &["dom", "cod", "matrix"], &path)?;
                let dom_name = as_str(get(spec, "dom", &path)?, &format!("{path}.dom"))?;
                let cod_name = as_str(get(spec, "cod", &path)?, &format!("{path}.cod"))?;
                let dom = objects
                    .get(dom_name)
                    .ok_or_else(|| input(format!("{path}.dom: unknown object '{dom_name}'")))?;
                let cod = objects
                    .get(cod_name)
                    .ok_or_else(|| input(format!("{path}.cod: unknown object '{cod_name}'")))?;
                let matrix_path = format!("{path}.matrix");
                let rows = integer_matrix(get(spec, "matrix", &path)?, &matrix_path)?;
                if rows.len() != cod.generators() {
                    return Err(input(format!(
                        "{matrix_path}: {} row(s) for a codomain with {} generator(s)",
                        rows.len(),
                        cod.generators()
                    )));
                }
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != dom.generators() {
                        return Err(input(format!(
                            "{matrix_path}[{i}]: {} column(s) for a domain with {} generator(s)",
                            row.len(),
                            dom.generators()
                        )));
                    }
                }
                let matrix = if rows.is_empty() {
                    BigMatrix::zeros(0, dom.generators())
                } else {
                    BigMatrix::from_rows(rows)
                };
                let f = FpMorphism::new(dom.clone(), cod.clone(), matrix)
                    .map_err(|e| input(format!("{path}: {e}")))?;
                morphisms.insert(name.clone(), f);
            }
        }

        let mut classes = BTreeMap::new();
        if let Some(section) = top.get("classes") {
            for (name, spec) in as_object(section, "classes")? {
                let path = format!("classes.{name}");
                let spec = as_object(spec, &path)?;
                reject_unknown_keys(spec, &["generators", "closure"], &path)?;
                let gen_names =
                    string_list(get(spec, "generators", &path)?, &format!("{path}.generators"))?;
                let mut gens = Vec::new();
                for (i, gname) in gen_names.iter().enumerate() {
                    let f = morphisms.get(gname).ok_or_else(|| {
                        input(format!(
                            "{path}.generators[{i}]: unknown morphism '{gname}'"
                        ))
                    })?;
                    gens.push(f.clone());
                }
                let closure = match spec.get("closure") {
                    Some(v) => {
                        let items = string_list(v, &format!("{path}.closure"))?;
                        ClosureFlags::from_strings(&items)
                            .map_err(|e| input(format!("{path}.closure: {e}")))?
                    }
                    None => ClosureFlags::none(),
                };
                let class = MorphismClass::with_closure(gens, closure)
                    .map_err(|e| input(format!("{path}: {e}")))?;
                classes.insert(name.clone(), class);
            }
        }

        let engine = match top.get("engine") {
            Some(v) => parse_engine(v)?,
            None => EngineSpec::default(),
        };

        let task = parse_task(get(top, "task", "problem file")?, &objects, &morphisms, &classes)?;

        Ok(ProblemFile {
            ring,
            objects,
            morphisms,
            classes,
            task,
            engine,
        })
    }
}

fn parse_engine(v: &Value) -> Result<EngineSpec, Failure> {
    let obj = as_object(v, "engine")?;
    reject_unknown_keys(obj, &["variant", "max_stages", "stop", "square_bound"], "engine")?;
    let mut spec = EngineSpec::default();
    if let Some(variant) = obj.get("variant") {
        spec.variant = Some(parse_variant(as_str(variant, "engine.variant")?)?);
    }
    if let Some(n) = obj.get("max_stages") {
        spec.max_stages = Some(take_u64(n, "engine.max_stages")?);
    }
    if let Some(stop) = obj.get("stop") {
        spec.stop = Some(parse_stop(as_str(stop, "engine.stop")?)?);
    }
    if let Some(n) = obj.get("square_bound") {
        spec.square_bound = Some(take_u64(n, "engine.square_bound")?);
    }
    Ok(spec)
}

pub fn parse_variant(s: &str) -> Result<Variant, Failure> {
    match s {
        "strict" => Ok(Variant::Strict),
        "loose" => Ok(Variant::Loose),
        "discard" => Ok(Variant::Discard),
        other => Err(input(format!("unknown variant '{other}'"))),
    }
}

pub fn parse_stop(s: &str) -> Result<StopRule, Failure> {
    match s {
        "iso" => Ok(StopRule::Iso),
        "box" => Ok(StopRule::BoxCertified),
        "max" => Ok(StopRule::MaxStage),
        other => Err(input(format!("unknown stop rule '{other}'"))),
    }
}

fn require_morphism(
    morphisms: &BTreeMap<String, FpMorphism>,
    name: &str,
    path: &str,
) -> Result<(), Failure> {
    if morphisms.contains_key(name) {
        Ok(())
    } else {
        Err(input(format!("{path}: unknown morphism '{name}'")))
    }
}

fn require_class(
    classes: &BTreeMap<String, MorphismClass>,
    name: &str,
    path: &str,
) -> Result<(), Failure> {
    if classes.contains_key(name) {
        Ok(())
    } else {
        Err(input(format!("{path}: unknown class '{name}'")))
    }
}

fn parse_task(
    v: &Value,
    objects: &BTreeMap<String, FpModule>,
    morphisms: &BTreeMap<String, FpMorphism>,
    classes: &BTreeMap<String, MorphismClass>,
) -> Result<TaskSpec, Failure> {
    let obj = as_object(v, "task")?;
    let kind = as_str(get(obj, "kind", "task")?, "task.kind")?;
    match kind {
        "factorize" => {
            reject_unknown_keys(obj, &["kind", "morphism", "generators"], "task")?;
            let morphism = as_str(get(obj, "morphism", "task")?, "task.morphism")?.to_string();
            let generators =
                as_str(get(obj, "generators", "task")?, "task.generators")?.to_string();
            require_morphism(morphisms, &morphism, "task.morphism")?;
            require_class(classes, &generators, "task.generators")?;
            Ok(TaskSpec::Factorize {
                morphism,
                generators,
            })
        }
        "reflect" => {
            reject_unknown_keys(obj, &["kind", "object", "generators", "mode"], "task")?;
            let object = as_str(get(obj, "object", "task")?, "task.object")?.to_string();
            let generators =
                as_str(get(obj, "generators", "task")?, "task.generators")?.to_string();
            if !objects.contains_key(&object) {
                return Err(input(format!("task.object: unknown object '{object}'")));
            }
            require_class(classes, &generators, "task.generators")?;
            let orthogonal = match obj.get("mode") {
                None => false,
                Some(m) => match as_str(m, "task.mode")? {
                    "weak" => false,
                    "orthogonal" => true,
                    other => {
                        return Err(input(format!("task.mode: unknown mode '{other}'")));
                    }
                },
            };
            Ok(TaskSpec::Reflect {
                object,
                generators,
                orthogonal,
            })
        }
        "classify" => {
            reject_unknown_keys(obj, &["kind", "operator", "class", "objects"], "task")?;
            let operator = as_str(get(obj, "operator", "task")?, "task.operator")?.to_string();
            let class = match obj.get("class") {
                Some(c) => {
                    let name = as_str(c, "task.class")?.to_string();
                    require_class(classes, &name, "task.class")?;
                    Some(name)
                }
                None => None,
            };
            let object_names = match obj.get("objects") {
                Some(v) => {
                    let names = string_list(v, "task.objects")?;
                    for (i, n) in names.iter().enumerate() {
                        if !objects.contains_key(n) {
                            return Err(input(format!(
                                "task.objects[{i}]: unknown object '{n}'"
                            )));
                        }
                    }
                    names
                }
                None => Vec::new(),
            };
            let class_based = [
                "injective-objects",
                "orthogonal-objects",
                "right-lifting",
                "left-lifting",
                "unique-right-lifting",
                "unique-left-lifting",
            ];
            let object_based = ["injective-morphisms", "orthogonal-morphisms"];
            if class_based.contains(&operator.as_str()) {
                if class.is_none() {
                    return Err(input(format!(
                        "task.class: operator '{operator}' needs a class"
                    )));
                }
            } else if object_based.contains(&operator.as_str()) {
                if object_names.is_empty() {
                    return Err(input(format!(
                        "task.objects: operator '{operator}' needs at least one object"
                    )));
                }
            } else {
                return Err(input(format!(
                    "task.operator: unknown operator '{operator}'"
                )));
            }
            Ok(TaskSpec::Classify {
                operator,
                class,
                objects: object_names,
            })
        }
        "check" => {
            reject_unknown_keys(
                obj,
                &["kind", "suite", "left", "right", "factorizer", "pure"],
                "task",
            )?;
            let suite = as_str(get(obj, "suite", "task")?, "task.suite")?.to_string();
            let known = ["wfs", "ofs", "unions", "transfer", "decomposition"];
            if !known.contains(&suite.as_str()) {
                return Err(input(format!("task.suite: unknown suite '{suite}'")));
            }
            let side = |key: &str| -> Result<Option<SideWire>, Failure> {
                let Some(v) = obj.get(key) else {
                    return Ok(None);
                };
                let path = format!("task.{key}");
                let o = as_object(v, &path)?;
                reject_unknown_keys(o, &["spec", "class"], &path)?;
                let spec = as_str(get(o, "spec", &path)?, &format!("{path}.spec"))?.to_string();
                let needs_class = !matches!(spec.as_str(), "all" | "isos");
                if !matches!(
                    spec.as_str(),
                    "all" | "isos" | "listed" | "generated" | "right-polar" | "left-polar"
                ) {
                    return Err(input(format!("{path}.spec: unknown side spec '{spec}'")));
                }
                let class = match o.get("class") {
                    Some(c) => {
                        let name = as_str(c, &format!("{path}.class"))?.to_string();
                        require_class(classes, &name, &format!("{path}.class"))?;
                        Some(name)
                    }
                    None => None,
                };
                if needs_class && class.is_none() {
                    return Err(input(format!("{path}.class: side spec '{spec}' needs a class")));
                }
                Ok(Some(SideWire { spec, class }))
            };
            let left = side("left")?;
            let right = side("right")?;
            if matches!(suite.as_str(), "wfs" | "ofs") && (left.is_none() || right.is_none()) {
                return Err(input(format!(
                    "task: suite '{suite}' needs both 'left' and 'right' sides"
                )));
            }
            let factorizer = match obj.get("factorizer") {
                Some(v) => {
                    let o = as_object(v, "task.factorizer")?;
                    reject_unknown_keys(o, &["kind", "generators"], "task.factorizer")?;
                    let fkind =
                        as_str(get(o, "kind", "task.factorizer")?, "task.factorizer.kind")?
                            .to_string();
                    let generators = match o.get("generators") {
                        Some(g) => {
                            let name = as_str(g, "task.factorizer.generators")?.to_string();
                            require_class(classes, &name, "task.factorizer.generators")?;
                            Some(name)
                        }
                        None => None,
                    };
                    match fkind.as_str() {
                        "as-left" | "as-right" => {}
                        "engine" | "one-step" => {
                            if generators.is_none() {
                                return Err(input(format!(
                                    "task.factorizer.generators: factorizer '{fkind}' needs a generator class"
                                )));
                            }
                        }
                        other => {
                            return Err(input(format!(
                                "task.factorizer.kind: unknown factorizer '{other}'"
                            )));
                        }
                    }
                    Some(FactorizerWire {
                        kind: fkind,
                        generators,
                    })
                }
                None => None,
            };
            if matches!(suite.as_str(), "wfs" | "ofs") && factorizer.is_none() {
                return Err(input(format!("task: suite '{suite}' needs a factorizer")));
            }
            let pure = match obj.get("pure") {
                Some(Value::Bool(b)) => *b,
                Some(_) => return Err(input("task.pure: expected a boolean".to_string())),
                None => false,
            };
            Ok(TaskSpec::Check {
                suite,
                left,
                right,
                factorizer,
                pure,
            })
        }
        "oracle" => {
            reject_unknown_keys(obj, &["kind", "problems", "instances"], "task")?;
            let mut problems = Vec::new();
            if let Some(list) = obj.get("problems") {
                for (i, p) in as_array(list, "task.problems")?.iter().enumerate() {
                    let path = format!("task.problems[{i}]");
                    let o = as_object(p, &path)?;
                    let pkind = as_str(get(o, "kind", &path)?, &format!("{path}.kind"))?;
                    let name = |key: &str| -> Result<String, Failure> {
                        let n = as_str(get(o, key, &path)?, &format!("{path}.{key}"))?;
                        require_morphism(morphisms, n, &format!("{path}.{key}"))?;
                        Ok(n.to_string())
                    };
                    match pkind {
                        "extension" => {
                            reject_unknown_keys(o, &["kind", "n", "u"], &path)?;
                            let n = name("n")?;
                            let u = name("u")?;
                            if morphisms[&n].dom() != morphisms[&u].dom() {
                                return Err(input(format!(
                                    "{path}: 'n' and 'u' must share a domain"
                                )));
                            }
                            problems.push(OracleProblemWire::Extension { n, u });
                        }
                        "lifting" => {
                            reject_unknown_keys(o, &["kind", "p", "i", "u", "v"], &path)?;
                            problems.push(OracleProblemWire::Lifting {
                                p: name("p")?,
                                i: name("i")?,
                                u: name("u")?,
                                v: name("v")?,
                            });
                        }
                        other => {
                            return Err(input(format!(
                                "{path}.kind: unknown problem kind '{other}'"
                            )));
                        }
                    }
                }
            }
            let instances = match obj.get("instances") {
                Some(v) => take_u64(v, "task.instances")?,
                None => 200,
            };
            Ok(TaskSpec::Oracle {
                problems,
                instances,
            })
        }
        other => Err(input(format!("task.kind: unknown task '{other}'"))),
    }
}
