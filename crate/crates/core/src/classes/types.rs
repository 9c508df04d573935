//! Generated morphism classes and computed object classes.

use crate::error::{CoreError, Result};
use crate::fpmod::{FpModule, FpMorphism};
use serde::{Deserialize, Serialize};

/// Declared closure operations under which a [`MorphismClass`] is to be read:
/// pushouts of members, chains of at most `ch` pushout steps, retracts, and
/// plain composition. Flags only widen what the membership searches look for;
/// the stored generators are never expanded eagerly.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosureFlags {
    pub po: bool,
    pub ch: Option<u64>,
    pub re: bool,
    pub compose: bool,
}

impl ClosureFlags {
    pub fn none() -> ClosureFlags {
        ClosureFlags::default()
    }

    /// The textual flag list used in serialized classes: `"po"`, `"ch:k"`,
    /// `"re"`, `"compose"`.
    pub fn to_strings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.po {
            out.push("po".to_string());
        }
        if let Some(k) = self.ch {
            out.push(format!("ch:{k}"));
        }
        if self.re {
            out.push("re".to_string());
        }
        if self.compose {
            out.push("compose".to_string());
        }
        out
    }

    pub fn from_strings(items: &[String]) -> Result<ClosureFlags> {
        let mut flags = ClosureFlags::none();
        for item in items {
            match item.as_str() {
                "po" => flags.po = true,
                "re" => flags.re = true,
                "compose" => flags.compose = true,
                other => {
                    if let Some(k) = other.strip_prefix("ch:") {
                        let k: u64 = k.parse().map_err(|_| {
                            CoreError::InvalidInput(format!("bad chain bound in closure flag {other:?}"))
                        })?;
                        flags.ch = Some(k);
                    } else {
                        return Err(CoreError::InvalidInput(format!(
                            "unknown closure flag {other:?}"
                        )));
                    }
                }
            }
        }
        Ok(flags)
    }
}

/// A morphism class given by finitely many generators plus closure flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "MorphismClassWire", try_from = "MorphismClassWire")]
pub struct MorphismClass {
    generators: Vec<FpMorphism>,
    closure: ClosureFlags,
}

impl MorphismClass {
    pub fn new(generators: Vec<FpMorphism>) -> Result<MorphismClass> {
        MorphismClass::with_closure(generators, ClosureFlags::none())
    }

    pub fn with_closure(generators: Vec<FpMorphism>, closure: ClosureFlags) -> Result<MorphismClass> {
        if let Some(first) = generators.first() {
            for g in &generators {
                if g.dom().ring() != first.dom().ring() {
                    return Err(CoreError::InvalidInput(
                        "class generators over different rings".to_string(),
                    ));
                }
            }
        }
        Ok(MorphismClass { generators, closure })
    }

    pub fn generators(&self) -> &[FpMorphism] {
        &self.generators
    }

    pub fn closure(&self) -> &ClosureFlags {
        &self.closure
    }
}

#[derive(Serialize, Deserialize)]
struct MorphismClassWire {
    generators: Vec<FpMorphism>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    closure: Vec<String>,
}

impl From<MorphismClass> for MorphismClassWire {
    fn from(c: MorphismClass) -> MorphismClassWire {
        MorphismClassWire {
            generators: c.generators,
            closure: c.closure.to_strings(),
        }
    }
}

impl TryFrom<MorphismClassWire> for MorphismClass {
    type Error = CoreError;

    fn try_from(w: MorphismClassWire) -> Result<MorphismClass> {
        let closure = ClosureFlags::from_strings(&w.closure)?;
        MorphismClass::with_closure(w.generators, closure)
    }
}

/// A finite object class, always the output of some operator over a concrete
/// universe; `defining_relation` records which one and against what bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObjectClass {
    pub members: Vec<FpModule>,
    pub defining_relation: String,
}

impl ObjectClass {
    pub fn contains_iso_class(&self, m: &FpModule) -> bool {
        let cf = m.canonical_form();
        self.members.iter().any(|o| o.canonical_form() == cf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpmod::Ring;

    #[test]
    fn closure_flags_round_trip() {
        let f = ClosureFlags {
            po: true,
            ch: Some(4),
            re: true,
            compose: false,
        };
        let back = ClosureFlags::from_strings(&f.to_strings()).unwrap();
        assert_eq!(back, f);
        assert!(ClosureFlags::from_strings(&["ch:x".to_string()]).is_err());
        assert!(ClosureFlags::from_strings(&["frobnicate".to_string()]).is_err());
    }

    #[test]
    fn class_json_shape() {
        let r = Ring::zmod(4);
        let z2 = FpModule::cyclic(r.clone(), 2);
        let id = FpMorphism::identity(&z2);
        let c = MorphismClass::with_closure(
            vec![id],
            ClosureFlags {
                po: true,
                ch: Some(3),
                re: false,
                compose: false,
            },
        )
        .unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains(r#""closure":["po","ch:3"]"#));
        let back: MorphismClass = serde_json::from_str(&s).unwrap();
        assert_eq!(back.generators().len(), 1);
        assert_eq!(back.closure().ch, Some(3));

        // empty closure list is the default and is omitted on output
        let plain = MorphismClass::new(vec![FpMorphism::identity(&z2)]).unwrap();
        let s = serde_json::to_string(&plain).unwrap();
        assert!(!s.contains("closure"));
        let back: MorphismClass = serde_json::from_str(&s).unwrap();
        assert_eq!(back.closure(), &ClosureFlags::none());
    }

    #[test]
    fn mixed_ring_generators_rejected() {
        let a = FpMorphism::identity(&FpModule::cyclic(Ring::zmod(4), 2));
        let b = FpMorphism::identity(&FpModule::cyclic(Ring::Z, 2));
        assert!(MorphismClass::new(vec![a, b]).is_err());
    }
}
