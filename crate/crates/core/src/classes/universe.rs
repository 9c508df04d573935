//! Finite universes of modules. A universe is a deduplicated list of
//! isomorphism-class representatives that bounds every quantifier in the
//! class-operator layer: "for all objects" always means "for all objects of
//! the universe at hand".

use crate::error::{CoreError, Result};
use crate::exactlin::JsonInt;
use crate::fpmod::{hom_enumerate, FpModule, FpMorphism, Ring};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// One representative per isomorphism class of finite modules of order at
/// most `max_order`: direct sums of cyclics along a divisibility chain
/// d1 | d2 | ... with every di at least 2 (and dividing the modulus when the
/// ring is Z/n). Ordered by (order, chain), starting with the zero module.
pub fn universe_objects(ring: &Ring, max_order: u64) -> Vec<FpModule> {
    let mut chains: Vec<Vec<u64>> = Vec::new();
    let mut stack: Vec<u64> = Vec::new();
    collect_chains(ring, max_order, 1, &mut stack, &mut chains);
    chains.sort_by_key(|c| (c.iter().product::<u64>(), c.clone()));
    chains
        .into_iter()
        .map(|chain| {
            let cols: Vec<Vec<BigInt>> = chain
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let mut col = vec![BigInt::zero(); chain.len()];
                    col[i] = BigInt::from(*d);
                    col
                })
                .collect();
            FpModule::from_relation_columns(ring.clone(), chain.len(), cols)
        })
        .collect()
}

fn collect_chains(
    ring: &Ring,
    max_order: u64,
    product: u64,
    stack: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    out.push(stack.clone());
    let start = stack.last().copied().unwrap_or(2);
    let mut d = start;
    while product.saturating_mul(d) <= max_order {
        let divides_last = stack.last().map(|l| d % l == 0).unwrap_or(true);
        let divides_modulus = match ring.modulus() {
            Some(n) => (n % BigInt::from(d)).is_zero(),
            None => true,
        };
        if divides_last && divides_modulus {
            stack.push(d);
            collect_chains(ring, max_order, product * d, stack, out);
            stack.pop();
        }
        d += 1;
    }
}

/// A finite, iso-deduplicated object list over one ring.
#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "UniverseWire", try_from = "UniverseWire")]
pub struct Universe {
    ring: Ring,
    objects: Vec<FpModule>,
    max_order: Option<u64>,
}

impl Universe {
    /// Every finite module of order at most `max_order`, one per iso class.
    pub fn all_modules(ring: Ring, max_order: u64) -> Universe {
        let objects = universe_objects(&ring, max_order);
        Universe {
            ring,
            objects,
            max_order: Some(max_order),
        }
    }

    /// An explicit object list; duplicates up to isomorphism are dropped,
    /// keeping the first occurrence.
    pub fn from_objects(ring: Ring, objects: Vec<FpModule>) -> Result<Universe> {
        let mut kept: Vec<FpModule> = Vec::new();
        for m in objects {
            if m.ring() != &ring {
                return Err(CoreError::InvalidInput(
                    "universe object over a different ring".to_string(),
                ));
            }
            if !m.is_finite() {
                return Err(CoreError::InvalidInput(
                    "universe objects must be finite".to_string(),
                ));
            }
            if !kept.iter().any(|k| k.canonical_form() == m.canonical_form()) {
                kept.push(m);
            }
        }
        Ok(Universe {
            ring,
            objects: kept,
            max_order: None,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn objects(&self) -> &[FpModule] {
        &self.objects
    }

    /// Largest object order present, as a coarse size bound for searches that
    /// must not wander out of the universe.
    pub fn order_bound(&self) -> BigInt {
        if let Some(m) = self.max_order {
            return BigInt::from(m);
        }
        self.objects
            .iter()
            .filter_map(|o| o.order())
            .max()
            .unwrap_or_else(|| BigInt::from(1))
    }

    /// Is some object of the universe isomorphic to `m`?
    pub fn contains_iso_class(&self, m: &FpModule) -> bool {
        let cf = m.canonical_form();
        self.objects.iter().any(|o| o.canonical_form() == cf)
    }

    /// Every morphism between universe objects, ordered pair by ordered pair.
    /// Intended for small universes only; the count is quadratic in objects
    /// and exponential in generator counts.
    pub fn all_morphisms(&self) -> Result<Vec<FpMorphism>> {
        let mut out = Vec::new();
        for a in &self.objects {
            for b in &self.objects {
                out.extend(hom_enumerate(a, b)?);
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct UniverseWire {
    ring: Ring,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_order: Option<JsonInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    objects: Option<Vec<FpModule>>,
}

impl From<Universe> for UniverseWire {
    fn from(u: Universe) -> UniverseWire {
        match u.max_order {
            Some(m) => UniverseWire {
                ring: u.ring,
                max_order: Some(JsonInt(BigInt::from(m))),
                objects: None,
            },
            None => UniverseWire {
                ring: u.ring,
                max_order: None,
                objects: Some(u.objects),
            },
        }
    }
}

impl TryFrom<UniverseWire> for Universe {
    type Error = CoreError;

    fn try_from(w: UniverseWire) -> Result<Universe> {
        match (w.max_order, w.objects) {
            (Some(m), None) => {
                let m = u64::try_from(&m.0).map_err(|_| {
                    CoreError::InvalidInput("universe max_order out of range".to_string())
                })?;
                Ok(Universe::all_modules(w.ring, m))
            }
            (None, Some(objs)) => Universe::from_objects(w.ring, objs),
            _ => Err(CoreError::InvalidInput(
                "universe needs exactly one of max_order or objects".to_string(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn object_counts_over_z_mod_four() {
        // order <= 16 over Z/4: chains with entries in {2, 4}; by order:
        // 1: [], 2: [2], 4: [4] [2,2], 8: [2,4] [2,2,2],
        // 16: [4,4] [2,2,4] [2,2,2,2]
        let u = Universe::all_modules(Ring::zmod(4), 16);
        assert_eq!(u.objects().len(), 9);
        let forms: Vec<String> = u.objects().iter().map(|o| o.canonical_form().to_string()).collect();
        assert_eq!(forms[0], "0");
        assert!(forms.contains(&"Z/4 + Z/4".to_string()));
        assert!(!forms.contains(&"Z/8".to_string()));
        // all distinct
        for i in 0..forms.len() {
            for j in (i + 1)..forms.len() {
                assert_ne!(forms[i], forms[j]);
            }
        }
        // orders never exceed the bound
        for o in u.objects() {
            assert!(o.order().unwrap() <= BigInt::from(16));
        }
    }

    #[test]
    fn object_counts_over_z() {
        // order <= 12 over Z: abelian groups of order 1,2,...,12; the count
        // is the sum over n <= 12 of the number of abelian groups of order n:
        // 1+1+1+2+1+1+1+3+2+1+1+2 = 17
        let u = Universe::all_modules(Ring::Z, 12);
        assert_eq!(u.objects().len(), 17);
        let forms: Vec<String> = u.objects().iter().map(|o| o.canonical_form().to_string()).collect();
        assert!(forms.contains(&"Z/8".to_string()));
        assert!(forms.contains(&"Z/2 + Z/4".to_string()));
        assert!(forms.contains(&"Z/2 + Z/2 + Z/2".to_string()));
        assert!(forms.contains(&"Z/12".to_string()));
    }

    #[test]
    fn explicit_lists_deduplicate_by_iso_class() {
        let r = Ring::zmod(4);
        // Z/2 presented two different ways
        let a = FpModule::cyclic(r.clone(), 2);
        let b = FpModule::from_relation_columns(
            r.clone(),
            2,
            vec![
                vec![BigInt::from(2), BigInt::zero()],
                vec![BigInt::zero(), BigInt::from(1)],
            ],
        );
        let u = Universe::from_objects(r.clone(), vec![a.clone(), b, FpModule::zero(r.clone())]).unwrap();
        assert_eq!(u.objects().len(), 2);
        assert!(u.contains_iso_class(&a));
        assert!(!u.contains_iso_class(&FpModule::cyclic(r.clone(), 4)));
        assert_eq!(u.order_bound(), BigInt::from(2));

        // infinite objects are rejected
        let free = FpModule::free_module(Ring::Z, 1);
        assert!(Universe::from_objects(Ring::Z, vec![free]).is_err());
    }

    #[test]
    fn universe_json_round_trip() {
        let u = Universe::all_modules(Ring::zmod(4), 8);
        let s = serde_json::to_string(&u).unwrap();
        assert_eq!(s, r#"{"ring":{"kind":"Zmod","n":4},"max_order":8}"#);
        let back: Universe = serde_json::from_str(&s).unwrap();
        assert_eq!(back.objects().len(), u.objects().len());

        let e = Universe::from_objects(
            Ring::zmod(4),
            vec![FpModule::cyclic(Ring::zmod(4), 2)],
        )
        .unwrap();
        let s = serde_json::to_string(&e).unwrap();
        let back: Universe = serde_json::from_str(&s).unwrap();
        assert_eq!(back.objects().len(), 1);
        assert!(serde_json::from_str::<Universe>(r#"{"ring":{"kind":"Z"}}"#).is_err());
    }
}
