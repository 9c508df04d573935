use crate::exactlin::JsonInt;
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Base ring of a module computation: the integers, or the integers mod n.
///
/// Every value in a single computation lives over one ring; mixing rings is a
/// caller bug and panics.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "RingWire", try_from = "RingWire")]
pub enum Ring {
    Z,
    Zmod(BigInt),
}

impl Ring {
    pub fn zmod(n: impl Into<BigInt>) -> Self {
        let n = n.into();
        assert!(n > BigInt::one(), "modulus must be at least 2");
        Ring::Zmod(n)
    }

    pub fn modulus(&self) -> Option<&BigInt> {
        match self {
            Ring::Z => None,
            Ring::Zmod(n) => Some(n),
        }
    }

    /// Finite as a set, hence every module over it is finite.
    pub fn is_finite(&self) -> bool {
        matches!(self, Ring::Zmod(_))
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Z => write!(f, "Z"),
            Ring::Zmod(n) => write!(f, "Z/{n}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RingWire {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<JsonInt>,
}

impl From<Ring> for RingWire {
    fn from(r: Ring) -> Self {
        match r {
            Ring::Z => RingWire {
                kind: "Z".to_string(),
                n: None,
            },
            Ring::Zmod(n) => RingWire {
                kind: "Zmod".to_string(),
                n: Some(JsonInt(n)),
            },
        }
    }
}

impl TryFrom<RingWire> for Ring {
    type Error = String;

    fn try_from(w: RingWire) -> Result<Self, String> {
        match (w.kind.as_str(), w.n) {
            ("Z", None) => Ok(Ring::Z),
            ("Z", Some(_)) => Err("ring of kind \"Z\" must not carry a modulus".to_string()),
            ("Zmod", Some(JsonInt(n))) => {
                if n > BigInt::one() {
                    Ok(Ring::Zmod(n))
                } else {
                    Err(format!("modulus must be at least 2, got {n}"))
                }
            }
            ("Zmod", None) => Err("ring of kind \"Zmod\" requires a modulus n".to_string()),
            (other, _) => Err(format!("unknown ring kind {other:?}")),
        }
    }
}
