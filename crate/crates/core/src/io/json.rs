//! JSON representation of a linear program (schema `dualkit-lp/1`).
//!
//! ```json
//! {
//!   "version": "dualkit-lp/1",
//!   "objective_sense": "minimize",
//!   "objective_constant": 0.0,
//!   "objective": {"x": 1.0},
//!   "variables": [{"name": "x", "lower": 0.0, "upper": "inf"}],
//!   "constraints": [{"name": "c", "coefs": {"x": 1.0}, "sense": ">=", "rhs": 1.0}]
//! }
//! ```
//!
//! Infinite bounds are written as the strings `"inf"` and `"-inf"`. Unknown
//! fields are rejected and errors report a JSON pointer to the offending value.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::lp::{
    sparse, ConstraintSense, LinearConstraint, LinearProgram, ObjectiveSense, Variable,
};

pub const SCHEMA_VERSION: &str = "dualkit-lp/1";

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("{pointer}: {message}")]
    Syntax { pointer: String, message: String },
    #[error("/version: unsupported schema version `{0}`")]
    Version(String),
    #[error("invalid model: {0}")]
    Invalid(String),
}

impl JsonError {
    /// JSON pointer of the offending value, when known.
    pub fn pointer(&self) -> Option<&str> {
        match self {
            JsonError::Syntax { pointer, .. } => Some(pointer),
            JsonError::Version(_) => Some("/version"),
            JsonError::Invalid(_) => None,
        }
    }
}

/// A bound that serializes finite values as numbers and infinities as strings.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Bound(f64);

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct BoundVisitor;
        impl Visitor<'_> for BoundVisitor {
            type Value = Bound;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Bound, E> {
                Ok(Bound(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Bound, E> {
                Ok(Bound(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Bound, E> {
                Ok(Bound(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Bound, E> {
                match v {
                    "inf" | "+inf" => Ok(Bound(f64::INFINITY)),
                    "-inf" => Ok(Bound(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(BoundVisitor)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LpDoc {
    version: String,
    objective_sense: ObjectiveSense,
    #[serde(default)]
    objective_constant: f64,
    #[serde(default)]
    objective: BTreeMap<String, f64>,
    variables: Vec<VarDoc>,
    #[serde(default)]
    constraints: Vec<ConDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VarDoc {
    name: String,
    lower: Bound,
    upper: Bound,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConDoc {
    name: String,
    coefs: BTreeMap<String, f64>,
    sense: ConstraintSense,
    rhs: f64,
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

pub fn lp_from_json(text: &str) -> Result<LinearProgram, JsonError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: LpDoc = serde_path_to_error::deserialize(de).map_err(|e| JsonError::Syntax {
        pointer: pointer(e.path()),
        message: e.inner().to_string(),
    })?;
    if doc.version != SCHEMA_VERSION {
        return Err(JsonError::Version(doc.version));
    }
    let mut lp = LinearProgram::new(doc.objective_sense);
    lp.objective_constant = doc.objective_constant;
    lp.objective = sparse(doc.objective.iter().map(|(k, v)| (k.as_str(), *v)));
    lp.variables = doc
        .variables
        .into_iter()
        .map(|v| Variable::new(v.name, v.lower.0, v.upper.0))
        .collect();
    lp.constraints = doc
        .constraints
        .into_iter()
        .map(|c| {
            LinearConstraint::new(
                c.name,
                c.coefs.iter().map(|(k, v)| (k.as_str(), *v)),
                c.sense,
                c.rhs,
            )
        })
        .collect();
    if let Some(d) = lp.validate().first() {
        return Err(JsonError::Invalid(d.to_string()));
    }
    Ok(lp)
}

fn to_doc(lp: &LinearProgram) -> LpDoc {
    LpDoc {
        version: SCHEMA_VERSION.to_string(),
        objective_sense: lp.objective_sense,
        objective_constant: lp.objective_constant,
        objective: lp.objective.clone(),
        variables: lp
            .variables
            .iter()
            .map(|v| VarDoc {
                name: v.name.clone(),
                lower: Bound(v.lower),
                upper: Bound(v.upper),
            })
            .collect(),
        constraints: lp
            .constraints
            .iter()
            .map(|c| ConDoc {
                name: c.name.clone(),
                coefs: c.coefficients.clone(),
                sense: c.sense,
                rhs: c.rhs,
            })
            .collect(),
    }
}

pub fn lp_to_json(lp: &LinearProgram) -> String {
    serde_json::to_string_pretty(&to_doc(lp)).expect("LP documents always serialize")
}

/// The document as a JSON value, for embedding in larger records.
pub fn lp_to_value(lp: &LinearProgram) -> serde_json::Value {
    serde_json::to_value(to_doc(lp)).expect("LP documents always serialize")
}
