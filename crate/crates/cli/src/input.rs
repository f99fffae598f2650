//! Input documents: single elements, sequences and partitions.
//!
//! Every loader reports failures as `field: message`, with the field
//! path relative to the document root.

use std::fs;
use std::path::Path;

use rickart_core::{
    AnyElement, ElementDocument, Error, MatrixElement, Partition, Spectral, StepFunction, TagRule, Tolerance,
};
use serde_json::{Map, Value};

/// An input or schema violation; the process exits with status 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub field: String,
    pub message: String,
}

impl InputError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        match e {
            Error::Schema { field, message } => InputError { field, message },
            other => InputError::new("input", other.to_string()),
        }
    }
}

/// A file's raw bytes and its parsed JSON.
pub struct Loaded {
    pub bytes: Vec<u8>,
    pub value: Value,
}

pub fn load(path: &Path, flag: &str) -> Result<Loaded, InputError> {
    let bytes = fs::read(path).map_err(|e| InputError::new(flag, format!("cannot read {}: {e}", path.display())))?;
    let value =
        serde_json::from_slice(&bytes).map_err(|e| InputError::new("document", format!("invalid JSON: {e}")))?;
    Ok(Loaded { bytes, value })
}

pub fn element_at(v: &Value, path: &str) -> Result<AnyElement, InputError> {
    let doc = ElementDocument::from_value_at(v, path)?;
    doc.to_element().map_err(|e| match e {
        Error::Schema { field, message } if !path.is_empty() => InputError::new(format!("{path}.{field}"), message),
        other => InputError::from(other),
    })
}

/// Models the commands can run on, recovered from a loaded element.
pub trait Kind: Spectral + Send + Sync + 'static {
    const NAME: &'static str;
    fn from_any(a: AnyElement) -> Option<Self>;

    /// The norm computed without the order: largest singular value, or
    /// largest modulus over the probes. `None` when unbounded.
    fn oracle_norm(&self, tol: &Tolerance) -> Option<f64>;
}

impl Kind for MatrixElement {
    const NAME: &'static str = "matrix";
    fn from_any(a: AnyElement) -> Option<Self> {
        match a {
            AnyElement::Matrix(m) => Some(m),
            AnyElement::Stepfn(_) => None,
        }
    }

    fn oracle_norm(&self, _tol: &Tolerance) -> Option<f64> {
        Some(self.spectral_norm())
    }
}

impl Kind for StepFunction {
    const NAME: &'static str = "stepfn";
    fn from_any(a: AnyElement) -> Option<Self> {
        match a {
            AnyElement::Stepfn(f) => Some(f),
            AnyElement::Matrix(_) => None,
        }
    }

    fn oracle_norm(&self, tol: &Tolerance) -> Option<f64> {
        if self.tail_unbounded(tol) {
            return None;
        }
        Some(self.probe_values(tol).iter().map(|z| z.norm()).fold(0.0, f64::max))
    }
}

/// Narrows `a` to the model `E`, naming `field` if the kinds differ.
pub fn narrow<E: Kind>(a: AnyElement, field: &str) -> Result<E, InputError> {
    let found = a.kind();
    E::from_any(a)
        .ok_or_else(|| InputError::new(format!("{field}.kind"), format!("expected {}, found {found}", E::NAME)))
}

/// Checks that `b` lives in the same algebra as `a`.
pub fn compatible<E: Kind>(a: &E, b: &E, field: &str) -> Result<(), InputError> {
    a.check_compatible(b).map_err(|e| InputError::new(field, e.to_string()))
}

fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>, InputError> {
    v.as_object()
        .ok_or_else(|| InputError::new(field, "expected an object"))
}

fn number(v: &Value, field: &str) -> Result<f64, InputError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| InputError::new(field, "expected a finite number"))
}

fn numbers(v: &Value, field: &str) -> Result<Vec<f64>, InputError> {
    v.as_array()
        .ok_or_else(|| InputError::new(field, "expected an array of numbers"))?
        .iter()
        .enumerate()
        .map(|(k, x)| number(x, &format!("{field}[{k}]")))
        .collect()
}

/// A geometric continuation `first * ratio^k` with bounds `first_eps * ratio^k`.
pub struct TailDocument {
    pub first: AnyElement,
    pub first_eps: f64,
    pub ratio: f64,
}

/// `{"terms": [...], "eps": [...], "tail": {...}, "limit": {...}}`.
/// `eps` and `tail` describe dominated series; `limit` closes an
/// increasing sequence.
pub struct SequenceDocument {
    pub terms: Vec<AnyElement>,
    pub eps: Option<Vec<f64>>,
    pub tail: Option<TailDocument>,
    pub limit: Option<AnyElement>,
}

const SEQUENCE_FIELDS: [&str; 4] = ["terms", "eps", "tail", "limit"];

pub fn sequence(v: &Value) -> Result<SequenceDocument, InputError> {
    let obj = object(v, "document")?;
    if let Some(k) = obj.keys().find(|k| !SEQUENCE_FIELDS.contains(&k.as_str())) {
        return Err(InputError::new(k.as_str(), "unknown field"));
    }
    let raw = obj
        .get("terms")
        .ok_or_else(|| InputError::new("terms", "missing"))?
        .as_array()
        .ok_or_else(|| InputError::new("terms", "expected an array"))?;
    if raw.is_empty() {
        return Err(InputError::new("terms", "expected at least one element"));
    }
    let terms = raw
        .iter()
        .enumerate()
        .map(|(k, t)| element_at(t, &format!("terms[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let eps = match obj.get("eps") {
        None => None,
        Some(e) => {
            let eps = numbers(e, "eps")?;
            if eps.len() != terms.len() {
                return Err(InputError::new("eps", format!("expected {}", terms.len())));
            }
            if let Some(k) = eps.iter().position(|&x| x < 0.0) {
                return Err(InputError::new(format!("eps[{k}]"), "expected a non-negative number"));
            }
            Some(eps)
        }
    };
    let tail = match obj.get("tail") {
        None => None,
        Some(t) => {
            let t = object(t, "tail")?;
            let first = element_at(
                t.get("first").ok_or_else(|| InputError::new("tail.first", "missing"))?,
                "tail.first",
            )?;
            let first_eps = number(
                t.get("first_eps")
                    .ok_or_else(|| InputError::new("tail.first_eps", "missing"))?,
                "tail.first_eps",
            )?;
            let ratio = number(
                t.get("ratio").ok_or_else(|| InputError::new("tail.ratio", "missing"))?,
                "tail.ratio",
            )?;
            if !(0.0..1.0).contains(&ratio) {
                return Err(InputError::new(
                    "tail.ratio",
                    format!("expected 0 <= ratio < 1, found {ratio}"),
                ));
            }
            if first_eps < 0.0 {
                return Err(InputError::new("tail.first_eps", "expected a non-negative number"));
            }
            Some(TailDocument {
                first,
                first_eps,
                ratio,
            })
        }
    };
    let limit = obj.get("limit").map(|l| element_at(l, "limit")).transpose()?;
    Ok(SequenceDocument {
        terms,
        eps,
        tail,
        limit,
    })
}

/// `{"grid": [...], "tags": [...]}` or `{"grid": [...], "rule": "left"}`.
pub fn partition(v: &Value) -> Result<Partition, InputError> {
    let obj = object(v, "partition")?;
    let grid = numbers(
        obj.get("grid").ok_or_else(|| InputError::new("grid", "missing"))?,
        "grid",
    )?;
    let p = match (obj.get("tags"), obj.get("rule")) {
        (Some(_), Some(_)) => return Err(InputError::new("rule", "give either tags or rule, not both")),
        (Some(t), None) => Partition::new(grid, numbers(t, "tags")?),
        (None, r) => {
            let rule = match r {
                None => TagRule::Left,
                Some(r) => serde_json::from_value(r.clone())
                    .map_err(|_| InputError::new("rule", "expected one of left, mid, right"))?,
            };
            Partition::with_rule(grid, rule)
        }
    };
    p.map_err(|e| InputError::new("grid", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_err(text: &str) -> String {
        let v: Value = serde_json::from_str(text).unwrap();
        match sequence(&v) {
            Ok(_) => panic!("accepted {text}"),
            Err(e) => e.to_string(),
        }
    }

    #[test]
    fn sequence_fields_are_named() {
        let m = r#"{"kind":"matrix","n":1,"entries":[[1,0]]}"#;
        assert_eq!(seq_err(r#"{"eps":[]}"#), "terms: missing");
        assert_eq!(seq_err(r#"{"terms":[]}"#), "terms: expected at least one element");
        assert_eq!(
            seq_err(r#"{"terms":[{"kind":"matrix","n":2,"entries":[]}]}"#),
            "terms[0].entries: expected 4"
        );
        assert_eq!(seq_err(&format!(r#"{{"terms":[{m}],"eps":[1,2]}}"#)), "eps: expected 1");
        assert_eq!(
            seq_err(&format!(
                r#"{{"terms":[{m}],"tail":{{"first":{m},"first_eps":1,"ratio":1.5}}}}"#
            )),
            "tail.ratio: expected 0 <= ratio < 1, found 1.5"
        );
        assert_eq!(
            seq_err(&format!(r#"{{"terms":[{m}],"extra":1}}"#)),
            "extra: unknown field"
        );
    }

    #[test]
    fn partitions() {
        let p = partition(&serde_json::json!({"grid": [0.0, 1.0, 2.0], "rule": "mid"})).unwrap();
        assert_eq!(p.tags, vec![0.5, 1.5]);
        let e = partition(&serde_json::json!({"grid": [0.0, 1.0], "tags": [2.0]})).unwrap_err();
        assert_eq!(e.to_string(), "grid: bad partition: sample point 0 outside its cell");
        let e = partition(&serde_json::json!({"grid": [0.0, 1.0], "rule": "up"})).unwrap_err();
        assert_eq!(e.field, "rule");
    }

    #[test]
    fn narrowing_names_the_field() {
        let f = AnyElement::Stepfn(StepFunction::constant(rickart_core::C64::new(1.0, 0.0)));
        let e = narrow::<MatrixElement>(f, "with").unwrap_err();
        assert_eq!(e.to_string(), "with.kind: expected matrix, found stepfn");
    }
}
