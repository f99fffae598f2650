//! JSON interchange format for elements.
//!
//! ```json
//! {"kind": "matrix", "n": 2, "entries": [[1, 0], [0, 0], [0, 0], [2, 0]]}
//! {"kind": "stepfn", "default": [1, 0], "exceptions": {"0.5": [0, 0]}, "tail": "1/n"}
//! ```
//!
//! Complex numbers are `[re, im]` pairs; matrix entries are row-major.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::C64;
use crate::cocountable::{Point, StepFunction, TailExpr};
use crate::error::{Error, Result};
use crate::matrix::{MatrixElement, MAX_DIM};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ElementDocument {
    Matrix {
        n: usize,
        entries: Vec<[f64; 2]>,
    },
    Stepfn {
        default: [f64; 2],
        #[serde(default)]
        exceptions: BTreeMap<String, [f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<String>,
    },
}

/// An element of either model, as loaded from a document.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyElement {
    Matrix(MatrixElement),
    Stepfn(StepFunction),
}

impl AnyElement {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyElement::Matrix(_) => "matrix",
            AnyElement::Stepfn(_) => "stepfn",
        }
    }
}

fn complex_at(v: &Value, field: &str) -> Result<C64> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::schema(field, "expected [re, im] pair"))?;
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| Error::schema(field, "real part is not a number"))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| Error::schema(field, "imaginary part is not a number"))?;
    Ok(C64::new(re, im))
}

impl ElementDocument {
    /// Validates a raw JSON value, naming the offending field on failure.
    pub fn from_value(v: &Value) -> Result<Self> {
        Self::from_value_at(v, "")
    }

    /// As [`from_value`](Self::from_value), with field names prefixed by `path`.
    pub fn from_value_at(v: &Value, path: &str) -> Result<Self> {
        let f = |name: &str| {
            if path.is_empty() {
                name.to_string()
            } else {
                format!("{path}.{name}")
            }
        };
        let obj = v
            .as_object()
            .ok_or_else(|| Error::schema(if path.is_empty() { "document" } else { path }, "expected an object"))?;
        let kind = obj
            .get("kind")
            .ok_or_else(|| Error::schema(f("kind"), "missing"))?
            .as_str()
            .ok_or_else(|| Error::schema(f("kind"), "expected a string"))?;
        match kind {
            "matrix" => {
                let n = obj
                    .get("n")
                    .ok_or_else(|| Error::schema(f("n"), "missing"))?
                    .as_u64()
                    .ok_or_else(|| Error::schema(f("n"), "expected a positive integer"))?
                    as usize;
                if n == 0 || n > MAX_DIM {
                    return Err(Error::schema(f("n"), format!("expected 1..={MAX_DIM}, found {n}")));
                }
                let entries = obj
                    .get("entries")
                    .ok_or_else(|| Error::schema(f("entries"), "missing"))?
                    .as_array()
                    .ok_or_else(|| Error::schema(f("entries"), "expected an array"))?;
                if entries.len() != n * n {
                    return Err(Error::schema(f("entries"), format!("expected {}", n * n)));
                }
                let entries = entries
                    .iter()
                    .enumerate()
                    .map(|(k, e)| complex_at(e, &format!("{}[{k}]", f("entries"))).map(|z| [z.re, z.im]))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ElementDocument::Matrix { n, entries })
            }
            "stepfn" => {
                let default = complex_at(
                    obj.get("default")
                        .ok_or_else(|| Error::schema(f("default"), "missing"))?,
                    &f("default"),
                )?;
                let mut exceptions = BTreeMap::new();
                if let Some(ex) = obj.get("exceptions") {
                    let ex = ex
                        .as_object()
                        .ok_or_else(|| Error::schema(f("exceptions"), "expected an object"))?;
                    for (label, val) in ex {
                        let field = format!("{}.{label}", f("exceptions"));
                        Point::parse(label).map_err(|_| Error::schema(&field, "label is not a point of [0, 1]"))?;
                        let z = complex_at(val, &field)?;
                        exceptions.insert(label.clone(), [z.re, z.im]);
                    }
                }
                let tail = match obj.get("tail") {
                    None | Some(Value::Null) => None,
                    Some(Value::String(s)) => {
                        TailExpr::parse(s).map_err(|e| Error::schema(f("tail"), e.to_string()))?;
                        Some(s.clone())
                    }
                    Some(_) => return Err(Error::schema(f("tail"), "expected a string")),
                };
                Ok(ElementDocument::Stepfn {
                    default: [default.re, default.im],
                    exceptions,
                    tail,
                })
            }
            other => Err(Error::schema(f("kind"), format!("unknown kind '{other}'"))),
        }
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::schema("document", format!("invalid JSON: {e}")))?;
        Self::from_value(&v)
    }

    pub fn to_element(&self) -> Result<AnyElement> {
        match self {
            ElementDocument::Matrix { n, entries } => {
                let zs: Vec<C64> = entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                Ok(AnyElement::Matrix(MatrixElement::from_row_major(*n, &zs)?))
            }
            ElementDocument::Stepfn {
                default,
                exceptions,
                tail,
            } => {
                let mut map = BTreeMap::new();
                for (label, [re, im]) in exceptions {
                    let p = Point::parse(label)
                        .map_err(|_| Error::schema(format!("exceptions.{label}"), "label is not a point of [0, 1]"))?;
                    if map.insert(p, C64::new(*re, *im)).is_some() {
                        return Err(Error::schema(
                            format!("exceptions.{label}"),
                            "duplicate point (labels denote the same number)",
                        ));
                    }
                }
                let tail = tail
                    .as_deref()
                    .map(TailExpr::parse)
                    .transpose()
                    .map_err(|e| Error::schema("tail", e.to_string()))?;
                Ok(AnyElement::Stepfn(StepFunction::new(
                    C64::new(default[0], default[1]),
                    map,
                    tail,
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Element;
    use crate::tolerance::Tolerance;

    #[test]
    fn matrix_round_trip() {
        let x = MatrixElement::from_rows(&[
            &[C64::new(1.0, 0.5), C64::new(0.1, 0.0)],
            &[C64::new(-2.0, 0.0), C64::new(0.0, 3.0)],
        ]);
        let text = serde_json::to_string(&x.to_document()).unwrap();
        let back = ElementDocument::parse_str(&text).unwrap().to_element().unwrap();
        assert_eq!(back, AnyElement::Matrix(x));
    }

    #[test]
    fn stepfn_round_trip() {
        let t = Tolerance::default();
        let f = StepFunction::with_exceptions(C64::new(2.0, 0.0), &[("0.25", C64::new(3.0, -1.0))])
            .unwrap()
            .with_tail(TailExpr::parse("1/(n+1) + 0.5*i").unwrap());
        let text = serde_json::to_string(&f.to_document()).unwrap();
        let AnyElement::Stepfn(back) = ElementDocument::parse_str(&text).unwrap().to_element().unwrap() else {
            panic!("kind changed");
        };
        assert!(back.approx_eq(&f, &t));
    }

    #[test]
    fn diagnostics_name_fields() {
        let cases = [
            (
                r#"{"kind":"matrix","n":2,"entries":[[1,0],[0,0],[0,0]]}"#,
                "entries: expected 4",
            ),
            (r#"{"kind":"tensor"}"#, "kind: unknown kind 'tensor'"),
            (r#"{"n":2}"#, "kind: missing"),
            (
                r#"{"kind":"matrix","n":2,"entries":[[1,0],[0,0],[0,0],[1]]}"#,
                "entries[3]: expected [re, im] pair",
            ),
            (
                r#"{"kind":"stepfn","default":[1,0],"exceptions":{"1.5":[0,0]}}"#,
                "exceptions.1.5: label is not a point of [0, 1]",
            ),
            (
                r#"{"kind":"stepfn","default":[1,0],"tail":"n +"}"#,
                "tail: tail expression: unexpected end of input at offset 3",
            ),
            (r#"{"kind":"matrix","n":0,"entries":[]}"#, "n: expected 1..=16, found 0"),
        ];
        for (text, msg) in cases {
            let err = ElementDocument::parse_str(text).unwrap_err();
            assert_eq!(err.to_string(), msg, "{text}");
        }
    }

    #[test]
    fn equal_labels_collide() {
        let doc =
            ElementDocument::parse_str(r#"{"kind":"stepfn","default":[0,0],"exceptions":{"0.5":[1,0],"1/2":[2,0]}}"#)
                .unwrap();
        assert!(doc.to_element().is_err());
    }
}
