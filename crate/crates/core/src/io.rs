//! JSON forms of operators and instruments, and the `a:b:n` grid syntax.
//!
//! ```json
//! {"dims": [2, 2], "dense": [[1, 0], [0, 0], ...]}
//! {"dims": [2, 2, 2, 2], "pauli": {"IIII": 0.25, "ZZZI": 0.125}}
//! {"party": "A", "ops": {"a=0,x=0": <operator>, "a=1,x=0": ..., ...}}
//! ```

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::instrument::{Instrument, Party};
use crate::operator::{Matrix, Operator};
use crate::pauli::{pauli_compose, pauli_decompose, PauliDecomposition};

/// Largest matrix side accepted from input files.
pub const MAX_SIDE: usize = 64;

/// Largest grid accepted by [`parse_grid`].
pub const MAX_GRID: usize = 100_000;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorJson {
    dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dense: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pauli: Option<PauliDecomposition>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorForm {
    Dense,
    Pauli,
}

fn checked_side(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::Parse("\"dims\" must not be empty".into()));
    }
    let mut side = 1usize;
    for &d in dims {
        if d == 0 {
            return Err(Error::Parse("subsystem dimension 0".into()));
        }
        side = side
            .checked_mul(d)
            .filter(|&s| s <= MAX_SIDE)
            .ok_or_else(|| Error::Parse(format!("dims {dims:?} exceed side {MAX_SIDE}")))?;
    }
    Ok(side)
}

fn operator_from_json(raw: OperatorJson) -> Result<Operator> {
    let side = checked_side(&raw.dims)?;
    match (raw.dense, raw.pauli) {
        (Some(_), Some(_)) => Err(Error::Parse(
            "give exactly one of \"dense\" and \"pauli\", not both".into(),
        )),
        (None, None) => Err(Error::Parse("missing \"dense\" or \"pauli\"".into())),
        (Some(entries), None) => {
            if entries.len() != side * side {
                return Err(Error::Parse(format!(
                    "\"dense\" has {} entries, dims {:?} need {}",
                    entries.len(),
                    raw.dims,
                    side * side
                )));
            }
            if entries.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Parse("non-finite matrix entry".into()));
            }
            let mat = Matrix::from_fn(side, side, |r, c| {
                let [re, im] = entries[r * side + c];
                Complex64::new(re, im)
            });
            Operator::new(mat, raw.dims)
        }
        (None, Some(dec)) => {
            if raw.dims.iter().any(|&d| d != 2) {
                return Err(Error::NotQubits(raw.dims));
            }
            if dec.iter().any(|(_, c)| !c.is_finite()) {
                return Err(Error::Parse("non-finite Pauli coefficient".into()));
            }
            pauli_compose(&dec, raw.dims.len())
        }
    }
}

pub fn operator_from_value(v: Value) -> Result<Operator> {
    operator_from_json(serde_json::from_value(v)?)
}

pub fn parse_operator(text: &str) -> Result<Operator> {
    operator_from_json(serde_json::from_str(text)?)
}

pub fn operator_to_value(op: &Operator, form: OperatorForm) -> Result<Value> {
    let raw = match form {
        OperatorForm::Dense => {
            let side = op.side();
            let dense = (0..side * side)
                .map(|k| {
                    let z = op.get(k / side, k % side);
                    [z.re, z.im]
                })
                .collect();
            OperatorJson {
                dims: op.dims().to_vec(),
                dense: Some(dense),
                pauli: None,
            }
        }
        OperatorForm::Pauli => OperatorJson {
            dims: op.dims().to_vec(),
            dense: None,
            pauli: Some(pauli_decompose(op)?),
        },
    };
    Ok(serde_json::to_value(raw)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstrumentJson {
    party: Party,
    ops: BTreeMap<String, Value>,
}

fn op_key(a: usize, x: usize) -> String {
    format!("a={a},x={x}")
}

fn instrument_from_json(raw: InstrumentJson) -> Result<Instrument> {
    let mut ops = raw.ops;
    let mut take = |a: usize, x: usize| -> Result<Operator> {
        let key = op_key(a, x);
        let v = ops
            .remove(&key)
            .ok_or_else(|| Error::Parse(format!("missing instrument entry {key:?}")))?;
        let op = operator_from_value(v).map_err(|e| e.context(key.clone()))?;
        if op.dims() != [2, 2] {
            return Err(Error::WrongDims {
                expected: vec![2, 2],
                got: op.dims().to_vec(),
            }
            .context(key));
        }
        Ok(op)
    };
    let built = [[take(0, 0)?, take(0, 1)?], [take(1, 0)?, take(1, 1)?]];
    if let Some(extra) = ops.keys().next() {
        return Err(Error::Parse(format!("unexpected instrument entry {extra:?}")));
    }
    Instrument::new(raw.party, built)
}

pub fn parse_instrument(text: &str) -> Result<Instrument> {
    instrument_from_json(serde_json::from_str(text)?)
}

pub fn instrument_to_value(inst: &Instrument, form: OperatorForm) -> Result<Value> {
    let mut ops = serde_json::Map::new();
    for a in 0..2 {
        for x in 0..2 {
            ops.insert(op_key(a, x), operator_to_value(inst.op(a, x), form)?);
        }
    }
    Ok(serde_json::json!({ "party": inst.party(), "ops": ops }))
}

/// Either kind of input file accepted by `validate`.
#[derive(Debug)]
pub enum Document {
    Operator(Operator),
    Instrument(Instrument),
}

pub fn parse_document(text: &str) -> Result<Document> {
    let v: Value = serde_json::from_str(text)?;
    match &v {
        Value::Object(map) if map.contains_key("party") => {
            Ok(Document::Instrument(instrument_from_json(serde_json::from_value(v)?)?))
        }
        Value::Object(_) => Ok(Document::Operator(operator_from_value(v)?)),
        _ => Err(Error::Parse("expected a JSON object".into())),
    }
}

/// `a:b:n` → `n` evenly spaced points from `a` to `b` inclusive.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(Error::Parse(format!("grid {spec:?} is not of the form a:b:n")));
    };
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("grid bound {s:?} is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse(format!("grid bound {s:?} is not finite")))
        }
    };
    let (a, b) = (num(a)?, num(b)?);
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("grid count {n:?} is not a positive integer")))?;
    if n == 0 || n > MAX_GRID {
        return Err(Error::Parse(format!("grid count must be in 1..={MAX_GRID}, got {n}")));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k == n - 1 { b } else { a + step * k as f64 })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instrument::saturating_instruments;
    use crate::process::alpha_family_operator;

    #[test]
    fn dense_round_trip() {
        let w = alpha_family_operator(0.5);
        let v = operator_to_value(&w, OperatorForm::Dense).unwrap();
        let back = operator_from_value(v).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn pauli_form() {
        let w = parse_operator(r#"{"dims":[2,2,2,2],"pauli":{"IIII":0.25,"ZZZI":0.125,"ZIXX":0.125}}"#).unwrap();
        assert!(w.max_abs_diff(&alpha_family_operator(0.5)) < 1e-15);
        let v = operator_to_value(&w, OperatorForm::Pauli).unwrap();
        assert!((v["pauli"]["ZIXX"].as_f64().unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn operator_errors() {
        let cases = [
            r#"{"dims":[2],"dense":[[1,0],[0,0],[0,0],[1,0]],"pauli":{"I":1}}"#,
            r#"{"dims":[2]}"#,
            r#"{"dims":[2],"dense":[[1,0]]}"#,
            r#"{"dims":[],"dense":[]}"#,
            r#"{"dims":[3],"pauli":{"I":1}}"#,
            r#"{"dims":[2,2],"pauli":{"I":1}}"#,
            r#"{"dims":[2],"pauli":{"Q":1}}"#,
            r#"{"dims":[2,2],"pauli":{"II":0.5,"XZZ":7.2}}"#,
            r#"{"dims":[1000,1000],"dense":[]}"#,
            r#"{"dims":[2],"dense":[[1,0],[0,0],[0,0],[1,0]],"extra":1}"#,
            r#"[1,2]"#,
        ];
        for c in cases {
            assert!(parse_operator(c).is_err(), "{c}");
        }
    }

    #[test]
    fn instrument_round_trip() {
        let (a, _) = saturating_instruments();
        let v = instrument_to_value(&a, OperatorForm::Pauli).unwrap();
        let back = parse_instrument(&v.to_string()).unwrap();
        for aa in 0..2 {
            for x in 0..2 {
                assert!(back.op(aa, x).max_abs_diff(a.op(aa, x)) < 1e-15);
            }
        }
        assert_eq!(back.party(), Party::A);
    }

    #[test]
    fn instrument_errors() {
        let (a, _) = saturating_instruments();
        let mut v = instrument_to_value(&a, OperatorForm::Dense).unwrap();
        v["ops"].as_object_mut().unwrap().remove("a=1,x=1");
        let err = parse_instrument(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("a=1,x=1"), "{err}");
        let mut v = instrument_to_value(&a, OperatorForm::Dense).unwrap();
        v["party"] = "C".into();
        assert!(parse_instrument(&v.to_string()).is_err());
        let mut v = instrument_to_value(&a, OperatorForm::Dense).unwrap();
        v["ops"]["a=2,x=0"] = v["ops"]["a=0,x=0"].clone();
        assert!(parse_instrument(&v.to_string()).is_err());
    }

    #[test]
    fn document_dispatch() {
        let (a, _) = saturating_instruments();
        let inst = instrument_to_value(&a, OperatorForm::Pauli).unwrap().to_string();
        assert!(matches!(parse_document(&inst).unwrap(), Document::Instrument(_)));
        let op = operator_to_value(&alpha_family_operator(0.1), OperatorForm::Pauli)
            .unwrap()
            .to_string();
        assert!(matches!(parse_document(&op).unwrap(), Document::Operator(_)));
        assert!(parse_document("3").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0.2:0.2:1").unwrap(), vec![0.2]);
        let g = parse_grid("0:0.7071067811865476:5").unwrap();
        assert_eq!(*g.last().unwrap(), std::f64::consts::FRAC_1_SQRT_2);
        for bad in ["", "0:1", "0:1:0", "a:1:2", "0:1:x", "0:inf:2", "0:1:2:3", "0:1:-1"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
