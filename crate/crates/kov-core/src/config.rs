//! System config ingestion.
//!
//! A system file is a JSON object:
//!
//! ```json
//! {
//!   "n": 2,
//!   "alpha": "-1",
//!   "beta": "-1",
//!   "homogeneous": false,
//!   "b1": [["0", "1/2"], ["h", "0"]],
//!   "c5": [["gamma", "0"], ["0", "gamma"]]
//! }
//! ```
//!
//! `alpha`, `beta` and matrix entries are exact rationals written as JSON
//! integers or `"num/den"` strings; a matrix entry may also be a previously
//! unseen identifier, which registers a symbolic parameter. Omitted
//! matrices default to zero. The names `eps`, `z0`, `t`, `x` and the
//! series-parameter pattern `x<k>_<ij>` / `y<k>_<ij>` are reserved for the
//! engine and rejected.

use crate::matrix::MatPoly;
use crate::model::SystemSpec;
use crate::param::ParamTable;
use crate::poly::{parse_rat, PolyQ};
use crate::{KovError, Result};
use serde_json::Value;

fn reserved(name: &str) -> bool {
    if matches!(name, "eps" | "z0" | "t" | "x") {
        return true;
    }
    let mut chars = name.chars();
    let head = chars.next();
    if matches!(head, Some('x') | Some('y')) {
        let rest: String = chars.collect();
        if let Some((k, ij)) = rest.split_once('_') {
            if !k.is_empty()
                && k.chars().all(|c| c.is_ascii_digit())
                && !ij.is_empty()
                && ij.chars().all(|c| c.is_ascii_digit())
            {
                return true;
            }
        }
    }
    false
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_entry(v: &Value, table: &ParamTable) -> Result<PolyQ> {
    match v {
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                Ok(PolyQ::int(i))
            } else {
                Err(KovError::BadConfig(format!(
                    "non-integer JSON number `{num}`; write exact rationals as strings"
                )))
            }
        }
        Value::String(s) => {
            let s = s.trim();
            if let Ok(r) = parse_rat(s) {
                return Ok(PolyQ::constant(r));
            }
            if is_identifier(s) {
                if reserved(s) {
                    return Err(KovError::BadConfig(format!(
                        "parameter name `{s}` is reserved"
                    )));
                }
                return Ok(PolyQ::var(table.intern(s)));
            }
            Err(KovError::BadConfig(format!(
                "entry `{s}` is neither a rational nor a parameter name"
            )))
        }
        other => Err(KovError::BadConfig(format!(
            "matrix entry must be a number or string, got {other}"
        ))),
    }
}

fn parse_matrix(v: &Value, n: usize, table: &ParamTable) -> Result<MatPoly> {
    let rows = v
        .as_array()
        .ok_or_else(|| KovError::BadConfig("matrix must be an array of rows".into()))?;
    if rows.len() != n {
        return Err(KovError::BadConfig(format!(
            "matrix has {} rows, expected {n}",
            rows.len()
        )));
    }
    let mut m = MatPoly::zero(n, n);
    for (i, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .ok_or_else(|| KovError::BadConfig("matrix row must be an array".into()))?;
        if cells.len() != n {
            return Err(KovError::BadConfig(format!(
                "row {i} has {} entries, expected {n}",
                cells.len()
            )));
        }
        for (j, cell) in cells.iter().enumerate() {
            m.set(i, j, parse_entry(cell, table)?);
        }
    }
    Ok(m)
}

fn parse_scalar(v: &Value) -> Result<crate::poly::Rat> {
    match v {
        Value::Number(num) => num
            .as_i64()
            .map(crate::poly::rat_i)
            .ok_or_else(|| KovError::BadConfig(format!("non-integer number `{num}`"))),
        Value::String(s) => parse_rat(s),
        other => Err(KovError::BadConfig(format!(
            "expected rational, got {other}"
        ))),
    }
}

/// Parse a system from JSON text, interning symbolic entries in `table`.
pub fn system_from_json(text: &str, table: &ParamTable) -> Result<SystemSpec> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| KovError::BadConfig(format!("invalid JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| KovError::BadConfig("top level must be an object".into()))?;
    let n = obj
        .get("n")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| KovError::BadConfig("missing integer field `n`".into()))? as usize;
    if n == 0 {
        return Err(KovError::BadConfig("n must be positive".into()));
    }
    let alpha = parse_scalar(
        obj.get("alpha")
            .ok_or_else(|| KovError::BadConfig("missing field `alpha`".into()))?,
    )?;
    let beta = parse_scalar(
        obj.get("beta")
            .ok_or_else(|| KovError::BadConfig("missing field `beta`".into()))?,
    )?;
    let homogeneous = obj
        .get("homogeneous")
        .map(|v| {
            v.as_bool()
                .ok_or_else(|| KovError::BadConfig("`homogeneous` must be a bool".into()))
        })
        .transpose()?
        .unwrap_or(false);

    for key in obj.keys() {
        let known = matches!(key.as_str(), "n" | "alpha" | "beta" | "homogeneous")
            || matches!(
                key.as_str(),
                "b1" | "b2" | "b3" | "b4" | "b5" | "c1" | "c2" | "c3" | "c4" | "c5"
            );
        if !known {
            return Err(KovError::BadConfig(format!("unknown field `{key}`")));
        }
    }

    if homogeneous {
        for name in ["b1", "b2", "b3", "b4", "b5", "c1", "c2", "c3", "c4", "c5"] {
            if obj.contains_key(name) {
                return Err(KovError::BadConfig(format!(
                    "homogeneous system must not set `{name}`"
                )));
            }
        }
        return Ok(SystemSpec::homogeneous(n, alpha, beta));
    }

    let get_mat = |name: &str| -> Result<MatPoly> {
        match obj.get(name) {
            Some(v) => parse_matrix(v, n, table),
            None => Ok(MatPoly::zero(n, n)),
        }
    };
    let b = [
        get_mat("b1")?,
        get_mat("b2")?,
        get_mat("b3")?,
        get_mat("b4")?,
        get_mat("b5")?,
    ];
    let c = [
        get_mat("c1")?,
        get_mat("c2")?,
        get_mat("c3")?,
        get_mat("c4")?,
        get_mat("c5")?,
    ];
    SystemSpec::with_coeffs(n, alpha, beta, b, c)
}

pub fn system_from_file(path: &std::path::Path, table: &ParamTable) -> Result<SystemSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| KovError::BadConfig(format!("cannot read {}: {e}", path.display())))?;
    system_from_json(&text, table)
}
