//! JSON input files: model, chain and argument lists.

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use super::parse::{parse_observable, parse_scalar, plain_constant, scalar_terms, ParseError};
use crate::chains::{CKey, Chain, ChainError};
use crate::exactnum::Cyclo;
use crate::model::{CMatrix, Model, ModelError};
use crate::weyl::MatrixWeyl;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{context}: invalid JSON: {source}")]
    Json { context: String, source: serde_json::Error },
    #[error("{context}: {source}")]
    Parse { context: String, source: ParseError },
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("{0}")]
    Chain(#[from] ChainError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub n: usize,
    pub k: usize,
    #[serde(default = "one")]
    pub r: usize,
    #[serde(rename = "N")]
    pub order: u32,
    #[serde(default)]
    pub perp_eigs: Vec<i64>,
    #[serde(default)]
    pub e_twist: Option<Vec<Vec<Value>>>,
    #[serde(default)]
    pub hbar_trunc: Option<i64>,
    #[serde(default)]
    pub weight_trunc: Option<i64>,
}

fn one() -> usize {
    1
}

fn constant_from_json(v: &Value, order: u32, ctx: &str) -> Result<Cyclo, InputError> {
    let src = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(InputError::Invalid(format!("{ctx}: expected a number or a string"))),
    };
    let p = parse_scalar(&src, order).map_err(|e| InputError::Parse { context: ctx.to_string(), source: e })?;
    plain_constant(&p).ok_or_else(|| InputError::Invalid(format!("{ctx}: '{src}' is not a constant")))
}

pub fn model_from_str(src: &str, hbar_trunc: Option<i64>, weight_trunc: Option<i64>) -> Result<Model, InputError> {
    let f: ModelFile =
        serde_json::from_str(src).map_err(|e| InputError::Json { context: "model".into(), source: e })?;
    let e_twist: Option<CMatrix> = match &f.e_twist {
        None => None,
        Some(rows) => Some(
            rows.iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, v)| constant_from_json(v, f.order, &format!("e_twist[{i}][{j}]")))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let m = Model::build(f.n, f.k, f.r, f.order, &f.perp_eigs, e_twist)?;
    let ht = hbar_trunc.or(f.hbar_trunc).unwrap_or(m.hbar_trunc);
    let wt = weight_trunc.or(f.weight_trunc).unwrap_or(m.weight_trunc);
    if ht <= 0 || wt <= 0 {
        return Err(InputError::Invalid("truncation orders must be positive".into()));
    }
    Ok(m.with_truncation(ht, wt))
}

pub fn read_file(path: &str) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::Io { path: path.to_string(), source: e })
}

pub fn observable(src: &str, m: &Model, ctx: &str, warnings: &mut Vec<String>) -> Result<MatrixWeyl, InputError> {
    let p = parse_observable(src, m).map_err(|e| InputError::Parse { context: ctx.to_string(), source: e })?;
    warnings.extend(p.warnings.into_iter().map(|w| format!("{ctx}: {w}")));
    Ok(p.value)
}

fn string_list(v: &Value, ctx: &str) -> Result<Vec<String>, InputError> {
    let arr = v.as_array().ok_or_else(|| InputError::Invalid(format!("{ctx}: expected an array of strings")))?;
    arr.iter()
        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| InputError::Invalid(format!("{ctx}: expected strings"))))
        .collect()
}

/// A chain file is either a list of factor expressions (one tensor
/// O₀⊗…⊗O_m) or `{"terms": [{"coef": "...", "factors": [...]}, ...]}`.
pub fn chain_from_str(src: &str, m: &Model, warnings: &mut Vec<String>) -> Result<Chain, InputError> {
    let v: Value = serde_json::from_str(src).map_err(|e| InputError::Json { context: "chain".into(), source: e })?;
    let terms: Vec<(String, Vec<String>)> = match &v {
        Value::Array(_) => vec![("1".to_string(), string_list(&v, "chain")?)],
        Value::Object(o) => {
            let ts = o
                .get("terms")
                .and_then(Value::as_array)
                .ok_or_else(|| InputError::Invalid("chain: expected a \"terms\" array".into()))?;
            ts.iter()
                .enumerate()
                .map(|(i, t)| {
                    let coef = match t.get("coef") {
                        None => "1".to_string(),
                        Some(Value::String(s)) => s.clone(),
                        Some(Value::Number(n)) => n.to_string(),
                        Some(_) => return Err(InputError::Invalid(format!("chain term {i}: bad coef"))),
                    };
                    let factors = string_list(
                        t.get("factors").ok_or_else(|| InputError::Invalid(format!("chain term {i}: missing factors")))?,
                        &format!("chain term {i} factors"),
                    )?;
                    Ok((coef, factors))
                })
                .collect::<Result<_, _>>()?
        }
        _ => return Err(InputError::Invalid("chain: expected an array or an object".into())),
    };
    let mut out = Chain::zero_for(m);
    for (i, (coef, factors)) in terms.iter().enumerate() {
        if factors.is_empty() {
            return Err(InputError::Invalid(format!("chain term {i}: a tensor needs at least one factor")));
        }
        let mats = factors
            .iter()
            .enumerate()
            .map(|(j, s)| observable(s, m, &format!("chain term {i} factor {j}"), warnings))
            .collect::<Result<Vec<_>, _>>()?;
        let cp = parse_scalar(coef, m.order)
            .map_err(|e| InputError::Parse { context: format!("chain term {i} coef"), source: e })?;
        let t = Chain::from_tensor(m, &mats, &Cyclo::one())?;
        for (u, h, c) in scalar_terms(&cp) {
            let mut shifted = Chain::zero(t.nvars(), t.rank(), t.wtrunc(), t.htrunc());
            for (k, v) in t.terms() {
                shifted.add_term(CKey { slots: k.slots.clone(), h: k.h + h, u: k.u + u }, v * &c);
            }
            out = out.add(&shifted);
        }
    }
    Ok(out)
}

pub fn args_from_str(src: &str, m: &Model, warnings: &mut Vec<String>) -> Result<Vec<MatrixWeyl>, InputError> {
    let v: Value = serde_json::from_str(src).map_err(|e| InputError::Json { context: "args".into(), source: e })?;
    string_list(&v, "args")?
        .iter()
        .enumerate()
        .map(|(i, s)| observable(s, m, &format!("argument {i}"), warnings))
        .collect()
}
