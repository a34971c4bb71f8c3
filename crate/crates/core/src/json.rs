//! JSON codec for scalars, algebra elements and U_q words.
//!
//! A scalar `s^shift · num(s)/den(s)` is written as
//! `{"shift": n, "num": [[re, im], …], "den": [[re, im], …]}` with ascending
//! coefficients and each rational as a `"p/q"` string. An element is an array
//! of `{"alpha", "j", "k", "coeff"}` objects.

use num_rational::BigRational;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{Element, Monomial};
use crate::field::{parse_rational, rational_to_string, GaussianRational, RationalParts};
use crate::poly::Poly;
use crate::uq::{UqElement, UqGen};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("expected {expected} at {path}")]
    Shape { path: String, expected: &'static str },
    #[error("bad rational {text:?} at {path}")]
    Rational { path: String, text: String },
    #[error("zero denominator at {path}")]
    ZeroDenominator { path: String },
    #[error("unknown U_q generator {0:?}")]
    UnknownGenerator(String),
}

fn shape(path: &str, expected: &'static str) -> JsonError {
    JsonError::Shape { path: path.to_string(), expected }
}

fn rational_from_json(v: &Value, path: &str) -> Result<BigRational, JsonError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() => n.to_string(),
        _ => return Err(shape(path, "rational string")),
    };
    parse_rational(&text).ok_or(JsonError::Rational { path: path.to_string(), text })
}

fn poly_to_json(p: &Poly<GaussianRational>) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .map(|c| {
                let (re, im) = c.parts();
                json!([rational_to_string(&re), rational_to_string(&im)])
            })
            .collect(),
    )
}

fn poly_from_json(v: &Value, path: &str) -> Result<Poly<GaussianRational>, JsonError> {
    let arr = v.as_array().ok_or_else(|| shape(path, "coefficient array"))?;
    let mut coeffs = Vec::with_capacity(arr.len());
    for (i, c) in arr.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let c = match c {
            Value::Array(pair) if pair.len() == 2 => GaussianRational::new(
                rational_from_json(&pair[0], &p)?,
                rational_from_json(&pair[1], &p)?,
            ),
            // a bare rational is accepted as a real coefficient
            other => GaussianRational::new(rational_from_json(other, &p)?, BigRational::from_integer(0.into())),
        };
        coeffs.push(c);
    }
    Ok(Poly::from_coeffs(coeffs))
}

pub fn scalar_to_json(x: &Scalar) -> Value {
    json!({
        "shift": x.shift(),
        "num": poly_to_json(x.numerator()),
        "den": poly_to_json(x.denominator()),
    })
}

pub fn scalar_from_json(v: &Value, path: &str) -> Result<Scalar, JsonError> {
    match v {
        Value::Object(map) => {
            let shift = match map.get("shift") {
                None => 0,
                Some(s) => s.as_i64().ok_or_else(|| shape(path, "integer shift"))?,
            };
            let num = poly_from_json(map.get("num").ok_or_else(|| shape(path, "\"num\""))?, &format!("{path}.num"))?;
            let den = match map.get("den") {
                None => Poly::one(),
                Some(d) => poly_from_json(d, &format!("{path}.den"))?,
            };
            Scalar::from_parts(shift, num, den).map_err(|_| JsonError::ZeroDenominator { path: path.to_string() })
        }
        other => {
            let r = rational_from_json(other, path)?;
            Ok(Scalar::constant(GaussianRational::new(r, BigRational::from_integer(0.into()))))
        }
    }
}

pub fn element_to_json(e: &Element) -> Value {
    Value::Array(
        e.terms()
            .map(|(m, c)| json!({"alpha": m.alpha, "j": m.j, "k": m.k, "coeff": scalar_to_json(c)}))
            .collect(),
    )
}

pub fn element_from_json(v: &Value, path: &str) -> Result<Element, JsonError> {
    let arr = v.as_array().ok_or_else(|| shape(path, "array of terms"))?;
    let mut out = Element::zero();
    for (i, t) in arr.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let int = |key: &str| t.get(key).and_then(Value::as_i64).ok_or_else(|| shape(&p, "integer alpha/j/k"));
        let alpha = int("alpha")?;
        let (j, k) = (int("j")?, int("k")?);
        if j < 0 || k < 0 {
            return Err(shape(&p, "non-negative j and k"));
        }
        let coeff = match t.get("coeff") {
            None => Scalar::one(),
            Some(c) => scalar_from_json(c, &format!("{p}.coeff"))?,
        };
        out.add_term(Monomial::new(alpha as i32, j as u32, k as u32), coeff);
    }
    Ok(out)
}

fn gen_from_name(name: &str) -> Result<UqGen, JsonError> {
    match name {
        "E" => Ok(UqGen::E),
        "F" => Ok(UqGen::F),
        "K" => Ok(UqGen::K),
        "K^-1" | "Kinv" | "K-1" => Ok(UqGen::KInv),
        other => Err(JsonError::UnknownGenerator(other.to_string())),
    }
}

/// Parses a compact word such as `"EK"`, `"K^-1 F"` or `"E F"`.
pub fn parse_word(text: &str) -> Result<Vec<UqGen>, JsonError> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        rest = rest.trim_start();
        let token = ["K^-1", "Kinv", "E", "F", "K"]
            .into_iter()
            .find(|t| rest.starts_with(t))
            .ok_or_else(|| JsonError::UnknownGenerator(rest.to_string()))?;
        out.push(gen_from_name(token)?);
        rest = &rest[token.len()..];
    }
    Ok(out)
}

/// Reads `{"words": [["E","K"], …], "coeffs": [scalar, …]}`; missing
/// coefficients default to one.
pub fn uq_from_json(v: &Value) -> Result<UqElement, JsonError> {
    let words = v.get("words").and_then(Value::as_array).ok_or_else(|| shape("$", "\"words\" array"))?;
    let coeffs = v.get("coeffs").and_then(Value::as_array);
    let mut out = UqElement::zero();
    for (i, w) in words.iter().enumerate() {
        let letters = w.as_array().ok_or_else(|| shape(&format!("$.words[{i}]"), "array of generator names"))?;
        let word = letters
            .iter()
            .map(|l| l.as_str().ok_or_else(|| shape(&format!("$.words[{i}]"), "generator name")).and_then(gen_from_name))
            .collect::<Result<Vec<_>, _>>()?;
        let c = match coeffs.and_then(|c| c.get(i)) {
            None => Scalar::one(),
            Some(c) => scalar_from_json(c, &format!("$.coeffs[{i}]"))?,
        };
        out.add_term(word, c);
    }
    Ok(out)
}

pub fn uq_to_json(h: &UqElement) -> Value {
    let (words, coeffs): (Vec<Value>, Vec<Value>) = h
        .terms()
        .map(|(w, c)| (json!(w.iter().map(|g| g.name()).collect::<Vec<_>>()), scalar_to_json(c)))
        .unzip();
    json!({"words": words, "coeffs": coeffs})
}
