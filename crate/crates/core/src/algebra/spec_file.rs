//! JSON nonlinearity specification files.
//!
//! Format: an object with `n_total`, `n_v`, and sparse coefficient lists
//! `uu`, `udu`, `dudu` of entries `{j,k,l,(a),(b),(c),value}`. Component
//! indices j, k, l are 1-based (matching written-out systems); derivative
//! slots a, b, c are 0-based with 0 = t. A bare string is resolved as a
//! preset name.

use super::presets::preset;
use super::QuadraticNonlinearity;
use crate::error::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
struct UuEntry {
    j: usize,
    k: usize,
    l: usize,
    value: f64,
}

#[derive(Debug, Deserialize)]
struct UduEntry {
    j: usize,
    k: usize,
    l: usize,
    a: usize,
    value: f64,
}

#[derive(Debug, Deserialize)]
struct DuduEntry {
    j: usize,
    k: usize,
    b: usize,
    l: usize,
    c: usize,
    value: f64,
}

#[derive(Debug, Deserialize)]
struct SpecFile {
    n_total: usize,
    #[serde(default)]
    n_v: Option<usize>,
    #[serde(default)]
    uu: Vec<UuEntry>,
    #[serde(default)]
    udu: Vec<UduEntry>,
    #[serde(default)]
    dudu: Vec<DuduEntry>,
}

fn comp(field: &str, idx: usize, n: usize) -> Result<usize> {
    if idx == 0 || idx > n {
        return Err(Error::Spec(format!(
            "field `{field}`: component index {idx} out of range 1..={n}"
        )));
    }
    Ok(idx - 1)
}

fn slot(field: &str, a: usize) -> Result<usize> {
    if a > 3 {
        return Err(Error::Spec(format!("field `{field}`: derivative slot {a} out of range 0..=3")));
    }
    Ok(a)
}

/// Parse a nonlinearity from JSON text, or resolve a JSON string as a
/// preset name.
pub fn nonlinearity_from_json(text: &str) -> Result<QuadraticNonlinearity> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Spec(format!("not valid JSON: {e}")))?;
    if let Some(name) = value.as_str() {
        return Ok(preset(name)?.nonlinearity);
    }
    let spec: SpecFile =
        serde_json::from_value(value).map_err(|e| Error::Spec(format!("bad nonlinearity spec: {e}")))?;
    if spec.n_total == 0 {
        return Err(Error::Spec("field `n_total`: must be at least 1".into()));
    }
    let n_v = spec.n_v.unwrap_or(spec.n_total);
    if n_v > spec.n_total {
        return Err(Error::Spec(format!(
            "field `n_v`: {} exceeds n_total {}",
            n_v, spec.n_total
        )));
    }
    let mut f = QuadraticNonlinearity::zeros(spec.n_total, n_v);
    for e in &spec.uu {
        f.add_uu(
            comp("uu.j", e.j, spec.n_total)?,
            comp("uu.k", e.k, spec.n_total)?,
            comp("uu.l", e.l, spec.n_total)?,
            e.value,
        );
    }
    for e in &spec.udu {
        f.add_udu(
            comp("udu.j", e.j, spec.n_total)?,
            comp("udu.k", e.k, spec.n_total)?,
            comp("udu.l", e.l, spec.n_total)?,
            slot("udu.a", e.a)?,
            e.value,
        );
    }
    for e in &spec.dudu {
        f.add_dudu(
            comp("dudu.j", e.j, spec.n_total)?,
            comp("dudu.k", e.k, spec.n_total)?,
            slot("dudu.b", e.b)?,
            comp("dudu.l", e.l, spec.n_total)?,
            slot("dudu.c", e.c)?,
            e.value,
        );
    }
    Ok(f)
}
