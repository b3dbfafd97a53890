//! JSON input for graph-algebra elements.
//!
//! ```json
//! {"terms": [{"mu": ["e1", "e2"], "nu": ["e1"], "coeff": [0.5, 0.0]},
//!            {"vertex": "v", "coeff": 1}]}
//! ```
//!
//! A bare term object is accepted in place of `{"terms": [...]}`. `coeff`
//! defaults to 1; `vertex` is required only when both paths are empty.

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

use crate::algebra::element::{AlgebraElement, Monomial, Path};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::ONE;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    #[serde(default)]
    mu: Vec<String>,
    #[serde(default)]
    nu: Vec<String>,
    vertex: Option<String>,
    coeff: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElement {
    terms: Vec<RawTerm>,
}

fn parse_coeff(v: &Option<Value>) -> Result<Complex64> {
    let bad = || Error::Malformed("coeff must be a number or [re, im]".into());
    match v {
        None => Ok(ONE),
        Some(Value::Number(x)) => Ok(Complex64::new(x.as_f64().ok_or_else(bad)?, 0.0)),
        Some(Value::Array(p)) if p.len() == 2 => {
            Ok(Complex64::new(p[0].as_f64().ok_or_else(bad)?, p[1].as_f64().ok_or_else(bad)?))
        }
        _ => Err(bad()),
    }
}

fn parse_path(g: &Graph, ids: &[String]) -> Result<Option<Path>> {
    if ids.is_empty() {
        return Ok(None);
    }
    let edges = ids.iter().map(|id| g.edge(id)).collect::<Result<Vec<_>>>()?;
    Path::from_edges(g, &edges)
        .map(Some)
        .ok_or_else(|| Error::Invalid(format!("edges [{}] do not form a path", ids.join(", "))))
}

fn parse_term(g: &Graph, t: &RawTerm) -> Result<Monomial> {
    let mu = parse_path(g, &t.mu)?;
    let nu = parse_path(g, &t.nu)?;
    let vertex = t.vertex.as_deref().map(|v| g.vertex(v)).transpose()?;
    let at = match (&mu, &nu) {
        (Some(p), _) | (None, Some(p)) => p.end,
        (None, None) => vertex.ok_or_else(|| Error::Malformed("term with empty paths needs `vertex`".into()))?,
    };
    if vertex.is_some_and(|v| v != at) {
        return Err(Error::Invalid("`vertex` disagrees with the range of the paths".into()));
    }
    let mu = mu.unwrap_or_else(|| Path::vertex(at));
    let nu = nu.unwrap_or_else(|| Path::vertex(at));
    Monomial::new(mu, nu).ok_or_else(|| Error::Invalid("r(μ) ≠ r(ν): the monomial is zero".into()))
}

pub fn parse_element(g: &Graph, text: &str) -> Result<AlgebraElement<Complex64>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let raw: RawElement = if doc.get("terms").is_some() {
        serde_json::from_value(doc).map_err(|e| Error::Malformed(e.to_string()))?
    } else {
        RawElement { terms: vec![serde_json::from_value(doc).map_err(|e| Error::Malformed(e.to_string()))?] }
    };
    let mut x = AlgebraElement::zero();
    for t in &raw.terms {
        x.accumulate(parse_term(g, t)?, parse_coeff(&t.coeff)?);
    }
    Ok(x)
}
