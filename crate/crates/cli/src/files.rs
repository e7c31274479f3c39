//! Element and measure files.
//!
//! ```json
//! {"c": 1, "mu": "1/4", "nu": "1/6", "d": 0,
//!  "components": [{"p": 0, "expr": "1"}, {"p": 1, "expr": "e(2x+0y+0)*sinpi(x)"}]}
//! ```
//!
//! A `"space": "torus"` entry marks a crossed-product element.

use std::collections::BTreeMap;

use qhm_core::cocycle::CrossedElement;
use qhm_core::element::QhmElement;
use qhm_core::traces::{InvariantMeasure, MeasureSpec};
use qhm_core::{ExactScalar, Expr, Params};
use serde::Deserialize;

use crate::dsl::parse_expr;
use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementFile {
    c: u32,
    mu: String,
    nu: String,
    #[serde(default)]
    d: Option<u64>,
    #[serde(default)]
    space: Option<String>,
    components: Vec<ComponentFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentFile {
    p: i64,
    expr: String,
}

#[derive(Debug)]
pub enum ParsedElement {
    Algebra(QhmElement),
    Torus(CrossedElement),
}

pub fn parse_scalar(text: &str) -> Result<ExactScalar, CliError> {
    text.parse().map_err(|e| CliError::Scalar { text: text.to_string(), source: e })
}

/// Builds parameters, inferring the field when `d` is absent.
pub fn params(c: u32, mu: &str, nu: &str, d: Option<u64>) -> Result<Params, CliError> {
    let (mu, nu) = (parse_scalar(mu)?, parse_scalar(nu)?);
    Ok(match d {
        Some(d) => Params::new(c, mu, nu, d)?,
        None => Params::infer(c, mu, nu)?,
    })
}

fn json_error(e: serde_json::Error) -> CliError {
    CliError::Json { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Line and column (1-based) where the `index`-th `"expr"` value's text begins.
fn locate_expr(text: &str, index: usize) -> Option<(usize, usize)> {
    let mut from = 0;
    let mut found = None;
    for _ in 0..=index {
        let at = from + text[from..].find("\"expr\"")?;
        let rest = &text[at + 6..];
        let quote = rest.find('"')?;
        let start = at + 6 + quote + 1;
        found = Some(start);
        from = start;
    }
    let start = found?;
    let before = &text[..start];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    Some((line, column))
}

pub fn parse_element_str(text: &str) -> Result<ParsedElement, CliError> {
    let file: ElementFile = serde_json::from_str(text).map_err(json_error)?;
    let params = params(file.c, &file.mu, &file.nu, file.d)?;
    let mut comps: BTreeMap<i64, Expr> = BTreeMap::new();
    for (i, comp) in file.components.iter().enumerate() {
        let expr = parse_expr(&comp.expr, params.d).map_err(|e| {
            let (line, column) = locate_expr(text, i).map_or((0, e.column), |(l, c)| (l, c + e.column - 1));
            CliError::Dsl { component: i, p: comp.p, line, column, message: e.message }
        })?;
        if comps.insert(comp.p, expr).is_some() {
            return Err(CliError::DuplicateP(comp.p));
        }
    }
    match file.space.as_deref() {
        None | Some("algebra") => Ok(ParsedElement::Algebra(QhmElement::new(params, comps))),
        Some("torus") => Ok(ParsedElement::Torus(CrossedElement::new(params, comps))),
        Some(other) => Err(CliError::Usage(format!("unknown space `{other}`"))),
    }
}

pub fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

pub fn parse_element(path: &str) -> Result<QhmElement, CliError> {
    match parse_element_str(&read(path)?)? {
        ParsedElement::Algebra(e) => Ok(e),
        ParsedElement::Torus(_) => Err(CliError::Usage(format!("{path}: expected an algebra element, found a torus element"))),
    }
}

pub fn parse_measure_str(text: &str) -> Result<InvariantMeasure, CliError> {
    let spec: MeasureSpec = serde_json::from_str(text).map_err(json_error)?;
    Ok(spec.build()?)
}
