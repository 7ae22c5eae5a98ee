//! Flat `key = value` problem files.
//!
//! ```text
//! # Kummer-type congruence
//! N = 2
//! f = [t + 3, t^3 + 3]
//! g = [1, -1]
//! g0 = 0
//! n_max = 30
//! p_max = 31
//! ```

use std::collections::BTreeMap;
use std::fmt;

use polycong::conditions::CongruenceProblem;
use polycong::polyfield::RatFunc;

use crate::expr::{parse_expression, ExprError};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub n_max: Option<usize>,
    pub p_max: Option<u64>,
    pub guard: Option<u32>,
    pub budget: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub problem: CongruenceProblem,
    pub options: RunOptions,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for FileError {}

fn err(line: usize, message: impl Into<String>) -> FileError {
    FileError { line, message: message.into() }
}

const KEYS: [&str; 8] = ["N", "f", "g", "g0", "n_max", "p_max", "guard", "budget"];

fn list_items(line: usize, value: &str) -> Result<Vec<String>, FileError> {
    let inner = value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| err(line, "expected a bracketed list such as [t + 1, t^2]"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(inner.split(',').map(|s| s.trim().to_string()).collect())
}

fn expr(line: usize, src: &str) -> Result<crate::expr::Parsed, FileError> {
    parse_expression(src).map_err(|e: ExprError| err(line, format!("in {src:?}: {e}")))
}

fn number<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, FileError> {
    value
        .parse()
        .map_err(|_| err(line, format!("{key} must be a nonnegative integer, got {value:?}")))
}

pub fn parse_problem_file(text: &str) -> Result<ProblemFile, FileError> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, "expected key = value"))?;
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(err(line, format!("unknown key {key:?}; expected one of {}", KEYS.join(", "))));
        };
        if entries.insert(known, (line, value.trim())).is_some() {
            return Err(err(line, format!("duplicate key {key:?}")));
        }
    }
    let required = |key: &str| entries.get(key).copied().ok_or_else(|| err(0, format!("missing key {key:?}")));

    let (line, n) = required("N")?;
    let exponent: u32 = number(line, "N", n)?;

    let (line, f_src) = required("f")?;
    let f = list_items(line, f_src)?
        .iter()
        .map(|s| {
            expr(line, s)?
                .integral
                .ok_or_else(|| err(line, format!("f entry {s:?} is not an integer polynomial")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let (line, g_src) = required("g")?;
    let g = list_items(line, g_src)?
        .iter()
        .map(|s| expr(line, s).map(|p| p.value))
        .collect::<Result<Vec<_>, _>>()?;

    let g0 = match entries.get("g0") {
        Some(&(line, src)) => expr(line, src)?.value,
        None => RatFunc::zero(),
    };

    let mut options = RunOptions::default();
    if let Some(&(line, v)) = entries.get("n_max") {
        options.n_max = Some(number(line, "n_max", v)?);
    }
    if let Some(&(line, v)) = entries.get("p_max") {
        options.p_max = Some(number(line, "p_max", v)?);
    }
    if let Some(&(line, v)) = entries.get("guard") {
        options.guard = Some(number(line, "guard", v)?);
    }
    if let Some(&(line, v)) = entries.get("budget") {
        options.budget = Some(number(line, "budget", v)?);
    }

    let problem = CongruenceProblem::new(exponent, f, g, g0).map_err(|e| err(0, e.to_string()))?;
    Ok(ProblemFile { problem, options })
}
