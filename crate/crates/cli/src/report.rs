//! JSON documents. Keys come out sorted because `serde_json::Map` is a
//! `BTreeMap`; wall-clock data lives only under `"timing"`.

use std::io;
use std::path::Path;

use serde_json::{json, Value};

use polycong::arith::{Margin, Rat, Residue};
use polycong::bernoulli::A0Strategy;
use polycong::bound::BoundBreakdown;
use polycong::conditions::{ConditionEntry, ConditionReport, CongruenceProblem};
use polycong::eisenstein::CongruenceReport;
use polycong::padic_family::{TaylorCoeffs, ValuationBoundReport};
use polycong::verifier::{Route, StarPartsReport, TermNote, TermStrategy, VerifyReport};

pub const SCHEMA: u32 = 1;

pub fn rat(x: &Rat) -> Value {
    Value::String(format!("{}/{}", x.numer(), x.denom()))
}

pub fn margin(m: Margin) -> Value {
    Value::String(m.to_string())
}

fn residue(r: &Residue) -> Value {
    Value::String(r.value().to_string())
}

pub fn problem(p: &CongruenceProblem) -> Value {
    json!({
        "N": p.exponent(),
        "f": p.f().iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "g": p.g().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "g0": p.g0().to_string(),
    })
}

fn entry(e: &ConditionEntry) -> Value {
    json!({
        "condition": e.condition.to_string(),
        "l": e.l,
        "m": e.m,
        "observed": e.observed.to_string(),
        "required": e.required,
        "pass": e.pass,
        "vacuous": e.vacuous,
    })
}

pub fn conditions(r: &ConditionReport) -> Value {
    json!({
        "M": r.min_vt.to_string(),
        "S1": r.s1.iter().collect::<Vec<_>>(),
        "entries": r.entries.iter().map(entry).collect::<Vec<_>>(),
        "overall": r.overall,
        "ignored_indexes": r.ignored_indexes,
        "notes": r.notes,
    })
}

pub fn bound(b: &BoundBreakdown) -> Value {
    json!({
        "b1": b.b1.to_string(),
        "b2": b.b2.to_string(),
        "b3": b.b3.to_string(),
        "b4": b.b4.to_string(),
        "b5": b.b5.to_string(),
        "P": b.p.to_string(),
    })
}

fn strategy(s: &TermStrategy) -> Value {
    match s {
        TermStrategy::ZeroCoefficient => json!({"kind": "zero-coefficient"}),
        TermStrategy::Vanishes => json!({"kind": "vanishes"}),
        TermStrategy::Exact => json!({"kind": "exact"}),
        TermStrategy::Star { prec, a0 } => {
            let a0 = match a0 {
                A0Strategy::Exact => json!({"kind": "exact"}),
                A0Strategy::Reduced { k0, modulus } => {
                    json!({"kind": "reduced", "k0": k0, "modulus": modulus.to_string()})
                }
            };
            json!({"kind": "star", "prec": prec, "a0": a0})
        }
    }
}

fn terms(ts: &[TermNote]) -> Value {
    Value::Array(
        ts.iter()
            .map(|t| json!({"index": t.index, "weight": t.weight.to_string(), "strategy": strategy(&t.strategy)}))
            .collect(),
    )
}

pub fn verify(r: &VerifyReport) -> Value {
    json!({
        "p": r.p,
        "N": r.exponent,
        "n_max": r.n_max,
        "guard": r.guard,
        "margins": r.margins.iter().map(|m| margin(*m)).collect::<Vec<_>>(),
        "pass": r.pass,
        "route": match r.route { Route::Exact => "exact", Route::Star => "star" },
        "terms": terms(&r.terms),
    })
}

pub fn star(r: &StarPartsReport) -> Value {
    json!({
        "p": r.p,
        "N": r.exponent,
        "n_max": r.n_max,
        "constant": {"margin": margin(r.constant), "pass": r.constant_pass},
        "higher": {"margins": r.higher.iter().map(|m| margin(*m)).collect::<Vec<_>>(), "pass": r.higher_pass},
        "pass": r.pass(),
        "terms": terms(&r.terms),
    })
}

pub fn taylor(tc: &TaylorCoeffs, bounds: &ValuationBoundReport) -> Value {
    let checks: Vec<Value> = bounds
        .checks
        .iter()
        .map(|c| {
            json!({
                "m": c.m,
                "observed": margin(c.observed),
                "general_bound": c.general,
                "small_m_bound": c.small_m,
                "pass_general": c.pass_general,
                "pass_small_m": c.pass_small_m,
                "certified": c.certified,
            })
        })
        .collect();
    json!({
        "n": tc.n,
        "p": tc.p,
        "l": tc.l,
        "W": tc.prec,
        "m_max": tc.m_max,
        "coeffs": tc.coeffs.iter().map(residue).collect::<Vec<_>>(),
        "bounds": checks,
        "pass": bounds.pass,
    })
}

pub fn series(r: &CongruenceReport) -> Value {
    json!({
        "p": r.p,
        "target": r.target,
        "margins": r.margins.iter().map(|m| margin(*m)).collect::<Vec<_>>(),
        "pass": r.pass,
    })
}

/// Wraps the sections with the command name and schema version.
pub fn document(command: &str, mut body: serde_json::Map<String, Value>, timing: Option<Value>) -> Value {
    body.insert("schema".into(), json!(SCHEMA));
    body.insert("command".into(), json!(command));
    if let Some(t) = timing {
        body.insert("timing".into(), t);
    }
    Value::Object(body)
}

pub fn write(path: &Path, doc: &Value) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(doc).map_err(io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text.as_bytes())
}
