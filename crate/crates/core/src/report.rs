//! JSON encodings of analysis results. Rationals are `"p/q"` strings.
//!
//! Certificates are tagged with a `kind` field so that
//! [`collect_certificates`] can find and re-verify them inside any report.

use serde_json::{json, Map, Value};

use crate::arbitrage::{is_robust_arbitrage, ArbitrageWitness};
use crate::error::{Error, Result};
use crate::hedging::HedgeResult;
use crate::market::{ModelFamily, PredictableStrategy, StaticOption};
use crate::pricing::{verify_pricing_system, PriceBounds, RobustPricingSystem};
use crate::rational::{format_rational, parse_rational, zero, Rational};

pub fn rational(value: &Rational) -> Value {
    Value::String(format_rational(value))
}

pub fn rationals(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(rational).collect())
}

/// One row per `(t, atom of F_{t-1})`.
pub fn strategy(family: &ModelFamily, strategy: &PredictableStrategy) -> Value {
    let space = family.space();
    let mut rows = Vec::new();
    for t in 1..=space.horizon() {
        for (a, atom) in space.atoms(t - 1).iter().enumerate() {
            rows.push(json!({
                "t": t,
                "atom": a,
                "outcomes": atom.iter().map(|&w| space.outcomes()[w].clone()).collect::<Vec<_>>(),
                "position": rationals(strategy.position(t, atom[0])),
            }));
        }
    }
    Value::Array(rows)
}

pub fn pricing_system(family: &ModelFamily, system: &RobustPricingSystem, with_options: bool) -> Value {
    let space = family.space();
    let mut weights = Vec::new();
    for (th, theta) in family.thetas().iter().enumerate() {
        for (w, outcome) in space.outcomes().iter().enumerate() {
            weights.push(json!({
                "theta": theta,
                "outcome": outcome,
                "q": rational(system.weight(th, w)),
            }));
        }
    }
    json!({
        "kind": "pricing_system",
        "with_options": with_options,
        "weights": weights,
    })
}

pub fn witness(family: &ModelFamily, witness: &ArbitrageWitness, with_options: bool) -> Value {
    json!({
        "kind": "arbitrage_witness",
        "with_options": with_options,
        "strategy": strategy(family, &witness.strategy),
        "static_positions": rationals(&witness.static_positions),
    })
}

pub fn hedge(family: &ModelFamily, result: &HedgeResult, options: &[(String, StaticOption)]) -> Value {
    let statics: Map<String, Value> = options
        .iter()
        .zip(&result.static_positions)
        .map(|((name, _), a)| (name.clone(), rational(a)))
        .collect();
    json!({
        "price": rational(&result.price),
        "strategy": strategy(family, &result.strategy),
        "static_positions": statics,
    })
}

pub fn bounds(family: &ModelFamily, b: &PriceBounds, with_options: bool) -> Value {
    json!({
        "lo": rational(&b.lo),
        "hi": rational(&b.hi),
        "point": b.is_point(),
        "lo_system": pricing_system(family, &b.lo_system, with_options),
        "hi_system": pricing_system(family, &b.hi_system, with_options),
    })
}

fn field<'a>(value: &'a Value, key: &str) -> Result<&'a Value> {
    value
        .get(key)
        .ok_or_else(|| Error::Shape(format!("certificate is missing {key:?}")))
}

fn read_rational(value: &Value) -> Result<Rational> {
    match value {
        Value::String(s) => parse_rational(s).map_err(|e| Error::Shape(e.to_string())),
        Value::Number(n) if n.is_i64() => Ok(crate::rational::int(n.as_i64().unwrap_or_default())),
        _ => Err(Error::Shape(format!("expected a rational string, got {value}"))),
    }
}

fn read_str<'a>(value: &'a Value, key: &str) -> Result<&'a str> {
    field(value, key)?
        .as_str()
        .ok_or_else(|| Error::Shape(format!("{key:?} must be a string")))
}

fn read_array<'a>(value: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(value, key)?
        .as_array()
        .ok_or_else(|| Error::Shape(format!("{key:?} must be an array")))
}

/// Reads `(theta, outcome, q)` triples; omitted pairs weigh zero.
pub fn read_pricing_system(family: &ModelFamily, value: &Value) -> Result<RobustPricingSystem> {
    let n = family.space().num_outcomes();
    let mut weights = vec![vec![zero(); n]; family.num_thetas()];
    for entry in read_array(value, "weights")? {
        let th = family.theta_index(read_str(entry, "theta")?)?;
        let name = read_str(entry, "outcome")?;
        let w = family
            .space()
            .outcome_index(name)
            .ok_or_else(|| Error::Shape(format!("unknown outcome {name:?}")))?;
        weights[th][w] = read_rational(field(entry, "q")?)?;
    }
    RobustPricingSystem::new(family, weights)
}

pub fn read_strategy(family: &ModelFamily, value: &Value) -> Result<PredictableStrategy> {
    let space = family.space();
    let dims = family.dims();
    let mut table: Vec<Vec<Option<Vec<Rational>>>> = (1..=space.horizon())
        .map(|t| vec![None; space.atoms(t - 1).len()])
        .collect();
    let rows = value
        .as_array()
        .ok_or_else(|| Error::Shape("strategy must be an array".into()))?;
    for row in rows {
        let t = field(row, "t")?.as_u64().unwrap_or(0) as usize;
        let a = field(row, "atom")?.as_u64().unwrap_or(u64::MAX) as usize;
        let slot = t
            .checked_sub(1)
            .and_then(|i| table.get_mut(i))
            .and_then(|r| r.get_mut(a))
            .ok_or_else(|| Error::Shape(format!("no atom {a} at t={t}")))?;
        let position = read_array(row, "position")?
            .iter()
            .map(read_rational)
            .collect::<Result<Vec<_>>>()?;
        *slot = Some(position);
    }
    PredictableStrategy::from_atoms(space, dims, |t, a| {
        table[t - 1][a].clone().unwrap_or_else(|| vec![zero(); dims])
    })
}

pub fn read_witness(family: &ModelFamily, value: &Value) -> Result<ArbitrageWitness> {
    Ok(ArbitrageWitness {
        strategy: read_strategy(family, field(value, "strategy")?)?,
        static_positions: read_array(value, "static_positions")?
            .iter()
            .map(read_rational)
            .collect::<Result<Vec<_>>>()?,
    })
}

/// Outcome of re-checking one embedded certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateCheck {
    /// JSON path of the certificate inside the report.
    pub path: String,
    pub kind: String,
    pub valid: bool,
    pub detail: String,
}

fn walk(value: &Value, path: String, out: &mut Vec<(String, Value)>) {
    match value {
        Value::Object(map) => {
            if matches!(
                map.get("kind").and_then(Value::as_str),
                Some("pricing_system" | "arbitrage_witness")
            ) {
                out.push((path.clone(), value.clone()));
            }
            for (k, v) in map {
                walk(v, format!("{path}.{k}"), out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                walk(v, format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}

/// Finds every tagged certificate in `report` and re-verifies it against
/// the market.
pub fn collect_certificates(
    family: &ModelFamily,
    options: &[StaticOption],
    report: &Value,
) -> Vec<CertificateCheck> {
    let mut found = Vec::new();
    walk(report, "$".into(), &mut found);
    found
        .into_iter()
        .map(|(path, cert)| {
            let kind = cert["kind"].as_str().unwrap_or_default().to_string();
            let with_options = cert.get("with_options").and_then(Value::as_bool).unwrap_or(false);
            let opts = if with_options { options } else { &[] };
            let outcome: Result<String> = if kind == "pricing_system" {
                read_pricing_system(family, &cert).and_then(|q| {
                    verify_pricing_system(family, &q, opts)
                        .map(|_| "verified".to_string())
                        .map_err(|v| Error::Inconsistent(v.to_string()))
                })
            } else {
                read_witness(family, &cert).and_then(|w| {
                    if is_robust_arbitrage(family, &w, opts)? {
                        Ok("verified".to_string())
                    } else {
                        Err(Error::Inconsistent("not a robust arbitrage".into()))
                    }
                })
            };
            match outcome {
                Ok(detail) => CertificateCheck {
                    path,
                    kind,
                    valid: true,
                    detail,
                },
                Err(e) => CertificateCheck {
                    path,
                    kind,
                    valid: false,
                    detail: e.to_string(),
                },
            }
        })
        .collect()
}
