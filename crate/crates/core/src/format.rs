//! The JSON market file: a filtered space with explicit price processes or
//! a toy stanza, plus static options and named claims.
//!
//! Every error carries a path into the document such as
//! `$.space.partitions[1]`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::market::{build_space, AdaptedProcess, Claim, FilteredSpace, ModelFamily, StaticOption};
use crate::rational::{Exact, Rational};
use crate::toy::{build_toy, ToyModel, ToyParams};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketDocument {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<ModelBlock>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToyBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<OptionBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub claims: BTreeMap<String, Payoff>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceBlock {
    pub outcomes: Vec<String>,
    /// `partitions[t]` lists the atoms of `F_t` by outcome name.
    pub partitions: Vec<Vec<Vec<String>>>,
    pub prob: Vec<Exact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub name: String,
    /// `prices[t][outcome]`.
    pub prices: Vec<Vec<PriceCell>>,
}

/// A scalar price for one asset, or a vector for several.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriceCell {
    Scalar(Exact),
    Vector(Vec<Exact>),
}

impl PriceCell {
    fn values(&self) -> Vec<Rational> {
        match self {
            PriceCell::Scalar(x) => vec![x.0.clone()],
            PriceCell::Vector(v) => v.iter().map(|x| x.0.clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyBlock {
    pub horizon: usize,
    pub s0: Exact,
    pub models: Vec<ToyModelBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prob: Option<Vec<Exact>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyModelBlock {
    pub name: String,
    pub mu: Vec<Exact>,
    pub sigma: Vec<Exact>,
}

/// Payoff arrays keyed by model name, in outcome order.
pub type Payoff = BTreeMap<String, Vec<Exact>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionBlock {
    pub name: String,
    pub payoff: Payoff,
    pub quote: Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {file}: {message}")]
    Io { file: String, message: String },
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid market at {path}: {source}")]
    Invalid { path: String, source: Error },
}

impl LoadError {
    pub fn path(&self) -> Option<&str> {
        match self {
            LoadError::Io { .. } => None,
            LoadError::Parse { path, .. } | LoadError::Invalid { path, .. } => Some(path),
        }
    }
}

fn parse_error(path: impl Into<String>, message: impl Into<String>) -> LoadError {
    LoadError::Parse {
        path: path.into(),
        message: message.into(),
    }
}

fn invalid(path: impl Into<String>, source: Error) -> LoadError {
    LoadError::Invalid {
        path: path.into(),
        source,
    }
}

/// Renders a serde path as `$.a.b[0]`.
fn json_path(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::from("$");
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("[{index}]")),
            Segment::Map { key } | Segment::Enum { variant: key } => {
                out.push('.');
                out.push_str(key);
            }
            Segment::Unknown => out.push_str(".?"),
        }
    }
    out
}

pub fn parse_document(text: &str) -> Result<MarketDocument, LoadError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: MarketDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = json_path(e.path());
        parse_error(path, e.into_inner().to_string())
    })?;
    if doc.version != FORMAT_VERSION {
        return Err(parse_error(
            "$.version",
            format!("unsupported version {}, expected {FORMAT_VERSION}", doc.version),
        ));
    }
    Ok(doc)
}

/// A validated market.
#[derive(Debug, Clone)]
pub struct Market {
    pub family: ModelFamily,
    /// Static options in document order.
    pub options: Vec<(String, StaticOption)>,
    pub claims: BTreeMap<String, Claim>,
}

impl Market {
    pub fn claim(&self, name: &str) -> Result<&Claim, LoadError> {
        self.claims.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.claims.keys().map(String::as_str).collect();
            parse_error(
                format!("$.claims.{name}"),
                format!("no claim named {name:?}; known claims: {known:?}"),
            )
        })
    }

    pub fn static_options(&self) -> Vec<StaticOption> {
        self.options.iter().map(|(_, o)| o.clone()).collect()
    }
}

pub fn load_market(text: &str) -> Result<Market, LoadError> {
    parse_document(text)?.build()
}

pub fn load_market_file(file: &std::path::Path) -> Result<Market, LoadError> {
    load_market(&read_file(file)?)
}

pub fn read_file(file: &std::path::Path) -> Result<String, LoadError> {
    std::fs::read_to_string(file).map_err(|e| LoadError::Io {
        file: file.display().to_string(),
        message: e.to_string(),
    })
}

fn toy_params(toy: &ToyBlock) -> ToyParams {
    ToyParams {
        horizon: toy.horizon,
        s0: toy.s0.0.clone(),
        models: toy
            .models
            .iter()
            .map(|m| {
                ToyModel::new(
                    m.name.clone(),
                    m.mu.iter().map(|x| x.0.clone()).collect(),
                    m.sigma.iter().map(|x| x.0.clone()).collect(),
                )
            })
            .collect(),
        prob: toy.prob.as_ref().map(|p| p.iter().map(|x| x.0.clone()).collect()),
    }
}

fn build_space_block(block: &SpaceBlock) -> Result<FilteredSpace, LoadError> {
    if block.partitions.is_empty() {
        return Err(parse_error("$.space.partitions", "at least F_0 is required"));
    }
    let index: BTreeMap<&str, usize> = block
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, name)| (name.as_str(), i))
        .collect();
    if index.len() != block.outcomes.len() {
        return Err(parse_error("$.space.outcomes", "duplicate outcome names"));
    }
    let mut partitions = Vec::with_capacity(block.partitions.len());
    for (t, atoms) in block.partitions.iter().enumerate() {
        let mut resolved = Vec::with_capacity(atoms.len());
        for (a, atom) in atoms.iter().enumerate() {
            let mut ids = Vec::with_capacity(atom.len());
            for (i, name) in atom.iter().enumerate() {
                let id = index.get(name.as_str()).ok_or_else(|| {
                    parse_error(
                        format!("$.space.partitions[{t}][{a}][{i}]"),
                        format!("unknown outcome {name:?}"),
                    )
                })?;
                ids.push(*id);
            }
            resolved.push(ids);
        }
        partitions.push(resolved);
    }
    let prob = block.prob.iter().map(|x| x.0.clone()).collect();
    let horizon = partitions.len() - 1;
    build_space(block.outcomes.clone(), horizon, partitions, prob).map_err(|e| {
        let path = match &e {
            Error::Refinement { t, .. } | Error::Partition { t, .. } => {
                format!("$.space.partitions[{t}]")
            }
            Error::Measure(_) => "$.space.prob".to_string(),
            _ => "$.space".to_string(),
        };
        invalid(path, e)
    })
}

fn build_models(space: FilteredSpace, models: &[ModelBlock]) -> Result<ModelFamily, LoadError> {
    if models.is_empty() {
        return Err(parse_error("$.models", "at least one model is required"));
    }
    let n = space.num_outcomes();
    let mut dims = None;
    let mut processes = Vec::with_capacity(models.len());
    for (i, m) in models.iter().enumerate() {
        if m.prices.len() != space.horizon() + 1 {
            return Err(invalid(
                format!("$.models[{i}].prices"),
                Error::Shape(format!(
                    "expected {} dates, got {}",
                    space.horizon() + 1,
                    m.prices.len()
                )),
            ));
        }
        let mut values = Vec::with_capacity(m.prices.len());
        for (t, row) in m.prices.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(
                    format!("$.models[{i}].prices[{t}]"),
                    Error::Shape(format!("expected {n} outcomes, got {}", row.len())),
                ));
            }
            let mut cells = Vec::with_capacity(n);
            for (w, cell) in row.iter().enumerate() {
                let v = cell.values();
                let d = *dims.get_or_insert(v.len());
                if v.len() != d || d == 0 {
                    return Err(invalid(
                        format!("$.models[{i}].prices[{t}][{w}]"),
                        Error::Shape(format!("expected {d} asset prices, got {}", v.len())),
                    ));
                }
                cells.push(v);
            }
            values.push(cells);
        }
        let process = AdaptedProcess::new(dims.unwrap_or(1), values)
            .map_err(|e| invalid(format!("$.models[{i}].prices"), e))?;
        processes.push(process);
    }
    let names: Vec<String> = models.iter().map(|m| m.name.clone()).collect();
    ModelFamily::new(space, names.clone(), processes).map_err(|e| {
        let path = match &e {
            Error::NotAdapted { theta, .. } => names
                .iter()
                .position(|n| n == theta)
                .map(|i| format!("$.models[{i}].prices"))
                .unwrap_or_else(|| "$.models".into()),
            _ => "$.models".into(),
        };
        invalid(path, e)
    })
}

fn build_payoff(family: &ModelFamily, payoff: &Payoff, path: &str) -> Result<Claim, LoadError> {
    let n = family.space().num_outcomes();
    if let Some(extra) = payoff.keys().find(|k| family.theta_index(k).is_err()) {
        return Err(invalid(
            format!("{path}.{extra}"),
            Error::ThetaUnknown(extra.clone()),
        ));
    }
    let mut rows = Vec::with_capacity(family.num_thetas());
    for theta in family.thetas() {
        let row = payoff.get(theta).ok_or_else(|| {
            parse_error(path.to_string(), format!("missing payoff for model {theta:?}"))
        })?;
        if row.len() != n {
            return Err(invalid(
                format!("{path}.{theta}"),
                Error::Shape(format!("expected {n} outcomes, got {}", row.len())),
            ));
        }
        rows.push(row.iter().map(|x| x.0.clone()).collect());
    }
    Claim::new(family, rows).map_err(|e| invalid(path.to_string(), e))
}

impl MarketDocument {
    pub fn build(&self) -> Result<Market, LoadError> {
        let family = match (&self.space, &self.models, &self.toy) {
            (Some(space), Some(models), None) => build_models(build_space_block(space)?, models)?,
            (None, None, Some(toy)) => {
                build_toy(&toy_params(toy)).map_err(|e| invalid("$.toy", e))?
            }
            (_, _, Some(_)) => {
                return Err(parse_error("$.toy", "a toy stanza excludes space and models"))
            }
            (None, _, None) => return Err(parse_error("$.space", "missing space block")),
            (Some(_), None, None) => return Err(parse_error("$.models", "missing models block")),
        };
        let mut options = Vec::with_capacity(self.options.len());
        for (i, o) in self.options.iter().enumerate() {
            let claim = build_payoff(&family, &o.payoff, &format!("$.options[{i}].payoff"))?;
            options.push((o.name.clone(), StaticOption::new(claim, o.quote.0.clone())));
        }
        let mut claims = BTreeMap::new();
        for (name, payoff) in &self.claims {
            claims.insert(name.clone(), build_payoff(&family, payoff, &format!("$.claims.{name}"))?);
        }
        Ok(Market {
            family,
            options,
            claims,
        })
    }

    /// Replaces a toy stanza by the explicit space and models it denotes.
    pub fn expand(&self) -> Result<MarketDocument, LoadError> {
        if self.toy.is_none() {
            return Ok(self.clone());
        }
        let market = self.build()?;
        let mut doc = document_from_family(&market.family);
        doc.options = self.options.clone();
        doc.claims = self.claims.clone();
        Ok(doc)
    }
}

/// An explicit market document for `family`, without options or claims.
pub fn document_from_family(family: &ModelFamily) -> MarketDocument {
    let space = family.space();
    let name = |w: usize| space.outcomes()[w].clone();
    let space_block = SpaceBlock {
        outcomes: space.outcomes().to_vec(),
        partitions: (0..=space.horizon())
            .map(|t| {
                space
                    .atoms(t)
                    .iter()
                    .map(|atom| atom.iter().map(|&w| name(w)).collect())
                    .collect()
            })
            .collect(),
        prob: space.probabilities().iter().map(Exact::from).collect(),
    };
    let models = family
        .thetas()
        .iter()
        .zip(family.processes())
        .map(|(theta, process)| ModelBlock {
            name: theta.clone(),
            prices: process
                .values()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| {
                            if v.len() == 1 {
                                PriceCell::Scalar(Exact::from(&v[0]))
                            } else {
                                PriceCell::Vector(v.iter().map(Exact::from).collect())
                            }
                        })
                        .collect()
                })
                .collect(),
        })
        .collect();
    MarketDocument {
        version: FORMAT_VERSION,
        space: Some(space_block),
        models: Some(models),
        toy: None,
        options: Vec::new(),
        claims: BTreeMap::new(),
    }
}

/// Payoff map of a claim, for writing documents.
pub fn payoff_of(family: &ModelFamily, claim: &Claim) -> Payoff {
    family
        .thetas()
        .iter()
        .zip(claim.payoffs())
        .map(|(theta, row)| (theta.clone(), row.iter().map(Exact::from).collect()))
        .collect()
}
