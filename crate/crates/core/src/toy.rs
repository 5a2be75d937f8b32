//! Binary-tree toy markets with drift and volatility uncertainty.
//!
//! Outcomes are sign strings such as `"+-"`, ordered with `+` first, so
//! outcome `k` has `ω_u = -1` exactly when bit `T - u` of `k` is set.

use num_bigint::BigUint;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::market::{build_space, AdaptedProcess, FilteredSpace, ModelFamily};
use crate::pricing::RobustPricingSystem;
use crate::rational::{format_rational, int, one, rat, zero, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyModel {
    pub name: String,
    /// `mu[t - 1]` is the drift of period `t`.
    pub mu: Vec<Rational>,
    pub sigma: Vec<Rational>,
}

impl ToyModel {
    pub fn new(name: impl Into<String>, mu: Vec<Rational>, sigma: Vec<Rational>) -> Self {
        ToyModel {
            name: name.into(),
            mu,
            sigma,
        }
    }

    /// Same drift and volatility in every period.
    pub fn constant(name: impl Into<String>, horizon: usize, mu: Rational, sigma: Rational) -> Self {
        ToyModel::new(name, vec![mu; horizon], vec![sigma; horizon])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyParams {
    pub horizon: usize,
    pub s0: Rational,
    pub models: Vec<ToyModel>,
    /// Path probabilities in outcome order; uniform when `None`.
    pub prob: Option<Vec<Rational>>,
}

impl ToyParams {
    pub fn new(horizon: usize, s0: Rational, models: Vec<ToyModel>) -> Self {
        ToyParams {
            horizon,
            s0,
            models,
            prob: None,
        }
    }

    /// One-period market with one `(μ, σ)` pair per model, named
    /// `theta1, theta2, ...`.
    pub fn one_period(s0: Rational, params: &[(Rational, Rational)]) -> Self {
        let models = params
            .iter()
            .enumerate()
            .map(|(i, (mu, sigma))| ToyModel::constant(format!("theta{}", i + 1), 1, mu.clone(), sigma.clone()))
            .collect();
        ToyParams::new(1, s0, models)
    }
}

/// `ω_u` for outcome index `k` on a horizon-`T` tree.
pub fn coordinate(horizon: usize, outcome: usize, u: usize) -> i64 {
    if (outcome >> (horizon - u)) & 1 == 0 {
        1
    } else {
        -1
    }
}

pub fn toy_outcomes(horizon: usize) -> Vec<String> {
    (0..1usize << horizon)
        .map(|k| {
            (1..=horizon)
                .map(|u| if coordinate(horizon, k, u) > 0 { '+' } else { '-' })
                .collect()
        })
        .collect()
}

/// `{-1, 1}^T` with the coordinate filtration.
pub fn toy_space(horizon: usize, prob: Option<Vec<Rational>>) -> Result<FilteredSpace> {
    if horizon == 0 {
        return Err(Error::Param("horizon must be positive".into()));
    }
    if horizon > 16 {
        return Err(Error::Param(format!("horizon {horizon} is too large for a binary tree")));
    }
    let n = 1usize << horizon;
    let partitions = (0..=horizon)
        .map(|t| {
            let width = 1usize << (horizon - t);
            (0..n / width)
                .map(|prefix| (prefix * width..(prefix + 1) * width).collect())
                .collect()
        })
        .collect();
    let prob = prob.unwrap_or_else(|| vec![rat(1, n as i64); n]);
    build_space(toy_outcomes(horizon), horizon, partitions, prob)
}

/// General binary-tree family: `params[θ][t - 1][atom]` is the `(μ_t, σ_t)`
/// pair used on that atom of `F_{t-1}`.
fn tree_family(
    space: FilteredSpace,
    s0: &Rational,
    names: Vec<String>,
    params: &[Vec<Vec<(Rational, Rational)>>],
) -> Result<ModelFamily> {
    let horizon = space.horizon();
    let processes = params
        .iter()
        .map(|per_theta| {
            AdaptedProcess::from_fn(&space, 1, |t, w| {
                let mut s = s0.clone();
                for u in 1..=t {
                    let (mu, sigma) = &per_theta[u - 1][space.atom_of(u - 1, w)];
                    s += mu + sigma * int(coordinate(horizon, w, u));
                }
                vec![s]
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ModelFamily::new(space, names, processes)
}

/// `S^θ_t = s0 + Σ_{u<=t} (μ_u + σ_u ω_u)`.
pub fn build_toy(params: &ToyParams) -> Result<ModelFamily> {
    if params.models.is_empty() {
        return Err(Error::Param("no models".into()));
    }
    for m in &params.models {
        if m.mu.len() != params.horizon || m.sigma.len() != params.horizon {
            return Err(Error::Param(format!(
                "model {:?} needs {} drifts and volatilities",
                m.name, params.horizon
            )));
        }
        if let Some(s) = m.sigma.iter().find(|s| !s.is_positive()) {
            return Err(Error::Param(format!(
                "model {:?} has non-positive volatility {}",
                m.name,
                format_rational(s)
            )));
        }
    }
    let space = toy_space(params.horizon, params.prob.clone())?;
    let table: Vec<Vec<Vec<(Rational, Rational)>>> = params
        .models
        .iter()
        .map(|m| {
            (0..params.horizon)
                .map(|u| vec![(m.mu[u].clone(), m.sigma[u].clone()); space.atoms(u).len()])
                .collect()
        })
        .collect();
    let names = params.models.iter().map(|m| m.name.clone()).collect();
    tree_family(space, &params.s0, names, &table)
}

/// Unique martingale measure of one period, as `(Q(+1), Q(-1))`.
pub fn toy_emm(mu: &Rational, sigma: &Rational) -> Result<(Rational, Rational)> {
    if !sigma.is_positive() || mu.abs() >= *sigma {
        return Err(Error::Domain(format!(
            "need |mu| < sigma, got mu={} sigma={}",
            format_rational(mu),
            format_rational(sigma)
        )));
    }
    let half = rat(1, 2);
    let ratio = mu / sigma;
    Ok((&half * (one() - &ratio), &half * (one() + ratio)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyPoint {
    pub alpha: Rational,
    pub beta: Rational,
}

impl FamilyPoint {
    pub fn new(alpha: Rational, beta: Rational) -> Self {
        FamilyPoint { alpha, beta }
    }
}

struct OnePeriod {
    mu1: Rational,
    sigma1: Rational,
    mu2: Rational,
    sigma2: Rational,
}

fn one_period_pair(params: &ToyParams) -> Result<OnePeriod> {
    if params.horizon != 1 || params.models.len() != 2 {
        return Err(Error::Param(
            "explicit family needs a one-period market with two models".into(),
        ));
    }
    let (a, b) = (&params.models[0], &params.models[1]);
    if a.mu.len() != 1 || a.sigma.len() != 1 || b.mu.len() != 1 || b.sigma.len() != 1 {
        return Err(Error::Param("expected one drift and volatility per model".into()));
    }
    Ok(OnePeriod {
        mu1: a.mu[0].clone(),
        sigma1: a.sigma[0].clone(),
        mu2: b.mu[0].clone(),
        sigma2: b.sigma[0].clone(),
    })
}

/// The four brackets, before division by `2σ_i`, in the order
/// `q1(+), q1(-), q2(+), q2(-)`.
fn brackets(p: &OnePeriod, point: &FamilyPoint) -> [Rational; 4] {
    let (a, b) = (&point.alpha, &point.beta);
    let rest = one() - a;
    [
        b + a * (&p.sigma1 - &p.mu1),
        -b + a * (&p.sigma1 + &p.mu1),
        -b + &rest * (&p.sigma2 - &p.mu2),
        b + &rest * (&p.sigma2 + &p.mu2),
    ]
}

/// True iff every bracket lies in `[0, 2σ_i]`. Malformed parameters give
/// false.
pub fn family_region_check(params: &ToyParams, point: &FamilyPoint) -> bool {
    let Ok(p) = one_period_pair(params) else {
        return false;
    };
    let caps = [
        int(2) * &p.sigma1,
        int(2) * &p.sigma1,
        int(2) * &p.sigma2,
        int(2) * &p.sigma2,
    ];
    brackets(&p, point)
        .iter()
        .zip(&caps)
        .all(|(v, cap)| !v.is_negative() && v <= cap)
}

/// The interval of admissible `β` for a given `α`, if non-empty.
pub fn region_beta_bounds(params: &ToyParams, alpha: &Rational) -> Option<(Rational, Rational)> {
    let p = one_period_pair(params).ok()?;
    let two = int(2);
    let rest = one() - alpha;
    let u1 = alpha * (&p.sigma1 - &p.mu1);
    let v1 = alpha * (&p.sigma1 + &p.mu1);
    let u2 = &rest * (&p.sigma2 - &p.mu2);
    let v2 = &rest * (&p.sigma2 + &p.mu2);
    let lows = [-u1.clone(), &v1 - &two * &p.sigma1, &u2 - &two * &p.sigma2, -v2.clone()];
    let highs = [&two * &p.sigma1 - u1, v1, u2, &two * &p.sigma2 - v2];
    let lo = lows.into_iter().max()?;
    let hi = highs.into_iter().min()?;
    (lo <= hi).then_some((lo, hi))
}

/// Closed-form pricing system of the one-period two-model market.
pub fn explicit_family(params: &ToyParams, point: &FamilyPoint) -> Result<RobustPricingSystem> {
    let p = one_period_pair(params)?;
    if !family_region_check(params, point) {
        return Err(Error::Region {
            alpha: point.alpha.clone(),
            beta: point.beta.clone(),
        });
    }
    let family = build_toy(params)?;
    let [a, b, c, d] = brackets(&p, point);
    let two = int(2);
    let d1 = &two * &p.sigma1;
    let d2 = &two * &p.sigma2;
    RobustPricingSystem::new(&family, vec![vec![a / &d1, b / &d1], vec![c / &d2, d / &d2]])
}

#[derive(Debug, Clone)]
pub struct LearningFamily {
    pub family: ModelFamily,
    /// Number of predictable parameter selections before truncation.
    pub total: BigUint,
    pub truncated: bool,
    /// `selections[θ]` lists grid indices in `(t, atom)` order.
    pub selections: Vec<Vec<usize>>,
}

/// Every predictable selection of `(μ_t, σ_t)` from `grids[t - 1]`, one
/// choice per atom of `F_{t-1}`, in lexicographic order of `(t, atom)`
/// positions, keeping at most `cap` models.
pub fn learning_grid(
    horizon: usize,
    s0: &Rational,
    grids: &[Vec<(Rational, Rational)>],
    cap: usize,
) -> Result<LearningFamily> {
    if grids.len() != horizon {
        return Err(Error::Param(format!("need {horizon} grids, got {}", grids.len())));
    }
    if grids.iter().any(|g| g.is_empty()) {
        return Err(Error::Param("empty grid".into()));
    }
    if grids.iter().flatten().any(|(_, s)| !s.is_positive()) {
        return Err(Error::Param("grid volatilities must be positive".into()));
    }
    if cap == 0 {
        return Err(Error::Param("cap must be positive".into()));
    }
    let space = toy_space(horizon, None)?;
    // Radix of each (t, atom) position.
    let radices: Vec<usize> = (1..=horizon)
        .flat_map(|t| std::iter::repeat(grids[t - 1].len()).take(space.atoms(t - 1).len()))
        .collect();
    let total = radices
        .iter()
        .fold(BigUint::one(), |acc, &r| acc * BigUint::from(r));

    let mut selections = Vec::new();
    let mut digits = vec![0usize; radices.len()];
    loop {
        selections.push(digits.clone());
        if selections.len() == cap {
            break;
        }
        let mut pos = digits.len();
        let advanced = loop {
            if pos == 0 {
                break false;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < radices[pos] {
                break true;
            }
            digits[pos] = 0;
        };
        if !advanced {
            break;
        }
    }
    let truncated = BigUint::from(selections.len()) < total;

    let mut names = Vec::with_capacity(selections.len());
    let mut table = Vec::with_capacity(selections.len());
    for sel in &selections {
        let mut offset = 0;
        let mut per_t = Vec::with_capacity(horizon);
        let mut label = String::from("g");
        for t in 1..=horizon {
            let n = space.atoms(t - 1).len();
            let chosen = &sel[offset..offset + n];
            per_t.push(chosen.iter().map(|&i| grids[t - 1][i].clone()).collect::<Vec<_>>());
            let parts: Vec<String> = chosen.iter().map(|i| i.to_string()).collect();
            label.push_str(&format!("[{}]", parts.join(",")));
            offset += n;
        }
        names.push(label);
        table.push(per_t);
    }
    let family = tree_family(space, s0, names, &table)?;
    Ok(LearningFamily {
        family,
        total,
        truncated,
        selections,
    })
}

/// `(Q^{θ1}, 0)` style single-model embedding of the one-period measure.
pub fn emm_system(params: &ToyParams, theta: usize) -> Result<RobustPricingSystem> {
    let family = build_toy(params)?;
    family.check_theta(theta)?;
    if params.horizon != 1 {
        return Err(Error::Param("expected a one-period market".into()));
    }
    let m = &params.models[theta];
    let (up, down) = toy_emm(&m.mu[0], &m.sigma[0])?;
    let weights = (0..family.num_thetas())
        .map(|th| if th == theta { vec![up.clone(), down.clone()] } else { vec![zero(), zero()] })
        .collect();
    RobustPricingSystem::new(&family, weights)
}

/// Equal mixture of the per-model product martingale measures,
/// `Q^θ(ω) = Π_u Q^θ_u(ω_u) / |Θ|`. Needs `|μ_t| < σ_t` throughout and
/// a uniform-in-atom parametrisation, which `ToyParams` always has.
pub fn product_system(params: &ToyParams) -> Result<RobustPricingSystem> {
    let family = build_toy(params)?;
    let horizon = params.horizon;
    let share = rat(1, params.models.len() as i64);
    let weights = params
        .models
        .iter()
        .map(|m| {
            let per_period = (0..horizon)
                .map(|u| toy_emm(&m.mu[u], &m.sigma[u]))
                .collect::<Result<Vec<_>>>()?;
            Ok((0..family.space().num_outcomes())
                .map(|w| {
                    per_period.iter().enumerate().fold(share.clone(), |acc, (u, (up, down))| {
                        acc * if coordinate(horizon, w, u + 1) > 0 { up } else { down }
                    })
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    RobustPricingSystem::new(&family, weights)
}
