//! Robust super- and sub-hedging, semi-static hedging with options,
//! replication, completeness and the dynamic-programming upper bound.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::arbitrage::robust_arbitrage;
use crate::error::{Error, Result};
use crate::linalg::solve_linear_with_width;
use crate::lp::{lp_solve, Bound, LinearProgram, LpStatus, Relation, Sense, VarId};
use crate::market::{
    gain, translate_options, Claim, ModelFamily, PredictableStrategy, StaticOption,
};
use crate::pricing::{find_pricing_system, pricing_bounds_unchecked, PriceBounds, RobustPricingSystem};
use crate::program::StrategyVars;
use crate::rational::{one, zero, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HedgeSide {
    /// `x + H·S_T + a·g >= f`.
    Super,
    /// `x + H·S_T + a·g <= f`.
    Sub,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HedgeResult {
    pub side: HedgeSide,
    pub price: Rational,
    pub strategy: PredictableStrategy,
    /// Static option positions `a`; empty without options.
    pub static_positions: Vec<Rational>,
    /// Hedging surplus per `(θ, ω)`, always `>= 0`: `x + gains - f` on the
    /// super side and `f - (x + gains)` on the sub side.
    pub residuals: Vec<Vec<Rational>>,
}

/// Terminal value `x + H·S^θ_T + Σ a_i g^θ_i` of a semi-static position.
pub fn semi_static_value(
    family: &ModelFamily,
    initial: &Rational,
    strategy: &PredictableStrategy,
    static_positions: &[Rational],
    options: &[StaticOption],
) -> Result<Vec<Vec<Rational>>> {
    let translated = translate_options(family, options)?;
    (0..family.num_thetas())
        .map(|th| {
            let mut wealth = gain(family, strategy, th, family.horizon())?;
            for (w, v) in wealth.iter_mut().enumerate() {
                *v += initial;
                for (a, g) in static_positions.iter().zip(&translated) {
                    *v += a * g.payoff(th, w);
                }
            }
            Ok(wealth)
        })
        .collect()
}

fn residuals(
    family: &ModelFamily,
    claim: &Claim,
    side: HedgeSide,
    price: &Rational,
    strategy: &PredictableStrategy,
    static_positions: &[Rational],
    options: &[StaticOption],
) -> Result<Vec<Vec<Rational>>> {
    let wealth = semi_static_value(family, price, strategy, static_positions, options)?;
    let res: Vec<Vec<Rational>> = wealth
        .into_iter()
        .zip(claim.payoffs())
        .map(|(v, f)| {
            v.into_iter()
                .zip(f)
                .map(|(v, f)| match side {
                    HedgeSide::Super => v - f,
                    HedgeSide::Sub => f - v,
                })
                .collect()
        })
        .collect();
    if res.iter().flatten().any(|r| r.is_negative()) {
        return Err(Error::Inconsistent("hedge leaves a negative residual".into()));
    }
    Ok(res)
}

fn superhedge_unchecked(
    family: &ModelFamily,
    claim: &Claim,
    options: &[StaticOption],
) -> Result<HedgeResult> {
    let translated = translate_options(family, options)?;
    let mut lp = LinearProgram::new(Sense::Minimize);
    let x = lp.add_var("x", Bound::Free);
    lp.add_objective_term(x, one());
    let strategy = StrategyVars::declare(&mut lp, family);
    let statics: Vec<VarId> = (0..translated.len())
        .map(|i| lp.add_var(format!("a[{i}]"), Bound::Free))
        .collect();
    for th in 0..family.num_thetas() {
        for w in 0..family.space().num_outcomes() {
            let mut terms = vec![(x, one())];
            terms.extend(strategy.gain_terms(family, th, w));
            for (v, g) in statics.iter().zip(&translated) {
                let payoff = g.payoff(th, w);
                if !payoff.is_zero() {
                    terms.push((*v, payoff.clone()));
                }
            }
            lp.add_constraint(terms, Relation::Ge, claim.payoff(th, w).clone());
        }
    }
    let sol = lp_solve(&lp);
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => return Err(Error::UnboundedBelow),
        LpStatus::Infeasible => {
            return Err(Error::Inconsistent("superhedging program is infeasible".into()))
        }
    }
    let price = sol.assignment[x].clone();
    let strategy = strategy.extract(family, &sol.assignment);
    let static_positions: Vec<Rational> =
        statics.iter().map(|&v| sol.assignment[v].clone()).collect();
    let residuals = residuals(
        family,
        claim,
        HedgeSide::Super,
        &price,
        &strategy,
        &static_positions,
        options,
    )?;
    Ok(HedgeResult {
        side: HedgeSide::Super,
        price,
        strategy,
        static_positions,
        residuals,
    })
}

/// Least initial capital that superhedges `claim` in every model with a
/// semi-static strategy, together with an optimal vertex strategy.
pub fn superhedge(
    family: &ModelFamily,
    claim: &Claim,
    options: &[StaticOption],
) -> Result<HedgeResult> {
    claim.check_family(family)?;
    if robust_arbitrage(family, options)?.is_some() {
        return Err(Error::NraViolated);
    }
    superhedge_unchecked(family, claim, options)
}

/// Greatest initial capital that can be subhedged: `-π(-f)`.
pub fn subhedge(
    family: &ModelFamily,
    claim: &Claim,
    options: &[StaticOption],
) -> Result<HedgeResult> {
    let mirrored = superhedge(family, &claim.negate(), options)?;
    Ok(HedgeResult {
        side: HedgeSide::Sub,
        price: -mirrored.price,
        strategy: mirrored.strategy.negate(),
        static_positions: mirrored.static_positions.iter().map(|a| -a).collect(),
        residuals: mirrored.residuals,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorstCase {
    /// `max_θ π^θ(f^θ)`.
    pub price: Rational,
    /// Per-model superhedges, each on the one-model market `{θ}`.
    pub per_model: Vec<HedgeResult>,
}

/// The model-by-model superhedging prices and their maximum. Every model
/// must be arbitrage-free on its own.
pub fn worst_case_superhedge(family: &ModelFamily, claim: &Claim) -> Result<WorstCase> {
    claim.check_family(family)?;
    let per_model = (0..family.num_thetas())
        .into_par_iter()
        .map(|th| {
            let single = family.restrict(th)?;
            let coordinate = Claim::new(&single, vec![claim.payoffs()[th].clone()])?;
            superhedge(&single, &coordinate, &[])
        })
        .collect::<Result<Vec<_>>>()?;
    let price = per_model
        .iter()
        .map(|h| h.price.clone())
        .max()
        .expect("families are non-empty");
    Ok(WorstCase { price, per_model })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replication {
    pub initial: Rational,
    pub strategy: PredictableStrategy,
}

/// Solves `x + H·S^θ_T = f^θ` exactly in every model and outcome.
pub fn replicable(family: &ModelFamily, claim: &Claim) -> Result<Option<Replication>> {
    claim.check_family(family)?;
    let space = family.space();
    let mut offsets = Vec::with_capacity(space.horizon());
    let mut columns = 1;
    for t in 1..=space.horizon() {
        offsets.push(columns);
        columns += space.atoms(t - 1).len() * family.dims();
    }
    let mut matrix = Vec::new();
    let mut rhs = Vec::new();
    for th in 0..family.num_thetas() {
        for w in 0..space.num_outcomes() {
            let mut row = vec![zero(); columns];
            row[0] = one();
            for t in 1..=space.horizon() {
                let base = offsets[t - 1] + space.atom_of(t - 1, w) * family.dims();
                for (j, d) in family.increment(th, t, w).into_iter().enumerate() {
                    row[base + j] = d;
                }
            }
            matrix.push(row);
            rhs.push(claim.payoff(th, w).clone());
        }
    }
    let Some(solution) = solve_linear_with_width(&matrix, &rhs, columns) else {
        return Ok(None);
    };
    let strategy = PredictableStrategy::from_atoms(space, family.dims(), |t, a| {
        let base = offsets[t - 1] + a * family.dims();
        solution[base..base + family.dims()].to_vec()
    })?;
    Ok(Some(Replication {
        initial: solution[0].clone(),
        strategy,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completeness {
    pub complete: bool,
    /// A non-replicable indicator claim `1^θ_A` when incomplete.
    pub witness: Option<IndicatorClaim>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorClaim {
    pub theta: usize,
    /// The event `A` is atom `atom` of `F_t`.
    pub t: usize,
    pub atom: usize,
    pub claim: Claim,
}

/// Completeness under no robust arbitrage: every indicator `1^θ_A` must be
/// replicable. Indicators are tried coarse to fine (`F_0` atoms first), so
/// the reported witness is the coarsest failing one. The verdict is
/// cross-checked against collapsing price bounds of the `F_T` indicators.
pub fn market_complete(family: &ModelFamily) -> Result<Completeness> {
    if robust_arbitrage(family, &[])?.is_some() {
        return Err(Error::NraViolated);
    }
    let space = family.space();
    let mut candidates = Vec::new();
    for t in 0..=space.horizon() {
        for th in 0..family.num_thetas() {
            for a in 0..space.atoms(t).len() {
                candidates.push((t, th, a));
            }
        }
    }
    let verdicts = candidates
        .par_iter()
        .map(|&(t, th, a)| {
            let claim = Claim::indicator(family, th, &space.atoms(t)[a]);
            Ok(replicable(family, &claim)?.is_none().then_some(IndicatorClaim {
                theta: th,
                t,
                atom: a,
                claim,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let witness = verdicts.into_iter().flatten().next();
    let complete = witness.is_none();

    let horizon = space.horizon();
    let terminal: Vec<(usize, usize)> = (0..family.num_thetas())
        .flat_map(|th| (0..space.atoms(horizon).len()).map(move |a| (th, a)))
        .collect();
    let all_points = terminal
        .par_iter()
        .map(|&(th, a)| {
            let claim = Claim::indicator(family, th, &space.atoms(horizon)[a]);
            Ok(pricing_bounds_unchecked(family, &claim, &[])?.is_point())
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|p| p);
    if all_points != complete {
        return Err(Error::Inconsistent(
            "replication and price-bound completeness tests disagree".into(),
        ));
    }
    Ok(Completeness { complete, witness })
}

/// One-period robust superhedge at atom `atom` of `F_{t-1}`: the least `x`
/// with `x + H·ΔS^θ_t(ω) >= target[θ][ω]` for all `θ` and `ω` in the atom.
fn one_period_superhedge(
    family: &ModelFamily,
    t: usize,
    atom: usize,
    target: &[Vec<Rational>],
) -> Result<Rational> {
    let mut lp = LinearProgram::new(Sense::Minimize);
    let x = lp.add_var("x", Bound::Free);
    lp.add_objective_term(x, one());
    let h: Vec<VarId> = (0..family.dims())
        .map(|j| lp.add_var(format!("H[{j}]"), Bound::Free))
        .collect();
    for th in 0..family.num_thetas() {
        for &w in &family.space().atoms(t - 1)[atom] {
            let mut terms = vec![(x, one())];
            for (j, d) in family.increment(th, t, w).into_iter().enumerate() {
                if !d.is_zero() {
                    terms.push((h[j], d));
                }
            }
            lp.add_constraint(terms, Relation::Ge, target[th][w].clone());
        }
    }
    let sol = lp_solve(&lp);
    match sol.status {
        LpStatus::Optimal => Ok(sol.assignment[x].clone()),
        LpStatus::Unbounded => Err(Error::NraViolated),
        LpStatus::Infeasible => Err(Error::Inconsistent("one-period hedge infeasible".into())),
    }
}

/// Backward recursion of one-period robust superhedges. From `T-1` down,
/// the value at each node is a single model-independent capital. Always at
/// least the global superhedging price.
pub fn dp_superhedge(family: &ModelFamily, claim: &Claim) -> Result<Rational> {
    claim.check_family(family)?;
    if robust_arbitrage(family, &[])?.is_some() {
        return Err(Error::NraViolated);
    }
    let space = family.space();
    let n = space.num_outcomes();
    let mut target: Vec<Vec<Rational>> = claim.payoffs().to_vec();
    for t in (1..=space.horizon()).rev() {
        let node_values = (0..space.atoms(t - 1).len())
            .into_par_iter()
            .map(|a| one_period_superhedge(family, t, a, &target))
            .collect::<Result<Vec<_>>>()?;
        let value: Vec<Rational> = (0..n)
            .map(|w| node_values[space.atom_of(t - 1, w)].clone())
            .collect();
        target = vec![value; family.num_thetas()];
    }
    if space.horizon() == 0 {
        return Ok(target.into_iter().flatten().max().expect("non-empty"));
    }
    Ok(target[0].iter().max().expect("non-empty").clone())
}

/// Prices before and after calibrating to a set of static options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Calibration {
    pub uncalibrated: PriceBounds,
    pub calibrated: PriceBounds,
    /// Semi-static superhedge using the options.
    pub superhedge: HedgeResult,
    pub subhedge: HedgeResult,
    /// A calibrated pricing system charging each model, in family order.
    pub systems: Vec<RobustPricingSystem>,
}

pub fn calibrate(
    family: &ModelFamily,
    claim: &Claim,
    options: &[StaticOption],
) -> Result<Calibration> {
    claim.check_family(family)?;
    if robust_arbitrage(family, options)?.is_some() {
        return Err(Error::NraViolated);
    }
    let uncalibrated = pricing_bounds_unchecked(family, claim, &[])?;
    let calibrated = pricing_bounds_unchecked(family, claim, options)?;
    let sup = superhedge_unchecked(family, claim, options)?;
    let sub = superhedge_unchecked(family, &claim.negate(), options)?;
    let subhedge = HedgeResult {
        side: HedgeSide::Sub,
        price: -sub.price,
        strategy: sub.strategy.negate(),
        static_positions: sub.static_positions.iter().map(|a| -a).collect(),
        residuals: sub.residuals,
    };
    let systems = (0..family.num_thetas())
        .into_par_iter()
        .map(|th| {
            find_pricing_system(family, th, options)?.ok_or_else(|| {
                Error::Inconsistent("calibrated market without a calibrated system".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Calibration {
        uncalibrated,
        calibrated,
        superhedge: sup,
        subhedge,
        systems,
    })
}
