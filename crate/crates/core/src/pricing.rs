//! Robust pricing systems: the polytope of nonnegative, normalised weights
//! over `(θ, ω)` under which every model's price is a generalized
//! martingale, optionally calibrated to static option quotes.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::arbitrage::robust_arbitrage;
use crate::error::{Error, Result};
use crate::lp::{lp_solve, Bound, LinearProgram, LpStatus, Relation, Sense, VarId};
use crate::market::{translate_options, Claim, ModelFamily, StaticOption};
use crate::rational::{format_rational, one, zero, Rational};

/// Weights `q[θ][ω]`; the density of model `θ` is `q[θ][ω] / P(ω)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustPricingSystem {
    weights: Vec<Vec<Rational>>,
}

impl RobustPricingSystem {
    /// Wraps raw weights. Nothing beyond the shape is checked; use
    /// [`verify_pricing_system`] for the axioms.
    pub fn new(family: &ModelFamily, weights: Vec<Vec<Rational>>) -> Result<Self> {
        let n = family.space().num_outcomes();
        if weights.len() != family.num_thetas() || weights.iter().any(|w| w.len() != n) {
            return Err(Error::Shape(format!(
                "pricing system must have {} x {n} weights",
                family.num_thetas()
            )));
        }
        Ok(RobustPricingSystem { weights })
    }

    pub(crate) fn from_weights(weights: Vec<Vec<Rational>>) -> Self {
        RobustPricingSystem { weights }
    }

    pub fn weight(&self, theta: usize, outcome: usize) -> &Rational {
        &self.weights[theta][outcome]
    }

    pub fn weights(&self) -> &[Vec<Rational>] {
        &self.weights
    }

    /// Total weight of model `theta`.
    pub fn mass(&self, theta: usize) -> Rational {
        self.weights[theta].iter().sum()
    }

    pub fn total_mass(&self) -> Rational {
        self.weights.iter().flatten().sum()
    }

    /// `Z^θ_T(ω) = q[θ][ω] / P(ω)`.
    pub fn density(&self, family: &ModelFamily, theta: usize, outcome: usize) -> Rational {
        &self.weights[theta][outcome] / family.space().prob(outcome)
    }

    pub fn scale(&self, factor: &Rational) -> RobustPricingSystem {
        RobustPricingSystem {
            weights: self
                .weights
                .iter()
                .map(|row| row.iter().map(|q| q * factor).collect())
                .collect(),
        }
    }

    /// `λ·self + (1-λ)·other`.
    pub fn mix(&self, other: &RobustPricingSystem, lambda: &Rational) -> RobustPricingSystem {
        let rest = one() - lambda;
        RobustPricingSystem {
            weights: self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * lambda + y * &rest).collect())
                .collect(),
        }
    }

    /// The one-model measure `Q` embedded as the block of model `theta`.
    pub fn embed(family: &ModelFamily, theta: usize, measure: &[Rational]) -> Self {
        let n = family.space().num_outcomes();
        let weights = (0..family.num_thetas())
            .map(|th| {
                if th == theta {
                    measure.to_vec()
                } else {
                    vec![zero(); n]
                }
            })
            .collect();
        RobustPricingSystem { weights }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Normalization,
    /// Generalized martingale row for asset `asset` between `t-1` and `t`
    /// on atom `atom` of `F_{t-1}`.
    Martingale { t: usize, atom: usize, asset: usize },
    /// Zero price for the (quote-translated) option `option`.
    Calibration { option: usize },
}

/// One bracketed row per model: `[q(θ1,ω1), ...] [q(θ2,ω1), ...]`.
impl fmt::Display for RobustPricingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.weights.iter().map(|r| crate::rational::show(r)).collect();
        write!(f, "{}", rows.join(" "))
    }
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowKind::Normalization => write!(f, "normalization"),
            RowKind::Martingale { t, atom, asset } => {
                write!(f, "martingale(t={t}, atom={atom}, asset={asset})")
            }
            RowKind::Calibration { option } => write!(f, "calibration(option={option})"),
        }
    }
}

/// One equality `Σ coeffs[θ][ω] · q[θ][ω] = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PricingRow {
    pub kind: RowKind,
    pub coeffs: Vec<Vec<Rational>>,
    pub rhs: Rational,
}

/// Exactly the normalization, martingale and calibration equalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PricingConstraintSet {
    pub rows: Vec<PricingRow>,
}

pub fn pricing_constraints(
    family: &ModelFamily,
    options: &[StaticOption],
) -> Result<PricingConstraintSet> {
    let translated = translate_options(family, options)?;
    let space = family.space();
    let k = family.num_thetas();
    let n = space.num_outcomes();
    let mut rows = vec![PricingRow {
        kind: RowKind::Normalization,
        coeffs: vec![vec![one(); n]; k],
        rhs: one(),
    }];
    for t in 1..=space.horizon() {
        for (a, atom) in space.atoms(t - 1).iter().enumerate() {
            for j in 0..family.dims() {
                let mut coeffs = vec![vec![zero(); n]; k];
                for (th, row) in coeffs.iter_mut().enumerate() {
                    for &w in atom {
                        row[w] = family.increment(th, t, w).swap_remove(j);
                    }
                }
                rows.push(PricingRow {
                    kind: RowKind::Martingale { t, atom: a, asset: j },
                    coeffs,
                    rhs: zero(),
                });
            }
        }
    }
    for (i, g) in translated.into_iter().enumerate() {
        rows.push(PricingRow {
            kind: RowKind::Calibration { option: i },
            coeffs: g.payoffs().to_vec(),
            rhs: zero(),
        });
    }
    Ok(PricingConstraintSet { rows })
}

/// The pricing polytope as an LP over `q >= 0`, with no objective yet.
fn polytope_program(
    family: &ModelFamily,
    constraints: &PricingConstraintSet,
    sense: Sense,
) -> (LinearProgram, Vec<Vec<VarId>>) {
    let mut lp = LinearProgram::new(sense);
    let vars: Vec<Vec<VarId>> = (0..family.num_thetas())
        .map(|th| {
            (0..family.space().num_outcomes())
                .map(|w| lp.add_var(format!("q[{th}][{w}]"), Bound::NonNegative))
                .collect()
        })
        .collect();
    for row in &constraints.rows {
        let terms = row
            .coeffs
            .iter()
            .zip(&vars)
            .flat_map(|(cs, vs)| {
                cs.iter()
                    .zip(vs)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, v)| (*v, c.clone()))
            })
            .collect();
        lp.add_constraint(terms, Relation::Eq, row.rhs.clone());
    }
    (lp, vars)
}

fn read_system(vars: &[Vec<VarId>], assignment: &[Rational]) -> RobustPricingSystem {
    RobustPricingSystem::from_weights(
        vars.iter()
            .map(|vs| vs.iter().map(|&v| assignment[v].clone()).collect())
            .collect(),
    )
}

/// `Q(f) = Σ_{θ,ω} q[θ][ω] f^θ(ω)`.
pub fn evaluate(system: &RobustPricingSystem, claim: &Claim) -> Result<Rational> {
    if system.weights.len() != claim.num_thetas()
        || system
            .weights
            .iter()
            .zip(claim.payoffs())
            .any(|(q, f)| q.len() != f.len())
    {
        return Err(Error::Shape("claim and pricing system differ in shape".into()));
    }
    Ok(system
        .weights
        .iter()
        .zip(claim.payoffs())
        .flat_map(|(q, f)| q.iter().zip(f))
        .filter(|(q, _)| !q.is_zero())
        .map(|(q, f)| q * f)
        .sum())
}

/// A pricing system with nonzero mass on model `theta`, if one exists: the
/// maximiser of the `theta`-block mass over the (calibrated) polytope.
pub fn find_pricing_system(
    family: &ModelFamily,
    theta: usize,
    options: &[StaticOption],
) -> Result<Option<RobustPricingSystem>> {
    family.check_theta(theta)?;
    let constraints = pricing_constraints(family, options)?;
    let (mut lp, vars) = polytope_program(family, &constraints, Sense::Maximize);
    for &v in &vars[theta] {
        lp.add_objective_term(v, one());
    }
    let sol = lp_solve(&lp);
    match sol.status {
        LpStatus::Optimal if sol.value.as_ref().is_some_and(|v| v.is_positive()) => {
            Ok(Some(read_system(&vars, &sol.assignment)))
        }
        _ => Ok(None),
    }
}

/// A pricing system whose `theta`-block charges every outcome, if one
/// exists: maximise `ε` subject to `q[theta][ω] >= ε` for all `ω`.
///
/// Mixing these over all models gives a strictly positive system, which
/// exists exactly when no robust arbitrage exists. Nonzero block mass
/// alone, as in [`find_pricing_system`], does not rule out arbitrage.
pub fn find_positive_pricing_system(
    family: &ModelFamily,
    theta: usize,
    options: &[StaticOption],
) -> Result<Option<RobustPricingSystem>> {
    family.check_theta(theta)?;
    let constraints = pricing_constraints(family, options)?;
    let (mut lp, vars) = polytope_program(family, &constraints, Sense::Maximize);
    let eps = lp.add_var("eps", Bound::Boxed { lo: zero(), hi: one() });
    lp.add_objective_term(eps, one());
    for &v in &vars[theta] {
        lp.add_constraint(vec![(v, one()), (eps, -one())], Relation::Ge, zero());
    }
    let sol = lp_solve(&lp);
    match sol.status {
        LpStatus::Optimal if sol.value.as_ref().is_some_and(|v| v.is_positive()) => {
            Ok(Some(read_system(&vars, &sol.assignment)))
        }
        _ => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PricingViolation {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("negative weight at model {theta}, outcome {outcome}")]
    Negative { theta: usize, outcome: usize },
    #[error("{kind} row violated: lhs {} != rhs {}", format_rational(.lhs), format_rational(.rhs))]
    Row {
        kind: RowKind,
        lhs: Rational,
        rhs: Rational,
    },
}

/// Checks nonnegativity and every constraint row exactly; reports the
/// first violation.
pub fn verify_pricing_system(
    family: &ModelFamily,
    system: &RobustPricingSystem,
    options: &[StaticOption],
) -> std::result::Result<(), PricingViolation> {
    let n = family.space().num_outcomes();
    if system.weights.len() != family.num_thetas() || system.weights.iter().any(|w| w.len() != n) {
        return Err(PricingViolation::Shape(
            "pricing system does not match the family".into(),
        ));
    }
    for (theta, row) in system.weights.iter().enumerate() {
        if let Some(outcome) = row.iter().position(|q| q.is_negative()) {
            return Err(PricingViolation::Negative { theta, outcome });
        }
    }
    let constraints = pricing_constraints(family, options)
        .map_err(|e| PricingViolation::Shape(e.to_string()))?;
    for row in constraints.rows {
        let lhs: Rational = row
            .coeffs
            .iter()
            .zip(&system.weights)
            .flat_map(|(c, q)| c.iter().zip(q))
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, q)| c * q)
            .sum();
        if lhs != row.rhs {
            return Err(PricingViolation::Row {
                kind: row.kind,
                lhs,
                rhs: row.rhs,
            });
        }
    }
    Ok(())
}

/// `[min, max]` of `Q(f)` over the (calibrated) pricing polytope together
/// with the optimising systems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceBounds {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_system: RobustPricingSystem,
    pub hi_system: RobustPricingSystem,
}

impl PriceBounds {
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// Price bounds of `claim`. Requires no robust arbitrage (with the options
/// when given).
pub fn pricing_bounds(
    family: &ModelFamily,
    claim: &Claim,
    options: &[StaticOption],
) -> Result<PriceBounds> {
    claim.check_family(family)?;
    if robust_arbitrage(family, options)?.is_some() {
        return Err(Error::NraViolated);
    }
    pricing_bounds_unchecked(family, claim, options)
}

pub(crate) fn pricing_bounds_unchecked(
    family: &ModelFamily,
    claim: &Claim,
    options: &[StaticOption],
) -> Result<PriceBounds> {
    let constraints = pricing_constraints(family, options)?;
    let solve = |sense| -> Result<(Rational, RobustPricingSystem)> {
        let (mut lp, vars) = polytope_program(family, &constraints, sense);
        for (th, vs) in vars.iter().enumerate() {
            for (w, &v) in vs.iter().enumerate() {
                let f = claim.payoff(th, w);
                if !f.is_zero() {
                    lp.add_objective_term(v, f.clone());
                }
            }
        }
        let sol = lp_solve(&lp);
        match sol.status {
            LpStatus::Optimal => Ok((
                sol.value.clone().expect("optimal value"),
                read_system(&vars, &sol.assignment),
            )),
            LpStatus::Infeasible => Err(Error::NoPricingSystem),
            // The polytope is bounded (q >= 0, Σ q = 1).
            LpStatus::Unbounded => Err(Error::Inconsistent(
                "unbounded objective over a bounded polytope".into(),
            )),
        }
    };
    let (lo, hi) = rayon::join(|| solve(Sense::Minimize), || solve(Sense::Maximize));
    let (lo, lo_system) = lo?;
    let (hi, hi_system) = hi?;
    Ok(PriceBounds {
        lo,
        hi,
        lo_system,
        hi_system,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{build_space, AdaptedProcess};
    use crate::rational::{int, rat};

    /// One-period two-model market with increments `(up_i, down_i)`.
    fn one_period(increments: &[(i64, i64)]) -> ModelFamily {
        let space = build_space(
            vec!["+".into(), "-".into()],
            1,
            vec![vec![vec![0, 1]], vec![vec![0], vec![1]]],
            vec![rat(1, 2); 2],
        )
        .unwrap();
        let processes = increments
            .iter()
            .map(|&(u, d)| {
                AdaptedProcess::from_fn(&space, 1, |t, w| {
                    vec![match (t, w) {
                        (0, _) => int(1),
                        (_, 0) => int(1 + u),
                        _ => int(1 + d),
                    }]
                })
                .unwrap()
            })
            .collect();
        let thetas = (1..=increments.len()).map(|i| format!("theta{i}")).collect();
        ModelFamily::new(space, thetas, processes).unwrap()
    }

    #[test]
    fn constant_claim_evaluates_to_constant() {
        let fam = one_period(&[(1, -1), (2, -2)]);
        let q = find_pricing_system(&fam, 0, &[]).unwrap().unwrap();
        assert_eq!(evaluate(&q, &Claim::constant(&fam, rat(7, 3))).unwrap(), rat(7, 3));
    }

    #[test]
    fn max_stock_under_dual_maximiser() {
        let fam = one_period(&[(1, -1), (2, -2)]);
        let q = RobustPricingSystem::new(
            &fam,
            vec![vec![rat(2, 3), int(0)], vec![int(0), rat(1, 3)]],
        )
        .unwrap();
        assert_eq!(verify_pricing_system(&fam, &q, &[]), Ok(()));
        let f = Claim::from_fn(&fam, |_, w| if w == 0 { int(3) } else { int(0) });
        assert_eq!(evaluate(&q, &f).unwrap(), int(2));
    }

    #[test]
    fn pathological_pair_has_symmetric_system() {
        let fam = one_period(&[(3, 1), (-1, -3)]);
        let q = RobustPricingSystem::new(&fam, vec![vec![rat(1, 4); 2]; 2]).unwrap();
        assert_eq!(verify_pricing_system(&fam, &q, &[]), Ok(()));
        assert!(find_pricing_system(&fam, 0, &[]).unwrap().is_some());
    }

    #[test]
    fn nonzero_block_mass_does_not_exclude_arbitrage() {
        // H = 1 gains (1, 0): an arbitrage, yet Q = (0, 1) is a pricing
        // system with all its mass on the model.
        let fam = one_period(&[(1, 0)]);
        let q = find_pricing_system(&fam, 0, &[]).unwrap().unwrap();
        assert_eq!(q.weights(), &[vec![zero(), one()]]);
        assert!(find_positive_pricing_system(&fam, 0, &[]).unwrap().is_none());
    }

    #[test]
    fn positive_system_charges_every_outcome() {
        let fam = one_period(&[(1, -1), (2, -2)]);
        for th in 0..2 {
            let q = find_positive_pricing_system(&fam, th, &[]).unwrap().unwrap();
            verify_pricing_system(&fam, &q, &[]).unwrap();
            assert!(q.weights()[th].iter().all(|x| x.is_positive()));
        }
    }

    #[test]
    fn strictly_increasing_single_model_has_no_system() {
        let fam = one_period(&[(3, 1)]);
        assert_eq!(find_pricing_system(&fam, 0, &[]).unwrap(), None);
    }

    #[test]
    fn unnormalised_weights_are_reported() {
        let fam = one_period(&[(1, -1)]);
        let q = RobustPricingSystem::new(&fam, vec![vec![int(1), int(1)]]).unwrap();
        assert!(matches!(
            verify_pricing_system(&fam, &q, &[]),
            Err(PricingViolation::Row { kind: RowKind::Normalization, .. })
        ));
    }

    #[test]
    fn negative_weight_is_reported_first() {
        let fam = one_period(&[(1, -1)]);
        let q = RobustPricingSystem::new(&fam, vec![vec![int(2), int(-1)]]).unwrap();
        assert_eq!(
            verify_pricing_system(&fam, &q, &[]),
            Err(PricingViolation::Negative { theta: 0, outcome: 1 })
        );
    }

    #[test]
    fn unknown_theta() {
        let fam = one_period(&[(1, -1)]);
        assert!(matches!(
            find_pricing_system(&fam, 3, &[]),
            Err(Error::ThetaUnknown(_))
        ));
    }

    #[test]
    fn bounds_of_max_stock_and_constant() {
        let fam = one_period(&[(1, -1), (2, -2)]);
        let f = Claim::from_fn(&fam, |_, w| if w == 0 { int(3) } else { int(0) });
        let b = pricing_bounds(&fam, &f, &[]).unwrap();
        assert_eq!((b.lo, b.hi), (int(1), int(2)));
        let c = pricing_bounds(&fam, &Claim::constant(&fam, int(5)), &[]).unwrap();
        assert!(c.is_point());
        assert_eq!(c.hi, int(5));
    }

    #[test]
    fn bounds_require_nra() {
        let fam = one_period(&[(3, 1)]);
        let f = Claim::constant(&fam, int(1));
        assert_eq!(pricing_bounds(&fam, &f, &[]).unwrap_err(), Error::NraViolated);
    }
}
