//! No-robust-arbitrage detection and classical per-model no-arbitrage.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lp::{lp_solve, Bound, LinearProgram, LpStatus, Relation, Sense, VarId};
use crate::market::{gain, translate_options, ModelFamily, PredictableStrategy, StaticOption};
use crate::pricing::{find_pricing_system, RobustPricingSystem};
use crate::program::StrategyVars;
use crate::rational::{one, zero, Rational};

/// A semi-static strategy whose terminal wealth is nonnegative in every
/// model and outcome and positive somewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArbitrageWitness {
    pub strategy: PredictableStrategy,
    /// Static option positions; empty when no options are traded.
    pub static_positions: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NraVerdict {
    pub holds: bool,
    /// A robust arbitrage, when `holds` is false.
    pub witness: Option<ArbitrageWitness>,
    /// One pricing system with nonzero mass on each model, in family order,
    /// when `holds` is true.
    pub certificates: Vec<RobustPricingSystem>,
}

/// Terminal wealth `H·S^θ_T + Σ a_i g_i^θ` per model and outcome.
pub fn witness_wealth(
    family: &ModelFamily,
    witness: &ArbitrageWitness,
    options: &[StaticOption],
) -> Result<Vec<Vec<Rational>>> {
    let translated = translate_options(family, options)?;
    if witness.static_positions.len() != translated.len() && !witness.static_positions.is_empty() {
        return Err(Error::Shape(format!(
            "{} static positions for {} options",
            witness.static_positions.len(),
            translated.len()
        )));
    }
    (0..family.num_thetas())
        .map(|th| {
            let mut wealth = gain(family, &witness.strategy, th, family.horizon())?;
            for (a, g) in witness.static_positions.iter().zip(&translated) {
                for (w, v) in wealth.iter_mut().enumerate() {
                    *v += a * g.payoff(th, w);
                }
            }
            Ok(wealth)
        })
        .collect()
}

/// True iff `witness` really is a robust arbitrage.
pub fn is_robust_arbitrage(
    family: &ModelFamily,
    witness: &ArbitrageWitness,
    options: &[StaticOption],
) -> Result<bool> {
    let wealth = witness_wealth(family, witness, options)?;
    let values = wealth.iter().flatten();
    Ok(values.clone().all(|v| !v.is_negative()) && values.clone().any(|v| v.is_positive()))
}

/// Slack program: maximise `Σ s` with `0 <= s <= 1` and terminal wealth
/// `>= s` in every `(θ, ω)`. The optimum is zero iff no robust arbitrage
/// exists; otherwise the optimal vertex is one.
pub(crate) fn robust_arbitrage(
    family: &ModelFamily,
    options: &[StaticOption],
) -> Result<Option<ArbitrageWitness>> {
    let translated = translate_options(family, options)?;
    let mut lp = LinearProgram::new(Sense::Maximize);
    let strategy = StrategyVars::declare(&mut lp, family);
    let statics: Vec<VarId> = (0..translated.len())
        .map(|i| lp.add_var(format!("a[{i}]"), Bound::Free))
        .collect();
    for th in 0..family.num_thetas() {
        for w in 0..family.space().num_outcomes() {
            let s = lp.add_var(
                format!("s[{th}][{w}]"),
                Bound::Boxed {
                    lo: zero(),
                    hi: one(),
                },
            );
            lp.add_objective_term(s, one());
            let mut terms = strategy.gain_terms(family, th, w);
            for (v, g) in statics.iter().zip(&translated) {
                let payoff = g.payoff(th, w);
                if !payoff.is_zero() {
                    terms.push((*v, payoff.clone()));
                }
            }
            terms.push((s, -one()));
            lp.add_constraint(terms, Relation::Ge, zero());
        }
    }
    let sol = lp_solve(&lp);
    if sol.status != LpStatus::Optimal {
        return Err(Error::Inconsistent(format!(
            "arbitrage slack program returned {:?}",
            sol.status
        )));
    }
    if sol.value.as_ref().is_some_and(|v| v.is_zero()) {
        return Ok(None);
    }
    Ok(Some(ArbitrageWitness {
        strategy: strategy.extract(family, &sol.assignment),
        static_positions: statics.iter().map(|&v| sol.assignment[v].clone()).collect(),
    }))
}

/// Decides no robust arbitrage (with static options when `options` is
/// non-empty). On success every model gets a pricing-system certificate.
pub fn check_nra(family: &ModelFamily, options: &[StaticOption]) -> Result<NraVerdict> {
    if let Some(witness) = robust_arbitrage(family, options)? {
        return Ok(NraVerdict {
            holds: false,
            witness: Some(witness),
            certificates: Vec::new(),
        });
    }
    let certificates = (0..family.num_thetas())
        .into_par_iter()
        .map(|th| {
            find_pricing_system(family, th, options)?.ok_or_else(|| {
                Error::Inconsistent(format!(
                    "no robust arbitrage, yet no pricing system charges {:?}",
                    family.thetas()[th]
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NraVerdict {
        holds: true,
        witness: None,
        certificates,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalVerdict {
    pub holds: bool,
    /// An equivalent martingale measure for `S^θ` (weights per outcome).
    pub martingale_measure: Option<Vec<Rational>>,
    /// An arbitrage in model `θ` alone.
    pub witness: Option<PredictableStrategy>,
}

/// Classical no-arbitrage for one model: maximise `ε` subject to
/// `Q(ω) >= ε`, `Σ Q = 1` and the martingale equalities of `S^θ`.
pub fn check_classical_na(family: &ModelFamily, theta: usize) -> Result<ClassicalVerdict> {
    family.check_theta(theta)?;
    let space = family.space();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let q: Vec<VarId> = (0..space.num_outcomes())
        .map(|w| lp.add_var(format!("Q[{w}]"), Bound::NonNegative))
        .collect();
    let eps = lp.add_var("eps", Bound::NonNegative);
    lp.add_objective_term(eps, one());
    lp.add_constraint(q.iter().map(|&v| (v, one())).collect(), Relation::Eq, one());
    for &v in &q {
        lp.add_constraint(vec![(v, one()), (eps, -one())], Relation::Ge, zero());
    }
    for t in 1..=space.horizon() {
        for atom in space.atoms(t - 1) {
            for j in 0..family.dims() {
                let terms: Vec<(VarId, Rational)> = atom
                    .iter()
                    .map(|&w| (q[w], family.increment(theta, t, w).swap_remove(j)))
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                lp.add_constraint(terms, Relation::Eq, zero());
            }
        }
    }
    let sol = lp_solve(&lp);
    let positive = sol.status == LpStatus::Optimal
        && sol.value.as_ref().is_some_and(|v| v.is_positive());
    if positive {
        return Ok(ClassicalVerdict {
            holds: true,
            martingale_measure: Some(q.iter().map(|&v| sol.assignment[v].clone()).collect()),
            witness: None,
        });
    }
    let single = family.restrict(theta)?;
    let witness = robust_arbitrage(&single, &[])?.ok_or_else(|| {
        Error::Inconsistent("no equivalent martingale measure but no arbitrage either".into())
    })?;
    Ok(ClassicalVerdict {
        holds: false,
        martingale_measure: None,
        witness: Some(witness.strategy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{build_space, AdaptedProcess, Claim};
    use crate::rational::{int, rat};

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
    fn volatility_pair_has_no_robust_arbitrage() {
        let fam = one_period(&[(1, -1), (2, -2)]);
        let verdict = check_nra(&fam, &[]).unwrap();
        assert!(verdict.holds);
        assert_eq!(verdict.certificates.len(), 2);
        for (th, q) in verdict.certificates.iter().enumerate() {
            assert!(q.mass(th) > zero());
        }
    }

    #[test]
    fn increasing_model_is_an_arbitrage() {
        let fam = one_period(&[(3, 1)]);
        let verdict = check_nra(&fam, &[]).unwrap();
        assert!(!verdict.holds);
        let witness = verdict.witness.unwrap();
        assert_eq!(witness.strategy.position(1, 0), &[int(1)]);
        assert!(is_robust_arbitrage(&fam, &witness, &[]).unwrap());
    }

    #[test]
    fn classical_measure_for_symmetric_model() {
        let fam = one_period(&[(1, -1), (2, -2)]);
        let v = check_classical_na(&fam, 0).unwrap();
        assert!(v.holds);
        assert_eq!(v.martingale_measure, Some(vec![rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn classical_arbitrage_in_drifting_models() {
        let fam = one_period(&[(3, 1), (-1, -3)]);
        let up = check_classical_na(&fam, 0).unwrap();
        assert!(!up.holds);
        assert_eq!(up.witness.unwrap().position(1, 0), &[int(1)]);
        let down = check_classical_na(&fam, 1).unwrap();
        assert_eq!(down.witness.unwrap().position(1, 0), &[int(-1)]);
        assert!(check_nra(&fam, &[]).unwrap().holds);
    }

    #[test]
    fn mispriced_option_creates_robust_arbitrage() {
        let fam = one_period(&[(1, -1), (2, -2)]);
        // The stock itself quoted below its spot price.
        let stock = Claim::terminal_asset(&fam, 0);
        let option = StaticOption::new(stock, rat(1, 2));
        let verdict = check_nra(&fam, std::slice::from_ref(&option)).unwrap();
        assert!(!verdict.holds);
        let witness = verdict.witness.unwrap();
        assert!(is_robust_arbitrage(&fam, &witness, &[option]).unwrap());
    }
}
