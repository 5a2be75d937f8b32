//! Shared LP building blocks: predictable strategy variables and their gains.

use num_traits::Zero;

use crate::lp::{Bound, LinearProgram, VarId};
use crate::market::{ModelFamily, PredictableStrategy};
use crate::rational::Rational;

/// One free LP variable per `(t, atom of F_{t-1}, asset)`.
pub(crate) struct StrategyVars {
    /// `vars[t - 1][atom][asset]`.
    vars: Vec<Vec<Vec<VarId>>>,
}

impl StrategyVars {
    pub(crate) fn declare(lp: &mut LinearProgram, family: &ModelFamily) -> Self {
        let space = family.space();
        let vars = (1..=space.horizon())
            .map(|t| {
                (0..space.atoms(t - 1).len())
                    .map(|a| {
                        (0..family.dims())
                            .map(|j| lp.add_var(format!("H[{t}][{a}][{j}]"), Bound::Free))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        StrategyVars { vars }
    }

    /// Linear terms of `(H·S^θ_T)(ω)` in the strategy variables.
    pub(crate) fn gain_terms(
        &self,
        family: &ModelFamily,
        theta: usize,
        outcome: usize,
    ) -> Vec<(VarId, Rational)> {
        let space = family.space();
        let mut terms = Vec::new();
        for t in 1..=space.horizon() {
            let atom = space.atom_of(t - 1, outcome);
            for (j, delta) in family.increment(theta, t, outcome).into_iter().enumerate() {
                if !delta.is_zero() {
                    terms.push((self.vars[t - 1][atom][j], delta));
                }
            }
        }
        terms
    }

    pub(crate) fn extract(&self, family: &ModelFamily, assignment: &[Rational]) -> PredictableStrategy {
        PredictableStrategy::from_atoms(family.space(), family.dims(), |t, a| {
            self.vars[t - 1][a]
                .iter()
                .map(|&v| assignment[v].clone())
                .collect()
        })
        .expect("positions are laid out per atom")
    }
}
