//! Finite filtered probability spaces, parametrised price processes,
//! strategies, claims and options.
//!
//! Everything here is immutable after construction and validated on the way
//! in: partitions refine, the terminal partition separates outcomes, `P` is
//! strictly positive and sums to one, price processes are adapted and
//! strategies are predictable. Because `P > 0` on every outcome, "almost
//! surely" statements reduce to "for every outcome".

use std::collections::HashSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, zero, Rational};

/// `(Ω, (F_t), P)` with `Ω` finite and each `F_t` given by its atoms.
///
/// Atoms are stored in canonical order: outcome indices inside an atom are
/// ascending and atoms are ordered by their smallest outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredSpace {
    outcomes: Vec<String>,
    partitions: Vec<Vec<Vec<usize>>>,
    atom_of: Vec<Vec<usize>>,
    prob: Vec<Rational>,
}

/// Builds and validates a filtered space. `partitions[t]` lists the atoms of
/// `F_t` as outcome indices; there must be `horizon + 1` of them.
pub fn build_space(
    outcomes: Vec<String>,
    horizon: usize,
    partitions: Vec<Vec<Vec<usize>>>,
    prob: Vec<Rational>,
) -> Result<FilteredSpace> {
    if partitions.len() != horizon + 1 {
        return Err(Error::Shape(format!(
            "expected {} partitions for horizon {horizon}, got {}",
            horizon + 1,
            partitions.len()
        )));
    }
    FilteredSpace::new(outcomes, partitions, prob)
}

impl FilteredSpace {
    pub fn new(
        outcomes: Vec<String>,
        partitions: Vec<Vec<Vec<usize>>>,
        prob: Vec<Rational>,
    ) -> Result<Self> {
        let n = outcomes.len();
        if n == 0 {
            return Err(Error::Shape("sample space has no outcomes".into()));
        }
        let mut names = HashSet::new();
        for name in &outcomes {
            if !names.insert(name.as_str()) {
                return Err(Error::Shape(format!("duplicate outcome {name:?}")));
            }
        }
        if partitions.is_empty() {
            return Err(Error::Shape("at least the partition of F_0 is required".into()));
        }

        let mut canonical = Vec::with_capacity(partitions.len());
        let mut atom_of = Vec::with_capacity(partitions.len());
        for (t, atoms) in partitions.into_iter().enumerate() {
            let mut seen = vec![false; n];
            let mut sorted_atoms = Vec::with_capacity(atoms.len());
            for mut atom in atoms {
                if atom.is_empty() {
                    return Err(Error::Partition {
                        t,
                        detail: "empty atom".into(),
                    });
                }
                atom.sort_unstable();
                for &w in &atom {
                    if w >= n {
                        return Err(Error::Partition {
                            t,
                            detail: format!("outcome index {w} out of range"),
                        });
                    }
                    if std::mem::replace(&mut seen[w], true) {
                        return Err(Error::Partition {
                            t,
                            detail: format!("outcome {:?} appears twice", outcomes[w]),
                        });
                    }
                }
                sorted_atoms.push(atom);
            }
            if let Some(missing) = seen.iter().position(|s| !s) {
                return Err(Error::Partition {
                    t,
                    detail: format!("outcome {:?} is not covered", outcomes[missing]),
                });
            }
            sorted_atoms.sort_by_key(|atom| atom[0]);
            let mut lookup = vec![0; n];
            for (a, atom) in sorted_atoms.iter().enumerate() {
                for &w in atom {
                    lookup[w] = a;
                }
            }
            canonical.push(sorted_atoms);
            atom_of.push(lookup);
        }

        for t in 1..canonical.len() {
            for atom in &canonical[t] {
                let parent = atom_of[t - 1][atom[0]];
                if let Some(&w) = atom.iter().find(|&&w| atom_of[t - 1][w] != parent) {
                    return Err(Error::Refinement {
                        t,
                        detail: format!(
                            "outcomes {:?} and {:?} share an atom at t={t} but not at t={}",
                            outcomes[atom[0]],
                            outcomes[w],
                            t - 1
                        ),
                    });
                }
            }
        }
        let horizon = canonical.len() - 1;
        if let Some(atom) = canonical[horizon].iter().find(|a| a.len() > 1) {
            return Err(Error::Partition {
                t: horizon,
                detail: format!(
                    "terminal partition must separate outcomes; atom {:?} has {} outcomes",
                    outcomes[atom[0]],
                    atom.len()
                ),
            });
        }

        if prob.len() != n {
            return Err(Error::Measure(format!(
                "{} weights for {n} outcomes",
                prob.len()
            )));
        }
        if let Some(w) = prob.iter().position(|p| *p <= zero()) {
            return Err(Error::Measure(format!(
                "outcome {:?} has non-positive weight {}",
                outcomes[w],
                format_rational(&prob[w])
            )));
        }
        let total: Rational = prob.iter().sum();
        if !total.is_one() {
            return Err(Error::Measure(format!(
                "weights sum to {}, not 1",
                format_rational(&total)
            )));
        }

        Ok(FilteredSpace {
            outcomes,
            partitions: canonical,
            atom_of,
            prob,
        })
    }

    pub fn horizon(&self) -> usize {
        self.partitions.len() - 1
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn outcome_index(&self, name: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == name)
    }

    pub fn atoms(&self, t: usize) -> &[Vec<usize>] {
        &self.partitions[t]
    }

    pub fn atom_of(&self, t: usize, outcome: usize) -> usize {
        self.atom_of[t][outcome]
    }

    pub fn prob(&self, outcome: usize) -> &Rational {
        &self.prob[outcome]
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.prob
    }

    pub fn atom_prob(&self, t: usize, atom: usize) -> Rational {
        self.partitions[t][atom]
            .iter()
            .map(|&w| &self.prob[w])
            .sum()
    }

    /// Atoms of `F_{t+1}` contained in atom `atom` of `F_t`.
    pub fn children(&self, t: usize, atom: usize) -> Vec<usize> {
        let mut kids: Vec<usize> = self.partitions[t][atom]
            .iter()
            .map(|&w| self.atom_of[t + 1][w])
            .collect();
        kids.dedup();
        kids.sort_unstable();
        kids.dedup();
        kids
    }
}

/// A `d`-dimensional process indexed by `(t, outcome, asset)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedProcess {
    dims: usize,
    values: Vec<Vec<Vec<Rational>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdaptednessViolation {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("value of asset {asset} is not constant on atom {atom} of F_{t}")]
    NotConstant { t: usize, atom: usize, asset: usize },
}

impl AdaptedProcess {
    /// Wraps raw values `values[t][outcome][asset]`; only the shape is
    /// checked here, measurability is checked by [`validate_adapted`].
    pub fn new(dims: usize, values: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        if dims == 0 {
            return Err(Error::Shape("process dimension must be positive".into()));
        }
        for (t, slice) in values.iter().enumerate() {
            if let Some(w) = slice.iter().position(|v| v.len() != dims) {
                return Err(Error::Shape(format!(
                    "value at t={t}, outcome {w} has {} components, expected {dims}",
                    slice[w].len()
                )));
            }
        }
        Ok(AdaptedProcess { dims, values })
    }

    pub fn from_fn(
        space: &FilteredSpace,
        dims: usize,
        mut f: impl FnMut(usize, usize) -> Vec<Rational>,
    ) -> Result<Self> {
        let values = (0..=space.horizon())
            .map(|t| (0..space.num_outcomes()).map(|w| f(t, w)).collect())
            .collect();
        Self::new(dims, values)
    }

    /// Builds a process by assigning one value per atom, so it is adapted
    /// by construction.
    pub fn from_atoms(
        space: &FilteredSpace,
        dims: usize,
        mut f: impl FnMut(usize, usize) -> Vec<Rational>,
    ) -> Result<Self> {
        let values = (0..=space.horizon())
            .map(|t| {
                let per_atom: Vec<Vec<Rational>> =
                    (0..space.atoms(t).len()).map(|a| f(t, a)).collect();
                (0..space.num_outcomes())
                    .map(|w| per_atom[space.atom_of(t, w)].clone())
                    .collect()
            })
            .collect();
        Self::new(dims, values)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn horizon(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn value(&self, t: usize, outcome: usize) -> &[Rational] {
        &self.values[t][outcome]
    }

    pub fn values(&self) -> &[Vec<Vec<Rational>>] {
        &self.values
    }
}

/// Checks `F_t`-measurability of `process`; reports the first offending
/// `(t, atom, asset)` in time, atom, asset order.
pub fn validate_adapted(
    space: &FilteredSpace,
    process: &AdaptedProcess,
) -> std::result::Result<(), AdaptednessViolation> {
    if process.values.len() != space.horizon() + 1 {
        return Err(AdaptednessViolation::Shape(format!(
            "process has {} time points, space has {}",
            process.values.len(),
            space.horizon() + 1
        )));
    }
    for (t, slice) in process.values.iter().enumerate() {
        if slice.len() != space.num_outcomes() {
            return Err(AdaptednessViolation::Shape(format!(
                "t={t} has {} outcomes, space has {}",
                slice.len(),
                space.num_outcomes()
            )));
        }
        for (a, atom) in space.atoms(t).iter().enumerate() {
            let first = &slice[atom[0]];
            for &w in &atom[1..] {
                if let Some(j) = (0..process.dims).find(|&j| slice[w][j] != first[j]) {
                    return Err(AdaptednessViolation::NotConstant {
                        t,
                        atom: a,
                        asset: j,
                    });
                }
            }
        }
    }
    Ok(())
}

/// A finite family `Θ` of adapted price processes on one space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFamily {
    space: FilteredSpace,
    thetas: Vec<String>,
    processes: Vec<AdaptedProcess>,
    dims: usize,
}

impl ModelFamily {
    pub fn new(
        space: FilteredSpace,
        thetas: Vec<String>,
        processes: Vec<AdaptedProcess>,
    ) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::Shape("model family needs at least one parameter".into()));
        }
        if thetas.len() != processes.len() {
            return Err(Error::Shape(format!(
                "{} parameters but {} processes",
                thetas.len(),
                processes.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &thetas {
            if !seen.insert(name.as_str()) {
                return Err(Error::Shape(format!("duplicate parameter {name:?}")));
            }
        }
        let dims = processes[0].dims();
        for (name, process) in thetas.iter().zip(&processes) {
            if process.dims() != dims {
                return Err(Error::Shape(format!(
                    "process {name:?} has dimension {}, expected {dims}",
                    process.dims()
                )));
            }
            validate_adapted(&space, process).map_err(|v| Error::NotAdapted {
                theta: name.clone(),
                detail: v.to_string(),
            })?;
        }
        Ok(ModelFamily {
            space,
            thetas,
            processes,
            dims,
        })
    }

    pub fn space(&self) -> &FilteredSpace {
        &self.space
    }

    pub fn thetas(&self) -> &[String] {
        &self.thetas
    }

    pub fn num_thetas(&self) -> usize {
        self.thetas.len()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn horizon(&self) -> usize {
        self.space.horizon()
    }

    pub fn processes(&self) -> &[AdaptedProcess] {
        &self.processes
    }

    pub fn process(&self, theta: usize) -> &AdaptedProcess {
        &self.processes[theta]
    }

    pub fn theta_index(&self, name: &str) -> Result<usize> {
        self.thetas
            .iter()
            .position(|t| t == name)
            .ok_or_else(|| Error::ThetaUnknown(name.to_string()))
    }

    pub(crate) fn check_theta(&self, theta: usize) -> Result<()> {
        if theta < self.thetas.len() {
            Ok(())
        } else {
            Err(Error::ThetaUnknown(format!("#{theta}")))
        }
    }

    pub fn price(&self, theta: usize, t: usize, outcome: usize) -> &[Rational] {
        self.processes[theta].value(t, outcome)
    }

    /// `ΔS^θ_t(ω) = S^θ_t(ω) - S^θ_{t-1}(ω)` for `t >= 1`.
    pub fn increment(&self, theta: usize, t: usize, outcome: usize) -> Vec<Rational> {
        let now = self.price(theta, t, outcome);
        let before = self.price(theta, t - 1, outcome);
        now.iter().zip(before).map(|(a, b)| a - b).collect()
    }

    /// The one-model family `{θ}` on the same space.
    pub fn restrict(&self, theta: usize) -> Result<ModelFamily> {
        self.check_theta(theta)?;
        Ok(ModelFamily {
            space: self.space.clone(),
            thetas: vec![self.thetas[theta].clone()],
            processes: vec![self.processes[theta].clone()],
            dims: self.dims,
        })
    }
}

/// Positions `H_t` for `t = 1..=T`, each constant on the atoms of `F_{t-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictableStrategy {
    dims: usize,
    /// `positions[t - 1][outcome][asset]`.
    positions: Vec<Vec<Vec<Rational>>>,
}

impl PredictableStrategy {
    pub fn new(
        space: &FilteredSpace,
        dims: usize,
        positions: Vec<Vec<Vec<Rational>>>,
    ) -> Result<Self> {
        if positions.len() != space.horizon() {
            return Err(Error::Shape(format!(
                "strategy has {} periods, horizon is {}",
                positions.len(),
                space.horizon()
            )));
        }
        for (idx, slice) in positions.iter().enumerate() {
            let t = idx + 1;
            if slice.len() != space.num_outcomes() || slice.iter().any(|v| v.len() != dims) {
                return Err(Error::Shape(format!("positions at t={t} have the wrong shape")));
            }
            for (a, atom) in space.atoms(t - 1).iter().enumerate() {
                if atom[1..].iter().any(|&w| slice[w] != slice[atom[0]]) {
                    return Err(Error::NotPredictable(format!(
                        "H_{t} varies on atom {a} of F_{}",
                        t - 1
                    )));
                }
            }
        }
        Ok(PredictableStrategy { dims, positions })
    }

    pub fn zero(space: &FilteredSpace, dims: usize) -> Self {
        PredictableStrategy {
            dims,
            positions: vec![vec![vec![zero(); dims]; space.num_outcomes()]; space.horizon()],
        }
    }

    /// Constant position `value` in every asset at every date.
    pub fn constant(space: &FilteredSpace, dims: usize, value: Rational) -> Self {
        PredictableStrategy {
            dims,
            positions: vec![vec![vec![value; dims]; space.num_outcomes()]; space.horizon()],
        }
    }

    /// One position vector per `(t, atom of F_{t-1})`; predictable by
    /// construction.
    pub fn from_atoms(
        space: &FilteredSpace,
        dims: usize,
        mut f: impl FnMut(usize, usize) -> Vec<Rational>,
    ) -> Result<Self> {
        let mut positions = Vec::with_capacity(space.horizon());
        for t in 1..=space.horizon() {
            let per_atom: Vec<Vec<Rational>> =
                (0..space.atoms(t - 1).len()).map(|a| f(t, a)).collect();
            if per_atom.iter().any(|v| v.len() != dims) {
                return Err(Error::Shape(format!("positions at t={t} must have {dims} entries")));
            }
            positions.push(
                (0..space.num_outcomes())
                    .map(|w| per_atom[space.atom_of(t - 1, w)].clone())
                    .collect(),
            );
        }
        Ok(PredictableStrategy { dims, positions })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn horizon(&self) -> usize {
        self.positions.len()
    }

    /// `H_t(ω)` for `1 <= t <= T`.
    pub fn position(&self, t: usize, outcome: usize) -> &[Rational] {
        &self.positions[t - 1][outcome]
    }

    pub fn positions(&self) -> &[Vec<Vec<Rational>>] {
        &self.positions
    }

    pub fn add(&self, other: &PredictableStrategy) -> PredictableStrategy {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, factor: &Rational) -> PredictableStrategy {
        self.map(|a| a * factor)
    }

    pub fn negate(&self) -> PredictableStrategy {
        self.map(|a| -a)
    }

    fn map(&self, f: impl Fn(&Rational) -> Rational) -> PredictableStrategy {
        PredictableStrategy {
            dims: self.dims,
            positions: self
                .positions
                .iter()
                .map(|s| s.iter().map(|v| v.iter().map(&f).collect()).collect())
                .collect(),
        }
    }

    fn zip_with(
        &self,
        other: &PredictableStrategy,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> PredictableStrategy {
        PredictableStrategy {
            dims: self.dims,
            positions: self
                .positions
                .iter()
                .zip(&other.positions)
                .map(|(s, o)| {
                    s.iter()
                        .zip(o)
                        .map(|(v, u)| v.iter().zip(u).map(|(a, b)| f(a, b)).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.positions
            .iter()
            .flatten()
            .flatten()
            .all(|v| v.is_zero())
    }
}

/// A vector claim `f = (f^θ)_θ`, each coordinate `F_T`-measurable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    /// `payoffs[θ][outcome]`.
    payoffs: Vec<Vec<Rational>>,
}

impl Claim {
    pub fn new(family: &ModelFamily, payoffs: Vec<Vec<Rational>>) -> Result<Self> {
        let n = family.space().num_outcomes();
        if payoffs.len() != family.num_thetas() || payoffs.iter().any(|p| p.len() != n) {
            return Err(Error::Shape(format!(
                "claim must have {} x {n} payoffs",
                family.num_thetas()
            )));
        }
        Ok(Claim { payoffs })
    }

    pub fn from_fn(family: &ModelFamily, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        Claim {
            payoffs: (0..family.num_thetas())
                .map(|th| {
                    (0..family.space().num_outcomes())
                        .map(|w| f(th, w))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn constant(family: &ModelFamily, value: Rational) -> Self {
        Self::from_fn(family, |_, _| value.clone())
    }

    /// One unit of asset `asset` delivered at `T` in each model: `(S^{θ,asset}_T)_θ`.
    pub fn terminal_asset(family: &ModelFamily, asset: usize) -> Self {
        let horizon = family.horizon();
        Self::from_fn(family, |th, w| family.price(th, horizon, w)[asset].clone())
    }

    /// `1^θ_A`: pays one in model `theta` on the outcomes of `event`.
    pub fn indicator(family: &ModelFamily, theta: usize, event: &[usize]) -> Self {
        Self::from_fn(family, |th, w| {
            if th == theta && event.contains(&w) {
                Rational::one()
            } else {
                zero()
            }
        })
    }

    pub fn payoff(&self, theta: usize, outcome: usize) -> &Rational {
        &self.payoffs[theta][outcome]
    }

    pub fn payoffs(&self) -> &[Vec<Rational>] {
        &self.payoffs
    }

    pub fn num_thetas(&self) -> usize {
        self.payoffs.len()
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> Claim {
        Claim {
            payoffs: self
                .payoffs
                .iter()
                .map(|p| p.iter().map(&f).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &Claim) -> Claim {
        Claim {
            payoffs: self
                .payoffs
                .iter()
                .zip(&other.payoffs)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub fn negate(&self) -> Claim {
        self.map(|v| -v)
    }

    pub fn scale(&self, factor: &Rational) -> Claim {
        self.map(|v| v * factor)
    }

    pub fn shift(&self, cash: &Rational) -> Claim {
        self.map(|v| v + cash)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.payoffs.iter().flatten().all(|v| *v >= zero())
    }

    pub(crate) fn check_family(&self, family: &ModelFamily) -> Result<()> {
        let n = family.space().num_outcomes();
        if self.payoffs.len() != family.num_thetas() || self.payoffs.iter().any(|p| p.len() != n) {
            return Err(Error::Shape(format!(
                "claim is {} x {}, family is {} x {n}",
                self.payoffs.len(),
                self.payoffs.first().map_or(0, Vec::len),
                family.num_thetas()
            )));
        }
        Ok(())
    }
}

/// An option traded only at `t = 0` at price `quote`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticOption {
    pub payoff: Claim,
    pub quote: Rational,
}

impl StaticOption {
    pub fn new(payoff: Claim, quote: Rational) -> Self {
        StaticOption { payoff, quote }
    }

    /// `g - g_0 · 1`: the payoff net of its price, which trades at zero.
    pub fn translated(&self) -> Claim {
        self.payoff.shift(&-self.quote.clone())
    }
}

pub(crate) fn translate_options(family: &ModelFamily, options: &[StaticOption]) -> Result<Vec<Claim>> {
    options
        .iter()
        .map(|o| {
            o.payoff.check_family(family)?;
            Ok(o.translated())
        })
        .collect()
}

/// `(H·S^θ)_t(ω) = Σ_{s<=t} H_s(ω)·ΔS^θ_s(ω)` for every outcome.
pub fn gain(
    family: &ModelFamily,
    strategy: &PredictableStrategy,
    theta: usize,
    t: usize,
) -> Result<Vec<Rational>> {
    family.check_theta(theta)?;
    let horizon = family.horizon();
    if t > horizon {
        return Err(Error::Horizon { t, horizon });
    }
    if strategy.dims() != family.dims() || strategy.horizon() != horizon {
        return Err(Error::Shape("strategy does not match the family".into()));
    }
    Ok((0..family.space().num_outcomes())
        .map(|w| {
            let mut total = zero();
            for s in 1..=t {
                let h = strategy.position(s, w);
                for (hj, dj) in h.iter().zip(family.increment(theta, s, w)) {
                    if !hj.is_zero() {
                        total += hj * dj;
                    }
                }
            }
            total
        })
        .collect())
}

/// The whole gain process `t -> (H·S^θ)_t`, one process per model.
pub fn gain_processes(
    family: &ModelFamily,
    strategy: &PredictableStrategy,
) -> Result<Vec<AdaptedProcess>> {
    (0..family.num_thetas())
        .map(|th| {
            let per_t = (0..=family.horizon())
                .map(|t| gain(family, strategy, th, t))
                .collect::<Result<Vec<_>>>()?;
            AdaptedProcess::from_fn(family.space(), 1, |t, w| vec![per_t[t][w].clone()])
        })
        .collect()
}

/// Terminal gains `H·S_T` as a vector claim.
pub fn terminal_gains(family: &ModelFamily, strategy: &PredictableStrategy) -> Result<Claim> {
    let payoffs = (0..family.num_thetas())
        .map(|th| gain(family, strategy, th, family.horizon()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Claim { payoffs })
}
