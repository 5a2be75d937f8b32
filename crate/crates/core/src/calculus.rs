//! Generalized conditional expectations and generalized (super)martingales
//! under a robust pricing system, plus density processes.
//!
//! With several models a conditional expectation is no longer unique: the
//! defining equations `Q(f 1_A) = Q(g 1_A)` give one equation per atom but
//! one unknown per `(θ, atom)`. [`gen_cond_expectation`] therefore returns
//! the whole affine solution set.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{nullspace_with_width, solve_linear_with_width};
use crate::market::{validate_adapted, AdaptedProcess, Claim, ModelFamily};
use crate::pricing::RobustPricingSystem;
use crate::rational::{format_rational, zero, Rational};

/// The set `particular + span(kernel_basis)` of `F_s`-measurable vectors
/// `g = (g^θ)` with `Q(f 1_A) = Q(g 1_A)` for every atom `A` of `F_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedCondExp {
    pub s: usize,
    /// `particular[θ][atom]`.
    pub particular: Vec<Vec<Rational>>,
    /// Each basis vector is indexed like `particular`.
    pub kernel_basis: Vec<Vec<Vec<Rational>>>,
    /// `masses[θ][atom] = Σ_{ω ∈ atom} q[θ][ω]`.
    masses: Vec<Vec<Rational>>,
    /// `targets[atom] = Q(f 1_atom)`.
    targets: Vec<Rational>,
}

impl GeneralizedCondExp {
    pub fn kernel_dimension(&self) -> usize {
        self.kernel_basis.len()
    }

    /// Whether `candidate[θ][atom]` solves the defining equations.
    pub fn contains(&self, candidate: &[Vec<Rational>]) -> bool {
        if candidate.len() != self.masses.len()
            || candidate
                .iter()
                .zip(&self.masses)
                .any(|(c, m)| c.len() != m.len())
        {
            return false;
        }
        self.targets.iter().enumerate().all(|(a, target)| {
            let lhs: Rational = self
                .masses
                .iter()
                .zip(candidate)
                .map(|(m, c)| &m[a] * &c[a])
                .sum();
            lhs == *target
        })
    }

    /// Reads an `F_s`-measurable claim as a candidate `[θ][atom]`.
    pub fn candidate_from_claim(family: &ModelFamily, s: usize, claim: &Claim) -> Vec<Vec<Rational>> {
        claim
            .payoffs()
            .iter()
            .map(|row| {
                family
                    .space()
                    .atoms(s)
                    .iter()
                    .map(|atom| row[atom[0]].clone())
                    .collect()
            })
            .collect()
    }

    /// Extends a `[θ][atom]` vector to a claim on all outcomes.
    pub fn to_claim(family: &ModelFamily, s: usize, values: &[Vec<Rational>]) -> Claim {
        Claim::from_fn(family, |th, w| {
            values[th][family.space().atom_of(s, w)].clone()
        })
    }
}

fn check_measurable(family: &ModelFamily, claim: &Claim, t: usize) -> Result<()> {
    let space = family.space();
    for (th, row) in claim.payoffs().iter().enumerate() {
        for (a, atom) in space.atoms(t).iter().enumerate() {
            if atom[1..].iter().any(|&w| row[w] != row[atom[0]]) {
                return Err(Error::NotMeasurable(format!(
                    "coordinate {:?} varies on atom {a} of F_{t}",
                    family.thetas()[th]
                )));
            }
        }
    }
    Ok(())
}

/// All generalized conditional expectations of the `F_t`-measurable
/// `claim` given `F_s`, for `s < t <= T`.
pub fn gen_cond_expectation(
    family: &ModelFamily,
    system: &RobustPricingSystem,
    claim: &Claim,
    t: usize,
    s: usize,
) -> Result<GeneralizedCondExp> {
    claim.check_family(family)?;
    let horizon = family.horizon();
    if t > horizon {
        return Err(Error::Horizon { t, horizon });
    }
    if s >= t {
        return Err(Error::Shape(format!("conditioning time {s} must precede {t}")));
    }
    check_measurable(family, claim, t)?;
    let space = family.space();
    let atoms = space.atoms(s);
    let k = family.num_thetas();
    let masses: Vec<Vec<Rational>> = (0..k)
        .map(|th| {
            atoms
                .iter()
                .map(|atom| atom.iter().map(|&w| system.weight(th, w)).sum())
                .collect()
        })
        .collect();
    let targets: Vec<Rational> = atoms
        .iter()
        .map(|atom| {
            (0..k)
                .flat_map(|th| atom.iter().map(move |&w| (th, w)))
                .map(|(th, w)| system.weight(th, w) * claim.payoff(th, w))
                .sum()
        })
        .collect();

    let columns = k * atoms.len();
    let column = |th: usize, a: usize| th * atoms.len() + a;
    let matrix: Vec<Vec<Rational>> = (0..atoms.len())
        .map(|a| {
            let mut row = vec![zero(); columns];
            for (th, m) in masses.iter().enumerate() {
                row[column(th, a)] = m[a].clone();
            }
            row
        })
        .collect();
    let flat = solve_linear_with_width(&matrix, &targets, columns).ok_or_else(|| {
        Error::Inconsistent("conditional expectation equations are inconsistent".into())
    })?;
    let unflatten = |v: &[Rational]| -> Vec<Vec<Rational>> {
        (0..k)
            .map(|th| (0..atoms.len()).map(|a| v[column(th, a)].clone()).collect())
            .collect()
    };
    let particular = unflatten(&flat);
    let kernel_basis = nullspace_with_width(&matrix, columns)
        .iter()
        .map(|v| unflatten(v))
        .collect();
    Ok(GeneralizedCondExp {
        s,
        particular,
        kernel_basis,
        masses,
        targets,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MartingaleViolation {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(
        "asset {asset}: weighted value {} at t={t} vs {} at s={s} on atom {atom} of F_{s}",
        format_rational(.at_t),
        format_rational(.at_s)
    )]
    Increment {
        s: usize,
        t: usize,
        atom: usize,
        asset: usize,
        at_s: Rational,
        at_t: Rational,
    },
}

fn check_vector_process(
    family: &ModelFamily,
    system: &RobustPricingSystem,
    process: &[AdaptedProcess],
) -> std::result::Result<(), MartingaleViolation> {
    if process.len() != family.num_thetas() {
        return Err(MartingaleViolation::Shape(format!(
            "{} coordinates for {} models",
            process.len(),
            family.num_thetas()
        )));
    }
    if system.weights().len() != family.num_thetas() {
        return Err(MartingaleViolation::Shape("pricing system shape".into()));
    }
    let dims = process[0].dims();
    for p in process {
        if p.dims() != dims {
            return Err(MartingaleViolation::Shape("coordinates differ in dimension".into()));
        }
        validate_adapted(family.space(), p).map_err(|v| MartingaleViolation::Shape(v.to_string()))?;
    }
    Ok(())
}

/// `Q(M_u 1_A)` for asset `j` and atom `A` (given by outcome indices).
fn weighted(
    system: &RobustPricingSystem,
    process: &[AdaptedProcess],
    u: usize,
    atom: &[usize],
    j: usize,
) -> Rational {
    process
        .iter()
        .enumerate()
        .flat_map(|(th, p)| atom.iter().map(move |&w| (th, p, w)))
        .filter(|(th, _, w)| !system.weight(*th, *w).is_zero())
        .map(|(th, p, w)| system.weight(th, w) * &p.value(u, w)[j])
        .sum()
}

fn compare_increments(
    family: &ModelFamily,
    system: &RobustPricingSystem,
    process: &[AdaptedProcess],
    accept: impl Fn(&Rational, &Rational) -> bool,
) -> std::result::Result<(), MartingaleViolation> {
    check_vector_process(family, system, process)?;
    let space = family.space();
    let dims = process[0].dims();
    for s in 0..space.horizon() {
        for (a, atom) in space.atoms(s).iter().enumerate() {
            for j in 0..dims {
                let at_s = weighted(system, process, s, atom, j);
                for t in s + 1..=space.horizon() {
                    let at_t = weighted(system, process, t, atom, j);
                    if !accept(&at_t, &at_s) {
                        return Err(MartingaleViolation::Increment {
                            s,
                            t,
                            atom: a,
                            asset: j,
                            at_s,
                            at_t,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Checks `Q(M_t 1_A) = Q(M_s 1_A)` for all `s < t` and atoms `A` of `F_s`.
/// `process[θ]` is the coordinate `M^θ`.
pub fn is_gen_martingale(
    family: &ModelFamily,
    system: &RobustPricingSystem,
    process: &[AdaptedProcess],
) -> std::result::Result<(), MartingaleViolation> {
    compare_increments(family, system, process, |t, s| t == s)
}

/// Checks `Q(M_t 1_A) <= Q(M_s 1_A)` for all `s < t` and atoms `A` of `F_s`.
pub fn is_gen_supermartingale(
    family: &ModelFamily,
    system: &RobustPricingSystem,
    process: &[AdaptedProcess],
) -> std::result::Result<(), MartingaleViolation> {
    compare_increments(family, system, process, |t, s| t <= s)
}

/// `Z^θ_t = E_P[Z^θ_T | F_t]` for every model, date and outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityProcess {
    /// `values[θ][t][ω]`.
    values: Vec<Vec<Vec<Rational>>>,
}

impl DensityProcess {
    pub fn value(&self, theta: usize, t: usize, outcome: usize) -> &Rational {
        &self.values[theta][t][outcome]
    }

    pub fn values(&self) -> &[Vec<Vec<Rational>>] {
        &self.values
    }
}

pub fn density_process(family: &ModelFamily, system: &RobustPricingSystem) -> DensityProcess {
    let space = family.space();
    let values = (0..family.num_thetas())
        .map(|th| {
            (0..=space.horizon())
                .map(|t| {
                    let per_atom: Vec<Rational> = space
                        .atoms(t)
                        .iter()
                        .enumerate()
                        .map(|(a, atom)| {
                            let mass: Rational = atom.iter().map(|&w| system.weight(th, w)).sum();
                            mass / space.atom_prob(t, a)
                        })
                        .collect();
                    (0..space.num_outcomes())
                        .map(|w| per_atom[space.atom_of(t, w)].clone())
                        .collect()
                })
                .collect()
        })
        .collect();
    DensityProcess { values }
}

/// Checks that `Σ_θ Z^θ_t S^θ_t` is a martingale under `P`:
/// `E_P[(X_t - X_s) 1_A] = 0` for all `s < t` and atoms `A` of `F_s`.
pub fn check_deflated_martingale(
    family: &ModelFamily,
    system: &RobustPricingSystem,
) -> std::result::Result<(), MartingaleViolation> {
    if system.weights().len() != family.num_thetas() {
        return Err(MartingaleViolation::Shape("pricing system shape".into()));
    }
    let space = family.space();
    let z = density_process(family, system);
    let deflated = |u: usize, w: usize, j: usize| -> Rational {
        (0..family.num_thetas())
            .map(|th| z.value(th, u, w) * &family.price(th, u, w)[j])
            .sum()
    };
    let expectation = |u: usize, atom: &[usize], j: usize| -> Rational {
        atom.iter()
            .map(|&w| space.prob(w) * deflated(u, w, j))
            .sum()
    };
    for s in 0..space.horizon() {
        for (a, atom) in space.atoms(s).iter().enumerate() {
            for j in 0..family.dims() {
                let at_s = expectation(s, atom, j);
                for t in s + 1..=space.horizon() {
                    let at_t = expectation(t, atom, j);
                    if at_t != at_s {
                        return Err(MartingaleViolation::Increment {
                            s,
                            t,
                            atom: a,
                            asset: j,
                            at_s,
                            at_t,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}
