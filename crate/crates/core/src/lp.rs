//! Exact two-phase simplex over arbitrary-precision rationals.
//!
//! Pivoting follows Bland's rule (lowest index enters, ties in the ratio test
//! leave by lowest basic index), which guarantees termination in exact
//! arithmetic. Every `Optimal` answer carries dual multipliers and every
//! `Infeasible` answer carries a Farkas ray; both can be re-checked against
//! the original program with [`LpSolution::verify`].
//!
//! Dual multipliers are stated for the minimisation form of the program
//! (the objective is negated first when the sense is `Maximize`): a `>=` row
//! has `y >= 0`, a `<=` row has `y <= 0`, and reduced costs are
//! `d = c_min - A^T y`.

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, one, zero, Rational};

pub type VarId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Free,
    NonNegative,
    Boxed { lo: Rational, hi: Rational },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub bound: Bound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub terms: Vec<(VarId, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    variables: Vec<Variable>,
    sense: Sense,
    objective: Vec<(VarId, Rational)>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            variables: Vec::new(),
            sense,
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, bound: Bound) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            bound,
        });
        self.variables.len() - 1
    }

    /// Adds `coeff` to the objective coefficient of `var`.
    pub fn add_objective_term(&mut self, var: VarId, coeff: Rational) {
        self.check_var(var);
        self.objective.push((var, coeff));
    }

    pub fn add_constraint(
        &mut self,
        terms: Vec<(VarId, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        for (var, _) in &terms {
            self.check_var(*var);
        }
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    fn check_var(&self, var: VarId) {
        assert!(
            var < self.variables.len(),
            "variable {var} is not declared in this program"
        );
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Dense objective vector in the program's own sense.
    pub fn objective(&self) -> Vec<Rational> {
        let mut c = vec![zero(); self.variables.len()];
        for (var, coeff) in &self.objective {
            c[*var] += coeff;
        }
        c
    }

    fn min_objective(&self) -> Vec<Rational> {
        let c = self.objective();
        match self.sense {
            Sense::Minimize => c,
            Sense::Maximize => c.into_iter().map(|v| -v).collect(),
        }
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective
            .iter()
            .map(|(var, coeff)| coeff * &x[*var])
            .sum()
    }

    pub fn row_activity(&self, row: usize, x: &[Rational]) -> Rational {
        self.constraints[row]
            .terms
            .iter()
            .map(|(var, coeff)| coeff * &x[*var])
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// One multiplier per constraint, for the minimisation form.
    Dual { multipliers: Vec<Rational> },
    /// Row multipliers `y` with `sup_{x in bounds} (y^T A) x < y^T b`.
    Farkas { multipliers: Vec<Rational> },
    /// A feasible point and a recession direction that improves the
    /// objective without bound.
    Ray { point: Vec<Rational>, direction: Vec<Rational> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value in the program's own sense, when optimal.
    pub value: Option<Rational>,
    /// Optimal vertex when optimal; empty otherwise.
    pub assignment: Vec<Rational>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("status {0:?} carries no verifiable certificate")]
    NotCertified(LpStatus),
    #[error("assignment has {got} entries, program has {expected} variables")]
    Length { expected: usize, got: usize },
    #[error("variable {0} violates its bound")]
    BoundViolated(String),
    #[error("constraint {0} is violated by the assignment")]
    RowViolated(usize),
    #[error("multiplier of constraint {0} has the wrong sign")]
    DualSign(usize),
    #[error("reduced cost of variable {0} is inconsistent with its bound")]
    ReducedCost(String),
    #[error("complementary slackness fails at constraint {0}")]
    Slackness(usize),
    #[error("primal value {primal} differs from dual value {dual}")]
    DualityGap { primal: String, dual: String },
    #[error("value field does not match the objective at the assignment")]
    ValueMismatch,
    #[error("Farkas combination does not separate: sup {sup} >= rhs {rhs}")]
    FarkasNotSeparating { sup: String, rhs: String },
    #[error("Farkas combination is unbounded over the variable bounds at {0}")]
    FarkasUnbounded(String),
    #[error("ray leaves the feasible set at {0}")]
    RayInfeasible(String),
    #[error("ray does not improve the objective")]
    RayNotImproving,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Re-checks the solution against `lp` in exact arithmetic: primal and
    /// dual feasibility plus complementary slackness for `Optimal`, the Farkas
    /// inequality for `Infeasible`, a feasible improving ray for `Unbounded`.
    pub fn verify(&self, lp: &LinearProgram) -> Result<(), CertificateError> {
        match (&self.status, &self.certificate) {
            (LpStatus::Optimal, Certificate::Dual { multipliers }) => {
                verify_optimal(lp, &self.assignment, multipliers, self.value.as_ref())
            }
            (LpStatus::Infeasible, Certificate::Farkas { multipliers }) => {
                verify_farkas(lp, multipliers)
            }
            (LpStatus::Unbounded, Certificate::Ray { point, direction }) => {
                verify_ray(lp, point, direction)
            }
            (status, _) => Err(CertificateError::NotCertified(*status)),
        }
    }
}

fn verify_ray(lp: &LinearProgram, x: &[Rational], d: &[Rational]) -> Result<(), CertificateError> {
    let n = lp.variables.len();
    for v in [x, d] {
        if v.len() != n {
            return Err(CertificateError::Length { expected: n, got: v.len() });
        }
    }
    for (j, var) in lp.variables.iter().enumerate() {
        let ok = match &var.bound {
            Bound::Free => true,
            Bound::NonNegative => !x[j].is_negative() && !d[j].is_negative(),
            Bound::Boxed { lo, hi } => x[j] >= *lo && x[j] <= *hi && d[j].is_zero(),
        };
        if !ok {
            return Err(CertificateError::RayInfeasible(var.name.clone()));
        }
    }
    for (i, con) in lp.constraints.iter().enumerate() {
        let ax = lp.row_activity(i, x);
        let ad = lp.row_activity(i, d);
        let ok = match con.relation {
            Relation::Le => ax <= con.rhs && !ad.is_positive(),
            Relation::Ge => ax >= con.rhs && !ad.is_negative(),
            Relation::Eq => ax == con.rhs && ad.is_zero(),
        };
        if !ok {
            return Err(CertificateError::RayInfeasible(format!("constraint {i}")));
        }
    }
    let gain: Rational = lp.min_objective().iter().zip(d).map(|(c, d)| c * d).sum();
    if gain.is_negative() {
        Ok(())
    } else {
        Err(CertificateError::RayNotImproving)
    }
}

fn dual_sign_ok(relation: Relation, y: &Rational) -> bool {
    match relation {
        Relation::Ge => !y.is_negative(),
        Relation::Le => !y.is_positive(),
        Relation::Eq => true,
    }
}

fn row_combination(lp: &LinearProgram, y: &[Rational]) -> Vec<Rational> {
    let mut g = vec![zero(); lp.variables.len()];
    for (con, yi) in lp.constraints.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (var, coeff) in &con.terms {
            g[*var] += coeff * yi;
        }
    }
    g
}

fn verify_optimal(
    lp: &LinearProgram,
    x: &[Rational],
    y: &[Rational],
    value: Option<&Rational>,
) -> Result<(), CertificateError> {
    if x.len() != lp.variables.len() {
        return Err(CertificateError::Length {
            expected: lp.variables.len(),
            got: x.len(),
        });
    }
    if y.len() != lp.constraints.len() {
        return Err(CertificateError::Length {
            expected: lp.constraints.len(),
            got: y.len(),
        });
    }
    for (var, xj) in lp.variables.iter().zip(x) {
        let ok = match &var.bound {
            Bound::Free => true,
            Bound::NonNegative => !xj.is_negative(),
            Bound::Boxed { lo, hi } => lo <= xj && xj <= hi,
        };
        if !ok {
            return Err(CertificateError::BoundViolated(var.name.clone()));
        }
    }
    for (i, con) in lp.constraints.iter().enumerate() {
        let slack = lp.row_activity(i, x) - &con.rhs;
        let ok = match con.relation {
            Relation::Le => !slack.is_positive(),
            Relation::Ge => !slack.is_negative(),
            Relation::Eq => slack.is_zero(),
        };
        if !ok {
            return Err(CertificateError::RowViolated(i));
        }
        if !dual_sign_ok(con.relation, &y[i]) {
            return Err(CertificateError::DualSign(i));
        }
        if !(&y[i] * &slack).is_zero() {
            return Err(CertificateError::Slackness(i));
        }
    }
    let c = lp.min_objective();
    let g = row_combination(lp, y);
    let mut dual_value: Rational = lp
        .constraints
        .iter()
        .zip(y)
        .map(|(con, yi)| yi * &con.rhs)
        .sum();
    for (j, var) in lp.variables.iter().enumerate() {
        let d = &c[j] - &g[j];
        match &var.bound {
            Bound::Free => {
                if !d.is_zero() {
                    return Err(CertificateError::ReducedCost(var.name.clone()));
                }
            }
            Bound::NonNegative => {
                if d.is_negative() || !(&d * &x[j]).is_zero() {
                    return Err(CertificateError::ReducedCost(var.name.clone()));
                }
            }
            Bound::Boxed { lo, hi } => {
                if d.is_positive() {
                    if &x[j] != lo {
                        return Err(CertificateError::ReducedCost(var.name.clone()));
                    }
                    dual_value += &d * lo;
                } else if d.is_negative() {
                    if &x[j] != hi {
                        return Err(CertificateError::ReducedCost(var.name.clone()));
                    }
                    dual_value += &d * hi;
                }
            }
        }
    }
    let primal_value: Rational = c.iter().zip(x).map(|(cj, xj)| cj * xj).sum();
    if primal_value != dual_value {
        return Err(CertificateError::DualityGap {
            primal: format_rational(&primal_value),
            dual: format_rational(&dual_value),
        });
    }
    if let Some(v) = value {
        if *v != lp.objective_value(x) {
            return Err(CertificateError::ValueMismatch);
        }
    }
    Ok(())
}

fn verify_farkas(lp: &LinearProgram, y: &[Rational]) -> Result<(), CertificateError> {
    if y.len() != lp.constraints.len() {
        return Err(CertificateError::Length {
            expected: lp.constraints.len(),
            got: y.len(),
        });
    }
    // An empty box is infeasible on its own.
    if lp
        .variables
        .iter()
        .any(|v| matches!(&v.bound, Bound::Boxed { lo, hi } if lo > hi))
    {
        return Ok(());
    }
    for (i, con) in lp.constraints.iter().enumerate() {
        if !dual_sign_ok(con.relation, &y[i]) {
            return Err(CertificateError::DualSign(i));
        }
    }
    let g = row_combination(lp, y);
    let rhs: Rational = lp
        .constraints
        .iter()
        .zip(y)
        .map(|(con, yi)| yi * &con.rhs)
        .sum();
    let mut sup = zero();
    for (var, gj) in lp.variables.iter().zip(&g) {
        match &var.bound {
            Bound::Free => {
                if !gj.is_zero() {
                    return Err(CertificateError::FarkasUnbounded(var.name.clone()));
                }
            }
            Bound::NonNegative => {
                if gj.is_positive() {
                    return Err(CertificateError::FarkasUnbounded(var.name.clone()));
                }
            }
            Bound::Boxed { lo, hi } => {
                sup += if gj.is_positive() { gj * hi } else { gj * lo };
            }
        }
    }
    if sup < rhs {
        Ok(())
    } else {
        Err(CertificateError::FarkasNotSeparating {
            sup: format_rational(&sup),
            rhs: format_rational(&rhs),
        })
    }
}

/// How an original variable is expressed through standard-form columns.
#[derive(Debug, Clone)]
enum ColumnMap {
    /// `x = lo + col`.
    Shifted { col: usize, lo: Rational },
    /// `x = pos - neg`.
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    /// Dense rows over structural, slack and artificial columns.
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// `+1` or `-1`: the sign applied to each row to make `rhs >= 0`.
    row_sign: Vec<i8>,
    cost: Vec<Rational>,
    maps: Vec<ColumnMap>,
    /// First artificial column; artificial `i` sits at `artificial + i`.
    artificial: usize,
}

fn standardize(lp: &LinearProgram) -> StandardForm {
    let mut maps = Vec::with_capacity(lp.variables.len());
    let mut structural = 0usize;
    let mut boxes: Vec<(usize, Rational)> = Vec::new();
    for var in &lp.variables {
        match &var.bound {
            Bound::Free => {
                maps.push(ColumnMap::Split {
                    pos: structural,
                    neg: structural + 1,
                });
                structural += 2;
            }
            Bound::NonNegative => {
                maps.push(ColumnMap::Shifted {
                    col: structural,
                    lo: zero(),
                });
                structural += 1;
            }
            Bound::Boxed { lo, hi } => {
                maps.push(ColumnMap::Shifted {
                    col: structural,
                    lo: lo.clone(),
                });
                boxes.push((structural, hi - lo));
                structural += 1;
            }
        }
    }
    let slack_count = lp
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count()
        + boxes.len();
    let m = lp.constraints.len() + boxes.len();
    let artificial = structural + slack_count;
    let width = artificial + m;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut next_slack = structural;
    for con in &lp.constraints {
        let mut row = vec![zero(); width];
        let mut b = con.rhs.clone();
        for (var, coeff) in &con.terms {
            match &maps[*var] {
                ColumnMap::Shifted { col, lo } => {
                    row[*col] += coeff;
                    b -= coeff * lo;
                }
                ColumnMap::Split { pos, neg } => {
                    row[*pos] += coeff;
                    row[*neg] -= coeff;
                }
            }
        }
        match con.relation {
            Relation::Le => {
                row[next_slack] = one();
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -one();
                next_slack += 1;
            }
            Relation::Eq => {}
        }
        rows.push(row);
        rhs.push(b);
    }
    for (col, width_of_box) in boxes {
        let mut row = vec![zero(); width];
        row[col] = one();
        row[next_slack] = one();
        next_slack += 1;
        rows.push(row);
        rhs.push(width_of_box);
    }
    let mut row_sign = Vec::with_capacity(m);
    for (i, (row, b)) in rows.iter_mut().zip(rhs.iter_mut()).enumerate() {
        if b.is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
            *b = -b.clone();
            row_sign.push(-1);
        } else {
            row_sign.push(1);
        }
        row[artificial + i] = one();
    }

    let mut cost = vec![zero(); width];
    for (j, cj) in lp.min_objective().into_iter().enumerate() {
        match &maps[j] {
            ColumnMap::Shifted { col, .. } => cost[*col] = cj,
            ColumnMap::Split { pos, neg } => {
                cost[*neg] = -cj.clone();
                cost[*pos] = cj;
            }
        }
    }
    StandardForm {
        rows,
        rhs,
        row_sign,
        cost,
        maps,
        artificial,
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs of the active phase.
    reduced: Vec<Rational>,
}

enum PhaseOutcome {
    Optimal,
    /// Entering column with no blocking row.
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if p != one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let support: Vec<usize> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, _)| j)
            .collect();
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &support {
                let delta = &f * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            if !pivot_rhs.is_zero() {
                let delta = &f * &pivot_rhs;
                self.rhs[i] -= delta;
            }
        }
        if !self.reduced[c].is_zero() {
            let f = self.reduced[c].clone();
            for &j in &support {
                let delta = &f * &pivot_row[j];
                self.reduced[j] -= delta;
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule simplex over columns `0..allowed`.
    fn run(&mut self, allowed: usize) -> PhaseOutcome {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.reduced[j].is_negative()) else {
                return PhaseOutcome::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((best_row, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*best_row])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return PhaseOutcome::Unbounded(enter),
            }
        }
    }

    fn basic_values(&self, width: usize) -> Vec<Rational> {
        let mut x = vec![zero(); width];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i].clone();
        }
        x
    }
}

/// Solves `lp` exactly. The returned vertex, dual multipliers and Farkas
/// rays are all exact; in debug builds every certificate is re-verified.
pub fn lp_solve(lp: &LinearProgram) -> LpSolution {
    let solution = solve_unchecked(lp);
    if cfg!(debug_assertions) {
        if let Err(err) = solution.verify(lp) {
            panic!("simplex produced an invalid certificate: {err}");
        }
    }
    solution
}

fn solve_unchecked(lp: &LinearProgram) -> LpSolution {
    if lp
        .variables
        .iter()
        .any(|v| matches!(&v.bound, Bound::Boxed { lo, hi } if lo > hi))
    {
        return LpSolution {
            status: LpStatus::Infeasible,
            value: None,
            assignment: Vec::new(),
            certificate: Certificate::Farkas {
                multipliers: vec![zero(); lp.constraints.len()],
            },
        };
    }
    let sf = standardize(lp);
    let m = sf.rows.len();
    let width = sf.artificial + m;
    let n_orig = lp.constraints.len();

    // Phase one: minimise the sum of artificials from the artificial basis.
    let mut reduced = vec![zero(); width];
    for row in &sf.rows {
        for j in 0..sf.artificial {
            if !row[j].is_zero() {
                reduced[j] -= &row[j];
            }
        }
    }
    let mut tab = Tableau {
        rows: sf.rows,
        rhs: sf.rhs,
        basis: (0..m).map(|i| sf.artificial + i).collect(),
        reduced,
    };
    tab.run(width);
    let infeasibility: Rational = tab
        .basis
        .iter()
        .zip(&tab.rhs)
        .filter(|(b, _)| **b >= sf.artificial)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_positive() {
        let multipliers = (0..n_orig)
            .map(|i| {
                let pi = one() - &tab.reduced[sf.artificial + i];
                if sf.row_sign[i] < 0 {
                    -pi
                } else {
                    pi
                }
            })
            .collect();
        return LpSolution {
            status: LpStatus::Infeasible,
            value: None,
            assignment: Vec::new(),
            certificate: Certificate::Farkas { multipliers },
        };
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and stay inert.
    for r in 0..m {
        if tab.basis[r] < sf.artificial {
            continue;
        }
        if let Some(j) = (0..sf.artificial).find(|&j| !tab.rows[r][j].is_zero()) {
            tab.pivot(r, j);
        }
    }

    // Phase two.
    let mut reduced = sf.cost.clone();
    for (i, &b) in tab.basis.iter().enumerate() {
        let cb = &sf.cost[b];
        if cb.is_zero() {
            continue;
        }
        for (j, a) in tab.rows[i].iter().enumerate() {
            if !a.is_zero() {
                reduced[j] -= cb * a;
            }
        }
    }
    tab.reduced = reduced;
    let original = |xs: &[Rational], shift: bool| -> Vec<Rational> {
        sf.maps
            .iter()
            .map(|map| match map {
                ColumnMap::Shifted { col, lo } if shift => lo + &xs[*col],
                ColumnMap::Shifted { col, .. } => xs[*col].clone(),
                ColumnMap::Split { pos, neg } => &xs[*pos] - &xs[*neg],
            })
            .collect()
    };
    if let PhaseOutcome::Unbounded(enter) = tab.run(sf.artificial) {
        let mut d = vec![zero(); width];
        d[enter] = one();
        for (i, &b) in tab.basis.iter().enumerate() {
            d[b] = -tab.rows[i][enter].clone();
        }
        return LpSolution {
            status: LpStatus::Unbounded,
            value: None,
            assignment: Vec::new(),
            certificate: Certificate::Ray {
                point: original(&tab.basic_values(width), true),
                direction: original(&d, false),
            },
        };
    }

    let assignment = original(&tab.basic_values(width), true);
    let multipliers = (0..n_orig)
        .map(|i| {
            let pi = -tab.reduced[sf.artificial + i].clone();
            if sf.row_sign[i] < 0 {
                -pi
            } else {
                pi
            }
        })
        .collect();
    LpSolution {
        status: LpStatus::Optimal,
        value: Some(lp.objective_value(&assignment)),
        assignment,
        certificate: Certificate::Dual { multipliers },
    }
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |(var, coeff): &(VarId, Rational)| {
            format!("{} {}", format_rational(coeff), self.variables[*var].name)
        };
        let sense = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        let obj: Vec<String> = self.objective.iter().map(term).collect();
        writeln!(f, "{sense} {}", obj.join(" + "))?;
        for con in &self.constraints {
            let lhs: Vec<String> = con.terms.iter().map(term).collect();
            let rel = match con.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            writeln!(f, "  {} {rel} {}", lhs.join(" + "), format_rational(&con.rhs))?;
        }
        Ok(())
    }
}
