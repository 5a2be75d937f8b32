#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use robustftap::lp::{Bound, LinearProgram, Relation, Sense};
use robustftap::market::{build_space, AdaptedProcess, Claim, ModelFamily, PredictableStrategy};
use robustftap::rational::{int, rat, zero};
use robustftap::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random market: `T <= 3`, `|Ω| <= 8`, `|Θ| <= 4`, `d <= 2`, integer
/// prices in `[-5, 5]`, trivial `F_0`, positive random `P`.
pub fn random_family(rng: &mut ChaCha8Rng) -> ModelFamily {
    let horizon = rng.gen_range(1..=3);
    let n = rng.gen_range(2..=8usize);
    let mut partitions: Vec<Vec<Vec<usize>>> = vec![vec![(0..n).collect()]];
    for t in 1..=horizon {
        let prev = partitions.last().unwrap().clone();
        let mut next = Vec::new();
        for atom in prev {
            if t == horizon {
                next.extend(atom.iter().map(|&w| vec![w]));
                continue;
            }
            let pieces = rng.gen_range(1..=atom.len().min(3));
            let mut cuts: Vec<usize> = (1..atom.len()).collect();
            cuts.shuffle(rng);
            let mut cuts: Vec<usize> = cuts.into_iter().take(pieces - 1).collect();
            cuts.sort_unstable();
            let mut start = 0;
            for c in cuts.into_iter().chain(std::iter::once(atom.len())) {
                next.push(atom[start..c].to_vec());
                start = c;
            }
        }
        partitions.push(next);
    }
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = raw.iter().sum();
    let prob = raw.iter().map(|&p| rat(p, total)).collect();
    let outcomes = (0..n).map(|w| format!("w{w}")).collect();
    let space = build_space(outcomes, horizon, partitions, prob).unwrap();

    let k = rng.gen_range(1..=4);
    let dims = rng.gen_range(1..=2);
    let processes = (0..k)
        .map(|_| {
            AdaptedProcess::from_atoms(&space, dims, |_, _| {
                (0..dims).map(|_| int(rng.gen_range(-5..=5))).collect()
            })
            .unwrap()
        })
        .collect();
    let thetas = (1..=k).map(|i| format!("theta{i}")).collect();
    ModelFamily::new(space, thetas, processes).unwrap()
}

pub fn random_claim(rng: &mut ChaCha8Rng, family: &ModelFamily) -> Claim {
    Claim::from_fn(family, |_, _| int(rng.gen_range(-5..=5)))
}

pub fn random_strategy(rng: &mut ChaCha8Rng, family: &ModelFamily) -> PredictableStrategy {
    PredictableStrategy::from_atoms(family.space(), family.dims(), |_, _| {
        (0..family.dims())
            .map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=3)))
            .collect()
    })
    .unwrap()
}

/// A half-space or hyperplane `a·x (rel) b`.
#[derive(Clone, Debug)]
pub struct Row {
    pub a: Vec<Rational>,
    pub rel: Relation,
    pub b: Rational,
}

impl Row {
    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.a.iter().zip(x).map(|(a, x)| a * x).sum();
        match self.rel {
            Relation::Le => lhs <= self.b,
            Relation::Ge => lhs >= self.b,
            Relation::Eq => lhs == self.b,
        }
    }
}

/// Gaussian elimination on a square system; `None` when singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && a[r][col] != zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Best objective over all basic points of `{x : rows}`: every choice of
/// `n` rows taken as equalities with a unique solution. Valid when the
/// feasible set is bounded, or more generally when it has a vertex and
/// the optimum is finite. `None` means no feasible basic point.
pub fn vertex_optimum(c: &[Rational], rows: &[Row], maximize: bool) -> Option<(Rational, Vec<Rational>)> {
    let n = c.len();
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    for subset in combinations(rows.len(), n) {
        let a = subset.iter().map(|&i| rows[i].a.clone()).collect();
        let b = subset.iter().map(|&i| rows[i].b.clone()).collect();
        let Some(x) = solve_square(a, b) else { continue };
        if !rows.iter().all(|r| r.holds(&x)) {
            continue;
        }
        let value: Rational = c.iter().zip(&x).map(|(c, x)| c * x).sum();
        let better = match &best {
            None => true,
            Some((v, _)) => (maximize && value > *v) || (!maximize && value < *v),
        };
        if better {
            best = Some((value, x));
        }
    }
    best
}

/// A tiny random LP with boxed variables, as both a solver input and a
/// row list for [`vertex_optimum`].
pub struct TinyLp {
    pub lp: LinearProgram,
    pub c: Vec<Rational>,
    pub rows: Vec<Row>,
    pub maximize: bool,
}

pub fn random_tiny_lp(rng: &mut ChaCha8Rng) -> TinyLp {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let maximize = rng.gen_bool(0.5);
    let mut lp = LinearProgram::new(if maximize { Sense::Maximize } else { Sense::Minimize });
    let mut rows = Vec::new();
    let c: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-4..=4))).collect();
    let vars: Vec<usize> = (0..n)
        .map(|j| {
            let lo = rng.gen_range(-3..=1);
            let hi = lo + rng.gen_range(0..=4);
            let mut unit = vec![zero(); n];
            unit[j] = int(1);
            rows.push(Row { a: unit.clone(), rel: Relation::Ge, b: int(lo) });
            rows.push(Row { a: unit, rel: Relation::Le, b: int(hi) });
            lp.add_var(format!("x{j}"), Bound::Boxed { lo: int(lo), hi: int(hi) })
        })
        .collect();
    for (j, v) in vars.iter().enumerate() {
        lp.add_objective_term(*v, c[j].clone());
    }
    for _ in 0..m {
        let a: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-3..=3))).collect();
        let rel = *[Relation::Le, Relation::Ge, Relation::Eq].choose(rng).unwrap();
        let b = int(rng.gen_range(-6..=6));
        let terms = vars
            .iter()
            .zip(&a)
            .filter(|(_, a)| **a != zero())
            .map(|(v, a)| (*v, a.clone()))
            .collect();
        lp.add_constraint(terms, rel, b.clone());
        rows.push(Row { a, rel, b });
    }
    TinyLp { lp, c, rows, maximize }
}

/// A random LP with free and sign-constrained variables, which may be
/// infeasible or unbounded. Used for certificate checks only.
pub fn random_open_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=4);
    let mut lp = LinearProgram::new(if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize });
    let vars: Vec<usize> = (0..n)
        .map(|j| {
            let bound = if rng.gen_bool(0.5) { Bound::Free } else { Bound::NonNegative };
            lp.add_var(format!("x{j}"), bound)
        })
        .collect();
    for v in &vars {
        lp.add_objective_term(*v, int(rng.gen_range(-3..=3)));
    }
    for _ in 0..m {
        let terms = vars.iter().map(|v| (*v, int(rng.gen_range(-3..=3)))).collect();
        let rel = *[Relation::Le, Relation::Ge, Relation::Eq].choose(rng).unwrap();
        lp.add_constraint(terms, rel, int(rng.gen_range(-5..=5)));
    }
    lp
}
