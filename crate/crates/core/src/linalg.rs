//! Exact Gaussian elimination: particular solutions and kernel bases.

use num_traits::Zero;

use crate::rational::{zero, Rational};

/// Reduced row echelon form of `[matrix | rhs]`.
struct Echelon {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    pivot_cols: Vec<usize>,
    cols: usize,
}

fn row_reduce(matrix: &[Vec<Rational>], rhs: &[Rational], cols: usize) -> Echelon {
    let mut rows: Vec<Vec<Rational>> = matrix.to_vec();
    let mut rhs: Vec<Rational> = rhs.to_vec();
    let mut pivot_cols = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        rhs.swap(next, found);
        let pivot = rows[next][col].clone();
        for v in rows[next].iter_mut() {
            *v /= &pivot;
        }
        rhs[next] /= &pivot;
        for r in 0..rows.len() {
            if r == next || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in col..cols {
                if rows[next][c].is_zero() {
                    continue;
                }
                let delta = &factor * &rows[next][c];
                rows[r][c] -= delta;
            }
            let delta = &factor * &rhs[next];
            rhs[r] -= delta;
        }
        pivot_cols.push(col);
        next += 1;
    }
    Echelon {
        rows,
        rhs,
        pivot_cols,
        cols,
    }
}

fn column_count(matrix: &[Vec<Rational>]) -> usize {
    matrix.first().map_or(0, Vec::len)
}

/// Exact basis of `{x : matrix · x = 0}`; empty when the kernel is trivial.
///
/// `columns` is needed because a matrix with zero rows still has a width.
pub fn nullspace_with_width(matrix: &[Vec<Rational>], columns: usize) -> Vec<Vec<Rational>> {
    assert!(
        matrix.iter().all(|row| row.len() == columns),
        "ragged matrix"
    );
    let zeros = vec![zero(); matrix.len()];
    let ech = row_reduce(matrix, &zeros, columns);
    let free: Vec<usize> = (0..ech.cols)
        .filter(|c| !ech.pivot_cols.contains(c))
        .collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![zero(); ech.cols];
            v[f] = Rational::from_integer(1.into());
            for (r, &p) in ech.pivot_cols.iter().enumerate() {
                v[p] = -ech.rows[r][f].clone();
            }
            v
        })
        .collect()
}

/// Exact basis of the kernel of a non-empty rectangular matrix.
pub fn nullspace(matrix: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    nullspace_with_width(matrix, column_count(matrix))
}

/// A particular solution of `matrix · x = rhs` with every free variable set
/// to zero, or `None` when the system is inconsistent.
pub fn solve_linear_with_width(
    matrix: &[Vec<Rational>],
    rhs: &[Rational],
    columns: usize,
) -> Option<Vec<Rational>> {
    assert_eq!(matrix.len(), rhs.len(), "rhs length differs from row count");
    assert!(
        matrix.iter().all(|row| row.len() == columns),
        "ragged matrix"
    );
    let ech = row_reduce(matrix, rhs, columns);
    let rank = ech.pivot_cols.len();
    if ech.rhs[rank..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![zero(); columns];
    for (r, &p) in ech.pivot_cols.iter().enumerate() {
        x[p] = ech.rhs[r].clone();
    }
    Some(x)
}

pub fn solve_linear(matrix: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    solve_linear_with_width(matrix, rhs, column_count(matrix))
}

pub fn mat_vec(matrix: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter(|(a, _)| !a.is_zero())
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect()
    }

    #[test]
    fn identity_has_trivial_kernel() {
        assert!(nullspace(&m(&[&[1, 0], &[0, 1]])).is_empty());
    }

    #[test]
    fn single_row_kernel() {
        assert_eq!(nullspace(&m(&[&[1, 1]])), vec![vec![int(-1), int(1)]]);
    }

    #[test]
    fn zero_times_x_is_zero() {
        assert_eq!(solve_linear(&m(&[&[0]]), &[int(0)]), Some(vec![int(0)]));
    }

    #[test]
    fn two_by_two_system() {
        let x = solve_linear(&m(&[&[1, 1], &[1, -1]]), &[int(1), int(0)]).unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn inconsistent_system() {
        assert_eq!(solve_linear(&m(&[&[0]]), &[int(1)]), None);
    }

    #[test]
    fn zero_row_matrix_kernel_is_everything() {
        assert_eq!(nullspace_with_width(&[], 3).len(), 3);
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated_and_rank_nullity_holds(
            entries in proptest::collection::vec(-3i64..=3, 12)
        ) {
            let a: Vec<Vec<Rational>> = entries.chunks(4).map(|r| r.iter().map(|&v| int(v)).collect()).collect();
            let basis = nullspace(&a);
            for v in &basis {
                prop_assert!(mat_vec(&a, v).iter().all(|x| x.is_zero()));
            }
            let zeros = vec![zero(); 3];
            let rank = row_reduce(&a, &zeros, 4).pivot_cols.len();
            prop_assert_eq!(rank + basis.len(), 4);
        }

        #[test]
        fn particular_solution_solves_consistent_systems(
            entries in proptest::collection::vec(-3i64..=3, 9),
            x in proptest::collection::vec(-3i64..=3, 3)
        ) {
            let a: Vec<Vec<Rational>> = entries.chunks(3).map(|r| r.iter().map(|&v| int(v)).collect()).collect();
            let x: Vec<Rational> = x.into_iter().map(int).collect();
            let b = mat_vec(&a, &x);
            let sol = solve_linear(&a, &b).expect("consistent by construction");
            prop_assert_eq!(mat_vec(&a, &sol), b);
        }
    }
}
