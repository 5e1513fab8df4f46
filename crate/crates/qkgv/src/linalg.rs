//! Exact dense linear algebra over the rationals.

use num::BigRational;
use num::Zero;

/// Reduce `m` to row echelon form in place; returns the pivot columns in
/// order.  Pivots are chosen left to right, so later columns become free
/// variables when the system is underdetermined.
pub fn row_reduce(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..cols {
            let v = &m[r][j] * &inv;
            m[r][j] = v;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let v = &m[i][j] - &f * &m[r][j];
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    row_reduce(&mut m).len()
}

/// Whether `v` lies in the row span of `rows`.
pub fn in_row_span(rows: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    let base = rank(rows);
    let mut aug: Vec<Vec<BigRational>> = rows.to_vec();
    aug.push(v.to_vec());
    rank(&aug) == base
}

/// Solve `A x = b` exactly.  Free variables are set to zero; returns `None`
/// when the system is inconsistent.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i].clone());
            row
        })
        .collect();
    let pivots = row_reduce(&mut m);
    if pivots.last() == Some(&cols) {
        return None; // pivot in the augmented column
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_i64;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| rat_i64(v)).collect())
            .collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4], &[0, 1]])), 2);
    }

    #[test]
    fn solve_unique() {
        let x = solve(&m(&[&[2, 0], &[1, 1]]), &[rat_i64(4), rat_i64(5)]).unwrap();
        assert_eq!(x, vec![rat_i64(2), rat_i64(3)]);
    }

    #[test]
    fn solve_underdetermined_prefers_early_columns() {
        // x + y = 1 has the free variable y (later column) set to zero.
        let x = solve(&m(&[&[1, 1]]), &[rat_i64(1)]).unwrap();
        assert_eq!(x, vec![rat_i64(1), rat_i64(0)]);
    }

    #[test]
    fn solve_inconsistent() {
        assert!(solve(&m(&[&[1, 1], &[1, 1]]), &[rat_i64(1), rat_i64(2)]).is_none());
    }

    #[test]
    fn span_membership() {
        let rows = m(&[&[1, 0, 1], &[0, 1, 1]]);
        assert!(in_row_span(&rows, &[rat_i64(1), rat_i64(1), rat_i64(2)]));
        assert!(!in_row_span(&rows, &[rat_i64(0), rat_i64(0), rat_i64(1)]));
    }
}
