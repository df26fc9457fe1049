//! Dense exact-rational simplex for `max c·x  s.t.  A x <= b, x >= 0` with
//! `b >= 0`, so the all-slack basis is feasible and no phase one is needed.
//! Pivoting uses Bland's rule.

use num_traits::{Signed, Zero};

use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub primal: Vec<Rational>,
    /// Optimal multipliers of the `A x <= b` rows.
    pub dual: Vec<Rational>,
    pub pivots: usize,
}

/// Panics if dimensions disagree or some `b_i < 0`.
pub fn maximize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m, "one right-hand side per row");
    assert!(a.iter().all(|row| row.len() == n), "ragged constraint matrix");
    assert!(
        b.iter().all(|v| !v.is_negative()),
        "right-hand sides must be nonnegative"
    );

    let width = n + m;
    // rows[i] = [A_i | e_i | b_i]
    let mut rows: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(width + 1);
            row.extend(a[i].iter().cloned());
            row.extend((0..m).map(|j| if i == j { crate::exact::one() } else { Rational::zero() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    // reduced costs; objective value in the last slot
    let mut obj: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
    obj.extend((0..=m).map(|_| Rational::zero()));
    let mut basis: Vec<usize> = (n..width).collect();
    let mut pivots = 0;

    while let Some(enter) = (0..width).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in rows.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return LpOutcome::Unbounded;
        };

        let pivot = rows[r][enter].clone();
        for v in rows[r].iter_mut() {
            *v /= &pivot;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * p;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (v, p) in obj.iter_mut().zip(&pivot_row) {
                *v -= &f * p;
            }
        }
        basis[r] = enter;
        pivots += 1;
    }

    let mut primal = vec![Rational::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            primal[var] = rows[i][width].clone();
        }
    }
    let dual = obj[n..width].to_vec();
    LpOutcome::Optimal(LpSolution {
        value: obj[width].clone(),
        primal,
        dual,
        pivots,
    })
}
