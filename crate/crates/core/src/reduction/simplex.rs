//! Phase-I simplex for `A y = b, y >= 0` in exact arithmetic.

use crate::field::Field;

/// A point `y >= 0` with `A y = b`, or `None` if the system is infeasible.
///
/// Bland's rule keeps the method finite; with an exact field the answer is
/// exact as well.
pub fn feasible_point<F: Field + PartialOrd>(a: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m;

    // Tableau rows: [A | I | b] with b >= 0.
    let mut t: Vec<Vec<F>> = (0..m)
        .map(|i| {
            let flip = b[i] < F::zero();
            let sign = |v: F| if flip { -v } else { v };
            let mut row: Vec<F> = a[i].iter().cloned().map(sign).collect();
            row.extend((0..m).map(|k| if k == i { F::one() } else { F::zero() }));
            row.push(sign(b[i].clone()));
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..width).collect();
    let cost = |j: usize| if j >= n { F::one() } else { F::zero() };

    loop {
        let entering = (0..width).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let reduced = (0..m).fold(cost(j), |acc, i| acc - cost(basis[i]) * t[i][j].clone());
            reduced < F::zero()
        });
        let Some(j) = entering else { break };

        let mut leave: Option<(usize, F)> = None;
        for i in 0..m {
            if t[i][j] > F::zero() {
                let ratio = t[i][width].clone() / t[i][j].clone();
                let better = match &leave {
                    None => true,
                    Some((l, r)) => ratio < *r || (ratio == *r && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // The phase-I objective is bounded below, so a pivot row always exists.
        let (r, _) = leave?;
        let pivot = t[r][j].clone();
        for v in t[r].iter_mut() {
            *v = v.clone() / pivot.clone();
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[j].is_zero() {
                let f = row[j].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
        }
        basis[r] = j;
    }

    let infeasible = (0..m).any(|i| basis[i] >= n && t[i][width] > F::zero());
    if infeasible {
        return None;
    }
    let mut y = vec![F::zero(); n];
    for i in 0..m {
        if basis[i] < n {
            y[basis[i]] = t[i][width].clone();
        }
    }
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn finds_nonnegative_solution() {
        let a = vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]];
        let b = vec![q(2), q(3)];
        let y = feasible_point(&a, &b).unwrap();
        assert!(y.iter().all(|v| *v >= q(0)));
        assert_eq!(y[0].clone() + y[1].clone(), q(2));
        assert_eq!(y[1].clone() + y[2].clone(), q(3));
    }

    #[test]
    fn detects_infeasibility() {
        let a = vec![vec![q(1), q(1)]];
        assert!(feasible_point(&a, &[q(-1)]).is_none());
    }
}
