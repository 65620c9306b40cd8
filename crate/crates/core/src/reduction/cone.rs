//! The cone `Sigma` spanned by the edges `2 delta_i - delta_j` (`i != j`),
//! equivalently cut out by the functionals
//! `delta_I^*(x) = sum_i x_i + sum_{i in I} x_i >= 0` over all subsets `I`.
//!
//! For `s = 1` there are no edges and the edge cone is `{0}`, while the face
//! description gives the half-line `x >= 0`; the two agree for `s >= 2`.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::simplex::feasible_point;
use crate::field::ratio_from_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeSigma {
    s: usize,
}

/// Witness for a membership decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Certificate {
    /// Nonnegative coefficients on the edges `(i, j)`, meaning `2 delta_i - delta_j`.
    Member { coefficients: Vec<((usize, usize), String)> },
    /// A subset `I` with `delta_I^*(x) < 0`.
    Outside { face: Vec<usize>, value: String },
}

impl ConeSigma {
    pub fn new(s: usize) -> Self {
        ConeSigma { s }
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let s = self.s;
        (0..s).flat_map(|i| (0..s).filter(move |&j| j != i).map(move |j| (i, j))).collect()
    }

    pub fn edge_vector(&self, (i, j): (usize, usize)) -> Vec<i64> {
        let mut e = vec![0; self.s];
        e[i] += 2;
        e[j] -= 1;
        e
    }

    /// `delta_I^*(x)`.
    pub fn face_value(&self, face: &[usize], x: &[BigRational]) -> BigRational {
        let total: BigRational = x.iter().sum();
        face.iter().fold(total, |acc, &i| acc + &x[i])
    }

    /// The subset minimizing `delta_I^*(x)`: the coordinates where `x` is negative.
    pub fn tightest_face(&self, x: &[BigRational]) -> (Vec<usize>, BigRational) {
        let face: Vec<usize> = (0..self.s).filter(|&i| x[i].is_negative()).collect();
        let value = self.face_value(&face, x);
        (face, value)
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        !self.tightest_face(x).1.is_negative()
    }

    pub fn contains_int(&self, x: &[i64]) -> bool {
        let total: i64 = x.iter().sum();
        let negative: i64 = x.iter().filter(|v| **v < 0).sum();
        total + negative >= 0
    }

    pub fn contains_f64(&self, x: &[f64]) -> bool {
        let exact: Vec<BigRational> = x.iter().map(|v| ratio_from_f64(*v)).collect();
        self.contains(&exact)
    }

    /// Nonnegative edge coefficients reproducing `x`, found by linear
    /// feasibility without reference to the faces.
    pub fn edge_combination(&self, x: &[BigRational]) -> Option<Vec<((usize, usize), BigRational)>> {
        let edges = self.edges();
        let a: Vec<Vec<BigRational>> = (0..self.s)
            .map(|row| {
                edges
                    .iter()
                    .map(|&e| BigRational::from_integer(self.edge_vector(e)[row].into()))
                    .collect()
            })
            .collect();
        let y = feasible_point(&a, x)?;
        Some(edges.into_iter().zip(y).filter(|(_, c)| !c.is_zero()).collect())
    }

    pub fn certificate(&self, x: &[BigRational]) -> Certificate {
        match self.edge_combination(x) {
            Some(coeffs) => Certificate::Member {
                coefficients: coeffs.into_iter().map(|(e, c)| (e, c.to_string())).collect(),
            },
            None => {
                let (face, value) = self.tightest_face(x);
                Certificate::Outside { face, value: value.to_string() }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&n| BigRational::from_integer(n.into())).collect()
    }

    #[test]
    fn edges_are_members() {
        let c = ConeSigma::new(3);
        for e in c.edges() {
            let x = c.edge_vector(e);
            assert!(c.contains_int(&x));
            assert!(c.contains(&q(&x)));
            assert!(c.edge_combination(&q(&x)).is_some());
        }
    }

    #[test]
    fn negative_unit_is_outside() {
        let c = ConeSigma::new(2);
        let x = q(&[-1, 0]);
        assert!(!c.contains(&x));
        assert_eq!(c.tightest_face(&x), (vec![0], BigRational::from_integer((-2).into())));
        assert!(matches!(c.certificate(&x), Certificate::Outside { .. }));
    }

    #[test]
    fn every_edge_satisfies_every_face() {
        let c = ConeSigma::new(4);
        for e in c.edges() {
            let x = q(&c.edge_vector(e));
            for mask in 0u32..16 {
                let face: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
                assert!(!c.face_value(&face, &x).is_negative());
            }
        }
    }

    #[test]
    fn one_color_cone_is_trivial() {
        let c = ConeSigma::new(1);
        assert!(c.edge_combination(&q(&[0])).is_some());
        assert!(c.edge_combination(&q(&[1])).is_none());
        assert!(c.contains(&q(&[1])));
    }
}
