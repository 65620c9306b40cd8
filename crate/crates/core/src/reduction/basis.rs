//! Reduced polynomials `Q_beta` for every `beta` up to a cap.
//!
//! `Phi` is triangular on the monomials in the degree-antialphabetic order,
//! with diagonal `<lambda, beta>`. Positions are processed in ascending order:
//! `(Phi - d_beta) u^beta` is rewritten in the `Q` basis built so far, the
//! components on other eigenvalues are removed by back-substitution through
//! the triangular system, and what remains is the nilpotent action of
//! `Phi - d_beta` on the generalized eigenspace. Everything is exact when the
//! field is.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{basis_upto, MultiIndex, PhiOperator, Polynomial};
use crate::spectral::SpectralDecomposition;

/// Two diagonal values closer than `AMBIGUITY_FACTOR * tol` but farther than
/// `tol` are reported instead of being silently split.
pub const AMBIGUITY_FACTOR: f64 = 100.0;

/// Float-mode threshold below which an iterate of `Phi - d` counts as zero.
pub const NILPOTENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ReducedPolynomial<F> {
    pub alpha: MultiIndex,
    pub q: Polynomial<F>,
    pub nu: usize,
    pub eigenvalue: F,
}

#[derive(Debug, Clone)]
pub struct ReducedBasis<F> {
    positions: Vec<MultiIndex>,
    index: BTreeMap<MultiIndex, usize>,
    diag: Vec<F>,
    cluster: Vec<usize>,
    /// `q[p]`: `Q_p` in monomial coordinates, ascending, ending with `(p, 1)`.
    q: Vec<Vec<(usize, F)>>,
    /// `nil[p]`: `(Phi - d_p) Q_p` in `Q` coordinates.
    nil: Vec<Vec<(usize, F)>>,
    phi: PhiOperator<F>,
    tol: f64,
}

impl<F: Field> ReducedBasis<F> {
    /// Builds `Q_beta` for all `beta <= cap`.
    pub fn new(dec: &SpectralDecomposition<F>, cap: &MultiIndex) -> Result<Self> {
        let positions = basis_upto(cap)?;
        let index = positions.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        let diag: Vec<F> = positions.iter().map(|b| b.weight(dec)).collect();
        let cluster = cluster_values(&diag, dec.tol)?;
        let mut basis = ReducedBasis {
            positions,
            index,
            diag,
            cluster,
            q: Vec::new(),
            nil: Vec::new(),
            phi: PhiOperator::new(dec),
            tol: dec.tol,
        };
        for p in 0..basis.positions.len() {
            basis.extend(p)?;
        }
        Ok(basis)
    }

    /// All monomials of total degree at most `degree`.
    pub fn up_to_degree(dec: &SpectralDecomposition<F>, degree: u32) -> Result<Self> {
        let mut cap = vec![0; dec.dim()];
        if let Some(last) = cap.last_mut() {
            *last = degree;
        }
        Self::new(dec, &MultiIndex::new(cap))
    }

    fn extend(&mut self, p: usize) -> Result<()> {
        let beta = self.positions[p].clone();
        let d = self.diag[p].clone();
        let mut t: BTreeMap<usize, F> = BTreeMap::new();
        for (gamma, c) in self.phi.apply_monomial(&beta).terms() {
            let pos = *self.index.get(gamma).ok_or_else(|| Error::StabilityViolation {
                column: beta.to_string(),
                leak: gamma.to_string(),
            })?;
            if pos > p && !c.negligible(crate::poly::LEAK_TOL) {
                return Err(Error::StabilityViolation { column: beta.to_string(), leak: gamma.to_string() });
            }
            if pos < p {
                t.insert(pos, c.clone());
            }
            // At pos == p the coefficient is d itself and cancels.
        }
        let s = self.to_q_coords_map(t);

        let mut residual: BTreeMap<usize, F> = BTreeMap::new();
        let mut own: Vec<(usize, F)> = Vec::new();
        for (g, v) in s {
            if self.cluster[g] == self.cluster[p] {
                own.push((g, v));
            } else {
                residual.insert(g, v);
            }
        }
        let mut q: BTreeMap<usize, F> = BTreeMap::from([(p, F::one())]);
        while let Some((g, r)) = residual.pop_last() {
            let c = -r / (self.diag[g].clone() - d.clone());
            for (delta, v) in &self.nil[g] {
                add_into(&mut residual, *delta, c.clone() * v.clone());
            }
            for (m, v) in &self.q[g] {
                add_into(&mut q, *m, c.clone() * v.clone());
            }
        }
        self.q.push(q.into_iter().collect());
        self.nil.push(own);
        Ok(())
    }

    fn to_q_coords_map(&self, mut work: BTreeMap<usize, F>) -> BTreeMap<usize, F> {
        let mut out = BTreeMap::new();
        while let Some((g, v)) = work.pop_last() {
            for (m, c) in &self.q[g] {
                if *m < g {
                    add_into(&mut work, *m, -(v.clone() * c.clone()));
                }
            }
            out.insert(g, v);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[MultiIndex] {
        &self.positions
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    pub fn phi(&self) -> &PhiOperator<F> {
        &self.phi
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn require(&self, alpha: &MultiIndex) -> Result<usize> {
        self.position(alpha).ok_or_else(|| Error::BudgetExceeded {
            what: "reduced basis cap",
            needed: alpha.degree() as u128,
            budget: self.positions.last().map_or(0, MultiIndex::degree) as u128,
        })
    }

    pub fn q_poly(&self, alpha: &MultiIndex) -> Result<Polynomial<F>> {
        let p = self.require(alpha)?;
        Ok(self.q_at(p))
    }

    fn q_at(&self, p: usize) -> Polynomial<F> {
        let s = self.positions[p].dim();
        Polynomial::from_terms(s, self.q[p].iter().map(|(m, c)| (self.positions[*m].clone(), c.clone())))
    }

    /// `Q_alpha` in monomial coordinates, as `(beta, q_{beta})` pairs.
    pub fn q_coeffs(&self, alpha: &MultiIndex) -> Result<Vec<(MultiIndex, F)>> {
        let p = self.require(alpha)?;
        Ok(self.q[p].iter().map(|(m, c)| (self.positions[*m].clone(), c.clone())).collect())
    }

    /// Nilpotence index of `Q_alpha` for `Phi - <lambda, alpha>`, from the
    /// stored action of `Phi - d` on the `Q` basis.
    pub fn nu(&self, alpha: &MultiIndex) -> Result<usize> {
        let p = self.require(alpha)?;
        Ok(self.nu_at(p))
    }

    fn nu_at(&self, p: usize) -> usize {
        let mut vec: BTreeMap<usize, F> = BTreeMap::from([(p, F::one())]);
        let mut count = 0;
        loop {
            let mut next: BTreeMap<usize, F> = BTreeMap::new();
            for (g, v) in &vec {
                for (delta, c) in &self.nil[*g] {
                    add_into(&mut next, *delta, v.clone() * c.clone());
                }
            }
            next.retain(|_, v| !v.negligible(NILPOTENT_TOL));
            if next.is_empty() {
                return count;
            }
            count += 1;
            vec = next;
        }
    }

    pub fn reduced(&self, alpha: &MultiIndex) -> Result<ReducedPolynomial<F>> {
        let p = self.require(alpha)?;
        Ok(ReducedPolynomial {
            alpha: alpha.clone(),
            q: self.q_at(p),
            nu: self.nu_at(p),
            eigenvalue: self.diag[p].clone(),
        })
    }

    /// Coordinates of a polynomial of `S_cap` in the `Q` basis.
    pub fn to_q_coords(&self, f: &Polynomial<F>) -> Result<Vec<(MultiIndex, F)>> {
        let mut work = BTreeMap::new();
        for (m, c) in f.terms() {
            let pos = self.require(m)?;
            work.insert(pos, c.clone());
        }
        Ok(self
            .to_q_coords_map(work)
            .into_iter()
            .filter(|(_, v)| !v.negligible(crate::poly::PRUNE_TOL))
            .map(|(g, v)| (self.positions[g].clone(), v))
            .collect())
    }

    /// Expansion of `(Phi - <lambda, alpha>) Q_alpha` in the `Q` basis,
    /// recomputed by applying `Phi` to the polynomial `Q_alpha`.
    pub fn expansion(&self, alpha: &MultiIndex) -> Result<Vec<(MultiIndex, F)>> {
        let p = self.require(alpha)?;
        let q = self.q_at(p);
        let image = self.phi.apply(&q).sub(&q.scale(&self.diag[p]));
        self.to_q_coords(&image)
    }

    /// True when the matrix with columns `Q_beta` (monomial coordinates) is
    /// unit upper triangular in the order.
    pub fn is_unit_triangular(&self) -> bool {
        self.q.iter().enumerate().all(|(p, col)| {
            col.last().is_some_and(|(m, c)| *m == p && *c == F::one()) && col.iter().all(|(m, _)| *m <= p)
        })
    }

    /// `||T||_inf * ||T^{-1}||_inf` for the change-of-basis matrix `T`.
    pub fn condition(&self) -> f64 {
        let n = self.len();
        let mut rows = vec![0.0f64; n];
        for col in &self.q {
            for (m, c) in col {
                rows[*m] += c.modulus();
            }
        }
        let norm = rows.iter().cloned().fold(0.0, f64::max);
        // Columns of T^{-1}: u^beta in Q coordinates.
        let mut inv_rows = vec![0.0f64; n];
        for p in 0..n {
            let coords = self.to_q_coords_map(BTreeMap::from([(p, F::one())]));
            for (g, v) in coords {
                inv_rows[g] += v.modulus();
            }
        }
        norm * inv_rows.iter().cloned().fold(0.0, f64::max)
    }
}

fn add_into<F: Field>(map: &mut BTreeMap<usize, F>, key: usize, value: F) {
    let entry = map.entry(key).or_insert_with(F::zero);
    *entry = entry.clone() + value;
    if entry.negligible(crate::poly::PRUNE_TOL) {
        map.remove(&key);
    }
}

/// Cluster labels for the diagonal values, failing on values that sit in the
/// band between "equal" and "clearly distinct".
fn cluster_values<F: Field>(values: &[F], tol: f64) -> Result<Vec<usize>> {
    let mut reps: Vec<F> = Vec::new();
    let mut labels = Vec::with_capacity(values.len());
    let mut ambiguous = Vec::new();
    for v in values {
        let mut label = None;
        for (i, r) in reps.iter().enumerate() {
            let dist = (v.clone() - r.clone()).modulus();
            if v.approx_eq(r, tol) {
                label = Some(i);
                break;
            }
            if !F::EXACT && dist <= tol * AMBIGUITY_FACTOR {
                ambiguous.push((format!("{:?}", v.to_complex()), format!("{:?}", r.to_complex()), dist));
            }
        }
        labels.push(label.unwrap_or_else(|| {
            reps.push(v.clone());
            reps.len() - 1
        }));
    }
    if ambiguous.is_empty() {
        Ok(labels)
    } else {
        ambiguous.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        Err(Error::ResonanceAmbiguity { pairs: ambiguous })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::decompose_exact;
    use crate::urn::{validate, UrnSpec};
    use num_rational::BigRational;

    fn dec(r: &[Vec<i64>], x0: &[i64]) -> SpectralDecomposition<BigRational> {
        let urn = validate(&UrnSpec::from_integers(r, x0).unwrap()).into_result().unwrap();
        decompose_exact(&urn).unwrap().unwrap()
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn perron_powers_are_rising_products() {
        let d = dec(&[vec![2, 1], vec![1, 2]], &[1, 1]);
        let basis = ReducedBasis::new(&d, &mi(&[0, 4])).unwrap();
        for c in 1..=4u32 {
            let alpha = mi(&[c, 0]);
            let r = basis.reduced(&alpha).unwrap();
            let mut expected = Polynomial::constant(2, q(1));
            for i in 0..c as i64 {
                let factor = Polynomial::from_terms(2, [(mi(&[1, 0]), q(1)), (mi(&[0, 0]), q(i))]);
                expected = expected.mul(&factor);
            }
            assert_eq!(r.q, expected);
            assert_eq!(r.nu, 0);
        }
    }

    #[test]
    fn linear_eigenfunctions_are_their_own_reduction() {
        let d = dec(&[vec![2, 1], vec![1, 2]], &[1, 1]);
        let basis = ReducedBasis::new(&d, &mi(&[0, 1])).unwrap();
        let r = basis.reduced(&mi(&[0, 1])).unwrap();
        assert_eq!(r.q, Polynomial::monomial(mi(&[0, 1])));
        assert_eq!(r.nu, 0);
        assert!(basis.is_unit_triangular());
    }

    #[test]
    fn critical_square_has_index_one() {
        let d = dec(&[vec![3, 1], vec![1, 3]], &[1, 1]);
        let basis = ReducedBasis::new(&d, &mi(&[0, 2])).unwrap();
        assert_eq!(basis.nu(&mi(&[0, 2])).unwrap(), 1);
        let exp = basis.expansion(&mi(&[0, 2])).unwrap();
        assert_eq!(exp.iter().map(|(b, _)| b.clone()).collect::<Vec<_>>(), vec![mi(&[1, 0])]);
    }

    #[test]
    fn float_and_exact_agree() {
        let d = dec(&[vec![2, 1, 0, 1], vec![0, 3, 0, 1], vec![1, 0, 3, 0], vec![0, 1, 2, 1]], &[1, 1, 1, 1]);
        let exact = ReducedBasis::up_to_degree(&d, 3).unwrap();
        let fl = ReducedBasis::up_to_degree(&d.to_complex(), 3).unwrap();
        for alpha in exact.positions() {
            assert_eq!(exact.nu(alpha).unwrap(), fl.nu(alpha).unwrap(), "{alpha}");
        }
    }
}
