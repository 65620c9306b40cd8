//! Exact moments by the one-step recursion
//! `E f(X_{n+1}) = E f(X_n) + E Phi(f)(X_n) / (u_1(X_0) + n)`,
//! which holds because `|X_n| = u_1(X_0) + n` is deterministic when `m = 1`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{MultiIndex, PhiOperator, Polynomial, LEAK_TOL};
use crate::spectral::SpectralDecomposition;

/// Ceiling on the number of monomials tracked by one engine.
pub const MONOMIAL_BUDGET: u128 = 200_000;

/// Ceiling on `n_max * (nonzero entries of Phi)` for one run.
pub const WORK_BUDGET: u128 = 20_000_000_000;

/// Moment recursion over the `Phi`-closure of a set of monomials.
#[derive(Debug, Clone)]
pub struct MomentEngine<F> {
    monomials: Vec<MultiIndex>,
    index: BTreeMap<MultiIndex, usize>,
    columns: Vec<Vec<(usize, F)>>,
    initial: Vec<F>,
    mass0: F,
}

impl<F: Field> MomentEngine<F> {
    /// `x0` is the initial composition of the normalized (`m = 1`) urn.
    pub fn new(dec: &SpectralDecomposition<F>, x0: &[F], seeds: impl IntoIterator<Item = MultiIndex>) -> Result<Self> {
        let phi = PhiOperator::new(dec);
        let mut images: BTreeMap<MultiIndex, Polynomial<F>> = BTreeMap::new();
        let mut pending: Vec<MultiIndex> = seeds.into_iter().collect();
        while let Some(beta) = pending.pop() {
            if images.contains_key(&beta) {
                continue;
            }
            if images.len() as u128 >= MONOMIAL_BUDGET {
                return Err(Error::BudgetExceeded { what: "moment closure", needed: images.len() as u128 + 1, budget: MONOMIAL_BUDGET });
            }
            let image = phi.apply_monomial(&beta);
            for (gamma, c) in image.terms() {
                if *gamma > beta {
                    if c.negligible(LEAK_TOL) {
                        continue;
                    }
                    return Err(Error::StabilityViolation { column: beta.to_string(), leak: gamma.to_string() });
                }
                if !images.contains_key(gamma) {
                    pending.push(gamma.clone());
                }
            }
            images.insert(beta, image);
        }
        let monomials: Vec<MultiIndex> = images.keys().cloned().collect();
        let index: BTreeMap<MultiIndex, usize> = monomials.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        let columns = images
            .iter()
            .map(|(beta, image)| {
                image
                    .terms()
                    .filter(|(g, _)| *g <= beta)
                    .map(|(g, c)| (index[g], c.clone()))
                    .collect()
            })
            .collect();
        let coords = dec.coords(x0);
        let initial = monomials
            .iter()
            .map(|b| Polynomial::monomial(b.clone()).eval_coords(&coords))
            .collect();
        Ok(MomentEngine { monomials, index, columns, initial, mass0: coords[0].clone() })
    }

    /// Engine covering every monomial of the given polynomials.
    pub fn for_polynomials(dec: &SpectralDecomposition<F>, x0: &[F], fs: &[&Polynomial<F>]) -> Result<Self> {
        let seeds: Vec<MultiIndex> = fs.iter().flat_map(|f| f.terms().map(|(a, _)| a.clone())).collect();
        Self::new(dec, x0, seeds)
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    /// Calls `visit(n, state)` for `n = 0..=n_max`, where `state[i]` is
    /// `E u^{monomials[i]}(X_n)`.
    pub fn run(&self, n_max: usize, mut visit: impl FnMut(usize, &[F])) -> Result<()> {
        let nnz: u128 = self.columns.iter().map(|c| c.len() as u128).sum();
        let work = nnz.saturating_mul(n_max as u128);
        if work > WORK_BUDGET {
            return Err(Error::BudgetExceeded { what: "moment recursion", needed: work, budget: WORK_BUDGET });
        }
        let mut state = self.initial.clone();
        visit(0, &state);
        for n in 0..n_max {
            let inv = F::one() / (self.mass0.clone() + F::from_i64(n as i64));
            // Descending, so every read of a lower monomial sees step n.
            for b in (0..state.len()).rev() {
                let drift = self.columns[b]
                    .iter()
                    .fold(F::zero(), |acc, (g, c)| acc + c.clone() * state[*g].clone());
                if !drift.is_zero() {
                    state[b] = state[b].clone() + drift * inv.clone();
                }
            }
            visit(n + 1, &state);
        }
        Ok(())
    }

    /// Coefficient vector of `f` against the tracked monomials.
    pub fn weights(&self, f: &Polynomial<F>) -> Result<Vec<(usize, F)>> {
        f.terms()
            .map(|(a, c)| {
                self.index
                    .get(a)
                    .map(|&i| (i, c.clone()))
                    .ok_or_else(|| Error::Schema(format!("monomial {a} is not tracked by this engine")))
            })
            .collect()
    }

    pub fn evaluate(weights: &[(usize, F)], state: &[F]) -> F {
        weights.iter().fold(F::zero(), |acc, (i, c)| acc + c.clone() * state[*i].clone())
    }

    /// `E f(X_n)` for `n = 0..=n_max`.
    pub fn series(&self, f: &Polynomial<F>, n_max: usize) -> Result<Vec<F>> {
        Ok(self.series_many(&[f], n_max)?.pop().unwrap_or_default())
    }

    pub fn series_many(&self, fs: &[&Polynomial<F>], n_max: usize) -> Result<Vec<Vec<F>>> {
        let weights: Vec<Vec<(usize, F)>> = fs.iter().map(|f| self.weights(f)).collect::<Result<_>>()?;
        let mut out: Vec<Vec<F>> = vec![Vec::with_capacity(n_max + 1); fs.len()];
        self.run(n_max, |_, state| {
            for (o, w) in out.iter_mut().zip(&weights) {
                o.push(Self::evaluate(w, state));
            }
        })?;
        Ok(out)
    }
}

/// `E f(X_n)` for `n = 0..=n_max` (normalized urn, initial composition `x0`).
pub fn exact_moment_series<F: Field>(
    f: &Polynomial<F>,
    n_max: usize,
    dec: &SpectralDecomposition<F>,
    x0: &[F],
) -> Result<Vec<F>> {
    MomentEngine::for_polynomials(dec, x0, &[f])?.series(f, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::decompose_exact;
    use crate::urn::{validate, UrnSpec};
    use num_rational::BigRational;

    #[test]
    fn total_mass_is_deterministic() {
        let urn = validate(&UrnSpec::from_integers(&[vec![2, 1], vec![1, 2]], &[1, 1]).unwrap()).into_result().unwrap();
        let dec = decompose_exact(&urn).unwrap().unwrap();
        let x0 = urn.normalized.x0().to_vec();
        let u1 = Polynomial::monomial(MultiIndex::delta(2, 0));
        let series = exact_moment_series(&u1, 5, &dec, &x0).unwrap();
        let start = BigRational::new(2.into(), 3.into());
        for (n, v) in series.iter().enumerate() {
            assert_eq!(*v, start.clone() + BigRational::from_integer(n.into()));
        }
        let one = Polynomial::constant(2, BigRational::from_integer(1.into()));
        assert!(exact_moment_series(&one, 5, &dec, &x0).unwrap().iter().all(|v| *v == BigRational::from_integer(1.into())));
    }
}
