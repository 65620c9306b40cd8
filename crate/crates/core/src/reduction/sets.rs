//! The power sets `A_alpha` and `K_alpha`.

use std::collections::{BTreeSet, VecDeque};

use super::cone::ConeSigma;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{basis_upto, of_degree, MultiIndex, DEGREE_BUDGET};
use crate::spectral::SpectralDecomposition;

#[derive(Debug, Clone)]
pub struct PowerSets {
    pub alpha: MultiIndex,
    /// Indices `k` contributing a generator `delta_k - delta_{k-1}` to `D_alpha`.
    pub generators: Vec<usize>,
    /// `A_alpha`, ascending.
    pub a: Vec<MultiIndex>,
    /// `K_alpha`, ascending.
    pub k: Vec<MultiIndex>,
}

/// `(alpha - D_alpha)` intersected with the nonnegative integer vectors.
///
/// Single generator steps suffice: subtracting the generators of one Jordan
/// chain from the top index down never leaves the orthant before the end.
pub fn a_set<F: Field>(alpha: &MultiIndex, dec: &SpectralDecomposition<F>) -> Vec<MultiIndex> {
    let gens: Vec<usize> = (0..dec.dim()).filter(|&k| dec.chained[k]).collect();
    let mut seen = BTreeSet::from([alpha.clone()]);
    let mut queue = VecDeque::from([alpha.clone()]);
    while let Some(cur) = queue.pop_front() {
        for &k in &gens {
            if cur.entries()[k] == 0 {
                continue;
            }
            let mut e = cur.entries().to_vec();
            e[k] -= 1;
            e[k - 1] += 1;
            let next = MultiIndex::new(e);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().collect()
}

/// Whether `beta` lies in `A - Sigma` for the given set `A`.
pub fn in_a_minus_sigma(beta: &MultiIndex, a: &[MultiIndex], cone: &ConeSigma) -> bool {
    a.iter().any(|a| cone.contains_int(&a.diff(beta)))
}

/// `(A_alpha - Sigma)` intersected with the nonnegative integer vectors. Every
/// element has degree at most `|alpha|` because `delta_empty^*` is the total.
pub fn a_minus_sigma_nonneg(alpha: &MultiIndex, a: &[MultiIndex]) -> Vec<MultiIndex> {
    let cone = ConeSigma::new(alpha.dim());
    (0..=alpha.degree())
        .flat_map(|d| of_degree(alpha.dim(), d))
        .filter(|b| in_a_minus_sigma(b, a, &cone))
        .collect()
}

/// Whether two values of `<lambda, .>` coincide (exactly, or within `tol`).
pub fn resonant<F: Field>(a: &F, b: &F, tol: f64) -> bool {
    a.approx_eq(b, tol)
}

pub fn compute_power_sets<F: Field>(alpha: &MultiIndex, dec: &SpectralDecomposition<F>) -> Result<PowerSets> {
    if alpha.degree() > DEGREE_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "power-set degree",
            needed: alpha.degree() as u128,
            budget: DEGREE_BUDGET as u128,
        });
    }
    let generators: Vec<usize> = (0..dec.dim()).filter(|&k| dec.chained[k]).collect();
    let a = a_set(alpha, dec);
    let cone = ConeSigma::new(alpha.dim());
    let target = alpha.weight(dec);
    let k = basis_upto(alpha)?
        .into_iter()
        .filter(|b| b != alpha)
        .filter(|b| resonant(&b.weight(dec), &target, dec.tol))
        .filter(|b| in_a_minus_sigma(b, &a, &cone))
        .collect();
    Ok(PowerSets { alpha: alpha.clone(), generators, a, k })
}
