//! Enumerated checks of the structural statements about `A_alpha`, `Sigma`,
//! `K_alpha` and the nilpotence indices.

use std::cmp::Ordering;

use serde::Serialize;

use super::basis::ReducedBasis;
use super::cone::ConeSigma;
use super::sets::{a_minus_sigma_nonneg, a_set, compute_power_sets, in_a_minus_sigma};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{of_degree, MultiIndex};
use crate::spectral::{EigenKind, JordanBlock, SpectralDecomposition};

/// Coefficients below this modulus count as absent in expansions.
pub const SUPPORT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl CheckReport {
    fn new(name: impl Into<String>) -> Self {
        CheckReport { name: name.into(), checked: 0, violations: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

/// `M(gamma) = sum_{k in J} (k - start(J) + 1/2) gamma_k` for `gamma`
/// supported on the Perron index and the block `J`.
pub fn m_functional<F>(gamma: &[i64], block: &JordanBlock<F>) -> Result<f64> {
    let mut total = 0.0;
    for (k, &g) in gamma.iter().enumerate() {
        if g == 0 || k == 0 {
            continue;
        }
        if !block.contains(k) {
            return Err(Error::UnsupportedSupport {
                gamma: format!("{gamma:?}"),
                block: format!("{}..{}", block.start + 1, block.start + block.size),
            });
        }
        total += ((k - block.start) as f64 + 0.5) * g as f64;
    }
    Ok(total)
}

fn as_signed(alpha: &MultiIndex) -> Vec<i64> {
    alpha.entries().iter().map(|&a| a as i64).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub alpha: String,
    /// Multi-indices carrying a coefficient in `(Phi - <lambda,alpha>) Q_alpha`.
    pub support: Vec<String>,
    pub outside_k: Vec<String>,
    /// Support elements that are not below `alpha` with the same eigenvalue.
    pub outside_resonant: Vec<String>,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.outside_k.is_empty() && self.outside_resonant.is_empty()
    }
}

/// Expands `(Phi - <lambda,alpha>) Q_alpha` in the `Q` basis and checks its
/// support against `K_alpha` and against `{beta < alpha : <lambda,beta> = <lambda,alpha>}`.
pub fn verify_stability<F: Field>(
    basis: &ReducedBasis<F>,
    alpha: &MultiIndex,
    dec: &SpectralDecomposition<F>,
) -> Result<StabilityReport> {
    let sets = compute_power_sets(alpha, dec)?;
    let target = alpha.weight(dec);
    let mut report = StabilityReport {
        alpha: alpha.to_string(),
        support: Vec::new(),
        outside_k: Vec::new(),
        outside_resonant: Vec::new(),
    };
    for (beta, c) in basis.expansion(alpha)? {
        if c.negligible(SUPPORT_TOL) {
            continue;
        }
        report.support.push(beta.to_string());
        if !sets.k.contains(&beta) {
            report.outside_k.push(beta.to_string());
        }
        if !(beta < *alpha && beta.weight(dec).approx_eq(&target, dec.tol)) {
            report.outside_resonant.push(beta.to_string());
        }
    }
    Ok(report)
}

fn re_cmp<F: Field>(a: &F, b: &F, tol: f64) -> Ordering {
    (a.clone() - b.clone()).re_sign(tol)
}

fn powers_upto(s: usize, cap: u32) -> impl Iterator<Item = MultiIndex> {
    (1..=cap).flat_map(move |d| of_degree(s, d))
}

/// For strictly small `alpha` and `beta` in `(A_alpha - Sigma)`, nonnegative:
/// `Re <lambda,beta> <= |alpha|/2`, with equality only at `beta = (|alpha|/2) delta_1`.
pub fn check_l1<F: Field>(dec: &SpectralDecomposition<F>, cap: u32) -> CheckReport {
    let mut report = CheckReport::new("strictly small powers");
    let s = dec.dim();
    for alpha in powers_upto(s, cap).filter(|a| a.is_strictly_small(dec)) {
        let half = F::from_i64(alpha.degree() as i64) / F::from_i64(2);
        let a = a_set(&alpha, dec);
        for beta in a_minus_sigma_nonneg(&alpha, &a) {
            report.checked += 1;
            match re_cmp(&beta.weight(dec), &half, dec.tol) {
                Ordering::Greater => report.fail(format!("alpha={alpha} beta={beta}: Re<l,b> > |a|/2")),
                Ordering::Equal => {
                    let expected = alpha.degree() % 2 == 0 && beta.support() == [0] && beta.entries()[0] * 2 == alpha.degree();
                    if !expected {
                        report.fail(format!("alpha={alpha} beta={beta}: equality away from c*delta_1"));
                    }
                }
                Ordering::Less => {}
            }
        }
    }
    report
}

/// For critical `alpha` and `beta` in `(A_alpha - Sigma)`, nonnegative:
/// `Re <lambda,beta> <= Re <lambda,alpha>`, with equality only for critical `beta`.
pub fn check_critical_case<F: Field>(dec: &SpectralDecomposition<F>, cap: u32) -> CheckReport {
    let mut report = CheckReport::new("critical powers");
    let s = dec.dim();
    for alpha in powers_upto(s, cap).filter(|a| a.is_critical(dec)) {
        let target = alpha.weight(dec);
        let a = a_set(&alpha, dec);
        for beta in a_minus_sigma_nonneg(&alpha, &a) {
            report.checked += 1;
            match re_cmp(&beta.weight(dec), &target, dec.tol) {
                Ordering::Greater => report.fail(format!("alpha={alpha} beta={beta}: Re<l,b> > Re<l,a>")),
                Ordering::Equal if !beta.is_critical(dec) => {
                    report.fail(format!("alpha={alpha} beta={beta}: equality with non-critical beta"))
                }
                _ => {}
            }
        }
    }
    report
}

fn critical_blocks<F: Field>(dec: &SpectralDecomposition<F>) -> Vec<&JordanBlock<F>> {
    dec.blocks.iter().filter(|b| dec.kinds[b.start] == EigenKind::Critical).collect()
}

fn quasi_monogenic_critical<'a, F: Field>(
    dec: &'a SpectralDecomposition<F>,
    cap: u32,
) -> Vec<(MultiIndex, &'a JordanBlock<F>)> {
    let blocks = critical_blocks(dec);
    powers_upto(dec.dim(), cap)
        .flat_map(|alpha| {
            blocks
                .iter()
                .filter(|b| alpha.is_quasi_monogenic_in(b))
                .map(|b| (alpha.clone(), *b))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Every `alpha'` in `A_alpha \ {alpha}` is critical, quasi-monogenic with the
/// same block, and `M(alpha') <= M(alpha) - 1`.
pub fn check_m_a_alpha<F: Field>(dec: &SpectralDecomposition<F>, cap: u32) -> CheckReport {
    let mut report = CheckReport::new("M decreases on A_alpha");
    for (alpha, block) in quasi_monogenic_critical(dec, cap) {
        let m_alpha = m_functional(&as_signed(&alpha), block).expect("support checked");
        for other in a_set(&alpha, dec).into_iter().filter(|a| *a != alpha) {
            report.checked += 1;
            if !(other.is_critical(dec) && other.is_quasi_monogenic_in(block)) {
                report.fail(format!("alpha={alpha} alpha'={other}: leaves the block"));
                continue;
            }
            let m = m_functional(&as_signed(&other), block).expect("support checked");
            if m > m_alpha - 1.0 {
                report.fail(format!("alpha={alpha} alpha'={other}: M(alpha')={m} > M(alpha)-1={}", m_alpha - 1.0));
            }
        }
    }
    report
}

/// Every `beta != alpha` in `(alpha - Sigma)`, nonnegative, with
/// `Re <lambda,beta> = Re <lambda,alpha>` is critical, quasi-monogenic with
/// the same block, and `M(beta) <= M(alpha) - 1`.
pub fn check_m_alpha_sigma<F: Field>(dec: &SpectralDecomposition<F>, cap: u32) -> CheckReport {
    let mut report = CheckReport::new("M decreases on alpha - Sigma");
    for (alpha, block) in quasi_monogenic_critical(dec, cap) {
        let m_alpha = m_functional(&as_signed(&alpha), block).expect("support checked");
        let target = alpha.weight(dec);
        for beta in a_minus_sigma_nonneg(&alpha, std::slice::from_ref(&alpha)) {
            if beta == alpha || re_cmp(&beta.weight(dec), &target, dec.tol) != Ordering::Equal {
                continue;
            }
            report.checked += 1;
            if !(beta.is_critical(dec) && beta.is_quasi_monogenic_in(block)) {
                report.fail(format!("alpha={alpha} beta={beta}: leaves the block"));
                continue;
            }
            let m = m_functional(&as_signed(&beta), block).expect("support checked");
            if m > m_alpha - 1.0 {
                report.fail(format!("alpha={alpha} beta={beta}: M(beta)={m} > M(alpha)-1"));
            }
        }
    }
    report
}

/// `nu_alpha <= M(alpha) <= (r + 1/2)|alpha|` and `nu_alpha <= (d + 1/2)|alpha|`
/// for quasi-monogenic critical powers up to degree `cap`.
pub fn check_nilpotence_bounds<F: Field>(
    basis: &ReducedBasis<F>,
    dec: &SpectralDecomposition<F>,
    cap: u32,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("nilpotence bounds");
    let d = critical_blocks(dec).iter().map(|b| b.size).max().unwrap_or(1) - 1;
    for (alpha, block) in quasi_monogenic_critical(dec, cap) {
        report.checked += 1;
        let nu = basis.nu(&alpha)? as f64;
        let m = m_functional(&as_signed(&alpha), block)?;
        let r = (block.size - 1) as f64;
        let deg = alpha.degree() as f64;
        if nu > m {
            report.fail(format!("alpha={alpha}: nu={nu} > M={m}"));
        }
        if m > (r + 0.5) * deg {
            report.fail(format!("alpha={alpha}: M={m} > (r+1/2)|alpha|"));
        }
        if nu > (d as f64 + 0.5) * deg {
            report.fail(format!("alpha={alpha}: nu={nu} > (d+1/2)|alpha|"));
        }
    }
    Ok(report)
}

/// Face and edge descriptions agree on `x`, and any edge certificate
/// reproduces `x` with nonnegative coefficients.
pub fn cone_descriptions_agree(cone: &ConeSigma, x: &[num_rational::BigRational]) -> bool {
    use num_traits::{Signed, Zero};
    let by_faces = cone.contains(x);
    match cone.edge_combination(x) {
        None => !by_faces,
        Some(coeffs) => {
            let mut sum = vec![num_rational::BigRational::zero(); cone.dim()];
            for ((i, j), c) in &coeffs {
                if c.is_negative() {
                    return false;
                }
                sum[*i] += c * num_rational::BigRational::from_integer(2.into());
                sum[*j] -= c;
            }
            by_faces && sum == x
        }
    }
}

/// Whether `beta` lies in `(A_alpha - Sigma)`.
pub fn in_f_alpha<F: Field>(alpha: &MultiIndex, beta: &MultiIndex, dec: &SpectralDecomposition<F>) -> bool {
    in_a_minus_sigma(beta, &a_set(alpha, dec), &ConeSigma::new(alpha.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::decompose_exact;
    use crate::urn::{validate, UrnSpec};
    use num_rational::BigRational;

    fn dec(r: &[Vec<i64>]) -> SpectralDecomposition<BigRational> {
        let x0 = vec![1; r.len()];
        let urn = validate(&UrnSpec::from_integers(r, &x0).unwrap()).into_result().unwrap();
        decompose_exact(&urn).unwrap().unwrap()
    }

    fn jordan4() -> SpectralDecomposition<BigRational> {
        dec(&[vec![2, 1, 0, 1], vec![0, 3, 0, 1], vec![1, 0, 3, 0], vec![0, 1, 2, 1]])
    }

    #[test]
    fn m_functional_values() {
        let d = jordan4();
        let block = &d.blocks[1];
        assert_eq!((block.start, block.size), (1, 2));
        // delta_3 - delta_2 (1-based)
        assert_eq!(m_functional(&[0, -1, 1, 0], block).unwrap(), 1.0);
        for k in 2..=3i64 {
            let mut g = vec![-1, 0, 0, 0];
            g[(k - 1) as usize] = 2;
            assert_eq!(m_functional(&g, block).unwrap(), (2 * k - 3) as f64);
        }
        assert_eq!(m_functional(&[5, 0, 0, 0], block).unwrap(), 0.0);
        assert!(matches!(m_functional(&[0, 0, 0, 1], block), Err(Error::UnsupportedSupport { .. })));
    }

    #[test]
    fn lemmas_hold_on_jordan_fixture() {
        let d = jordan4();
        for report in [check_l1(&d, 4), check_critical_case(&d, 4), check_m_a_alpha(&d, 4), check_m_alpha_sigma(&d, 4)] {
            assert!(report.passed(), "{report:?}");
            assert!(report.checked > 0, "{}", report.name);
        }
        let basis = ReducedBasis::up_to_degree(&d, 4).unwrap();
        let bounds = check_nilpotence_bounds(&basis, &d, 4).unwrap();
        assert!(bounds.passed(), "{bounds:?}");
    }

    #[test]
    fn stability_on_critical_block() {
        let d = jordan4();
        let basis = ReducedBasis::up_to_degree(&d, 3).unwrap();
        let alpha = MultiIndex::new(vec![0, 0, 2, 0]);
        let report = verify_stability(&basis, &alpha, &d).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(!report.support.is_empty());
    }
}
