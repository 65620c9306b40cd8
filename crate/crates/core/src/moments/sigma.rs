//! Second moments: covariance of `X_n`, variance of linear observables and
//! the normalized covariance estimate.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use super::engine::MomentEngine;
use super::growth::log_factor;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{MultiIndex, Polynomial};
use crate::spectral::{SpectralDecomposition, UrnClass, UrnKind};

/// `Var(Y_n)` below this fraction of `E Y_n^2` counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// `Y = scale * sum_k w_k l_k` as a polynomial in the `u`-coordinates.
pub fn observable<F: Field>(dec: &SpectralDecomposition<F>, w: &[F], scale: &F) -> Polynomial<F> {
    let s = dec.dim();
    let coeffs: Vec<F> = (0..s)
        .map(|i| (0..s).fold(F::zero(), |acc, k| acc + w[k].clone() * dec.color_of(k, i).clone()) * scale.clone())
        .collect();
    Polynomial::linear(&coeffs)
}

/// `(E Y_n, Var Y_n)` for `n = 0..=n_max`, with `Y = scale * <w, X>` and the
/// variance taken as `E Y^2 - (E Y)^2` without shortcuts.
pub fn observable_moments<F: Field>(
    dec: &SpectralDecomposition<F>,
    x0: &[F],
    w: &[F],
    scale: &F,
    n_max: usize,
) -> Result<Vec<(F, F)>> {
    let y = observable(dec, w, scale);
    let y2 = y.mul(&y);
    let engine = MomentEngine::for_polynomials(dec, x0, &[&y, &y2])?;
    let mut series = engine.series_many(&[&y, &y2], n_max)?;
    let second = series.pop().unwrap_or_default();
    let first = series.pop().unwrap_or_default();
    Ok(first
        .into_iter()
        .zip(second)
        .map(|(m1, m2)| {
            let var = m2 - m1.clone() * m1.clone();
            (m1, var)
        })
        .collect())
}

/// Covariance of the color vector of the normalized urn at each `n` in `ns`
/// (ascending), as `V Cov(u) V^T`.
pub fn color_covariance<F: Field>(
    dec: &SpectralDecomposition<F>,
    x0: &[F],
    ns: &[usize],
) -> Result<Vec<Vec<Vec<F>>>> {
    let s = dec.dim();
    let firsts: Vec<Polynomial<F>> = (0..s).map(|i| Polynomial::monomial(MultiIndex::delta(s, i))).collect();
    let mut seconds = Vec::new();
    for i in 0..s {
        for j in i..s {
            seconds.push(Polynomial::monomial(MultiIndex::delta(s, i).plus_delta(j)));
        }
    }
    let all: Vec<&Polynomial<F>> = firsts.iter().chain(&seconds).collect();
    let engine = MomentEngine::for_polynomials(dec, x0, &all)?;
    let weights: Vec<_> = all.iter().map(|p| engine.weights(p)).collect::<Result<_>>()?;
    let n_max = ns.last().copied().unwrap_or(0);
    let mut out = Vec::with_capacity(ns.len());
    let mut next = 0;
    engine.run(n_max, |n, state| {
        while next < ns.len() && ns[next] == n {
            let value = |k: usize| MomentEngine::evaluate(&weights[k], state);
            let mean: Vec<F> = (0..s).map(value).collect();
            let mut cov_u = vec![vec![F::zero(); s]; s];
            let mut k = s;
            for i in 0..s {
                for j in i..s {
                    let c = value(k) - mean[i].clone() * mean[j].clone();
                    cov_u[i][j] = c.clone();
                    cov_u[j][i] = c;
                    k += 1;
                }
            }
            out.push(to_colors(dec, &cov_u));
            next += 1;
        }
    })?;
    Ok(out)
}

fn to_colors<F: Field>(dec: &SpectralDecomposition<F>, cov_u: &[Vec<F>]) -> Vec<Vec<F>> {
    let s = dec.dim();
    let mut out = vec![vec![F::zero(); s]; s];
    for a in 0..s {
        for b in 0..s {
            let mut acc = F::zero();
            for i in 0..s {
                for j in 0..s {
                    acc = acc + dec.color_of(a, i).clone() * dec.color_of(b, j).clone() * cov_u[i][j].clone();
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceEstimate {
    /// `Cov(X_n) / (n log^nu n)` in the user's units at `n`.
    pub sigma: Vec<Vec<f64>>,
    /// The same at `n / 2`.
    pub sigma_half: Vec<Vec<f64>>,
    pub nu: usize,
    pub n: usize,
    /// `||sigma - sigma_half||_F / ||sigma||_F`.
    pub relative_change: f64,
    pub min_eigenvalue: f64,
    pub max_abs_imaginary: f64,
}

/// Normalized covariance from exact second moments at `n_max` and `n_max / 2`.
pub fn estimate_sigma(
    dec: &SpectralDecomposition<Complex64>,
    x0: &[Complex64],
    class: &UrnClass,
    scale: f64,
    n_max: usize,
) -> Result<CovarianceEstimate> {
    if class.kind == UrnKind::Large {
        return Err(Error::NotSmall { class: "Large".into() });
    }
    let half = (n_max / 2).max(1);
    let covs = color_covariance(dec, x0, &[half, n_max])?;
    let nu = class.nu;
    let mut max_imag: f64 = 0.0;
    let mut normalize = |cov: &Vec<Vec<Complex64>>, n: usize| -> Vec<Vec<f64>> {
        let denom = n as f64 * log_factor(n, nu as f64);
        cov.iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        max_imag = max_imag.max(c.im.abs() * scale * scale / denom);
                        c.re * scale * scale / denom
                    })
                    .collect()
            })
            .collect()
    };
    let sigma_half = normalize(&covs[0], half);
    let sigma = normalize(&covs[1], n_max);
    let frob = |m: &Vec<Vec<f64>>| m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let diff: Vec<Vec<f64>> = sigma
        .iter()
        .zip(&sigma_half)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
        .collect();
    let norm = frob(&sigma);
    let relative_change = if norm > 0.0 { frob(&diff) / norm } else { 0.0 };
    let s = sigma.len();
    let sym = DMatrix::from_fn(s, s, |i, j| 0.5 * (sigma[i][j] + sigma[j][i]));
    let min_eigenvalue = SymmetricEigen::new(sym).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(CovarianceEstimate { sigma, sigma_half, nu, n: n_max, relative_change, min_eigenvalue, max_abs_imaginary: max_imag })
}

/// `gamma = Var(Y_n) / (n log^nu n)` for `Y = <w, X>` in user units, or
/// zero when the variance is negligible against `E Y_n^2`.
pub fn direction_variance(
    dec: &SpectralDecomposition<Complex64>,
    x0: &[Complex64],
    class: &UrnClass,
    w: &[f64],
    scale: f64,
    n: usize,
) -> Result<f64> {
    let wc: Vec<Complex64> = w.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let moments = observable_moments(dec, x0, &wc, &Complex64::new(scale, 0.0), n)?;
    let (mean, var) = moments[n];
    let second = var.re + mean.norm_sqr();
    if var.re <= DEGENERACY_TOL * second.abs().max(f64::MIN_POSITIVE) {
        return Ok(0.0);
    }
    Ok(var.re / (n.max(1) as f64 * log_factor(n, class.nu as f64)))
}
