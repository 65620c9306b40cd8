//! Jordan structure of the replacement operator.
//!
//! In color coordinates the replacement operator `A(v) = sum_k l_k(v) w_k`
//! has matrix `R^T`. We compute a basis `(v_k)` adapted to a Jordan
//! decomposition of `A` together with its dual basis `(u_k)`, numbered so
//! that for every `k` either `u_k o A = lambda_k u_k` (a leading index) or
//! `u_k o A = lambda_k u_k + u_{k-1}` (a chained index). Equivalently the
//! columns `u_k^T` are ordinary Jordan chains of `R`, leading eigenvector
//! first. `u_1` is the all-ones covector and `v_1` the Perron vector of `R^T`
//! normalized to total mass one.

use std::cmp::Ordering;
use std::ops::Range;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{invert, mat_mul, max_modulus, Field};
use crate::urn::NormalizedUrn;

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    /// Eigenvalues closer than this (after `m = 1` normalization) are one cluster.
    pub eigen_tol: f64,
    /// Relative singular-value threshold for rank decisions.
    pub rank_tol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { eigen_tol: 1e-7, rank_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EigenKind {
    Perron,
    Large,
    Critical,
    StrictlySmall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanBlock<F> {
    pub eigenvalue: F,
    pub start: usize,
    pub size: usize,
}

impl<F> JordanBlock<F> {
    pub fn indices(&self) -> Range<usize> {
        self.start..self.start + self.size
    }

    pub fn contains(&self, k: usize) -> bool {
        self.indices().contains(&k)
    }
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition<F> {
    pub eigenvalues: Vec<F>,
    pub blocks: Vec<JordanBlock<F>>,
    /// Rows are the covectors `u_k` in color coordinates.
    pub u: Vec<Vec<F>>,
    /// `v[k]` is the vector `v_k` in color coordinates.
    pub v: Vec<Vec<F>>,
    /// `chained[k]` iff `u_k o A = lambda_k u_k + u_{k-1}`.
    pub chained: Vec<bool>,
    pub kinds: Vec<EigenKind>,
    /// Tolerance for eigenvalue comparisons (ignored when `F` is exact).
    pub tol: f64,
    /// `increments[k][j] = u_j(w_k)`.
    pub increments: Vec<Vec<F>>,
    /// Normalized replacement matrix, rows `w_k`.
    pub replacement: Vec<Vec<F>>,
}

impl<F: Field> SpectralDecomposition<F> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `l_k(v_j)`, the color-`k` coordinate of `v_j`.
    pub fn color_of(&self, k: usize, j: usize) -> &F {
        &self.v[j][k]
    }

    /// Coordinates `u_j(x)` of a color vector.
    pub fn coords(&self, x: &[F]) -> Vec<F> {
        self.u
            .iter()
            .map(|row| row.iter().zip(x).fold(F::zero(), |a, (p, q)| a + p.clone() * q.clone()))
            .collect()
    }

    pub fn block_of(&self, k: usize) -> &JordanBlock<F> {
        self.blocks.iter().find(|b| b.contains(k)).expect("every index lies in a block")
    }

    pub fn critical_blocks(&self) -> impl Iterator<Item = &JordanBlock<F>> {
        self.blocks.iter().filter(|b| self.kinds[b.start] == EigenKind::Critical)
    }

    /// `<lambda, alpha> = sum_k alpha_k lambda_k`.
    pub fn weight(&self, alpha: &[u32]) -> F {
        alpha
            .iter()
            .zip(&self.eigenvalues)
            .filter(|(a, _)| **a != 0)
            .fold(F::zero(), |acc, (&a, l)| acc + F::from_i64(a as i64) * l.clone())
    }

    /// Residuals of the chain relations `u_k o A - lambda_k u_k (- u_{k-1})`.
    pub fn chain_residual(&self) -> f64 {
        let s = self.dim();
        let mut worst: f64 = 0.0;
        for k in 0..s {
            for i in 0..s {
                // (u_k o A)_i = sum_j u_k[j] R[i][j]
                let mut val = (0..s).fold(F::zero(), |a, j| {
                    a + self.u[k][j].clone() * self.replacement[i][j].clone()
                });
                val = val - self.eigenvalues[k].clone() * self.u[k][i].clone();
                if self.chained[k] {
                    val = val - self.u[k - 1][i].clone();
                }
                worst = worst.max(val.modulus());
            }
        }
        worst
    }

    /// `max |(U V - I)_{ij}|`.
    pub fn duality_residual(&self) -> f64 {
        let s = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..s {
            for j in 0..s {
                let mut val = (0..s).fold(F::zero(), |a, t| a + self.u[i][t].clone() * self.v[j][t].clone());
                if i == j {
                    val = val - F::one();
                }
                worst = worst.max(val.modulus());
            }
        }
        worst
    }

    pub fn to_complex(&self) -> SpectralDecomposition<Complex64> {
        let conv = |m: &Vec<Vec<F>>| -> Vec<Vec<Complex64>> {
            m.iter().map(|r| r.iter().map(Field::to_complex).collect()).collect()
        };
        SpectralDecomposition {
            eigenvalues: self.eigenvalues.iter().map(Field::to_complex).collect(),
            blocks: self
                .blocks
                .iter()
                .map(|b| JordanBlock { eigenvalue: b.eigenvalue.to_complex(), start: b.start, size: b.size })
                .collect(),
            u: conv(&self.u),
            v: conv(&self.v),
            chained: self.chained.clone(),
            kinds: self.kinds.clone(),
            tol: if F::EXACT { 1e-9 } else { self.tol },
            increments: conv(&self.increments),
            replacement: conv(&self.replacement),
        }
    }
}

/// Either arithmetic path, chosen by [`decompose`].
#[derive(Debug, Clone)]
pub enum Decomposition {
    Exact(SpectralDecomposition<BigRational>),
    Float(SpectralDecomposition<Complex64>),
}

impl Decomposition {
    pub fn is_exact(&self) -> bool {
        matches!(self, Decomposition::Exact(_))
    }

    pub fn complex(&self) -> SpectralDecomposition<Complex64> {
        match self {
            Decomposition::Exact(d) => d.to_complex(),
            Decomposition::Float(d) => d.clone(),
        }
    }

    pub fn classify(&self) -> UrnClass {
        match self {
            Decomposition::Exact(d) => classify(d),
            Decomposition::Float(d) => classify(d),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arith {
    #[default]
    Auto,
    Rational,
    Float,
}

/// Decomposes with exact arithmetic when the urn has integer replacements and
/// a rational spectrum (unless `Float` is forced), in floating point otherwise.
pub fn decompose(urn: &NormalizedUrn, arith: Arith, opts: &SpectralOptions) -> Result<Decomposition> {
    match arith {
        Arith::Float => Ok(Decomposition::Float(decompose_float(urn, opts)?)),
        Arith::Rational => decompose_exact(urn)?
            .map(Decomposition::Exact)
            .ok_or_else(|| Error::ExactUnavailable("the spectrum is not rational".into())),
        Arith::Auto => match decompose_exact(urn) {
            Ok(Some(d)) => Ok(Decomposition::Exact(d)),
            Ok(None) | Err(Error::ExactUnavailable(_)) => Ok(Decomposition::Float(decompose_float(urn, opts)?)),
            Err(e) => Err(e),
        },
    }
}

/// Exact decomposition, or `None` when some eigenvalue is irrational.
pub fn decompose_exact(urn: &NormalizedUrn) -> Result<Option<SpectralDecomposition<BigRational>>> {
    if !urn.original.is_integer() {
        return Err(Error::ExactUnavailable("replacement entries are not all integers".into()));
    }
    let ints: Vec<Vec<BigInt>> = urn.original.r().iter().map(|row| row.iter().map(|v| v.to_integer()).collect()).collect();
    let Some(roots) = integer_roots(&charpoly_integer(&ints), &ints) else {
        return Ok(None);
    };
    let clusters = roots
        .into_iter()
        .map(|(t, mult)| (BigRational::new(t, urn.scale.to_integer()), mult))
        .collect::<Vec<_>>();
    // scale is an integer here because the entries are.
    let r = urn.normalized.r().to_vec();
    build(r, clusters, 0.0, 0.0).map(Some)
}

pub fn decompose_float(urn: &NormalizedUrn, opts: &SpectralOptions) -> Result<SpectralDecomposition<Complex64>> {
    let rf = urn.normalized.r_f64();
    let s = rf.len();
    let m = DMatrix::from_fn(s, s, |i, j| rf[i][j]);
    let eigs: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    let clusters = cluster_eigenvalues(&eigs, opts.eigen_tol);
    let r: Vec<Vec<Complex64>> = rf.iter().map(|row| row.iter().map(|&v| Complex64::new(v, 0.0)).collect()).collect();
    build(r, clusters, opts.eigen_tol, opts.rank_tol)
}

/// Groups eigenvalues within `tol` of a cluster's first member; each cluster
/// is represented by its mean.
pub fn cluster_eigenvalues(eigs: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal).then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal)));
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for z in sorted {
        match groups.iter_mut().find(|g| (g[0] - z).norm() <= tol) {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let mean = g.iter().sum::<Complex64>() / g.len() as f64;
            (mean, g.len())
        })
        .collect()
}

fn build<F: Field>(r: Vec<Vec<F>>, clusters: Vec<(F, usize)>, eigen_tol: f64, rank_tol: f64) -> Result<SpectralDecomposition<F>> {
    let s = r.len();
    let one = F::one();
    let perron = clusters
        .iter()
        .position(|(z, _)| z.approx_eq(&one, eigen_tol))
        .ok_or_else(|| Error::IllConditioned { eigenvalue: "1".into(), singular_values: vec![] })?;
    if clusters[perron].1 != 1 {
        return Err(Error::IllConditioned { eigenvalue: "1 (not simple)".into(), singular_values: vec![] });
    }

    let norm = max_modulus(&r).max(1.0) * s as f64;
    let mut chains: Vec<(F, Vec<Vec<F>>)> = vec![(F::one(), vec![vec![F::one(); s]])];
    for (idx, (mu, mult)) in clusters.iter().enumerate() {
        if idx == perron {
            continue;
        }
        // Chains of R (acting on columns) at mu.
        let n: Vec<Vec<F>> = (0..s)
            .map(|i| (0..s).map(|j| if i == j { r[i][j].clone() - mu.clone() } else { r[i][j].clone() }).collect())
            .collect();
        for chain in jordan_chains(&n, *mult, rank_tol * norm, mu)? {
            chains.push((mu.clone(), chain));
        }
    }

    // Perron block first; then descending real part, descending size, descending imaginary part.
    let perron_chain = chains.remove(0);
    chains.sort_by(|(a, ca), (b, cb)| {
        let (za, zb) = (a.to_complex(), b.to_complex());
        let re = if (za.re - zb.re).abs() <= eigen_tol { Ordering::Equal } else { zb.re.partial_cmp(&za.re).unwrap_or(Ordering::Equal) };
        re.then(cb.len().cmp(&ca.len()))
            .then(zb.im.partial_cmp(&za.im).unwrap_or(Ordering::Equal))
    });
    chains.insert(0, perron_chain);

    let mut eigenvalues = Vec::with_capacity(s);
    let mut blocks = Vec::new();
    let mut u = Vec::with_capacity(s);
    let mut chained = Vec::with_capacity(s);
    for (mu, chain) in chains {
        blocks.push(JordanBlock { eigenvalue: mu.clone(), start: u.len(), size: chain.len() });
        for (pos, vec) in chain.into_iter().enumerate() {
            eigenvalues.push(mu.clone());
            chained.push(pos > 0);
            u.push(vec);
        }
    }
    if u.len() != s {
        return Err(Error::IllConditioned { eigenvalue: "(total multiplicity)".into(), singular_values: vec![] });
    }
    let inv = invert(&u, 1e-13).ok_or_else(|| Error::IllConditioned {
        eigenvalue: "(dual basis)".into(),
        singular_values: vec![],
    })?;
    let v: Vec<Vec<F>> = (0..s).map(|k| (0..s).map(|i| inv[i][k].clone()).collect()).collect();

    let half = F::one() / F::from_i64(2);
    let kinds = eigenvalues
        .iter()
        .enumerate()
        .map(|(k, l)| {
            if k == 0 {
                EigenKind::Perron
            } else {
                match (l.clone() - half.clone()).re_sign(eigen_tol) {
                    Ordering::Greater => EigenKind::Large,
                    Ordering::Equal => EigenKind::Critical,
                    Ordering::Less => EigenKind::StrictlySmall,
                }
            }
        })
        .collect();
    // increments[k][j] = u_j(w_k) = sum_i U[j][i] R[k][i]
    let ut: Vec<Vec<F>> = (0..s).map(|i| (0..s).map(|j| u[j][i].clone()).collect()).collect();
    let increments = mat_mul(&r, &ut);

    Ok(SpectralDecomposition { eigenvalues, blocks, u, v, chained, kinds, tol: eigen_tol, increments, replacement: r })
}

/// Jordan chains of `n = R - mu I` spanning the generalized eigenspace of
/// dimension `mult`. Each chain is returned leading eigenvector first, so that
/// `n * chain[p+1] = chain[p]` and `n * chain[0] = 0`.
fn jordan_chains<F: Field>(n: &[Vec<F>], mult: usize, threshold: f64, mu: &F) -> Result<Vec<Vec<Vec<F>>>> {
    let label = || format!("{:?}", mu.to_complex());
    let mut kernels: Vec<Vec<Vec<F>>> = vec![Vec::new()];
    let mut power = n.to_vec();
    let mut scale = 1.0f64;
    loop {
        let p = kernels.len();
        let k = F::kernel(&power, threshold * scale);
        if !k.ambiguous.is_empty() {
            return Err(Error::IllConditioned { eigenvalue: label(), singular_values: k.ambiguous });
        }
        let dim = k.basis.len();
        if dim > mult || p > mult || dim <= kernels[p - 1].len() && p > 1 {
            return Err(Error::IllConditioned { eigenvalue: label(), singular_values: vec![] });
        }
        kernels.push(k.basis);
        if dim == mult {
            break;
        }
        power = mat_mul(&power, n);
        scale *= max_modulus(n).max(1.0);
    }
    let depth = kernels.len() - 1;
    let apply = |x: &[F], times: usize| {
        let mut y = x.to_vec();
        for _ in 0..times {
            y = crate::field::mat_vec(n, &y);
        }
        y
    };

    let mut generators: Vec<(usize, Vec<F>)> = Vec::new();
    for p in (1..=depth).rev() {
        let mut span: Vec<Vec<F>> = kernels[p - 1].clone();
        for (len, g) in &generators {
            span.push(apply(g, len - p));
        }
        let rank_thr = |vs: &[Vec<F>]| threshold.max(1e-12) * max_modulus(vs).max(1e-300) * 1e2;
        let (mut rank, _) = F::rank(&span, rank_thr(&span));
        for cand in &kernels[p] {
            span.push(cand.clone());
            let (r2, amb) = F::rank(&span, rank_thr(&span));
            if !amb.is_empty() {
                return Err(Error::IllConditioned { eigenvalue: label(), singular_values: amb });
            }
            if r2 > rank {
                rank = r2;
                generators.push((p, cand.clone()));
            } else {
                span.pop();
            }
        }
    }
    let chains: Vec<Vec<Vec<F>>> = generators
        .iter()
        .map(|(len, g)| {
            let g = normalize_generator(g, apply(g, len - 1));
            (0..*len).rev().map(|t| apply(&g, t)).collect()
        })
        .collect();
    if chains.iter().map(Vec::len).sum::<usize>() != mult {
        return Err(Error::IllConditioned { eigenvalue: label(), singular_values: vec![] });
    }
    Ok(chains)
}

/// Rescales a generator so that the eigenvector at the bottom of its chain
/// has its largest-modulus entry equal to one.
fn normalize_generator<F: Field>(g: &[F], eigvec: Vec<F>) -> Vec<F> {
    let pivot = eigvec
        .iter()
        .filter(|x| !x.is_zero())
        .max_by(|a, b| a.modulus().partial_cmp(&b.modulus()).unwrap_or(Ordering::Equal))
        .cloned();
    match pivot {
        Some(p) => g.iter().map(|x| x.clone() / p.clone()).collect(),
        None => g.to_vec(),
    }
}

/// Characteristic polynomial `det(xI - R)` of an integer matrix by
/// Faddeev-LeVerrier, coefficients in increasing degree.
pub fn charpoly_integer(r: &[Vec<BigInt>]) -> Vec<BigInt> {
    let s = r.len();
    let rq: Vec<Vec<BigRational>> = r.iter().map(|row| row.iter().map(|v| BigRational::from_integer(v.clone())).collect()).collect();
    let mut coeffs = vec![BigRational::zero(); s + 1];
    coeffs[s] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); s]; s];
    for k in 1..=s {
        // M_k = R M_{k-1} + c_{s-k+1} I
        let mut next = mat_mul(&rq, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = row[i].clone() + coeffs[s - k + 1].clone();
        }
        let rm = mat_mul(&rq, &next);
        let trace = (0..s).fold(BigRational::zero(), |a, i| a + rm[i][i].clone());
        coeffs[s - k] = -trace / BigRational::from_integer(BigInt::from(k));
        m = next;
    }
    coeffs.into_iter().map(|c| c.to_integer()).collect()
}

/// Integer roots with multiplicities, or `None` if they do not account for
/// the full degree (some root is irrational or complex).
fn integer_roots(poly: &[BigInt], r: &[Vec<BigInt>]) -> Option<Vec<(BigInt, usize)>> {
    let degree = poly.len() - 1;
    let bound = r
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).fold(BigInt::zero(), |a, b| a + b))
        .max()
        .unwrap_or_else(BigInt::zero);
    let bound = bound.to_i64().filter(|b| *b <= 1_000_000)?;
    let mut p = poly.to_vec();
    let mut roots: Vec<(BigInt, usize)> = Vec::new();
    for t in (-bound..=bound).rev() {
        let t = BigInt::from(t);
        let mut mult = 0;
        while p.len() > 1 {
            let (q, rem) = synthetic_division(&p, &t);
            if !rem.is_zero() {
                break;
            }
            p = q;
            mult += 1;
        }
        if mult > 0 {
            roots.push((t, mult));
        }
    }
    (roots.iter().map(|(_, m)| m).sum::<usize>() == degree).then_some(roots)
}

fn synthetic_division(p: &[BigInt], t: &BigInt) -> (Vec<BigInt>, BigInt) {
    let n = p.len() - 1;
    let mut q = vec![BigInt::zero(); n];
    let mut acc = BigInt::zero();
    for i in (0..=n).rev() {
        acc = acc * t + &p[i];
        if i > 0 {
            q[i - 1] = acc.clone();
        }
    }
    (q, acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UrnKind {
    StrictlySmall,
    CriticallySmall,
    Large,
}

impl std::fmt::Display for UrnKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UrnKind::StrictlySmall => "StrictlySmall",
            UrnKind::CriticallySmall => "CriticallySmall",
            UrnKind::Large => "Large",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrnClass {
    /// Largest real part among the non-Perron eigenvalues (`-inf` for one color).
    pub sigma2: f64,
    pub kind: UrnKind,
    /// Size of the largest critical Jordan block minus one (0 unless critically small).
    pub d: usize,
    /// 0 if strictly small, `2d + 1` if critically small.
    pub nu: usize,
    pub critical_eigenvalues: Vec<Complex64>,
}

impl UrnClass {
    pub fn is_small(&self) -> bool {
        self.kind != UrnKind::Large
    }
}

pub fn classify<F: Field>(dec: &SpectralDecomposition<F>) -> UrnClass {
    let sigma2 = dec
        .eigenvalues
        .iter()
        .skip(1)
        .map(|l| l.to_complex().re)
        .fold(f64::NEG_INFINITY, f64::max);
    let kind = if dec.kinds.contains(&EigenKind::Large) {
        UrnKind::Large
    } else if dec.kinds.contains(&EigenKind::Critical) {
        UrnKind::CriticallySmall
    } else {
        UrnKind::StrictlySmall
    };
    let (d, nu) = if kind == UrnKind::CriticallySmall {
        let d = dec.critical_blocks().map(|b| b.size).max().unwrap_or(1) - 1;
        (d, 2 * d + 1)
    } else {
        (0, 0)
    };
    let critical_eigenvalues = dec.critical_blocks().map(|b| b.eigenvalue.to_complex()).collect();
    UrnClass { sigma2, kind, d, nu, critical_eigenvalues }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Onto the Perron direction `v_1`.
    Pi1,
    /// Sum over strictly small eigenvalues.
    PI,
    /// Sum over critical eigenvalues.
    PII,
    /// `pi_k(x) = u_k(x) v_k` (0-based `k`).
    Pi(usize),
}

pub fn project<F: Field>(dec: &SpectralDecomposition<F>, x: &[F], which: Projection) -> Vec<F> {
    let s = dec.dim();
    let selected: Vec<usize> = match which {
        Projection::Pi1 => vec![0],
        Projection::PI => (0..s).filter(|&k| dec.kinds[k] == EigenKind::StrictlySmall).collect(),
        Projection::PII => (0..s).filter(|&k| dec.kinds[k] == EigenKind::Critical).collect(),
        Projection::Pi(k) => vec![k],
    };
    let coords = dec.coords(x);
    let mut out = vec![F::zero(); s];
    for k in selected {
        for (o, vk) in out.iter_mut().zip(&dec.v[k]) {
            *o = o.clone() + coords[k].clone() * vk.clone();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::urn::{validate, UrnSpec};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn urn(r: &[Vec<i64>], x0: &[i64]) -> NormalizedUrn {
        validate(&UrnSpec::from_integers(r, x0).unwrap()).into_result().unwrap()
    }

    #[test]
    fn charpoly_of_circulant() {
        let r = vec![vec![BigInt::from(2), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(2)]];
        // x^2 - 4x + 3
        assert_eq!(charpoly_integer(&r), vec![BigInt::from(3), BigInt::from(-4), BigInt::from(1)]);
    }

    #[test]
    fn exact_two_color_strictly_small() {
        let dec = decompose_exact(&urn(&[vec![2, 1], vec![1, 2]], &[1, 1])).unwrap().unwrap();
        assert_eq!(dec.eigenvalues, vec![q(1, 1), q(1, 3)]);
        assert_eq!(dec.u[0], vec![q(1, 1), q(1, 1)]);
        assert_eq!(dec.v[0], vec![q(1, 2), q(1, 2)]);
        // u_2 proportional to (1, -1)
        assert_eq!(dec.u[1][0].clone() + dec.u[1][1].clone(), q(0, 1));
        assert_eq!(dec.duality_residual(), 0.0);
        assert_eq!(dec.chain_residual(), 0.0);
        let class = classify(&dec);
        assert_eq!(class.kind, UrnKind::StrictlySmall);
        assert_eq!(class.nu, 0);
    }

    #[test]
    fn exact_two_color_critical() {
        let dec = decompose_exact(&urn(&[vec![3, 1], vec![1, 3]], &[1, 1])).unwrap().unwrap();
        assert_eq!(dec.eigenvalues, vec![q(1, 1), q(1, 2)]);
        assert_eq!(dec.blocks.len(), 2);
        let class = classify(&dec);
        assert_eq!((class.kind, class.d, class.nu), (UrnKind::CriticallySmall, 0, 1));
    }

    #[test]
    fn large_urn() {
        let dec = decompose_exact(&urn(&[vec![4, 1], vec![1, 4]], &[1, 1])).unwrap().unwrap();
        assert_eq!(dec.eigenvalues[1], q(3, 5));
        assert_eq!(classify(&dec).kind, UrnKind::Large);
    }

    #[test]
    fn irrational_spectrum_falls_back_to_float() {
        // eigenvalues 3 and (1 +- sqrt(5))/2
        let u = urn(&[vec![2, 1, 0], vec![1, 1, 1], vec![0, 2, 1]], &[1, 1, 1]);
        assert!(decompose_exact(&u).unwrap().is_none());
        let dec = decompose(&u, Arith::Auto, &SpectralOptions::default()).unwrap();
        assert!(!dec.is_exact());
        let d = dec.complex();
        assert!(d.duality_residual() < 1e-8);
        assert!(d.chain_residual() < 1e-8);
    }

    #[test]
    fn jordan_block_fixture() {
        let u = urn(
            &[vec![2, 1, 0, 1], vec![0, 3, 0, 1], vec![1, 0, 3, 0], vec![0, 1, 2, 1]],
            &[1, 1, 1, 1],
        );
        let dec = decompose_exact(&u).unwrap().unwrap();
        assert_eq!(dec.blocks.len(), 3);
        assert_eq!(dec.blocks[1].size, 2);
        assert_eq!(dec.blocks[1].eigenvalue, q(1, 2));
        assert_eq!(dec.chained, vec![false, false, true, false]);
        assert_eq!(dec.chain_residual(), 0.0);
        let class = classify(&dec);
        assert_eq!((class.d, class.nu), (1, 3));

        let fl = decompose_float(&u, &SpectralOptions::default()).unwrap();
        assert_eq!(fl.chained, dec.chained);
        assert!(fl.chain_residual() < 1e-8, "{}", fl.chain_residual());
        assert!(fl.duality_residual() < 1e-8);
        assert_eq!(classify(&fl).nu, 3);
    }

    #[test]
    fn complex_critical_cycle() {
        let u = urn(&[vec![2, 1, 0], vec![0, 2, 1], vec![1, 0, 2]], &[1, 0, 0]);
        let dec = decompose(&u, Arith::Auto, &SpectralOptions::default()).unwrap();
        let d = dec.complex();
        assert!(!dec.is_exact());
        let class = classify(&d);
        assert_eq!(class.kind, UrnKind::CriticallySmall);
        assert_eq!(class.nu, 1);
        assert!((d.eigenvalues[1].im - d.eigenvalues[2].im.abs()).abs() < 1e-12);
        assert!(d.duality_residual() < 1e-8);
    }

    #[test]
    fn projections_partition_identity() {
        let dec = decompose_exact(&urn(&[vec![2, 1], vec![1, 2]], &[1, 1])).unwrap().unwrap();
        let x = vec![q(7, 1), q(-2, 3)];
        let sum: Vec<BigRational> = [Projection::Pi1, Projection::PI, Projection::PII]
            .iter()
            .map(|&p| project(&dec, &x, p))
            .fold(vec![q(0, 1); 2], |a, b| a.into_iter().zip(b).map(|(x, y)| x + y).collect());
        assert_eq!(sum, x);
        assert_eq!(project(&dec, &x, Projection::PII), vec![q(0, 1); 2]);
    }
}
