//! Multi-indices, polynomials in the `u`-coordinates and the operator
//! `Phi(f)(v) = sum_k l_k(v) (f(v + w_k) - f(v))`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::spectral::{EigenKind, JordanBlock, SpectralDecomposition};

/// Default ceiling on `|alpha|` for basis enumeration.
pub const DEGREE_BUDGET: u32 = 12;

/// Float coefficients below this modulus are dropped.
pub const PRUNE_TOL: f64 = 1e-14;

/// Columns of `Phi` may leak outside `S_alpha` by at most this much (float mode).
pub const LEAK_TOL: f64 = 1e-9;

/// A power `alpha = (alpha_1, .., alpha_s)`.
///
/// The ordering is the degree-antialphabetic order: first by total degree,
/// then, at the last coordinate where two indices differ, the one with the
/// smaller entry comes first. Thus `(2,0) < (1,1) < (0,2)` and `Phi(u^beta)`
/// only involves monomials `u^gamma` with `gamma <= beta`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(s: usize) -> Self {
        MultiIndex(vec![0; s])
    }

    /// `delta_j` (0-based `j`).
    pub fn delta(s: usize, j: usize) -> Self {
        let mut e = vec![0; s];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&k| self.0[k] != 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn plus_delta(&self, j: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[j] += 1;
        MultiIndex(e)
    }

    /// `self - other` as a signed vector.
    pub fn diff(&self, other: &MultiIndex) -> Vec<i64> {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a as i64 - b as i64).collect()
    }

    /// `<lambda, alpha>`.
    pub fn weight<F: Field>(&self, dec: &SpectralDecomposition<F>) -> F {
        dec.weight(&self.0)
    }

    fn all_support_in(&self, dec: &SpectralDecomposition<impl Field>, ok: impl Fn(EigenKind) -> bool) -> bool {
        self.support().into_iter().all(|k| ok(dec.kinds[k]))
    }

    /// Only `u_i` with `Re lambda_i <= 1/2` appear.
    pub fn is_small<F: Field>(&self, dec: &SpectralDecomposition<F>) -> bool {
        self.all_support_in(dec, |k| matches!(k, EigenKind::Critical | EigenKind::StrictlySmall))
    }

    pub fn is_strictly_small<F: Field>(&self, dec: &SpectralDecomposition<F>) -> bool {
        self.all_support_in(dec, |k| k == EigenKind::StrictlySmall)
    }

    /// Only `u_i` with `Re lambda_i` in `{1, 1/2}` appear.
    pub fn is_critical<F: Field>(&self, dec: &SpectralDecomposition<F>) -> bool {
        self.all_support_in(dec, |k| matches!(k, EigenKind::Perron | EigenKind::Critical))
    }

    pub fn is_strictly_critical<F: Field>(&self, dec: &SpectralDecomposition<F>) -> bool {
        self.all_support_in(dec, |k| k == EigenKind::Critical)
    }

    /// The Jordan block containing the support, if there is one.
    pub fn monogenic_block<'a, F: Field>(&self, dec: &'a SpectralDecomposition<F>) -> Option<&'a JordanBlock<F>> {
        let supp = self.support();
        let first = *supp.first()?;
        let block = dec.block_of(first);
        supp.iter().all(|&k| block.contains(k)).then_some(block)
    }

    pub fn is_monogenic<F: Field>(&self, dec: &SpectralDecomposition<F>) -> bool {
        self.is_zero() || self.monogenic_block(dec).is_some()
    }

    /// Whether `supp(alpha)` lies in `{1} + J` for the given block.
    pub fn is_quasi_monogenic_in<F>(&self, block: &JordanBlock<F>) -> bool {
        self.support().into_iter().all(|k| k == 0 || block.contains(k))
    }

    pub fn is_quasi_monogenic<F: Field>(&self, dec: &SpectralDecomposition<F>) -> bool {
        dec.blocks.iter().skip(1).any(|b| self.is_quasi_monogenic_in(b)) || self.support().iter().all(|&k| k == 0)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0).rev() {
                if a != b {
                    return a.cmp(b);
                }
            }
            self.0.len().cmp(&other.0.len())
        })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(MultiIndex)
            .map_err(|_| Error::Schema(format!("cannot parse multi-index {s:?}")))
    }
}

/// Strict degree-antialphabetic comparison.
pub fn order_less(a: &MultiIndex, b: &MultiIndex) -> bool {
    a < b
}

/// All multi-indices of dimension `s` with total degree exactly `d`.
pub fn of_degree(s: usize, d: u32) -> Vec<MultiIndex> {
    fn rec(s: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == s {
            prefix.push(d);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in 0..=d {
            prefix.push(a);
            rec(s, d - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if s > 0 {
        rec(s, d, &mut Vec::with_capacity(s), &mut out);
    }
    out
}

/// `{beta : beta <= alpha}` in ascending order.
pub fn basis_upto(alpha: &MultiIndex) -> Result<Vec<MultiIndex>> {
    basis_upto_with_budget(alpha, DEGREE_BUDGET)
}

pub fn basis_upto_with_budget(alpha: &MultiIndex, budget: u32) -> Result<Vec<MultiIndex>> {
    let d = alpha.degree();
    if d > budget {
        return Err(Error::BudgetExceeded { what: "basis degree", needed: d as u128, budget: budget as u128 });
    }
    let mut out: Vec<MultiIndex> = (0..=d).flat_map(|k| of_degree(alpha.dim(), k)).filter(|b| b <= alpha).collect();
    out.sort();
    Ok(out)
}

/// A polynomial in `u_1, .., u_s`, stored sparsely in ascending order.
#[derive(Clone, PartialEq)]
pub struct Polynomial<F> {
    s: usize,
    terms: BTreeMap<MultiIndex, F>,
}

impl<F: Field> Polynomial<F> {
    pub fn zero(s: usize) -> Self {
        Polynomial { s, terms: BTreeMap::new() }
    }

    pub fn constant(s: usize, c: F) -> Self {
        let mut p = Self::zero(s);
        p.add_term(MultiIndex::zero(s), c);
        p
    }

    pub fn monomial(alpha: MultiIndex) -> Self {
        let mut p = Self::zero(alpha.dim());
        p.add_term(alpha, F::one());
        p
    }

    /// `sum_j c_j u_j`.
    pub fn linear(coeffs: &[F]) -> Self {
        let mut p = Self::zero(coeffs.len());
        for (j, c) in coeffs.iter().enumerate() {
            p.add_term(MultiIndex::delta(coeffs.len(), j), c.clone());
        }
        p
    }

    pub fn from_terms(s: usize, terms: impl IntoIterator<Item = (MultiIndex, F)>) -> Self {
        let mut p = Self::zero(s);
        for (a, c) in terms {
            p.add_term(a, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &F)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> F {
        self.terms.get(alpha).cloned().unwrap_or_else(F::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    /// Largest monomial in the order.
    pub fn leading(&self) -> Option<&MultiIndex> {
        self.terms.keys().next_back()
    }

    pub fn max_modulus(&self) -> f64 {
        self.terms.values().map(Field::modulus).fold(0.0, f64::max)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: F) {
        debug_assert_eq!(alpha.dim(), self.s);
        let entry = self.terms.entry(alpha);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                if !c.negligible(PRUNE_TOL) {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.negligible(PRUNE_TOL) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial<F>, c: &F) {
        for (a, v) in &other.terms {
            self.add_term(a.clone(), v.clone() * c.clone());
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_terms(self.s, self.terms.iter().map(|(a, v)| (a.clone(), v.clone() * c.clone())))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &F::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-F::one());
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.s);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.plus(b), x.clone() * y.clone());
            }
        }
        out
    }

    /// Drops terms with modulus at most `tol` (exact zeros only for exact fields).
    pub fn pruned(&self, tol: f64) -> Self {
        Polynomial {
            s: self.s,
            terms: self.terms.iter().filter(|(_, c)| !c.negligible(tol)).map(|(a, c)| (a.clone(), c.clone())).collect(),
        }
    }

    /// Value at a point given by its `u`-coordinates.
    pub fn eval_coords(&self, u: &[F]) -> F {
        self.terms.iter().fold(F::zero(), |acc, (a, c)| {
            let m = a.entries().iter().zip(u).fold(c.clone(), |m, (&e, x)| if e == 0 { m } else { m * x.pow(e) });
            acc + m
        })
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Polynomial<G> {
        Polynomial::from_terms(self.s, self.terms.iter().map(|(a, c)| (a.clone(), f(c))))
    }
}

impl<F: fmt::Debug> fmt::Debug for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(a, c)| (a.to_string(), c))).finish()
    }
}

/// Value of `f` at the color vector `x`.
pub fn eval<F: Field>(f: &Polynomial<F>, x: &[F], dec: &SpectralDecomposition<F>) -> F {
    f.eval_coords(&dec.coords(x))
}

/// The data `Phi` needs from a decomposition: the shifts `u_j(w_k)` and the
/// expansions `l_k = sum_j l_k(v_j) u_j`.
#[derive(Debug, Clone)]
pub struct PhiOperator<F> {
    s: usize,
    increments: Vec<Vec<F>>,
    color_forms: Vec<Vec<(usize, F)>>,
    binomials: Vec<Vec<i64>>,
}

impl<F: Field> PhiOperator<F> {
    pub fn new(dec: &SpectralDecomposition<F>) -> Self {
        let s = dec.dim();
        let color_forms = (0..s)
            .map(|k| (0..s).filter_map(|j| {
                let c = dec.color_of(k, j).clone();
                (!c.is_zero()).then_some((j, c))
            }).collect())
            .collect();
        PhiOperator { s, increments: dec.increments.clone(), color_forms, binomials: pascal(DEGREE_BUDGET as usize * 2) }
    }

    pub fn dim(&self) -> usize {
        self.s
    }

    /// `Phi(u^beta)`.
    pub fn apply_monomial(&self, beta: &MultiIndex) -> Polynomial<F> {
        let mut out = Polynomial::zero(self.s);
        if beta.is_zero() {
            return out;
        }
        let e = beta.entries();
        for k in 0..self.s {
            // (u + c_k)^beta - u^beta, one lower multi-index gamma at a time.
            let c = &self.increments[k];
            let mut gamma: Vec<u32> = vec![0; self.s];
            loop {
                if gamma.as_slice() != e {
                    let mut coef = F::one();
                    for j in 0..self.s {
                        let drop = e[j] - gamma[j];
                        if drop > 0 {
                            coef = coef
                                * F::from_i64(self.binom(e[j], gamma[j]))
                                * c[j].pow(drop);
                        }
                    }
                    if !coef.is_zero() {
                        let g = MultiIndex(gamma.clone());
                        for (i, v) in &self.color_forms[k] {
                            out.add_term(g.plus_delta(*i), coef.clone() * v.clone());
                        }
                    }
                }
                // Odometer over 0 <= gamma <= beta.
                let mut j = 0;
                while j < self.s {
                    if gamma[j] < e[j] {
                        gamma[j] += 1;
                        break;
                    }
                    gamma[j] = 0;
                    j += 1;
                }
                if j == self.s {
                    break;
                }
            }
        }
        out
    }

    pub fn apply(&self, f: &Polynomial<F>) -> Polynomial<F> {
        let mut out = Polynomial::zero(self.s);
        for (beta, c) in f.terms() {
            out.add_scaled(&self.apply_monomial(beta), c);
        }
        out
    }

    fn binom(&self, n: u32, k: u32) -> i64 {
        match self.binomials.get(n as usize) {
            Some(row) => row[k as usize],
            None => binomial(n, k),
        }
    }
}

fn pascal(n: usize) -> Vec<Vec<i64>> {
    let mut rows: Vec<Vec<i64>> = vec![vec![1]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![1; i + 1];
        for k in 1..i {
            row[k] = prev[k - 1] + prev[k];
        }
        rows.push(row);
    }
    rows
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// `Phi(f)` for a decomposition (convenience wrapper around [`PhiOperator`]).
pub fn phi_apply<F: Field>(f: &Polynomial<F>, dec: &SpectralDecomposition<F>) -> Polynomial<F> {
    PhiOperator::new(dec).apply(f)
}

/// Matrix of `Phi` on `S_alpha` in the monomial basis.
#[derive(Debug, Clone)]
pub struct PhiMatrix<F> {
    pub alpha: MultiIndex,
    pub basis: Vec<MultiIndex>,
    /// `columns[j]` lists the nonzero entries `(row, value)` of `Phi(u^basis[j])`.
    pub columns: Vec<Vec<(usize, F)>>,
}

impl<F: Field> PhiMatrix<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> F {
        self.columns[col].iter().find(|(r, _)| *r == row).map_or_else(F::zero, |(_, v)| v.clone())
    }

    pub fn diagonal(&self) -> Vec<F> {
        (0..self.dim()).map(|j| self.entry(j, j)).collect()
    }

    pub fn dense(&self) -> Vec<Vec<F>> {
        let n = self.dim();
        let mut m = vec![vec![F::zero(); n]; n];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                m[*i][j] = v.clone();
            }
        }
        m
    }

    /// True when `Phi(u^beta)` only involves `gamma <= beta` for every column.
    pub fn is_triangular(&self) -> bool {
        self.columns.iter().enumerate().all(|(j, col)| col.iter().all(|(i, _)| *i <= j))
    }
}

pub fn phi_matrix<F: Field>(alpha: &MultiIndex, dec: &SpectralDecomposition<F>) -> Result<PhiMatrix<F>> {
    phi_matrix_with(alpha, &PhiOperator::new(dec))
}

pub fn phi_matrix_with<F: Field>(alpha: &MultiIndex, phi: &PhiOperator<F>) -> Result<PhiMatrix<F>> {
    let basis = basis_upto(alpha)?;
    let index: BTreeMap<&MultiIndex, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut columns = Vec::with_capacity(basis.len());
    for beta in &basis {
        let image = phi.apply_monomial(beta);
        let mut col = Vec::with_capacity(image.len());
        for (gamma, c) in image.terms() {
            match index.get(gamma) {
                Some(&i) => col.push((i, c.clone())),
                None if c.negligible(LEAK_TOL) => {}
                None => {
                    return Err(Error::StabilityViolation { column: beta.to_string(), leak: gamma.to_string() });
                }
            }
        }
        columns.push(col);
    }
    Ok(PhiMatrix { alpha: alpha.clone(), basis, columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::decompose_exact;
    use crate::urn::{validate, UrnSpec};
    use num_rational::BigRational;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn dec(r: &[Vec<i64>]) -> SpectralDecomposition<BigRational> {
        let x0 = vec![1; r.len()];
        let urn = validate(&UrnSpec::from_integers(r, &x0).unwrap()).into_result().unwrap();
        decompose_exact(&urn).unwrap().unwrap()
    }

    #[test]
    fn order_examples() {
        assert!(order_less(&mi(&[1, 0]), &mi(&[0, 2])));
        assert!(!order_less(&mi(&[1, 1]), &mi(&[1, 1])));
        assert!(order_less(&mi(&[2, 0]), &mi(&[1, 1])));
        assert!(order_less(&mi(&[1, 1]), &mi(&[0, 2])));
    }

    #[test]
    fn order_is_total_and_transitive() {
        for s in 1..=3 {
            let all: Vec<MultiIndex> = (0..=4).flat_map(|d| of_degree(s, d)).collect();
            for a in &all {
                for b in &all {
                    let (ab, ba) = (order_less(a, b), order_less(b, a));
                    assert_eq!(a == b, !ab && !ba);
                    assert!(!(ab && ba));
                    for c in &all {
                        if ab && order_less(b, c) {
                            assert!(order_less(a, c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn basis_examples() {
        assert_eq!(basis_upto(&mi(&[0, 0])).unwrap(), vec![mi(&[0, 0])]);
        assert_eq!(basis_upto(&mi(&[0, 1])).unwrap(), vec![mi(&[0, 0]), mi(&[1, 0]), mi(&[0, 1])]);
        assert_eq!(basis_upto(&mi(&[0, 2])).unwrap().len(), 6);
        assert!(matches!(basis_upto(&mi(&[13, 0])), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn phi_on_constants_and_linear_forms() {
        let d = dec(&[vec![2, 1, 0, 1], vec![0, 3, 0, 1], vec![1, 0, 3, 0], vec![0, 1, 2, 1]]);
        let phi = PhiOperator::new(&d);
        assert!(phi.apply_monomial(&MultiIndex::zero(4)).is_empty());
        for k in 0..4 {
            let image = phi.apply_monomial(&MultiIndex::delta(4, k));
            let mut expected = Polynomial::zero(4);
            expected.add_term(MultiIndex::delta(4, k), d.eigenvalues[k].clone());
            if d.chained[k] {
                expected.add_term(MultiIndex::delta(4, k - 1), BigRational::from_integer(1.into()));
            }
            assert_eq!(image, expected, "k = {k}");
        }
    }

    #[test]
    fn phi_matrix_diagonal() {
        let d = dec(&[vec![2, 1], vec![1, 2]]);
        let m = phi_matrix(&mi(&[0, 2]), &d).unwrap();
        let third = BigRational::new(1.into(), 3.into());
        let i = |n: i64| BigRational::from_integer(n.into());
        assert_eq!(m.diagonal(), vec![i(0), i(1), third.clone(), i(2), i(1) + third.clone(), i(2) * third]);
        assert!(m.is_triangular());
        let small = phi_matrix(&mi(&[1, 0]), &d).unwrap();
        assert_eq!(small.diagonal(), vec![i(0), i(1)]);
    }

    #[test]
    fn multi_index_parse_and_display() {
        let a: MultiIndex = "0, 2,1".parse().unwrap();
        assert_eq!(a, mi(&[0, 2, 1]));
        assert_eq!(a.to_string(), "0,2,1");
        assert!("1,x".parse::<MultiIndex>().is_err());
    }

    #[test]
    fn polynomial_products() {
        let u = Polynomial::<BigRational>::linear(&[BigRational::from_integer(1.into()), BigRational::from_integer(2.into())]);
        let sq = u.mul(&u);
        assert_eq!(sq.coeff(&mi(&[1, 1])), BigRational::from_integer(4.into()));
        assert_eq!(sq.degree(), Some(2));
        assert_eq!(sq.sub(&sq).len(), 0);
    }
}
