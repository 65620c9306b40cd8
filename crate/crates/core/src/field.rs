//! Scalar fields used throughout the crate.
//!
//! Two instances exist: [`BigRational`] for the exact path (integer urns with
//! rational spectrum) and [`Complex64`] for everything else. Code that is
//! generic over [`Field`] runs unchanged on both; the only places where the
//! two differ are zero tests, sign tests and rank decisions, which go through
//! the tolerance-aware methods below.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact and comparisons ignore tolerances.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_ratio(r: &BigRational) -> Self;
    fn to_complex(&self) -> Complex64;
    fn modulus(&self) -> f64;

    /// Exact decimal form (`p/q`), for exact fields only.
    fn exact_string(&self) -> Option<String> {
        None
    }

    /// Sign of the real part, with `Equal` inside `[-tol, tol]` for inexact fields.
    fn re_sign(&self, tol: f64) -> Ordering;

    fn negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.modulus() <= tol
        }
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).negligible(tol)
    }

    /// Null space of the matrix given by `rows`, plus any singular values that
    /// fell in the ambiguous band around `threshold`.
    fn kernel(rows: &[Vec<Self>], threshold: f64) -> Kernel<Self>;

    /// Rank of the span of `vectors`, with the same ambiguity report.
    fn rank(vectors: &[Vec<Self>], threshold: f64) -> (usize, Vec<f64>);

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct Kernel<F> {
    pub basis: Vec<Vec<F>>,
    pub ambiguous: Vec<f64>,
}

impl Field for BigRational {
    const EXACT: bool = true;

    fn exact_string(&self) -> Option<String> {
        Some(self.to_string())
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(self), 0.0)
    }

    fn modulus(&self) -> f64 {
        ratio_to_f64(self).abs()
    }

    fn re_sign(&self, _tol: f64) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn kernel(rows: &[Vec<Self>], _threshold: f64) -> Kernel<Self> {
        Kernel { basis: rref_kernel(rows), ambiguous: Vec::new() }
    }

    fn rank(vectors: &[Vec<Self>], _threshold: f64) -> (usize, Vec<f64>) {
        let mut m = vectors.to_vec();
        (rref(&mut m).len(), Vec::new())
    }
}

impl Field for Complex64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_ratio(r: &BigRational) -> Self {
        Complex64::new(ratio_to_f64(r), 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn re_sign(&self, tol: f64) -> Ordering {
        if self.re > tol {
            Ordering::Greater
        } else if self.re < -tol {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn kernel(rows: &[Vec<Self>], threshold: f64) -> Kernel<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() {
            let basis = (0..ncols).map(|i| unit(ncols, i)).collect();
            return Kernel { basis, ambiguous: Vec::new() };
        }
        // Pad to square so the SVD exposes the full right singular basis.
        let n = ncols.max(rows.len());
        let m = DMatrix::from_fn(n, ncols, |i, j| {
            rows.get(i).map_or(Complex64::zero(), |r| r[j])
        });
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("requested v_t");
        let mut basis = Vec::new();
        let mut ambiguous = Vec::new();
        for (idx, sv) in svd.singular_values.iter().enumerate() {
            if *sv <= threshold {
                basis.push((0..ncols).map(|j| v_t[(idx, j)].conj()).collect());
            } else if *sv <= threshold * 1e3 {
                ambiguous.push(*sv);
            }
        }
        Kernel { basis, ambiguous }
    }

    fn rank(vectors: &[Vec<Self>], threshold: f64) -> (usize, Vec<f64>) {
        if vectors.is_empty() {
            return (0, Vec::new());
        }
        let ncols = vectors[0].len();
        let m = DMatrix::from_fn(vectors.len(), ncols, |i, j| vectors[i][j]);
        let svd = m.svd(false, false);
        let mut rank = 0;
        let mut ambiguous = Vec::new();
        for sv in svd.singular_values.iter() {
            if *sv > threshold * 1e3 {
                rank += 1;
            } else if *sv > threshold {
                rank += 1;
                ambiguous.push(*sv);
            }
        }
        (rank, ambiguous)
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division when numerator or denominator overflow f64.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact conversion of a finite `f64` into a rational.
/// Parses `p`, `p/q` or a finite decimal such as `-1.25` exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        return (!q.is_zero()).then(|| BigRational::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{frac}", whole.trim_start_matches(['-', '+']));
        let numer: BigInt = digits.parse().ok()?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(numer, denom);
        return Some(if negative { -r } else { r });
    }
    t.parse::<BigInt>().ok().map(BigRational::from_integer)
}

pub fn ratio_from_f64(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite float")
}

pub fn unit<F: Field>(n: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[i] = F::one();
    v
}

/// Reduces `m` to row echelon form in place (partial pivoting on modulus)
/// and returns the pivot columns.
pub fn rref<F: Field>(m: &mut Vec<Vec<F>>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best = None;
        let mut best_mod = 0.0;
        for (i, row) in m.iter().enumerate().skip(r) {
            if !row[c].is_zero() {
                let md = row[c].modulus();
                if best.is_none() || md > best_mod {
                    best = Some(i);
                    best_mod = md;
                }
            }
        }
        let Some(p) = best else { continue };
        m.swap(r, p);
        let inv = F::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in 0..cols {
                    let delta = factor.clone() * m[r][j].clone();
                    m[i][j] = m[i][j].clone() - delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

fn rref_kernel<F: Field>(rows: &[Vec<F>]) -> Vec<Vec<F>> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); cols];
        v[free] = F::one();
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Gauss-Jordan inverse; `None` when a pivot is negligible at `tol`.
pub fn invert<F: Field>(a: &[Vec<F>], tol: f64) -> Option<Vec<Vec<F>>> {
    let n = a.len();
    let mut m: Vec<Vec<F>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(unit::<F>(n, i));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| {
            m[i][c].modulus().partial_cmp(&m[j][c].modulus()).unwrap_or(Ordering::Equal)
        })?;
        if m[p][c].negligible(tol) || m[p][c].is_zero() {
            return None;
        }
        m.swap(c, p);
        let inv = F::one() / m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in 0..2 * n {
                    let delta = factor.clone() * m[c][j].clone();
                    m[i][j] = m[i][j].clone() - delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(F::zero(), |acc, k| acc + row[k].clone() * b[k][j].clone())
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<F: Field>(a: &[Vec<F>], x: &[F]) -> Vec<F> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(F::zero(), |acc, (r, v)| acc + r.clone() * v.clone()))
        .collect()
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn max_modulus<F: Field>(a: &[Vec<F>]) -> f64 {
    a.iter().flatten().map(Field::modulus).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_parsing() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("2"), Some(q(2, 1)));
        assert_eq!(parse_rational("-1/2"), Some(q(-1, 2)));
        assert_eq!(parse_rational(" 3/6 "), Some(q(1, 2)));
        assert_eq!(parse_rational("-1.25"), Some(q(-5, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn exact_kernel_of_rank_one() {
        let m = vec![vec![q(1, 3), q(1, 3)], vec![q(1, 3), q(1, 3)]];
        let k = BigRational::kernel(&m, 0.0);
        assert_eq!(k.basis, vec![vec![q(-1, 1), q(1, 1)]]);
    }

    #[test]
    fn float_kernel_matches_exact() {
        let m = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0)],
        ];
        let k = Complex64::kernel(&m, 1e-9);
        assert_eq!(k.basis.len(), 1);
        let v = &k.basis[0];
        assert!((v[0] + v[1] * 2.0).norm() < 1e-12);
    }

    #[test]
    fn invert_roundtrip() {
        let a = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]];
        let inv = invert(&a, 0.0).unwrap();
        let id = mat_mul(&a, &inv);
        assert_eq!(id, vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
        let singular = vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]];
        assert!(invert(&singular, 0.0).is_none());
    }

    #[test]
    fn float_roundtrip_is_exact() {
        let r = ratio_from_f64(0.1);
        assert_eq!(ratio_to_f64(&r), 0.1);
    }
}
