//! The urn model: specification, validation, one-step dynamics, simulation
//! and exhaustive path enumeration.
//!
//! Colors are indexed from 0 in code and from 1 in every user-facing message
//! and file. Row `i` of the replacement matrix is the vector added when color
//! `i` is drawn.

use std::collections::VecDeque;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result, Violation};
use crate::field::{ratio_from_f64, ratio_to_f64};
use crate::rng;

/// Default leaf budget for [`enumerate_paths`].
pub const ENUMERATION_BUDGET: u128 = 20_000_000;

/// Relative tolerance on row sums for specs with non-integer entries.
pub const BALANCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct UrnSpec {
    pub name: Option<String>,
    r: Vec<Vec<BigRational>>,
    x0: Vec<BigRational>,
}

impl UrnSpec {
    pub fn new(r: Vec<Vec<BigRational>>, x0: Vec<BigRational>) -> Result<Self> {
        let s = r.len();
        if s == 0 {
            return Err(Error::Invalid(vec![Violation::Shape("no colors".into())]));
        }
        if r.iter().any(|row| row.len() != s) {
            return Err(Error::Invalid(vec![Violation::Shape("R must be square".into())]));
        }
        if x0.len() != s {
            return Err(Error::Invalid(vec![Violation::Shape(format!(
                "X0 has {} entries, R has {s} colors",
                x0.len()
            ))]));
        }
        Ok(UrnSpec { name: None, r, x0 })
    }

    pub fn from_integers(r: &[Vec<i64>], x0: &[i64]) -> Result<Self> {
        let int = |v: i64| BigRational::from_integer(BigInt::from(v));
        Self::new(
            r.iter().map(|row| row.iter().map(|&v| int(v)).collect()).collect(),
            x0.iter().map(|&v| int(v)).collect(),
        )
    }

    pub fn from_f64(r: &[Vec<f64>], x0: &[f64]) -> Result<Self> {
        let conv = |v: f64| {
            if v.is_finite() {
                Ok(ratio_from_f64(v))
            } else {
                Err(Error::Invalid(vec![Violation::Shape(format!("non-finite entry {v}"))]))
            }
        };
        Self::new(
            r.iter()
                .map(|row| row.iter().map(|&v| conv(v)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
            x0.iter().map(|&v| conv(v)).collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Parses `{ "R": [[...]], "X0": [...], "name": "..." }`. Entries may be
    /// JSON numbers or strings holding exact rationals such as `"1/3"`.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let obj = value.as_object().ok_or_else(|| Error::Schema("expected a JSON object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "R" | "X0" | "name") {
                return Err(Error::Schema(format!("unknown field {key:?}")));
            }
        }
        let r = obj
            .get("R")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Schema("missing array field \"R\"".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Schema("rows of R must be arrays".into()))?
                    .iter()
                    .map(parse_number)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let x0 = obj
            .get("X0")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Schema("missing array field \"X0\"".into()))?
            .iter()
            .map(parse_number)
            .collect::<Result<Vec<_>>>()?;
        let name = match obj.get("name") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(Error::Schema("\"name\" must be a string".into())),
        };
        let mut spec = Self::new(r, x0).map_err(|e| Error::Schema(e.to_string()))?;
        spec.name = name;
        Ok(spec)
    }

    pub fn to_json(&self) -> Value {
        let num = |v: &BigRational| -> Value {
            if v.is_integer() {
                match i64::try_from(v.to_integer()) {
                    Ok(i) => json!(i),
                    Err(_) => json!(v.to_string()),
                }
            } else {
                json!(v.to_string())
            }
        };
        let mut obj = serde_json::Map::new();
        obj.insert("R".into(), Value::Array(self.r.iter().map(|row| Value::Array(row.iter().map(num).collect())).collect()));
        obj.insert("X0".into(), Value::Array(self.x0.iter().map(num).collect()));
        if let Some(name) = &self.name {
            obj.insert("name".into(), json!(name));
        }
        Value::Object(obj)
    }

    pub fn colors(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[Vec<BigRational>] {
        &self.r
    }

    pub fn x0(&self) -> &[BigRational] {
        &self.x0
    }

    pub fn r_f64(&self) -> Vec<Vec<f64>> {
        self.r.iter().map(|row| row.iter().map(ratio_to_f64).collect()).collect()
    }

    pub fn x0_f64(&self) -> Vec<f64> {
        self.x0.iter().map(ratio_to_f64).collect()
    }

    /// Whether every replacement entry is an integer.
    pub fn is_integer(&self) -> bool {
        self.r.iter().flatten().all(BigRational::is_integer)
    }

    pub fn row_sums(&self) -> Vec<BigRational> {
        self.r.iter().map(|row| row.iter().fold(BigRational::zero(), |a, b| a + b)).collect()
    }

    /// Scales replacements and initial masses by `1/m`.
    pub fn scaled(&self, m: &BigRational) -> UrnSpec {
        UrnSpec {
            name: self.name.clone(),
            r: self.r.iter().map(|row| row.iter().map(|v| v / m).collect()).collect(),
            x0: self.x0.iter().map(|v| v / m).collect(),
        }
    }
}

fn parse_number(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else {
                let f = n.as_f64().ok_or_else(|| Error::Schema(format!("bad number {n}")))?;
                Ok(ratio_from_f64(f))
            }
        }
        Value::String(s) => crate::field::parse_rational(s)
            .ok_or_else(|| Error::Schema(format!("cannot parse {s:?} as a rational"))),
        other => Err(Error::Schema(format!("expected a number, found {other}"))),
    }
}

/// A validated urn together with its `m = 1` normalization.
#[derive(Debug, Clone)]
pub struct NormalizedUrn {
    pub original: UrnSpec,
    pub normalized: UrnSpec,
    /// The balance constant `m` of the original spec.
    pub scale: BigRational,
    /// True when balance was checked exactly, i.e. the replacement entries are integers.
    pub exact: bool,
}

impl NormalizedUrn {
    pub fn colors(&self) -> usize {
        self.original.colors()
    }

    pub fn scale_f64(&self) -> f64 {
        ratio_to_f64(&self.scale)
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub balanced: bool,
    pub tenable: bool,
    pub irreducible: bool,
    pub balance: Option<f64>,
    pub violations: Vec<Violation>,
    pub normalized: Option<NormalizedUrn>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<NormalizedUrn> {
        match self.normalized {
            Some(n) if self.violations.is_empty() => Ok(n),
            _ => Err(Error::Invalid(self.violations)),
        }
    }
}

pub fn validate(spec: &UrnSpec) -> ValidationReport {
    let s = spec.colors();
    let mut violations = Vec::new();
    let exact = spec.is_integer();

    let sums = spec.row_sums();
    let m = if exact {
        if sums.iter().all(|v| *v == sums[0]) {
            Some(sums[0].clone())
        } else {
            None
        }
    } else {
        let f: Vec<f64> = sums.iter().map(ratio_to_f64).collect();
        let mean = f.iter().sum::<f64>() / s as f64;
        if f.iter().all(|v| (v - mean).abs() <= BALANCE_TOLERANCE * mean.abs()) {
            Some(sums.iter().fold(BigRational::zero(), |a, b| a + b) / BigRational::from_integer(BigInt::from(s)))
        } else {
            None
        }
    };
    let mut balanced = true;
    match &m {
        None => {
            balanced = false;
            violations.push(Violation::NotBalanced { row_sums: sums.iter().map(ratio_to_f64).collect() });
        }
        Some(m) if !m.is_positive() => {
            balanced = false;
            violations.push(Violation::NonPositiveBalance { m: ratio_to_f64(m) });
        }
        _ => {}
    }

    for (j, x) in spec.x0.iter().enumerate() {
        if x.is_negative() {
            violations.push(Violation::InitialOutsideOrthant { color: j, value: ratio_to_f64(x) });
        }
    }
    if spec.x0.iter().all(Zero::is_zero) {
        violations.push(Violation::InitialZero);
    }

    let mut tenable = true;
    for i in 0..s {
        for j in 0..s {
            if i != j && spec.r[i][j].is_negative() {
                tenable = false;
                violations.push(Violation::NotTenable {
                    color: j,
                    reason: format!("off-diagonal entry r[{}][{}] is negative", i + 1, j + 1),
                });
            }
        }
    }
    for k in 0..s {
        let rkk = &spec.r[k][k];
        if !rkk.is_negative() {
            continue;
        }
        if !exact {
            tenable = false;
            violations.push(Violation::NotTenable {
                color: k,
                reason: "negative diagonal entry in a non-integer replacement matrix".into(),
            });
            continue;
        }
        let step = rkk.abs();
        let divides = |v: &BigRational| (v / &step).is_integer();
        if !divides(&spec.x0[k]) {
            tenable = false;
            violations.push(Violation::NotTenable {
                color: k,
                reason: format!("|r[{0}][{0}]| does not divide X0[{0}]", k + 1),
            });
        }
        for i in (0..s).filter(|&i| i != k) {
            if !divides(&spec.r[i][k]) {
                tenable = false;
                violations.push(Violation::NotTenable {
                    color: k,
                    reason: format!("|r[{0}][{0}]| does not divide r[{1}][{0}]", k + 1, i + 1),
                });
            }
        }
    }

    let unreachable = unreachable_pairs(spec);
    let irreducible = unreachable.is_empty();
    if !irreducible {
        violations.push(Violation::Reducible { unreachable });
    }

    let normalized = m.as_ref().filter(|m| m.is_positive()).map(|m| NormalizedUrn {
        original: spec.clone(),
        normalized: spec.scaled(m),
        scale: m.clone(),
        exact,
    });
    ValidationReport {
        balanced,
        tenable,
        irreducible,
        balance: m.as_ref().map(ratio_to_f64),
        violations,
        normalized,
    }
}

/// Pairs `(i, j)` such that color `j` is not reachable from color `i` in the
/// digraph with an edge `i -> j` whenever `r_ij > 0` and `i != j`.
fn unreachable_pairs(spec: &UrnSpec) -> Vec<(usize, usize)> {
    let s = spec.colors();
    let mut out = Vec::new();
    for start in 0..s {
        let mut seen = vec![false; s];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in 0..s {
                if i != j && !seen[j] && spec.r[i][j].is_positive() {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        out.extend(seen.iter().enumerate().filter(|(_, &ok)| !ok).map(|(j, _)| (start, j)));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrnState {
    pub n: usize,
    pub x: Vec<f64>,
}

impl UrnState {
    pub fn initial(spec: &UrnSpec) -> Self {
        UrnState { n: 0, x: spec.x0_f64() }
    }

    pub fn total(&self) -> f64 {
        self.x.iter().sum()
    }
}

/// Draws color `k` with probability `x_k / |x|`.
pub fn draw_color<R: Rng + ?Sized>(x: &[f64], total: f64, rng: &mut R) -> usize {
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &xk) in x.iter().enumerate() {
        if xk <= 0.0 {
            continue;
        }
        acc += xk;
        last = k;
        if target < acc {
            return k;
        }
    }
    last
}

/// Fast stepping over a fixed replacement matrix.
#[derive(Debug, Clone)]
pub struct Stepper {
    rows: Vec<Vec<f64>>,
    scale: f64,
}

impl Stepper {
    pub fn new(spec: &UrnSpec) -> Self {
        let rows = spec.r_f64();
        let scale = rows.iter().flatten().fold(0.0f64, |a, b| a.max(b.abs())).max(1.0);
        Stepper { rows, scale }
    }

    /// Advances `x` in place; returns the drawn color.
    pub fn advance<R: Rng + ?Sized>(&self, x: &mut [f64], step: usize, rng: &mut R) -> Result<usize> {
        let total: f64 = x.iter().sum();
        let k = draw_color(x, total, rng);
        for (xj, rj) in x.iter_mut().zip(&self.rows[k]) {
            *xj += rj;
        }
        let floor = -1e-9 * self.scale;
        for (j, xj) in x.iter_mut().enumerate() {
            if *xj < 0.0 {
                if *xj < floor {
                    return Err(Error::LeftOrthant { step: step + 1, color: j + 1, value: *xj });
                }
                *xj = 0.0;
            }
        }
        Ok(k)
    }
}

pub fn step<R: Rng + ?Sized>(state: &UrnState, spec: &UrnSpec, rng: &mut R) -> Result<UrnState> {
    let mut x = state.x.clone();
    Stepper::new(spec).advance(&mut x, state.n, rng)?;
    Ok(UrnState { n: state.n + 1, x })
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub name: Option<String>,
    pub seed: u64,
    pub states: Vec<UrnState>,
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let s = self.states.first().map_or(0, |st| st.x.len());
        let header: Vec<String> =
            std::iter::once("n".to_string()).chain((1..=s).map(|j| format!("x_{j}"))).collect();
        writeln!(out, "{}", header.join(","))?;
        for st in &self.states {
            let cells: Vec<String> =
                std::iter::once(st.n.to_string()).chain(st.x.iter().map(|v| format_float(*v))).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

pub(crate) fn format_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:e}")
    }
}

/// Simulates `n_max` steps from `X0`; a pure function of `(spec, n_max, seed)`.
pub fn simulate(spec: &UrnSpec, n_max: usize, seed: u64) -> Result<Trajectory> {
    let stepper = Stepper::new(spec);
    let mut rng = rng::stream(seed, 0);
    let mut x = spec.x0_f64();
    let mut states = Vec::with_capacity(n_max + 1);
    states.push(UrnState { n: 0, x: x.clone() });
    for n in 0..n_max {
        stepper.advance(&mut x, n, &mut rng)?;
        states.push(UrnState { n: n + 1, x: x.clone() });
    }
    Ok(Trajectory { name: spec.name.clone(), seed, states })
}

/// All `s^n` draw sequences of length `n` with their probabilities, in
/// depth-first order. Branches of probability zero are dropped.
pub fn enumerate_paths_exact(spec: &UrnSpec, n: usize, budget: u128) -> Result<Vec<(Vec<BigRational>, BigRational)>> {
    enumerate_generic(spec.r(), spec.x0(), n, budget)
}

/// Floating-point counterpart of [`enumerate_paths_exact`].
pub fn enumerate_paths(spec: &UrnSpec, n: usize, budget: u128) -> Result<Vec<(Vec<f64>, f64)>> {
    enumerate_generic(&spec.r_f64(), &spec.x0_f64(), n, budget)
}

fn enumerate_generic<T>(r: &[Vec<T>], x0: &[T], n: usize, budget: u128) -> Result<Vec<(Vec<T>, T)>>
where
    T: Clone + Num + PartialOrd,
{
    let s = x0.len() as u128;
    let leaves = s.checked_pow(n as u32).unwrap_or(u128::MAX);
    if leaves > budget {
        return Err(Error::BudgetExceeded { what: "path enumeration", needed: leaves, budget });
    }
    let mut out = Vec::new();
    let mut stack = vec![(x0.to_vec(), T::one(), 0usize)];
    while let Some((x, p, depth)) = stack.pop() {
        if depth == n {
            out.push((x, p));
            continue;
        }
        let total = x.iter().cloned().fold(T::zero(), |a, b| a + b);
        for k in (0..x.len()).rev() {
            if x[k] <= T::zero() {
                continue;
            }
            let pk = p.clone() * x[k].clone() / total.clone();
            let next: Vec<T> = x.iter().zip(&r[k]).map(|(a, b)| a.clone() + b.clone()).collect();
            if let Some(j) = next.iter().position(|v| *v < T::zero()) {
                return Err(Error::LeftOrthant { step: depth + 1, color: j + 1, value: f64::NAN });
            }
            stack.push((next, pk, depth + 1));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn validate_positive_fixture() {
        let spec = UrnSpec::from_integers(&[vec![2, 1], vec![1, 2]], &[1, 1]).unwrap();
        let report = validate(&spec);
        assert!(report.balanced && report.tenable && report.irreducible);
        let urn = report.into_result().unwrap();
        assert_eq!(urn.scale, q(3, 1));
        assert_eq!(urn.normalized.r()[0], vec![q(2, 3), q(1, 3)]);
        assert_eq!(urn.normalized.x0(), &[q(1, 3), q(1, 3)]);
    }

    #[test]
    fn validate_negative_diagonal_via_divisibility() {
        let spec = UrnSpec::from_integers(&[vec![-1, 2], vec![1, 0]], &[2, 1]).unwrap();
        let report = validate(&spec);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(report.balance, Some(1.0));
    }

    #[test]
    fn validate_rejects_bad_divisibility() {
        let spec = UrnSpec::from_integers(&[vec![-2, 3], vec![1, 0]], &[2, 1]).unwrap();
        // row sums 1 and 1 but |r11| = 2 does not divide r21 = 1
        let report = validate(&spec);
        assert!(!report.tenable);
    }

    #[test]
    fn validate_reducible() {
        let spec = UrnSpec::from_integers(&[vec![1, 0], vec![0, 1]], &[1, 1]).unwrap();
        let err = validate(&spec).into_result().unwrap_err();
        assert!(err.violations().iter().any(|v| v.kind() == "Reducible"));
    }

    #[test]
    fn validate_unbalanced_and_negative_off_diagonal() {
        let spec = UrnSpec::from_integers(&[vec![2, 1], vec![1, 1]], &[1, 1]).unwrap();
        assert!(!validate(&spec).balanced);
        let spec = UrnSpec::from_integers(&[vec![3, -1], vec![1, 1]], &[1, 1]).unwrap();
        assert!(!validate(&spec).tenable);
    }

    #[test]
    fn validate_float_spec_with_tolerance() {
        let spec = UrnSpec::from_f64(&[vec![0.1, 0.2], vec![0.15, 0.15]], &[1.0, 1.0]).unwrap();
        let report = validate(&spec);
        assert!(report.balanced);
        assert!((report.balance.unwrap() - 0.3).abs() < 1e-12);
        let spec = UrnSpec::from_f64(&[vec![-0.5, 1.5], vec![1.0, 0.0]], &[1.0, 1.0]).unwrap();
        assert!(!validate(&spec).tenable);
    }

    #[test]
    fn json_roundtrip_and_schema_errors() {
        let spec = UrnSpec::from_json(r#"{"R": [[2, 1], [1, 2]], "X0": [1, "1/2"], "name": "p"}"#).unwrap();
        assert_eq!(spec.x0()[1], q(1, 2));
        let back = UrnSpec::from_json(&spec.to_json().to_string()).unwrap();
        assert_eq!(back, spec);
        assert!(matches!(UrnSpec::from_json(r#"{"R": [[1]]}"#), Err(Error::Schema(_))));
        assert!(matches!(UrnSpec::from_json(r#"{"R": [[1, 2]], "X0": [1]}"#), Err(Error::Schema(_))));
        assert!(matches!(UrnSpec::from_json(r#"{"R": [[1]], "X0": [1], "extra": 1}"#), Err(Error::Schema(_))));
    }

    #[test]
    fn degenerate_mass_draws_only_that_color() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert_eq!(draw_color(&[4.0, 0.0], 4.0, &mut rng), 0);
        }
    }

    #[test]
    fn step_outcomes_for_negative_fixture() {
        let spec = UrnSpec::from_integers(&[vec![-1, 2], vec![1, 0]], &[2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let st = UrnState::initial(&spec);
        let mut first = 0;
        for _ in 0..30_000 {
            let next = step(&st, &spec, &mut rng).unwrap();
            if next.x == vec![1.0, 3.0] {
                first += 1;
            } else {
                assert_eq!(next.x, vec![3.0, 1.0]);
            }
            assert_eq!(next.n, 1);
        }
        let p = first as f64 / 30_000.0;
        let se = (2.0 / 9.0 / 30_000.0f64).sqrt();
        assert!((p - 2.0 / 3.0).abs() < 4.0 * se, "p = {p}");
    }

    #[test]
    fn simulate_is_deterministic_and_mass_grows_linearly() {
        let spec = UrnSpec::from_integers(&[vec![2, 1], vec![1, 2]], &[1, 1]).unwrap();
        assert_eq!(simulate(&spec, 0, 1).unwrap().states, vec![UrnState { n: 0, x: vec![1.0, 1.0] }]);
        for seed in 0..20 {
            let t = simulate(&spec, 2, seed).unwrap();
            assert_eq!(t.states[2].total(), 8.0);
        }
        let a = simulate(&spec, 50, 9).unwrap();
        let b = simulate(&spec, 50, 9).unwrap();
        assert_eq!(a.states, b.states);
        for st in &a.states {
            assert_eq!(st.total(), 2.0 + 3.0 * st.n as f64);
        }
    }

    #[test]
    fn trajectory_csv_layout() {
        let spec = UrnSpec::from_integers(&[vec![2, 1], vec![1, 2]], &[1, 1]).unwrap();
        let mut buf = Vec::new();
        simulate(&spec, 1, 3).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,x_1,x_2");
        assert_eq!(lines[1], "0,1,1");
        assert!(lines[2] == "1,3,2" || lines[2] == "1,2,3");
    }

    #[test]
    fn enumerate_small_cases() {
        let spec = UrnSpec::from_integers(&[vec![2, 1], vec![1, 2]], &[1, 1]).unwrap();
        assert_eq!(enumerate_paths_exact(&spec, 0, 10).unwrap(), vec![(spec.x0().to_vec(), q(1, 1))]);
        let one = enumerate_paths_exact(&spec, 1, 10).unwrap();
        assert_eq!(one.len(), 2);
        assert!(one.contains(&(vec![q(3, 1), q(2, 1)], q(1, 2))));
        assert!(one.contains(&(vec![q(2, 1), q(3, 1)], q(1, 2))));
        let two = enumerate_paths_exact(&spec, 2, 10).unwrap();
        assert_eq!(two.len(), 4);
        let total = two.iter().fold(BigRational::zero(), |a, (_, p)| a + p);
        assert_eq!(total, q(1, 1));
        // (3,2) then color 1 has probability 1/2 * 3/5
        assert!(two.contains(&(vec![q(5, 1), q(3, 1)], q(3, 10))));
        assert!(matches!(enumerate_paths_exact(&spec, 30, 1000), Err(Error::BudgetExceeded { .. })));
    }
}
