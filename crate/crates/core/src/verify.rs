//! The acceptance checks, one function per criterion, each returning its
//! measured quantities alongside a pass/fail status.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{ratio_to_f64, Field};
use crate::moments::{
    direction_variance, gaussian_moment, log_factor, log_factor_necessary, mc_standardized_moments,
    observable_moments, verify_power_moments, BoundKind, McConfig, MomentEngine,
};
use crate::poly::{of_degree, MultiIndex, PhiOperator, Polynomial, LEAK_TOL};
use crate::reduction::{
    check_critical_case, check_l1, check_m_a_alpha, check_m_alpha_sigma, check_nilpotence_bounds,
    cone_descriptions_agree, m_functional, verify_stability, CheckReport, ConeSigma, ReducedBasis,
};
use crate::rng;
use crate::spectral::{Arith, Decomposition, SpectralDecomposition, SpectralOptions, UrnClass, UrnKind};
use crate::urn::{enumerate_paths_exact, NormalizedUrn};

/// Leaves allowed in the path-enumeration oracle.
pub const ORACLE_LEAVES: u128 = 1 << 16;

/// Relative tolerance of the pointwise `Phi` identity.
pub const PHI_TOL: f64 = 1e-8;

/// Relative threshold for "nonzero" in the float nilpotence check.
pub const NILPOTENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub degree_cap: u32,
    pub stability_cap: u32,
    pub oracle_n: usize,
    pub oracle_degree: u32,
    pub phi_pairs: usize,
    pub growth_n_max: usize,
    pub growth_degree: u32,
    pub mc_n: usize,
    pub mc_samples: usize,
    pub mc_resamples: usize,
    pub mc_k_max: u32,
    pub z: f64,
    pub variance_n: (usize, usize),
    pub variance_tol: f64,
    pub degenerate_n: usize,
    pub cone_points: usize,
    pub cone_dims: Vec<usize>,
    /// Observable for the normality check; `e_1 - e_2` when absent.
    pub direction: Option<Vec<f64>>,
    pub seed: u64,
    pub arith: Arith,
    pub spectral: SpectralOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            degree_cap: 6,
            stability_cap: 5,
            oracle_n: 10,
            oracle_degree: 3,
            phi_pairs: 100,
            growth_n_max: 100_000,
            growth_degree: 4,
            mc_n: 10_000,
            mc_samples: 200_000,
            mc_resamples: 200,
            mc_k_max: 6,
            z: 4.0,
            variance_n: (5_000, 10_000),
            variance_tol: 0.10,
            degenerate_n: 1_000,
            cone_points: 1_000,
            cone_dims: vec![2, 3, 4],
            direction: None,
            seed: 0,
            arith: Arith::Auto,
            spectral: SpectralOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub status: Status,
    pub measured: Value,
}

impl Outcome {
    fn new(id: u32, name: &'static str, passed: bool, measured: Value) -> Self {
        let status = if passed { Status::Pass } else { Status::Fail };
        Outcome { id, name, status, measured }
    }

    fn skipped(id: u32, name: &'static str, reason: &str) -> Self {
        Outcome { id, name, status: Status::Skipped, measured: json!({ "reason": reason }) }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub urn: Option<String>,
    pub class: Value,
    pub passed: bool,
    pub criteria: Vec<Outcome>,
}

/// Everything the checks share for one urn.
pub struct Context {
    pub urn: NormalizedUrn,
    pub dec: Decomposition,
    pub complex: SpectralDecomposition<Complex64>,
    pub class: UrnClass,
}

impl Context {
    pub fn new(urn: NormalizedUrn, cfg: &VerifyConfig) -> Result<Self> {
        let dec = crate::spectral::decompose(&urn, cfg.arith, &cfg.spectral)?;
        let complex = dec.complex();
        let class = dec.classify();
        Ok(Context { urn, dec, complex, class })
    }

    fn x0_complex(&self) -> Vec<Complex64> {
        self.urn.normalized.x0_f64().into_iter().map(|v| Complex64::new(v, 0.0)).collect()
    }

    fn direction(&self, cfg: &VerifyConfig) -> Vec<f64> {
        cfg.direction.clone().unwrap_or_else(|| {
            let mut w = vec![0.0; self.urn.colors()];
            w[0] = 1.0;
            if w.len() > 1 {
                w[1] = -1.0;
            }
            w
        })
    }
}

macro_rules! with_dec {
    ($dec:expr, $d:ident => $body:expr) => {
        match $dec {
            Decomposition::Exact($d) => $body,
            Decomposition::Float($d) => $body,
        }
    };
}

pub fn class_json(class: &UrnClass) -> Value {
    json!({
        "class": class.kind.to_string(),
        "sigma2": class.sigma2,
        "d": class.d,
        "nu": class.nu,
        "critical_eigenvalues": class.critical_eigenvalues.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
    })
}

/// Runs every criterion on one urn. Large urns are refused.
pub fn run(urn: NormalizedUrn, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let ctx = Context::new(urn, cfg)?;
    if ctx.class.kind == UrnKind::Large {
        return Err(Error::NotSmall { class: "Large".into() });
    }
    let checks: [(u32, &'static str, fn(&Context, &VerifyConfig) -> Result<Outcome>); 10] = [
        (1, "oracle equivalence", oracle),
        (2, "classification", classification),
        (3, "phi correctness", phi_correctness),
        (4, "reduced polynomials", reduced_polynomials),
        (5, "stability of F_alpha", stability),
        (6, "lemma checks", lemma_checks),
        (7, "moment growth", moment_growth),
        (8, "normal limit", normal_limit),
        (9, "degenerate direction", degenerate_direction),
        (10, "cone equivalence", |_, cfg| cone_equivalence(cfg)),
    ];
    let criteria: Vec<Outcome> = checks
        .iter()
        .map(|(id, name, check)| {
            check(&ctx, cfg).unwrap_or_else(|e| Outcome::new(*id, name, false, json!({ "error": e.to_string() })))
        })
        .collect();
    Ok(VerifyReport {
        urn: ctx.urn.original.name.clone(),
        class: class_json(&ctx.class),
        passed: criteria.iter().all(Outcome::passed),
        criteria,
    })
}

/// Criterion 1: exact moments of every monomial of degree `<= oracle_degree`
/// against brute-force path enumeration, for `n <= oracle_n`.
pub fn oracle(ctx: &Context, cfg: &VerifyConfig) -> Result<Outcome> {
    const NAME: &str = "oracle equivalence";
    let Decomposition::Exact(dec) = &ctx.dec else {
        return Ok(Outcome::skipped(1, NAME, "exact decomposition unavailable"));
    };
    let s = dec.dim();
    let mut n_max = cfg.oracle_n;
    while n_max > 0 && (s as u128).saturating_pow(n_max as u32) > ORACLE_LEAVES {
        n_max -= 1;
    }
    let monomials: Vec<MultiIndex> = (0..=cfg.oracle_degree).flat_map(|d| of_degree(s, d)).collect();
    let x0 = ctx.urn.normalized.x0().to_vec();
    let engine = MomentEngine::new(dec, &x0, monomials.clone())?;
    let weights: Vec<_> = monomials
        .iter()
        .map(|m| engine.weights(&Polynomial::monomial(m.clone())))
        .collect::<Result<_>>()?;
    let mut series: Vec<Vec<BigRational>> = Vec::new();
    engine.run(n_max, |_, state| {
        series.push(weights.iter().map(|w| MomentEngine::evaluate(w, state)).collect());
    })?;

    let scale = ctx.urn.scale.clone();
    let mut mismatches = Vec::new();
    for (n, row) in series.iter().enumerate() {
        let paths = enumerate_paths_exact(&ctx.urn.original, n, ORACLE_LEAVES)?;
        let coords: Vec<(Vec<BigRational>, BigRational)> = paths
            .into_iter()
            .map(|(x, p)| {
                let xn: Vec<BigRational> = x.iter().map(|v| v / &scale).collect();
                (dec.coords(&xn), p)
            })
            .collect();
        for (m, expected_engine) in monomials.iter().zip(row) {
            let f = Polynomial::monomial(m.clone());
            let brute = coords
                .iter()
                .fold(BigRational::from_i64(0), |acc, (u, p)| acc + p * f.eval_coords(u));
            if brute != *expected_engine {
                mismatches.push(format!("n={n} alpha={m}: engine {expected_engine} vs paths {brute}"));
            }
        }
    }
    Ok(Outcome::new(
        1,
        NAME,
        mismatches.is_empty(),
        json!({ "n_max": n_max, "monomials": monomials.len(), "mismatches": mismatches }),
    ))
}

/// Criterion 2: classification, with exact and floating-point paths agreeing
/// whenever both are available.
pub fn classification(ctx: &Context, cfg: &VerifyConfig) -> Result<Outcome> {
    let float = crate::spectral::decompose_float(&ctx.urn, &cfg.spectral)?;
    let float_class = crate::spectral::classify(&float);
    let agree = float_class.kind == ctx.class.kind && float_class.d == ctx.class.d && float_class.nu == ctx.class.nu;
    let mut measured = class_json(&ctx.class);
    measured["exact"] = json!(ctx.dec.is_exact());
    measured["float_class"] = class_json(&float_class);
    measured["chain_residual"] = json!(float.chain_residual());
    measured["duality_residual"] = json!(float.duality_residual());
    Ok(Outcome::new(2, "classification", agree, measured))
}

/// Criterion 3: pointwise identity `Phi(f)(x) = sum_k x_k (f(x + w_k) - f(x))`
/// on random pairs, and `Phi`-stability of every `S_alpha` with `|alpha| <= cap`.
pub fn phi_correctness(ctx: &Context, cfg: &VerifyConfig) -> Result<Outcome> {
    let dec = &ctx.complex;
    let s = dec.dim();
    let phi = PhiOperator::new(dec);
    let pool: Vec<MultiIndex> = (0..=cfg.degree_cap.min(4)).flat_map(|d| of_degree(s, d)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..cfg.phi_pairs as u64 {
        let mut rng = rng::stream(cfg.seed ^ 0x5048_4931, i);
        let terms: Vec<(MultiIndex, Complex64)> = (0..5)
            .map(|_| {
                let m = pool[rng.gen_range(0..pool.len())].clone();
                (m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            })
            .collect();
        let f = Polynomial::from_terms(s, terms);
        let x: Vec<Complex64> = (0..s).map(|_| Complex64::new(rng.gen_range(0.1..5.0), 0.0)).collect();
        let fx = f.eval_coords(&dec.coords(&x));
        let lhs = phi.apply(&f).eval_coords(&dec.coords(&x));
        let mut rhs = Complex64::new(0.0, 0.0);
        let mut magnitude = 1.0f64;
        for k in 0..s {
            let shifted: Vec<Complex64> = x.iter().zip(&dec.replacement[k]).map(|(a, b)| a + b).collect();
            let fk = f.eval_coords(&dec.coords(&shifted));
            rhs += x[k] * (fk - fx);
            magnitude += x[k].norm() * (fk.norm() + fx.norm());
        }
        worst = worst.max((lhs - rhs).norm() / magnitude);
    }
    let leaks = with_dec!(&ctx.dec, d => stability_leaks(d, cfg.degree_cap));
    Ok(Outcome::new(
        3,
        "phi correctness",
        worst <= PHI_TOL && leaks.is_empty(),
        json!({ "pairs": cfg.phi_pairs, "max_relative_error": worst, "degree_cap": cfg.degree_cap, "leaks": leaks }),
    ))
}

/// Monomials `beta` with `|beta| <= cap` whose image under `Phi` has a
/// non-negligible term above `beta`.
fn stability_leaks<F: Field>(dec: &SpectralDecomposition<F>, cap: u32) -> Vec<String> {
    let phi = PhiOperator::new(dec);
    let mut leaks = Vec::new();
    for beta in (0..=cap).flat_map(|d| of_degree(dec.dim(), d)) {
        for (gamma, c) in phi.apply_monomial(&beta).terms() {
            if *gamma > beta && !c.negligible(LEAK_TOL) {
                leaks.push(format!("{beta} -> {gamma}"));
            }
        }
    }
    leaks
}

/// `Phi` restricted to the monomials of a reduced basis, as sparse columns.
struct PhiColumns<F> {
    columns: Vec<Vec<(usize, F)>>,
}

impl<F: Field> PhiColumns<F> {
    fn new(basis: &ReducedBasis<F>) -> Result<Self> {
        let columns = basis
            .positions()
            .iter()
            .map(|beta| {
                basis
                    .phi()
                    .apply_monomial(beta)
                    .terms()
                    .map(|(g, c)| {
                        basis.position(g).map(|p| (p, c.clone())).ok_or_else(|| Error::StabilityViolation {
                            column: beta.to_string(),
                            leak: g.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(PhiColumns { columns })
    }

    /// `(Phi - d) t` for `t` in monomial coordinates.
    fn shifted(&self, t: &BTreeMap<usize, F>, d: &F) -> BTreeMap<usize, F> {
        let mut out: BTreeMap<usize, F> = BTreeMap::new();
        for (p, v) in t {
            for (g, c) in &self.columns[*p] {
                let e = out.entry(*g).or_insert_with(F::zero);
                *e = e.clone() + v.clone() * c.clone();
            }
            let e = out.entry(*p).or_insert_with(F::zero);
            *e = e.clone() - v.clone() * d.clone();
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

fn max_modulus<F: Field>(t: &BTreeMap<usize, F>) -> f64 {
    t.values().map(Field::modulus).fold(0.0, f64::max)
}

fn nilpotence_violations<F: Field>(basis: &ReducedBasis<F>, dec: &SpectralDecomposition<F>) -> Result<(usize, Vec<String>)> {
    let cols = PhiColumns::new(basis)?;
    let mut violations = Vec::new();
    let mut max_nu = 0;
    for (p, alpha) in basis.positions().iter().enumerate() {
        let nu = basis.nu(alpha)?;
        max_nu = max_nu.max(nu);
        let d = alpha.weight(dec);
        let q = basis.q_coeffs(alpha)?;
        let mut t: BTreeMap<usize, F> = q.into_iter().map(|(m, c)| (basis.position(&m).unwrap_or(p), c)).collect();
        let mut scale = max_modulus(&t);
        for _ in 0..nu {
            t = cols.shifted(&t, &d);
            scale = scale.max(max_modulus(&t));
        }
        let zero = |t: &BTreeMap<usize, F>| {
            if F::EXACT {
                t.is_empty()
            } else {
                max_modulus(t) <= NILPOTENCE_TOL * scale.max(1.0)
            }
        };
        if zero(&t) {
            violations.push(format!("alpha={alpha}: (Phi-d)^nu Q vanishes with nu={nu}"));
        }
        let next = cols.shifted(&t, &d);
        if !zero(&next) {
            violations.push(format!("alpha={alpha}: (Phi-d)^(nu+1) Q = {:e}", max_modulus(&next)));
        }
    }
    Ok((max_nu, violations))
}

/// `Q_{c delta_1}` against the rising product `u_1 (u_1 + 1) ... (u_1 + c - 1)`.
fn rising_product_mismatches<F: Field>(basis: &ReducedBasis<F>, s: usize, c_max: u32) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let u1 = Polynomial::monomial(MultiIndex::delta(s, 0));
    let mut product = Polynomial::constant(s, F::one());
    for c in 1..=c_max {
        product = product.mul(&u1.add(&Polynomial::constant(s, F::from_i64(c as i64 - 1))));
        let alpha = MultiIndex::new((0..s).map(|k| if k == 0 { c } else { 0 }).collect());
        let q = basis.q_poly(&alpha)?;
        let diff = q.sub(&product);
        let bad = if F::EXACT { !diff.is_empty() } else { diff.max_modulus() > 1e-9 * product.max_modulus() };
        if bad {
            out.push(format!("c={c}"));
        }
    }
    Ok(out)
}

/// Criterion 4: nilpotence indices, rising products and triangularity of
/// the reduced basis up to `degree_cap`.
pub fn reduced_polynomials(ctx: &Context, cfg: &VerifyConfig) -> Result<Outcome> {
    with_dec!(&ctx.dec, dec => {
        let basis = ReducedBasis::up_to_degree(dec, cfg.degree_cap)?;
        let (max_nu, violations) = nilpotence_violations(&basis, dec)?;
        let rising = rising_product_mismatches(&basis, dec.dim(), cfg.degree_cap.min(4))?;
        let triangular = basis.is_unit_triangular();
        Ok(Outcome::new(
            4,
            "reduced polynomials",
            violations.is_empty() && rising.is_empty() && triangular,
            json!({
                "exact": ctx.dec.is_exact(),
                "basis_size": basis.len(),
                "max_nu": max_nu,
                "nilpotence_violations": violations,
                "rising_product_mismatches": rising,
                "unit_triangular": triangular,
                "condition": basis.condition(),
            }),
        ))
    })
}

/// Criterion 5: the expansion of `(Phi - <lambda,alpha>) Q_alpha` stays in `K_alpha`.
pub fn stability(ctx: &Context, cfg: &VerifyConfig) -> Result<Outcome> {
    with_dec!(&ctx.dec, dec => {
        let basis = ReducedBasis::up_to_degree(dec, cfg.stability_cap)?;
        let mut failures = Vec::new();
        let mut checked = 0;
        let mut nonempty = 0;
        for alpha in basis.positions().iter().filter(|a| !a.is_zero()) {
            let report = verify_stability(&basis, alpha, dec)?;
            checked += 1;
            if !report.support.is_empty() {
                nonempty += 1;
            }
            if !report.passed() {
                failures.push(json!(report));
            }
        }
        Ok(Outcome::new(
            5,
            "stability of F_alpha",
            failures.is_empty(),
            json!({ "checked": checked, "nonzero_expansions": nonempty, "failures": failures }),
        ))
    })
}

fn m_value_checks<F: Field>(dec: &SpectralDecomposition<F>) -> Result<CheckReport> {
    let s = dec.dim();
    let mut report = CheckReport { name: "M-functional values".into(), checked: 0, violations: Vec::new() };
    for block in dec.critical_blocks() {
        for k in block.indices() {
            let p = (k - block.start) as i64 + 2;
            let mut g = vec![0i64; s];
            g[k] = 2;
            g[0] = -1;
            report.checked += 1;
            let m = m_functional(&g, block)?;
            if m != (2 * p - 3) as f64 {
                report.violations.push(format!("M(2d_{p} - d_1) = {m}, expected {}", 2 * p - 3));
            }
            if k > block.start {
                let mut g = vec![0i64; s];
                g[k] = 1;
                g[k - 1] = -1;
                report.checked += 1;
                let m = m_functional(&g, block)?;
                if m != 1.0 {
                    report.violations.push(format!("M(d_{p} - d_{}) = {m}, expected 1", p - 1));
                }
            }
        }
    }
    Ok(report)
}

/// Criterion 6: enumerated lemma checks on all powers up to `degree_cap`.
pub fn lemma_checks(ctx: &Context, cfg: &VerifyConfig) -> Result<Outcome> {
    if ctx.urn.colors() > 4 {
        return Ok(Outcome::skipped(6, "lemma checks", "enumeration limited to s <= 4"));
    }
    with_dec!(&ctx.dec, dec => {
        let cap = cfg.degree_cap;
        let basis = ReducedBasis::up_to_degree(dec, cap)?;
        let reports = vec![
            check_l1(dec, cap),
            check_critical_case(dec, cap),
            check_m_a_alpha(dec, cap),
            check_m_alpha_sigma(dec, cap),
            check_nilpotence_bounds(&basis, dec, cap)?,
            m_value_checks(dec)?,
        ];
        Ok(Outcome::new(6, "lemma checks", reports.iter().all(CheckReport::passed), json!(reports)))
    })
}

/// Criterion 7: growth of exact power moments against their bounds.
pub fn moment_growth(ctx: &Context, cfg: &VerifyConfig) -> Result<Outcome> {
    let grid = crate::moments::default_grid(cfg.growth_n_max);
    let reports = verify_power_moments(&ctx.complex, &ctx.x0_complex(), &ctx.class, cfg.growth_degree, &grid)?;
    let bounded = reports.iter().all(|r| r.passed());
    let critical = ctx.class.kind == UrnKind::CriticallySmall;
    let necessary = log_factor_necessary(&reports);
    let summary: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "alpha": r.alpha,
                "kind": r.kind,
                "first_decade_max": r.first_decade_max,
                "last_decade_max": r.last_decade_max,
                "bounded": r.bounded(),
                "divergent": r.divergent(),
            })
        })
        .collect();
    let has_critical = reports.iter().any(|r| r.kind == BoundKind::StrictlyCritical);
    Ok(Outcome::new(
        7,
        "moment growth",
        bounded && (!critical || (has_critical && necessary)),
        json!({
            "n_max": cfg.growth_n_max,
            "degree": cfg.growth_degree,
            "log_exponent": ctx.class.nu,
            "log_factor_necessary": necessary,
            "reports": summary,
        }),
    ))
}

/// `Var(Y_n) / (n log^nu n)` at the two sizes of `variance_n`, exactly.
fn variance_stability(ctx: &Context, w: &[f64], cfg: &VerifyConfig) -> Result<(f64, f64)> {
    let (a, b) = cfg.variance_n;
    let wc: Vec<Complex64> = w.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let scale = Complex64::new(ctx.urn.scale_f64(), 0.0);
    let series = observable_moments(&ctx.complex, &ctx.x0_complex(), &wc, &scale, b)?;
    let nu = ctx.class.nu as f64;
    let normalized = |n: usize| series[n].1.re / (n as f64 * log_factor(n, nu));
    Ok((normalized(a), normalized(b)))
}

/// Criterion 8: standardized moments of `<w, X_n>` by simulation against the
/// Gaussian ones, and stability of the normalized exact variance.
pub fn normal_limit(ctx: &Context, cfg: &VerifyConfig) -> Result<Outcome> {
    let w = ctx.direction(cfg);
    let scale = ctx.urn.scale_f64();
    let gamma = direction_variance(&ctx.complex, &ctx.x0_complex(), &ctx.class, &w, scale, cfg.mc_n)?;
    let (va, vb) = variance_stability(ctx, &w, cfg)?;
    let relative = (vb - va).abs() / vb.abs().max(f64::MIN_POSITIVE);
    let stable = relative <= cfg.variance_tol;
    let mc_cfg = McConfig {
        n: cfg.mc_n,
        samples: cfg.mc_samples,
        seed: cfg.seed,
        k_max: cfg.mc_k_max,
        resamples: cfg.mc_resamples,
    };
    let report = mc_standardized_moments(&ctx.urn.original, &w, gamma, &mc_cfg)?;
    let gated: Vec<_> = report.moments.iter().filter(|m| m.k >= 3).collect();
    let moments_ok = gated.iter().all(|m| m.within(cfg.z));
    let exact = observable_moments(
        &ctx.complex,
        &ctx.x0_complex(),
        &w.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>(),
        &Complex64::new(scale, 0.0),
        cfg.mc_n,
    )?[cfg.mc_n];
    Ok(Outcome::new(
        8,
        "normal limit",
        moments_ok && stable,
        json!({
            "direction": w,
            "n": cfg.mc_n,
            "samples": cfg.mc_samples,
            "gamma": gamma,
            "moments": report.moments.iter().map(|m| json!({
                "k": m.k,
                "value": m.value,
                "stderr": m.stderr,
                "reference": gaussian_moment(m.k),
                "within": m.within(cfg.z),
            })).collect::<Vec<_>>(),
            "mc_mean": report.mean,
            "mc_mean_stderr": report.mean_stderr,
            "exact_mean": exact.0.re,
            "mc_variance": report.variance,
            "mc_variance_stderr": report.variance_stderr,
            "exact_variance": exact.1.re,
            "normalized_variance": [[cfg.variance_n.0, va], [cfg.variance_n.1, vb]],
            "normalized_variance_relative_change": relative,
        }),
    ))
}

/// Criterion 9: `Var <1, X_n> = 0` at every `n`, from exact second moments.
pub fn degenerate_direction(ctx: &Context, cfg: &VerifyConfig) -> Result<Outcome> {
    let s = ctx.urn.colors();
    let n = cfg.degenerate_n;
    let (max_variance, exact) = match &ctx.dec {
        Decomposition::Exact(dec) => {
            let ones = vec![BigRational::from_i64(1); s];
            let series = observable_moments(dec, ctx.urn.normalized.x0(), &ones, &ctx.urn.scale, n)?;
            let worst = series.iter().map(|(_, v)| ratio_to_f64(v).abs()).fold(0.0, f64::max);
            let all_zero = series.iter().all(|(_, v)| v.is_zero());
            (if all_zero { 0.0 } else { worst.max(f64::MIN_POSITIVE) }, true)
        }
        Decomposition::Float(dec) => {
            let ones = vec![Complex64::new(1.0, 0.0); s];
            let series = observable_moments(dec, &ctx.x0_complex(), &ones, &Complex64::new(ctx.urn.scale_f64(), 0.0), n)?;
            let worst = series
                .iter()
                .map(|(m, v)| v.norm() / (v.re + m.norm_sqr()).abs().max(1.0))
                .fold(0.0, f64::max);
            (worst, false)
        }
    };
    let passed = if exact { max_variance == 0.0 } else { max_variance <= crate::moments::DEGENERACY_TOL };
    Ok(Outcome::new(
        9,
        "degenerate direction",
        passed,
        json!({ "n_max": n, "exact": exact, "max_variance": max_variance }),
    ))
}

/// Criterion 10: face and edge descriptions of `Sigma` agree on random
/// rational points.
pub fn cone_equivalence(cfg: &VerifyConfig) -> Result<Outcome> {
    let mut per_dim = Vec::new();
    let mut total_disagreements = 0;
    for &s in &cfg.cone_dims {
        let cone = ConeSigma::new(s);
        let (mut inside, mut outside, mut disagreements) = (0, 0, Vec::new());
        for i in 0..cfg.cone_points as u64 {
            let mut rng = rng::stream(cfg.seed ^ 0xC0DE, (s as u64) << 32 | i);
            let x: Vec<BigRational> = (0..s)
                .map(|_| BigRational::new(rng.gen_range(-12i64..=12).into(), rng.gen_range(1i64..=4).into()))
                .collect();
            if cone.contains(&x) {
                inside += 1;
            } else {
                outside += 1;
            }
            if !cone_descriptions_agree(&cone, &x) {
                disagreements.push(x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
            }
        }
        total_disagreements += disagreements.len();
        per_dim.push(json!({ "s": s, "inside": inside, "outside": outside, "disagreements": disagreements }));
    }
    Ok(Outcome::new(10, "cone equivalence", total_disagreements == 0, json!(per_dim)))
}
