//! Command-line front end. [`main`] parses arguments, runs one subcommand and
//! returns the process exit status.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::moments::{
    direction_variance, gaussian_moment, log_factor, mc_standardized_moments, MomentEngine, McConfig,
};
use crate::poly::{phi_matrix, MultiIndex, Polynomial};
use crate::reduction::{compute_power_sets, verify_stability, ConeSigma, ReducedBasis};
use crate::spectral::{decompose, Arith, Decomposition, SpectralDecomposition, SpectralOptions, UrnKind};
use crate::urn::{simulate, validate, NormalizedUrn, UrnSpec};
use crate::verify::{self, class_json, VerifyConfig};

macro_rules! with_dec {
    ($dec:expr, $d:ident => $body:expr) => {
        match $dec {
            Decomposition::Exact($d) => $body,
            Decomposition::Float($d) => $body,
        }
    };
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LARGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "urnlab", version, about = "Analysis of balanced Pólya urns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Urn spec (JSON); `-` reads standard input.
    #[arg(long, global = true, default_value = "-")]
    pub input: String,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true, env = "URNLAB_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    #[arg(long = "mc-samples", global = true)]
    pub mc_samples: Option<usize>,
    #[arg(long = "degree-cap", global = true)]
    pub degree_cap: Option<u32>,
    #[arg(long = "tolerance-eigen", global = true, default_value_t = 1e-7)]
    pub tolerance_eigen: f64,
    #[arg(long = "tolerance-rank", global = true, default_value_t = 1e-9)]
    pub tolerance_rank: f64,
    #[arg(long, global = true, value_enum, default_value_t = ArithArg::Auto)]
    pub arith: ArithArg,
    /// Omit the timestamp so identical runs give identical bytes.
    #[arg(long, global = true)]
    pub reproducible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArithArg {
    Auto,
    Rational,
    Float,
}

impl From<ArithArg> for Arith {
    fn from(a: ArithArg) -> Self {
        match a {
            ArithArg::Auto => Arith::Auto,
            ArithArg::Rational => Arith::Rational,
            ArithArg::Float => Arith::Float,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral decomposition and small/large classification.
    Classify,
    /// One trajectory as CSV.
    Simulate,
    /// Matrix of Phi on the span of u^beta, beta <= alpha.
    PhiMatrix {
        #[arg(long)]
        alpha: String,
    },
    /// Reduced polynomial Q_alpha with its nilpotence index.
    Qpoly {
        #[arg(long)]
        alpha: String,
    },
    /// Membership of a point in the cone Sigma, with a certificate.
    Cone {
        /// Comma-separated rationals, e.g. `2,-1/2,0`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Exact or simulated moments.
    Moments(MomentsArgs),
    /// Runs the acceptance checks on the input urn.
    Verify,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, conflicts_with = "mc")]
    pub exact: bool,
    #[arg(long)]
    pub mc: bool,
    /// Monomial u^alpha for `--exact`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Observable weights for `--mc`; `1,-1,0,...` when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<String>,
    /// Highest standardized moment for `--mc`.
    #[arg(long, default_value_t = 6)]
    pub kmax: u32,
    /// Bootstrap resamples for `--mc`.
    #[arg(long, default_value_t = 200)]
    pub resamples: usize,
    /// Emit every `every`-th n for `--exact`.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
}

/// Entry point for the binary: returns the exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    run(cli)
}

pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            if code == EXIT_LARGE {
                eprintln!("error: urn is large: the normal limit theorems need Re lambda_2 <= lambda_1 / 2");
            } else {
                eprintln!("error: {e}");
            }
            code
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema(_) | Error::Invalid(_) | Error::Io(_) => EXIT_INPUT,
        Error::NotSmall { .. } => EXIT_LARGE,
        _ => EXIT_CHECK_FAILED,
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    check_config(g)?;
    if let Some(n) = g.threads {
        // A second initialization (e.g. in tests) keeps the existing pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if let Command::Cone { point } = &cli.command {
        return emit(g, cone(point)?, None).map(|_| EXIT_OK);
    }
    let urn = load(&g.input)?;
    let opts = SpectralOptions { eigen_tol: g.tolerance_eigen, rank_tol: g.tolerance_rank };
    match &cli.command {
        Command::Classify => emit(g, classify(&urn, g.arith.into(), &opts)?, None).map(|_| EXIT_OK),
        Command::Simulate => {
            let traj = simulate(&urn.original, g.nmax.unwrap_or(1000), g.seed)?;
            if g.format == Some(Format::Json) {
                let states: Vec<Value> = traj.states.iter().map(|s| json!({ "n": s.n, "x": s.x })).collect();
                emit(g, json!({ "seed": g.seed, "states": states }), None)?;
            } else {
                let mut buf = Vec::new();
                traj.write_csv(&mut buf)?;
                write_out(g, &buf)?;
            }
            Ok(EXIT_OK)
        }
        Command::PhiMatrix { alpha } => {
            let alpha = parse_alpha(alpha, urn.colors())?;
            let dec = decompose(&urn, g.arith.into(), &opts)?;
            let (value, csv) = with_dec!(&dec, d => phi_matrix_report(d, &alpha))?;
            emit(g, value, Some(csv)).map(|_| EXIT_OK)
        }
        Command::Qpoly { alpha } => {
            let alpha = parse_alpha(alpha, urn.colors())?;
            let dec = decompose(&urn, g.arith.into(), &opts)?;
            let value = with_dec!(&dec, d => qpoly_report(d, &alpha))?;
            emit(g, value, None).map(|_| EXIT_OK)
        }
        Command::Moments(args) => moments(g, &urn, &opts, args),
        Command::Verify => {
            let mut cfg = VerifyConfig { seed: g.seed, arith: g.arith.into(), spectral: opts, ..Default::default() };
            if let Some(n) = g.nmax {
                cfg.growth_n_max = n;
            }
            if let Some(n) = g.mc_samples {
                cfg.mc_samples = n;
            }
            if let Some(d) = g.degree_cap {
                cfg.degree_cap = d;
                cfg.stability_cap = cfg.stability_cap.min(d);
            }
            let report = verify::run(urn, &cfg)?;
            let passed = report.passed;
            emit(g, serde_json::to_value(report).map_err(|e| Error::Schema(e.to_string()))?, None)?;
            Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Cone { .. } => unreachable!("handled above"),
    }
}

fn check_config(g: &Global) -> Result<()> {
    for (name, tol) in [("--tolerance-eigen", g.tolerance_eigen), ("--tolerance-rank", g.tolerance_rank)] {
        if !(tol > 0.0 && tol < 1e-2) {
            return Err(Error::Schema(format!("{name} must lie in (0, 1e-2), got {tol}")));
        }
    }
    let positive = [
        ("--nmax", g.nmax),
        ("--mc-samples", g.mc_samples),
        ("--degree-cap", g.degree_cap.map(|d| d as usize)),
        ("--threads", g.threads),
    ];
    for (name, v) in positive {
        if v == Some(0) {
            return Err(Error::Schema(format!("{name} must be positive")));
        }
    }
    Ok(())
}

fn load(input: &str) -> Result<NormalizedUrn> {
    let text = if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(input)?
    };
    validate(&UrnSpec::from_json(&text)?).into_result()
}

fn parse_alpha(text: &str, s: usize) -> Result<MultiIndex> {
    let alpha: MultiIndex = text.parse()?;
    if alpha.dim() != s {
        return Err(Error::Schema(format!("alpha has {} entries, the urn has {s} colors", alpha.dim())));
    }
    Ok(alpha)
}

fn complex_json(c: Complex64) -> Value {
    json!([c.re, c.im])
}

fn scalar_json<F: Field>(c: &F) -> Value {
    let z = c.to_complex();
    match c.exact_string() {
        Some(exact) => json!({ "value": [z.re, z.im], "exact": exact }),
        None => complex_json(z),
    }
}

fn classify(urn: &NormalizedUrn, arith: Arith, opts: &SpectralOptions) -> Result<Value> {
    let dec = decompose(urn, arith, opts)?;
    let complex = dec.complex();
    let class = dec.classify();
    let blocks: Vec<Value> = complex
        .blocks
        .iter()
        .map(|b| {
            json!({
                "eigenvalue": complex_json(b.eigenvalue),
                "start": b.start + 1,
                "size": b.size,
                "kind": complex.kinds[b.start],
            })
        })
        .collect();
    let mut out = class_json(&class);
    out["urn"] = json!(urn.original.name);
    out["colors"] = json!(urn.colors());
    out["m"] = json!(urn.scale.to_string());
    out["arith"] = json!(if dec.is_exact() { "rational" } else { "float" });
    out["eigenvalues"] = Value::Array(complex.eigenvalues.iter().map(|c| complex_json(*c)).collect());
    out["blocks"] = Value::Array(blocks);
    out["u"] = matrix_json(&complex.u);
    out["v"] = matrix_json(&complex.v);
    Ok(out)
}

fn matrix_json(m: &[Vec<Complex64>]) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(|c| complex_json(*c)).collect())).collect())
}

fn phi_matrix_report<F: Field>(dec: &SpectralDecomposition<F>, alpha: &MultiIndex) -> Result<(Value, String)> {
    let pm = phi_matrix(alpha, dec)?;
    let basis: Vec<String> = pm.basis.iter().map(|b| b.to_string()).collect();
    let mut csv = String::from("row,col,re,im\n");
    let mut rows = Vec::new();
    for (i, row) in pm.dense().iter().enumerate() {
        rows.push(Value::Array(row.iter().map(scalar_json).collect()));
        for (j, c) in row.iter().enumerate() {
            if !c.is_zero() {
                let z = c.to_complex();
                csv.push_str(&format!("\"{}\",\"{}\",{:?},{:?}\n", basis[i], basis[j], z.re, z.im));
            }
        }
    }
    let value = json!({
        "alpha": alpha.to_string(),
        "basis": basis,
        "triangular": pm.is_triangular(),
        "diagonal": pm.diagonal().iter().map(scalar_json).collect::<Vec<_>>(),
        "matrix": rows,
    });
    Ok((value, csv))
}

fn qpoly_report<F: Field>(dec: &SpectralDecomposition<F>, alpha: &MultiIndex) -> Result<Value> {
    let basis = ReducedBasis::new(dec, alpha)?;
    let reduced = basis.reduced(alpha)?;
    let terms: Vec<Value> = reduced
        .q
        .terms()
        .map(|(b, c)| json!({ "beta": b.to_string(), "coeff": scalar_json(c) }))
        .collect();
    let expansion: Vec<Value> = basis
        .expansion(alpha)?
        .iter()
        .map(|(b, c)| json!({ "beta": b.to_string(), "coeff": scalar_json(c) }))
        .collect();
    let sets = compute_power_sets(alpha, dec)?;
    let stability = verify_stability(&basis, alpha, dec)?;
    Ok(json!({
        "alpha": alpha.to_string(),
        "eigenvalue": scalar_json(&reduced.eigenvalue),
        "nu": reduced.nu,
        "terms": terms,
        "expansion": expansion,
        "a_alpha": sets.a.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "k_alpha": sets.k.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "stable": stability.passed(),
    }))
}

fn cone(point: &str) -> Result<Value> {
    let x: Vec<BigRational> = point
        .split(',')
        .map(|p| {
            crate::field::parse_rational(p).ok_or_else(|| Error::Schema(format!("cannot parse {p:?} as a rational")))
        })
        .collect::<Result<_>>()?;
    let cone = ConeSigma::new(x.len());
    Ok(json!({
        "point": x.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "member": cone.contains(&x),
        "certificate": cone.certificate(&x),
    }))
}

fn moments(g: &Global, urn: &NormalizedUrn, opts: &SpectralOptions, args: &MomentsArgs) -> Result<i32> {
    let dec = decompose(urn, g.arith.into(), opts)?;
    let class = dec.classify();
    if args.mc {
        return mc_moments(g, urn, &dec, args);
    }
    if !args.exact {
        return Err(Error::Schema("moments needs --exact or --mc".into()));
    }
    let alpha = parse_alpha(args.alpha.as_deref().ok_or_else(|| Error::Schema("--exact needs --alpha".into()))?, urn.colors())?;
    let n_max = g.nmax.unwrap_or(1000);
    let every = args.every.max(1);
    let complex = dec.complex();
    let half = alpha.degree() as f64 / 2.0;
    let nu = class.nu as f64;
    let bound: Box<dyn Fn(usize) -> f64> = if alpha.is_strictly_small(&complex) {
        Box::new(move |n| (n as f64).powf(half))
    } else if class.kind == UrnKind::CriticallySmall && alpha.is_strictly_critical(&complex) {
        Box::new(move |n| (n as f64 * log_factor(n, nu)).powf(half))
    } else {
        let re = alpha.weight(&complex).re;
        Box::new(move |n| (n as f64).powf(re))
    };
    let rows: Vec<(usize, Complex64)> = match &dec {
        Decomposition::Exact(d) => exact_rows(d, urn.normalized.x0(), &alpha, n_max, every)?,
        Decomposition::Float(d) => {
            let x0: Vec<Complex64> = urn.normalized.x0_f64().iter().map(|&v| Complex64::new(v, 0.0)).collect();
            exact_rows(d, &x0, &alpha, n_max, every)?
        }
    };
    if g.format == Some(Format::Json) {
        let values: Vec<Value> = rows
            .iter()
            .map(|(n, v)| {
                let b = bound(*n);
                let ratio = if b > 0.0 { json!(v.norm() / b) } else { Value::Null };
                json!({ "n": n, "value": complex_json(*v), "bound": b, "ratio": ratio })
            })
            .collect();
        emit(g, json!({ "alpha": alpha.to_string(), "exact": dec.is_exact(), "series": values }), None)?;
    } else {
        let mut csv = String::from("n,value,value_im,bound,ratio,stderr\n");
        for (n, v) in &rows {
            let b = bound(*n);
            csv.push_str(&format!("{n},{:?},{:?},{b:?},{},\n", v.re, v.im, ratio_cell(v.norm(), b)));
        }
        write_out(g, csv.as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn exact_rows<F: Field>(
    dec: &SpectralDecomposition<F>,
    x0: &[F],
    alpha: &MultiIndex,
    n_max: usize,
    every: usize,
) -> Result<Vec<(usize, Complex64)>> {
    let f = Polynomial::monomial(alpha.clone());
    let engine = MomentEngine::for_polynomials(dec, x0, &[&f])?;
    let weights = engine.weights(&f)?;
    let mut rows = Vec::new();
    engine.run(n_max, |n, state| {
        if n % every == 0 || n == n_max {
            rows.push((n, MomentEngine::evaluate(&weights, state).to_complex()));
        }
    })?;
    Ok(rows)
}

fn mc_moments(g: &Global, urn: &NormalizedUrn, dec: &Decomposition, args: &MomentsArgs) -> Result<i32> {
    let s = urn.colors();
    let w: Vec<f64> = match &args.direction {
        Some(text) => text
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Schema(format!("cannot parse weight {p:?}"))))
            .collect::<Result<_>>()?,
        None => (0..s).map(|k| [1.0, -1.0].get(k).copied().unwrap_or(0.0)).collect(),
    };
    if w.len() != s {
        return Err(Error::Schema(format!("direction has {} entries, the urn has {s} colors", w.len())));
    }
    let class = dec.classify();
    if class.kind == UrnKind::Large {
        return Err(Error::NotSmall { class: "Large".into() });
    }
    let n = g.nmax.unwrap_or(10_000);
    let complex = dec.complex();
    let x0: Vec<Complex64> = urn.normalized.x0_f64().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let gamma = direction_variance(&complex, &x0, &class, &w, urn.scale_f64(), n)?;
    let cfg = McConfig { n, samples: g.mc_samples.unwrap_or(10_000), seed: g.seed, k_max: args.kmax, resamples: args.resamples };
    let report = mc_standardized_moments(&urn.original, &w, gamma, &cfg)?;
    if g.format == Some(Format::Json) {
        let mut value = serde_json::to_value(&report).map_err(|e| Error::Schema(e.to_string()))?;
        value["gamma"] = json!(gamma);
        value["direction"] = json!(w);
        emit(g, value, None)?;
    } else {
        let mut csv = String::from("n,k,value,reference,ratio,stderr\n");
        for m in &report.moments {
            let reference = gaussian_moment(m.k);
            csv.push_str(&format!(
                "{n},{},{:?},{reference:?},{},{:?}\n",
                m.k,
                m.value,
                ratio_cell(m.value, reference),
                m.stderr
            ));
        }
        write_out(g, csv.as_bytes())?;
    }
    Ok(EXIT_OK)
}

/// `value / reference`, empty when the reference vanishes.
fn ratio_cell(value: f64, reference: f64) -> String {
    if reference != 0.0 {
        format!("{:?}", value / reference)
    } else {
        String::new()
    }
}

/// Writes JSON (with a timestamp unless reproducible) or the CSV form.
fn emit(g: &Global, mut value: Value, csv: Option<String>) -> Result<()> {
    if g.format == Some(Format::Csv) {
        let csv = csv.ok_or_else(|| Error::Schema("this subcommand has no CSV form".into()))?;
        return write_out(g, csv.as_bytes());
    }
    if !g.reproducible {
        if let Value::Object(map) = &mut value {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            map.insert("generated_at".into(), json!(secs));
        }
    }
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| Error::Schema(e.to_string()))?;
    text.push('\n');
    write_out(g, text.as_bytes())
}

fn write_out(g: &Global, bytes: &[u8]) -> Result<()> {
    match &g.output {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}
