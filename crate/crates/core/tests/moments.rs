//! Exact moments against independent oracles, and Monte Carlo against the
//! exact engine.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use urnlab::moments::{
    direction_variance, estimate_sigma, exact_moment_series, mc_standardized_moments, observable_moments, McConfig,
};
use urnlab::poly::{of_degree, MultiIndex, PhiOperator, Polynomial};
use urnlab::reduction::ReducedBasis;
use urnlab::spectral::{decompose_exact, SpectralDecomposition};
use urnlab::urn::{validate, NormalizedUrn, UrnSpec};
use urnlab::Error;

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn urn(r: &[&[i64]], x0: &[i64]) -> NormalizedUrn {
    let r: Vec<Vec<i64>> = r.iter().map(|row| row.to_vec()).collect();
    validate(&UrnSpec::from_integers(&r, x0).unwrap()).into_result().unwrap()
}

fn strictly_small() -> NormalizedUrn {
    urn(&[&[2, 1], &[1, 2]], &[1, 1])
}

fn critically_small() -> NormalizedUrn {
    urn(&[&[3, 1], &[1, 3]], &[1, 1])
}

fn tenable_negative() -> NormalizedUrn {
    urn(&[&[-1, 2], &[1, 0]], &[2, 1])
}

fn jordan_small() -> NormalizedUrn {
    urn(&[&[2, 1, 0], &[1, 1, 1], &[1, 0, 2]], &[1, 1, 1])
}

fn jordan_critical() -> NormalizedUrn {
    urn(&[&[2, 1, 0, 1], &[0, 3, 0, 1], &[1, 0, 3, 0], &[0, 1, 2, 1]], &[1, 1, 1, 1])
}

fn exact(u: &NormalizedUrn) -> SpectralDecomposition<Q> {
    decompose_exact(u).unwrap().expect("rational spectrum")
}

/// `(E <w, X_n>, Var <w, X_n>)` in the user's units.
fn user_moments(u: &NormalizedUrn, w: &[i64], n: usize) -> (Q, Q) {
    let dec = exact(u);
    let w: Vec<Q> = w.iter().map(|&v| Q::from_integer(v.into())).collect();
    observable_moments(&dec, u.normalized.x0(), &w, &u.scale, n).unwrap().swap_remove(n)
}

// Reference values from a dynamic program over the distribution of X_n with
// exact fractions.
#[test]
fn variances_match_the_distribution_oracle() {
    assert_eq!(user_moments(&strictly_small(), &[1, -1], 10), (Q::zero(), q(197928, 11339)));
    assert_eq!(user_moments(&critically_small(), &[1, -1], 10), (Q::zero(), q(68724704, 692835)));
    assert_eq!(user_moments(&tenable_negative(), &[1, 0], 10), (q(287, 66), q(50551, 21780)));
    let big = |s: &str| s.parse::<BigInt>().unwrap();
    assert_eq!(
        user_moments(&jordan_small(), &[1, -1, 0], 8),
        (q(39090283, 6613488), Q::new(big("445008403571083"), big("218691117630720")))
    );
}

#[test]
fn total_mass_is_centered_exactly() {
    for u in [strictly_small(), critically_small(), tenable_negative(), jordan_small(), jordan_critical()] {
        let dec = exact(&u);
        let s = dec.dim();
        let x0 = u.normalized.x0();
        let start = dec.coords(x0)[0].clone();
        let series = exact_moment_series(&Polynomial::monomial(MultiIndex::delta(s, 0)), 50, &dec, x0).unwrap();
        for (n, v) in series.iter().enumerate() {
            assert_eq!(*v, &start + Q::from_integer(n.into()));
        }
        let ones = vec![1; s];
        let (mean, var) = user_moments(&u, &ones, 20);
        let total: Q = u.original.x0().iter().sum();
        assert_eq!(mean, total + &u.scale * Q::from_integer(20.into()));
        assert!(var.is_zero());
    }
}

/// For a proper eigenpolynomial, `E Q(X_n) = Q(X_0) prod_j (1 + lambda / (u_1(X_0) + j))`.
#[test]
fn eigenpolynomials_follow_the_product_formula() {
    for u in [strictly_small(), critically_small(), tenable_negative(), jordan_small(), jordan_critical()] {
        let dec = exact(&u);
        let x0 = u.normalized.x0();
        let coords = dec.coords(x0);
        let basis = ReducedBasis::up_to_degree(&dec, 3).unwrap();
        let mut checked = 0;
        for alpha in (0..=3).flat_map(|d| of_degree(dec.dim(), d)) {
            let r = basis.reduced(&alpha).unwrap();
            if r.nu != 0 {
                continue;
            }
            let series = exact_moment_series(&r.q, 15, &dec, x0).unwrap();
            let mut expected = r.q.eval_coords(&coords);
            for (n, v) in series.iter().enumerate() {
                assert_eq!(*v, expected, "alpha {alpha} at n = {n}");
                expected = expected.clone() * (Q::one() + &r.eigenvalue / (&coords[0] + Q::from_integer(n.into())));
            }
            checked += 1;
        }
        assert!(checked > 0);
    }
}

/// `(Phi - <lambda, alpha>)^(nu + 1) Q_alpha = 0` by repeated application of `Phi`.
#[test]
fn reduced_polynomials_are_generalized_eigenvectors() {
    for u in [jordan_small(), jordan_critical()] {
        let dec = exact(&u);
        let phi = PhiOperator::new(&dec);
        let basis = ReducedBasis::up_to_degree(&dec, 4).unwrap();
        let mut saw_chain = false;
        for alpha in (0..=4).flat_map(|d| of_degree(dec.dim(), d)) {
            let r = basis.reduced(&alpha).unwrap();
            assert_eq!(r.q.coeff(&alpha), Q::one());
            assert!(r.q.terms().all(|(b, _)| *b <= alpha));
            let mut p = r.q.clone();
            for step in 0..=r.nu {
                assert!(!p.is_empty(), "alpha {alpha}: vanished after {step} of {} steps", r.nu);
                p = phi.apply(&p).sub(&p.scale(&r.eigenvalue));
            }
            assert!(p.is_empty(), "alpha {alpha}: nilpotence index exceeds {}", r.nu);
            saw_chain |= r.nu > 0;
        }
        assert!(saw_chain, "fixture has a Jordan block, expected some nu > 0");
    }
}

#[test]
fn variance_needs_the_log_factor_only_when_critical() {
    let per_n = |u: &NormalizedUrn, n: usize| {
        let (_, var) = user_moments(u, &[1, -1], n);
        urnlab::field::ratio_to_f64(&var) / n as f64
    };
    let small = per_n(&strictly_small(), 4000) / per_n(&strictly_small(), 1000);
    // The correction decays like n^(-1/3) here, so allow a few percent.
    assert!((small - 1.0).abs() < 0.05, "Var/n drifted by {small}");
    let critical = per_n(&critically_small(), 4000) / per_n(&critically_small(), 1000);
    let log_ratio = (4000f64).ln() / (1000f64).ln();
    assert!(critical > 1.1, "Var/n did not grow: {critical}");
    assert!((critical / log_ratio - 1.0).abs() < 0.05, "Var/(n log n) drifted: {critical} vs {log_ratio}");
}

#[test]
fn covariance_has_the_total_mass_direction_as_kernel() {
    let u = strictly_small();
    let dec = exact(&u).to_complex();
    let x0: Vec<Complex64> = u.normalized.x0_f64().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let class = urnlab::classify(&dec);
    let est = estimate_sigma(&dec, &x0, &class, u.scale_f64(), 2000).unwrap();
    let sigma = &est.sigma;
    let scale = sigma[0][0].abs();
    assert!(scale > 0.1);
    for row in sigma {
        assert!((row[0] + row[1]).abs() < 1e-9 * scale);
    }
    assert!(est.min_eigenvalue.abs() < 1e-9 * scale);
    assert!(est.max_abs_imaginary < 1e-9);
    let gamma = direction_variance(&dec, &x0, &class, &[1.0, 1.0], u.scale_f64(), 500).unwrap();
    assert_eq!(gamma, 0.0);
}

#[test]
fn monte_carlo_agrees_with_exact_mean_and_variance() {
    for (u, w) in [(strictly_small(), vec![1i64, -1]), (tenable_negative(), vec![1, 0]), (jordan_small(), vec![1, -1, 0])] {
        let n = 200;
        let (mean, var) = user_moments(&u, &w, n);
        let (mean, var) = (urnlab::field::ratio_to_f64(&mean), urnlab::field::ratio_to_f64(&var));
        let wf: Vec<f64> = w.iter().map(|&v| v as f64).collect();
        let cfg = McConfig { n, samples: 20_000, seed: 3, k_max: 4, resamples: 100 };
        let report = mc_standardized_moments(&u.original, &wf, var / n as f64, &cfg).unwrap();
        assert!((report.mean - mean).abs() <= 4.0 * report.mean_stderr, "mean {} vs {mean} ({})", report.mean, report.mean_stderr);
        assert!(
            (report.variance - var).abs() <= 4.0 * report.variance_stderr,
            "variance {} vs {var} ({})",
            report.variance,
            report.variance_stderr
        );
    }
}

#[test]
fn degenerate_direction_is_refused_by_monte_carlo() {
    let u = strictly_small();
    let cfg = McConfig { n: 50, samples: 100, seed: 0, k_max: 4, resamples: 10 };
    let err = mc_standardized_moments(&u.original, &[1.0, 1.0], 0.0, &cfg).unwrap_err();
    assert!(matches!(err, Error::DegenerateDirection { .. }));
}
