//! Monte Carlo standardized moments of linear observables `Y_n = <w, X_n>`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;
use crate::urn::{Stepper, UrnSpec};

/// Bootstrap resamples draw from streams keyed by `seed ^ BOOTSTRAP_KEY`.
const BOOTSTRAP_KEY: u64 = 0x9e37_79b9_7f4a_7c15;

/// Standard normal moment `E Z^k`: zero for odd `k`, `(k-1)!!` for even `k`.
pub fn gaussian_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        (1..k).step_by(2).map(f64::from).product()
    }
}

/// `Y_n` for trajectories `0..samples`, in trajectory order. Trajectory `i`
/// uses stream `i` of `seed`, so the result does not depend on threading.
pub fn sample_observable(spec: &UrnSpec, w: &[f64], n: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let stepper = Stepper::new(spec);
    let x0 = spec.x0_f64();
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            let mut x = x0.clone();
            for step in 0..n {
                stepper.advance(&mut x, step, &mut rng)?;
            }
            Ok(x.iter().zip(w).map(|(a, b)| a * b).sum())
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct StandardizedMoment {
    pub k: u32,
    pub value: f64,
    pub stderr: f64,
    pub reference: f64,
}

impl StandardizedMoment {
    /// `|value - reference| <= z * stderr`.
    pub fn within(&self, z: f64) -> bool {
        (self.value - self.reference).abs() <= z * self.stderr
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub mean: f64,
    pub mean_stderr: f64,
    pub variance: f64,
    pub variance_stderr: f64,
    pub moments: Vec<StandardizedMoment>,
}

/// Mean, variance and standardized moments `1..=k_max` of a sample.
fn moments_of(ys: &[f64], k_max: u32) -> (f64, f64, Vec<f64>) {
    let n = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    let mut sums = vec![0.0; k_max as usize];
    for y in ys {
        let z = (y - mean) / sd;
        let mut p = 1.0;
        for s in sums.iter_mut() {
            p *= z;
            *s += p;
        }
    }
    (mean, var, sums.into_iter().map(|s| s / n).collect())
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Standardized moments with bootstrap standard errors from `resamples`
/// resamples.
pub fn standardized_moments(ys: &[f64], k_max: u32, resamples: usize, seed: u64) -> (f64, f64, f64, Vec<StandardizedMoment>) {
    let (mean, var, point) = moments_of(ys, k_max);
    let replicates: Vec<(f64, Vec<f64>)> = (0..resamples as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng::stream(seed ^ BOOTSTRAP_KEY, b);
            let sample: Vec<f64> = (0..ys.len()).map(|_| ys[rng.gen_range(0..ys.len())]).collect();
            let (_, v, m) = moments_of(&sample, k_max);
            (v, m)
        })
        .collect();
    let var_se = std_dev(&replicates.iter().map(|(v, _)| *v).collect::<Vec<_>>());
    let moments = (1..=k_max)
        .map(|k| {
            let reps: Vec<f64> = replicates.iter().map(|(_, m)| m[k as usize - 1]).collect();
            StandardizedMoment { k, value: point[k as usize - 1], stderr: std_dev(&reps), reference: gaussian_moment(k) }
        })
        .collect();
    (mean, var, var_se, moments)
}

#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub k_max: u32,
    pub resamples: usize,
}

/// Simulates `Y_n = <w, X_n>` and reports its standardized moments. `gamma`
/// is the asymptotic variance `w' Sigma w`; a non-positive value means `Y_n`
/// is (asymptotically) deterministic and nothing can be standardized.
pub fn mc_standardized_moments(spec: &UrnSpec, w: &[f64], gamma: f64, cfg: &McConfig) -> Result<McReport> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::DegenerateDirection { gamma });
    }
    if cfg.samples < 2 {
        return Err(Error::BudgetExceeded { what: "Monte Carlo samples", needed: 2, budget: cfg.samples as u128 });
    }
    let ys = sample_observable(spec, w, cfg.n, cfg.samples, cfg.seed)?;
    let (mean, variance, variance_stderr, moments) = standardized_moments(&ys, cfg.k_max, cfg.resamples, cfg.seed);
    Ok(McReport {
        n: cfg.n,
        samples: cfg.samples,
        seed: cfg.seed,
        mean,
        mean_stderr: (variance / cfg.samples as f64).sqrt(),
        variance,
        variance_stderr,
        moments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_reference_values() {
        assert_eq!(gaussian_moment(1), 0.0);
        assert_eq!(gaussian_moment(2), 1.0);
        assert_eq!(gaussian_moment(4), 3.0);
        assert_eq!(gaussian_moment(6), 15.0);
        assert_eq!(gaussian_moment(0), 1.0);
    }

    #[test]
    fn first_two_standardized_moments_are_fixed() {
        let ys: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64).collect();
        let (_, _, _, m) = standardized_moments(&ys, 4, 20, 1);
        assert!(m[0].value.abs() < 1e-12);
        assert!((m[1].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_direction_is_refused() {
        let spec = UrnSpec::from_integers(&[vec![2, 1], vec![1, 2]], &[1, 1]).unwrap();
        let cfg = McConfig { n: 10, samples: 10, seed: 1, k_max: 4, resamples: 10 };
        assert!(matches!(mc_standardized_moments(&spec, &[1.0, 1.0], 0.0, &cfg), Err(Error::DegenerateDirection { .. })));
    }

    #[test]
    fn samples_do_not_depend_on_thread_count() {
        let spec = UrnSpec::from_integers(&[vec![2, 1], vec![1, 2]], &[1, 1]).unwrap();
        let a = sample_observable(&spec, &[1.0, -1.0], 50, 64, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| sample_observable(&spec, &[1.0, -1.0], 50, 64, 9).unwrap());
        assert_eq!(a, b);
    }
}
