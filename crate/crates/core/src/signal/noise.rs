use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use super::ComplexSignal;
use crate::error::{Error, Result};

/// Additive error description. `sigma2` is the total complex variance, split
/// evenly between independent real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    IidGaussian { sigma2: f64, seed: u64 },
    /// Stationary linear process `ε(t) = Σ_l c(l)·e(t−l)` with i.i.d. complex
    /// Gaussian innovations `e` and a finite coefficient list.
    LinearProcess { sigma2: f64, coeffs: Vec<f64>, seed: u64 },
}

impl NoiseSpec {
    pub fn iid(sigma2: f64, seed: u64) -> Self {
        NoiseSpec::IidGaussian { sigma2, seed }
    }

    pub fn sigma2(&self) -> f64 {
        match self {
            NoiseSpec::IidGaussian { sigma2, .. } | NoiseSpec::LinearProcess { sigma2, .. } => {
                *sigma2
            }
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            NoiseSpec::IidGaussian { seed, .. } | NoiseSpec::LinearProcess { seed, .. } => *seed,
        }
    }
}

fn innovations(sigma2: f64, seed: u64, n: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, (sigma2 / 2.0).sqrt()).expect("positive scale");
    (0..n)
        .map(|_| {
            let re = rng.sample(normal);
            let im = rng.sample(normal);
            Complex64::new(re, im)
        })
        .collect()
}

/// Draws `n` error samples; deterministic given the seed.
pub fn generate_noise(spec: &NoiseSpec, n: usize) -> Result<ComplexSignal> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let sigma2 = spec.sigma2();
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidInput(format!("sigma2 must be positive, got {sigma2}")));
    }
    match spec {
        NoiseSpec::IidGaussian { seed, .. } => ComplexSignal::new(innovations(sigma2, *seed, n)),
        NoiseSpec::LinearProcess { coeffs, seed, .. } => {
            if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput(
                    "linear process needs a non-empty finite coefficient list".into(),
                ));
            }
            let warmup = coeffs.len();
            let e = innovations(sigma2, *seed, n + warmup);
            let samples = (warmup..warmup + n)
                .map(|t| coeffs.iter().enumerate().map(|(l, &c)| e[t - l] * c).sum())
                .collect();
            ComplexSignal::new(samples)
        }
    }
}
