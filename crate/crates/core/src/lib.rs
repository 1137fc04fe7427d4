//! Estimation of elementary chirp signals
//! `y(t) = Σ_k A_k·exp(iβ_k t²) + ε(t)`, `t = 1…N`.
//!
//! The crate provides least squares (LSE) and approximate least squares
//! (ALSE) estimators, their sequential multi-component versions, the
//! dechirping, CPF and PCPF baselines, closed-form asymptotic covariances and
//! a Monte Carlo harness with residual diagnostics.
//!
//! ```
//! use chirpfit::{lse_one, synthesize_clean, ChirpComponent, ChirpModel, SimplexConfig};
//!
//! let model = ChirpModel::new(vec![ChirpComponent::new(5.0, 0.0, 0.5)]).unwrap();
//! let y = synthesize_clean(&model, 101).unwrap();
//! let fit = lse_one(&y, None, &SimplexConfig::default()).unwrap();
//! assert!((fit.components[0].beta - 0.5).abs() < 1e-8);
//! ```

pub mod asymptotics;
pub mod baselines;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod io;
pub mod optimizer;
pub mod periodogram;
pub mod signal;

pub use asymptotics::{finite_n_variances, multi_covariance, sigma_inv_matrix, sigma_matrix, AsymptoticCovariance};
pub use baselines::{cpf_estimate, dechirp_estimate, pcpf_estimate, sequential_baseline, BaselineFlavor, CpfConfig};
pub use error::{Error, Result};
pub use estimators::{alse_one, lse_joint, lse_one, sequential_fit, FitResult, Flavor, Method};
pub use optimizer::{minimize, OptimResult, SimplexConfig};
pub use periodogram::{scan, GridKind, GridSpec, Init, Kernel, ScanResult};
pub use signal::{generate_noise, synthesize_clean, ChirpComponent, ChirpModel, ComplexSignal, NoiseSpec};
pub use num_complex::Complex64;
