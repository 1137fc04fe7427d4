//! Closed-form asymptotic covariances of the LSE/ALSE and their finite-N
//! scalings.
//!
//! For one component with amplitude `A = A_R + iA_I`, the estimator
//! `(Â_R, Â_I, β̂)` satisfies `(θ̂ − θ)·D⁻¹ → N₃(0, σ²Σ⁻¹)` with
//! `D = diag(N^{-1/2}, N^{-1/2}, N^{-5/2})`. In multi-component models the
//! covariance is block diagonal with one such block per component, for the
//! joint LSE as well as the sequential estimators. The joint-LSE statement
//! leans on a conjecture about the limits of certain trigonometric sums; the
//! formulas are used here as given.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::estimators::FitResult;
use crate::signal::{ChirpComponent, ChirpModel};

fn check_amplitude(a: &ChirpComponent) -> Result<f64> {
    let mag2 = a.a_re * a.a_re + a.a_im * a.a_im;
    if !(mag2 > 0.0 && mag2.is_finite()) {
        return Err(Error::InvalidInput("covariance needs a non-zero finite amplitude".into()));
    }
    Ok(mag2)
}

/// `Σ` for one component.
pub fn sigma_matrix(a: &ChirpComponent) -> Result<Matrix3<f64>> {
    let mag2 = check_amplitude(a)?;
    let (ar, ai) = (a.a_re, a.a_im);
    Ok(Matrix3::new(
        2.0,
        0.0,
        -2.0 * ai / 3.0,
        0.0,
        2.0,
        2.0 * ar / 3.0,
        -2.0 * ai / 3.0,
        2.0 * ar / 3.0,
        2.0 * mag2 / 5.0,
    ))
}

/// `Σ⁻¹` for one component.
pub fn sigma_inv_matrix(a: &ChirpComponent) -> Result<Matrix3<f64>> {
    let mag2 = check_amplitude(a)?;
    let (ar, ai) = (a.a_re, a.a_im);
    let d = 8.0 * mag2;
    let off = -5.0 * ar * ai / d;
    Ok(Matrix3::new(
        0.5 + 5.0 * ai * ai / d,
        off,
        15.0 * ai / d,
        off,
        0.5 + 5.0 * ar * ar / d,
        -15.0 * ar / d,
        15.0 * ai / d,
        -15.0 * ar / d,
        45.0 / d,
    ))
}

fn d_scaling(n: usize) -> Result<Matrix3<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let n = n as f64;
    Ok(Matrix3::from_diagonal(&Vector3::new(n.powf(-0.5), n.powf(-0.5), n.powf(-2.5))))
}

fn check_sigma2(sigma2: f64) -> Result<()> {
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidInput(format!("sigma2 must be finite and non-negative, got {sigma2}")));
    }
    Ok(())
}

/// `σ²·D·Σ⁻¹·D`, the finite-N covariance of `(Â_R, Â_I, β̂)`.
pub fn scaled_covariance(a: &ChirpComponent, sigma2: f64, n: usize) -> Result<Matrix3<f64>> {
    check_sigma2(sigma2)?;
    let d = d_scaling(n)?;
    Ok(d * sigma_inv_matrix(a)? * d * sigma2)
}

/// Diagonal of [`scaled_covariance`]: `(σ²Σ⁻¹₁₁/N, σ²Σ⁻¹₂₂/N, σ²Σ⁻¹₃₃/N⁵)`.
pub fn finite_n_variances(a: &ChirpComponent, sigma2: f64, n: usize) -> Result<[f64; 3]> {
    let c = scaled_covariance(a, sigma2, n)?;
    Ok([c[(0, 0)], c[(1, 1)], c[(2, 2)]])
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticCovariance {
    pub sigma_inv: Matrix3<f64>,
    pub scaled: [f64; 3],
}

impl AsymptoticCovariance {
    pub fn new(a: &ChirpComponent, sigma2: f64, n: usize) -> Result<Self> {
        Ok(Self { sigma_inv: sigma_inv_matrix(a)?, scaled: finite_n_variances(a, sigma2, n)? })
    }
}

/// Per-component blocks of the block-diagonal covariance.
pub fn multi_covariance(model: &ChirpModel, sigma2: f64, n: usize) -> Result<Vec<AsymptoticCovariance>> {
    model.components().iter().map(|c| AsymptoticCovariance::new(c, sigma2, n)).collect()
}

/// Attaches plug-in covariances `σ²·D·Σ⁻¹(Â)·D` to a fit. Without a given
/// `sigma2` the noise variance is estimated as `RSS/N`.
pub fn attach_covariance(fit: &mut FitResult, sigma2: Option<f64>, n: usize) -> Result<()> {
    let s2 = match sigma2 {
        Some(s) => s,
        None => {
            let rss = fit.rss().ok_or_else(|| Error::InvalidInput("fit has no RSS to estimate σ² from".into()))?;
            rss / n as f64
        }
    };
    let blocks = fit.components.iter().map(|c| scaled_covariance(c, s2, n)).collect::<Result<Vec<_>>>()?;
    fit.covariance = Some(blocks);
    Ok(())
}

pub const PARAMETER_NAMES: [&str; 3] = ["a_re", "a_im", "beta"];

/// Writes `component,parameter,n,sigma2,variance` rows for every model
/// component and every `(N, σ²)` pair.
pub fn write_variance_table<W: Write>(
    model: &ChirpModel,
    n_values: &[usize],
    sigma2_values: &[f64],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["component", "parameter", "n", "sigma2", "variance"])?;
    for (k, c) in model.components().iter().enumerate() {
        for &n in n_values {
            for &s2 in sigma2_values {
                let v = finite_n_variances(c, s2, n)?;
                for (name, var) in PARAMETER_NAMES.iter().zip(v) {
                    w.write_record([
                        (k + 1).to_string(),
                        name.to_string(),
                        n.to_string(),
                        s2.to_string(),
                        format!("{var:.6e}"),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn amp(r: f64, i: f64) -> ChirpComponent {
        ChirpComponent::new(r, i, 0.5)
    }

    fn max_abs(m: Matrix3<f64>) -> f64 {
        m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    #[test]
    fn sigma_examples() {
        let s = sigma_matrix(&amp(5.0, 0.0)).unwrap();
        let want = Matrix3::new(2.0, 0.0, 0.0, 0.0, 2.0, 10.0 / 3.0, 0.0, 10.0 / 3.0, 10.0);
        assert!(max_abs(s - want) < 1e-14);
        let s = sigma_matrix(&amp(0.0, 5.0)).unwrap();
        let want = Matrix3::new(2.0, 0.0, -10.0 / 3.0, 0.0, 2.0, 0.0, -10.0 / 3.0, 0.0, 10.0);
        assert!(max_abs(s - want) < 1e-14);
    }

    #[test]
    fn sigma_inv_examples() {
        let s = sigma_inv_matrix(&amp(5.0, 0.0)).unwrap();
        let want = Matrix3::new(0.5, 0.0, 0.0, 0.0, 1.125, -0.375, 0.0, -0.375, 0.225);
        assert!(max_abs(s - want) < 1e-14);
        let s = sigma_inv_matrix(&amp(3.0, 4.0)).unwrap();
        assert!((s[(0, 0)] - 0.9).abs() < 1e-14);
    }

    #[test]
    fn zero_amplitude_rejected() {
        assert!(sigma_matrix(&amp(0.0, 0.0)).is_err());
        assert!(sigma_inv_matrix(&amp(0.0, 0.0)).is_err());
        assert!(finite_n_variances(&amp(1.0, 0.0), 1.0, 0).is_err());
    }

    #[test]
    fn inverse_pair_symmetry_and_definiteness() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let a = amp(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
            let s = sigma_matrix(&a).unwrap();
            let si = sigma_inv_matrix(&a).unwrap();
            assert!(max_abs(s * si - Matrix3::identity()) < 1e-10);
            assert!(max_abs(si - si.transpose()) == 0.0);
            assert!(si.cholesky().is_some());
            let mag2 = a.a_re * a.a_re + a.a_im * a.a_im;
            assert!((si[(2, 2)] - 45.0 / (8.0 * mag2)).abs() < 1e-12);
            assert!((si[(0, 0)] + si[(1, 1)] - 1.625).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_n_scalings() {
        let a = amp(5.0, 0.0);
        let v1 = finite_n_variances(&a, 1.0, 201).unwrap();
        assert!((v1[2] - 0.225 / 201f64.powi(5)).abs() < 1e-25);
        assert!((v1[2] - 6.87e-13).abs() < 0.02e-13);
        let v2 = finite_n_variances(&a, 2.0, 201).unwrap();
        for i in 0..3 {
            assert!((v2[i] - 2.0 * v1[i]).abs() <= 1e-15 * v1[i].abs());
        }
        let vd = finite_n_variances(&a, 1.0, 402).unwrap();
        assert!((v1[2] / vd[2] - 32.0).abs() < 1e-9);
        assert!((v1[0] / vd[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn multi_component_blocks() {
        let model = ChirpModel::new(vec![ChirpComponent::new(7.0, 0.0, 1.0), ChirpComponent::new(5.0, 0.0, 0.5)]).unwrap();
        let blocks = multi_covariance(&model, 1.0, 201).unwrap();
        assert!((blocks[0].sigma_inv[(2, 2)] - 45.0 / (8.0 * 49.0)).abs() < 1e-14);
        assert!((blocks[1].sigma_inv[(2, 2)] - 45.0 / (8.0 * 25.0)).abs() < 1e-14);
        let single = ChirpModel::new(vec![ChirpComponent::new(5.0, 0.0, 0.5)]).unwrap();
        assert_eq!(multi_covariance(&single, 1.0, 201).unwrap()[0].scaled, blocks[1].scaled);
    }

    #[test]
    fn variance_table_rows() {
        let model = ChirpModel::new(vec![ChirpComponent::new(5.0, 0.0, 0.5)]).unwrap();
        let mut buf = Vec::new();
        write_variance_table(&model, &[101, 201], &[1.0, 2.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 2 * 3);
        assert!(text.starts_with("component,parameter,n,sigma2,variance"));
    }

    #[test]
    fn attach_uses_rss_estimate() {
        let mut fit = FitResult::new(crate::estimators::Method::Lse);
        fit.components.push(ChirpComponent::new(5.0, 0.0, 0.5));
        fit.rss_trajectory.push(201.0);
        attach_covariance(&mut fit, None, 201).unwrap();
        let c = &fit.covariance.as_ref().unwrap()[0];
        assert!((c[(2, 2)] - 0.225 / 201f64.powi(5)).abs() < 1e-25);
    }
}
