//! Comparison estimators: dechirping, the cubic phase function (CPF) and the
//! product CPF (PCPF).
//!
//! Dechirping and the CPF both measure `2β` on an integer lattice, so β is
//! only identified modulo π. Raw estimates are reported in `[0, π)`; the two
//! candidates `β̂` and `β̂ + π` are then compared through `I(β)` on the original
//! data. `alias_ambiguous` is raised when `2β̂` falls outside `(0, π)`, when
//! the raw value loses that comparison, or when neither candidate explains a
//! majority of the signal energy (`I(β)/‖y‖² < 1/2`). Rates whose difference
//! from the truth is a rational multiple of π can still score well on a CPF
//! grid, so the flag is advisory and never alters the estimate.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimators::{profile_amplitudes, FitResult, Method, MIN_SAMPLES};
use crate::optimizer::{try_minimize, OptimResult, SimplexConfig};
use crate::periodogram::{initial_value, lattice_sums, ptf_value, GridKind, GridSpec, Init, Kernel};
use crate::signal::{normalize_rate, ChirpComponent, ComplexSignal};

/// `z(t) = y(t)·conj(y(t+1))`, `t = 1…N−1`.
pub fn dechirp_transform(y: &ComplexSignal) -> Result<ComplexSignal> {
    if y.len() < 2 {
        return Err(Error::InvalidInput("dechirping needs at least two samples".into()));
    }
    ComplexSignal::new(y.samples().windows(2).map(|w| w[0] * w[1].conj()).collect())
}

/// `Σ_t z(t)·exp(i2βt)` over the dechirped record.
fn dechirp_sum(z: &[Complex64], beta: f64) -> Complex64 {
    z.iter()
        .enumerate()
        .map(|(i, &v)| {
            let (s, c) = (2.0 * beta * (i + 1) as f64).sin_cos();
            v * Complex64::new(c, s)
        })
        .sum()
}

pub(crate) fn dechirp_power_on_indices(
    y: &ComplexSignal,
    grid: &GridSpec,
    ks: std::ops::RangeInclusive<u64>,
) -> Result<Vec<f64>> {
    if grid.kind != GridKind::Fourier {
        return Err(Error::InvalidInput("the dechirp kernel scans the Fourier grid".into()));
    }
    let z = dechirp_transform(y)?;
    let weights: Vec<u64> = (1..=z.len() as u64).map(|t| 2 * t).collect();
    let m = z.len() as f64;
    Ok(lattice_sums(z.samples(), &weights, grid.modulus(), ks, true)
        .into_iter()
        .map(|s| s.norm_sqr() / m)
        .collect())
}

/// Outcome of the π-alias check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasCheck {
    /// Candidate in `[0, 2π)` with the larger `I(β)`.
    pub resolved: f64,
    pub ambiguous: bool,
}

/// Chooses between `beta` and `beta + π` using the periodogram-type function.
pub fn resolve_alias(y: &ComplexSignal, beta: f64) -> AliasCheck {
    let raw = normalize_rate(beta);
    let alt = normalize_rate(beta + PI);
    let (i_raw, i_alt) = (ptf_value(y, raw), ptf_value(y, alt));
    let (resolved, best) = if i_alt > i_raw { (alt, i_alt) } else { (raw, i_raw) };
    let energy = y.energy();
    let weak = energy > 0.0 && best / energy < 0.5;
    AliasCheck { resolved, ambiguous: 2.0 * raw >= PI || resolved != raw || weak }
}

/// Dechirping estimate: `B̂` is the amplitude of the derived sinusoid
/// `z(t) ≈ B·exp(−i2βt)`, with `B = |A|²·exp(−iβ)` for a single chirp.
#[derive(Debug, Clone, PartialEq)]
pub struct DechirpFit {
    pub b_re: f64,
    pub b_im: f64,
    /// Raw estimate in `[0, π)`.
    pub beta: f64,
    pub beta_resolved: f64,
    pub alias_ambiguous: bool,
    pub optim: OptimResult,
}

/// Dechirps, initializes β on the Fourier grid and refines the profiled
/// sinusoid RSS `‖z‖² − |Σ z(t)e^{i2βt}|²/(N−1)` with the simplex method.
pub fn dechirp_estimate(y: &ComplexSignal, init: impl Into<Init>, cfg: &SimplexConfig) -> Result<DechirpFit> {
    let n = y.len();
    if n < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!("dechirping needs N ≥ {MIN_SAMPLES}, got {n}")));
    }
    let grid = GridSpec::new(GridKind::Fourier, n)?;
    let beta0 = initial_value(y, &grid, &Kernel::Dechirp, &init.into())?;
    let z = dechirp_transform(y)?;
    let m = z.len() as f64;
    let energy = z.energy();
    let cfg = cfg.with_default_step(grid.cell(), 1);
    let optim = try_minimize(|b| Ok(energy - dechirp_sum(z.samples(), b[0]).norm_sqr() / m), &[beta0], &cfg)?;
    let beta = optim.argmin[0].rem_euclid(PI);
    let b = dechirp_sum(z.samples(), beta) / m;
    let alias = resolve_alias(y, beta);
    Ok(DechirpFit {
        b_re: b.re,
        b_im: b.im,
        beta,
        beta_resolved: alias.resolved,
        alias_ambiguous: alias.ambiguous,
        optim,
    })
}

/// CPF evaluation times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CpfConfig {
    /// Defaults to `(N+1)/2` (rounded down for even N).
    pub t_center: Option<usize>,
    /// Defaults to `{round(0.4N), (N+1)/2}`.
    pub times: Option<Vec<usize>>,
}

impl CpfConfig {
    pub fn center(&self, n: usize) -> usize {
        self.t_center.unwrap_or((n + 1) / 2)
    }

    pub fn product_times(&self, n: usize) -> Vec<usize> {
        self.times
            .clone()
            .unwrap_or_else(|| vec![((0.4 * n as f64).round() as usize).max(1), (n + 1) / 2])
    }
}

/// Lag range used at time `t`: `M = min(⌊(N−1)/2⌋, t−1, N−t)`. Flagged as
/// clipped when that is shorter than `⌊(N−1)/2⌋` or when N is even.
pub fn cpf_window(n: usize, t: usize) -> Result<(usize, bool)> {
    if t == 0 || t > n {
        return Err(Error::InvalidInput(format!("CPF time {t} outside 1…{n}")));
    }
    let full = (n - 1) / 2;
    let m = full.min(t - 1).min(n - t);
    Ok((m, m < full || n % 2 == 0))
}

fn cpf_products(y: &ComplexSignal, t: usize) -> Result<(Vec<Complex64>, bool)> {
    let (m, clipped) = cpf_window(y.len(), t)?;
    Ok(((0..=m).map(|k| y.at(t + k) * y.at(t - k)).collect(), clipped))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpfValue {
    pub value: Complex64,
    pub max_lag: usize,
    pub clipped: bool,
}

/// `CPF(t, Ω) = Σ_m y(t+m)·y(t−m)·exp(−iΩm²)`.
pub fn cpf_value(y: &ComplexSignal, t: usize, omega: f64) -> Result<CpfValue> {
    let (x, clipped) = cpf_products(y, t)?;
    Ok(CpfValue { value: cpf_sum(&x, omega), max_lag: x.len() - 1, clipped })
}

fn cpf_sum(x: &[Complex64], omega: f64) -> Complex64 {
    x.iter()
        .enumerate()
        .map(|(m, &v)| {
            let mm = (m * m) as f64;
            let (s, c) = (omega * mm).sin_cos();
            v * Complex64::new(c, -s)
        })
        .sum()
}

fn check_cpf_grid(grid: &GridSpec) -> Result<()> {
    if grid.kind == GridKind::Fourier {
        return Err(Error::InvalidInput("CPF kernels scan Ω on an N² lattice".into()));
    }
    Ok(())
}

pub(crate) fn cpf_on_indices(
    y: &ComplexSignal,
    grid: &GridSpec,
    t: usize,
    ks: std::ops::RangeInclusive<u64>,
) -> Result<Vec<Complex64>> {
    check_cpf_grid(grid)?;
    let (x, _) = cpf_products(y, t)?;
    let weights: Vec<u64> = (0..x.len() as u64).map(|m| m * m).collect();
    Ok(lattice_sums(&x, &weights, grid.modulus(), ks, false))
}

/// `Σ_l ln|CPF(t_l, Ω)|` on grid indices; `−∞` where any factor vanishes.
pub(crate) fn pcpf_log_on_indices(
    y: &ComplexSignal,
    grid: &GridSpec,
    times: &[usize],
    ks: std::ops::RangeInclusive<u64>,
) -> Result<Vec<f64>> {
    if times.is_empty() {
        return Err(Error::InvalidInput("PCPF needs at least one time point".into()));
    }
    let mut acc: Option<Vec<f64>> = None;
    for &t in times {
        let logs: Vec<f64> = cpf_on_indices(y, grid, t, ks.clone())?.iter().map(|c| c.norm().ln()).collect();
        acc = Some(match acc {
            None => logs,
            Some(a) => a.iter().zip(&logs).map(|(p, q)| p + q).collect(),
        });
    }
    Ok(acc.unwrap_or_default())
}

/// CPF or PCPF estimate of the rate.
#[derive(Debug, Clone, PartialEq)]
pub struct CpfEstimate {
    /// `Ω̂/2` in `[0, π)`.
    pub beta: f64,
    /// Refined IFR estimate `Ω̂` in `[0, 2π)`.
    pub omega: f64,
    pub beta_resolved: f64,
    pub alias_ambiguous: bool,
    pub window_clipped: bool,
    pub optim: OptimResult,
}

fn omega_init(init: Init) -> Init {
    match init {
        Init::Scan => Init::Scan,
        Init::Value(b) => Init::Value(2.0 * b),
        Init::Window { center, cells } => Init::Window { center: 2.0 * center, cells },
    }
}

fn finish_cpf(y: &ComplexSignal, optim: OptimResult, clipped: bool) -> CpfEstimate {
    let omega = normalize_rate(optim.argmin[0]);
    let beta = omega / 2.0;
    let alias = resolve_alias(y, beta);
    CpfEstimate {
        beta,
        omega,
        beta_resolved: alias.resolved,
        alias_ambiguous: alias.ambiguous,
        window_clipped: clipped,
        optim,
    }
}

/// Maximizes `|CPF(t_c, Ω)|²` over the `πk/N²` grid, refines, and returns
/// `β̂ = Ω̂/2`. Initial values given through `init` are in β units.
pub fn cpf_estimate(
    y: &ComplexSignal,
    cpf: &CpfConfig,
    init: impl Into<Init>,
    cfg: &SimplexConfig,
) -> Result<CpfEstimate> {
    let n = y.len();
    if n < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!("CPF needs N ≥ {MIN_SAMPLES}, got {n}")));
    }
    let t = cpf.center(n);
    let grid = GridSpec::new(GridKind::CpfHalf, n)?;
    let omega0 = initial_value(y, &grid, &Kernel::Cpf { t_center: t }, &omega_init(init.into()))?;
    let (x, clipped) = cpf_products(y, t)?;
    let cfg = cfg.with_default_step(grid.cell(), 1);
    let optim = try_minimize(|w| Ok(-cpf_sum(&x, w[0]).norm_sqr()), &[omega0], &cfg)?;
    Ok(finish_cpf(y, optim, clipped))
}

/// Maximizes `|Π_l CPF(t_l, Ω)|`, working with `Σ_l ln|CPF(t_l, Ω)|`.
pub fn pcpf_estimate(
    y: &ComplexSignal,
    cpf: &CpfConfig,
    init: impl Into<Init>,
    cfg: &SimplexConfig,
) -> Result<CpfEstimate> {
    let n = y.len();
    if n < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!("PCPF needs N ≥ {MIN_SAMPLES}, got {n}")));
    }
    let times = cpf.product_times(n);
    let grid = GridSpec::new(GridKind::CpfHalf, n)?;
    let kernel = Kernel::Pcpf { times: times.clone() };
    let omega0 = initial_value(y, &grid, &kernel, &omega_init(init.into()))?;
    let mut factors = Vec::with_capacity(times.len());
    let mut clipped = false;
    for &t in &times {
        let (x, c) = cpf_products(y, t)?;
        clipped |= c;
        factors.push(x);
    }
    let cfg = cfg.with_default_step(grid.cell(), 1);
    let optim = try_minimize(
        |w| Ok(-factors.iter().map(|x| cpf_sum(x, w[0]).norm().ln()).sum::<f64>()),
        &[omega0],
        &cfg,
    )?;
    Ok(finish_cpf(y, optim, clipped))
}

/// Baseline used at each stage of [`sequential_baseline`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineFlavor {
    Dechirp,
    Pcpf,
}

/// Stagewise baseline: estimate the dominant rate with the chosen baseline,
/// profile its amplitude, subtract it and repeat. Rates are alias-resolved.
pub fn sequential_baseline(
    y: &ComplexSignal,
    p: usize,
    flavor: BaselineFlavor,
    cpf: &CpfConfig,
    inits: &[Init],
    cfg: &SimplexConfig,
) -> Result<FitResult> {
    if p == 0 || 4 * p >= y.len() {
        return Err(Error::InvalidInput(format!(
            "need 1 ≤ p < N/4, got p = {p} for N = {}",
            y.len()
        )));
    }
    let method = match flavor {
        BaselineFlavor::Dechirp => Method::Dechirp,
        BaselineFlavor::Pcpf => Method::Pcpf,
    };
    let mut fit = FitResult::new(method);
    let mut current = y.clone();
    for stage in 0..p {
        let init = inits.get(stage).cloned().unwrap_or_default();
        let step = match flavor {
            BaselineFlavor::Dechirp => dechirp_estimate(&current, init, cfg)
                .map(|d| (d.beta_resolved, d.alias_ambiguous, d.optim)),
            BaselineFlavor::Pcpf => pcpf_estimate(&current, cpf, init, cfg)
                .map(|c| (c.beta_resolved, c.alias_ambiguous, c.optim)),
        }
        .and_then(|(beta, ambiguous, optim)| {
            let a = profile_amplitudes(&current, &[beta])?[0];
            Ok((ChirpComponent::from_amplitude(a, beta), ambiguous, optim))
        });
        let (c, ambiguous, optim) = match step {
            Ok(s) => s,
            Err(e) => {
                return Err(Error::Stage { stage: stage + 1, partial: Box::new(fit), source: Box::new(e) })
            }
        };
        if ambiguous {
            fit.warnings.push(format!("stage {}: rate is alias-ambiguous", stage + 1));
        }
        current = current.subtract_component(&c);
        fit.components.push(c);
        fit.rss_trajectory.push(current.energy());
        fit.optim.push(optim);
    }
    Ok(fit)
}
