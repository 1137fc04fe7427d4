//! Least squares (LSE), approximate least squares (ALSE), joint multi-component
//! LSE and the sequential LSE/ALSE procedures.
//!
//! Amplitudes are linear and are always profiled out: for rates `β_1…β_p`
//! with basis columns `z_k(t) = exp(iβ_k t²)`, `Â = (Z^H Z)^{-1} Z^H Y` and the
//! profiled residual sum of squares is `R(β) = Y^H (I − P_Z) Y`. Only the rates
//! are searched, from a periodogram-type grid point, by the simplex method.

use std::f64::consts::TAU;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optimizer::{try_minimize, OptimResult, SimplexConfig};
use crate::periodogram::{
    chirp_sum, default_min_separation, initial_value, ptf_cell, ptf_value, real_projections,
    scan, top_peaks, GridSpec, Init, Kernel,
};
use crate::signal::{chirp_phasor, circular_distance, normalize_rate, ChirpComponent, ComplexSignal};

/// Smallest record the single-component estimators accept.
pub const MIN_SAMPLES: usize = 8;
/// Rates closer than this during a joint search are a degenerate basis.
pub const COLLAPSE_TOL: f64 = 1e-8;
/// Largest accepted condition number of `Z^H Z`.
pub const MAX_CONDITION: f64 = 1e8;

/// Estimation method tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Lse,
    Alse,
    LseJoint,
    SeqLse,
    SeqAlse,
    Dechirp,
    Cpf,
    Pcpf,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Lse,
        Method::Alse,
        Method::LseJoint,
        Method::SeqLse,
        Method::SeqAlse,
        Method::Dechirp,
        Method::Cpf,
        Method::Pcpf,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Lse => "lse",
            Method::Alse => "alse",
            Method::LseJoint => "lse-joint",
            Method::SeqLse => "seq-lse",
            Method::SeqAlse => "seq-alse",
            Method::Dechirp => "dechirp",
            Method::Cpf => "cpf",
            Method::Pcpf => "pcpf",
        }
    }

    /// Methods whose amplitude estimates and asymptotic variances are
    /// covered by the least-squares theory.
    pub fn is_least_squares(&self) -> bool {
        matches!(self, Method::Lse | Method::Alse | Method::LseJoint | Method::SeqLse | Method::SeqAlse)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == key)
            .ok_or_else(|| Error::Parse(format!("unknown method '{s}'")))
    }
}

/// Which single-component criterion a sequential stage uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Lse,
    Alse,
}

impl From<Option<f64>> for Init {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Init::Scan, Init::Value)
    }
}

/// Estimated components and per-stage bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// In estimation order.
    pub components: Vec<ChirpComponent>,
    /// RSS after each stage; a single entry for one-shot fits.
    pub rss_trajectory: Vec<f64>,
    pub method: Method,
    pub optim: Vec<OptimResult>,
    /// `σ²·D·Σ_k⁻¹·D` per component, when attached.
    pub covariance: Option<Vec<Matrix3<f64>>>,
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn new(method: Method) -> Self {
        Self {
            components: Vec::new(),
            rss_trajectory: Vec::new(),
            method,
            optim: Vec::new(),
            covariance: None,
            warnings: Vec::new(),
        }
    }

    pub fn betas(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.beta).collect()
    }

    /// True when every simplex search met its tolerances.
    pub fn converged(&self) -> bool {
        self.optim.iter().all(|o| o.converged)
    }

    /// Final RSS, if any stage ran.
    pub fn rss(&self) -> Option<f64> {
        self.rss_trajectory.last().copied()
    }

    /// Keeps the first `k` stages of a sequential fit.
    pub fn truncated(&self, k: usize) -> FitResult {
        let mut out = self.clone();
        out.components.truncate(k);
        out.rss_trajectory.truncate(k);
        out.optim.truncate(k);
        if let Some(c) = out.covariance.as_mut() {
            c.truncate(k);
        }
        out
    }

    /// Writes `k,a_re,a_im,beta,rss_after_stage`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "a_re", "a_im", "beta", "rss_after_stage"])?;
        for (k, c) in self.components.iter().enumerate() {
            let rss = self.rss_trajectory.get(k).or(self.rss_trajectory.last());
            w.write_record([
                (k + 1).to_string(),
                format!("{:.17e}", c.a_re),
                format!("{:.17e}", c.a_im),
                format!("{:.17e}", c.beta),
                rss.map_or_else(|| "n/a".to_string(), |r| format!("{r:.17e}")),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the attached covariance blocks as `k,row,c1,c2,c3`.
    pub fn write_covariance_csv<W: Write>(&self, out: W) -> Result<()> {
        let blocks = self
            .covariance
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("fit has no covariance attached".into()))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "row", "c1", "c2", "c3"])?;
        for (k, m) in blocks.iter().enumerate() {
            for r in 0..3 {
                w.write_record([
                    (k + 1).to_string(),
                    (r + 1).to_string(),
                    format!("{:.17e}", m[(r, 0)]),
                    format!("{:.17e}", m[(r, 1)]),
                    format!("{:.17e}", m[(r, 2)]),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn check_rates(y: &ComplexSignal, betas: &[f64]) -> Result<()> {
    let p = betas.len();
    if p == 0 || p >= y.len() {
        return Err(Error::InvalidInput(format!(
            "need 1 ≤ p < N rates, got p = {p} for N = {}",
            y.len()
        )));
    }
    if betas.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidInput("frequency rates must be finite".into()));
    }
    Ok(())
}

/// `Z^H Z`, with `(j, k)` entry `Σ_t exp(i(β_k − β_j)t²)`.
fn gram(n: usize, betas: &[f64]) -> DMatrix<Complex64> {
    let p = betas.len();
    let mut g = DMatrix::from_element(p, p, Complex64::new(n as f64, 0.0));
    for j in 0..p {
        for k in j + 1..p {
            let d = betas[k] - betas[j];
            let s: Complex64 = (1..=n).map(|t| chirp_phasor(d, t)).sum();
            g[(j, k)] = s;
            g[(k, j)] = s.conj();
        }
    }
    g
}

/// Solves the normal equations, returning `(Â, Z^H Y)`.
fn solve_profile(y: &ComplexSignal, betas: &[f64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_rates(y, betas)?;
    let n = y.len();
    let b: Vec<Complex64> = betas.iter().map(|&beta| chirp_sum(y, beta)).collect();
    if betas.len() == 1 {
        return Ok((vec![b[0] / n as f64], b));
    }
    let g = gram(n, betas);
    let eig = g.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if !(lo > 0.0) || hi / lo > MAX_CONDITION {
        return Err(Error::Degenerate(format!(
            "Z^H Z is ill-conditioned (condition {:.3e}) at rates {betas:?}",
            hi / lo
        )));
    }
    let rhs = DVector::from_vec(b.clone());
    let sol = g
        .cholesky()
        .ok_or_else(|| Error::Degenerate(format!("Z^H Z is not positive definite at rates {betas:?}")))?
        .solve(&rhs);
    Ok((sol.iter().copied().collect(), b))
}

/// Least-squares amplitudes for fixed rates.
pub fn profile_amplitudes(y: &ComplexSignal, betas: &[f64]) -> Result<Vec<Complex64>> {
    solve_profile(y, betas).map(|(a, _)| a)
}

/// Profiled RSS `R(β) = ‖Y‖² − (Z^H Y)^H Â`, clamped at zero.
pub fn profile_rss(y: &ComplexSignal, betas: &[f64]) -> Result<f64> {
    let (a, b) = solve_profile(y, betas)?;
    let explained: f64 = a.iter().zip(&b).map(|(ak, bk)| (bk.conj() * ak).re).sum();
    Ok((y.energy() - explained).max(0.0))
}

/// `y` minus every fitted component.
pub fn residual(y: &ComplexSignal, fit: &FitResult) -> ComplexSignal {
    subtract_all(y, &fit.components)
}

fn subtract_all(y: &ComplexSignal, comps: &[ChirpComponent]) -> ComplexSignal {
    comps.iter().fold(y.clone(), |acc, c| acc.subtract_component(c))
}

fn check_length(y: &ComplexSignal) -> Result<()> {
    if y.len() < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            y.len()
        )));
    }
    Ok(())
}

fn check_order(y: &ComplexSignal, p: usize) -> Result<()> {
    if p == 0 || 4 * p >= y.len() {
        return Err(Error::InvalidInput(format!(
            "need 1 ≤ p < N/4, got p = {p} for N = {}",
            y.len()
        )));
    }
    Ok(())
}

fn single_fit(y: &ComplexSignal, flavor: Flavor, init: &Init, cfg: &SimplexConfig) -> Result<FitResult> {
    check_length(y)?;
    let n = y.len();
    let grid = GridSpec::ptf(n)?;
    let beta0 = initial_value(y, &grid, &Kernel::Ptf, init)?;
    let cfg = cfg.with_default_step(ptf_cell(n), 1);
    let (opt, component, method) = match flavor {
        Flavor::Lse => {
            // for one rate the profiled RSS is ‖y‖² − I(β)
            let energy = y.energy();
            let opt = try_minimize(|b| Ok(energy - ptf_value(y, b[0])), &[beta0], &cfg)?;
            let beta = normalize_rate(opt.argmin[0]);
            let a = profile_amplitudes(y, &[beta])?[0];
            (opt, ChirpComponent::from_amplitude(a, beta), Method::Lse)
        }
        Flavor::Alse => {
            let opt = try_minimize(|b| Ok(-ptf_value(y, b[0])), &[beta0], &cfg)?;
            let beta = normalize_rate(opt.argmin[0]);
            let (sr, si) = real_projections(y, beta);
            (opt, ChirpComponent::new(sr / n as f64, si / n as f64, beta), Method::Alse)
        }
    };
    let mut fit = FitResult::new(method);
    if !opt.converged {
        fit.warnings.push(format!(
            "simplex stopped after {} iterations without meeting tolerances",
            opt.iterations
        ));
    }
    fit.rss_trajectory.push(y.subtract_component(&component).energy());
    fit.components.push(component);
    fit.optim.push(opt);
    Ok(fit)
}

/// Single-component LSE: minimizes the profiled RSS `R(β)` from a grid start.
pub fn lse_one(y: &ComplexSignal, init: impl Into<Init>, cfg: &SimplexConfig) -> Result<FitResult> {
    single_fit(y, Flavor::Lse, &init.into(), cfg)
}

/// Single-component ALSE: maximizes `I(β)` from a grid start, then takes the
/// amplitudes from the real regression sums.
pub fn alse_one(y: &ComplexSignal, init: impl Into<Init>, cfg: &SimplexConfig) -> Result<FitResult> {
    single_fit(y, Flavor::Alse, &init.into(), cfg)
}

/// Joint LSE of `p` components: a `p`-dimensional simplex search over the
/// profiled RSS. Without explicit starting rates the `p` highest peaks of a
/// full periodogram-type scan are used.
pub fn lse_joint(
    y: &ComplexSignal,
    p: usize,
    init_betas: Option<&[f64]>,
    cfg: &SimplexConfig,
) -> Result<FitResult> {
    check_length(y)?;
    check_order(y, p)?;
    let n = y.len();
    let cell = ptf_cell(n);
    let start: Vec<f64> = match init_betas {
        Some(b) if b.len() == p => b.to_vec(),
        Some(b) => {
            return Err(Error::InvalidInput(format!("got {} starting rates for p = {p}", b.len())))
        }
        None => {
            let s = scan(y, &GridSpec::ptf(n)?, &Kernel::Ptf)?;
            let peaks = top_peaks(&s, p, default_min_separation(n))?;
            if peaks.shortfall {
                return Err(Error::PeakShortfall { requested: p, found: peaks.locations.len() });
            }
            peaks.locations
        }
    };
    let mut fit = FitResult::new(Method::LseJoint);
    for i in 0..p {
        for j in i + 1..p {
            if circular_distance(start[i], start[j], TAU) < 10.0 * cell {
                fit.warnings.push(format!(
                    "starting rates {} and {} are within ten grid cells; they may not be resolvable",
                    start[i], start[j]
                ));
            }
        }
    }
    let cfg = cfg.with_default_step(cell, p);
    let objective = |b: &[f64]| -> Result<f64> {
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                if circular_distance(b[i], b[j], TAU) < COLLAPSE_TOL {
                    return Err(Error::Degenerate(format!(
                        "rates {} and {} collapsed during the joint search",
                        b[i], b[j]
                    )));
                }
            }
        }
        profile_rss(y, b)
    };
    let opt = try_minimize(objective, &start, &cfg)?;
    let betas: Vec<f64> = opt.argmin.iter().map(|&b| normalize_rate(b)).collect();
    let amps = profile_amplitudes(y, &betas)?;
    fit.components = amps
        .iter()
        .zip(&betas)
        .map(|(&a, &b)| ChirpComponent::from_amplitude(a, b))
        .collect();
    if !opt.converged {
        fit.warnings.push(format!(
            "simplex stopped after {} iterations without meeting tolerances",
            opt.iterations
        ));
    }
    fit.rss_trajectory.push(subtract_all(y, &fit.components).energy());
    fit.optim.push(opt);
    Ok(fit)
}

/// Sequential LSE/ALSE with a full grid scan of the working data at each stage.
pub fn sequential_fit(
    y: &ComplexSignal,
    p: usize,
    flavor: Flavor,
    cfg: &SimplexConfig,
) -> Result<FitResult> {
    sequential_fit_init(y, p, flavor, &[], cfg)
}

/// Sequential LSE/ALSE. Stage `k` starts from `inits[k]` (full scan when
/// absent), fits one component to the working data and subtracts it.
///
/// A failing stage returns [`Error::Stage`] carrying the stages completed so far.
pub fn sequential_fit_init(
    y: &ComplexSignal,
    p: usize,
    flavor: Flavor,
    inits: &[Init],
    cfg: &SimplexConfig,
) -> Result<FitResult> {
    check_length(y)?;
    check_order(y, p)?;
    let method = match flavor {
        Flavor::Lse => Method::SeqLse,
        Flavor::Alse => Method::SeqAlse,
    };
    let mut fit = FitResult::new(method);
    let mut current = y.clone();
    for stage in 0..p {
        let init = inits.get(stage).cloned().unwrap_or_default();
        let one = match single_fit(&current, flavor, &init, cfg) {
            Ok(f) => f,
            Err(e) => {
                return Err(Error::Stage { stage: stage + 1, partial: Box::new(fit), source: Box::new(e) })
            }
        };
        let c = one.components[0];
        current = current.subtract_component(&c);
        fit.components.push(c);
        fit.rss_trajectory.push(current.energy());
        fit.optim.extend(one.optim);
        fit.warnings.extend(one.warnings.into_iter().map(|w| format!("stage {}: {w}", stage + 1)));
    }
    Ok(fit)
}
