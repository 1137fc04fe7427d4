//! Monte Carlo harness and residual diagnostics.
//!
//! Each `(N, σ²)` cell draws `replications` noisy records from the truth,
//! with replication `r` seeded by `base_seed + r`, runs every requested method
//! and compares the estimates with the truth after one-to-one nearest-β
//! matching. Replications run on the rayon pool and are reduced in
//! replication order, so tables do not depend on the thread count. Timing
//! columns are the one exception and are only filled in when
//! `record_timing` is set.

pub mod config;
pub mod diagnostics;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

pub use config::{apply_config, format_components, parse_components, parse_config, to_config_text};
pub use diagnostics::{
    fit_real, ljung_box, noise_floor_tau, rss_trajectory, select_order, DiagnosticsReport, LjungBox, OrderSelection, RealFit,
    RssTrajectory,
};

use crate::asymptotics::{finite_n_variances, PARAMETER_NAMES};
use crate::baselines::{cpf_estimate, sequential_baseline, BaselineFlavor, CpfConfig};
use crate::error::{Error, Result};
use crate::estimators::{alse_one, lse_joint, lse_one, sequential_fit_init, Flavor, Method, MIN_SAMPLES};
use crate::optimizer::SimplexConfig;
use crate::periodogram::Init;
use crate::signal::{add, circular_distance, generate_noise, synthesize_clean, ChirpComponent, ChirpModel, NoiseSpec};

/// Half-width, in grid cells, of the search window used with `oracle_init`.
pub const ORACLE_CELLS: usize = 5;

pub const PRESETS: [&str; 5] = ["4a", "4b", "4c-1", "4c-2", "4c-3"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ChirpModel,
    pub n_values: Vec<usize>,
    pub sigma2_values: Vec<f64>,
    pub methods: Vec<Method>,
    pub replications: usize,
    pub base_seed: u64,
    /// Restrict every grid search to `±ORACLE_CELLS` cells around the true
    /// rates (joint LSE starts exactly at them). Uses knowledge of the truth.
    pub oracle_init: bool,
    pub output_path: Option<PathBuf>,
    /// Fill the runtime column. Off by default because wall-clock times are
    /// the only non-reproducible output.
    pub record_timing: bool,
    pub simplex: SimplexConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ChirpModel::default(),
            n_values: vec![201],
            sigma2_values: vec![1.0],
            methods: vec![Method::Lse],
            replications: 500,
            base_seed: 2024,
            oracle_init: false,
            output_path: None,
            record_timing: false,
            simplex: SimplexConfig::default(),
        }
    }
}

fn model(comps: &[(f64, f64, f64)]) -> ChirpModel {
    ChirpModel::new(comps.iter().map(|&(r, i, b)| ChirpComponent::new(r, i, b)).collect())
        .expect("preset models are valid")
}

impl ExperimentConfig {
    /// Built-in setups.
    ///
    /// * `4a`: one chirp `A = 5, β = 0.5`, N from 101 to 501, σ² ∈ {1, 2, 3},
    ///   LSE, ALSE, dechirping and CPF.
    /// * `4b`: `(7, β = 1)` plus `(5, β = 0.5)`, sequential LSE/ALSE, sequential
    ///   dechirping and sequential PCPF on the same grid.
    /// * `4c-1`, `4c-2`, `4c-3`: `(7, β₁)` plus `(5, 0.5)` with β₁ = 0.51, 0.502,
    ///   0.501 at N = 300, σ² = 1, joint LSE against the sequential methods.
    ///
    /// `4a` and `4b` search near the truth (`oracle_init`), as the paper did;
    /// the close-rate presets scan the full grid.
    pub fn preset(name: &str) -> Result<Self> {
        let sweep_n = vec![101, 201, 301, 401, 501];
        let sweep_s2 = vec![1.0, 2.0, 3.0];
        let close = |beta1: f64| ExperimentConfig {
            model: model(&[(7.0, 0.0, beta1), (5.0, 0.0, 0.5)]),
            n_values: vec![300],
            sigma2_values: vec![1.0],
            methods: vec![Method::LseJoint, Method::SeqLse, Method::SeqAlse],
            oracle_init: false,
            ..Default::default()
        };
        Ok(match name {
            "4a" => ExperimentConfig {
                model: model(&[(5.0, 0.0, 0.5)]),
                n_values: sweep_n,
                sigma2_values: sweep_s2,
                methods: vec![Method::Lse, Method::Alse, Method::Dechirp, Method::Cpf],
                oracle_init: true,
                ..Default::default()
            },
            "4b" => ExperimentConfig {
                model: model(&[(7.0, 0.0, 1.0), (5.0, 0.0, 0.5)]),
                n_values: sweep_n,
                sigma2_values: sweep_s2,
                methods: vec![Method::SeqLse, Method::SeqAlse, Method::Dechirp, Method::Pcpf],
                oracle_init: true,
                ..Default::default()
            },
            "4c-1" => close(0.51),
            "4c-2" => close(0.502),
            "4c-3" => close(0.501),
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown preset `{other}` (known: {})",
                    PRESETS.join(", ")
                )))
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.model.is_empty() {
            return Err(Error::InvalidInput("experiment needs a model".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidInput("replications must be at least 1".into()));
        }
        if self.n_values.is_empty() || self.sigma2_values.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidInput("n_values, sigma2_values and methods must be non-empty".into()));
        }
        let p = self.model.len();
        if let Some(&n) = self.n_values.iter().find(|&&n| n < MIN_SAMPLES || 4 * p >= n) {
            return Err(Error::InvalidInput(format!("N = {n} is too short for {p} component(s)")));
        }
        if let Some(s) = self.sigma2_values.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidInput(format!("sigma2 values must be positive, got {s}")));
        }
        self.simplex.validate()
    }
}

/// One line of the MSE table.
#[derive(Debug, Clone, PartialEq)]
pub struct MseRow {
    pub method: Method,
    /// 1-based index into the true model.
    pub component: usize,
    /// `a_re`, `a_im` or `beta`.
    pub parameter: &'static str,
    pub n: usize,
    pub sigma2: f64,
    /// `None` when no replication produced an estimate for this component.
    pub mse: Option<f64>,
    /// Asymptotic variance; `None` for the baselines.
    pub theoretical_var: Option<f64>,
    pub mean_runtime: Option<f64>,
    pub replications_used: usize,
    /// Replications where the method returned an error.
    pub excluded: usize,
}

impl MseRow {
    pub fn ratio(&self) -> Option<f64> {
        Some(self.mse? / self.theoretical_var?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MseTable {
    pub rows: Vec<MseRow>,
    pub oracle_init: bool,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:e}"))
}

impl MseTable {
    pub fn find(&self, method: Method, component: usize, parameter: &str, n: usize, sigma2: f64) -> Option<&MseRow> {
        self.rows.iter().find(|r| {
            r.method == method && r.component == component && r.parameter == parameter && r.n == n && r.sigma2 == sigma2
        })
    }

    /// Rows for one method, component and parameter across all cells.
    pub fn series(&self, method: Method, component: usize, parameter: &str) -> Vec<&MseRow> {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.component == component && r.parameter == parameter)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "method",
            "init",
            "component",
            "parameter",
            "n",
            "sigma2",
            "mse",
            "theoretical_var",
            "ratio",
            "mean_runtime_s",
            "replications_used",
            "excluded",
        ])?;
        let init = if self.oracle_init { "oracle" } else { "scan" };
        for r in &self.rows {
            w.write_record([
                r.method.to_string(),
                init.to_string(),
                r.component.to_string(),
                r.parameter.to_string(),
                r.n.to_string(),
                r.sigma2.to_string(),
                opt(r.mse),
                opt(r.theoretical_var),
                opt(r.ratio()),
                opt(r.mean_runtime),
                r.replications_used.to_string(),
                r.excluded.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Rayon pool sized by `CHIRPFIT_THREADS` (unset or 0: one per core).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var("CHIRPFIT_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidInput(format!("CHIRPFIT_THREADS must be a count, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot build thread pool: {e}")))
}

/// One-to-one assignment of estimates to true rates, closest pairs first.
/// Entry `i` is the truth index matched to estimate `i`.
pub fn match_to_truth(estimated: &[f64], truth: &[f64]) -> Vec<Option<usize>> {
    let mut pairs: Vec<(f64, usize, usize)> = estimated
        .iter()
        .enumerate()
        .flat_map(|(i, &e)| truth.iter().enumerate().map(move |(j, &t)| (circular_distance(e, t, std::f64::consts::TAU), i, j)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = vec![None; estimated.len()];
    let mut taken = vec![false; truth.len()];
    for (_, i, j) in pairs {
        if out[i].is_none() && !taken[j] {
            out[i] = Some(j);
            taken[j] = true;
        }
    }
    out
}

fn dominant(truth: &ChirpModel) -> &ChirpComponent {
    truth
        .components()
        .iter()
        .max_by(|a, b| a.magnitude().total_cmp(&b.magnitude()))
        .expect("validated model is non-empty")
}

/// Runs `method` on `y` the way the harness does. Single-component methods
/// (`lse`, `alse`, `cpf`) return one component; the others return `p`.
pub fn estimate_with(
    method: Method,
    y: &crate::signal::ComplexSignal,
    truth: &ChirpModel,
    oracle_init: bool,
    simplex: &SimplexConfig,
) -> Result<Vec<ChirpComponent>> {
    let p = truth.len();
    let window = |beta: f64| if oracle_init { Init::Window { center: beta, cells: ORACLE_CELLS } } else { Init::Scan };
    let single = window(dominant(truth).beta);
    // stages peel components off in order of decreasing magnitude
    let mut by_size: Vec<&ChirpComponent> = truth.components().iter().collect();
    by_size.sort_by(|a, b| b.magnitude().total_cmp(&a.magnitude()));
    let inits: Vec<Init> = by_size.iter().map(|c| window(c.beta)).collect();
    Ok(match method {
        Method::Lse => lse_one(y, single, simplex)?.components,
        Method::Alse => alse_one(y, single, simplex)?.components,
        Method::Cpf => {
            let c = cpf_estimate(y, &CpfConfig::default(), single, simplex)?;
            let a = crate::estimators::profile_amplitudes(y, &[c.beta_resolved])?[0];
            vec![ChirpComponent::from_amplitude(a, c.beta_resolved)]
        }
        Method::LseJoint => {
            let starts = truth.betas();
            lse_joint(y, p, oracle_init.then_some(starts.as_slice()), simplex)?.components
        }
        Method::SeqLse => sequential_fit_init(y, p, Flavor::Lse, &inits, simplex)?.components,
        Method::SeqAlse => sequential_fit_init(y, p, Flavor::Alse, &inits, simplex)?.components,
        Method::Dechirp => {
            sequential_baseline(y, p, BaselineFlavor::Dechirp, &CpfConfig::default(), &inits, simplex)?.components
        }
        Method::Pcpf => {
            sequential_baseline(y, p, BaselineFlavor::Pcpf, &CpfConfig::default(), &inits, simplex)?.components
        }
    })
}

fn reports_amplitudes(method: Method) -> bool {
    method.is_least_squares()
}

/// Squared errors `(a_re, a_im, β)` per matched truth component.
type RepErrors = Vec<Option<[f64; 3]>>;

struct RepOutcome {
    per_method: Vec<(Option<RepErrors>, f64)>,
}

fn squared_errors(est: &[ChirpComponent], truth: &ChirpModel) -> RepErrors {
    let betas: Vec<f64> = est.iter().map(|c| c.beta).collect();
    let mut out = vec![None; truth.len()];
    for (i, m) in match_to_truth(&betas, &truth.betas()).into_iter().enumerate() {
        if let Some(j) = m {
            let (e, t) = (&est[i], &truth.components()[j]);
            let db = circular_distance(e.beta, t.beta, std::f64::consts::TAU);
            out[j] = Some([(e.a_re - t.a_re).powi(2), (e.a_im - t.a_im).powi(2), db * db]);
        }
    }
    out
}

fn run_cell(cfg: &ExperimentConfig, n: usize, sigma2: f64) -> Result<Vec<MseRow>> {
    let clean = synthesize_clean(&cfg.model, n)?;
    let outcomes: Vec<RepOutcome> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| -> Result<RepOutcome> {
            let seed = cfg.base_seed.wrapping_add(rep as u64);
            let y = add(&clean, &generate_noise(&NoiseSpec::iid(sigma2, seed), n)?)?;
            let per_method = cfg
                .methods
                .iter()
                .map(|&m| {
                    let start = Instant::now();
                    let est = estimate_with(m, &y, &cfg.model, cfg.oracle_init, &cfg.simplex);
                    let secs = start.elapsed().as_secs_f64();
                    (est.ok().map(|e| squared_errors(&e, &cfg.model)), secs)
                })
                .collect();
            Ok(RepOutcome { per_method })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (mi, &method) in cfg.methods.iter().enumerate() {
        let p = cfg.model.len();
        let mut sums = vec![[0.0f64; 3]; p];
        let mut counts = vec![0usize; p];
        let mut excluded = 0;
        let mut time = 0.0;
        for o in &outcomes {
            let (errs, secs) = &o.per_method[mi];
            time += secs;
            match errs {
                None => excluded += 1,
                Some(errs) => {
                    for (j, e) in errs.iter().enumerate() {
                        if let Some(e) = e {
                            counts[j] += 1;
                            for k in 0..3 {
                                sums[j][k] += e[k];
                            }
                        }
                    }
                }
            }
        }
        let runtime = cfg.record_timing.then(|| time / cfg.replications as f64);
        for (j, truth) in cfg.model.components().iter().enumerate() {
            let theory = finite_n_variances(truth, sigma2, n)?;
            let params: &[usize] = if reports_amplitudes(method) { &[0, 1, 2] } else { &[2] };
            for &k in params {
                rows.push(MseRow {
                    method,
                    component: j + 1,
                    parameter: PARAMETER_NAMES[k],
                    n,
                    sigma2,
                    mse: (counts[j] > 0).then(|| sums[j][k] / counts[j] as f64),
                    theoretical_var: reports_amplitudes(method).then_some(theory[k]),
                    mean_runtime: runtime,
                    replications_used: counts[j],
                    excluded,
                });
            }
        }
    }
    Ok(rows)
}

/// Runs every `(N, σ²)` cell of the configuration on the pool from
/// [`thread_pool`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<MseTable> {
    cfg.validate()?;
    let pool = thread_pool()?;
    let mut rows = Vec::new();
    for &n in &cfg.n_values {
        for &s2 in &cfg.sigma2_values {
            rows.extend(pool.install(|| run_cell(cfg, n, s2))?);
        }
    }
    Ok(MseTable { rows, oracle_init: cfg.oracle_init })
}

/// Ordinary least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidInput("slope needs at least two positive points".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all x values are equal".into()));
    }
    Ok(sxy / sxx)
}
