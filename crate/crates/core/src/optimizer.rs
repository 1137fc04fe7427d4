//! Downhill simplex (Nelder-Mead) minimizer.
//!
//! All frequency-rate refinements in the crate start from a grid point and run
//! this local search. Coordinates are unconstrained; callers wrap periodic
//! parameters on output.

use crate::error::{Error, Result};

/// Tuning of the simplex search.
///
/// `f_tol` is relative: the search stops on function spread once
/// `max|f_i − f_best| ≤ f_tol·(1 + |f(x0)|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexConfig {
    /// Initial edge length per dimension. `None` lets the caller pick; a bare
    /// `minimize` call then uses 5% of each coordinate (0.00025 at zero).
    pub init_step: Option<Vec<f64>>,
    pub x_tol: f64,
    pub f_tol: f64,
    /// Defaults to `500·d`.
    pub max_iter: Option<usize>,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        Self {
            init_step: None,
            x_tol: 1e-10,
            f_tol: 1e-10,
            max_iter: None,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

impl SimplexConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.reflection > 0.0
            && self.expansion > 1.0
            && self.contraction > 0.0
            && self.contraction < 1.0
            && self.shrink > 0.0
            && self.shrink < 1.0;
        if !ok {
            return Err(Error::InvalidInput(
                "simplex coefficients need reflection > 0, expansion > 1, \
                 0 < contraction < 1 and 0 < shrink < 1"
                    .into(),
            ));
        }
        if !(self.x_tol > 0.0 && self.f_tol > 0.0) {
            return Err(Error::InvalidInput("x_tol and f_tol must be positive".into()));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        if let Some(step) = &self.init_step {
            if step.iter().any(|s| !(s.is_finite() && *s != 0.0)) {
                return Err(Error::InvalidInput("init_step entries must be finite and non-zero".into()));
            }
        }
        Ok(())
    }

    /// Copy of `self` whose initial step defaults to `step` in every dimension.
    pub fn with_default_step(&self, step: f64, dim: usize) -> SimplexConfig {
        let mut cfg = self.clone();
        if cfg.init_step.is_none() {
            cfg.init_step = Some(vec![step; dim]);
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best vertex value at the start of every iteration.
    pub best_trace: Vec<f64>,
}

/// Minimizes an infallible objective.
pub fn minimize<F>(mut objective: F, x0: &[f64], cfg: &SimplexConfig) -> Result<OptimResult>
where
    F: FnMut(&[f64]) -> f64,
{
    try_minimize(|x| Ok(objective(x)), x0, cfg)
}

/// Minimizes an objective that may itself fail (e.g. a degenerate projection).
/// Errors from the objective abort the search and are returned unchanged.
pub fn try_minimize<F>(mut objective: F, x0: &[f64], cfg: &SimplexConfig) -> Result<OptimResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    cfg.validate()?;
    let d = x0.len();
    if d == 0 {
        return Err(Error::InvalidInput("cannot minimize over zero dimensions".into()));
    }
    let steps: Vec<f64> = match &cfg.init_step {
        Some(s) if s.len() == d => s.clone(),
        Some(s) if s.len() == 1 => vec![s[0]; d],
        Some(s) => {
            return Err(Error::InvalidInput(format!(
                "init_step has {} entries for a {d}-dimensional problem",
                s.len()
            )))
        }
        None => x0.iter().map(|&x| if x != 0.0 { 0.05 * x } else { 0.00025 }).collect(),
    };
    let max_iter = cfg.max_iter.unwrap_or(500 * d);

    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| -> Result<f64> {
        evaluations += 1;
        let v = objective(x)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { point: x.to_vec(), value: v });
        }
        Ok(v)
    };

    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut values: Vec<f64> = Vec::with_capacity(d + 1);
    vertices.push(x0.to_vec());
    values.push(eval(x0)?);
    for (i, step) in steps.iter().enumerate() {
        let mut v = x0.to_vec();
        v[i] += step;
        values.push(eval(&v)?);
        vertices.push(v);
    }
    let f_tol_abs = cfg.f_tol * (1.0 + values[0].abs());

    let mut order: Vec<usize> = (0..=d).collect();
    let mut best_trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[d];
        let second_worst = order[d - 1];
        best_trace.push(values[best]);

        let diameter = vertices
            .iter()
            .flat_map(|v| v.iter().zip(&vertices[best]).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        let spread = values.iter().map(|f| (f - values[best]).abs()).fold(0.0f64, f64::max);
        if diameter <= cfg.x_tol && spread <= f_tol_abs {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; d];
        for &i in &order[..d] {
            for (c, x) in centroid.iter_mut().zip(&vertices[i]) {
                *c += x / d as f64;
            }
        }
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&vertices[worst])
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = along(cfg.reflection);
        let fr = eval(&xr)?;
        if fr < values[best] {
            let xe = along(cfg.reflection * cfg.expansion);
            let fe = eval(&xe)?;
            if fe < fr {
                vertices[worst] = xe;
                values[worst] = fe;
            } else {
                vertices[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second_worst] {
            vertices[worst] = xr;
            values[worst] = fr;
            continue;
        }
        if fr < values[worst] {
            let xc = along(cfg.reflection * cfg.contraction);
            let fc = eval(&xc)?;
            if fc <= fr {
                vertices[worst] = xc;
                values[worst] = fc;
                continue;
            }
        } else {
            let xcc = along(-cfg.contraction);
            let fcc = eval(&xcc)?;
            if fcc < values[worst] {
                vertices[worst] = xcc;
                values[worst] = fcc;
                continue;
            }
        }
        // shrink towards the best vertex
        let anchor = vertices[best].clone();
        for &i in &order[1..] {
            let v: Vec<f64> = vertices[i]
                .iter()
                .zip(&anchor)
                .map(|(x, b)| b + cfg.shrink * (x - b))
                .collect();
            values[i] = eval(&v)?;
            vertices[i] = v;
        }
    }

    let best = order[0];
    Ok(OptimResult {
        argmin: vertices[best].clone(),
        value: values[best],
        iterations,
        evaluations,
        converged,
        best_trace,
    })
}
