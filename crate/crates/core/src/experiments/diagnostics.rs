//! Model-order selection from the RSS trajectory and Ljung-Box checks on the
//! residuals of a sequential fit.

use std::fmt::Write as _;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::estimators::{residual, sequential_fit, FitResult, Flavor};
use crate::optimizer::SimplexConfig;
use crate::signal::ComplexSignal;

/// Residual energies at or below this fraction of the largest entry count as
/// numerical zero.
const ZERO_RSS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LjungBox {
    pub statistic: f64,
    pub lags: usize,
    pub p_value: f64,
}

/// `Q = N(N+2)·Σ_{k=1..h} ρ̂_k²/(N−k)` on the mean-centered sequence, with a
/// chi-square(h) upper-tail p-value.
pub fn ljung_box(x: &[f64], h: usize) -> Result<LjungBox> {
    let n = x.len();
    if h == 0 || n <= h {
        return Err(Error::InvalidInput(format!("Ljung-Box needs 1 ≤ h < N, got h = {h}, N = {n}")));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let denom: f64 = c.iter().map(|v| v * v).sum();
    if denom == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let nf = n as f64;
    let q = nf
        * (nf + 2.0)
        * (1..=h)
            .map(|k| {
                let rho = c[..n - k].iter().zip(&c[k..]).map(|(a, b)| a * b).sum::<f64>() / denom;
                rho * rho / (nf - k as f64)
            })
            .sum::<f64>();
    let chi = ChiSquared::new(h as f64).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(LjungBox { statistic: q, lags: h, p_value: chi.sf(q).clamp(0.0, 1.0) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RssTrajectory {
    /// RSS after each completed stage.
    pub values: Vec<f64>,
    /// Set when a stage failed; `values` then stops before `max_order`.
    pub failed_stage: Option<usize>,
    /// Fit over the completed stages.
    pub fit: FitResult,
}

/// Runs a sequential fit up to `max_order` stages.
pub fn rss_trajectory(
    y: &ComplexSignal,
    max_order: usize,
    flavor: Flavor,
    cfg: &SimplexConfig,
) -> Result<RssTrajectory> {
    if max_order == 0 {
        return Err(Error::InvalidInput("max_order must be at least 1".into()));
    }
    match sequential_fit(y, max_order, flavor, cfg) {
        Ok(fit) => Ok(RssTrajectory { values: fit.rss_trajectory.clone(), failed_stage: None, fit }),
        Err(Error::Stage { stage, partial, .. }) if !partial.components.is_empty() => {
            Ok(RssTrajectory { values: partial.rss_trajectory.clone(), failed_stage: Some(stage), fit: *partial })
        }
        Err(e) => Err(e),
    }
}

/// Relative RSS drop expected from fitting one more chirp to pure noise,
/// doubled: `2·ln(N²)/N`. A stage removes the largest of roughly N² periodogram
/// ordinates, so on noisy data `tau` should not be set below this.
pub fn noise_floor_tau(n: usize) -> f64 {
    let n = n as f64;
    2.0 * (n * n).ln() / n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderSelection {
    pub order: usize,
    /// True when no stage before the last is followed by a flat stretch.
    pub never_flat: bool,
}

/// Smallest `k` after which every further stage lowers the RSS by a relative
/// amount below `tau`. `rss[i]` is the RSS after stage `i + 1`.
pub fn select_order(rss: &[f64], tau: f64) -> Result<OrderSelection> {
    if rss.is_empty() {
        return Err(Error::InvalidInput("empty RSS trajectory".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
    }
    let floor = ZERO_RSS * rss.iter().cloned().fold(0.0f64, f64::max);
    let drop = |i: usize| {
        if rss[i - 1] <= floor {
            0.0
        } else {
            (rss[i - 1] - rss[i]) / rss[i - 1]
        }
    };
    let len = rss.len();
    // flat[i]: every drop from index i onwards is below tau
    let mut order = len;
    for k in (1..len).rev() {
        if drop(k) < tau {
            order = k;
        } else {
            break;
        }
    }
    Ok(OrderSelection { order, never_flat: order == len && len > 1 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub rss_trajectory: Vec<f64>,
    pub selected_order: usize,
    pub never_flat: bool,
    pub failed_stage: Option<usize>,
    /// `None` when the residual is numerically zero.
    pub ljung_box_re: Option<LjungBox>,
    pub ljung_box_im: Option<LjungBox>,
    pub notes: Vec<String>,
}

impl DiagnosticsReport {
    /// Both parts pass at level `alpha`, split evenly between them.
    pub fn residuals_white(&self, alpha: f64) -> Option<bool> {
        let (re, im) = (self.ljung_box_re?, self.ljung_box_im?);
        Some(re.p_value > alpha / 2.0 && im.p_value > alpha / 2.0)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "selected order: {}", self.selected_order);
        if self.never_flat {
            let _ = writeln!(s, "warning: RSS never flattened; order is the maximum probed");
        }
        if let Some(st) = self.failed_stage {
            let _ = writeln!(s, "warning: stage {st} failed; trajectory truncated");
        }
        let _ = writeln!(s, "rss trajectory:");
        for (k, r) in self.rss_trajectory.iter().enumerate() {
            let _ = writeln!(s, "  {:>4}  {r:.6e}", k + 1);
        }
        for (name, lb) in [("real", self.ljung_box_re), ("imaginary", self.ljung_box_im)] {
            match lb {
                Some(lb) => {
                    let _ = writeln!(
                        s,
                        "ljung-box ({name} part): Q = {:.4}, h = {}, p = {:.4}",
                        lb.statistic, lb.lags, lb.p_value
                    );
                }
                None => {
                    let _ = writeln!(s, "ljung-box ({name} part): not applicable, residual is numerically zero");
                }
            }
        }
        if let Some(w) = self.residuals_white(0.05) {
            let _ = writeln!(s, "residuals white at 5%: {}", if w { "yes" } else { "no" });
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct RealFit {
    pub report: DiagnosticsReport,
    pub fit: FitResult,
    pub fitted: ComplexSignal,
    pub residual: ComplexSignal,
}

/// Sequential fit up to `max_order`, order selection with threshold `tau`,
/// and Ljung-Box tests at lag `h` on the real and imaginary residual parts.
///
/// The fit at the selected order is the first stages of the maximal fit,
/// which is what a refit at that order would produce.
pub fn fit_real(
    y: &ComplexSignal,
    max_order: usize,
    tau: f64,
    h: usize,
    flavor: Flavor,
    cfg: &SimplexConfig,
) -> Result<RealFit> {
    let traj = rss_trajectory(y, max_order, flavor, cfg)?;
    let sel = select_order(&traj.values, tau)?;
    let fit = traj.fit.truncated(sel.order);
    let res = residual(y, &fit);
    let fitted = y.sub(&res)?;
    let mut notes = Vec::new();
    let (lb_re, lb_im) = if res.energy() <= ZERO_RSS * y.energy() {
        notes.push("residual is numerically zero; whiteness test skipped".to_string());
        (None, None)
    } else {
        (Some(ljung_box(&res.re(), h)?), Some(ljung_box(&res.im(), h)?))
    };
    notes.extend(fit.warnings.iter().cloned());
    Ok(RealFit {
        report: DiagnosticsReport {
            rss_trajectory: traj.values,
            selected_order: sel.order,
            never_flat: sel.never_flat,
            failed_stage: traj.failed_stage,
            ljung_box_re: lb_re,
            ljung_box_im: lb_im,
            notes,
        },
        fit,
        fitted,
        residual: res,
    })
}
