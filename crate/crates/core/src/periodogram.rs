//! Periodogram-type function `I(β) = (1/N)·|Σ_t y(t)·exp(−iβt²)|²`, grid scans
//! of it and of the baseline kernels, and peak extraction for initial values.
//!
//! Every grid used here is a lattice `2πk/Q` and every kernel phase is a grid
//! point times an integer weight (`t²`, `m²` or `2t`). Scans therefore look the
//! phasor up in a table of `exp(−2πij/Q)` by the exact integer residue
//! `k·w mod Q` instead of calling trig per term. The cost is unchanged,
//! `O(N·|grid|)`, but the constant is small and no phase is ever rounded.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::baselines;
use crate::error::{Error, Result};
use crate::signal::ComplexSignal;

/// Sums with at least this many terms use compensated accumulation.
pub const KAHAN_THRESHOLD: usize = 10_000;

/// Scan grid families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// `2πk/N²`, `k = 1…N²−1`: initializer grid for `I(β)`.
    PtfFull,
    /// `πk/N²`, `k = 1…N²−1`: CPF grid in the IFR variable Ω.
    CpfHalf,
    /// `πk/(N−1)`, `k = 1…N−2`: dechirped-sinusoid grid in β.
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub kind: GridKind,
    pub n: usize,
}

impl GridSpec {
    pub fn new(kind: GridKind, n: usize) -> Result<Self> {
        let min = if kind == GridKind::Fourier { 3 } else { 2 };
        if n < min {
            return Err(Error::InvalidInput(format!("{kind:?} grid needs N ≥ {min}, got {n}")));
        }
        Ok(Self { kind, n })
    }

    pub fn ptf(n: usize) -> Result<Self> {
        Self::new(GridKind::PtfFull, n)
    }

    /// Lattice modulus `Q`: grid point `k` sits at `2πk/Q`.
    pub fn modulus(&self) -> u64 {
        let n = self.n as u64;
        match self.kind {
            GridKind::PtfFull => n * n,
            GridKind::CpfHalf => 2 * n * n,
            GridKind::Fourier => 2 * (n - 1),
        }
    }

    /// Largest grid index; indices run `1..=max_index`.
    pub fn max_index(&self) -> u64 {
        let n = self.n as u64;
        match self.kind {
            GridKind::PtfFull | GridKind::CpfHalf => n * n - 1,
            GridKind::Fourier => n - 2,
        }
    }

    pub fn len(&self) -> usize {
        self.max_index() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.max_index() == 0
    }

    pub fn location(&self, k: u64) -> f64 {
        TAU * k as f64 / self.modulus() as f64
    }

    /// Grid spacing.
    pub fn cell(&self) -> f64 {
        TAU / self.modulus() as f64
    }

    /// Grid index nearest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> u64 {
        let k = (x / self.cell()).round();
        (k.max(1.0) as u64).min(self.max_index())
    }

    /// Indices within `cells` grid steps of `center`.
    pub fn window(&self, center: f64, cells: usize) -> std::ops::RangeInclusive<u64> {
        let k0 = (center / self.cell()).round() as i64;
        let lo = (k0 - cells as i64).max(1) as u64;
        let hi = ((k0 + cells as i64).max(1) as u64).min(self.max_index());
        lo..=hi
    }
}

/// Grid spacing of the periodogram-type initializer, `2π/N²`.
pub fn ptf_cell(n: usize) -> f64 {
    TAU / (n as f64 * n as f64)
}

/// Default peak suppression radius, ten initializer cells.
pub fn default_min_separation(n: usize) -> f64 {
    10.0 * ptf_cell(n)
}

/// How a local search obtains its starting point.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init {
    /// Full grid scan (no knowledge of the truth).
    #[default]
    Scan,
    /// Explicit starting value.
    Value(f64),
    /// Scan only the grid points within `cells` of `center`. With the true
    /// value as center this is oracle knowledge.
    Window { center: f64, cells: usize },
}

/// Evaluated kernel on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub locations: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl ScanResult {
    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    /// Location of the largest magnitude (first one on ties).
    pub fn argmax(&self) -> Option<f64> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &m) in self.magnitudes.iter().enumerate() {
            if best.map_or(true, |(_, b)| m > b) {
                best = Some((i, m));
            }
        }
        best.map(|(i, _)| self.locations[i])
    }

    /// Writes `location,magnitude` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["location", "magnitude"])?;
        for (l, m) in self.locations.iter().zip(&self.magnitudes) {
            w.write_record([format!("{l:.17e}"), format!("{m:.17e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scan kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// `I(β)`.
    Ptf,
    /// `|CPF(t, Ω)|` at one centre time.
    Cpf { t_center: usize },
    /// `|Π_l CPF(t_l, Ω)|`.
    Pcpf { times: Vec<usize> },
    /// Power of the profiled sinusoid fit to the dechirped data,
    /// `|Σ z(t)·exp(i2βt)|²/(N−1)`; the dechirp RSS is `‖z‖²` minus this.
    Dechirp,
}

#[inline]
fn kahan_add(sum: &mut Complex64, comp: &mut Complex64, x: Complex64) {
    let y = x - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

fn sum_complex<I: Iterator<Item = Complex64>>(terms: I, compensated: bool) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    if compensated {
        let mut comp = Complex64::new(0.0, 0.0);
        for x in terms {
            kahan_add(&mut sum, &mut comp, x);
        }
    } else {
        for x in terms {
            sum += x;
        }
    }
    sum
}

/// `Σ_t y(t)·exp(−iβt²)`.
pub fn chirp_sum(y: &ComplexSignal, beta: f64) -> Complex64 {
    let terms = y.samples().iter().enumerate().map(|(i, &v)| {
        let t = (i + 1) as f64;
        let (s, c) = (beta * (t * t)).sin_cos();
        v * Complex64::new(c, -s)
    });
    sum_complex(terms, y.len() >= KAHAN_THRESHOLD)
}

/// Periodogram-type function `I(β)`.
pub fn ptf_value(y: &ComplexSignal, beta: f64) -> f64 {
    chirp_sum(y, beta).norm_sqr() / y.len() as f64
}

/// The two real sums behind the expanded form of `I(β)`:
/// `Σ(y_R cos βt² + y_I sin βt²)` and `Σ(y_I cos βt² − y_R sin βt²)`.
pub fn real_projections(y: &ComplexSignal, beta: f64) -> (f64, f64) {
    let mut sr = 0.0;
    let mut si = 0.0;
    for (i, v) in y.samples().iter().enumerate() {
        let t = (i + 1) as f64;
        let (s, c) = (beta * (t * t)).sin_cos();
        sr += v.re * c + v.im * s;
        si += v.im * c - v.re * s;
    }
    (sr, si)
}

/// `I(β)` through its expanded real form.
pub fn ptf_value_expanded(y: &ComplexSignal, beta: f64) -> f64 {
    let (sr, si) = real_projections(y, beta);
    (sr * sr + si * si) / y.len() as f64
}

/// Table of `exp(−2πij/Q)`, `j = 0…Q−1`.
fn phasor_table(q: u64) -> Vec<Complex64> {
    (0..q)
        .map(|j| {
            let (s, c) = (TAU * j as f64 / q as f64).sin_cos();
            Complex64::new(c, -s)
        })
        .collect()
}

/// `S_k = Σ_j x_j·exp(∓2πi·k·w_j/Q)` for every `k` in `ks`, `−` when
/// `conjugate` is false.
pub(crate) fn lattice_sums(
    x: &[Complex64],
    weights: &[u64],
    q: u64,
    ks: std::ops::RangeInclusive<u64>,
    conjugate: bool,
) -> Vec<Complex64> {
    debug_assert_eq!(x.len(), weights.len());
    // beyond this the table would not fit in cache, so residues go through sin_cos
    const TABLE_LIMIT: u64 = 1 << 22;
    let table = if q <= TABLE_LIMIT { phasor_table(q) } else { Vec::new() };
    let (k_lo, k_hi) = (*ks.start(), *ks.end());
    if k_hi < k_lo {
        return Vec::new();
    }
    let count = (k_hi - k_lo + 1) as usize;
    let compensated = x.len() >= KAHAN_THRESHOLD;
    let mut out = vec![Complex64::new(0.0, 0.0); count];
    const CHUNK: usize = 8192;
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let k_start = k_lo + (ci * CHUNK) as u64;
        let mut comp = vec![Complex64::new(0.0, 0.0); if compensated { chunk.len() } else { 0 }];
        for (&xj, &w) in x.iter().zip(weights) {
            let step = w % q;
            let mut idx = ((k_start % q) * step) % q;
            for (slot, acc) in chunk.iter_mut().enumerate() {
                let mut p = if table.is_empty() {
                    let (s, c) = (TAU * idx as f64 / q as f64).sin_cos();
                    Complex64::new(c, -s)
                } else {
                    table[idx as usize]
                };
                if conjugate {
                    p = p.conj();
                }
                if compensated {
                    kahan_add(acc, &mut comp[slot], xj * p);
                } else {
                    *acc += xj * p;
                }
                idx += step;
                if idx >= q {
                    idx -= q;
                }
            }
        }
    });
    out
}

fn check_grid(y: &ComplexSignal, grid: &GridSpec) -> Result<()> {
    if grid.n != y.len() {
        return Err(Error::InvalidInput(format!(
            "grid built for N = {} but signal has N = {}",
            grid.n,
            y.len()
        )));
    }
    Ok(())
}

/// `I(β_k)` for the given index range of a lattice grid.
pub(crate) fn ptf_on_indices(
    y: &ComplexSignal,
    grid: &GridSpec,
    ks: std::ops::RangeInclusive<u64>,
) -> Vec<f64> {
    let weights: Vec<u64> = (1..=y.len() as u64).map(|t| t * t).collect();
    let n = y.len() as f64;
    lattice_sums(y.samples(), &weights, grid.modulus(), ks, false)
        .into_iter()
        .map(|s| s.norm_sqr() / n)
        .collect()
}

/// Evaluates `kernel` at the grid indices `ks`.
pub fn scan_indices(
    y: &ComplexSignal,
    grid: &GridSpec,
    kernel: &Kernel,
    ks: std::ops::RangeInclusive<u64>,
) -> Result<ScanResult> {
    check_grid(y, grid)?;
    let locations: Vec<f64> = ks.clone().map(|k| grid.location(k)).collect();
    let magnitudes = match kernel {
        Kernel::Ptf => ptf_on_indices(y, grid, ks),
        Kernel::Cpf { t_center } => baselines::cpf_on_indices(y, grid, *t_center, ks)?
            .into_iter()
            .map(|c| c.norm())
            .collect(),
        Kernel::Pcpf { times } => baselines::pcpf_log_on_indices(y, grid, times, ks)?
            .into_iter()
            .map(f64::exp)
            .collect(),
        Kernel::Dechirp => baselines::dechirp_power_on_indices(y, grid, ks)?,
    };
    Ok(ScanResult { locations, magnitudes })
}

/// Evaluates `kernel` at every grid point.
pub fn scan(y: &ComplexSignal, grid: &GridSpec, kernel: &Kernel) -> Result<ScanResult> {
    scan_indices(y, grid, kernel, 1..=grid.max_index())
}

/// Coarse-to-fine maximization: evaluates every `stride`-th grid point, then
/// the full-resolution neighbourhood of the coarse winner. Can miss peaks
/// narrower than the stride, which is why full scans are the default.
pub fn coarse_to_fine_argmax(
    y: &ComplexSignal,
    grid: &GridSpec,
    kernel: &Kernel,
    stride: usize,
) -> Result<f64> {
    if stride <= 1 {
        return scan(y, grid, kernel)?
            .argmax()
            .ok_or_else(|| Error::InvalidInput("empty grid".into()));
    }
    check_grid(y, grid)?;
    let stride = stride as u64;
    let max_k = grid.max_index();
    let coarse_ks: Vec<u64> = (1..=max_k).step_by(stride as usize).collect();
    let mut best = (1u64, f64::NEG_INFINITY);
    for &k in &coarse_ks {
        let m = scan_indices(y, grid, kernel, k..=k)?.magnitudes[0];
        if m > best.1 {
            best = (k, m);
        }
    }
    let lo = best.0.saturating_sub(stride).max(1);
    let hi = (best.0 + stride).min(max_k);
    scan_indices(y, grid, kernel, lo..=hi)?
        .argmax()
        .ok_or_else(|| Error::InvalidInput("empty grid".into()))
}

/// Peak locations picked from a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSelection {
    /// In decreasing magnitude order.
    pub locations: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Fewer peaks than requested were found.
    pub shortfall: bool,
    /// At least one pick is a grid endpoint rather than an interior maximum.
    pub used_boundary: bool,
}

/// Up to `count` local maxima in decreasing magnitude, greedily skipping any
/// candidate within `min_separation` of one already chosen. Endpoints are only
/// used when interior maxima run out.
pub fn top_peaks(scan: &ScanResult, count: usize, min_separation: f64) -> Result<PeakSelection> {
    if count == 0 {
        return Err(Error::InvalidInput("peak count must be at least 1".into()));
    }
    let m = &scan.magnitudes;
    let n = m.len();
    let mut interior: Vec<usize> =
        (1..n.saturating_sub(1)).filter(|&i| m[i] > m[i - 1] && m[i] >= m[i + 1]).collect();
    interior.sort_by(|&a, &b| m[b].total_cmp(&m[a]).then(a.cmp(&b)));

    let mut boundary: Vec<usize> = Vec::new();
    if n == 1 {
        boundary.push(0);
    } else if n > 1 {
        if m[0] >= m[1] {
            boundary.push(0);
        }
        if m[n - 1] >= m[n - 2] {
            boundary.push(n - 1);
        }
    }
    boundary.sort_by(|&a, &b| m[b].total_cmp(&m[a]).then(a.cmp(&b)));

    let mut chosen: Vec<usize> = Vec::new();
    let mut used_boundary = false;
    let far_enough = |chosen: &[usize], i: usize| {
        chosen
            .iter()
            .all(|&j| (scan.locations[i] - scan.locations[j]).abs() >= min_separation)
    };
    for &i in &interior {
        if chosen.len() == count {
            break;
        }
        if far_enough(&chosen, i) {
            chosen.push(i);
        }
    }
    for &i in &boundary {
        if chosen.len() == count {
            break;
        }
        if far_enough(&chosen, i) {
            chosen.push(i);
            used_boundary = true;
        }
    }
    chosen.sort_by(|&a, &b| m[b].total_cmp(&m[a]).then(a.cmp(&b)));
    Ok(PeakSelection {
        locations: chosen.iter().map(|&i| scan.locations[i]).collect(),
        magnitudes: chosen.iter().map(|&i| m[i]).collect(),
        shortfall: chosen.len() < count,
        used_boundary,
    })
}

/// Starting value for a 1-D search on `grid` with `kernel`.
pub fn initial_value(y: &ComplexSignal, grid: &GridSpec, kernel: &Kernel, init: &Init) -> Result<f64> {
    let scan = match init {
        Init::Value(v) => return Ok(*v),
        Init::Scan => scan(y, grid, kernel)?,
        Init::Window { center, cells } => {
            scan_indices(y, grid, kernel, grid.window(*center, *cells))?
        }
    };
    scan.argmax().ok_or_else(|| Error::InvalidInput("empty grid".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use crate::signal::{add, generate_noise, synthesize_clean, ChirpComponent, ChirpModel, NoiseSpec};

    fn chirp(comps: &[(f64, f64, f64)], n: usize) -> ComplexSignal {
        let model = ChirpModel::new(comps.iter().map(|&(r, i, b)| ChirpComponent::new(r, i, b)).collect())
            .unwrap();
        synthesize_clean(&model, n).unwrap()
    }

    fn noisy(comps: &[(f64, f64, f64)], n: usize, sigma2: f64, seed: u64) -> ComplexSignal {
        add(&chirp(comps, n), &generate_noise(&NoiseSpec::iid(sigma2, seed), n).unwrap()).unwrap()
    }

    /// Kahan-summed direct evaluation, independent of the lattice tables.
    fn oracle_ptf(y: &ComplexSignal, beta: f64) -> f64 {
        let (mut sr, mut si, mut cr, mut ci) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for (i, v) in y.samples().iter().enumerate() {
            let t = (i + 1) as f64;
            let ph = -beta * t * t;
            let term = *v * Complex64::new(ph.cos(), ph.sin());
            let yr = term.re - cr;
            let tr = sr + yr;
            cr = (tr - sr) - yr;
            sr = tr;
            let yi = term.im - ci;
            let ti = si + yi;
            ci = (ti - si) - yi;
            si = ti;
        }
        (sr * sr + si * si) / y.len() as f64
    }

    #[test]
    fn coherent_value_at_true_rate() {
        let y = chirp(&[(5.0, 0.0, 0.5)], 101);
        assert!((ptf_value(&y, 0.5) - 2525.0).abs() < 1e-8);
        let z = ComplexSignal::zeros(50).unwrap();
        assert_eq!(ptf_value(&z, 1.3), 0.0);
    }

    #[test]
    fn expanded_form_agrees() {
        let y = noisy(&[(2.0, -1.0, 0.9)], 120, 1.0, 5);
        for k in 0..50 {
            let b = 0.123 * k as f64;
            let a = ptf_value(&y, b);
            let e = ptf_value_expanded(&y, b);
            assert!((a - e).abs() <= 1e-10 * a.max(1e-300), "{a} vs {e}");
        }
    }

    #[test]
    fn periodic_in_rate() {
        let y = noisy(&[(1.0, 1.0, 0.4)], 64, 0.5, 9);
        for b in [0.1, 1.0, 2.5] {
            let a = ptf_value(&y, b);
            let c = ptf_value(&y, b + TAU);
            assert!((a - c).abs() < 1e-9 * a);
        }
    }

    #[test]
    fn lattice_scan_matches_kahan_oracle() {
        let n = 31;
        let y = noisy(&[(3.0, 1.0, 0.77)], n, 1.0, 17);
        let grid = GridSpec::ptf(n).unwrap();
        let s = scan(&y, &grid, &Kernel::Ptf).unwrap();
        assert_eq!(s.len(), n * n - 1);
        let mut best = (0.0, f64::NEG_INFINITY);
        for (loc, mag) in s.locations.iter().zip(&s.magnitudes) {
            let o = oracle_ptf(&y, *loc);
            assert!((mag - o).abs() < 1e-9 * o.max(1.0));
            if o > best.1 {
                best = (*loc, o);
            }
        }
        assert_eq!(s.argmax().unwrap(), best.0);
    }

    #[test]
    fn noiseless_scan_max_at_nearest_grid_point() {
        let n = 101;
        let y = chirp(&[(5.0, 0.0, 0.5)], n);
        let grid = GridSpec::ptf(n).unwrap();
        let s = scan(&y, &grid, &Kernel::Ptf).unwrap();
        let k = (0.5 / grid.cell()).round() as u64;
        assert_eq!(s.argmax().unwrap(), grid.location(k));
    }

    #[test]
    fn well_separated_components_resolve() {
        let n = 200;
        let y = noisy(&[(7.0, 0.0, 1.0), (5.0, 0.0, 0.5)], n, 1.0, 2024);
        let grid = GridSpec::ptf(n).unwrap();
        let s = scan(&y, &grid, &Kernel::Ptf).unwrap();
        assert!((s.argmax().unwrap() - 1.0).abs() <= grid.cell());
        let peaks = top_peaks(&s, 2, default_min_separation(n)).unwrap();
        assert!(!peaks.shortfall);
        assert!((peaks.locations[0] - 1.0).abs() <= grid.cell());
        assert!((peaks.locations[1] - 0.5).abs() <= grid.cell());
    }

    #[test]
    fn noiseless_two_component_peaks() {
        let n = 200;
        let y = chirp(&[(7.0, 0.0, 1.0), (5.0, 0.0, 0.5)], n);
        let grid = GridSpec::ptf(n).unwrap();
        let s = scan(&y, &grid, &Kernel::Ptf).unwrap();
        let peaks = top_peaks(&s, 2, 0.05).unwrap();
        assert!((peaks.locations[0] - 1.0).abs() <= grid.cell());
        assert!((peaks.locations[1] - 0.5).abs() <= grid.cell());
    }

    #[test]
    fn close_rates_give_single_dominant_peak() {
        // 2·exp(1.45i t²) + exp(1.5i t²), σ² = 0.1, N = 100
        let n = 100;
        let y = noisy(&[(2.0, 0.0, 1.45), (1.0, 0.0, 1.5)], n, 0.1, 77);
        let grid = GridSpec::ptf(n).unwrap();
        let s = scan(&y, &grid, &Kernel::Ptf).unwrap();
        assert!((s.argmax().unwrap() - 1.45).abs() < 2.0 * grid.cell());
    }

    #[test]
    fn monotone_scan_returns_flagged_boundary() {
        let scan = ScanResult { locations: vec![0.1, 0.2, 0.3, 0.4], magnitudes: vec![1.0, 2.0, 3.0, 4.0] };
        let p = top_peaks(&scan, 1, 0.0).unwrap();
        assert_eq!(p.locations, vec![0.4]);
        assert!(p.used_boundary && !p.shortfall);
        let p = top_peaks(&scan, 3, 0.0).unwrap();
        assert!(p.shortfall);
        assert!(top_peaks(&scan, 0, 0.0).is_err());
    }

    #[test]
    fn suppression_radius() {
        let scan = ScanResult {
            locations: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            magnitudes: vec![0.0, 5.0, 1.0, 4.0, 0.5, 3.0, 0.0],
        };
        let p = top_peaks(&scan, 3, 0.25).unwrap();
        assert_eq!(p.locations, vec![0.1, 0.5]);
        assert!(p.shortfall);
        let p = top_peaks(&scan, 3, 0.15).unwrap();
        assert_eq!(p.locations, vec![0.1, 0.3, 0.5]);
    }

    #[test]
    fn window_and_coarse_to_fine() {
        let n = 80;
        let y = chirp(&[(2.0, 1.0, 0.9)], n);
        let grid = GridSpec::ptf(n).unwrap();
        let full = initial_value(&y, &grid, &Kernel::Ptf, &Init::Scan).unwrap();
        let win = initial_value(&y, &grid, &Kernel::Ptf, &Init::Window { center: 0.9, cells: 5 }).unwrap();
        assert_eq!(full, win);
        let cf = coarse_to_fine_argmax(&y, &grid, &Kernel::Ptf, 1).unwrap();
        assert_eq!(cf, full);
        assert_eq!(grid.window(0.0, 3), 1..=3);
    }

    #[test]
    fn grid_definitions() {
        let g = GridSpec::new(GridKind::CpfHalf, 10).unwrap();
        assert_eq!(g.len(), 99);
        assert!((g.location(1) - PI / 100.0).abs() < 1e-15);
        let f = GridSpec::new(GridKind::Fourier, 10).unwrap();
        assert_eq!(f.len(), 8);
        assert!((f.location(3) - 3.0 * PI / 9.0).abs() < 1e-15);
        let p = GridSpec::ptf(10).unwrap();
        assert!((p.location(99) - TAU * 99.0 / 100.0).abs() < 1e-15);
        let y = ComplexSignal::zeros(11).unwrap();
        assert!(scan(&y, &p, &Kernel::Ptf).is_err());
    }

    #[test]
    fn compensated_sum_on_long_records() {
        let n = 12_000;
        let y = chirp(&[(1.0, 0.0, 0.001)], n);
        let v = ptf_value(&y, 0.001);
        // coherent sum, up to the phase reduction error at β·t² ≈ 1.4·10⁵
        assert!((v - n as f64).abs() < 1e-6 * n as f64);
    }
}
