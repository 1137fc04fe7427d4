//! Signal domain types and synthesis of the multi-component elementary chirp
//! model `y(t) = Σ_k A_k·exp(i·β_k·t²) + ε(t)`, `t = 1…N`.
//!
//! Phases are evaluated as `β·t²` in double precision and reduced by the
//! standard library trig routines. For `N ≤ 10⁴` and `β < 2π` the argument
//! stays below `2π·10⁸`, where the reduction error is around `10⁻⁸` rad.
//! Longer records still work but lose phase accuracy proportionally.

mod noise;

use std::f64::consts::TAU;
use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use noise::{generate_noise, NoiseSpec};

/// Wraps a frequency rate into `[0, 2π)`.
///
/// The model is 2π-periodic in β because `t²` is an integer.
pub fn normalize_rate(beta: f64) -> f64 {
    let r = beta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Distance between two rates on the circle of circumference `period`.
pub fn circular_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// `exp(i·β·t²)` for a 1-based sample index.
#[inline]
pub fn chirp_phasor(beta: f64, t: usize) -> Complex64 {
    let t = t as f64;
    let (s, c) = (beta * (t * t)).sin_cos();
    Complex64::new(c, s)
}

/// A finite complex sequence indexed `t = 1…N`. Stored 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    samples: Vec<Complex64>,
}

impl ComplexSignal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("signal must have at least one sample".into()));
        }
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput(format!("sample t = {} is not finite", i + 1)));
        }
        Ok(Self { samples })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::LengthMismatch { left: re.len(), right: im.len() });
        }
        Self::new(re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Sample at 1-based time `t`.
    pub fn at(&self, t: usize) -> Complex64 {
        self.samples[t - 1]
    }

    /// `Σ_t |y(t)|²`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn re(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.im).collect()
    }

    /// Elementwise difference `self − other`.
    pub fn sub(&self, other: &ComplexSignal) -> Result<ComplexSignal> {
        check_same_len(self, other)?;
        Ok(ComplexSignal {
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect(),
        })
    }

    /// Removes a single chirp `A·exp(iβt²)` from the signal.
    pub fn subtract_component(&self, c: &ChirpComponent) -> ComplexSignal {
        let a = c.amplitude();
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, &y)| y - a * chirp_phasor(c.beta, i + 1))
            .collect();
        ComplexSignal { samples }
    }
}

impl Index<usize> for ComplexSignal {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.samples[i]
    }
}

fn check_same_len(a: &ComplexSignal, b: &ComplexSignal) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}

/// Elementwise sum of a clean signal and a noise realization.
pub fn add(signal: &ComplexSignal, noise: &ComplexSignal) -> Result<ComplexSignal> {
    check_same_len(signal, noise)?;
    Ok(ComplexSignal {
        samples: signal.samples.iter().zip(&noise.samples).map(|(a, b)| a + b).collect(),
    })
}

/// One elementary chirp: amplitude `A = a_re + i·a_im` and rate `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpComponent {
    pub a_re: f64,
    pub a_im: f64,
    /// Radians per sample², kept in `[0, 2π)`.
    pub beta: f64,
}

impl ChirpComponent {
    /// Builds a component, wrapping `beta` into `[0, 2π)`.
    pub fn new(a_re: f64, a_im: f64, beta: f64) -> Self {
        Self { a_re, a_im, beta: normalize_rate(beta) }
    }

    pub fn from_amplitude(a: Complex64, beta: f64) -> Self {
        Self::new(a.re, a.im, beta)
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.a_re, self.a_im)
    }

    /// `|A|`.
    pub fn magnitude(&self) -> f64 {
        self.a_re.hypot(self.a_im)
    }

    /// Value of the component at 1-based time `t`.
    pub fn eval(&self, t: usize) -> Complex64 {
        self.amplitude() * chirp_phasor(self.beta, t)
    }
}

/// Ordered set of chirp components with pairwise distinct rates and non-zero
/// amplitudes. An empty model is allowed and synthesizes to zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChirpModel {
    components: Vec<ChirpComponent>,
}

impl ChirpModel {
    pub fn new(components: Vec<ChirpComponent>) -> Result<Self> {
        for (k, c) in components.iter().enumerate() {
            if !(c.a_re.is_finite() && c.a_im.is_finite() && c.beta.is_finite()) {
                return Err(Error::InvalidInput(format!("component {} is not finite", k + 1)));
            }
            if c.magnitude() == 0.0 {
                return Err(Error::InvalidInput(format!("component {} has zero amplitude", k + 1)));
            }
        }
        for i in 0..components.len() {
            for j in i + 1..components.len() {
                if circular_distance(components[i].beta, components[j].beta, TAU) == 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "components {} and {} share frequency rate {}",
                        i + 1,
                        j + 1,
                        components[i].beta
                    )));
                }
            }
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[ChirpComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// True when amplitudes are strictly decreasing in magnitude, which is the
    /// ordering sequential estimators recover.
    pub fn is_dominance_ordered(&self) -> bool {
        self.components.windows(2).all(|w| w[0].magnitude() > w[1].magnitude())
    }

    pub fn betas(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.beta).collect()
    }
}

/// Noise-free samples of the model at `t = 1…n`.
pub fn synthesize_clean(model: &ChirpModel, n: usize) -> Result<ComplexSignal> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let samples = (1..=n)
        .map(|t| model.components.iter().map(|c| c.eval(t)).sum())
        .collect();
    ComplexSignal::new(samples)
}

/// Per-component signal-to-noise ratio `10·log10(|A|²/σ²)` in dB.
pub fn snr_db(component: &ChirpComponent, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidInput(format!("sigma2 must be positive, got {sigma2}")));
    }
    let a2 = component.magnitude().powi(2);
    if a2 == 0.0 {
        return Err(Error::InvalidInput("component amplitude is zero".into()));
    }
    Ok(10.0 * (a2 / sigma2).log10())
}

/// Noise variance giving the requested per-component SNR.
pub fn sigma2_for_snr(component: &ChirpComponent, snr_db: f64) -> f64 {
    component.magnitude().powi(2) / 10f64.powf(snr_db / 10.0)
}
