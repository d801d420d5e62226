//! AWGN channel after the matched filter.
//!
//! The matrix path produces `y = ζ G x + q` directly with `cov(q) = σ² G`. The
//! waveform path builds the oversampled transmit signal, adds white noise,
//! matched-filters and samples every `τT`; it exists to cross-check the matrix
//! path.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::BandedCholesky;
use crate::pulse::{IsiMatrix, PulseSpec};
use crate::txchain::{rrc_table, waveform_grid, SymbolFrame, DEFAULT_PULSE_SPAN};

/// Pulse truncation used by the spectral-root noise filter, in symbol periods.
pub const NOISE_PULSE_SPAN: f64 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Fidelity {
    #[default]
    Matrix,
    Waveform,
}

impl Fidelity {
    pub fn name(self) -> &'static str {
        match self {
            Fidelity::Matrix => "matrix",
            Fidelity::Waveform => "waveform",
        }
    }
}

impl fmt::Display for Fidelity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fidelity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix" => Ok(Fidelity::Matrix),
            "waveform" => Ok(Fidelity::Waveform),
            _ => Err(Error::ConfigInvalid(format!("unknown fidelity '{s}'"))),
        }
    }
}

/// Received, matched-filtered samples at the `τT` rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RxFrame {
    pub y: Vec<Complex64>,
    /// `N0`: variance per complex sample of the white noise before the matched filter.
    pub sigma2: f64,
    pub ebn0_db: Option<f64>,
    pub seed: u64,
    pub fidelity: Fidelity,
}

impl RxFrame {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Same frame with samples and `σ²` scaled consistently (`y -> λy`, `σ² -> λ²σ²`).
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            y: self.y.iter().map(|&v| v * lambda).collect(),
            sigma2: self.sigma2 * lambda * lambda,
            ..self.clone()
        }
    }

    pub fn negated(&self) -> Self {
        Self { y: self.y.iter().map(|&v| -v).collect(), ..self.clone() }
    }
}

/// `σ² = Es / (R · 10^(EbN0/10))` where `Es` is the energy per coded BPSK
/// amplitude and `R` the code rate, so that `Eb = Es / R` per information bit.
pub fn sigma2_from_ebn0(ebn0_db: f64, es: f64, code_rate: f64) -> f64 {
    es / (code_rate * 10f64.powf(ebn0_db / 10.0))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Gaussian with `E|w|² = var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// Generator of `q` with covariance `σ² G`.
#[derive(Debug, Clone)]
pub enum ColoredNoise {
    /// `q = C w` with `G = C Cᵀ`; exact for the banded `G`.
    Cholesky(BandedCholesky),
    /// `q_n = Σ_t c_t u_{nM+t}`, `c_t = √(τ/M)·h(tτ/M)`: the matched filter
    /// applied to white noise sampled at `M/τ`, which is alias-free for
    /// `M ≥ τ(1+α)`. Used when the truncated `G` has no Cholesky factor; its
    /// covariance is the untruncated Gram matrix.
    SpectralRoot { taps: Vec<f64>, decimation: usize },
}

impl ColoredNoise {
    pub fn for_matrix(g: &IsiMatrix) -> Self {
        match g.cholesky() {
            Ok(c) => ColoredNoise::Cholesky(c.clone()),
            Err(_) => Self::spectral_root(g.spec()),
        }
    }

    pub fn spectral_root(spec: &PulseSpec) -> Self {
        let m = ((spec.tau * (1.0 + spec.alpha) - 1e-12).ceil() as usize).max(1);
        let dt = spec.tau / m as f64;
        let half = (NOISE_PULSE_SPAN / dt).ceil() as usize;
        let scale = dt.sqrt();
        let taps = rrc_table(spec, dt, half).into_iter().map(|h| h * scale).collect();
        ColoredNoise::SpectralRoot { taps, decimation: m }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, sigma2: f64, rng: &mut R) -> Vec<Complex64> {
        match self {
            ColoredNoise::Cholesky(c) => {
                assert_eq!(c.dim(), n);
                let w: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng, sigma2)).collect();
                c.mul_lower(&w)
            }
            ColoredNoise::SpectralRoot { taps, decimation } => {
                let m = *decimation;
                let white: Vec<Complex64> =
                    (0..(n - 1) * m + taps.len()).map(|_| complex_gaussian(rng, sigma2)).collect();
                (0..n)
                    .map(|k| {
                        let seg = &white[k * m..k * m + taps.len()];
                        seg.iter().zip(taps).fold(Complex64::new(0.0, 0.0), |acc, (&u, &c)| acc + u * c)
                    })
                    .collect()
            }
        }
    }
}

/// Matrix-fidelity channel with its noise generator prepared once.
#[derive(Debug, Clone)]
pub struct MatrixChannel {
    noise: ColoredNoise,
}

impl MatrixChannel {
    pub fn new(g: &IsiMatrix) -> Self {
        Self { noise: ColoredNoise::for_matrix(g) }
    }

    pub fn noise(&self) -> &ColoredNoise {
        &self.noise
    }

    pub fn transmit<R: Rng + ?Sized>(
        &self,
        x: &[Complex64],
        g: &IsiMatrix,
        zeta: f64,
        sigma2: f64,
        rng: &mut R,
    ) -> Result<Vec<Complex64>> {
        if x.len() != g.dim() {
            return Err(Error::DimensionMismatch { expected: g.dim(), actual: x.len() });
        }
        if !(sigma2 >= 0.0) {
            return Err(Error::ConfigInvalid(format!("noise variance {sigma2} must be >= 0")));
        }
        let mut y = g.mul(x);
        for v in &mut y {
            *v *= zeta;
        }
        if sigma2 > 0.0 {
            for (v, q) in y.iter_mut().zip(self.noise.sample(x.len(), sigma2, rng)) {
                *v += q;
            }
        }
        Ok(y)
    }
}

/// `y = ζ G x + q`, deterministic given `seed`.
pub fn apply_channel_matrix(
    x: &[Complex64],
    g: &IsiMatrix,
    zeta: f64,
    sigma2: f64,
    seed: u64,
) -> Result<RxFrame> {
    let mut rng = rng_from_seed(seed);
    let y = MatrixChannel::new(g).transmit(x, g, zeta, sigma2, &mut rng)?;
    Ok(RxFrame { y, sigma2, ebn0_db: None, seed, fidelity: Fidelity::Matrix })
}

/// Oversampled transmit / matched-filter channel.
#[derive(Debug, Clone)]
pub struct WaveformChannel {
    spec: PulseSpec,
    span: f64,
}

impl WaveformChannel {
    pub fn new(spec: &PulseSpec) -> Result<Self> {
        Self::with_span(spec, DEFAULT_PULSE_SPAN)
    }

    pub fn with_span(spec: &PulseSpec, span: f64) -> Result<Self> {
        waveform_grid(spec, span)?;
        Ok(Self { spec: *spec, span })
    }

    pub fn transmit<R: Rng + ?Sized>(&self, frame: &SymbolFrame, sigma2: f64, rng: &mut R) -> Result<Vec<Complex64>> {
        let wave = crate::txchain::transmit_waveform_with_span(frame, &self.spec, self.span)?;
        let dt = wave.dt;
        let mut r = wave.samples;
        if sigma2 > 0.0 {
            // White noise of PSD N0 sampled at 1/dt.
            let var = sigma2 / dt;
            for v in &mut r {
                *v += complex_gaussian(rng, var);
            }
        }
        let table = rrc_table(&self.spec, dt, wave.half_taps);
        let m = wave.oversampling;
        Ok((0..frame.len())
            .map(|k| {
                let seg = &r[k * m..k * m + table.len()];
                seg.iter().zip(&table).fold(Complex64::new(0.0, 0.0), |acc, (&v, &h)| acc + v * h) * dt
            })
            .collect())
    }
}

pub fn apply_channel_waveform(frame: &SymbolFrame, spec: &PulseSpec, sigma2: f64, seed: u64) -> Result<RxFrame> {
    let mut rng = rng_from_seed(seed);
    let y = WaveformChannel::new(spec)?.transmit(frame, sigma2, &mut rng)?;
    Ok(RxFrame { y, sigma2, ebn0_db: None, seed, fidelity: Fidelity::Waveform })
}
