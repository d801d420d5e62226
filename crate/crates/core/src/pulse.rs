//! Root-raised-cosine pulse, its autocorrelation, and the banded ISI matrix.
//!
//! Time is measured in units of the Nyquist symbol period `T`; the model is
//! scale-invariant in `T`, so `symbol_period` only rescales the argument of the
//! pulse functions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{BandedCholesky, BandedLu, Scalar};

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_OVERSAMPLING: usize = 8;
/// Longest one-sided ISI length the default-L search will return.
pub const MAX_ISI_LEN: usize = 4096;

// Lags beyond this many symbol periods are treated as zero when measuring tail energy.
const TAIL_HORIZON: f64 = 2048.0;
const SINGULARITY_EPS: f64 = 1e-8;

/// `sin(πx) / (πx)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Raised-cosine function `g(t)` with `t` in units of `T`: the autocorrelation
/// of the unit-energy root-raised-cosine pulse.
pub fn raised_cosine(t: f64, alpha: f64) -> f64 {
    let t = t.abs();
    let x = 2.0 * alpha * t;
    if alpha > 0.0 && (x - 1.0).abs() < SINGULARITY_EPS {
        return PI / 4.0 * sinc(1.0 / (2.0 * alpha));
    }
    sinc(t) * (PI * alpha * t).cos() / (1.0 - x * x)
}

/// Unit-energy root-raised-cosine pulse `h(t)`, `t` in units of `T`.
pub fn root_raised_cosine(t: f64, alpha: f64) -> f64 {
    let t = t.abs();
    if t == 0.0 {
        return 1.0 - alpha + 4.0 * alpha / PI;
    }
    let x = 4.0 * alpha * t;
    if alpha > 0.0 && (x - 1.0).abs() < SINGULARITY_EPS {
        let q = PI / (4.0 * alpha);
        return alpha / 2f64.sqrt() * ((1.0 + 2.0 / PI) * q.sin() + (1.0 - 2.0 / PI) * q.cos());
    }
    ((PI * t * (1.0 - alpha)).sin() + x * (PI * t * (1.0 + alpha)).cos()) / (PI * t * (1.0 - x * x))
}

/// Parameters of the rRC pulse family and the FTN packing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub alpha: f64,
    pub tau: f64,
    pub symbol_period: f64,
    /// Samples per `τT` interval for the oversampled waveform path.
    pub oversampling: usize,
    /// One-sided ISI length `L`, in `τT` lags.
    pub isi_len: usize,
    pub tail_tolerance: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PulseSpecBuilder {
    alpha: f64,
    tau: f64,
    symbol_period: f64,
    oversampling: usize,
    isi_len: Option<usize>,
    tail_tolerance: f64,
}

impl PulseSpecBuilder {
    pub fn isi_len(mut self, l: usize) -> Self {
        self.isi_len = Some(l);
        self
    }

    pub fn tail_tolerance(mut self, tol: f64) -> Self {
        self.tail_tolerance = tol;
        self
    }

    pub fn oversampling(mut self, m: usize) -> Self {
        self.oversampling = m;
        self
    }

    pub fn symbol_period(mut self, t: f64) -> Self {
        self.symbol_period = t;
        self
    }

    pub fn build(self) -> Result<PulseSpec> {
        let bad = |m: String| Err(Error::InvalidPulse(m));
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad(format!("tau = {} outside (0, 1]", self.tau));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha = {} outside [0, 1]", self.alpha));
        }
        if !(self.symbol_period > 0.0 && self.symbol_period.is_finite()) {
            return bad(format!("symbol period {} must be positive", self.symbol_period));
        }
        if self.oversampling == 0 {
            return bad("oversampling must be positive".into());
        }
        if !(self.tail_tolerance > 0.0) {
            return bad(format!("tail tolerance {} must be positive", self.tail_tolerance));
        }
        let tails = tail_energies(self.alpha, self.tau);
        let tail_at = |l: usize| tails.get(l).copied().unwrap_or(0.0);
        let isi_len = match self.isi_len {
            Some(0) => return bad("ISI length must be at least 1".into()),
            Some(l) => {
                if tail_at(l) >= self.tail_tolerance {
                    return bad(format!(
                        "tail energy {:.3e} beyond L = {l} exceeds tolerance {:.1e}",
                        tail_at(l),
                        self.tail_tolerance
                    ));
                }
                l
            }
            None => match (1..=MAX_ISI_LEN).find(|&l| tail_at(l) < self.tail_tolerance) {
                Some(l) => l,
                None => {
                    return bad(format!(
                        "no L <= {MAX_ISI_LEN} meets tail tolerance {:.1e}",
                        self.tail_tolerance
                    ))
                }
            },
        };
        Ok(PulseSpec {
            alpha: self.alpha,
            tau: self.tau,
            symbol_period: self.symbol_period,
            oversampling: self.oversampling,
            isi_len,
            tail_tolerance: self.tail_tolerance,
        })
    }
}

/// `tails[l] = Σ_{i>l} g(iτ)²`, summed smallest-first.
fn tail_energies(alpha: f64, tau: f64) -> Vec<f64> {
    let horizon = (TAIL_HORIZON / tau).ceil() as usize;
    let mut tails = vec![0.0; horizon + 1];
    for l in (0..horizon).rev() {
        let g = raised_cosine((l + 1) as f64 * tau, alpha);
        tails[l] = tails[l + 1] + g * g;
    }
    tails
}

impl PulseSpec {
    pub fn builder(alpha: f64, tau: f64) -> PulseSpecBuilder {
        PulseSpecBuilder {
            alpha,
            tau,
            symbol_period: 1.0,
            oversampling: DEFAULT_OVERSAMPLING,
            isi_len: None,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        }
    }

    /// Spec with the default `L` (smallest lag count meeting the tail tolerance).
    pub fn new(alpha: f64, tau: f64) -> Result<Self> {
        Self::builder(alpha, tau).build()
    }

    /// Energy of the autocorrelation beyond lag `L`: `Σ_{i>L} g(iτT)²`.
    pub fn tail_energy(&self) -> f64 {
        tail_energies(self.alpha, self.tau).get(self.isi_len).copied().unwrap_or(0.0)
    }

    /// `g(t)` for `t` in seconds.
    pub fn rc_autocorr(&self, t: f64) -> f64 {
        raised_cosine(t / self.symbol_period, self.alpha)
    }

    /// `h(t)` for `t` in seconds, unit energy.
    pub fn rrc(&self, t: f64) -> f64 {
        root_raised_cosine(t / self.symbol_period, self.alpha) / self.symbol_period.sqrt()
    }

    /// `g(iτT)`.
    pub fn lag(&self, i: usize) -> f64 {
        raised_cosine(i as f64 * self.tau, self.alpha)
    }

    /// Same spec with a different `τ`; `L` is re-derived from the tail tolerance.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::builder(self.alpha, tau)
            .oversampling(self.oversampling)
            .symbol_period(self.symbol_period)
            .tail_tolerance(self.tail_tolerance)
            .build()
    }
}

/// `rc_autocorr(t, spec)`.
pub fn rc_autocorr(t: f64, spec: &PulseSpec) -> f64 {
    spec.rc_autocorr(t)
}

/// Sampled autocorrelation `g(0), g(τT), …, g(LτT)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsiKernel {
    g: Vec<f64>,
    spec: PulseSpec,
}

impl IsiKernel {
    pub fn new(spec: &PulseSpec) -> Self {
        let g = (0..=spec.isi_len).map(|i| spec.lag(i)).collect();
        Self { g, spec: *spec }
    }

    pub fn spec(&self) -> &PulseSpec {
        &self.spec
    }

    pub fn isi_len(&self) -> usize {
        self.g.len() - 1
    }

    /// `g(iτT)` for `|i| <= L`, zero beyond.
    pub fn at(&self, lag: isize) -> f64 {
        self.g.get(lag.unsigned_abs()).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.g
    }
}

/// Banded symmetric Toeplitz ISI matrix `G`, `G[μ][ν] = g((μ−ν)τT)` for `|μ−ν| <= L`.
///
/// The Cholesky factor exists only while the truncated matrix stays positive
/// definite. Below `τ ≈ 1/(1+α)` the exact Gram matrix is nearly singular and the
/// truncation makes it indefinite, so the factor is optional and the LU factor is
/// what solves `G z = y`.
#[derive(Debug, Clone)]
pub struct IsiMatrix {
    n: usize,
    kernel: IsiKernel,
    cholesky: std::result::Result<BandedCholesky, Error>,
    lu: std::result::Result<BandedLu, Error>,
}

impl IsiMatrix {
    /// Builds `G` and caches its factorizations. Never fails on indefiniteness;
    /// see [`build_isi_matrix`] for the strict constructor.
    pub fn new(n: usize, spec: &PulseSpec) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 2, actual: n });
        }
        let kernel = IsiKernel::new(spec);
        let bw = kernel.isi_len();
        let entry = |i: usize, j: usize| kernel.at(i as isize - j as isize);
        let cholesky = BandedCholesky::factor(n, bw, entry);
        let lu = BandedLu::factor(n, bw, entry);
        Ok(Self { n, kernel, cholesky, lu })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kernel(&self) -> &IsiKernel {
        &self.kernel
    }

    pub fn spec(&self) -> &PulseSpec {
        self.kernel.spec()
    }

    /// Half-bandwidth actually stored (`min(L, N-1)`).
    pub fn bandwidth(&self) -> usize {
        self.kernel.isi_len().min(self.n - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.kernel.at(i as isize - j as isize)
    }

    pub fn cholesky(&self) -> Result<&BandedCholesky> {
        self.cholesky.as_ref().map_err(Clone::clone)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.cholesky.is_ok()
    }

    /// Solves `G z = y`.
    pub fn solve<T: Scalar>(&self, y: &[T]) -> Result<Vec<T>> {
        if y.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: y.len() });
        }
        match (&self.cholesky, &self.lu) {
            (Ok(c), _) => Ok(c.solve(y)),
            (_, Ok(lu)) => Ok(lu.solve(y)),
            (_, Err(e)) => Err(e.clone()),
        }
    }

    /// `G x` in O(N L).
    pub fn mul<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        let g = self.kernel.as_slice();
        let bw = self.bandwidth();
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(bw);
                let hi = (i + bw).min(self.n - 1);
                (lo..=hi).fold(T::zero(), |acc, j| acc + x[j] * g[i.abs_diff(j)])
            })
            .collect()
    }

    pub fn mul_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.mul(x)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }
}

/// Strict constructor: fails with [`Error::NotPositiveDefinite`] when the banded
/// matrix has no Cholesky factor.
pub fn build_isi_matrix(n: usize, spec: &PulseSpec) -> Result<IsiMatrix> {
    let g = IsiMatrix::new(n, spec)?;
    g.cholesky()?;
    Ok(g)
}
