use std::f64::consts::FRAC_1_SQRT_2;

use crate::channel::RxFrame;
use crate::error::{Error, Result};
use crate::pulse::IsiMatrix;

use super::{llr_from_stat, quantize, DetectorOutput};

/// Arithmetic performed by one detection pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    pub mults: u64,
    pub adds: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.mults + self.adds
    }
}

trait Tally {
    fn mac(&mut self, n: u64);
    fn add(&mut self, n: u64);
}

impl Tally for () {
    #[inline(always)]
    fn mac(&mut self, _: u64) {}
    #[inline(always)]
    fn add(&mut self, _: u64) {}
}

impl Tally for OpCount {
    fn mac(&mut self, n: u64) {
        self.mults += n;
        self.adds += n;
    }
    fn add(&mut self, n: u64) {
        self.adds += n;
    }
}

/// Pair-combining CI-FTN detector.
///
/// For the pair `(k, k+1)` on one rail the statistic is
/// `y[k] + y[k+1] − ISI_k − ISI_{k+1}`, where the ISI terms cover every
/// position outside the pair within the one-sided window `L`: positions
/// already decided contribute `ζ/√2·â`, later positions contribute
/// `ζ/√2·quantize(y)`. Component `k` sees past lags `1..L-1` and future lags
/// `2..L`; component `k+1` sees past lags `2..L` and future lags `1..L-1`, so
/// both cover positions `k-L+1 ..= k+L` and the two sums fold into one weight
/// per position, `g(|d|) + g(|d-1|)`. The intra-pair terms are never removed.
#[derive(Debug, Clone)]
pub struct PairwiseDetector {
    isi_len: usize,
    zeta: f64,
    eb: f64,
    /// Folded weights for offsets `d = -(L-1) ..= -1`, indexed by `-d - 1`.
    past: Vec<f64>,
    /// Folded weights for offsets `d = 2 ..= L`, indexed by `d - 2`.
    future: Vec<f64>,
    /// Gain of the symbol in the pair sum: `ζ/√2·(2 + 2g(τT))`.
    gain: f64,
    /// `(1 + g(τT))`, the pair-sum noise variance per unit `σ²` on one rail.
    noise_factor: f64,
}

impl PairwiseDetector {
    pub fn new(g: &IsiMatrix, isi_len: usize, zeta: f64, eb: f64) -> Result<Self> {
        let kernel = g.kernel();
        if isi_len == 0 || isi_len > kernel.isi_len() {
            return Err(Error::ConfigInvalid(format!(
                "detector window L = {isi_len} must be within 1..={}",
                kernel.isi_len()
            )));
        }
        let l = isi_len as isize;
        let w = |d: isize| kernel.at(d) + kernel.at(d - 1);
        let past = (1..l).map(|j| w(-j)).collect();
        let future = (2..=l).map(w).collect();
        let g1 = kernel.at(1);
        Ok(Self {
            isi_len,
            zeta,
            eb,
            past,
            future,
            gain: zeta * FRAC_1_SQRT_2 * (2.0 + 2.0 * g1),
            noise_factor: 1.0 + g1,
        })
    }

    pub fn isi_len(&self) -> usize {
        self.isi_len
    }

    pub fn detect(&self, rx: &RxFrame) -> Result<DetectorOutput> {
        self.run(rx, &mut ())
    }

    pub fn detect_counted(&self, rx: &RxFrame) -> Result<(DetectorOutput, OpCount)> {
        let mut ops = OpCount::default();
        let out = self.run(rx, &mut ops)?;
        Ok((out, ops))
    }

    fn run<T: Tally>(&self, rx: &RxFrame, tally: &mut T) -> Result<DetectorOutput> {
        let n = rx.y.len();
        if !n.is_multiple_of(2) {
            return Err(Error::OddLength(n));
        }
        let mut rail = vec![0.0; n];
        let mut decided = vec![0.0; n];
        let mut stats = vec![0.0; n];
        let mut a_hat = vec![0.0; n];
        for (r, offset) in [(0usize, 0usize), (1, 1)] {
            for (dst, y) in rail.iter_mut().zip(&rx.y) {
                *dst = if r == 0 { y.re } else { y.im };
            }
            self.rail(&rail, &mut decided, &mut stats[offset..], tally);
            for p in 0..n / 2 {
                a_hat[2 * p + offset] = decided[2 * p];
            }
        }
        let llr = soft_from_gain(&stats, self.gain, self.noise_factor, rx.sigma2, self.eb);
        Ok(DetectorOutput { a_hat, llr, metric: Some(stats) })
    }

    // Writes the statistic of pair p into stats[2p] (the caller offsets the slice per rail).
    fn rail<T: Tally>(&self, y: &[f64], decided: &mut [f64], stats: &mut [f64], tally: &mut T) {
        let n = y.len();
        let scale = self.zeta * FRAC_1_SQRT_2;
        let hard: Vec<f64> = y.iter().map(|&v| quantize(v, self.eb)).collect();
        for k in (0..n).step_by(2) {
            let mut isi = 0.0;
            let past_len = self.past.len().min(k);
            for (j, &w) in self.past[..past_len].iter().enumerate() {
                isi += w * decided[k - 1 - j];
            }
            let future_len = self.future.len().min(n.saturating_sub(k + 2));
            for (j, &w) in self.future[..future_len].iter().enumerate() {
                isi += w * hard[k + 2 + j];
            }
            let stat = y[k] + y[k + 1] - scale * isi;
            tally.mac((past_len + future_len + 1) as u64);
            tally.add(1);
            let d = quantize(stat, self.eb);
            decided[k] = d;
            decided[k + 1] = d;
            stats[k] = stat;
        }
    }
}

fn soft_from_gain(stats: &[f64], gain: f64, noise_factor: f64, sigma2: f64, eb: f64) -> Vec<f64> {
    let var = sigma2 * noise_factor;
    let scale = if var > 0.0 { 2.0 * gain * eb.sqrt() / var } else { 0.0 };
    stats.iter().map(|&s| llr_from_stat(s, scale, var <= 0.0)).collect()
}

/// LLRs from pair statistics: `2·μ·√Eb·stat/σ_k²` with
/// `μ = ζ/√2·(G_kk + G_{k+1,k+1} + 2G_{k,k+1})` and
/// `σ_k² = σ²·(G_kk + G_{k+1,k+1} + 2G_{k,k+1})/2`, the variance of the real part
/// of the pair-summed noise. Residual ISI is not included in the variance.
pub fn soft_output(metric: &[f64], g: &IsiMatrix, zeta: f64, sigma2: f64, eb: f64) -> Vec<f64> {
    let g1 = g.kernel().at(1);
    soft_from_gain(metric, zeta * FRAC_1_SQRT_2 * (2.0 + 2.0 * g1), 1.0 + g1, sigma2, eb)
}

pub fn detect_ci_pairwise(rx: &RxFrame, g: &IsiMatrix, isi_len: usize, zeta: f64, eb: f64) -> Result<DetectorOutput> {
    if rx.y.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), actual: rx.y.len() });
    }
    PairwiseDetector::new(g, isi_len, zeta, eb)?.detect(rx)
}
