use num_complex::Complex64;

use crate::channel::RxFrame;
use crate::error::{Error, Result};
use crate::linalg::BandedCholesky;
use crate::pulse::IsiMatrix;
use crate::txchain::{bits_to_bpsk, Signaling};

use super::{clamp_llr, DetectorOutput, LLR_CLAMP};

/// Largest block (in bits) the exhaustive search accepts.
pub const MLSE_MAX_LEN: usize = 14;

/// Exhaustive maximum-likelihood sequence search.
///
/// With `z = G⁻¹y/ζ` and `Δ = σ²/ζ²·G⁻¹` the metric `(z−x)ᴴΔ⁻¹(z−x)` is
/// `ζ²/σ²·(zᴴGz − 2Re(xᴴy)/ζ + xᴴGx)`. The first term and the positive factor do
/// not depend on the candidate, so the search ranks `xᴴGx − 2Re(xᴴy)/ζ`, which
/// costs O(N) per candidate. Candidates are visited in lexicographic bit order and
/// only a strictly smaller metric replaces the incumbent, so ties resolve to the
/// lexicographically smallest bit sequence.
#[derive(Debug, Clone)]
pub struct MlseDetector {
    bits: usize,
    zeta: f64,
    eb: f64,
    candidates: Vec<Vec<Complex64>>,
    energy: Vec<f64>,
    g: Vec<Vec<f64>>,
}

impl MlseDetector {
    pub fn new(g: &IsiMatrix, signaling: Signaling, zeta: f64, eb: f64) -> Result<Self> {
        let n = g.dim();
        let bits = n * signaling.bits_per_symbol();
        if bits > MLSE_MAX_LEN {
            return Err(Error::TooLarge(bits));
        }
        signaling.check_len(bits)?;
        BandedCholesky::factor(n, n - 1, |i, j| g.get(i, j)).map_err(|_| Error::NotInvertible)?;
        let dense = g.to_dense();
        let mut candidates = Vec::with_capacity(1 << bits);
        let mut energy = Vec::with_capacity(1 << bits);
        for pattern in 0u32..(1 << bits) {
            let x = signaling.modulate(&bits_to_bpsk(&pattern_bits(pattern, bits), eb))?;
            energy.push(quad_form(&dense, &x));
            candidates.push(x);
        }
        Ok(Self { bits, zeta, eb, candidates, energy, g: dense })
    }

    /// `(z−x)ᴴG(z−x)` evaluated directly, for checking the reduced metric.
    pub fn full_metric(&self, z: &[Complex64], x: &[Complex64]) -> f64 {
        let e: Vec<Complex64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
        quad_form(&self.g, &e)
    }

    pub fn detect(&self, rx: &RxFrame) -> Result<DetectorOutput> {
        let n = self.g.len();
        if rx.y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: rx.y.len() });
        }
        let mut best = (f64::INFINITY, 0usize);
        let mut min0 = vec![f64::INFINITY; self.bits];
        let mut min1 = vec![f64::INFINITY; self.bits];
        for (idx, (x, &e)) in self.candidates.iter().zip(&self.energy).enumerate() {
            let corr: f64 = x.iter().zip(&rx.y).map(|(a, b)| a.re * b.re + a.im * b.im).sum();
            let m = e - 2.0 * corr / self.zeta;
            if m < best.0 {
                best = (m, idx);
            }
            for (i, bit) in pattern_bits(idx as u32, self.bits).into_iter().enumerate() {
                let slot = if bit == 0 { &mut min0[i] } else { &mut min1[i] };
                if m < *slot {
                    *slot = m;
                }
            }
        }
        let a_hat = bits_to_bpsk(&pattern_bits(best.1 as u32, self.bits), self.eb);
        let llr = min0
            .iter()
            .zip(&min1)
            .zip(&a_hat)
            .map(|((&m0, &m1), &a)| {
                if rx.sigma2 <= 0.0 {
                    if a > 0.0 { LLR_CLAMP } else { -LLR_CLAMP }
                } else {
                    clamp_llr(self.zeta * self.zeta / rx.sigma2 * (m1 - m0))
                }
            })
            .collect();
        Ok(DetectorOutput { a_hat, llr, metric: None })
    }
}

/// Bit `i` of the candidate is the `i`-th most significant of the `len`-bit pattern.
fn pattern_bits(pattern: u32, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((pattern >> (len - 1 - i)) & 1) as u8).collect()
}

fn quad_form(g: &[Vec<f64>], e: &[Complex64]) -> f64 {
    let mut s = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, &gij) in row.iter().enumerate() {
            if gij != 0.0 {
                s += gij * (e[i].re * e[j].re + e[i].im * e[j].im);
            }
        }
    }
    s
}

pub fn detect_mlse_bruteforce(
    rx: &RxFrame,
    g: &IsiMatrix,
    zeta: f64,
    eb: f64,
    signaling: Signaling,
) -> Result<DetectorOutput> {
    MlseDetector::new(g, signaling, zeta, eb)?.detect(rx)
}
