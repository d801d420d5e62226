use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::channel::RxFrame;
use crate::error::{Error, Result};
use crate::pulse::IsiMatrix;
use crate::txchain::Signaling;

use super::{llr_from_stat, quantize, DetectorOutput};

/// Zero-forcing detector: `z = G⁻¹y/ζ`, then per-bit combining of the
/// components that carry the same source bit.
#[derive(Debug, Clone)]
pub struct ZfDetector {
    g: IsiMatrix,
    signaling: Signaling,
    zeta: f64,
    eb: f64,
    /// `vᵀG⁻¹v` for each bit's combining vector `v`.
    gamma: Vec<f64>,
}

impl ZfDetector {
    pub fn new(g: &IsiMatrix, signaling: Signaling, zeta: f64, eb: f64) -> Result<Self> {
        let n = g.dim();
        signaling.check_len(n * signaling.bits_per_symbol())?;
        let unit = |idx: &[usize]| {
            let mut v = vec![0.0; n];
            for &i in idx {
                v[i] = 1.0;
            }
            v
        };
        let quad = |idx: &[usize]| -> Result<f64> {
            let u = g.solve(&unit(idx))?;
            Ok(idx.iter().map(|&i| u[i]).sum())
        };
        let mut gamma = Vec::new();
        match signaling {
            Signaling::CiFtn => {
                for p in 0..n / 2 {
                    let q = quad(&[2 * p, 2 * p + 1])?;
                    gamma.extend([q, q]);
                }
            }
            Signaling::ConventionalFtn | Signaling::NyquistBpsk => {
                for i in 0..n {
                    gamma.push(quad(&[i])?);
                }
            }
            Signaling::NyquistQpsk => {
                for i in 0..n {
                    let q = quad(&[i])?;
                    gamma.extend([q, q]);
                }
            }
        }
        Ok(Self { g: g.clone(), signaling, zeta, eb, gamma })
    }

    /// `z = G⁻¹y/ζ`.
    pub fn equalize(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut z = self.g.solve(y)?;
        for v in &mut z {
            *v /= self.zeta;
        }
        Ok(z)
    }

    pub fn detect(&self, rx: &RxFrame) -> Result<DetectorOutput> {
        if rx.y.len() != self.g.dim() {
            return Err(Error::DimensionMismatch { expected: self.g.dim(), actual: rx.y.len() });
        }
        let z = self.equalize(&rx.y)?;
        let (stats, gain): (Vec<f64>, f64) = match self.signaling {
            Signaling::CiFtn => {
                let mut s = Vec::with_capacity(z.len());
                for p in z.chunks_exact(2) {
                    s.push(p[0].re + p[1].re);
                    s.push(p[0].im + p[1].im);
                }
                (s, SQRT_2)
            }
            Signaling::ConventionalFtn | Signaling::NyquistBpsk => (z.iter().map(|v| v.re).collect(), 1.0),
            Signaling::NyquistQpsk => (z.iter().flat_map(|v| [v.re, v.im]).collect(), 1.0),
        };
        let a_hat = stats.iter().map(|&s| quantize(s, self.eb)).collect();
        let noiseless = rx.sigma2 <= 0.0;
        let llr = stats
            .iter()
            .zip(&self.gamma)
            .map(|(&s, &gm)| {
                // A truncated indefinite G can give a non-positive quadratic form; keep the sign of the statistic.
                let var = rx.sigma2 / (2.0 * self.zeta * self.zeta) * gm.abs().max(1e-12);
                llr_from_stat(s, 2.0 * gain * self.eb.sqrt() / var, noiseless)
            })
            .collect();
        Ok(DetectorOutput { a_hat, llr, metric: Some(stats) })
    }
}

pub fn detect_zf(rx: &RxFrame, g: &IsiMatrix, zeta: f64, eb: f64, signaling: Signaling) -> Result<DetectorOutput> {
    ZfDetector::new(g, signaling, zeta, eb)?.detect(rx)
}
