//! Detectors for CI-FTN and the reference schemes.
//!
//! - [`pairwise`]: the low-complexity pair-combining detector with decision
//!   feedback for past symbols and hard pre-decisions for future ones.
//! - [`zf`]: zero-forcing on `z = G⁻¹y/ζ`.
//! - [`mlse`]: exhaustive maximum-likelihood sequence search, an oracle for
//!   short blocks.

pub mod mlse;
pub mod pairwise;
pub mod zf;

use std::fmt;
use std::str::FromStr;

pub use mlse::{detect_mlse_bruteforce, MlseDetector, MLSE_MAX_LEN};
pub use pairwise::{detect_ci_pairwise, soft_output, OpCount, PairwiseDetector};
pub use zf::{detect_zf, ZfDetector};

use crate::channel::RxFrame;
use crate::error::{Error, Result};
use crate::pulse::IsiMatrix;
use crate::txchain::Signaling;

/// LLR magnitude limit; also the value used when `σ² = 0`.
pub const LLR_CLAMP: f64 = 50.0;

/// Hard decisions and soft metrics for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorOutput {
    /// BPSK decisions, each `±√Eb`.
    pub a_hat: Vec<f64>,
    /// Per-bit LLR, positive for bit 0.
    pub llr: Vec<f64>,
    /// Decision statistic before quantization, when the detector has one.
    pub metric: Option<Vec<f64>>,
}

impl DetectorOutput {
    pub fn bits(&self) -> Vec<u8> {
        crate::txchain::bpsk_to_bits(&self.a_hat)
    }
}

/// Nearest of `{+√Eb, -√Eb}`; zero goes to `+√Eb`.
#[inline]
pub fn quantize(v: f64, eb: f64) -> f64 {
    if v >= 0.0 {
        eb.sqrt()
    } else {
        -eb.sqrt()
    }
}

#[inline]
pub(crate) fn clamp_llr(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-LLR_CLAMP, LLR_CLAMP)
    }
}

/// LLR `scale · stat`, or `±LLR_CLAMP` by the sign of `stat` when the noise is zero.
pub(crate) fn llr_from_stat(stat: f64, scale: f64, noiseless: bool) -> f64 {
    if noiseless {
        if stat >= 0.0 {
            LLR_CLAMP
        } else {
            -LLR_CLAMP
        }
    } else {
        clamp_llr(scale * stat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorKind {
    Pairwise,
    Zf,
    Mlse,
}

impl DetectorKind {
    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Pairwise => "pairwise",
            DetectorKind::Zf => "zf",
            DetectorKind::Mlse => "mlse",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pairwise" => Ok(DetectorKind::Pairwise),
            "zf" => Ok(DetectorKind::Zf),
            "mlse" => Ok(DetectorKind::Mlse),
            _ => Err(Error::ConfigInvalid(format!("unknown detector '{s}'"))),
        }
    }
}

/// A detector prepared for one `(signaling, G, ζ, Eb)` configuration.
#[derive(Debug, Clone)]
pub enum Detector {
    Pairwise(PairwiseDetector),
    Zf(ZfDetector),
    Mlse(MlseDetector),
}

impl Detector {
    pub fn new(kind: DetectorKind, signaling: Signaling, g: &IsiMatrix, zeta: f64, eb: f64) -> Result<Self> {
        Ok(match kind {
            DetectorKind::Pairwise => {
                if signaling != Signaling::CiFtn {
                    return Err(Error::ConfigInvalid(format!(
                        "the pairwise detector needs ci_ftn signaling, not {signaling}"
                    )));
                }
                Detector::Pairwise(PairwiseDetector::new(g, g.kernel().isi_len(), zeta, eb)?)
            }
            DetectorKind::Zf => Detector::Zf(ZfDetector::new(g, signaling, zeta, eb)?),
            DetectorKind::Mlse => Detector::Mlse(MlseDetector::new(g, signaling, zeta, eb)?),
        })
    }

    pub fn detect(&self, rx: &RxFrame) -> Result<DetectorOutput> {
        match self {
            Detector::Pairwise(d) => d.detect(rx),
            Detector::Zf(d) => d.detect(rx),
            Detector::Mlse(d) => d.detect(rx),
        }
    }
}
