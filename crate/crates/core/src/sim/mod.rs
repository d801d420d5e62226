//! Monte Carlo BER engine, experiment configuration and reporting.

mod io;
mod report;
mod stats;

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use io::{parse_key_values, parse_sweep, write_ber_csv, write_isi_table_csv, write_se_csv};
pub use report::{se_table, spectral_efficiency, trace_example, SeRow, TraceReport};
pub use stats::{bpsk_theory_ber, ebn0_at_ber, horizontal_gap, q_function, BerPoint};

use crate::channel::{sigma2_from_ebn0, Fidelity, MatrixChannel, RxFrame, WaveformChannel};
use crate::coding::LdpcCode;
use crate::detect::{Detector, DetectorKind};
use crate::error::{Error, Result};
use crate::pulse::{IsiMatrix, PulseSpec};
use crate::txchain::{Signaling, SymbolFrame};

/// Frames are simulated and counted in groups of this size; the stop rule is
/// checked only between groups, which keeps results independent of the
/// number of workers.
pub const FRAMES_PER_CHUNK: u64 = 32;
pub const DEFAULT_FRAME_LEN: usize = 672;
pub const DEFAULT_MIN_ERRORS: u64 = 200;
pub const DEFAULT_MAX_BITS: u64 = 200_000_000;
pub const MIN_ERRORS_FLOOR: u64 = 100;

/// When to stop simulating one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_bits: u64,
    /// Run exactly this many frames and ignore the error target.
    pub frames: Option<u64>,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { min_errors: DEFAULT_MIN_ERRORS, max_bits: DEFAULT_MAX_BITS, frames: None }
    }
}

impl StopRule {
    pub fn fixed_frames(frames: u64) -> Self {
        Self { frames: Some(frames), ..Self::default() }
    }

    fn done(&self, frames: u64, bits: u64, errors: u64) -> bool {
        match self.frames {
            Some(f) => frames >= f,
            None => errors >= self.min_errors || bits >= self.max_bits,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub signaling: Signaling,
    pub detector: DetectorKind,
    pub pulse: PulseSpec,
    pub ebn0_db: Vec<f64>,
    /// Channel bits per frame (the codeword length when coded).
    pub frame_len: usize,
    pub code: Option<LdpcCode>,
    pub stop: StopRule,
    pub seed: u64,
    pub fidelity: Fidelity,
    /// Overrides the `ζ` derived from the pulse.
    pub zeta: Option<f64>,
    /// Worker threads; 0 lets the thread pool decide. Does not affect results.
    pub workers: usize,
}

impl SimConfig {
    pub fn new(signaling: Signaling, detector: DetectorKind, pulse: PulseSpec, ebn0_db: Vec<f64>) -> Self {
        Self {
            signaling,
            detector,
            pulse,
            ebn0_db,
            frame_len: DEFAULT_FRAME_LEN,
            code: None,
            stop: StopRule::default(),
            seed: 1,
            fidelity: Fidelity::Matrix,
            zeta: None,
            workers: 0,
        }
    }

    /// Attaches `code` and sets the frame length to its codeword length.
    pub fn coded(mut self, code: LdpcCode) -> Self {
        self.frame_len = code.n();
        self.code = Some(code);
        self
    }

    pub fn info_len(&self) -> usize {
        self.code.as_ref().map_or(self.frame_len, LdpcCode::k)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigInvalid(m));
        if self.ebn0_db.is_empty() {
            return bad("the Eb/N0 sweep is empty".into());
        }
        if self.ebn0_db.iter().any(|v| !v.is_finite()) {
            return bad("the Eb/N0 sweep contains a non-finite value".into());
        }
        if self.ebn0_db.windows(2).any(|w| w[1] <= w[0]) {
            return bad("the Eb/N0 sweep must be strictly increasing".into());
        }
        if self.signaling.is_nyquist() && self.pulse.tau != 1.0 {
            return bad(format!("{} requires tau = 1, got {}", self.signaling, self.pulse.tau));
        }
        if self.frame_len == 0 {
            return bad("frame length must be positive".into());
        }
        if let Some(code) = &self.code {
            if code.n() != self.frame_len {
                return bad(format!("frame length {} differs from the code length {}", self.frame_len, code.n()));
            }
        }
        self.signaling
            .check_len(self.frame_len)
            .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        match self.stop.frames {
            Some(0) => return bad("frame count must be positive".into()),
            Some(_) => {}
            None => {
                if self.stop.min_errors < MIN_ERRORS_FLOOR {
                    return bad(format!(
                        "min_errors = {} is below {MIN_ERRORS_FLOOR}; set a fixed frame count to override",
                        self.stop.min_errors
                    ));
                }
                if self.stop.max_bits < self.info_len() as u64 {
                    return bad("max_bits is smaller than one frame".into());
                }
            }
        }
        if let Some(z) = self.zeta {
            if !(z > 0.0 && z.is_finite()) {
                return bad(format!("zeta override {z} must be positive"));
            }
        }
        Ok(())
    }
}

/// Per-frame seed derived from the master seed, the sweep index and the frame index.
pub fn frame_seed(master: u64, sweep_index: u64, frame_index: u64) -> u64 {
    fn mix(z: u64) -> u64 {
        let z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        let z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(master) ^ sweep_index) ^ frame_index)
}

#[derive(Debug, Clone)]
enum Channel {
    Matrix(MatrixChannel),
    Waveform(WaveformChannel),
}

/// Everything needed to push one frame through the link, prepared once per
/// configuration and shared read-only between workers.
#[derive(Debug, Clone)]
pub struct Link {
    signaling: Signaling,
    g: IsiMatrix,
    zeta: f64,
    channel: Channel,
    detector: Detector,
    code: Option<LdpcCode>,
    frame_len: usize,
    fidelity: Fidelity,
}

/// Amplitude energy of one BPSK component.
const ES: f64 = 1.0;

impl Link {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let symbols = config.signaling.symbols_for(config.frame_len);
        let g = IsiMatrix::new(symbols, &config.pulse)?;
        let zeta = config.zeta.unwrap_or_else(|| config.signaling.zeta(g.kernel()));
        let channel = match config.fidelity {
            Fidelity::Matrix => Channel::Matrix(MatrixChannel::new(&g)),
            Fidelity::Waveform => Channel::Waveform(WaveformChannel::new(&config.pulse)?),
        };
        let detector = Detector::new(config.detector, config.signaling, &g, zeta, ES)
            .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        Ok(Self {
            signaling: config.signaling,
            g,
            zeta,
            channel,
            detector,
            code: config.code.clone(),
            frame_len: config.frame_len,
            fidelity: config.fidelity,
        })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn isi_matrix(&self) -> &IsiMatrix {
        &self.g
    }

    pub fn info_len(&self) -> usize {
        self.code.as_ref().map_or(self.frame_len, LdpcCode::k)
    }

    pub fn code_rate(&self) -> f64 {
        self.code.as_ref().map_or(1.0, LdpcCode::rate)
    }

    pub fn sigma2(&self, ebn0_db: f64) -> f64 {
        sigma2_from_ebn0(ebn0_db, ES, self.code_rate())
    }

    /// Simulates one frame and returns its information-bit error count.
    pub fn simulate_frame(&self, ebn0_db: f64, seed: u64) -> Result<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info: Vec<u8> = (0..self.info_len()).map(|_| rng.gen_range(0..2u8)).collect();
        let bits = match &self.code {
            Some(code) => code.encode(&info)?,
            None => info.clone(),
        };
        let mut frame = SymbolFrame::new(self.signaling, bits, ES, self.g.kernel())?;
        frame.zeta = self.zeta;
        let sigma2 = self.sigma2(ebn0_db);
        let y: Vec<Complex64> = match &self.channel {
            Channel::Matrix(ch) => ch.transmit(&frame.x, &self.g, self.zeta, sigma2, &mut rng)?,
            Channel::Waveform(ch) => ch.transmit(&frame, sigma2, &mut rng)?,
        };
        let rx = RxFrame { y, sigma2, ebn0_db: Some(ebn0_db), seed, fidelity: self.fidelity };
        let out = self.detector.detect(&rx)?;
        let decided = match &self.code {
            Some(code) => code.decode(&out.llr).info,
            None => out.bits(),
        };
        Ok(decided.iter().zip(&info).filter(|(a, b)| a != b).count() as u64)
    }
}

/// Runs the configured sweep. Output depends only on the configuration and
/// master seed, never on `workers`.
pub fn run_ber(config: &SimConfig) -> Result<Vec<BerPoint>> {
    let link = Link::new(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::ConfigInvalid(format!("thread pool: {e}")))?;
    let info_len = link.info_len() as u64;
    let mut points = Vec::with_capacity(config.ebn0_db.len());
    for (sweep, &ebn0) in config.ebn0_db.iter().enumerate() {
        let start = Instant::now();
        let (mut frames, mut errors) = (0u64, 0u64);
        while !config.stop.done(frames, frames * info_len, errors) {
            let end = match config.stop.frames {
                Some(f) => (frames + FRAMES_PER_CHUNK).min(f),
                None => frames + FRAMES_PER_CHUNK,
            };
            let counts: Vec<u64> = pool.install(|| {
                (frames..end)
                    .into_par_iter()
                    .map(|f| link.simulate_frame(ebn0, frame_seed(config.seed, sweep as u64, f)))
                    .collect::<Result<_>>()
            })?;
            errors += counts.iter().sum::<u64>();
            frames = end;
        }
        points.push(BerPoint::new(ebn0, frames * info_len, errors, start.elapsed()));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nyquist(ebn0: Vec<f64>) -> SimConfig {
        SimConfig::new(Signaling::NyquistBpsk, DetectorKind::Zf, PulseSpec::new(0.3, 1.0).unwrap(), ebn0)
    }

    #[test]
    fn validation() {
        assert!(nyquist(vec![1.0, 2.0]).validate().is_ok());
        assert!(nyquist(vec![]).validate().is_err());
        assert!(nyquist(vec![2.0, 2.0]).validate().is_err());
        assert!(nyquist(vec![3.0, 2.0]).validate().is_err());
        let mut c = nyquist(vec![1.0]);
        c.stop.min_errors = 50;
        assert!(c.validate().is_err());
        c.stop.frames = Some(10);
        assert!(c.validate().is_ok());
        let mut c = nyquist(vec![1.0]);
        c.pulse = PulseSpec::new(0.3, 0.5).unwrap();
        assert!(c.validate().is_err());
        let mut c = nyquist(vec![1.0]);
        c.signaling = Signaling::CiFtn;
        c.pulse = PulseSpec::new(0.3, 0.5).unwrap();
        c.frame_len = 671;
        assert!(c.validate().is_err());
        let c = nyquist(vec![1.0]).coded(LdpcCode::default_code());
        assert_eq!((c.frame_len, c.info_len()), (672, 336));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn pairwise_needs_ci() {
        let mut c = nyquist(vec![1.0]);
        c.detector = DetectorKind::Pairwise;
        assert!(matches!(run_ber(&c), Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn seeds_differ_per_frame_and_point() {
        let mut seen = std::collections::HashSet::new();
        for s in 0..4 {
            for f in 0..256 {
                assert!(seen.insert(frame_seed(7, s, f)));
            }
        }
        assert_ne!(frame_seed(1, 0, 0), frame_seed(2, 0, 0));
    }

    #[test]
    fn counts_are_conserved() {
        let mut c = nyquist(vec![2.0, 4.0]);
        c.stop = StopRule::fixed_frames(40);
        let link = Link::new(&c).unwrap();
        let pts = run_ber(&c).unwrap();
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(p.bits, 40 * 672);
            let manual: u64 = (0..40).map(|f| link.simulate_frame(p.ebn0_db, frame_seed(1, i as u64, f)).unwrap()).sum();
            assert_eq!(manual, p.errors);
        }
    }

    #[test]
    fn stops_on_error_target() {
        let mut c = nyquist(vec![0.0]);
        c.stop.min_errors = 100;
        let p = &run_ber(&c).unwrap()[0];
        assert!(p.errors >= 100);
        assert_eq!(p.bits % (672 * FRAMES_PER_CHUNK), 0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut c = SimConfig::new(
            Signaling::CiFtn,
            DetectorKind::Pairwise,
            PulseSpec::new(0.3, 0.6).unwrap(),
            vec![4.0, 6.0],
        );
        c.stop = StopRule::fixed_frames(70);
        c.workers = 1;
        let a = run_ber(&c).unwrap();
        c.workers = 3;
        let b = run_ber(&c).unwrap();
        let strip = |v: &[BerPoint]| v.iter().map(|p| (p.bits, p.errors)).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }
}
