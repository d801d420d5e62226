//! CI-FTN transmitter: BPSK mapping, π/4 rotation, coordinate interleaving,
//! energy normalization and rRC pulse shaping.
//!
//! Bit convention: `0 -> +√Eb`, `1 -> -√Eb`. Indices are 0-based, so the
//! interleaving pairs are `(2p, 2p+1)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulse::{IsiKernel, PulseSpec};

/// Truncation of the rRC pulse on the waveform path, in symbol periods each side.
pub const DEFAULT_PULSE_SPAN: f64 = 32.0;

/// Transmission scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signaling {
    /// Rotated BPSK with coordinate interleaving, packed at `τT`.
    CiFtn,
    /// Plain real BPSK packed at `τT`.
    ConventionalFtn,
    /// Real BPSK at `τ = 1`.
    NyquistBpsk,
    /// Gray QPSK at `τ = 1`, two bits per symbol.
    NyquistQpsk,
}

impl Signaling {
    pub const ALL: [Signaling; 4] =
        [Signaling::CiFtn, Signaling::ConventionalFtn, Signaling::NyquistBpsk, Signaling::NyquistQpsk];

    pub fn name(self) -> &'static str {
        match self {
            Signaling::CiFtn => "ci_ftn",
            Signaling::ConventionalFtn => "conventional_ftn",
            Signaling::NyquistBpsk => "nyquist_bpsk",
            Signaling::NyquistQpsk => "nyquist_qpsk",
        }
    }

    pub fn is_nyquist(self) -> bool {
        matches!(self, Signaling::NyquistBpsk | Signaling::NyquistQpsk)
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Signaling::NyquistQpsk => 2,
            _ => 1,
        }
    }

    /// Number of transmitted symbols for `bits` coded bits.
    pub fn symbols_for(self, bits: usize) -> usize {
        bits / self.bits_per_symbol()
    }

    pub fn check_len(self, bits: usize) -> Result<()> {
        match self {
            Signaling::CiFtn | Signaling::NyquistQpsk if !bits.is_multiple_of(2) => Err(Error::OddLength(bits)),
            _ => Ok(()),
        }
    }

    /// Energy normalization `ζ`: `1/√(1+g(τT))` for CI-FTN, 1 otherwise.
    pub fn zeta(self, kernel: &IsiKernel) -> f64 {
        match self {
            Signaling::CiFtn => compute_zeta(kernel),
            _ => 1.0,
        }
    }

    /// Maps BPSK amplitudes `a` to transmit symbols, before the `ζ` scaling.
    pub fn modulate(self, a: &[f64]) -> Result<Vec<Complex64>> {
        self.check_len(a.len())?;
        Ok(match self {
            Signaling::CiFtn => coordinate_interleave(&rotate(a))?,
            Signaling::ConventionalFtn | Signaling::NyquistBpsk => {
                a.iter().map(|&v| Complex64::new(v, 0.0)).collect()
            }
            Signaling::NyquistQpsk => a.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect(),
        })
    }
}

impl fmt::Display for Signaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Signaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Signaling::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::ConfigInvalid(format!("unknown signaling mode '{s}'")))
    }
}

/// `0 -> +√Eb`, `1 -> -√Eb`.
pub fn bits_to_bpsk(bits: &[u8], eb: f64) -> Vec<f64> {
    let amp = eb.sqrt();
    bits.iter().map(|&b| if b == 0 { amp } else { -amp }).collect()
}

/// Inverse of [`bits_to_bpsk`] by sign; zero maps to bit 0.
pub fn bpsk_to_bits(a: &[f64]) -> Vec<u8> {
    a.iter().map(|&v| u8::from(v < 0.0)).collect()
}

/// Counter-clockwise rotation by π/4: `s = a·e^{jπ/4}`.
pub fn rotate(a: &[f64]) -> Vec<Complex64> {
    a.iter().map(|&v| Complex64::new(v * FRAC_1_SQRT_2, v * FRAC_1_SQRT_2)).collect()
}

pub fn map_and_rotate(bits: &[u8], eb: f64) -> Vec<Complex64> {
    rotate(&bits_to_bpsk(bits, eb))
}

/// I stream becomes `(s_I[0], s_Q[0], s_I[2], s_Q[2], …)`, Q stream
/// `(s_I[1], s_Q[1], s_I[3], s_Q[3], …)`.
pub fn coordinate_interleave(s: &[Complex64]) -> Result<Vec<Complex64>> {
    if !s.len().is_multiple_of(2) {
        return Err(Error::OddLength(s.len()));
    }
    let mut x = Vec::with_capacity(s.len());
    for p in s.chunks_exact(2) {
        x.push(Complex64::new(p[0].re, p[1].re));
        x.push(Complex64::new(p[0].im, p[1].im));
    }
    Ok(x)
}

pub fn coordinate_deinterleave(x: &[Complex64]) -> Result<Vec<Complex64>> {
    if !x.len().is_multiple_of(2) {
        return Err(Error::OddLength(x.len()));
    }
    let mut s = Vec::with_capacity(x.len());
    for p in x.chunks_exact(2) {
        s.push(Complex64::new(p[0].re, p[1].re));
        s.push(Complex64::new(p[0].im, p[1].im));
    }
    Ok(s)
}

/// `ζ = 1/√(1 + g(τT))`.
///
/// Within a CI pair the two transmitted samples are identical copies in each
/// rail, so their pulses overlap coherently and the pair carries
/// `2Eb(1 + g(τT))`; across pairs the symbols are independent.
pub fn compute_zeta(kernel: &IsiKernel) -> f64 {
    1.0 / (1.0 + kernel.at(1)).sqrt()
}

/// Transmit-side lineage of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFrame {
    pub signaling: Signaling,
    pub bits: Vec<u8>,
    pub a: Vec<f64>,
    /// Rotated symbols; equal to `a` for the unrotated modes.
    pub s: Vec<Complex64>,
    /// Transmit symbols before `ζ` scaling.
    pub x: Vec<Complex64>,
    pub zeta: f64,
    pub eb: f64,
}

impl SymbolFrame {
    pub fn new(signaling: Signaling, bits: Vec<u8>, eb: f64, kernel: &IsiKernel) -> Result<Self> {
        signaling.check_len(bits.len())?;
        let a = bits_to_bpsk(&bits, eb);
        let s = match signaling {
            Signaling::CiFtn => rotate(&a),
            _ => a.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        };
        let x = signaling.modulate(&a)?;
        let zeta = signaling.zeta(kernel);
        Ok(Self { signaling, bits, a, s, x, zeta, eb })
    }

    pub fn ci_ftn(bits: Vec<u8>, eb: f64, kernel: &IsiKernel) -> Result<Self> {
        Self::new(Signaling::CiFtn, bits, eb, kernel)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `ζ·x`, the amplitudes actually placed on the pulses.
    pub fn scaled(&self) -> Vec<Complex64> {
        self.x.iter().map(|&v| v * self.zeta).collect()
    }
}

/// Oversampled complex baseband signal; sample `j` sits at `start + j·dt` (units of `T`).
#[derive(Debug, Clone)]
pub struct Waveform {
    pub samples: Vec<Complex64>,
    pub dt: f64,
    pub start: f64,
    /// Samples per `τT`.
    pub oversampling: usize,
    /// Pulse truncation, in samples each side of a symbol centre.
    pub half_taps: usize,
}

impl Waveform {
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.dt
    }
}

/// `h(kΔ)` for `k = -half..=half`, stored at index `k + half`.
pub(crate) fn rrc_table(spec: &PulseSpec, dt: f64, half: usize) -> Vec<f64> {
    (0..=2 * half)
        .map(|i| spec.rrc((i as f64 - half as f64) * dt * spec.symbol_period))
        .collect()
}

pub(crate) fn waveform_grid(spec: &PulseSpec, span: f64) -> Result<(f64, usize)> {
    if spec.oversampling < 8 {
        return Err(Error::ConfigInvalid(format!(
            "waveform path needs oversampling >= 8, got {}",
            spec.oversampling
        )));
    }
    let dt = spec.tau / spec.oversampling as f64;
    Ok((dt, (span / dt).ceil() as usize))
}

/// `p(t) = ζ Σ x_n h(t − nτT)` on a grid of `spec.oversampling` samples per `τT`.
pub fn transmit_waveform(frame: &SymbolFrame, spec: &PulseSpec) -> Result<Waveform> {
    transmit_waveform_with_span(frame, spec, DEFAULT_PULSE_SPAN)
}

pub fn transmit_waveform_with_span(frame: &SymbolFrame, spec: &PulseSpec, span: f64) -> Result<Waveform> {
    let (dt, half) = waveform_grid(spec, span)?;
    let m = spec.oversampling;
    let table = rrc_table(spec, dt, half);
    let n = frame.len();
    let len = n.saturating_sub(1) * m + 2 * half + 1;
    let mut samples = vec![Complex64::new(0.0, 0.0); len];
    for (k, &x) in frame.x.iter().enumerate() {
        let v = x * frame.zeta;
        let base = k * m;
        for (tap, &h) in table.iter().enumerate() {
            samples[base + tap] += v * h;
        }
    }
    Ok(Waveform { samples, dt, start: -(half as f64) * dt, oversampling: m, half_taps: half })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kernel(alpha: f64, tau: f64) -> IsiKernel {
        IsiKernel::new(&PulseSpec::new(alpha, tau).unwrap())
    }

    #[test]
    fn rotation_values() {
        let s = map_and_rotate(&[0, 1], 1.0);
        assert!((s[0] - Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((s[1] + Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm() < 1e-15);
        for v in map_and_rotate(&[0, 1, 1, 0], 2.5) {
            assert!((v.norm_sqr() - 2.5).abs() < 1e-12);
            assert_eq!(v.re, v.im);
        }
    }

    #[test]
    fn worked_example_interleaving() {
        let a = [1.0, -1.0, 1.0, -1.0, 1.0, 1.0];
        let x = coordinate_interleave(&rotate(&a)).unwrap();
        let r = FRAC_1_SQRT_2;
        let want = [(r, -r), (r, -r), (r, -r), (r, -r), (r, r), (r, r)];
        for (v, w) in x.iter().zip(want) {
            assert!((v - Complex64::new(w.0, w.1)).norm() < 1e-15);
        }
        let zeta = compute_zeta(&kernel(0.3, 0.6));
        assert!((zeta - 0.8194).abs() < 1e-4);
        assert!((zeta * r - 0.5794).abs() < 1e-4);
    }

    #[test]
    fn zeta_is_one_at_nyquist() {
        assert!((compute_zeta(&kernel(0.3, 1.0)) - 1.0).abs() < 1e-15);
        assert!((compute_zeta(&kernel(0.3, 0.9)) - 0.9526).abs() < 1e-4);
    }

    #[test]
    fn equal_symbols_interleave_to_equal_entries() {
        let s = vec![Complex64::new(0.3, 0.3); 8];
        assert!(coordinate_interleave(&s).unwrap().iter().all(|&v| v == s[0]));
    }

    #[test]
    fn odd_length_rejected() {
        assert_eq!(coordinate_interleave(&rotate(&[1.0; 3])).unwrap_err(), Error::OddLength(3));
        assert!(SymbolFrame::ci_ftn(vec![0; 5], 1.0, &kernel(0.3, 0.6)).is_err());
    }

    #[test]
    fn pair_sign_property_exhaustive() {
        for n in (2..=12).step_by(2) {
            for pat in 0u32..(1 << n) {
                let bits: Vec<u8> = (0..n).map(|i| ((pat >> i) & 1) as u8).collect();
                let a = bits_to_bpsk(&bits, 1.0);
                let x = Signaling::CiFtn.modulate(&a).unwrap();
                for k in (0..n).step_by(2) {
                    assert_eq!(x[k].re.signum(), x[k + 1].re.signum());
                    assert_eq!(x[k].im.signum(), x[k + 1].im.signum());
                    assert_eq!(x[k].re.signum(), a[k].signum());
                    assert_eq!(x[k].im.signum(), a[k + 1].signum());
                }
            }
        }
    }

    #[test]
    fn conventional_mode_is_identity() {
        let a = [1.0, -1.0, -1.0, 1.0];
        let x = Signaling::ConventionalFtn.modulate(&a).unwrap();
        assert!(x.iter().zip(a).all(|(v, w)| v.re == w && v.im == 0.0));
        assert_eq!(Signaling::ConventionalFtn.zeta(&kernel(0.3, 0.6)), 1.0);
    }

    #[test]
    fn single_symbol_waveform_is_scaled_pulse() {
        let spec = PulseSpec::new(0.3, 0.6).unwrap();
        let k = IsiKernel::new(&spec);
        let f = SymbolFrame::new(Signaling::ConventionalFtn, vec![0], 1.0, &k).unwrap();
        let w = transmit_waveform(&f, &spec).unwrap();
        for (j, v) in w.samples.iter().enumerate().step_by(37) {
            let t = w.start + j as f64 * w.dt;
            assert!((v.re - spec.rrc(t)).abs() < 1e-12);
        }
        assert!((w.energy() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn oversampling_below_eight_rejected() {
        let spec = PulseSpec::builder(0.3, 0.6).oversampling(4).build().unwrap();
        let k = IsiKernel::new(&spec);
        let f = SymbolFrame::ci_ftn(vec![0, 1], 1.0, &k).unwrap();
        assert!(transmit_waveform(&f, &spec).is_err());
    }

    proptest! {
        #[test]
        fn deinterleave_inverts(v in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..40)) {
            let mut s: Vec<Complex64> = v.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
            if s.len() % 2 == 1 { s.pop(); }
            let back = coordinate_deinterleave(&coordinate_interleave(&s).unwrap()).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
