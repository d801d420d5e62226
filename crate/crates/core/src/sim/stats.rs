use std::time::Duration;

/// Result of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    /// 95% half-width by the normal approximation, `1.96·√(p(1−p)/n)`.
    /// Zero when no errors were observed.
    pub ci_halfwidth: f64,
    pub wall_time: Duration,
}

impl BerPoint {
    pub fn new(ebn0_db: f64, bits: u64, errors: u64, wall_time: Duration) -> Self {
        let n = bits as f64;
        let ber = if bits == 0 { 0.0 } else { errors as f64 / n };
        let ci_halfwidth = if bits == 0 { 0.0 } else { 1.96 * (ber * (1.0 - ber) / n).sqrt() };
        Self { ebn0_db, bits, errors, ber, ci_halfwidth, wall_time }
    }
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// BPSK (and Gray QPSK) over AWGN: `Q(√(2 Eb/N0))`.
pub fn bpsk_theory_ber(ebn0_db: f64) -> f64 {
    q_function((2.0 * 10f64.powf(ebn0_db / 10.0)).sqrt())
}

/// Eb/N0 at which `curve` crosses `target`, interpolating `log10(BER)`
/// linearly in dB between the first bracketing pair of points. Points with
/// zero errors cannot bracket from above and end the search.
pub fn ebn0_at_ber(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let ((x0, b0), (x1, b1)) = (w[0], w[1]);
        if b0 <= 0.0 || b1 <= 0.0 {
            return None;
        }
        if b0 >= target && target >= b1 {
            let (l0, l1, lt) = (b0.log10(), b1.log10(), target.log10());
            Some(if l0 == l1 { x0 } else { x0 + (x1 - x0) * (l0 - lt) / (l0 - l1) })
        } else {
            None
        }
    })
}

/// Horizontal offset in dB (`a` minus `b`) between two BER curves at `target`.
pub fn horizontal_gap(a: &[(f64, f64)], b: &[(f64, f64)], target: f64) -> Option<f64> {
    Some(ebn0_at_ber(a, target)? - ebn0_at_ber(b, target)?)
}
