use ciftn_core::channel::{sigma2_from_ebn0, Fidelity, MatrixChannel, RxFrame};
use ciftn_core::detect::{Detector, DetectorKind, MlseDetector, PairwiseDetector};
use ciftn_core::pulse::{IsiMatrix, PulseSpec};
use ciftn_core::sim::{run_ber, SimConfig, StopRule};
use ciftn_core::txchain::{bits_to_bpsk, Signaling, SymbolFrame};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Setup {
    g: IsiMatrix,
    channel: MatrixChannel,
    signaling: Signaling,
}

impl Setup {
    fn new(signaling: Signaling, tau: f64, bits: usize) -> Self {
        let spec = PulseSpec::new(0.3, tau).unwrap();
        let g = IsiMatrix::new(signaling.symbols_for(bits), &spec).unwrap();
        let channel = MatrixChannel::new(&g);
        Self { g, channel, signaling }
    }

    fn frame(&self, bits: Vec<u8>, eb: f64) -> SymbolFrame {
        SymbolFrame::new(self.signaling, bits, eb, self.g.kernel()).unwrap()
    }

    fn receive(&self, frame: &SymbolFrame, sigma2: f64, rng: &mut ChaCha8Rng) -> RxFrame {
        let y = self.channel.transmit(&frame.x, &self.g, frame.zeta, sigma2, rng).unwrap();
        RxFrame { y, sigma2, ebn0_db: None, seed: 0, fidelity: Fidelity::Matrix }
    }

    fn detector(&self, kind: DetectorKind, eb: f64) -> Detector {
        let zeta = self.signaling.zeta(self.g.kernel());
        Detector::new(kind, self.signaling, &self.g, zeta, eb).unwrap()
    }
}

fn random_bits(n: usize, rng: &mut impl Rng) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..2u8)).collect()
}

fn pattern(p: u32, n: usize) -> Vec<u8> {
    (0..n).map(|i| (p >> (n - 1 - i) & 1) as u8).collect()
}

fn kinds_for(signaling: Signaling, small: bool) -> Vec<DetectorKind> {
    let mut kinds = vec![DetectorKind::Zf];
    if signaling == Signaling::CiFtn {
        kinds.push(DetectorKind::Pairwise);
    }
    if small {
        kinds.push(DetectorKind::Mlse);
    }
    kinds
}

#[test]
fn noiseless_long_frames_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (tau, frames) in [(0.6, 300), (0.5, 100)] {
        for signaling in [Signaling::CiFtn, Signaling::ConventionalFtn] {
            let s = Setup::new(signaling, tau, 672);
            for kind in kinds_for(signaling, false) {
                let det = s.detector(kind, 1.0);
                for _ in 0..frames {
                    let bits = random_bits(672, &mut rng);
                    let out = det.detect(&s.receive(&s.frame(bits.clone(), 1.0), 0.0, &mut rng)).unwrap();
                    assert_eq!(out.bits(), bits, "{signaling} {kind} tau {tau}");
                }
            }
        }
    }
}

#[test]
fn noiseless_short_frames_exhaustively() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for tau in [0.5, 0.6, 0.8] {
        for signaling in [Signaling::CiFtn, Signaling::ConventionalFtn] {
            let n = 12;
            let s = Setup::new(signaling, tau, n);
            for kind in kinds_for(signaling, true) {
                let det = s.detector(kind, 1.0);
                for p in 0..1u32 << n {
                    let bits = pattern(p, n);
                    let out = det.detect(&s.receive(&s.frame(bits.clone(), 1.0), 0.0, &mut rng)).unwrap();
                    assert_eq!(out.bits(), bits, "{signaling} {kind} tau {tau}");
                }
            }
        }
    }
}

#[test]
fn outputs_are_consistent_and_sign_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for signaling in [Signaling::CiFtn, Signaling::ConventionalFtn, Signaling::NyquistQpsk] {
        let tau = if signaling.is_nyquist() { 1.0 } else { 0.5 };
        let s = Setup::new(signaling, tau, 12);
        let sigma2 = sigma2_from_ebn0(3.0, 1.0, 1.0);
        for kind in kinds_for(signaling, true) {
            let det = s.detector(kind, 1.0);
            for _ in 0..200 {
                let rx = s.receive(&s.frame(random_bits(12, &mut rng), 1.0), sigma2, &mut rng);
                let out = det.detect(&rx).unwrap();
                assert!(out.a_hat.iter().all(|a| a.abs() == 1.0));
                for (a, l) in out.a_hat.iter().zip(&out.llr) {
                    assert!(l.abs() <= 50.0);
                    assert!(*l == 0.0 || l.signum() == a.signum(), "{kind}: llr {l} vs {a}");
                }
                let neg = det.detect(&rx.negated()).unwrap();
                let flipped: Vec<f64> = out.a_hat.iter().map(|a| -a).collect();
                assert_eq!(neg.a_hat, flipped, "{signaling} {kind}");
            }
        }
    }
}

#[test]
fn decisions_are_scale_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = Setup::new(Signaling::CiFtn, 0.6, 12);
    let sigma2 = sigma2_from_ebn0(4.0, 1.0, 1.0);
    for kind in kinds_for(Signaling::CiFtn, true) {
        let base = s.detector(kind, 1.0);
        for lambda in [1e-3, 0.37, 5.0, 1e4] {
            let scaled = s.detector(kind, lambda * lambda);
            for _ in 0..100 {
                let rx = s.receive(&s.frame(random_bits(12, &mut rng), 1.0), sigma2, &mut rng);
                let a = base.detect(&rx).unwrap().bits();
                let b = scaled.detect(&rx.scaled(lambda)).unwrap().bits();
                assert_eq!(a, b, "{kind} lambda {lambda}");
            }
        }
    }
}

#[test]
fn mlse_reduced_metric_agrees_with_full_metric() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for signaling in [Signaling::CiFtn, Signaling::ConventionalFtn] {
        let n = 8;
        let s = Setup::new(signaling, 0.5, n);
        let zeta = signaling.zeta(s.g.kernel());
        let mlse = MlseDetector::new(&s.g, signaling, zeta, 1.0).unwrap();
        let candidates: Vec<Vec<Complex64>> =
            (0..1u32 << n).map(|p| signaling.modulate(&bits_to_bpsk(&pattern(p, n), 1.0)).unwrap()).collect();
        for _ in 0..300 {
            let rx = s.receive(&s.frame(random_bits(n, &mut rng), 1.0), 0.8, &mut rng);
            let z: Vec<Complex64> = s.g.solve(&rx.y).unwrap().iter().map(|v| v / zeta).collect();
            let mut best = (f64::INFINITY, 0);
            for (p, x) in candidates.iter().enumerate() {
                let m = mlse.full_metric(&z, x);
                if m < best.0 - 1e-9 {
                    best = (m, p);
                }
            }
            assert_eq!(mlse.detect(&rx).unwrap().bits(), pattern(best.1 as u32, n));
        }
    }
}

#[test]
fn mlse_ties_resolve_to_lexicographically_smallest() {
    let s = Setup::new(Signaling::ConventionalFtn, 0.6, 2);
    let det = s.detector(DetectorKind::Mlse, 1.0);
    // With y = 0 only xᴴGx matters: [+1, -1] and [-1, +1] tie for the minimum.
    let rx = RxFrame { y: vec![Complex64::new(0.0, 0.0); 2], sigma2: 1.0, ebn0_db: None, seed: 0, fidelity: Fidelity::Matrix };
    assert_eq!(det.detect(&rx).unwrap().bits(), vec![0, 1]);
}

fn llr_moments(signaling: Signaling, tau: f64, kind: DetectorKind, ebn0: f64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let s = Setup::new(signaling, tau, 672);
    let det = s.detector(kind, 1.0);
    let sigma2 = sigma2_from_ebn0(ebn0, 1.0, 1.0);
    let mut v = Vec::new();
    for _ in 0..150 {
        let bits = random_bits(672, &mut rng);
        let out = det.detect(&s.receive(&s.frame(bits.clone(), 1.0), sigma2, &mut rng)).unwrap();
        v.extend(out.llr.iter().zip(&bits).map(|(l, &b)| if b == 0 { *l } else { -l }));
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (mean, var)
}

#[test]
fn llrs_are_consistent_gaussians() {
    // A consistent Gaussian LLR has mean equal to half its variance.
    for (signaling, tau, kind, tol) in [
        (Signaling::CiFtn, 1.0, DetectorKind::Pairwise, 0.02),
        (Signaling::NyquistBpsk, 1.0, DetectorKind::Zf, 0.02),
        (Signaling::CiFtn, 0.9, DetectorKind::Zf, 0.02),
        (Signaling::CiFtn, 0.6, DetectorKind::Pairwise, 0.1),
    ] {
        let (mean, var) = llr_moments(signaling, tau, kind, 2.0);
        let ratio = mean / var;
        assert!((ratio - 0.5).abs() < tol, "{signaling} {kind} tau {tau}: mean {mean} var {var}");
    }
}

#[test]
fn zero_forcing_loses_to_mlse_on_short_blocks() {
    let spec = PulseSpec::new(0.3, 0.5).unwrap();
    let run = |kind| {
        let mut c = SimConfig::new(Signaling::CiFtn, kind, spec, vec![2.0, 4.0, 6.0]);
        c.frame_len = 10;
        c.stop = StopRule::fixed_frames(4000);
        run_ber(&c).unwrap()
    };
    let (zf, ml) = (run(DetectorKind::Zf), run(DetectorKind::Mlse));
    for (z, m) in zf.iter().zip(&ml) {
        assert!(z.ber > m.ber, "Eb/N0 {}: zf {} mlse {}", z.ebn0_db, z.ber, m.ber);
    }
}

#[test]
fn pairwise_operation_count_is_linear() {
    let spec = PulseSpec::builder(0.3, 0.45).isi_len(30).build().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [128usize, 1024] {
        let g = IsiMatrix::new(n, &spec).unwrap();
        let frame = SymbolFrame::ci_ftn(random_bits(n, &mut rng), 1.0, g.kernel()).unwrap();
        let y = MatrixChannel::new(&g).transmit(&frame.x, &g, frame.zeta, 0.1, &mut rng).unwrap();
        let rx = RxFrame { y, sigma2: 0.1, ebn0_db: None, seed: 0, fidelity: Fidelity::Matrix };
        for l in [5usize, 10, 20] {
            let (_, ops) = PairwiseDetector::new(&g, l, frame.zeta, 1.0).unwrap().detect_counted(&rx).unwrap();
            let per = ops.total() as f64 / (n * l) as f64;
            assert!((3.0..=4.0).contains(&per), "N {n} L {l}: {per} ops per N·L");
        }
    }
}
