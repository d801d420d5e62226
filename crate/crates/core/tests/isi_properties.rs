use ciftn_core::isi_analysis::{isi_budget, isi_table, worst_case_isi, IsiMode, TABLE_TAUS};
use ciftn_core::pulse::{IsiKernel, IsiMatrix, PulseSpec};
use ciftn_core::txchain::{compute_zeta, Signaling};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Destructive ISI on the in-phase rail of sample `k` of a CI-FTN frame.
fn ci_destructive(kernel: &IsiKernel, zeta: f64, l: usize, a: &[f64], k: usize) -> f64 {
    let x = Signaling::CiFtn.modulate(a).unwrap();
    let partner = if k.is_multiple_of(2) { k + 1 } else { k - 1 };
    let isi: f64 = (k - l..=k + l)
        .filter(|&m| m != k && m != partner)
        .map(|m| kernel.at(m as isize - k as isize) * x[m].re)
        .sum();
    -x[k].re.signum() * isi * zeta
}

/// Random-restart hill climb over single bit flips.
fn hill_climb_ci(spec: &PulseSpec, l: usize, restarts: usize) -> f64 {
    let wide = PulseSpec { isi_len: l, ..*spec };
    let kernel = IsiKernel::new(&wide);
    let zeta = compute_zeta(&kernel);
    let n = 2 * l + 6;
    let mut rng = ChaCha8Rng::seed_from_u64(l as u64);
    let mut best: f64 = 0.0;
    for k in [l + 2, l + 3] {
        for _ in 0..restarts {
            let mut a: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
            let mut value = ci_destructive(&kernel, zeta, l, &a, k);
            loop {
                let mut improved = false;
                for i in 0..n {
                    a[i] = -a[i];
                    let v = ci_destructive(&kernel, zeta, l, &a, k);
                    if v > value + 1e-15 {
                        value = v;
                        improved = true;
                    } else {
                        a[i] = -a[i];
                    }
                }
                if !improved {
                    break;
                }
            }
            best = best.max(value);
        }
    }
    best
}

#[test]
fn ci_worst_case_matches_hill_climb_on_wide_windows() {
    for tau in [0.7, 0.45] {
        let spec = PulseSpec::new(0.3, tau).unwrap();
        for l in [8, 14, 22] {
            let fast = worst_case_isi(&spec, IsiMode::Ci, l);
            let climbed = hill_climb_ci(&spec, l, 10);
            assert!(climbed <= fast + 1e-12, "hill climb beat the optimum: {climbed} > {fast}");
            assert!((fast - climbed).abs() < 1e-9, "tau {tau} L {l}: {fast} vs {climbed}");
        }
    }
}

/// Worst destructive ISI on any rail of the middle samples, by enumerating every
/// bit pattern of a short CI-FTN frame and summing interference within `±L`
/// (excluding the partner sample of the same symbol).
fn brute_force_ci(spec: &PulseSpec, l: usize) -> f64 {
    let wide = PulseSpec { isi_len: l, ..*spec };
    let kernel = IsiKernel::new(&wide);
    let zeta = compute_zeta(&kernel);
    let n = 2 * l + 6;
    let mut worst: f64 = 0.0;
    for pattern in 0u32..(1 << n) {
        let a: Vec<f64> = (0..n).map(|i| if pattern >> i & 1 == 0 { 1.0 } else { -1.0 }).collect();
        let x = Signaling::CiFtn.modulate(&a).unwrap();
        for k in [l + 2, l + 3] {
            let partner = if k % 2 == 0 { k + 1 } else { k - 1 };
            for rail in [0, 1] {
                let comp = |m: usize| if rail == 0 { x[m].re } else { x[m].im };
                let own = comp(k).signum();
                let isi: f64 = (k - l..=k + l)
                    .filter(|&m| m != k && m != partner)
                    .map(|m| kernel.at(m as isize - k as isize) * comp(m))
                    .sum();
                worst = worst.max(-own * isi * zeta);
            }
        }
    }
    worst
}

#[test]
fn ci_worst_case_matches_exhaustive_frames() {
    for tau in [0.8, 0.6, 0.45] {
        let spec = PulseSpec::new(0.3, tau).unwrap();
        for l in [2, 3, 4] {
            let fast = worst_case_isi(&spec, IsiMode::Ci, l);
            let slow = brute_force_ci(&spec, l);
            assert!((fast - slow).abs() < 1e-12, "tau {tau} L {l}: {fast} vs {slow}");
        }
    }
}

#[test]
fn conventional_worst_case_matches_exhaustive_frames() {
    let spec = PulseSpec::new(0.3, 0.6).unwrap();
    let l = 5;
    let g = IsiMatrix::new(2 * l + 1, &PulseSpec { isi_len: l, ..spec }).unwrap();
    let mut worst: f64 = 0.0;
    for pattern in 0u32..(1 << (2 * l + 1)) {
        let a: Vec<f64> = (0..2 * l + 1).map(|i| if pattern >> i & 1 == 0 { 1.0 } else { -1.0 }).collect();
        worst = worst.max(-isi_budget(&a, &g, 1.0, l).unwrap().total);
    }
    assert!((worst - worst_case_isi(&spec, IsiMode::Conventional, l)).abs() < 1e-12);
}

#[test]
fn table_rows_grow_as_tau_shrinks() {
    let rows = isi_table(0.3, &TABLE_TAUS, None).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].conventional > w[0].conventional);
        assert!(w[1].ci > w[0].ci);
        assert!(w[1].component_magnitude < w[0].component_magnitude);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ci_never_exceeds_scaled_conventional(tau in 0.35f64..1.0, alpha in 0.05f64..0.95, l in 1usize..30) {
        let spec = PulseSpec::builder(alpha, tau).isi_len(200).build().unwrap();
        let zeta = compute_zeta(&IsiKernel::new(&spec));
        let ci = worst_case_isi(&spec, IsiMode::Ci, l);
        let conv = worst_case_isi(&spec, IsiMode::Conventional, l);
        prop_assert!(ci >= 0.0);
        prop_assert!(ci <= zeta * std::f64::consts::FRAC_1_SQRT_2 * conv + 1e-12);
    }

    #[test]
    fn conventional_worst_case_grows_with_window(tau in 0.35f64..1.0, l in 1usize..30) {
        let spec = PulseSpec::builder(0.3, tau).isi_len(200).build().unwrap();
        let mode = IsiMode::Conventional;
        prop_assert!(worst_case_isi(&spec, mode, l + 1) >= worst_case_isi(&spec, mode, l));
    }

    #[test]
    fn budget_parts_are_consistent(bits in proptest::collection::vec(any::<bool>(), 16), idx in 0usize..16) {
        let spec = PulseSpec::new(0.3, 0.5).unwrap();
        let g = IsiMatrix::new(16, &spec).unwrap();
        let a: Vec<f64> = bits.iter().map(|&b| if b { -1.0 } else { 1.0 }).collect();
        let b = isi_budget(&a, &g, 1.0, idx).unwrap();
        prop_assert!(b.constructive_sum >= 0.0 && b.destructive_sum <= 0.0);
        let y = g.mul(&a);
        prop_assert!((a[idx] * y[idx] - 1.0 - b.total).abs() < 1e-12);
    }
}
