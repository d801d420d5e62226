use std::fmt;

use num_complex::Complex64;

use crate::channel::apply_channel_matrix;
use crate::error::Result;
use crate::isi_analysis::{isi_budget, IsiBudget};
use crate::pulse::{IsiMatrix, PulseSpec};
use crate::txchain::{compute_zeta, Signaling};

/// `bits_per_symbol / (τ (1 + α))` in bits/s/Hz.
pub fn spectral_efficiency(tau: f64, alpha: f64, bits_per_symbol: usize) -> f64 {
    bits_per_symbol as f64 / (tau * (1.0 + alpha))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeRow {
    pub signaling: Signaling,
    pub tau: f64,
    pub alpha: f64,
    pub bits_per_symbol: usize,
    pub se: f64,
}

/// FTN modes at every `τ` in `taus`, Nyquist modes at `τ = 1`.
pub fn se_table(alpha: f64, taus: &[f64]) -> Vec<SeRow> {
    let row = |signaling: Signaling, tau: f64| SeRow {
        signaling,
        tau,
        alpha,
        bits_per_symbol: signaling.bits_per_symbol(),
        se: spectral_efficiency(tau, alpha, signaling.bits_per_symbol()),
    };
    let mut rows = Vec::new();
    for signaling in Signaling::ALL {
        if signaling.is_nyquist() {
            rows.push(row(signaling, 1.0));
        } else {
            rows.extend(taus.iter().map(|&t| row(signaling, t)));
        }
    }
    rows
}

/// Noise-free six-symbol example at `τ = 0.6`, `α = 0.3`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub spec: PulseSpec,
    pub a: Vec<f64>,
    /// Matched-filter outputs of plain FTN (real parts).
    pub conventional_y: Vec<f64>,
    pub conventional_budget: IsiBudget,
    pub zeta: f64,
    /// CI transmit symbols including `ζ`.
    pub ci_x: Vec<Complex64>,
    pub ci_y: Vec<Complex64>,
    /// ISI on the in-phase rail of the third CI sample.
    pub ci_budget: IsiBudget,
}

impl TraceReport {
    pub fn component_magnitude(&self) -> f64 {
        self.zeta * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Rows of `section,index,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("section,index,re,im\n");
        let mut push = |section: &str, i: usize, v: Complex64| {
            s.push_str(&format!("{section},{i},{:.6},{:.6}\n", v.re, v.im));
        };
        for (i, &v) in self.a.iter().enumerate() {
            push("a", i, v.into());
        }
        for (i, &v) in self.conventional_y.iter().enumerate() {
            push("conventional_y", i, v.into());
        }
        for (i, &v) in self.ci_x.iter().enumerate() {
            push("ci_x", i, v);
        }
        for (i, &v) in self.ci_y.iter().enumerate() {
            push("ci_y", i, v);
        }
        push("zeta", 0, self.zeta.into());
        push("component_magnitude", 0, self.component_magnitude().into());
        for (name, b) in [("conventional_isi", &self.conventional_budget), ("ci_isi", &self.ci_budget)] {
            push(&format!("{name}_constructive"), b.symbol_index, b.constructive_sum.into());
            push(&format!("{name}_destructive"), b.symbol_index, b.destructive_sum.into());
            push(&format!("{name}_total"), b.symbol_index, b.total.into());
        }
        s
    }
}

fn fmt_real(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:+.4}")).collect::<Vec<_>>().join(" ")
}

fn fmt_complex(v: &[Complex64]) -> String {
    v.iter().map(|x| format!("{:+.4}{:+.4}j", x.re, x.im)).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for TraceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let budget = |f: &mut fmt::Formatter<'_>, b: &IsiBudget| {
            writeln!(
                f,
                "  symbol {}: constructive {:+.4}, destructive {:+.4}, total {:+.4} (signal {:.4})",
                b.symbol_index + 1,
                b.constructive_sum,
                b.destructive_sum,
                b.total,
                b.reference
            )
        };
        writeln!(f, "tau = {}, alpha = {}, L = {}", self.spec.tau, self.spec.alpha, self.spec.isi_len)?;
        writeln!(f, "BPSK symbols a:      {}", fmt_real(&self.a))?;
        writeln!(f, "\nconventional FTN")?;
        writeln!(f, "  Re(y) = G a:       {}", fmt_real(&self.conventional_y))?;
        budget(f, &self.conventional_budget)?;
        writeln!(f, "\nCI-FTN")?;
        writeln!(f, "  zeta = {:.4}, component magnitude = {:.4}", self.zeta, self.component_magnitude())?;
        writeln!(f, "  x = {}", fmt_complex(&self.ci_x))?;
        writeln!(f, "  y = {}", fmt_complex(&self.ci_y))?;
        budget(f, &self.ci_budget)
    }
}

pub fn trace_example() -> Result<TraceReport> {
    let spec = PulseSpec::new(0.3, 0.6)?;
    let a = vec![1.0, -1.0, 1.0, -1.0, 1.0, 1.0];
    let g = IsiMatrix::new(a.len(), &spec)?;
    let conventional_y: Vec<f64> = g.mul(&a);
    let conventional_budget = isi_budget(&a, &g, 1.0, 2)?;

    let zeta = compute_zeta(g.kernel());
    let x = Signaling::CiFtn.modulate(&a)?;
    let ci_y = apply_channel_matrix(&x, &g, zeta, 0.0, 0)?.y;
    let rail: Vec<f64> = x.iter().map(|v| v.re).collect();
    let ci_budget = isi_budget(&rail, &g, zeta, 2)?;
    Ok(TraceReport {
        spec,
        a,
        conventional_y,
        conventional_budget,
        zeta,
        ci_x: x.iter().map(|&v| v * zeta).collect(),
        ci_y,
        ci_budget,
    })
}
