//! Constructive/destructive ISI decomposition and worst-case ISI for plain FTN
//! and CI-FTN.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pulse::{IsiKernel, IsiMatrix, PulseSpec};
use crate::txchain::compute_zeta;

/// ISI at one sample, split by sign relative to the sample's own symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsiBudget {
    pub symbol_index: usize,
    /// Sum of terms sharing the symbol's sign (`>= 0`).
    pub constructive_sum: f64,
    /// Sum of terms opposing it (`<= 0`).
    pub destructive_sum: f64,
    pub total: f64,
    /// `ζ·G_nn·|v_n|`, the undisturbed sample magnitude.
    pub reference: f64,
}

/// Splits `Σ_{m≠n} ζ G_nm v_m` at `index` (0-based) into same-sign and
/// opposite-sign parts, measured relative to the sign of `v_n`. `values` is one
/// real rail of transmit symbols before `ζ` scaling.
pub fn isi_budget(values: &[f64], g: &IsiMatrix, zeta: f64, index: usize) -> Result<IsiBudget> {
    if values.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), actual: values.len() });
    }
    let own = *values.get(index).ok_or(Error::IndexOutOfRange { index, len: values.len() })?;
    let sign = if own >= 0.0 { 1.0 } else { -1.0 };
    let (mut constructive, mut destructive) = (0.0, 0.0);
    for (m, &v) in values.iter().enumerate() {
        if m == index {
            continue;
        }
        let term = sign * zeta * g.get(index, m) * v;
        if term >= 0.0 {
            constructive += term;
        } else {
            destructive += term;
        }
    }
    Ok(IsiBudget {
        symbol_index: index,
        constructive_sum: constructive,
        destructive_sum: destructive,
        total: constructive + destructive,
        reference: zeta * g.get(index, index) * own.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IsiMode {
    Conventional,
    Ci,
}

impl fmt::Display for IsiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IsiMode::Conventional => "conventional",
            IsiMode::Ci => "ci",
        })
    }
}

impl FromStr for IsiMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conventional" => Ok(IsiMode::Conventional),
            "ci" => Ok(IsiMode::Ci),
            _ => Err(Error::ConfigInvalid(format!("unknown ISI mode '{s}'"))),
        }
    }
}

/// Aggregate kernel weight of each neighbouring pair seen by a component at
/// offset 0 whose partner sits at offset `partner` (`+1` or `-1`), restricted to
/// offsets within `[-L, L]`.
pub fn ci_pair_weights(kernel: &IsiKernel, isi_len: usize, partner: isize) -> Vec<f64> {
    let l = isi_len as isize;
    // Pair containing offset d: pairs start at even offsets relative to the lower member of the own pair.
    let own_lo = partner.min(0);
    let mut weights = Vec::new();
    let mut start = own_lo - 2 * ((l + 1) / 2 + 1);
    while start <= l {
        if start != own_lo {
            let w: f64 = [start, start + 1]
                .iter()
                .filter(|d| d.abs() <= l)
                .map(|&d| kernel.at(d))
                .sum();
            if [start, start + 1].iter().any(|d| d.abs() <= l) {
                weights.push(w);
            }
        }
        start += 2;
    }
    weights
}

/// Largest `-Σ s_j w_j` over all `s ∈ {±1}^J`. Each pair sign is free, so
/// every pair can be set against its own weight.
pub fn max_destructive(weights: &[f64]) -> f64 {
    weights.iter().map(|w| w.abs()).sum()
}

/// Worst-case ISI on one sample, in units of `√Eb`.
///
/// Conventional FTN: `Σ_{0<|i|<=L} |g(iτT)|` with every neighbour free.
/// CI-FTN: the component's partner term is constructive by construction and is
/// excluded; every other pair is constrained to a common sign and the worst
/// pattern sets every pair against its weight, then scaled by the component amplitude `ζ/√2`.
pub fn worst_case_isi(spec: &PulseSpec, mode: IsiMode, isi_len: usize) -> f64 {
    let wide = PulseSpec { isi_len: isi_len.max(1), ..*spec };
    let kernel = IsiKernel::new(&wide);
    match mode {
        IsiMode::Conventional => (1..=isi_len).map(|i| 2.0 * kernel.at(i as isize).abs()).sum(),
        IsiMode::Ci => {
            let zeta = compute_zeta(&kernel);
            let worst = [1, -1]
                .iter()
                .map(|&p| max_destructive(&ci_pair_weights(&kernel, isi_len, p)))
                .fold(0.0, f64::max);
            worst * zeta * std::f64::consts::FRAC_1_SQRT_2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsiTableRow {
    pub tau: f64,
    pub isi_len: usize,
    pub conventional: f64,
    pub ci: f64,
    /// CI component amplitude `ζ/√2`.
    pub component_magnitude: f64,
}

impl IsiTableRow {
    /// Worst-case CI ISI as a fraction of the component magnitude.
    pub fn ci_ratio(&self) -> f64 {
        self.ci / self.component_magnitude
    }

    /// Same row re-expressed for a fixed `ζ` instead of the `τ`-dependent one.
    pub fn with_zeta(self, zeta: f64) -> Self {
        let component_magnitude = zeta * std::f64::consts::FRAC_1_SQRT_2;
        Self { ci: self.ci * component_magnitude / self.component_magnitude, component_magnitude, ..self }
    }
}

/// One row per `τ`; `isi_len = None` uses each `τ`'s default `L`.
pub fn isi_table(alpha: f64, taus: &[f64], isi_len: Option<usize>) -> Result<Vec<IsiTableRow>> {
    taus.iter()
        .map(|&tau| {
            let spec = PulseSpec::new(alpha, tau)?;
            let l = isi_len.unwrap_or(spec.isi_len);
            let kernel = IsiKernel::new(&spec);
            Ok(IsiTableRow {
                tau,
                isi_len: l,
                conventional: worst_case_isi(&spec, IsiMode::Conventional, l),
                ci: worst_case_isi(&spec, IsiMode::Ci, l),
                component_magnitude: compute_zeta(&kernel) * std::f64::consts::FRAC_1_SQRT_2,
            })
        })
        .collect()
}

pub const TABLE_TAUS: [f64; 6] = [0.9, 0.8, 0.7, 0.6, 0.5, 0.4];
