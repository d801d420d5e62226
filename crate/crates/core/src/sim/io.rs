use std::io::{self, Write};

use super::report::SeRow;
use super::stats::BerPoint;
use crate::error::{Error, Result};
use crate::isi_analysis::IsiTableRow;

// Grid values are snapped to this many decimals so `0:0.1:1` prints cleanly.
const SWEEP_DECIMALS: f64 = 1e9;

/// Parses `start:step:stop` (inclusive), a comma list, or a single value.
pub fn parse_sweep(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::ConfigInvalid(format!("bad Eb/N0 sweep '{text}'"));
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    let parts: Vec<&str> = text.split(':').collect();
    match parts[..] {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step <= 0.0 || stop < start {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 10_000 {
                return Err(bad());
            }
            Ok((0..count)
                .map(|i| ((start + i as f64 * step) * SWEEP_DECIMALS).round() / SWEEP_DECIMALS)
                .collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

/// Flat `key = value` lines; `#` starts a comment, blank lines are ignored.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.split('#').next().unwrap_or("").trim();
            (!line.is_empty()).then_some((i + 1, line))
        })
        .map(|(lineno, line)| {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::ConfigInvalid(format!("line {lineno}: expected key=value")))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::ConfigInvalid(format!("line {lineno}: empty key")));
            }
            Ok((k.to_string(), v.trim().to_string()))
        })
        .collect()
}

pub fn write_ber_csv<W: Write>(mut w: W, points: &[BerPoint]) -> io::Result<()> {
    writeln!(w, "ebn0_db,bits,errors,ber,ci_halfwidth")?;
    for p in points {
        writeln!(w, "{},{},{},{:.6e},{:.6e}", p.ebn0_db, p.bits, p.errors, p.ber, p.ci_halfwidth)?;
    }
    Ok(())
}

pub fn write_isi_table_csv<W: Write>(mut w: W, rows: &[IsiTableRow]) -> io::Result<()> {
    writeln!(w, "tau,isi_len,conventional,ci,component_magnitude,ci_ratio")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:.4},{:.4},{:.4},{:.4}",
            r.tau,
            r.isi_len,
            r.conventional,
            r.ci,
            r.component_magnitude,
            r.ci_ratio()
        )?;
    }
    Ok(())
}

pub fn write_se_csv<W: Write>(mut w: W, rows: &[SeRow]) -> io::Result<()> {
    writeln!(w, "mode,tau,alpha,bits_per_symbol,se")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{:.4}", r.signaling, r.tau, r.alpha, r.bits_per_symbol, r.se)?;
    }
    Ok(())
}
