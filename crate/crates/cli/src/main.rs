//! `ciftn`: BER sweeps, ISI tables, the worked example and spectral
//! efficiency from the command line.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ciftn_core::channel::Fidelity;
use ciftn_core::detect::DetectorKind;
use ciftn_core::isi_analysis::{isi_table, TABLE_TAUS};
use ciftn_core::pulse::{PulseSpec, DEFAULT_TAIL_TOLERANCE};
use ciftn_core::sim::{self, parse_sweep, SimConfig, StopRule};
use ciftn_core::{LdpcCode, Signaling};

#[derive(Debug, Parser)]
#[command(name = "ciftn", version, about = "CI-FTN link-level simulator", args_override_self = true)]
struct Cli {
    /// Flat key=value file; keys mirror the long flags, flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo BER sweep written as CSV.
    Ber(BerArgs),
    /// Worst-case ISI per tau for plain FTN and CI-FTN.
    IsiTable(IsiTableArgs),
    /// Noise-free six-symbol example, report on stdout.
    Trace(TraceArgs),
    /// Spectral efficiency of each signaling mode.
    Se(SeArgs),
}

#[derive(Debug, Args)]
struct BerArgs {
    #[arg(long, default_value = "ci_ftn")]
    mode: Signaling,
    /// pairwise, zf or mlse; defaults to pairwise for ci_ftn and zf otherwise.
    #[arg(long)]
    detector: Option<DetectorKind>,
    /// Acceleration factor; defaults to 1 for the Nyquist modes.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    /// ISI length L; defaults to the smallest L meeting the tail tolerance.
    #[arg(long)]
    isi_len: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOLERANCE)]
    tail_tol: f64,
    /// start:step:stop, a comma list, or one value (dB).
    #[arg(long, default_value = "0:1:10")]
    ebn0: String,
    /// Use the rate-1/2 LDPC code.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value = "false")]
    coded: bool,
    /// Parity-check matrix file replacing the built-in code.
    #[arg(long, value_name = "FILE")]
    ldpc_matrix: Option<PathBuf>,
    #[arg(long, default_value_t = ciftn_core::coding::DEFAULT_MAX_ITERATIONS)]
    ldpc_iters: usize,
    /// Run exactly this many frames per point instead of the error target.
    #[arg(long)]
    frames: Option<u64>,
    /// Channel bits per frame (uncoded only).
    #[arg(long, default_value_t = sim::DEFAULT_FRAME_LEN)]
    frame_len: usize,
    #[arg(long, default_value_t = sim::DEFAULT_MIN_ERRORS)]
    min_errors: u64,
    #[arg(long, default_value_t = sim::DEFAULT_MAX_BITS)]
    max_bits: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "matrix")]
    fidelity: Fidelity,
    /// Override the transmit normalisation.
    #[arg(long)]
    zeta: Option<f64>,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, value_name = "CSV")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IsiTableArgs {
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    /// Comma-separated list of tau values.
    #[arg(long)]
    tau: Option<String>,
    /// Comma-separated L values, one row per tau and L, instead of each tau's default.
    #[arg(long)]
    isi_len: Option<String>,
    /// Fixed transmit normalisation for the CI column instead of the tau-dependent one.
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long, value_name = "CSV")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TraceArgs {
    /// Also write the example as CSV.
    #[arg(long, value_name = "CSV")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SeArgs {
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    /// Comma-separated tau values for the FTN modes.
    #[arg(long, default_value = "0.6,0.5,0.45")]
    tau: String,
    #[arg(long, value_name = "CSV")]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number '{t}'")))
        .collect()
}

fn sim_config(args: &BerArgs) -> Result<SimConfig> {
    let tau = match (args.tau, args.mode.is_nyquist()) {
        (Some(t), _) => t,
        (None, true) => 1.0,
        (None, false) => bail!("--tau is required for {}", args.mode),
    };
    let mut builder = PulseSpec::builder(args.alpha, tau).tail_tolerance(args.tail_tol);
    if let Some(l) = args.isi_len {
        builder = builder.isi_len(l);
    }
    let detector = args.detector.unwrap_or(match args.mode {
        Signaling::CiFtn => DetectorKind::Pairwise,
        _ => DetectorKind::Zf,
    });
    let mut config = SimConfig::new(args.mode, detector, builder.build()?, parse_sweep(&args.ebn0)?);
    config.frame_len = args.frame_len;
    if args.coded {
        let code = match &args.ldpc_matrix {
            Some(p) => LdpcCode::from_file(p)?,
            None => LdpcCode::default_code(),
        };
        config = config.coded(code.with_max_iterations(args.ldpc_iters));
    }
    config.stop = StopRule { min_errors: args.min_errors, max_bits: args.max_bits, frames: args.frames };
    config.seed = args.seed;
    config.fidelity = args.fidelity;
    config.zeta = args.zeta;
    config.workers = args.workers;
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ber(args) => {
            let config = sim_config(&args)?;
            let points = sim::run_ber(&config)?;
            for p in &points {
                eprintln!(
                    "Eb/N0 {:>6} dB  BER {:.3e} ± {:.1e}  ({} errors / {} bits, {:.1?})",
                    p.ebn0_db, p.ber, p.ci_halfwidth, p.errors, p.bits, p.wall_time
                );
            }
            let mut w = output(&args.out)?;
            sim::write_ber_csv(&mut w, &points)?;
            w.flush()?;
        }
        Command::IsiTable(args) => {
            let taus = match &args.tau {
                Some(t) => parse_list(t)?,
                None => TABLE_TAUS.to_vec(),
            };
            let lens: Vec<Option<usize>> = match &args.isi_len {
                Some(text) => text
                    .split(',')
                    .map(|t| t.trim().parse().map(Some).with_context(|| format!("bad L '{t}'")))
                    .collect::<Result<_>>()?,
                None => vec![None],
            };
            let mut rows = Vec::new();
            for &tau in &taus {
                for &l in &lens {
                    rows.extend(isi_table(args.alpha, &[tau], l)?);
                }
            }
            if let Some(z) = args.zeta {
                rows = rows.into_iter().map(|r| r.with_zeta(z)).collect();
            }
            let mut w = output(&args.out)?;
            sim::write_isi_table_csv(&mut w, &rows)?;
            w.flush()?;
        }
        Command::Trace(args) => {
            let report = sim::trace_example()?;
            print!("{report}");
            if args.out.is_some() {
                let mut w = output(&args.out)?;
                w.write_all(report.to_csv().as_bytes())?;
                w.flush()?;
            }
        }
        Command::Se(args) => {
            let rows = sim::se_table(args.alpha, &parse_list(&args.tau)?);
            let mut w = output(&args.out)?;
            sim::write_se_csv(&mut w, &rows)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let argv = config::expand_args(std::env::args().collect())?;
    run(Cli::parse_from(argv))
}
