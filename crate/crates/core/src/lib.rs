//! Link-level simulation of coordinate-interleaved faster-than-Nyquist
//! (CI-FTN) signaling with root-raised-cosine pulses.
//!
//! Time is measured in units of the Nyquist symbol period `T`. The pipeline is
//! bits → BPSK → (rotation, coordinate interleaving) → `ζ`-scaled FTN
//! transmission → matched filter → detector → optional LDPC decoding.

pub mod channel;
pub mod coding;
pub mod detect;
pub mod error;
pub mod isi_analysis;
pub mod linalg;
pub mod pulse;
pub mod sim;
pub mod txchain;

pub use channel::{apply_channel_matrix, apply_channel_waveform, Fidelity, RxFrame};
pub use coding::{DecodeResult, LdpcCode};
pub use detect::{Detector, DetectorKind, DetectorOutput};
pub use error::{Error, Result};
pub use isi_analysis::{isi_budget, isi_table, worst_case_isi, IsiBudget, IsiMode, IsiTableRow};
pub use pulse::{build_isi_matrix, IsiKernel, IsiMatrix, PulseSpec};
pub use sim::{run_ber, spectral_efficiency, trace_example, BerPoint, SimConfig, StopRule};
pub use txchain::{Signaling, SymbolFrame};
pub use num_complex::Complex64;
