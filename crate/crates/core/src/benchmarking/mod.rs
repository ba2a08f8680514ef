//! Gate quality: process tomography, randomized benchmarking and coherence limits.

pub mod channel;
pub mod clifford;
pub mod coherence;
pub mod qpt;
pub mod rb;
pub mod report;

pub use channel::{average_from_process, Channel};
pub use clifford::{sample_clifford, Clifford, CliffordGroup, Pauli, Tableau};
pub use coherence::coherence_limit;
pub use qpt::{channel_tomography, fidelity_from_chi, gate_channel, process_tomography, ChiMatrix};
pub use rb::{fit_decay, interleaved_fidelity, run_rb, run_rb_channel, write_rb_csv, DecayFit, Interleave, RbCurve, RbFidelity, RbMode, RbOptions};
pub use report::FidelityReport;
