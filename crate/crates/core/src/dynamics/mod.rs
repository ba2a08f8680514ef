//! Transmon-pair dynamics: Hilbert space, pulses, frames and propagation.

pub mod frame;
pub mod hilbert;
pub mod propagate;
pub mod pulse;
pub mod state;

pub use frame::{build_hamiltonian, DressedFrame, Frame};
pub use hilbert::HilbertSpace;
pub use propagate::{propagate, FrameChoice, Noise, Propagation, Simulator};
pub use pulse::{
    apply_distortion, Carrier, DriveSettings, Port, PulseEnvelope, Schedule, Segment, Shape, Tone, Waveform,
};
pub use state::{measure_pauli, Axis, PauliReading, QuantumState};
