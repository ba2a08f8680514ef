//! Cross-talk cancellation, echo composition and transient correction.

pub mod cancel;
pub mod gate;
pub mod session;
pub mod simulated;
pub mod sweep;
pub mod transients;

pub use cancel::{cancel_crosstalk, extract_classical_crosstalk};
pub use gate::{compose_echo, zx_rotation, GateKind, GateSpec, GateStep, XPulse};
pub use session::{CalibrationSession, CalibrationSettings, Record};
pub use simulated::SimulatedDevice;
pub use sweep::{linear_fit, sweep_parameter, LinearFit, SweepParameter, SweepResult};
pub use transients::correct_transients;
