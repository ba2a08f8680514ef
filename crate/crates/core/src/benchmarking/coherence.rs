//! Decoherence-limited fidelity of an idle of given length.

use crate::benchmarking::channel::Channel;
use crate::device::DeviceConfig;
use crate::dynamics::{Noise, Propagation, Schedule, Simulator};
use crate::error::Result;
use crate::linalg::{identity, unitary_superop};

/// Average gate fidelity of a Lindblad idle of `duration` seconds with the
/// coherent static evolution divided out.
pub fn coherence_limit(cfg: &DeviceConfig, duration: f64) -> Result<f64> {
    let sim = Simulator::new(cfg)?;
    let idle = Schedule::empty(duration);
    let noisy = sim.superop(&idle, &Propagation::for_schedule(&sim, &idle, Noise::Lindblad))?;
    let u = sim.unitary(&idle, &Propagation::for_schedule(&sim, &idle, Noise::Unitary))?;
    let undo = unitary_superop(&u.adjoint());
    let ch = Channel::new(undo * noisy, cfg.levels)?;
    Ok(ch.average_gate_fidelity(&identity(4)))
}
