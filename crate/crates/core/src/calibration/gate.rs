//! Gate composition: single CR halves and the echoed ZX gate.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::device::{DeviceConfig, LineDistortion};
use crate::dynamics::{
    apply_distortion, Carrier, DriveSettings, HilbertSpace, Noise, Port, PulseEnvelope, Schedule, Simulator, Tone,
    Waveform,
};
use crate::error::Result;
use crate::linalg::{c, expm_hermitian, kron, pauli, unitary_superop, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateKind {
    /// One CR half with the echo's first-half phase; nominally `ZX_{-π/4}`.
    HalfCr,
    /// `CR(θ+π) → X_π → CR(θ) → X_π`; nominally `ZX_{-π/2}`.
    EchoedZx,
}

impl GateKind {
    pub fn label(self) -> &'static str {
        match self {
            GateKind::HalfCr => "half-cr",
            GateKind::EchoedZx => "echoed-zx",
        }
    }
}

/// Control-qubit `X_π` echo pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct XPulse {
    /// Cosine-bell length, s.
    pub duration: f64,
    /// DRAG coefficient, s. `None` uses `-1/(2α)` of the control.
    pub drag: Option<f64>,
    /// Replace the pulse by an exact, instantaneous `X` on the control.
    pub ideal: bool,
}

impl Default for XPulse {
    fn default() -> Self {
        XPulse {
            duration: 20e-9,
            drag: None,
            ideal: false,
        }
    }
}

impl XPulse {
    pub fn ideal() -> Self {
        XPulse {
            ideal: true,
            ..XPulse::default()
        }
    }

    /// Time the pulse occupies in the gate, s.
    pub fn span(&self) -> f64 {
        if self.ideal {
            0.0
        } else {
            self.duration
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub kind: GateKind,
    pub drive: DriveSettings,
    pub x_pi: XPulse,
}

/// One element of a gate program.
#[derive(Debug, Clone)]
pub enum GateStep {
    Pulse(Schedule),
    /// Exact two-qubit unitary acting on the computational subspace.
    Ideal(CMat),
}

/// `exp(-iθ ZX/2)` on two qubits, control first.
pub fn zx_rotation(theta: f64) -> CMat {
    let zx = kron(&pauli(3), &pauli(1));
    expm_hermitian(&(zx * c(0.5, 0.0)), theta)
}

/// Build the echoed gate from calibrated settings.
pub fn compose_echo(drive: &DriveSettings) -> GateSpec {
    GateSpec {
        kind: GateKind::EchoedZx,
        drive: drive.clone(),
        x_pi: XPulse::default(),
    }
}

impl GateSpec {
    pub fn half_cr(drive: &DriveSettings) -> Self {
        GateSpec {
            kind: GateKind::HalfCr,
            drive: drive.clone(),
            x_pi: XPulse::default(),
        }
    }

    pub fn with_x_pulse(mut self, x_pi: XPulse) -> Self {
        self.x_pi = x_pi;
        self
    }

    /// Target unitary on the computational subspace.
    pub fn ideal_unitary(&self) -> CMat {
        match self.kind {
            GateKind::HalfCr => zx_rotation(-PI / 4.0),
            GateKind::EchoedZx => zx_rotation(-PI / 2.0),
        }
    }

    /// Nominal ZX rotation per gate, cycles.
    pub fn nominal_zx_cycles(&self) -> f64 {
        match self.kind {
            GateKind::HalfCr => -0.125,
            GateKind::EchoedZx => -0.25,
        }
    }

    pub fn duration(&self) -> f64 {
        let half = self.drive.half_duration();
        match self.kind {
            GateKind::HalfCr => half,
            GateKind::EchoedZx => 2.0 * half + 2.0 * self.x_pi.span(),
        }
    }

    /// One CR half. `negate` applies the π shift to both CR and cancellation tones.
    fn cr_half(&self, distortion: &LineDistortion, negate: bool) -> Schedule {
        let d = &self.drive;
        let shift = if negate { PI } else { 0.0 };
        let (ramp, plateau) = d.half_edges();
        let mut s = Schedule::empty(d.half_duration());
        let mut push = |port, amp: f64, phase: f64| {
            if amp > 0.0 {
                let env = PulseEnvelope::flat_top(amp, phase + shift, plateau, ramp);
                s.push(Tone {
                    port,
                    carrier: Carrier::Target,
                    start: 0.0,
                    waveform: apply_distortion(&env, distortion),
                });
            }
        };
        push(Port::P1, d.cr_amp, d.cr_phase);
        push(Port::P2, d.cancel_amp, d.cancel_phase);
        s
    }

    fn x_schedule(&self, alpha1: f64) -> Schedule {
        let drag = self.x_pi.drag.unwrap_or(-1.0 / (2.0 * TAU * alpha1));
        let mut s = Schedule::empty(self.x_pi.duration);
        s.push(Tone {
            port: Port::P1,
            carrier: Carrier::Control,
            start: 0.0,
            waveform: Waveform::Analytic(PulseEnvelope::cosine_bell(PI, 0.0, self.x_pi.duration, drag)),
        });
        s
    }

    /// Sequence of pulse schedules and ideal operations realising the gate on
    /// `cfg`. With physical echo pulses the whole echoed gate is one schedule.
    pub fn program(&self, cfg: &DeviceConfig) -> Vec<GateStep> {
        let distortion = &cfg.distortion;
        match self.kind {
            GateKind::HalfCr => vec![GateStep::Pulse(self.cr_half(distortion, true))],
            GateKind::EchoedZx => {
                let first = self.cr_half(distortion, true);
                let second = self.cr_half(distortion, false);
                if self.x_pi.ideal {
                    let x = ideal_control_x();
                    vec![
                        GateStep::Pulse(first),
                        GateStep::Ideal(x.clone()),
                        GateStep::Pulse(second),
                        GateStep::Ideal(x),
                    ]
                } else {
                    let x = self.x_schedule(cfg.q1.anharmonicity);
                    let mut s = first;
                    s.append(&x);
                    s.append(&second);
                    s.append(&x);
                    vec![GateStep::Pulse(s)]
                }
            }
        }
    }
}

/// `X ⊗ I`, with the `-i` of `exp(-iπX/2)` dropped.
pub fn ideal_control_x() -> CMat {
    kron(&pauli(1), &pauli(0))
}

/// Computational-frame propagator of a gate program (unitary part only).
pub fn program_unitary(sim: &Simulator, program: &[GateStep]) -> Result<CMat> {
    let space: &HilbertSpace = &sim.frame.space;
    let d = space.dimension();
    let mut u = CMat::identity(d, d);
    for step in program {
        let v = match step {
            GateStep::Pulse(s) => {
                let prop = crate::dynamics::Propagation::for_schedule(sim, s, Noise::Unitary);
                sim.unitary(s, &prop)?
            }
            GateStep::Ideal(m) => space.embed_unitary(m),
        };
        u = v * u;
    }
    Ok(u)
}

/// Computational-frame Liouville matrix of a gate program.
pub fn program_superop(sim: &Simulator, program: &[GateStep], noise: Noise) -> Result<CMat> {
    if noise == Noise::Unitary {
        return Ok(unitary_superop(&program_unitary(sim, program)?));
    }
    let space = &sim.frame.space;
    let d = space.dimension();
    let mut s = CMat::identity(d * d, d * d);
    for step in program {
        let v = match step {
            GateStep::Pulse(sch) => {
                let prop = crate::dynamics::Propagation::for_schedule(sim, sch, noise);
                sim.superop(sch, &prop)?
            }
            GateStep::Ideal(m) => unitary_superop(&space.embed_unitary(m)),
        };
        s = v * s;
    }
    Ok(s)
}
