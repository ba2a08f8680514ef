//! Piecewise-constant time stepping with optional Lindblad decoherence.
//!
//! Within each step the Hamiltonian is frozen at the step midpoint and the
//! exact exponential applied. Schedule intervals on which the drive-frame
//! Hamiltonian is constant are exponentiated in one piece. Decoherence is
//! added by Lie splitting: after every unitary step the exact dissipator
//! channel for that step length is applied.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::device::DeviceConfig;
use crate::dynamics::frame::{DressedFrame, Frame};
use crate::dynamics::pulse::{Carrier, Schedule};
use crate::dynamics::state::QuantumState;
use crate::error::{Error, Result};
use crate::linalg::{c, expm_hermitian, kron, CMat, C64};

/// Largest phase advance, in cycles, the fastest frequency scale may make per step.
pub const MAX_CYCLES_PER_STEP: f64 = 0.05;
/// Default resolution used by [`Propagation::for_schedule`].
pub const DEFAULT_CYCLES_PER_STEP: f64 = 0.025;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Noise {
    Unitary,
    Lindblad,
}

/// Frame the equations of motion are integrated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameChoice {
    /// Doubly rotating with the CR carrier throughout.
    Drive,
    /// Each transmon at its own frequency throughout.
    Qubit,
    /// Per interval: qubit frame when only control-carrier tones play, drive frame otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Propagation {
    pub frame: FrameChoice,
    pub step_size: f64,
    pub noise: Noise,
}

impl Propagation {
    /// Step size resolving the fastest scale of `sim` and `schedule` at the default resolution.
    pub fn for_schedule(sim: &Simulator, schedule: &Schedule, noise: Noise) -> Self {
        Propagation {
            frame: FrameChoice::Auto,
            step_size: DEFAULT_CYCLES_PER_STEP / sim.fastest_scale(schedule),
            noise,
        }
    }

    pub fn with_step(mut self, step_size: f64) -> Self {
        self.step_size = step_size;
        self
    }

    pub fn with_frame(mut self, frame: FrameChoice) -> Self {
        self.frame = frame;
        self
    }

    fn check(&self, sim: &Simulator, schedule: &Schedule) -> Result<()> {
        let cycles = self.step_size * sim.fastest_scale(schedule);
        if !(self.step_size > 0.0) || cycles > MAX_CYCLES_PER_STEP * (1.0 + 1e-9) {
            return Err(Error::StepTooLarge {
                step: self.step_size,
                cycles,
            });
        }
        if !(schedule.duration >= 0.0) {
            return Err(Error::Frame("schedule duration must be >= 0".into()));
        }
        Ok(())
    }
}

/// Ground-truth simulator of the driven transmon pair.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub frame: DressedFrame,
    /// `(1/T1, pure dephasing rate)` per transmon.
    rates: [(f64, f64); 2],
}

/// One propagation step in the drive frame: `unitary` applied `repeat` times,
/// each lasting `h`.
struct Step {
    unitary: CMat,
    h: f64,
    repeat: usize,
}

impl Simulator {
    pub fn new(cfg: &DeviceConfig) -> Result<Self> {
        let frame = DressedFrame::new(cfg)?;
        Ok(Simulator {
            frame,
            rates: [
                (cfg.q1.relaxation_rate(), cfg.q1.dephasing_rate()),
                (cfg.q2.relaxation_rate(), cfg.q2.dephasing_rate()),
            ],
        })
    }

    pub fn dimension(&self) -> usize {
        self.frame.dimension()
    }

    /// Fastest frequency scale, Hz: detuning, anharmonicities or peak drive.
    pub fn fastest_scale(&self, schedule: &Schedule) -> f64 {
        let p = &self.frame.params;
        [self.frame.delta.abs() / TAU, p.alpha1.abs() / TAU, p.alpha2.abs() / TAU, schedule.peak_amplitude()]
            .into_iter()
            .fold(0.0, f64::max)
    }

    fn interval_frame(&self, schedule: &Schedule, t0: f64, t1: f64, choice: FrameChoice) -> Frame {
        match choice {
            FrameChoice::Drive => Frame::Drive,
            FrameChoice::Qubit => Frame::Qubit,
            FrameChoice::Auto => {
                let active = schedule.tones.iter().filter(|t| t.active_on(t0, t1));
                let (mut control, mut target) = (false, false);
                for tone in active {
                    match tone.carrier {
                        Carrier::Control => control = true,
                        Carrier::Target => target = true,
                    }
                }
                if control && !target {
                    Frame::Qubit
                } else {
                    Frame::Drive
                }
            }
        }
    }

    fn is_static(&self, schedule: &Schedule, t0: f64, t1: f64, frame: Frame) -> bool {
        frame == Frame::Drive
            && schedule.tones.iter().filter(|t| t.active_on(t0, t1)).all(|t| {
                t.carrier == Carrier::Target && t.waveform.is_constant_on(t0 - t.start, t1 - t.start)
            })
    }

    /// Walks the schedule and hands each drive-frame step to `visit`.
    fn walk<F: FnMut(Step)>(&self, schedule: &Schedule, prop: &Propagation, merge_static: bool, mut visit: F) -> Result<()> {
        prop.check(self, schedule)?;
        let pts = schedule.breakpoints();
        for w in pts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let len = t1 - t0;
            if len <= 0.0 {
                continue;
            }
            let frame = self.interval_frame(schedule, t0, t1, prop.frame);
            let n = ((len / prop.step_size).ceil() as usize).max(1);
            let h = len / n as f64;
            if self.is_static(schedule, t0, t1, frame) {
                let ham = self.frame.hamiltonian(schedule, 0.5 * (t0 + t1), Frame::Drive);
                if merge_static {
                    visit(Step {
                        unitary: expm_hermitian(&ham, len),
                        h: len,
                        repeat: 1,
                    });
                } else {
                    visit(Step {
                        unitary: expm_hermitian(&ham, h),
                        h,
                        repeat: n,
                    });
                }
                continue;
            }
            for k in 0..n {
                let ta = t0 + k as f64 * h;
                let tb = ta + h;
                let ham = self.frame.hamiltonian(schedule, ta + 0.5 * h, frame);
                let mut u = expm_hermitian(&ham, h);
                if frame == Frame::Qubit {
                    // U_drive = R(tb)† U_qubit R(ta), R diagonal.
                    let ra = self.frame.frame_rotation(ta);
                    let rb = self.frame.frame_rotation(tb);
                    let d = u.nrows();
                    for i in 0..d {
                        for j in 0..d {
                            u[(i, j)] *= rb[i].conj() * ra[j];
                        }
                    }
                }
                visit(Step {
                    unitary: u,
                    h,
                    repeat: 1,
                });
            }
        }
        Ok(())
    }

    /// Drive-frame propagator over the schedule window (no decoherence).
    pub fn drive_frame_unitary(&self, schedule: &Schedule, prop: &Propagation) -> Result<CMat> {
        let d = self.dimension();
        let mut u = CMat::identity(d, d);
        self.walk(schedule, prop, true, |step| {
            for _ in 0..step.repeat {
                u = &step.unitary * &u;
            }
        })?;
        Ok(u)
    }

    /// Propagator in the computational frame, ignoring decoherence.
    pub fn unitary(&self, schedule: &Schedule, prop: &Propagation) -> Result<CMat> {
        let us = self.drive_frame_unitary(schedule, prop)?;
        Ok(self.frame.to_computational(schedule.duration) * us * &self.frame.w)
    }

    fn dissipator(&self, q: usize, h: f64) -> CMat {
        let l = self.frame.space.levels();
        let (g1, gphi) = self.rates[q];
        let a = self.frame.space.lowering();
        let n = a.adjoint() * &a;
        let id = CMat::identity(l, l);
        let mut gen = CMat::zeros(l * l, l * l);
        for (op, rate) in [(a, g1), (n, 2.0 * gphi)] {
            if rate == 0.0 {
                continue;
            }
            let op = op * c(rate.sqrt(), 0.0);
            let ld = op.adjoint() * &op;
            gen += kron(&op, &op.map(|z| z.conj()));
            gen -= kron(&ld, &id) * c(0.5, 0.0);
            gen -= kron(&id, &ld.transpose()) * c(0.5, 0.0);
        }
        (gen * c(h, 0.0)).exp()
    }

    fn apply_dissipation(&self, rho: &mut CMat, maps: &[CMat; 2]) {
        let l = self.frame.space.levels();
        let idx = |a1: usize, a2: usize| a1 * l + a2;
        let mut block = vec![C64::new(0.0, 0.0); l * l];
        // control
        for a2 in 0..l {
            for b2 in 0..l {
                for a1 in 0..l {
                    for b1 in 0..l {
                        block[a1 * l + b1] = rho[(idx(a1, a2), idx(b1, b2))];
                    }
                }
                for a1 in 0..l {
                    for b1 in 0..l {
                        let row = a1 * l + b1;
                        let mut acc = C64::new(0.0, 0.0);
                        for (col, v) in block.iter().enumerate() {
                            acc += maps[0][(row, col)] * v;
                        }
                        rho[(idx(a1, a2), idx(b1, b2))] = acc;
                    }
                }
            }
        }
        // target
        for a1 in 0..l {
            for b1 in 0..l {
                for a2 in 0..l {
                    for b2 in 0..l {
                        block[a2 * l + b2] = rho[(idx(a1, a2), idx(b1, b2))];
                    }
                }
                for a2 in 0..l {
                    for b2 in 0..l {
                        let row = a2 * l + b2;
                        let mut acc = C64::new(0.0, 0.0);
                        for (col, v) in block.iter().enumerate() {
                            acc += maps[1][(row, col)] * v;
                        }
                        rho[(idx(a1, a2), idx(b1, b2))] = acc;
                    }
                }
            }
        }
    }

    /// Evolve drive-frame density matrices in place.
    fn evolve_drive_frame(&self, rhos: &mut [CMat], schedule: &Schedule, prop: &Propagation) -> Result<()> {
        let lindblad = prop.noise == Noise::Lindblad;
        let mut cache: Option<(f64, [CMat; 2])> = None;
        self.walk(schedule, prop, !lindblad, |step| {
            let ud = step.unitary.adjoint();
            if lindblad && cache.as_ref().map(|(h, _)| *h != step.h).unwrap_or(true) {
                cache = Some((step.h, [self.dissipator(0, step.h), self.dissipator(1, step.h)]));
            }
            for _ in 0..step.repeat {
                for rho in rhos.iter_mut() {
                    *rho = &step.unitary * &*rho * &ud;
                    if let Some((_, maps)) = &cache {
                        if lindblad {
                            self.apply_dissipation(rho, maps);
                        }
                    }
                }
            }
        })
    }

    /// Evolve a computational-frame state through the schedule.
    pub fn evolve(&self, schedule: &Schedule, state: &QuantumState, prop: &Propagation) -> Result<QuantumState> {
        let w = &self.frame.w;
        let mut rhos = [w * state.rho() * w.adjoint()];
        self.evolve_drive_frame(&mut rhos, schedule, prop)?;
        let v = self.frame.to_computational(schedule.duration);
        Ok(QuantumState::from_matrix_unchecked(&v * &rhos[0] * v.adjoint()))
    }

    /// Computational-frame Liouville matrix (row-major vectorisation) of the schedule.
    pub fn superop(&self, schedule: &Schedule, prop: &Propagation) -> Result<CMat> {
        let d = self.dimension();
        if prop.noise == Noise::Unitary {
            let u = self.unitary(schedule, prop)?;
            return Ok(crate::linalg::unitary_superop(&u));
        }
        let w = &self.frame.w;
        let mut basis: Vec<CMat> = (0..d * d)
            .map(|k| {
                let mut e = CMat::zeros(d, d);
                e[(k / d, k % d)] = c(1.0, 0.0);
                w * e * w.adjoint()
            })
            .collect();
        self.evolve_drive_frame(&mut basis, schedule, prop)?;
        let v = self.frame.to_computational(schedule.duration);
        let mut s = CMat::zeros(d * d, d * d);
        for (k, rho) in basis.iter().enumerate() {
            let out = &v * rho * v.adjoint();
            for i in 0..d {
                for j in 0..d {
                    s[(i * d + j, k)] = out[(i, j)];
                }
            }
        }
        Ok(s)
    }
}

/// Evolve `initial` under `schedule` on the device `cfg`.
pub fn propagate(
    cfg: &DeviceConfig,
    schedule: &Schedule,
    initial: &QuantumState,
    prop: &Propagation,
) -> Result<QuantumState> {
    Simulator::new(cfg)?.evolve(schedule, initial, prop)
}
