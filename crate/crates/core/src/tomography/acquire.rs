//! Simulated tomography experiments on the target qubit.

use rand_chacha::ChaCha8Rng;

use crate::calibration::gate::{program_superop, program_unitary, GateSpec};
use crate::device::{DeviceConfig, LineDistortion};
use crate::dynamics::{
    apply_distortion, measure_pauli, Axis, Carrier, DriveSettings, Noise, Port, Propagation, PulseEnvelope,
    QuantumState, Schedule, Simulator, Tone,
};
use crate::error::{Error, Result};
use crate::linalg::{apply_superop, c, CMat};
use crate::tomography::shots::apply_shot_noise;
use crate::tomography::trajectory::{BlochTrajectory, ControlPrep, TargetPrep, TickUnit};

#[derive(Debug, Clone, PartialEq)]
pub enum AcquireMode {
    /// One CR (plus cancellation) pulse per tick; ticks are plateau lengths in seconds.
    Continuous,
    /// The gate applied `n` times; ticks are repetition counts.
    Repeated(GateSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquireOptions {
    pub target_prep: TargetPrep,
    pub noise: Noise,
    /// Shots per expectation value; `None` records exact expectations.
    pub shots: Option<u32>,
}

impl Default for AcquireOptions {
    fn default() -> Self {
        AcquireOptions {
            target_prep: TargetPrep::Zero,
            noise: Noise::Unitary,
            shots: None,
        }
    }
}

/// CR and cancellation tones with the given plateau, as used in continuous tomography.
pub fn continuous_schedule(drive: &DriveSettings, plateau: f64, distortion: &LineDistortion) -> Schedule {
    let env_len = plateau + 2.0 * drive.ramp_time;
    let mut s = Schedule::empty(env_len);
    if env_len <= 0.0 {
        return s;
    }
    for (port, amp, phase) in [
        (Port::P1, drive.cr_amp, drive.cr_phase),
        (Port::P2, drive.cancel_amp, drive.cancel_phase),
    ] {
        if amp > 0.0 {
            let env = PulseEnvelope::flat_top(amp, phase, plateau, drive.ramp_time);
            s.push(Tone {
                port,
                carrier: Carrier::Target,
                start: 0.0,
                waveform: apply_distortion(&env, distortion),
            });
        }
    }
    s
}

fn initial_state(sim: &Simulator, control: ControlPrep, target: TargetPrep) -> QuantumState {
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ctrl = match control {
        ControlPrep::Zero => [one, zero],
        ControlPrep::One => [zero, one],
    };
    let tgt = match target {
        TargetPrep::Zero => [one, zero],
        TargetPrep::Plus => [h, h],
    };
    QuantumState::product(&sim.frame.space, ctrl, tgt).expect("normalised product state")
}

fn check_ticks(ticks: &[f64], unit: TickUnit) -> Result<()> {
    if ticks.is_empty() {
        return Err(Error::config("ticks", "at least one tick required"));
    }
    if ticks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("ticks", "must be strictly increasing"));
    }
    if ticks[0] < 0.0 {
        return Err(Error::config("ticks", "must be >= 0"));
    }
    if unit == TickUnit::Gates && ticks.iter().any(|t| t.fract() != 0.0) {
        return Err(Error::config("ticks", "repetition counts must be integers"));
    }
    Ok(())
}

struct Recorder<'a> {
    sim: &'a Simulator,
    shots: Option<u32>,
    rng: Option<&'a mut ChaCha8Rng>,
    xyz: [[Vec<f64>; 3]; 2],
    leakage: [Vec<f64>; 2],
}

impl Recorder<'_> {
    fn record(&mut self, prep: usize, state: &QuantumState) {
        let space = &self.sim.frame.space;
        for axis in Axis::ALL {
            let r = measure_pauli(space, state, 1, axis);
            let e = match (self.shots, self.rng.as_deref_mut()) {
                (Some(n), Some(rng)) => apply_shot_noise(r.expectation, n, rng),
                _ => r.expectation,
            };
            self.xyz[prep][axis.index()].push(e);
        }
        self.leakage[prep].push(state.leakage(space));
    }
}

/// Records target trajectories for both control preparations under identical drive.
pub fn acquire_pair(
    sim: &Simulator,
    cfg: &DeviceConfig,
    drive: &DriveSettings,
    ticks: &[f64],
    mode: &AcquireMode,
    opts: &AcquireOptions,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<[BlochTrajectory; 2]> {
    let unit = match mode {
        AcquireMode::Continuous => TickUnit::Seconds,
        AcquireMode::Repeated(_) => TickUnit::Gates,
    };
    check_ticks(ticks, unit)?;
    if opts.shots.is_some() && rng.is_none() {
        return Err(Error::config("shots", "shot noise requires a random generator"));
    }
    let preps = [ControlPrep::Zero, ControlPrep::One];
    let init: Vec<QuantumState> = preps.iter().map(|p| initial_state(sim, *p, opts.target_prep)).collect();
    let mut rec = Recorder {
        sim,
        shots: opts.shots,
        rng,
        xyz: Default::default(),
        leakage: Default::default(),
    };

    match mode {
        AcquireMode::Continuous => {
            for &plateau in ticks {
                let sched = continuous_schedule(drive, plateau, &cfg.distortion);
                let prop = Propagation::for_schedule(sim, &sched, opts.noise);
                match opts.noise {
                    Noise::Unitary => {
                        let u = sim.unitary(&sched, &prop)?;
                        for (k, s) in init.iter().enumerate() {
                            let rho = &u * s.rho() * u.adjoint();
                            rec.record(k, &QuantumState::from_matrix_unchecked(rho));
                        }
                    }
                    Noise::Lindblad => {
                        for (k, s) in init.iter().enumerate() {
                            rec.record(k, &sim.evolve(&sched, s, &prop)?);
                        }
                    }
                }
            }
        }
        AcquireMode::Repeated(gate) => {
            let mut gate = gate.clone();
            gate.drive = drive.clone();
            let program = gate.program(cfg);
            enum Map {
                U(CMat),
                S(CMat),
            }
            let map = match opts.noise {
                Noise::Unitary => Map::U(program_unitary(sim, &program)?),
                Noise::Lindblad => Map::S(program_superop(sim, &program, Noise::Lindblad)?),
            };
            let max = *ticks.last().unwrap() as usize;
            let mut states: Vec<CMat> = init.iter().map(|s| s.rho().clone()).collect();
            let mut next = 0;
            for n in 0..=max {
                if n > 0 {
                    for rho in states.iter_mut() {
                        *rho = match &map {
                            Map::U(u) => u * &*rho * u.adjoint(),
                            Map::S(s) => apply_superop(s, rho),
                        };
                    }
                }
                if next < ticks.len() && ticks[next] as usize == n {
                    for (k, rho) in states.iter().enumerate() {
                        rec.record(k, &QuantumState::from_matrix_unchecked(rho.clone()));
                    }
                    next += 1;
                }
            }
        }
    }

    let Recorder { xyz, leakage, .. } = rec;
    let [xyz0, xyz1] = xyz;
    let [l0, l1] = leakage;
    Ok([
        BlochTrajectory::new(ticks.to_vec(), unit, xyz0, l0, ControlPrep::Zero)?,
        BlochTrajectory::new(ticks.to_vec(), unit, xyz1, l1, ControlPrep::One)?,
    ])
}

/// Target trajectory for one control preparation, exact expectations.
pub fn acquire_trajectory(
    cfg: &DeviceConfig,
    drive: &DriveSettings,
    control_prep: ControlPrep,
    ticks: &[f64],
    mode: &AcquireMode,
) -> Result<BlochTrajectory> {
    cfg.validate()?;
    let sim = Simulator::new(cfg)?;
    let [t0, t1] = acquire_pair(&sim, cfg, drive, ticks, mode, &AcquireOptions::default(), None)?;
    Ok(match control_prep {
        ControlPrep::Zero => t0,
        ControlPrep::One => t1,
    })
}

