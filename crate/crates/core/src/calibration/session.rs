use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::calibration::gate::{GateSpec, XPulse};
use crate::calibration::simulated::SimulatedDevice;
use crate::calibration::sweep::{SweepParameter, SweepResult};
use crate::dynamics::DriveSettings;
use crate::error::{Error, Result};
use crate::tomography::EffectiveHamiltonian;

/// Knobs of the calibration procedures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSettings {
    /// Relative convergence tolerance of the cancellation loop.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Points per continuous tomography run.
    pub continuous_points: usize,
    /// Continuous tomography span in periods of the target rate.
    pub continuous_periods: f64,
    /// Largest repetition count in repeated-gate tomography.
    pub max_repetitions: usize,
    pub sweep_points: usize,
    /// Half-width of the global-phase sweep, rad.
    pub phase_width: f64,
    /// Relative half-width of amplitude sweeps.
    pub amplitude_width: f64,
    /// Smallest cancellation-quadrature half-width, as a fraction of the target rate.
    pub cancel_floor: f64,
    /// Times a sweep whose crossing lies outside its window is re-centred on
    /// the nearer edge and repeated.
    pub max_recentres: usize,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        CalibrationSettings {
            tolerance: 0.02,
            max_iterations: 12,
            continuous_points: 48,
            continuous_periods: 2.0,
            max_repetitions: 16,
            sweep_points: 9,
            phase_width: 0.1,
            amplitude_width: 0.05,
            cancel_floor: 0.05,
            max_recentres: 4,
        }
    }
}

impl CalibrationSettings {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.tolerance > 0.0 && self.tolerance < 1.0, "calibration.tolerance", "must be in (0, 1)"),
            (self.max_iterations >= 1, "calibration.max_iterations", "must be >= 1"),
            (self.continuous_points >= 8, "calibration.continuous_points", "must be >= 8"),
            (self.continuous_periods >= 0.5, "calibration.continuous_periods", "must be >= 0.5"),
            (self.max_repetitions >= 8, "calibration.max_repetitions", "must be >= 8"),
            (self.sweep_points >= 3, "calibration.sweep_points", "must be >= 3"),
            (
                self.phase_width > 0.0 && self.phase_width <= 0.2,
                "calibration.phase_width",
                "must be in (0, 0.2] rad",
            ),
            (
                self.amplitude_width > 0.0 && self.amplitude_width <= 0.1,
                "calibration.amplitude_width",
                "must be in (0, 0.1]",
            ),
            (self.cancel_floor > 0.0, "calibration.cancel_floor", "must be > 0"),
        ];
        for (ok, field, reason) in checks {
            if !ok {
                return Err(Error::config(field, reason));
            }
        }
        Ok(())
    }
}

/// One audit-log entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record {
    Tomography {
        stage: String,
        iteration: usize,
        drive: DriveSettings,
        hamiltonian: EffectiveHamiltonian,
    },
    Sweep(SweepResult),
    Update {
        stage: String,
        parameter: String,
        from: DriveSettings,
        to: DriveSettings,
    },
    Note {
        stage: String,
        message: String,
    },
}

/// State of a calibration run. Drive changes are always accompanied by a
/// history record.
#[derive(Debug, Clone)]
pub struct CalibrationSession {
    device: SimulatedDevice,
    drive: DriveSettings,
    /// `Ω_CR^trgt/2π`, Hz.
    pub target_rate: f64,
    pub settings: CalibrationSettings,
    /// Echo pulses used by repeated-gate tomography and the final gate.
    pub x_pulse: XPulse,
    history: Vec<Record>,
    pub converged: bool,
}

impl CalibrationSession {
    /// Starts from the closed-form amplitude estimate `target/μ`, zero phase
    /// and no cancellation tone. The gate time is a quarter ZX period.
    pub fn new(device: SimulatedDevice, target_rate: f64, ramp_time: f64) -> Result<Self> {
        if !(target_rate > 0.0) || !target_rate.is_finite() {
            return Err(Error::config("target_rate", "must be > 0"));
        }
        let mu = device.nominal_couplings()?.mu;
        let mut drive = DriveSettings::zero(0.25 / target_rate, ramp_time);
        drive.cr_amp = target_rate / mu.abs();
        drive.cr_phase = if mu < 0.0 { std::f64::consts::PI } else { 0.0 };
        drive.validate()?;
        Ok(CalibrationSession {
            device,
            drive,
            target_rate,
            settings: CalibrationSettings::default(),
            x_pulse: XPulse::default(),
            history: Vec::new(),
            converged: false,
        })
    }

    pub fn with_drive(mut self, drive: DriveSettings) -> Result<Self> {
        drive.validate()?;
        self.history.push(Record::Update {
            stage: "init".into(),
            parameter: "drive".into(),
            from: self.drive.clone(),
            to: drive.clone(),
        });
        self.drive = drive;
        Ok(self)
    }

    pub fn with_settings(mut self, settings: CalibrationSettings) -> Result<Self> {
        settings.validate()?;
        self.settings = settings;
        Ok(self)
    }

    /// Echoed gate built from the current drive.
    pub fn echoed_gate(&self) -> GateSpec {
        crate::calibration::gate::compose_echo(&self.drive).with_x_pulse(self.x_pulse)
    }

    pub fn drive(&self) -> &DriveSettings {
        &self.drive
    }

    pub fn history(&self) -> &[Record] {
        &self.history
    }

    pub fn device(&self) -> &SimulatedDevice {
        &self.device
    }

    pub(crate) fn device_mut(&mut self) -> &mut SimulatedDevice {
        &mut self.device
    }

    pub(crate) fn record(&mut self, r: Record) {
        self.history.push(r);
    }

    pub(crate) fn update_drive(&mut self, stage: &str, parameter: SweepParameterLabel, drive: DriveSettings) {
        self.history.push(Record::Update {
            stage: stage.into(),
            parameter: parameter.0.into(),
            from: self.drive.clone(),
            to: drive.clone(),
        });
        self.drive = drive;
    }

    /// The most recent effective Hamiltonian recorded for `stage`.
    pub fn last_hamiltonian(&self, stage: &str) -> Option<&EffectiveHamiltonian> {
        self.history.iter().rev().find_map(|r| match r {
            Record::Tomography { stage: s, hamiltonian, .. } if s == stage => Some(hamiltonian),
            _ => None,
        })
    }

    /// One JSON object per line.
    pub fn write_log<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.history {
            let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Name attached to a drive update in the log.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SweepParameterLabel(pub &'static str);

impl From<SweepParameter> for SweepParameterLabel {
    fn from(p: SweepParameter) -> Self {
        SweepParameterLabel(p.label())
    }
}
