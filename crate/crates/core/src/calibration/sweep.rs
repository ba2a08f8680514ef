//! Repeated-gate parameter sweeps with linear zero-crossing updates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calibration::gate::{GateKind, GateSpec, XPulse};
use crate::calibration::session::{CalibrationSession, Record};
use crate::dynamics::DriveSettings;
use crate::error::{Error, Result};
use crate::tomography::{hamiltonian_tomography, trajectory::repetition_ticks, EffectiveHamiltonian};

/// Smallest acceptable coefficient of determination of a sweep's linear fit.
pub const MIN_R_SQUARED: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    /// Common phase offset of CR and cancellation tones (θ12, θ22 together).
    GlobalPhase,
    /// Ω12 with Ω22/Ω12 held fixed.
    GlobalAmp,
    /// In-phase cancellation quadrature Ω22·cos θ22.
    CancelX,
    /// Quadrature cancellation component Ω22·sin θ22.
    CancelY,
}

impl SweepParameter {
    pub fn label(self) -> &'static str {
        match self {
            SweepParameter::GlobalPhase => "global-phase",
            SweepParameter::GlobalAmp => "global-amp",
            SweepParameter::CancelX => "cancel-x",
            SweepParameter::CancelY => "cancel-y",
        }
    }

    /// Current value of the parameter in `drive`.
    pub fn value(self, drive: &DriveSettings) -> f64 {
        match self {
            SweepParameter::GlobalPhase => drive.cr_phase,
            SweepParameter::GlobalAmp => drive.cr_amp,
            SweepParameter::CancelX => drive.cancel_vector().re,
            SweepParameter::CancelY => drive.cancel_vector().im,
        }
    }

    /// `drive` with the parameter set to `value`.
    pub fn apply(self, drive: &DriveSettings, value: f64) -> DriveSettings {
        let mut d = drive.clone();
        match self {
            SweepParameter::GlobalPhase => {
                let shift = value - drive.cr_phase;
                d.cr_phase = value;
                d.cancel_phase += shift;
            }
            SweepParameter::GlobalAmp => {
                let ratio = if drive.cr_amp > 0.0 { drive.cancel_amp / drive.cr_amp } else { 0.0 };
                d.cr_amp = value.max(0.0);
                d.cancel_amp = ratio * d.cr_amp;
            }
            SweepParameter::CancelX => {
                let c = drive.cancel_vector();
                d.set_cancel_vector(Complex64::new(value, c.im));
            }
            SweepParameter::CancelY => {
                let c = drive.cancel_vector();
                d.set_cancel_vector(Complex64::new(c.re, value));
            }
        }
        d
    }

    /// Tomography coefficient that the parameter steers.
    pub fn coefficient(self, h: &EffectiveHamiltonian) -> f64 {
        match self {
            SweepParameter::GlobalPhase => h.zy,
            SweepParameter::GlobalAmp => h.zx,
            SweepParameter::CancelX => h.ix,
            SweepParameter::CancelY => h.iy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 0.0 };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub scheme: GateKind,
    pub values: Vec<f64>,
    /// Full tomography result at each value, cycles per gate.
    pub hamiltonians: Vec<EffectiveHamiltonian>,
    /// The steered coefficient at each value.
    pub coefficient: Vec<f64>,
    pub linear_fit: LinearFit,
    /// Value of the coefficient the sweep steers towards.
    pub target: f64,
    /// Parameter value at the fitted crossing.
    pub update: f64,
    /// Value before the sweep.
    pub previous: f64,
    /// False when the linear fit explains too little of the variation.
    pub reliable: bool,
}

impl SweepResult {
    /// Coefficient error removed by the update, from the linear model.
    pub fn corrected_error(&self) -> f64 {
        self.linear_fit.slope * self.previous + self.linear_fit.intercept - self.target
    }
}

/// Default half-width of a sweep around the current drive.
pub fn default_width(session: &CalibrationSession, parameter: SweepParameter) -> f64 {
    let s = &session.settings;
    let d = session.drive();
    match parameter {
        SweepParameter::GlobalPhase => s.phase_width,
        SweepParameter::GlobalAmp => s.amplitude_width * d.cr_amp,
        SweepParameter::CancelX | SweepParameter::CancelY => {
            (s.amplitude_width * d.cancel_amp).max(s.cancel_floor * session.target_rate)
        }
    }
}

fn gate_for(scheme: GateKind, drive: &DriveSettings, x_pi: XPulse) -> GateSpec {
    GateSpec {
        kind: scheme,
        drive: drive.clone(),
        x_pi,
    }
}

/// Repeated-gate tomography of the gate built from `drive`.
pub fn measure_repeated(
    session: &mut CalibrationSession,
    scheme: GateKind,
    drive: &DriveSettings,
) -> Result<EffectiveHamiltonian> {
    let ticks = repetition_ticks(session.settings.max_repetitions);
    let gate = gate_for(scheme, drive, session.x_pulse);
    let [t0, t1] = session.device_mut().measure_repeated(&gate, &ticks)?;
    hamiltonian_tomography(&t0, &t1)
}

/// Sweeps `parameter` over `current ± width` and solves for the crossing of
/// the steered coefficient with its target. The drive is not modified.
pub fn sweep_parameter(
    session: &mut CalibrationSession,
    parameter: SweepParameter,
    width: f64,
    n_points: usize,
    scheme: GateKind,
) -> Result<SweepResult> {
    if n_points < 3 {
        return Err(Error::config("sweep.points", "must be >= 3"));
    }
    if !(width > 0.0) {
        return Err(Error::config("sweep.width", "must be > 0"));
    }
    let base = session.drive().clone();
    let centre = parameter.value(&base);
    let (lo, hi) = (centre - width, centre + width);
    let values: Vec<f64> = (0..n_points)
        .map(|k| lo + (hi - lo) * k as f64 / (n_points - 1) as f64)
        .collect();
    let mut hamiltonians = Vec::with_capacity(n_points);
    for &v in &values {
        let drive = parameter.apply(&base, v);
        hamiltonians.push(measure_repeated(session, scheme, &drive)?);
    }
    let coefficient: Vec<f64> = hamiltonians.iter().map(|h| parameter.coefficient(h)).collect();
    let fit = linear_fit(&values, &coefficient);
    let target = match parameter {
        SweepParameter::GlobalAmp => match scheme {
            GateKind::EchoedZx => -0.25,
            GateKind::HalfCr => -0.125,
        },
        _ => 0.0,
    };
    let reliable = fit.r_squared > MIN_R_SQUARED;
    if !reliable {
        log::warn!("{} sweep: linear fit R² = {:.3}", parameter.label(), fit.r_squared);
    }
    let update = if fit.slope != 0.0 {
        (target - fit.intercept) / fit.slope
    } else {
        f64::NAN
    };
    let result = SweepResult {
        parameter,
        scheme,
        values,
        hamiltonians,
        coefficient,
        linear_fit: fit,
        target,
        update,
        previous: centre,
        reliable,
    };
    session.record(Record::Sweep(result.clone()));
    if !(update >= lo && update <= hi) {
        return Err(Error::CrossingOutOfRange {
            parameter: parameter.label().into(),
            value: update,
            lo,
            hi,
        });
    }
    Ok(result)
}
