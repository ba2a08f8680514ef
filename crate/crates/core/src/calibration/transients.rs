//! Transient-error correction by the fixed sequence of repeated-gate sweeps.

use crate::calibration::gate::GateKind;
use crate::calibration::session::{CalibrationSession, Record};
use crate::calibration::sweep::{default_width, sweep_parameter, SweepParameter, SweepResult};
use crate::error::{Error, Result};

const STAGE: &str = "transients";

/// Sweep order: phase and amplitude on the echoed gate, the cancellation
/// quadratures on bare halves (the echo would hide them), then amplitude again.
pub const SEQUENCE: [(SweepParameter, GateKind); 5] = [
    (SweepParameter::GlobalPhase, GateKind::EchoedZx),
    (SweepParameter::GlobalAmp, GateKind::EchoedZx),
    (SweepParameter::CancelX, GateKind::HalfCr),
    (SweepParameter::CancelY, GateKind::HalfCr),
    (SweepParameter::GlobalAmp, GateKind::EchoedZx),
];

/// Average-gate infidelity of a residual rotation of `cycles` about one
/// two-qubit Pauli axis: `(4/5)·sin²(πc)`.
pub fn rotation_infidelity(cycles: f64) -> f64 {
    0.8 * (std::f64::consts::PI * cycles).sin().powi(2)
}

fn last_sweep_error(session: &CalibrationSession) -> Option<f64> {
    session.history().iter().rev().find_map(|r| match r {
        Record::Sweep(s) => Some(s.corrected_error()),
        _ => None,
    })
}

/// One sweep; a finite crossing outside the window moves the drive to the
/// nearer edge and sweeps again, at most `max_recentres` times. Also returns
/// the coefficient error the first sweep predicts at the starting drive.
fn sweep_recentring(
    session: &mut CalibrationSession,
    parameter: SweepParameter,
    scheme: GateKind,
) -> Result<(SweepResult, f64)> {
    let mut moves = 0;
    let mut initial_error = None;
    loop {
        let width = default_width(session, parameter);
        let points = session.settings.sweep_points;
        let outcome = sweep_parameter(session, parameter, width, points, scheme);
        if initial_error.is_none() {
            initial_error = last_sweep_error(session);
        }
        match outcome {
            Err(Error::CrossingOutOfRange { value, lo, hi, .. })
                if value.is_finite() && moves < session.settings.max_recentres =>
            {
                moves += 1;
                let edge = value.clamp(lo, hi);
                log::info!("{} crossing {value:.4e} outside window; re-centring at {edge:.4e}", parameter.label());
                let drive = parameter.apply(session.drive(), edge);
                session.update_drive(STAGE, parameter.into(), drive);
            }
            other => return other.map(|s| (s, initial_error.unwrap_or(0.0))),
        }
    }
}

/// Runs the sweep sequence, applying each update before the next sweep.
/// Returns the sweeps and the fidelity gain predicted by their linear models.
pub fn correct_transients(session: &mut CalibrationSession) -> Result<(Vec<SweepResult>, f64)> {
    let mut results = Vec::with_capacity(SEQUENCE.len());
    let mut gain = 0.0;
    for (parameter, scheme) in SEQUENCE {
        let (sweep, error) = match sweep_recentring(session, parameter, scheme) {
            Ok(s) => s,
            Err(e) => {
                session.converged = false;
                return Err(e);
            }
        };
        gain += rotation_infidelity(error);
        let drive = parameter.apply(session.drive(), sweep.update);
        session.update_drive(STAGE, parameter.into(), drive);
        results.push(sweep);
    }
    session.record(Record::Note {
        stage: STAGE.into(),
        message: format!("predicted fidelity gain {gain:.4e}"),
    });
    if results.iter().any(|r| !r.reliable) {
        log::warn!("transient correction used at least one unreliable sweep");
    }
    Ok((results, gain))
}

