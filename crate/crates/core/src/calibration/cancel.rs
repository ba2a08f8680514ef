//! Iterative cross-talk cancellation with continuous Hamiltonian tomography.

use num_complex::Complex64;

use crate::calibration::session::{CalibrationSession, Record, SweepParameterLabel};
use crate::error::{Error, Result};
use crate::tomography::{hamiltonian_tomography, trajectory::linear_ticks, EffectiveHamiltonian};

const STAGE: &str = "cancel";
/// Largest per-iteration amplitude rescaling.
const MAX_SCALE_STEP: f64 = 2.0;
/// CR amplitude ceiling as a fraction of the qubit-qubit detuning.
const MAX_AMP_FRACTION: f64 = 0.25;

/// Continuous tomography of the current drive.
pub fn measure_continuous(session: &mut CalibrationSession, stage: &str, iteration: usize) -> Result<EffectiveHamiltonian> {
    let s = &session.settings;
    let span = s.continuous_periods / session.target_rate;
    let ticks = linear_ticks(span, s.continuous_points);
    let drive = session.drive().clone();
    let [t0, t1] = session.device_mut().measure_continuous(&drive, &ticks)?;
    let h = hamiltonian_tomography(&t0, &t1)?;
    session.record(Record::Tomography {
        stage: stage.into(),
        iteration,
        drive,
        hamiltonian: h,
    });
    Ok(h)
}

fn misfit(h: &EffectiveHamiltonian, target: f64) -> f64 {
    let zx = h.zx.abs().max(1e-30);
    (h.zy.abs() / zx)
        .max(h.ix.abs() / zx)
        .max(h.iy.abs() / zx)
        .max((h.zx - target).abs() / target)
}

/// Tunes CR phase and amplitude and the cancellation tone until the measured
/// Hamiltonian is `target_rate·ZX` within tolerance. On failure the best drive
/// seen is restored and `NoConvergence` returned.
pub fn cancel_crosstalk(session: &mut CalibrationSession) -> Result<()> {
    let target = session.target_rate;
    let tol = session.settings.tolerance;
    let max_amp = MAX_AMP_FRACTION * session.device().nominal_couplings()?.detuning.abs();
    let mut best = (f64::INFINITY, session.drive().clone());
    session.converged = false;
    let mut measured = 0;
    for iteration in 0..session.settings.max_iterations {
        let h = measure_continuous(session, STAGE, iteration)?;
        measured += 1;
        let m = misfit(&h, target);
        if m < best.0 {
            best = (m, session.drive().clone());
        }
        if m < tol {
            session.converged = true;
            log::info!("cross-talk cancellation converged after {} measurements", iteration + 1);
            return Ok(());
        }
        if h.zx == 0.0 && h.zy == 0.0 {
            return Err(Error::FitFailure("no cross-resonance rotation resolved".into()));
        }
        let mut drive = session.drive().clone();
        let psi = h.zy.atan2(h.zx);
        let scale = (target / h.zx.hypot(h.zy)).clamp(1.0 / MAX_SCALE_STEP, MAX_SCALE_STEP);
        let residual = Complex64::new(h.ix, h.iy);
        let rot = Complex64::from_polar(scale, -psi);
        drive.cr_phase -= psi;
        let saturated = drive.cr_amp >= max_amp && scale > 1.0;
        drive.cr_amp = (drive.cr_amp * scale).min(max_amp);
        drive.set_cancel_vector(rot * (drive.cancel_vector() - residual));
        session.update_drive(STAGE, SweepParameterLabel("cancel-iteration"), drive);
        if saturated {
            log::warn!("CR amplitude pinned at {max_amp:.3e} Hz; target rate {target:.3e} Hz out of reach");
            break;
        }
    }
    let (m, drive) = best;
    if &drive != session.drive() {
        session.update_drive(STAGE, SweepParameterLabel("best-so-far"), drive);
    }
    log::warn!("cross-talk cancellation did not converge; best misfit {m:.3e}");
    Err(Error::NoConvergence {
        iterations: measured,
    })
}

/// Classical cross-talk `(m12, isolation in dB)` backed out of a converged
/// cancellation tone by removing the predicted quantum cross-talk.
pub fn extract_classical_crosstalk(session: &CalibrationSession) -> Result<(f64, f64)> {
    if !session.converged {
        return Err(Error::NotConverged);
    }
    let d = session.drive();
    if d.cr_amp <= 0.0 {
        return Err(Error::DivisionDegenerate(d.cr_amp));
    }
    let nu = session.device().nominal_couplings()?.nu;
    let quantum = Complex64::from_polar(nu * d.cr_amp, d.cr_phase);
    let classical = -d.cancel_vector() - quantum;
    let m12 = classical.norm() / d.cr_amp;
    Ok((m12, 20.0 * m12.log10()))
}
