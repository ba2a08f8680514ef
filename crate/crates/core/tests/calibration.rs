use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use crgate::calibration::sweep::{default_width, MIN_R_SQUARED};
use crgate::calibration::transients::SEQUENCE;
use crgate::calibration::gate::ideal_control_x;
use crgate::calibration::*;
use crgate::device::{DeviceConfig, LineDistortion};
use crgate::linalg::{c, kron, pauli, phase_insensitive_distance, CMat};
use crgate::tomography::trajectory::repetition_ticks;

const RATE: f64 = 1.5e6;
const RAMP: f64 = 10e-9;

fn distorted() -> DeviceConfig {
    let mut cfg = DeviceConfig::reference();
    cfg.distortion = LineDistortion {
        ringup_time: 8e-9,
        edge_phase_error: 0.03,
    };
    cfg
}

fn cancelled(cfg: DeviceConfig) -> CalibrationSession {
    let mut session = CalibrationSession::new(SimulatedDevice::new(cfg).unwrap(), RATE, RAMP).unwrap();
    cancel_crosstalk(&mut session).unwrap();
    session
}

#[test]
fn cancellation_converges_at_default_rate() {
    let session = cancelled(DeviceConfig::reference());
    assert!(session.converged);
    let h = session.last_hamiltonian("cancel").unwrap();
    let tol = session.settings.tolerance;
    assert!((h.zx - RATE).abs() < tol * RATE, "{h:?}");
    for v in [h.zy, h.ix, h.iy] {
        assert!(v.abs() < tol * RATE, "{h:?}");
    }
    let (m12, db) = extract_classical_crosstalk(&session).unwrap();
    let truth = DeviceConfig::reference().crosstalk_amp;
    assert!((m12 - truth).abs() < 0.1 * truth, "{m12} vs {truth}");
    assert!((db - 20.0 * m12.log10()).abs() < 1e-12);
}

#[test]
fn echo_composition_is_four_periodic() {
    // CR(θ+π) → X → CR(θ) → X with exact rotations
    let x = ideal_control_x();
    let gate = &x * zx_rotation(FRAC_PI_4) * &x * zx_rotation(-FRAC_PI_4);
    let ideal = compose_echo(&crgate::dynamics::DriveSettings::zero(200e-9, RAMP)).ideal_unitary();
    assert!(phase_insensitive_distance(&gate, &ideal) < 1e-7);
    let zi = kron(&pauli(0), &pauli(3));
    let mut psi = CMat::zeros(4, 1);
    psi[(0, 0)] = c(1.0, 0.0);
    for n in 0..=12 {
        let z = (psi.adjoint() * &zi * &psi)[(0, 0)].re;
        assert!((z - (TAU * n as f64 / 4.0).cos()).abs() < 1e-12, "n={n}: {z}");
        psi = &gate * psi;
    }
}

#[test]
fn transient_sweeps_are_linear() {
    let mut session = cancelled(distorted());
    let (sweeps, gain) = correct_transients(&mut session).unwrap();
    assert_eq!(sweeps.len(), SEQUENCE.len());
    assert!(gain >= 0.0);
    for s in &sweeps {
        assert!(s.reliable && s.linear_fit.r_squared > MIN_R_SQUARED, "{:?} R² {}", s.parameter, s.linear_fit.r_squared);
    }
}

#[test]
fn sweep_updates_are_idempotent() {
    let mut session = cancelled(distorted());
    for (parameter, scheme) in SEQUENCE {
        let width = match parameter {
            SweepParameter::GlobalAmp => 0.3 * session.drive().cr_amp,
            _ => 3.0 * default_width(&session, parameter),
        };
        let first = sweep_parameter(&mut session, parameter, width, 7, scheme).unwrap();
        let drive = parameter.apply(session.drive(), first.update);
        session = session.with_drive(drive).unwrap();
        let second = sweep_parameter(&mut session, parameter, width, 7, scheme).unwrap();
        let step_a = (first.update - first.previous).abs();
        let step_b = (second.update - second.previous).abs();
        assert!(step_b < 0.1 * step_a, "{parameter:?}: {step_a:.3e} then {step_b:.3e}");
    }
}

#[test]
fn calibrated_echo_tracks_ideal_rotation() {
    let mut session = cancelled(distorted());
    session.x_pulse = XPulse::ideal();
    correct_transients(&mut session).unwrap();
    let gate = session.echoed_gate();
    let mut dev = SimulatedDevice::new(distorted()).unwrap();
    let ticks = repetition_ticks(16);
    let [t0, t1] = dev.measure_repeated(&gate, &ticks).unwrap();
    for (k, &n) in ticks.iter().enumerate() {
        let want = (FRAC_PI_2 * n).cos();
        // residual error grows linearly with repetitions
        let tol = 0.02 + 0.03 * n;
        assert!((t0.z[k] - want).abs() < tol, "n={n}: {} vs {want}", t0.z[k]);
        assert!((t1.z[k] - want).abs() < tol, "n={n}: {} vs {want}", t1.z[k]);
    }
    // opposite rotation senses for the two control states
    assert!(t0.y[1] * t1.y[1] < 0.0);
}

#[test]
fn sweep_leaves_the_drive_untouched() {
    let mut session = cancelled(DeviceConfig::reference());
    let before = session.drive().clone();
    let width = 0.3 * before.cr_amp;
    let r = sweep_parameter(&mut session, SweepParameter::GlobalAmp, width, 5, GateKind::EchoedZx).unwrap();
    assert_eq!(session.drive(), &before);
    assert_eq!(r.values.len(), 5);
    assert!((r.target + 0.25).abs() < 1e-12);
    assert!(sweep_parameter(&mut session, SweepParameter::GlobalAmp, width, 2, GateKind::EchoedZx).is_err());
}

#[test]
fn classical_crosstalk_requires_convergence() {
    let session = CalibrationSession::new(SimulatedDevice::new(DeviceConfig::reference()).unwrap(), RATE, RAMP).unwrap();
    assert!(matches!(extract_classical_crosstalk(&session), Err(crgate::Error::NotConverged)));
}
