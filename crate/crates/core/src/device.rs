//! Physical device parameters and the closed-form couplings of the dispersive
//! cross-resonance model.
//!
//! All configured frequencies are ordinary frequencies in Hz (`ω/2π`). The
//! conversion to angular units happens once, in [`DeviceConfig::angular`].

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::dynamics::DriveSettings;
use crate::error::{Error, Result};
use crate::tomography::{EffectiveHamiltonian, RateUnit};

/// Smallest denominator magnitude accepted by the closed-form couplings.
const DENOMINATOR_FLOOR_HZ: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonParams {
    /// `|0⟩ → |1⟩` transition frequency, Hz.
    pub frequency: f64,
    /// `α/2π`, Hz. Negative for transmons.
    pub anharmonicity: f64,
    /// Relaxation time, s.
    pub t1: f64,
    /// Coherence time, s.
    pub t2: f64,
}

impl TransmonParams {
    fn validate(&self, path: &str) -> Result<()> {
        let ok = |cond: bool, field: &str, reason: &str| {
            if cond {
                Ok(())
            } else {
                Err(Error::config(format!("{path}.{field}"), reason))
            }
        };
        ok(self.frequency.is_finite() && self.frequency > 0.0, "frequency", "must be > 0")?;
        ok(
            self.anharmonicity.is_finite() && self.anharmonicity < 0.0,
            "anharmonicity",
            "must be < 0",
        )?;
        ok(self.t1 > 0.0, "t1", "must be > 0")?;
        ok(self.t2 > 0.0, "t2", "must be > 0")?;
        ok(self.t2 <= 2.0 * self.t1, "t2", "must satisfy t2 <= 2 t1")?;
        Ok(())
    }

    /// Relaxation rate `1/T1`, 1/s.
    pub fn relaxation_rate(&self) -> f64 {
        1.0 / self.t1
    }

    /// Pure dephasing rate `1/T2 - 1/(2 T1)`, 1/s.
    pub fn dephasing_rate(&self) -> f64 {
        (1.0 / self.t2 - 0.5 / self.t1).max(0.0)
    }
}

/// Transient line response applied to the two-qubit drive tones.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineDistortion {
    /// First-order low-pass time constant, s. Zero disables distortion.
    pub ringup_time: f64,
    /// Phase offset applied during ramp segments, rad.
    #[serde(default)]
    pub edge_phase_error: f64,
}

impl LineDistortion {
    pub fn is_enabled(&self) -> bool {
        self.ringup_time > 0.0
    }
}

fn default_levels() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    /// Control transmon.
    pub q1: TransmonParams,
    /// Target transmon.
    pub q2: TransmonParams,
    /// Exchange coupling `J/2π`, Hz.
    pub j: f64,
    /// Classical cross-talk ratio `m12`.
    pub crosstalk_amp: f64,
    /// Classical cross-talk phase relative to the CR drive, rad.
    pub crosstalk_phase: f64,
    #[serde(default)]
    pub distortion: LineDistortion,
    /// Levels kept per transmon.
    #[serde(default = "default_levels")]
    pub levels: usize,
}

impl DeviceConfig {
    /// The measured device: frequencies, anharmonicities, coherence times and
    /// coupling as tabulated, `m12 = 7.1 %`. The cross-talk phase was never
    /// measured; 0.7 rad is an arbitrary stand-in.
    pub fn reference() -> Self {
        DeviceConfig {
            q1: TransmonParams {
                frequency: 6.509e9,
                anharmonicity: -300e6,
                t1: 16.2e-6,
                t2: 25.1e-6,
            },
            q2: TransmonParams {
                frequency: 5.963e9,
                anharmonicity: -314e6,
                t1: 23.9e-6,
                t2: 35.2e-6,
            },
            j: 10.7e6,
            crosstalk_amp: 0.071,
            crosstalk_phase: 0.7,
            distortion: LineDistortion::default(),
            levels: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.q1.validate("device.q1")?;
        self.q2.validate("device.q2")?;
        if !(self.j.is_finite() && self.j >= 0.0) {
            return Err(Error::config("device.j", "must be finite and >= 0"));
        }
        let delta = detuning(self);
        if delta.abs() < 10.0 * self.j {
            return Err(Error::config(
                "device.j",
                format!("|detuning| = {:.3e} Hz must be at least 10 J = {:.3e} Hz", delta.abs(), 10.0 * self.j),
            ));
        }
        if !(0.0..1.0).contains(&self.crosstalk_amp) {
            return Err(Error::config("device.crosstalk_amp", "must lie in [0, 1)"));
        }
        if !self.crosstalk_phase.is_finite() {
            return Err(Error::config("device.crosstalk_phase", "must be finite"));
        }
        if !(self.distortion.ringup_time >= 0.0) {
            return Err(Error::config("device.distortion.ringup_time", "must be >= 0"));
        }
        if self.levels < 2 {
            return Err(Error::config("device.levels", "must be >= 2"));
        }
        Ok(())
    }

    /// Angular-frequency view of the Hamiltonian parameters.
    pub fn angular(&self) -> AngularParams {
        AngularParams {
            omega1: TAU * self.q1.frequency,
            omega2: TAU * self.q2.frequency,
            alpha1: TAU * self.q1.anharmonicity,
            alpha2: TAU * self.q2.anharmonicity,
            j: TAU * self.j,
        }
    }
}

/// Hamiltonian parameters in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularParams {
    pub omega1: f64,
    pub omega2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub j: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedCouplings {
    /// Cross-resonance factor.
    pub mu: f64,
    /// Quantum cross-talk factor (signed).
    pub nu: f64,
    /// Cross-Kerr rate `ε/2π`, Hz.
    pub epsilon: f64,
    /// `Δ12/2π`, Hz.
    pub detuning: f64,
}

/// `Δ12/2π = ω1/2π − ω2/2π`, Hz.
pub fn detuning(cfg: &DeviceConfig) -> f64 {
    cfg.q1.frequency - cfg.q2.frequency
}

/// Three-level perturbative couplings μ, ν and ε.
pub fn derived_couplings(cfg: &DeviceConfig) -> Result<DerivedCouplings> {
    let delta = detuning(cfg);
    let a1 = cfg.q1.anharmonicity;
    let a2 = cfg.q2.anharmonicity;
    let j = cfg.j;
    for (which, value) in [
        ("Δ12", delta),
        ("Δ12 + α1", delta + a1),
        ("Δ12 − α2", delta - a2),
    ] {
        if value.abs() < DENOMINATOR_FLOOR_HZ {
            return Err(Error::DegenerateDetuning { which, value });
        }
    }
    let mu = -(j / delta) * a1 / (delta + a1);
    let nu = -(j / delta) * delta / (delta + a1);
    let epsilon = j * j * (a1 + a2) / ((delta + a1) * (delta - a2));
    Ok(DerivedCouplings {
        mu,
        nu,
        epsilon,
        detuning: delta,
    })
}

/// Effective Hamiltonian of the driven pair in the dispersive, low-power limit,
/// including the control-only terms that tomography of the target does not see.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedHamiltonian {
    pub xi: f64,
    pub yi: f64,
    pub zi: f64,
    pub terms: EffectiveHamiltonian,
}

/// Closed-form rates (Hz) for the given drive settings.
pub fn predicted_effective_hamiltonian(
    cfg: &DeviceConfig,
    drive: &DriveSettings,
) -> Result<PredictedHamiltonian> {
    let k = derived_couplings(cfg)?;
    if drive.cr_amp > k.detuning.abs() / 10.0 {
        log::warn!(
            "CR amplitude {:.3e} Hz exceeds Δ12/10; perturbative rates are unreliable",
            drive.cr_amp
        );
    }
    let (amp, th) = (drive.cr_amp, drive.cr_phase);
    let (m, phi) = (cfg.crosstalk_amp, cfg.crosstalk_phase);
    let (c_amp, c_th) = (drive.cancel_amp, drive.cancel_phase);
    let terms = EffectiveHamiltonian {
        zx: k.mu * amp * th.cos(),
        zy: k.mu * amp * th.sin(),
        ix: amp * k.nu * th.cos() + amp * m * (th + phi).cos() + c_amp * c_th.cos(),
        iy: amp * k.nu * th.sin() + amp * m * (th + phi).sin() + c_amp * c_th.sin(),
        iz: 0.0,
        zz: k.epsilon,
        unit: RateUnit::PerSecond,
        low_confidence: false,
    };
    Ok(PredictedHamiltonian {
        xi: amp * th.cos(),
        yi: amp * th.sin(),
        zi: k.detuning,
        terms,
    })
}

/// Cancellation tone `(Ω22/2π, θ22)` that nulls the predicted IX and IY rates.
pub fn perfect_cancellation(cfg: &DeviceConfig, drive: &DriveSettings) -> Result<(f64, f64)> {
    let k = derived_couplings(cfg)?;
    let th = drive.cr_phase;
    let x = k.nu * th.cos() + cfg.crosstalk_amp * (th + cfg.crosstalk_phase).cos();
    let y = k.nu * th.sin() + cfg.crosstalk_amp * (th + cfg.crosstalk_phase).sin();
    let amp = drive.cr_amp * x.hypot(y);
    let phase = (-y).atan2(-x);
    Ok((amp, phase))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig2(x: f64) -> f64 {
        let mag = 10f64.powf(x.abs().log10().floor() - 1.0);
        (x / mag).round() * mag
    }

    #[test]
    fn detuning_examples() {
        let cfg = DeviceConfig::reference();
        assert!((detuning(&cfg) - 546e6).abs() < 1.0);
        let mut c = cfg.clone();
        c.q2.frequency = c.q1.frequency;
        assert_eq!(detuning(&c), 0.0);
        c.q1.frequency = 5.0e9;
        c.q2.frequency = 5.5e9;
        assert!((detuning(&c) + 500e6).abs() < 1.0);
    }

    #[test]
    fn reference_couplings_match_reported_values() {
        let k = derived_couplings(&DeviceConfig::reference()).unwrap();
        assert!((sig2(k.mu) - 0.024).abs() < 1e-12, "mu = {}", k.mu);
        assert!((sig2(k.nu.abs()) - 0.043).abs() < 1e-12, "nu = {}", k.nu);
        assert!(k.nu < 0.0);
        assert!((sig2(k.epsilon) + 0.33e6).abs() < 1e-3, "eps = {}", k.epsilon);
        assert!((k.epsilon + 0.332e6).abs() < 0.001e6);
    }

    #[test]
    fn uncoupled_limit() {
        let mut cfg = DeviceConfig::reference();
        cfg.j = 0.0;
        let k = derived_couplings(&cfg).unwrap();
        assert_eq!((k.mu, k.nu, k.epsilon), (0.0, 0.0, 0.0));
    }

    #[test]
    fn mu_over_nu_identity() {
        let cfg = DeviceConfig::reference();
        let k = derived_couplings(&cfg).unwrap();
        let expected = cfg.q1.anharmonicity / detuning(&cfg);
        assert!((k.mu / k.nu - expected).abs() < 1e-14);
    }

    #[test]
    fn straddling_resonance_rejected() {
        let mut cfg = DeviceConfig::reference();
        cfg.q1.anharmonicity = -546e6;
        assert!(matches!(
            derived_couplings(&cfg),
            Err(Error::DegenerateDetuning { .. })
        ));
    }

    #[test]
    fn validation_rejects_bad_devices() {
        let mut c = DeviceConfig::reference();
        c.q1.t1 = -1.0;
        assert!(c.validate().is_err());
        let mut c = DeviceConfig::reference();
        c.q2.anharmonicity = 10e6;
        assert!(c.validate().is_err());
        let mut c = DeviceConfig::reference();
        c.j = 60e6;
        assert!(c.validate().is_err());
        let mut c = DeviceConfig::reference();
        c.q1.t2 = 3.0 * c.q1.t1;
        assert!(c.validate().is_err());
        let mut c = DeviceConfig::reference();
        c.crosstalk_amp = 1.0;
        assert!(c.validate().is_err());
        assert!(DeviceConfig::reference().validate().is_ok());
    }

    #[test]
    fn no_drive_prediction() {
        let cfg = DeviceConfig::reference();
        let drive = DriveSettings::zero(83.3e-9, 5e-9);
        let p = predicted_effective_hamiltonian(&cfg, &drive).unwrap();
        let k = derived_couplings(&cfg).unwrap();
        let t = p.terms;
        assert_eq!((t.zx, t.zy, t.ix, t.iy, p.xi, p.yi), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(t.zz, k.epsilon);
        assert_eq!(p.zi, k.detuning);
    }

    #[test]
    fn target_rate_drive() {
        let cfg = DeviceConfig::reference();
        let k = derived_couplings(&cfg).unwrap();
        let mut drive = DriveSettings::zero(83.3e-9, 5e-9);
        drive.cr_amp = 3.0e6 / k.mu;
        let p = predicted_effective_hamiltonian(&cfg, &drive).unwrap();
        assert!((p.terms.zx - 3.0e6).abs() < 1e-6);
        assert_eq!(p.terms.zy, 0.0);
    }

    #[test]
    fn quadrature_drive_without_crosstalk() {
        let mut cfg = DeviceConfig::reference();
        cfg.crosstalk_amp = 0.0;
        let k = derived_couplings(&cfg).unwrap();
        let mut drive = DriveSettings::zero(83.3e-9, 5e-9);
        drive.cr_amp = 50e6;
        drive.cr_phase = std::f64::consts::FRAC_PI_2;
        let t = predicted_effective_hamiltonian(&cfg, &drive).unwrap().terms;
        assert!(t.zx.abs() < 1e-6);
        assert!((t.zy - k.mu * 50e6).abs() < 1e-6);
        assert!(t.ix.abs() < 1e-6);
    }

    #[test]
    fn perfect_cancellation_nulls_single_qubit_terms() {
        let cfg = DeviceConfig::reference();
        for &th in &[0.0, 0.4, 2.0, -1.3] {
            let mut drive = DriveSettings::zero(83.3e-9, 5e-9);
            drive.cr_amp = 120e6;
            drive.cr_phase = th;
            let (a, p) = perfect_cancellation(&cfg, &drive).unwrap();
            drive.cancel_amp = a;
            drive.cancel_phase = p;
            let t = predicted_effective_hamiltonian(&cfg, &drive).unwrap().terms;
            assert!(t.ix.abs() < 1e-6 && t.iy.abs() < 1e-6, "{t:?}");
        }
    }

    #[test]
    fn prediction_linear_in_drive() {
        let cfg = DeviceConfig::reference();
        let mut d1 = DriveSettings::zero(83.3e-9, 5e-9);
        d1.cr_amp = 40e6;
        d1.cr_phase = 0.3;
        d1.cancel_amp = 2e6;
        d1.cancel_phase = -2.0;
        let mut d2 = d1.clone();
        d2.cr_amp *= 2.5;
        d2.cancel_amp *= 2.5;
        let a = predicted_effective_hamiltonian(&cfg, &d1).unwrap().terms;
        let b = predicted_effective_hamiltonian(&cfg, &d2).unwrap().terms;
        for (x, y) in [(a.zx, b.zx), (a.zy, b.zy), (a.ix, b.ix), (a.iy, b.iy)] {
            assert!((2.5 * x - y).abs() < 1e-6);
        }
    }
}
