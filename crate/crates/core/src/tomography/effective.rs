use serde::{Deserialize, Serialize};

/// Unit of the rates in an [`EffectiveHamiltonian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateUnit {
    /// Rotation frequency in Hz.
    PerSecond,
    /// Rotation per applied gate, in cycles.
    PerGate,
}

/// Pauli-decomposed rates of the two-qubit generator restricted to terms that
/// act on the target: `2H = zx ZX + zy ZY + zz ZZ + ix IX + iy IY + iz IZ`.
/// Each rate is the Bloch-sphere rotation frequency it produces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveHamiltonian {
    pub zx: f64,
    pub zy: f64,
    pub zz: f64,
    pub ix: f64,
    pub iy: f64,
    pub iz: f64,
    pub unit: RateUnit,
    /// Set when either underlying fit was flagged as unreliable.
    pub low_confidence: bool,
}

impl EffectiveHamiltonian {
    pub fn zero(unit: RateUnit) -> Self {
        EffectiveHamiltonian {
            zx: 0.0,
            zy: 0.0,
            zz: 0.0,
            ix: 0.0,
            iy: 0.0,
            iz: 0.0,
            unit,
            low_confidence: false,
        }
    }

    /// `(label, value)` pairs in a fixed order.
    pub fn terms(&self) -> [(&'static str, f64); 6] {
        [
            ("zx", self.zx),
            ("zy", self.zy),
            ("zz", self.zz),
            ("ix", self.ix),
            ("iy", self.iy),
            ("iz", self.iz),
        ]
    }

    /// Single-qubit rate on the target as a complex number `ix + i·iy`.
    pub fn target_drive(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.ix, self.iy)
    }

    /// Rates converted to another unit; `gate_time` is the time per gate in seconds.
    pub fn to_unit(&self, unit: RateUnit, gate_time: f64) -> Self {
        let k = match (self.unit, unit) {
            (RateUnit::PerSecond, RateUnit::PerGate) => gate_time,
            (RateUnit::PerGate, RateUnit::PerSecond) => 1.0 / gate_time,
            _ => 1.0,
        };
        EffectiveHamiltonian {
            zx: self.zx * k,
            zy: self.zy * k,
            zz: self.zz * k,
            ix: self.ix * k,
            iy: self.iy * k,
            iz: self.iz * k,
            unit,
            low_confidence: self.low_confidence,
        }
    }
}
