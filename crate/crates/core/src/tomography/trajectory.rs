use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Preparation of the control qubit before a tomography run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ControlPrep {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
}

impl ControlPrep {
    pub fn label(self) -> &'static str {
        match self {
            ControlPrep::Zero => "0",
            ControlPrep::One => "1",
        }
    }
}

/// Initial target state. Rotations about z are invisible from `|0⟩`, so
/// free-evolution experiments start from `|+⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetPrep {
    #[default]
    Zero,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TickUnit {
    /// Plateau duration in seconds.
    Seconds,
    /// Number of gate repetitions.
    Gates,
}

/// Target-qubit Bloch vector recorded against pulse length or repetition count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochTrajectory {
    pub ticks: Vec<f64>,
    pub unit: TickUnit,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub leakage: Vec<f64>,
    pub control_prep: ControlPrep,
}

const EXPECTATION_SLACK: f64 = 1e-6;

impl BlochTrajectory {
    pub fn new(
        ticks: Vec<f64>,
        unit: TickUnit,
        xyz: [Vec<f64>; 3],
        leakage: Vec<f64>,
        control_prep: ControlPrep,
    ) -> Result<Self> {
        let [x, y, z] = xyz;
        let t = BlochTrajectory {
            ticks,
            unit,
            x,
            y,
            z,
            leakage,
            control_prep,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ticks.len();
        if [self.x.len(), self.y.len(), self.z.len(), self.leakage.len()].iter().any(|&l| l != n) {
            return Err(Error::config("trajectory", "ticks, x, y, z and leakage must have equal lengths"));
        }
        let bad = self
            .x
            .iter()
            .chain(&self.y)
            .chain(&self.z)
            .any(|v| !v.is_finite() || v.abs() > 1.0 + EXPECTATION_SLACK);
        if bad {
            return Err(Error::config("trajectory", "expectations must lie in [-1, 1]"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }

    pub fn point(&self, k: usize) -> [f64; 3] {
        [self.x[k], self.y[k], self.z[k]]
    }

    pub fn axes(&self) -> [&[f64]; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Writes `tick,x,y,z,leakage` rows with a header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "tick,x,y,z,leakage")?;
        for k in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.ticks[k], self.x[k], self.y[k], self.z[k], self.leakage[k]
            )?;
        }
        Ok(())
    }
}

/// `n` evenly spaced ticks on `[0, span]`.
pub fn linear_ticks(span: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0];
    }
    (0..n).map(|k| span * k as f64 / (n - 1) as f64).collect()
}

/// Repetition counts `0..=max`.
pub fn repetition_ticks(max: usize) -> Vec<f64> {
    (0..=max).map(|n| n as f64).collect()
}
