//! Run configuration: a versioned JSON document.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benchmarking::RbOptions;
use crate::calibration::{CalibrationSettings, XPulse};
use crate::device::DeviceConfig;
use crate::dynamics::{DriveSettings, Noise};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Cancel,
    Echo,
    Transients,
    TomoReport,
    Qpt,
    Rb,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Cancel,
        Stage::Echo,
        Stage::Transients,
        Stage::TomoReport,
        Stage::Qpt,
        Stage::Rb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Cancel => "cancel",
            Stage::Echo => "echo",
            Stage::Transients => "transients",
            Stage::TomoReport => "tomo-report",
            Stage::Qpt => "qpt",
            Stage::Rb => "rb",
        }
    }

    /// Stages one of which must run earlier. An empty list means none.
    fn requires(self) -> &'static [Stage] {
        match self {
            Stage::Cancel => &[],
            Stage::Echo | Stage::Transients => &[Stage::Cancel],
            Stage::TomoReport | Stage::Qpt | Stage::Rb => &[Stage::Echo],
        }
    }

    /// Parses a comma-separated list such as `cancel,echo,rb`.
    pub fn parse_list(s: &str) -> Result<Vec<Stage>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(Stage::from_str)
            .collect()
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::config("stages", format!("unknown stage `{s}`")))
    }
}

/// Randomized-benchmarking settings; the seed comes from the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbSettings {
    pub lengths: Vec<usize>,
    pub n_sequences: usize,
    pub bootstrap: usize,
}

impl Default for RbSettings {
    fn default() -> Self {
        let o = RbOptions::default();
        RbSettings {
            lengths: o.lengths,
            n_sequences: o.n_sequences,
            bootstrap: o.bootstrap,
        }
    }
}

impl RbSettings {
    pub fn options(&self, seed: u64) -> RbOptions {
        RbOptions {
            lengths: self.lengths.clone(),
            n_sequences: self.n_sequences,
            bootstrap: self.bootstrap,
            seed,
        }
    }
}

fn default_device() -> DeviceConfig {
    DeviceConfig::reference()
}
fn default_target_rate() -> f64 {
    1.5e6
}
fn default_ramp_time() -> f64 {
    10e-9
}
fn default_stages() -> Vec<Stage> {
    Stage::ALL.to_vec()
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_noise() -> Noise {
    Noise::Unitary
}

/// Units: Hz, seconds, radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default = "default_device")]
    pub device: DeviceConfig,
    /// `Ω_ZX/2π` the cancellation loop aims for, Hz.
    #[serde(default = "default_target_rate")]
    pub target_rate: f64,
    #[serde(default = "default_ramp_time")]
    pub ramp_time: f64,
    #[serde(default = "default_stages")]
    pub stages: Vec<Stage>,
    /// Shots per expectation value; exact expectations when absent.
    #[serde(default)]
    pub shot_noise: Option<u32>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Dynamics used for calibration measurements. Process tomography and
    /// RB always include decoherence.
    #[serde(default = "default_noise")]
    pub measurement_noise: Noise,
    #[serde(default)]
    pub calibration: CalibrationSettings,
    #[serde(default)]
    pub rb: RbSettings,
    #[serde(default)]
    pub x_pulse: XPulse,
    /// Previously calibrated drive. Stands in for the `cancel` stage when
    /// that stage is not run.
    #[serde(default)]
    pub initial_drive: Option<DriveSettings>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            device: default_device(),
            target_rate: default_target_rate(),
            ramp_time: default_ramp_time(),
            stages: default_stages(),
            shot_noise: None,
            seed: 0,
            output_dir: default_output_dir(),
            measurement_noise: default_noise(),
            calibration: CalibrationSettings::default(),
            rb: RbSettings::default(),
            x_pulse: XPulse::default(),
            initial_drive: None,
        }
    }
}

impl RunConfig {
    /// Parses and validates. Schema errors carry the JSON path of the field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        self.device.validate()?;
        if !(self.target_rate.is_finite() && self.target_rate > 0.0) {
            return Err(Error::config("target_rate", "must be > 0"));
        }
        let gate_time = 0.25 / self.target_rate;
        if !(self.ramp_time >= 0.0 && self.ramp_time <= 0.25 * gate_time) {
            return Err(Error::config("ramp_time", "must lie in [0, gate_time/4]"));
        }
        if self.shot_noise == Some(0) {
            return Err(Error::config("shot_noise", "must be >= 1"));
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(Error::config("output_dir", "must not be empty"));
        }
        self.validate_stages()?;
        self.calibration.validate()?;
        self.rb.options(self.seed).validate()?;
        if !(self.x_pulse.duration > 0.0) {
            return Err(Error::config("x_pulse.duration", "must be > 0"));
        }
        if let Some(d) = &self.initial_drive {
            d.validate().map_err(|e| match e {
                Error::ConfigInvalid { field, reason } => {
                    Error::config(field.replacen("drive", "initial_drive", 1), reason)
                }
                other => other,
            })?;
        }
        Ok(())
    }

    fn validate_stages(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::config("stages", "at least one stage"));
        }
        for (i, st) in self.stages.iter().enumerate() {
            let earlier = &self.stages[..i];
            if earlier.contains(st) {
                return Err(Error::config(format!("stages[{i}]"), format!("`{st}` listed twice")));
            }
            let deps = st.requires();
            let preset = *st == Stage::Echo && self.initial_drive.is_some();
            if !deps.is_empty() && !preset && !deps.iter().any(|d| earlier.contains(d)) {
                let names: Vec<&str> = deps.iter().map(|d| d.name()).collect();
                return Err(Error::config(
                    format!("stages[{i}]"),
                    format!("`{st}` requires `{}` earlier in the list", names.join("` or `")),
                ));
            }
        }
        Ok(())
    }

    pub fn runs(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }
}
