use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calibration::gate::{program_superop, program_unitary, GateSpec};
use crate::device::{derived_couplings, DerivedCouplings, DeviceConfig};
use crate::dynamics::{DriveSettings, Noise, Simulator};
use crate::error::Result;
use crate::linalg::CMat;
use crate::tomography::{acquire_pair, AcquireMode, AcquireOptions, BlochTrajectory};

/// A device the calibrator can only observe through tomography. The ground
/// truth configuration stays private.
#[derive(Debug, Clone)]
pub struct SimulatedDevice {
    cfg: DeviceConfig,
    sim: Simulator,
    options: AcquireOptions,
    rng: ChaCha8Rng,
}

impl SimulatedDevice {
    pub fn new(cfg: DeviceConfig) -> Result<Self> {
        cfg.validate()?;
        let sim = Simulator::new(&cfg)?;
        Ok(SimulatedDevice {
            cfg,
            sim,
            options: AcquireOptions::default(),
            rng: ChaCha8Rng::seed_from_u64(0),
        })
    }

    /// Finite-shot readout with a seeded generator.
    pub fn with_shots(mut self, shots: Option<u32>, seed: u64) -> Self {
        self.options.shots = shots;
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self
    }

    pub fn with_noise(mut self, noise: Noise) -> Self {
        self.options.noise = noise;
        self
    }

    pub fn options(&self) -> &AcquireOptions {
        &self.options
    }

    /// Design-value couplings (frequencies, anharmonicities and J), as an
    /// experimenter would estimate them. Cross-talk is not included.
    pub fn nominal_couplings(&self) -> Result<DerivedCouplings> {
        derived_couplings(&self.cfg)
    }

    /// Continuous tomography for both control preparations.
    pub fn measure_continuous(&mut self, drive: &DriveSettings, ticks: &[f64]) -> Result<[BlochTrajectory; 2]> {
        acquire_pair(
            &self.sim,
            &self.cfg,
            drive,
            ticks,
            &AcquireMode::Continuous,
            &self.options,
            Some(&mut self.rng),
        )
    }

    /// Repeated-gate tomography for both control preparations.
    pub fn measure_repeated(&mut self, gate: &GateSpec, ticks: &[f64]) -> Result<[BlochTrajectory; 2]> {
        acquire_pair(
            &self.sim,
            &self.cfg,
            &gate.drive,
            ticks,
            &AcquireMode::Repeated(gate.clone()),
            &self.options,
            Some(&mut self.rng),
        )
    }

    /// Evaluation hooks outside the calibration loop.
    pub fn gate_unitary(&self, gate: &GateSpec) -> Result<CMat> {
        program_unitary(&self.sim, &gate.program(&self.cfg))
    }

    pub fn gate_superop(&self, gate: &GateSpec, noise: Noise) -> Result<CMat> {
        program_superop(&self.sim, &gate.program(&self.cfg), noise)
    }

    pub fn levels(&self) -> usize {
        self.sim.frame.space.levels()
    }

    /// Ground truth, for evaluation code only.
    pub fn ground_truth(&self) -> &DeviceConfig {
        &self.cfg
    }
}
