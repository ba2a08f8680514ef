use crate::error::{Error, Result};
use crate::tomography::effective::{EffectiveHamiltonian, RateUnit};
use crate::tomography::fit::fit_rotation;
use crate::tomography::trajectory::{BlochTrajectory, ControlPrep, TickUnit};

/// Fit outcome for one control preparation; degenerate fits count as no rotation.
fn rotation_vector(traj: &BlochTrajectory) -> Result<([f64; 3], bool)> {
    match fit_rotation(traj) {
        Ok(fit) => Ok((fit.vector(), false)),
        Err(Error::FitDegenerate { .. }) => Ok(([0.0; 3], true)),
        Err(e) => Err(e),
    }
}

/// Effective Hamiltonian from target trajectories recorded with the control
/// in `|0⟩` and `|1⟩` under the same drive.
pub fn hamiltonian_tomography(traj0: &BlochTrajectory, traj1: &BlochTrajectory) -> Result<EffectiveHamiltonian> {
    if traj0.control_prep != ControlPrep::Zero || traj1.control_prep != ControlPrep::One {
        return Err(Error::config("trajectories", "expected control preparations |0> then |1>"));
    }
    if traj0.unit != traj1.unit {
        return Err(Error::config("trajectories", "tick units differ"));
    }
    let (w0, d0) = rotation_vector(traj0)?;
    let (w1, d1) = rotation_vector(traj1)?;
    Ok(from_rotation_vectors(w0, w1, traj0.unit, d0 || d1))
}

/// Combine per-preparation rotation vectors into the six rates.
pub fn from_rotation_vectors(w0: [f64; 3], w1: [f64; 3], unit: TickUnit, low_confidence: bool) -> EffectiveHamiltonian {
    let half_diff = |k: usize| 0.5 * (w0[k] - w1[k]);
    let half_sum = |k: usize| 0.5 * (w0[k] + w1[k]);
    EffectiveHamiltonian {
        zx: half_diff(0),
        zy: half_diff(1),
        zz: half_diff(2),
        ix: half_sum(0),
        iy: half_sum(1),
        iz: half_sum(2),
        unit: match unit {
            TickUnit::Seconds => RateUnit::PerSecond,
            TickUnit::Gates => RateUnit::PerGate,
        },
        low_confidence,
    }
}
