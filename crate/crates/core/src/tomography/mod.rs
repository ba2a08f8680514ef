//! Bloch-trajectory acquisition and Hamiltonian tomography of the target.

pub mod acquire;
mod effective;
pub mod fit;
mod hamiltonian;
mod shots;
pub mod trajectory;

pub use acquire::{acquire_pair, acquire_trajectory, continuous_schedule, AcquireMode, AcquireOptions};
pub use effective::{EffectiveHamiltonian, RateUnit};
pub use fit::{fit_rotation, fit_rotation_with, FitOptions, RotationFit};
pub use hamiltonian::{from_rotation_vectors, hamiltonian_tomography};
pub use shots::apply_shot_noise;
pub use trajectory::{BlochTrajectory, ControlPrep, TargetPrep, TickUnit};
