use rand::Rng;
use rand_distr::{Binomial, Distribution};

/// Finite-shot estimate of a Pauli expectation: binomial sampling of the `+1`
/// outcome with probability `(1 + e)/2`.
pub fn apply_shot_noise<R: Rng + ?Sized>(expectation: f64, shots: u32, rng: &mut R) -> f64 {
    let shots = shots.max(1);
    let p = (0.5 * (1.0 + expectation)).clamp(0.0, 1.0);
    let k = Binomial::new(shots as u64, p).expect("probability clamped to [0, 1]").sample(rng);
    2.0 * k as f64 / shots as f64 - 1.0
}
