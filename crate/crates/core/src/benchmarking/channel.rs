//! Quantum channels on a two-transmon space as row-major Liouville matrices.

use crate::dynamics::HilbertSpace;
use crate::error::Result;
use crate::linalg::{apply_superop, c, identity, trace, unitary_superop, vec_rows, CMat};

#[derive(Debug, Clone)]
pub struct Channel {
    pub superop: CMat,
    space: HilbertSpace,
}

impl Channel {
    pub fn new(superop: CMat, levels: usize) -> Result<Self> {
        let space = HilbertSpace::new(levels)?;
        let d2 = space.dimension() * space.dimension();
        assert_eq!(superop.shape(), (d2, d2), "Liouville matrix shape");
        Ok(Channel { superop, space })
    }

    pub fn identity(levels: usize) -> Result<Self> {
        let d = HilbertSpace::new(levels)?.dimension();
        Channel::new(identity(d * d), levels)
    }

    /// Unitary channel of a 4×4 operator, acting as identity on leakage levels.
    pub fn from_unitary(u4: &CMat, levels: usize) -> Result<Self> {
        let space = HilbertSpace::new(levels)?;
        Channel::new(unitary_superop(&space.embed_unitary(u4)), levels)
    }

    /// Two-qubit depolarizing channel `ρ ↦ λρ + (1-λ)·tr(ρ)·I/4`.
    pub fn depolarizing(lambda: f64) -> Self {
        let v = vec_rows(&identity(4));
        let mut s = identity(16) * c(lambda, 0.0);
        for i in 0..16 {
            for j in 0..16 {
                s[(i, j)] += v[i] * v[j] * ((1.0 - lambda) / 4.0);
            }
        }
        Channel {
            superop: s,
            space: HilbertSpace::new(2).expect("two levels"),
        }
    }

    /// Depolarizing strength giving average gate fidelity `f`.
    pub fn depolarizing_lambda(f: f64) -> f64 {
        (4.0 * f - 1.0) / 3.0
    }

    pub fn levels(&self) -> usize {
        self.space.levels()
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// `other` after `self`.
    pub fn then(&self, other: &Channel) -> Channel {
        assert_eq!(self.levels(), other.levels());
        Channel {
            superop: &other.superop * &self.superop,
            space: self.space,
        }
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        apply_superop(&self.superop, rho)
    }

    /// Maps a 4×4 operator on the computational block and returns the
    /// computational block of the output.
    pub fn apply_computational(&self, rho4: &CMat) -> CMat {
        self.space.project(&self.apply(&self.space.embed_block(rho4)))
    }

    /// Entanglement fidelity to the unitary `u4` on the computational subspace.
    pub fn process_fidelity(&self, u4: &CMat) -> f64 {
        let mut acc = c(0.0, 0.0);
        for a in 0..4 {
            for b in 0..4 {
                let mut e = CMat::zeros(4, 4);
                e[(a, b)] = c(1.0, 0.0);
                let out = self.apply_computational(&e);
                acc += (u4.adjoint() * out * u4)[(a, b)];
            }
        }
        acc.re / 16.0
    }

    pub fn average_gate_fidelity(&self, u4: &CMat) -> f64 {
        average_from_process(self.process_fidelity(u4))
    }

    /// Population left in the computational subspace averaged over a basis.
    pub fn mean_leakage(&self) -> f64 {
        let mut lost = 0.0;
        for a in 0..4 {
            let mut e = CMat::zeros(4, 4);
            e[(a, a)] = c(1.0, 0.0);
            lost += 1.0 - trace(&self.apply_computational(&e)).re;
        }
        lost / 4.0
    }
}

/// `(d·F_pro + 1)/(d + 1)` with `d = 4`.
pub fn average_from_process(process: f64) -> f64 {
    (4.0 * process + 1.0) / 5.0
}
