//! Density-matrix states and projective Pauli readout.

use serde::{Deserialize, Serialize};

use crate::dynamics::hilbert::HilbertSpace;
use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_error, pauli, trace, CMat, C64};

const STATE_TOL: f64 = 1e-8;

/// Density matrix on the full transmon-pair space, expressed in the
/// computational frame.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    rho: CMat,
}

impl QuantumState {
    /// Validated density matrix: Hermitian, unit trace, positive semidefinite.
    pub fn from_matrix(rho: CMat) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::config("state", "density matrix must be square"));
        }
        if hermiticity_error(&rho) > STATE_TOL {
            return Err(Error::config("state", "density matrix is not Hermitian"));
        }
        if (trace(&rho).re - 1.0).abs() > STATE_TOL {
            return Err(Error::config("state", "density matrix trace must be 1"));
        }
        let herm = (&rho + rho.adjoint()) * c(0.5, 0.0);
        let min = herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -STATE_TOL {
            return Err(Error::config("state", "density matrix has a negative eigenvalue"));
        }
        Ok(QuantumState { rho })
    }

    pub(crate) fn from_matrix_unchecked(rho: CMat) -> Self {
        QuantumState { rho }
    }

    pub fn pure(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::config("state", "ket must be normalised"));
        }
        let d = ket.len();
        Ok(QuantumState {
            rho: CMat::from_fn(d, d, |i, j| ket[i] * ket[j].conj()),
        })
    }

    /// Product of single-qubit computational-subspace kets, leakage levels empty.
    pub fn product(space: &HilbertSpace, control: [C64; 2], target: [C64; 2]) -> Result<Self> {
        let mut ket = vec![C64::new(0.0, 0.0); space.dimension()];
        for (a, ca) in control.iter().enumerate() {
            for (b, tb) in target.iter().enumerate() {
                ket[space.index(a, b)] = ca * tb;
            }
        }
        Self::pure(&ket)
    }

    /// `|n1 n2>`.
    pub fn basis(space: &HilbertSpace, n1: usize, n2: usize) -> Self {
        let d = space.dimension();
        let mut rho = CMat::zeros(d, d);
        let k = space.index(n1, n2);
        rho[(k, k)] = c(1.0, 0.0);
        QuantumState { rho }
    }

    pub fn rho(&self) -> &CMat {
        &self.rho
    }

    pub fn into_matrix(self) -> CMat {
        self.rho
    }

    pub fn dimension(&self) -> usize {
        self.rho.nrows()
    }

    /// Population outside the two-qubit computational subspace.
    pub fn leakage(&self, space: &HilbertSpace) -> f64 {
        let p: f64 = space.computational().iter().map(|&k| self.rho[(k, k)].re).sum();
        (1.0 - p).max(0.0)
    }

    /// Two-qubit block renormalised to unit trace.
    pub fn computational_block(&self, space: &HilbertSpace) -> CMat {
        let block = space.project(&self.rho);
        let p = trace(&block).re;
        if p > 0.0 {
            block / c(p, 0.0)
        } else {
            block
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliReading {
    /// Expectation conditioned on the computational subspace, in [-1, 1].
    pub expectation: f64,
    pub leakage: f64,
}

/// Expectation of the Pauli `axis` on qubit `qubit` (0 control, 1 target),
/// renormalised to the computational subspace.
pub fn measure_pauli(space: &HilbertSpace, state: &QuantumState, qubit: usize, axis: Axis) -> PauliReading {
    let block = state.computational_block(space);
    let s = pauli(axis.index() + 1);
    let op = if qubit == 0 {
        crate::linalg::kron(&s, &CMat::identity(2, 2))
    } else {
        crate::linalg::kron(&CMat::identity(2, 2), &s)
    };
    let e = trace(&(op * block)).re.clamp(-1.0, 1.0);
    PauliReading {
        expectation: e,
        leakage: state.leakage(space),
    }
}
