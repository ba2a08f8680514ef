//! Quantum process tomography: Pauli transfer matrix by linear inversion,
//! converted to the χ matrix in the basis `II, IX, …, ZZ` (control first).

use std::io::Write;
use std::path::Path;

use crate::benchmarking::channel::{average_from_process, Channel};
use crate::calibration::gate::{program_superop, GateSpec};
use crate::device::DeviceConfig;
use crate::dynamics::{Noise, Simulator};
use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_part, kron, pauli2, trace, CMat, C64, PAULI2_LABELS};

#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix {
    pub entries: CMat,
}

/// Single-qubit preparations `|0⟩, |1⟩, |+⟩, |+i⟩`.
fn single_inputs() -> [CMat; 4] {
    let h = 0.5;
    [
        CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
        CMat::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(h, 0.0)]),
        CMat::from_row_slice(2, 2, &[c(h, 0.0), c(0.0, -h), c(0.0, h), c(h, 0.0)]),
    ]
}

/// The 16 product inputs, control index major.
pub fn tomography_inputs() -> Vec<CMat> {
    let s = single_inputs();
    let mut v = Vec::with_capacity(16);
    for a in &s {
        for b in &s {
            v.push(kron(a, b));
        }
    }
    v
}

fn pauli_vector(rho: &CMat) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_fn(16, |k, _| trace(&(pauli2(k) * rho)).re)
}

/// Normalised PTM `R_ij = tr(P_i Λ(P_j))/4` from measured input/output Pauli
/// vectors. The `II` output is fixed to 1 (trace preservation assumed).
pub fn reconstruct_ptm(inputs: &[CMat], outputs: &[CMat]) -> Result<nalgebra::DMatrix<f64>> {
    let n = inputs.len();
    let mut a = nalgebra::DMatrix::<f64>::zeros(16, n);
    let mut b = nalgebra::DMatrix::<f64>::zeros(16, n);
    for (k, (i, o)) in inputs.iter().zip(outputs).enumerate() {
        a.set_column(k, &pauli_vector(i));
        let mut ov = pauli_vector(o);
        ov[0] = 1.0;
        b.set_column(k, &ov);
    }
    let svd = a.clone().svd(true, true);
    let smin = svd.singular_values.min();
    let smax = svd.singular_values.max();
    if n < 16 || smin < 1e-9 * smax {
        return Err(Error::ReconstructionIllConditioned);
    }
    let pinv = svd.pseudo_inverse(1e-12).map_err(|_| Error::ReconstructionIllConditioned)?;
    Ok(b * pinv)
}

/// `χ_mn = ⟨v_m|J|v_n⟩/16` with `J` the Choi matrix and `v_m = vec(P_m)`.
pub fn chi_from_ptm(r: &nalgebra::DMatrix<f64>) -> ChiMatrix {
    let paulis: Vec<CMat> = (0..16).map(pauli2).collect();
    // Λ(|a⟩⟨b|) = Σ_ij R_ij tr(P_j|a⟩⟨b|) P_i / 4
    let mut choi = CMat::zeros(16, 16);
    for a in 0..4 {
        for b in 0..4 {
            let mut out = CMat::zeros(4, 4);
            for j in 0..16 {
                let coeff = paulis[j][(b, a)];
                if coeff == c(0.0, 0.0) {
                    continue;
                }
                for i in 0..16 {
                    if r[(i, j)] != 0.0 {
                        out += &paulis[i] * (coeff * r[(i, j)] * 0.25);
                    }
                }
            }
            for x in 0..4 {
                for y in 0..4 {
                    choi[(4 * a + x, 4 * b + y)] = out[(x, y)];
                }
            }
        }
    }
    let vs: Vec<Vec<C64>> = paulis
        .iter()
        .map(|p| (0..16).map(|k| p[(k % 4, k / 4)]).collect())
        .collect();
    let chi = CMat::from_fn(16, 16, |m, n| {
        let mut acc = c(0.0, 0.0);
        for x in 0..16 {
            if vs[m][x] == c(0.0, 0.0) {
                continue;
            }
            for y in 0..16 {
                acc += vs[m][x].conj() * choi[(x, y)] * vs[n][y];
            }
        }
        acc / 16.0
    });
    ChiMatrix { entries: chi }
}

impl ChiMatrix {
    /// Nearest Hermitian, unit-trace matrix.
    pub fn normalised(self) -> Self {
        let h = hermitian_part(&self.entries);
        let t = trace(&h).re;
        ChiMatrix { entries: h / c(t, 0.0) }
    }

    /// χ of a unitary: `u_m u_n*` with `U = Σ u_m P_m`.
    pub fn from_unitary(u4: &CMat) -> Self {
        let u: Vec<C64> = (0..16).map(|k| trace(&(pauli2(k) * u4)) / 4.0).collect();
        ChiMatrix {
            entries: CMat::from_fn(16, 16, |m, n| u[m] * u[n].conj()),
        }
    }

    pub fn apply(&self, rho: &CMat) -> CMat {
        let mut out = CMat::zeros(4, 4);
        for m in 0..16 {
            for n in 0..16 {
                let w = self.entries[(m, n)];
                if w.norm() > 0.0 {
                    out += pauli2(m) * rho * pauli2(n) * w;
                }
            }
        }
        out
    }

    pub fn hermiticity_error(&self) -> f64 {
        crate::linalg::hermiticity_error(&self.entries)
    }

    pub fn trace(&self) -> f64 {
        trace(&self.entries).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_part(&self.entries).symmetric_eigen().eigenvalues.min()
    }

    /// Hermitian within 1e-8, unit trace within 1e-6, PSD within −1e-6.
    pub fn check_invariants(&self) -> bool {
        self.hermiticity_error() < 1e-8 && (self.trace() - 1.0).abs() < 1e-6 && self.min_eigenvalue() > -1e-6
    }

    /// Rows of `label, re/im pairs` with a labelled header.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        let mut header = String::from("basis");
        for l in PAULI2_LABELS {
            header.push_str(&format!(",{l}_re,{l}_im"));
        }
        writeln!(f, "{header}")?;
        for (m, label) in PAULI2_LABELS.iter().enumerate() {
            let mut line = label.to_string();
            for n in 0..16 {
                let z = self.entries[(m, n)];
                line.push_str(&format!(",{:.12e},{:.12e}", z.re, z.im));
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Tomography of an arbitrary channel with ideal preparation and readout.
pub fn channel_tomography(channel: &Channel) -> Result<ChiMatrix> {
    let inputs = tomography_inputs();
    let outputs: Vec<CMat> = inputs.iter().map(|r| channel.apply_computational(r)).collect();
    let r = reconstruct_ptm(&inputs, &outputs)?;
    Ok(chi_from_ptm(&r).normalised())
}

/// Computational-frame channel of a simulated gate.
pub fn gate_channel(cfg: &DeviceConfig, gate: &GateSpec, noise: Noise) -> Result<Channel> {
    let sim = Simulator::new(cfg)?;
    let s = program_superop(&sim, &gate.program(cfg), noise)?;
    Channel::new(s, cfg.levels)
}

/// Process tomography of `gate` simulated on `cfg`.
pub fn process_tomography(gate: &GateSpec, cfg: &DeviceConfig, noise: Noise) -> Result<ChiMatrix> {
    channel_tomography(&gate_channel(cfg, gate, noise)?)
}

/// `(process fidelity, average gate fidelity)` of `chi` to the unitary `ideal`.
pub fn fidelity_from_chi(chi: &ChiMatrix, ideal: &CMat) -> (f64, f64) {
    // tr(χ_ideal χ) = u† χ u
    let u = nalgebra::DVector::from_fn(16, |k, _| trace(&(pauli2(k) * ideal)) / 4.0);
    let f = (u.adjoint() * &chi.entries * &u)[(0, 0)].re;
    (f, average_from_process(f))
}
