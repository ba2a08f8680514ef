//! Dressed eigenbasis of the static coupled-transmon Hamiltonian and the
//! rotating frames used by the simulator.
//!
//! Three frames appear:
//! * the *drive frame*: both transmons rotate at the target's dressed frequency
//!   `ω̃2`, the carrier of the CR and cancellation tones, so those tones are static;
//! * the *qubit frame*: each transmon rotates at its own dressed frequency,
//!   bare operator basis;
//! * the *computational frame*: dressed eigenbasis rotating at the dressed
//!   frequencies. Free evolution there is a pure `ZZ` phase. All states handed
//!   to or returned by the simulator live in this frame.

use crate::device::{AngularParams, DeviceConfig};
use crate::dynamics::hilbert::HilbertSpace;
use crate::dynamics::pulse::{Carrier, DriveSettings, Port, Schedule};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Both transmons at the target's dressed frequency.
    Drive,
    /// Each transmon at its own dressed frequency.
    Qubit,
}

#[derive(Debug, Clone)]
pub struct DressedFrame {
    pub space: HilbertSpace,
    pub params: AngularParams,
    /// Classical cross-talk `m12 e^{iφ}`.
    pub crosstalk: C64,
    /// Static Hamiltonian in the drive frame (bare basis), rad/s.
    pub h_static: CMat,
    /// Dressed eigenvectors as columns, column `k` continuously connected to bare state `k`.
    pub w: CMat,
    /// Dressed energies in the drive frame, rad/s.
    pub energies: Vec<f64>,
    /// `ω̃1 − ω̃2`, rad/s.
    pub delta: f64,
    /// Dressed-minus-bare frequency shifts `(ω̃1 − ω1, ω̃2 − ω2)`, rad/s.
    pub shifts: (f64, f64),
    pub a1: CMat,
    pub a2: CMat,
    pub n1: CMat,
    pub n2: CMat,
    coupling: CMat,
}

impl DressedFrame {
    pub fn new(cfg: &DeviceConfig) -> Result<Self> {
        let space = HilbertSpace::new(cfg.levels)?;
        let p = cfg.angular();
        let a1 = space.a(1);
        let a2 = space.a(2);
        let n1 = a1.adjoint() * &a1;
        let n2 = a2.adjoint() * &a2;
        let d = space.dimension();
        let id = CMat::identity(d, d);
        let duffing = |n: &CMat, alpha: f64| (n * (n - &id)) * c(0.5 * alpha, 0.0);
        let coupling = (a1.adjoint() * &a2 + &a1 * a2.adjoint()) * c(p.j, 0.0);
        let h_w2 = &n1 * c(p.omega1 - p.omega2, 0.0) + duffing(&n1, p.alpha1) + duffing(&n2, p.alpha2) + &coupling;

        let eig = h_w2.clone().symmetric_eigen();
        let assignment = assign_labels(&eig.eigenvectors)?;
        let mut w = CMat::zeros(d, d);
        let mut e_w2 = vec![0.0; d];
        for (bare, &col) in assignment.iter().enumerate() {
            let v = eig.eigenvectors.column(col);
            let overlap = v[bare];
            let fix = overlap.conj() / overlap.norm();
            for r in 0..d {
                w[(r, bare)] = v[r] * fix;
            }
            e_w2[bare] = eig.eigenvalues[col];
        }
        let [k00, k01, k10, k11] = space.computational();
        let d2 = 0.5 * ((e_w2[k01] - e_w2[k00]) + (e_w2[k11] - e_w2[k10]));
        let d1 = 0.5 * ((e_w2[k10] - e_w2[k00]) + (e_w2[k11] - e_w2[k01]));
        let total = &n1 + &n2;
        let h_static = &h_w2 - &total * c(d2, 0.0);
        let energies = (0..d)
            .map(|k| {
                let (m1, m2) = space.labels(k);
                e_w2[k] - d2 * (m1 + m2) as f64
            })
            .collect();
        let delta = d1 - d2;
        let shifts = (d1 - (p.omega1 - p.omega2), d2);
        Ok(DressedFrame {
            space,
            params: p,
            crosstalk: C64::from_polar(cfg.crosstalk_amp, cfg.crosstalk_phase),
            h_static,
            w,
            energies,
            delta,
            shifts,
            a1,
            a2,
            n1,
            n2,
            coupling,
        })
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    /// Static `ZZ` coefficient of the computational frame, `ε` in the
    /// `2H = ε ZZ` convention, rad/s.
    pub fn zz_rate(&self) -> f64 {
        let [k00, k01, k10, k11] = self.space.computational();
        let e = &self.energies;
        0.5 * (e[k00] - e[k01] - e[k10] + e[k11])
    }

    /// Coefficients `(g1, g2)` of `a1†` and `a2†` contributed by the schedule at
    /// time `t`, in the requested frame.
    pub fn drive_coefficients(&self, schedule: &Schedule, t: f64, frame: Frame) -> (C64, C64) {
        let mut g1 = C64::new(0.0, 0.0);
        let mut g2 = C64::new(0.0, 0.0);
        for tone in &schedule.tones {
            if t < tone.start || t > tone.end() {
                continue;
            }
            let s = tone.value(t);
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            // Carrier phase relative to each transmon's frame.
            let (ph1, ph2) = match (frame, tone.carrier) {
                (Frame::Drive, Carrier::Target) => (C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
                (Frame::Drive, Carrier::Control) => {
                    let r = C64::from_polar(1.0, -self.delta * t);
                    (r, r)
                }
                (Frame::Qubit, Carrier::Target) => (C64::from_polar(1.0, self.delta * t), C64::new(1.0, 0.0)),
                (Frame::Qubit, Carrier::Control) => (C64::new(1.0, 0.0), C64::from_polar(1.0, -self.delta * t)),
            };
            match tone.port {
                Port::P1 => {
                    g1 += 0.5 * s * ph1;
                    g2 += 0.5 * self.crosstalk * s * ph2;
                }
                Port::P2 => {
                    g2 += 0.5 * s * ph2;
                }
            }
        }
        (g1, g2)
    }

    /// Static part of the Hamiltonian in `frame` at time `t`.
    pub fn static_part(&self, t: f64, frame: Frame) -> CMat {
        match frame {
            Frame::Drive => self.h_static.clone(),
            Frame::Qubit => {
                let mut h = &self.h_static - &self.coupling - &self.n1 * c(self.delta, 0.0);
                let r = C64::from_polar(self.params.j, self.delta * t);
                let hop = self.a1.adjoint() * &self.a2;
                h += &hop * r + hop.adjoint() * r.conj();
                h
            }
        }
    }

    /// Full Hamiltonian at time `t` in `frame`, rad/s.
    pub fn hamiltonian(&self, schedule: &Schedule, t: f64, frame: Frame) -> CMat {
        let mut h = self.static_part(t, frame);
        let (g1, g2) = self.drive_coefficients(schedule, t, frame);
        self.add_drive(&mut h, g1, g2);
        h
    }

    pub(crate) fn add_drive(&self, h: &mut CMat, g1: C64, g2: C64) {
        if g1 != C64::new(0.0, 0.0) {
            let a1d = self.a1.adjoint();
            *h += &a1d * g1 + &self.a1 * g1.conj();
        }
        if g2 != C64::new(0.0, 0.0) {
            let a2d = self.a2.adjoint();
            *h += &a2d * g2 + &self.a2 * g2.conj();
        }
    }

    /// Diagonal of `R(t) = exp(iΔ̃ n1 t)`, mapping drive-frame to qubit-frame states.
    pub fn frame_rotation(&self, t: f64) -> Vec<C64> {
        (0..self.dimension())
            .map(|k| {
                let (m1, _) = self.space.labels(k);
                C64::from_polar(1.0, self.delta * m1 as f64 * t)
            })
            .collect()
    }

    /// `V(T) = exp(iΔ̃ n1 T) W†`, mapping drive-frame states at time `T` to the
    /// computational frame.
    pub fn to_computational(&self, t: f64) -> CMat {
        let r = self.frame_rotation(t);
        let mut v = self.w.adjoint();
        for (i, ri) in r.iter().enumerate() {
            for j in 0..self.dimension() {
                v[(i, j)] *= ri;
            }
        }
        v
    }
}

/// Greedy max-overlap assignment of eigenvector columns to bare labels.
fn assign_labels(vecs: &CMat) -> Result<Vec<usize>> {
    let d = vecs.nrows();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for bare in 0..d {
        for col in 0..d {
            pairs.push((vecs[(bare, col)].norm_sqr(), bare, col));
        }
    }
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut by_bare = vec![usize::MAX; d];
    let mut used = vec![false; d];
    for (w, bare, col) in pairs {
        if by_bare[bare] == usize::MAX && !used[col] {
            if w < 0.5 {
                return Err(Error::Frame(format!(
                    "bare state {bare} is strongly hybridised (overlap {w:.3}); dressed labels are ambiguous"
                )));
            }
            by_bare[bare] = col;
            used[col] = true;
        }
    }
    Ok(by_bare)
}

/// Qubit-frame Hamiltonian (rad/s) at time `t` of a single flat-top CR pulse
/// of length `drive.gate_time` with its cancellation tone.
pub fn build_hamiltonian(cfg: &DeviceConfig, drive: &DriveSettings, t: f64) -> Result<CMat> {
    cfg.validate()?;
    drive.validate()?;
    if !(0.0..=drive.gate_time).contains(&t) {
        return Err(Error::Frame(format!(
            "time {t:.4e} s outside pulse support [0, {:.4e}] s",
            drive.gate_time
        )));
    }
    let plateau = (drive.gate_time - 2.0 * drive.ramp_time).max(0.0);
    let schedule = crate::tomography::continuous_schedule(drive, plateau, &cfg.distortion);
    Ok(DressedFrame::new(cfg)?.hamiltonian(&schedule, t, Frame::Qubit))
}
