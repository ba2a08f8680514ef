//! Fixed-axis, fixed-frequency rotation fits of Bloch trajectories.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tomography::trajectory::{BlochTrajectory, TickUnit};

/// Per-axis variance below which no rotation is considered resolvable.
pub const DEGENERATE_VARIANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationFit {
    /// Unit rotation axis. Its largest component is non-negative; the sense
    /// of rotation is carried by the sign of `rate`.
    pub axis: [f64; 3],
    /// Cycles per second, or cycles per gate for repetition ticks.
    pub rate: f64,
    /// Fitted Bloch vector at tick zero.
    pub offset: [f64; 3],
    /// Root-mean-square misfit over all three axes.
    pub residual: f64,
    pub unit: TickUnit,
}

impl RotationFit {
    /// Rotation vector `rate·axis`.
    pub fn vector(&self) -> [f64; 3] {
        [self.axis[0] * self.rate, self.axis[1] * self.rate, self.axis[2] * self.rate]
    }

    /// Model Bloch vector at `tick`.
    pub fn predict(&self, tick: f64) -> [f64; 3] {
        let w = Vector3::from(self.vector()) * TAU;
        let r = rotate(&w, tick, &Vector3::from(self.offset));
        [r.x, r.y, r.z]
    }
}

/// Rodrigues rotation of `r0` by angle `|w|·t` about `w`.
fn rotate(w: &Vector3<f64>, t: f64, r0: &Vector3<f64>) -> Vector3<f64> {
    let norm = w.norm();
    if norm == 0.0 {
        return *r0;
    }
    let n = w / norm;
    let (s, c) = (norm * t).sin_cos();
    r0 * c + n.cross(r0) * s + n * n.dot(r0) * (1.0 - c)
}

/// Options for [`fit_rotation_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Upper bound on |rate| (Nyquist window for sparse repetition data).
    pub max_rate: Option<f64>,
}

impl FitOptions {
    pub fn for_unit(unit: TickUnit) -> Self {
        FitOptions {
            max_rate: match unit {
                TickUnit::Gates => Some(0.5),
                TickUnit::Seconds => None,
            },
        }
    }
}

/// Least-squares fit of `r(t) = R_axis(2π·rate·t)·r(0)`.
pub fn fit_rotation(traj: &BlochTrajectory) -> Result<RotationFit> {
    fit_rotation_with(traj, FitOptions::for_unit(traj.unit))
}

pub fn fit_rotation_with(traj: &BlochTrajectory, opts: FitOptions) -> Result<RotationFit> {
    traj.validate()?;
    let n = traj.len();
    let variance = traj
        .axes()
        .iter()
        .map(|a| {
            let m = a.iter().sum::<f64>() / n.max(1) as f64;
            a.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n.max(1) as f64
        })
        .fold(0.0, f64::max);
    if n < 3 || variance < DEGENERATE_VARIANCE {
        return Err(Error::FitDegenerate { variance });
    }

    let data: Vec<Vector3<f64>> = (0..n).map(|k| Vector3::from(traj.point(k))).collect();
    let t = &traj.ticks;
    let span = t[n - 1] - t[0];
    let nyquist = {
        let mut gaps: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).filter(|g| *g > 0.0).collect();
        gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        0.5 / gaps.get(gaps.len() / 2).copied().unwrap_or(1.0)
    };
    let f_max = opts.max_rate.map_or(nyquist, |m| m.min(nyquist));

    let mut best: Option<(f64, Vector3<f64>, Vector3<f64>)> = None;
    for f0 in spectral_peaks(t, &data, f_max, span, 3) {
        let (w0, r0) = seed(t, &data, f0);
        let (w, r, cost) = levenberg_marquardt(t, &data, w0, r0, opts.max_rate);
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, w, r));
        }
    }
    let (cost, w, r0) = best.expect("at least one seed");
    let omega = w.norm();
    let (mut axis, mut rate) = if omega > 0.0 {
        (w / omega, omega / TAU)
    } else {
        (Vector3::z(), 0.0)
    };
    let dominant = axis.iter().cloned().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    if dominant < 0.0 {
        axis = -axis;
        rate = -rate;
    }
    Ok(RotationFit {
        axis: [axis.x, axis.y, axis.z],
        rate,
        offset: [r0.x, r0.y, r0.z],
        residual: (cost / (3 * n) as f64).sqrt(),
        unit: traj.unit,
    })
}

/// Frequencies of the largest local maxima of the summed periodogram.
fn spectral_peaks(t: &[f64], data: &[Vector3<f64>], f_max: f64, span: f64, count: usize) -> Vec<f64> {
    let n = data.len();
    let mean: Vector3<f64> = data.iter().sum::<Vector3<f64>>() / n as f64;
    let df = if span > 0.0 { 0.1 / span } else { f_max / 100.0 };
    let bins = ((f_max / df).ceil() as usize).clamp(8, 20_000);
    let power: Vec<f64> = (0..=bins)
        .map(|b| {
            let f = f_max * b as f64 / bins as f64;
            let mut acc = [nalgebra::Complex::new(0.0, 0.0); 3];
            for (tk, r) in t.iter().zip(data) {
                let ph = nalgebra::Complex::from_polar(1.0, -TAU * f * tk);
                for a in 0..3 {
                    acc[a] += ph * (r[a] - mean[a]);
                }
            }
            acc.iter().map(|z| z.norm_sqr()).sum()
        })
        .collect();
    let mut peaks: Vec<(f64, f64)> = (0..=bins)
        .filter(|&b| {
            let left = if b == 0 { f64::NEG_INFINITY } else { power[b - 1] };
            let right = if b == bins { f64::NEG_INFINITY } else { power[b + 1] };
            power[b] >= left && power[b] >= right
        })
        .map(|b| (power[b], f_max * b as f64 / bins as f64))
        .collect();
    peaks.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut out: Vec<f64> = peaks.iter().take(count).map(|p| p.1).collect();
    if out.is_empty() {
        out.push(0.0);
    }
    out
}

/// Axis and initial vector from a per-axis sinusoid fit at frequency `f`.
fn seed(t: &[f64], data: &[Vector3<f64>], f: f64) -> (Vector3<f64>, Vector3<f64>) {
    let n = data.len();
    let omega = TAU * f;
    let design = DMatrix::from_fn(n, 3, |k, j| match j {
        0 => 1.0,
        1 => (omega * t[k]).cos(),
        _ => (omega * t[k]).sin(),
    });
    let svd = design.svd(true, true);
    let mut c = Vector3::zeros();
    let mut a = Vector3::zeros();
    let mut b = Vector3::zeros();
    for axis in 0..3 {
        let y = DVector::from_iterator(n, data.iter().map(|r| r[axis]));
        let coef = svd.solve(&y, 1e-12).unwrap_or_else(|_| DVector::zeros(3));
        c[axis] = coef[0];
        a[axis] = coef[1];
        b[axis] = coef[2];
    }
    let normal = a.cross(&b);
    let axis = if normal.norm() > 1e-12 {
        normal.normalize()
    } else if c.norm() > 1e-12 {
        c.normalize()
    } else {
        Vector3::z()
    };
    (axis * omega, c + a)
}

fn cost(t: &[f64], data: &[Vector3<f64>], w: &Vector3<f64>, r0: &Vector3<f64>) -> f64 {
    t.iter()
        .zip(data)
        .map(|(tk, r)| (rotate(w, *tk, r0) - r).norm_squared())
        .sum()
}

fn residuals(t: &[f64], data: &[Vector3<f64>], p: &[f64; 6]) -> DVector<f64> {
    let w = Vector3::new(p[0], p[1], p[2]);
    let r0 = Vector3::new(p[3], p[4], p[5]);
    let mut out = DVector::zeros(3 * data.len());
    for (k, (tk, r)) in t.iter().zip(data).enumerate() {
        let d = rotate(&w, *tk, &r0) - r;
        out[3 * k] = d.x;
        out[3 * k + 1] = d.y;
        out[3 * k + 2] = d.z;
    }
    out
}

fn levenberg_marquardt(
    t: &[f64],
    data: &[Vector3<f64>],
    w0: Vector3<f64>,
    r0: Vector3<f64>,
    max_rate: Option<f64>,
) -> (Vector3<f64>, Vector3<f64>, f64) {
    let tscale = t.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let wscale = 1.0 / tscale;
    // Parameters scaled to O(1): w·tscale and r0.
    let mut p = [w0.x / wscale, w0.y / wscale, w0.z / wscale, r0.x, r0.y, r0.z];
    let unscale = |p: &[f64; 6]| {
        [p[0] * wscale, p[1] * wscale, p[2] * wscale, p[3], p[4], p[5]]
    };
    let limit = max_rate.map(|m| TAU * m / wscale);
    let clamp = |p: &mut [f64; 6]| {
        if let Some(l) = limit {
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if n > l {
                for v in p.iter_mut().take(3) {
                    *v *= l / n;
                }
            }
        }
    };
    clamp(&mut p);
    let mut res = residuals(t, data, &unscale(&p));
    let mut c = res.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let h = 1e-7;
        let mut jac = DMatrix::zeros(res.len(), 6);
        for j in 0..6 {
            let mut q = p;
            q[j] += h;
            let rq = residuals(t, data, &unscale(&q));
            jac.set_column(j, &((rq - &res) / h));
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * &res;
        let mut improved = false;
        for _ in 0..20 {
            let mut a = jtj.clone();
            for i in 0..6 {
                a[(i, i)] += lambda * (jtj[(i, i)] + 1e-12);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let mut q = p;
            for i in 0..6 {
                q[i] += step[i];
            }
            clamp(&mut q);
            let rq = residuals(t, data, &unscale(&q));
            let cq = rq.norm_squared();
            if cq < c {
                let rel = (c - cq) / c.max(1e-300);
                p = q;
                res = rq;
                c = cq;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel < 1e-15 {
                    return finish(t, data, &unscale(&p));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    finish(t, data, &unscale(&p))
}

fn finish(t: &[f64], data: &[Vector3<f64>], p: &[f64; 6]) -> (Vector3<f64>, Vector3<f64>, f64) {
    let w = Vector3::new(p[0], p[1], p[2]);
    let r0 = Vector3::new(p[3], p[4], p[5]);
    let c = cost(t, data, &w, &r0);
    (w, r0, c)
}
