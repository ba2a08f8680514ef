//! Standard and interleaved randomized benchmarking with ideal Cliffords.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarking::channel::Channel;
use crate::benchmarking::clifford::{CliffordGroup, Tableau};
use crate::benchmarking::qpt::gate_channel;
use crate::calibration::GateSpec;
use crate::device::DeviceConfig;
use crate::dynamics::{HilbertSpace, Noise};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat};

pub const DEFAULT_LENGTHS: [usize; 6] = [2, 4, 8, 16, 32, 48];
pub const DEFAULT_SEQUENCES: usize = 30;
pub const DEFAULT_BOOTSTRAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RbMode {
    Reference,
    Interleaved,
}

impl RbMode {
    pub fn label(self) -> &'static str {
        match self {
            RbMode::Reference => "reference",
            RbMode::Interleaved => "interleaved",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RbOptions {
    pub lengths: Vec<usize>,
    pub n_sequences: usize,
    pub bootstrap: usize,
    pub seed: u64,
}

impl Default for RbOptions {
    fn default() -> Self {
        RbOptions {
            lengths: DEFAULT_LENGTHS.to_vec(),
            n_sequences: DEFAULT_SEQUENCES,
            bootstrap: DEFAULT_BOOTSTRAP,
            seed: 0,
        }
    }
}

impl RbOptions {
    pub fn validate(&self) -> Result<()> {
        let mut distinct = self.lengths.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 2 {
            return Err(Error::config("rb.lengths", "at least two distinct sequence lengths"));
        }
        if self.n_sequences < 10 {
            return Err(Error::config("rb.n_sequences", "at least 10 sequences per length"));
        }
        Ok(())
    }
}

/// `A·p^m + B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub a: f64,
    pub p: f64,
    pub b: f64,
}

impl DecayFit {
    pub fn eval(&self, m: f64) -> f64 {
        self.a * self.p.powf(m) + self.b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbCurve {
    pub mode: RbMode,
    pub lengths: Vec<usize>,
    pub survival: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Ground-state population per length, per sequence.
    pub samples: Vec<Vec<f64>>,
    pub fit: DecayFit,
    /// Decay parameter of each bootstrap resample.
    #[serde(skip)]
    pub bootstrap_p: Vec<f64>,
}

/// Bounded least squares for `A·p^m + B`, `0 ≤ p ≤ 1`, by variable projection.
/// The flag reports a decay pinned to a bound.
pub fn fit_decay(lengths: &[usize], y: &[f64]) -> (DecayFit, bool) {
    if y.iter().all(|v| (v - y[0]).abs() < 1e-12) {
        return (DecayFit { a: 0.0, p: 1.0, b: y[0] }, false);
    }
    let solve = |p: f64| -> (f64, f64, f64) {
        // linear LS in (A, B)
        let n = y.len() as f64;
        let xs: Vec<f64> = lengths.iter().map(|&m| p.powi(m as i32)).collect();
        let sx: f64 = xs.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(y).map(|(x, v)| x * v).sum();
        let det = n * sxx - sx * sx;
        let (a, b) = if det.abs() < 1e-300 {
            (0.0, sy / n)
        } else {
            ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
        };
        let r: f64 = xs.iter().zip(y).map(|(x, v)| (a * x + b - v).powi(2)).sum();
        (r, a, b)
    };
    const GRID: usize = 2000;
    let mut best = (f64::INFINITY, 0usize);
    for k in 0..=GRID {
        let r = solve(k as f64 / GRID as f64).0;
        if r < best.0 {
            best = (r, k);
        }
    }
    let step = 1.0 / GRID as f64;
    let (mut lo, mut hi) = (
        (best.1 as f64 * step - step).max(0.0),
        (best.1 as f64 * step + step).min(1.0),
    );
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if solve(x1).0 < solve(x2).0 {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let p = 0.5 * (lo + hi);
    let (_, a, b) = solve(p);
    let pinned = !(1e-9..=1.0 - 1e-9).contains(&p) || a < 0.0;
    (DecayFit { a, p, b }, pinned)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn stderr(v: &[f64]) -> f64 {
    let m = mean(v);
    let n = v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0) / n).sqrt()
}

/// Interleaved operation: noisy channel and the Clifford index of its ideal.
pub struct Interleave<'a> {
    pub channel: &'a Channel,
    pub ideal: usize,
}

impl<'a> Interleave<'a> {
    pub fn new(channel: &'a Channel, ideal: &CMat) -> Result<Self> {
        let t = Tableau::from_unitary(ideal)
            .ok_or_else(|| Error::config("gate", "interleaved gate is not a Clifford"))?;
        let ideal = CliffordGroup::get()
            .lookup(&t)
            .ok_or_else(|| Error::config("gate", "interleaved gate is not a Clifford"))?;
        Ok(Interleave { channel, ideal })
    }
}

fn sequence_rng(seed: u64, length_index: usize, sequence: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((length_index as u64) << 32) | sequence as u64);
    rng
}

fn conjugate(u: &CMat, rho: &CMat) -> CMat {
    u * rho * u.adjoint()
}

/// RB on `levels` transmon levels; ideal Cliffords act as identity on leakage states.
pub fn run_rb_channel(interleave: Option<&Interleave>, levels: usize, opts: &RbOptions) -> Result<RbCurve> {
    opts.validate()?;
    let group = CliffordGroup::get();
    let space = HilbertSpace::new(levels)?;
    let d = space.dimension();
    let mut samples = Vec::with_capacity(opts.lengths.len());
    for (li, &m) in opts.lengths.iter().enumerate() {
        let mut row = Vec::with_capacity(opts.n_sequences);
        for s in 0..opts.n_sequences {
            let mut rng = sequence_rng(opts.seed, li, s);
            let mut rho = CMat::zeros(d, d);
            rho[(0, 0)] = c(1.0, 0.0);
            let mut net = 0usize;
            for _ in 0..m {
                let g = group.sample(&mut rng);
                rho = conjugate(&space.embed_unitary(&group.element(g).unitary), &rho);
                net = group.compose(g, net);
                if let Some(il) = interleave {
                    rho = il.channel.apply(&rho);
                    net = group.compose(il.ideal, net);
                }
            }
            let rec = group.inverse(net);
            rho = conjugate(&space.embed_unitary(&group.element(rec).unitary), &rho);
            row.push(rho[(0, 0)].re.clamp(0.0, 1.0));
        }
        samples.push(row);
    }
    let survival: Vec<f64> = samples.iter().map(|r| mean(r)).collect();
    let (fit, pinned) = fit_decay(&opts.lengths, &survival);
    if pinned {
        return Err(Error::FitFailure(format!("decay parameter pinned at p = {:.6}", fit.p)));
    }
    let mut boot_rng = sequence_rng(opts.seed ^ 0x5eed_b007, usize::MAX >> 32, 0);
    let bootstrap_p = (0..opts.bootstrap)
        .map(|_| {
            let y: Vec<f64> = samples
                .iter()
                .map(|r| {
                    let n = r.len();
                    (0..n).map(|_| r[boot_rng.gen_range(0..n)]).sum::<f64>() / n as f64
                })
                .collect();
            fit_decay(&opts.lengths, &y).0.p
        })
        .collect();
    Ok(RbCurve {
        mode: if interleave.is_some() {
            RbMode::Interleaved
        } else {
            RbMode::Reference
        },
        lengths: opts.lengths.clone(),
        stderr: samples.iter().map(|r| stderr(r)).collect(),
        survival,
        samples,
        fit,
        bootstrap_p,
    })
}

/// RB on the simulated device: reference when `gate` is `None`, otherwise
/// interleaving the Lindblad-simulated gate.
pub fn run_rb(cfg: &DeviceConfig, gate: Option<&GateSpec>, opts: &RbOptions) -> Result<RbCurve> {
    match gate {
        None => run_rb_channel(None, cfg.levels, opts),
        Some(g) => {
            let ch = gate_channel(cfg, g, Noise::Lindblad)?;
            run_rb_channel(Some(&Interleave::new(&ch, &g.ideal_unitary())?), cfg.levels, opts)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbFidelity {
    pub fidelity: f64,
    /// 90% bootstrap interval.
    pub interval: (f64, f64),
}

fn rb_formula(p_ref: f64, p_int: f64) -> f64 {
    1.0 - 0.75 * (1.0 - p_int / p_ref)
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, f) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - f) + sorted[i + 1] * f
    } else {
        sorted[i]
    }
}

/// `F = 1 - (d-1)/d·(1 - p_int/p_ref)` with a paired-bootstrap 90% interval.
pub fn interleaved_fidelity(reference: &RbCurve, interleaved: &RbCurve) -> Result<RbFidelity> {
    let (pr, pi) = (reference.fit.p, interleaved.fit.p);
    if pr < 1e-3 {
        return Err(Error::DivisionDegenerate(pr));
    }
    let fidelity = rb_formula(pr, pi);
    let mut boots: Vec<f64> = reference
        .bootstrap_p
        .iter()
        .zip(&interleaved.bootstrap_p)
        .filter(|(r, _)| **r >= 1e-3)
        .map(|(r, i)| rb_formula(*r, *i))
        .collect();
    boots.sort_by(f64::total_cmp);
    let interval = if boots.is_empty() {
        (fidelity, fidelity)
    } else {
        (percentile(&boots, 0.05), percentile(&boots, 0.95))
    };
    Ok(RbFidelity { fidelity, interval })
}

/// `mode,length,mean,stderr` rows for each curve.
pub fn write_rb_csv(path: &Path, curves: &[&RbCurve]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "mode,length,mean,stderr")?;
    for curve in curves {
        for ((m, y), e) in curve.lengths.iter().zip(&curve.survival).zip(&curve.stderr) {
            writeln!(f, "{},{m},{y:.12e},{e:.12e}", curve.mode.label())?;
        }
    }
    Ok(())
}
