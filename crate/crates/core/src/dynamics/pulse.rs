//! Drive settings, pulse envelopes, the line-distortion model and pulse schedules.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::device::LineDistortion;
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Adjustable knobs of the cross-resonance gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSettings {
    /// `Ω12/2π`, Hz.
    pub cr_amp: f64,
    /// `θ12`, rad.
    pub cr_phase: f64,
    /// `Ω22/2π`, Hz.
    pub cancel_amp: f64,
    /// `θ22`, rad.
    pub cancel_phase: f64,
    /// CR time of the full echoed gate, s. Each half lasts `gate_time / 2`,
    /// ramps included.
    pub gate_time: f64,
    /// Raised-cosine edge duration, s.
    pub ramp_time: f64,
}

impl DriveSettings {
    pub fn zero(gate_time: f64, ramp_time: f64) -> Self {
        DriveSettings {
            cr_amp: 0.0,
            cr_phase: 0.0,
            cancel_amp: 0.0,
            cancel_phase: 0.0,
            gate_time,
            ramp_time,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cr_amp >= 0.0) || !self.cr_amp.is_finite() {
            return Err(Error::config("drive.cr_amp", "must be finite and >= 0"));
        }
        if !(self.cancel_amp >= 0.0) || !self.cancel_amp.is_finite() {
            return Err(Error::config("drive.cancel_amp", "must be finite and >= 0"));
        }
        if !(self.ramp_time >= 0.0) {
            return Err(Error::config("drive.ramp_time", "must be >= 0"));
        }
        if !(self.gate_time > 2.0 * self.ramp_time) {
            return Err(Error::config("drive.gate_time", "must exceed 2 * ramp_time"));
        }
        Ok(())
    }

    /// Cancellation tone as a complex amplitude `Ω22 e^{iθ22}` (Hz).
    pub fn cancel_vector(&self) -> C64 {
        C64::from_polar(self.cancel_amp, self.cancel_phase)
    }

    pub fn set_cancel_vector(&mut self, v: C64) {
        self.cancel_amp = v.norm();
        self.cancel_phase = if v.norm() > 0.0 { v.arg() } else { self.cancel_phase };
    }

    /// Duration of one CR half pulse, ramps included.
    pub fn half_duration(&self) -> f64 {
        0.5 * self.gate_time
    }

    /// `(ramp, plateau)` of one half pulse. Ramps longer than a quarter of
    /// the gate are shortened so the half is a pure raised-cosine bell.
    pub fn half_edges(&self) -> (f64, f64) {
        let ramp = self.ramp_time.min(0.25 * self.gate_time);
        (ramp, self.half_duration() - 2.0 * ramp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Flat,
    CosineRampUp,
    CosineRampDown,
}

impl Shape {
    fn value(self, u: f64) -> f64 {
        match self {
            Shape::Flat => 1.0,
            Shape::CosineRampUp => 0.5 * (1.0 - (PI * u).cos()),
            Shape::CosineRampDown => 0.5 * (1.0 + (PI * u).cos()),
        }
    }

    /// d(shape)/du
    fn slope(self, u: f64) -> f64 {
        match self {
            Shape::Flat => 0.0,
            Shape::CosineRampUp => 0.5 * PI * (PI * u).sin(),
            Shape::CosineRampDown => -0.5 * PI * (PI * u).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub shape: Shape,
    /// Rabi rate `Ω/2π`, Hz.
    pub amplitude: f64,
    pub phase: f64,
}

/// Piecewise analytic envelope. The complex value is
/// `2π·A·(f(t) + i·drag·f'(t))·e^{iθ}` in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseEnvelope {
    pub segments: Vec<Segment>,
    /// DRAG coefficient, s.
    #[serde(default)]
    pub drag: f64,
}

impl PulseEnvelope {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let env = PulseEnvelope { segments, drag: 0.0 };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.iter().any(|s| !(s.duration >= 0.0) || !(s.amplitude >= 0.0)) {
            return Err(Error::config("envelope", "durations and amplitudes must be >= 0"));
        }
        if !(self.duration() > 0.0) {
            return Err(Error::config("envelope", "total duration must be > 0"));
        }
        Ok(())
    }

    /// Ramp up, plateau, ramp down, all at one amplitude and phase.
    pub fn flat_top(amplitude: f64, phase: f64, plateau: f64, ramp: f64) -> Self {
        let seg = |duration, shape| Segment {
            duration,
            shape,
            amplitude,
            phase,
        };
        let mut segments = Vec::with_capacity(3);
        if ramp > 0.0 {
            segments.push(seg(ramp, Shape::CosineRampUp));
        }
        if plateau > 0.0 {
            segments.push(seg(plateau, Shape::Flat));
        }
        if ramp > 0.0 {
            segments.push(seg(ramp, Shape::CosineRampDown));
        }
        PulseEnvelope { segments, drag: 0.0 }
    }

    /// Hann-shaped pulse of total length `duration` and area `angle` (rad).
    pub fn cosine_bell(angle: f64, phase: f64, duration: f64, drag: f64) -> Self {
        let amplitude = angle / (PI * duration);
        let half = 0.5 * duration;
        PulseEnvelope {
            segments: vec![
                Segment {
                    duration: half,
                    shape: Shape::CosineRampUp,
                    amplitude,
                    phase,
                },
                Segment {
                    duration: half,
                    shape: Shape::CosineRampDown,
                    amplitude,
                    phase,
                },
            ],
            drag,
        }
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Segment containing `t` and its start time.
    fn locate(&self, t: f64) -> Option<(&Segment, f64)> {
        let mut start = 0.0;
        for (k, s) in self.segments.iter().enumerate() {
            let end = start + s.duration;
            if t < end || (k + 1 == self.segments.len() && t <= end) {
                if t >= start {
                    return Some((s, start));
                }
                return None;
            }
            start = end;
        }
        None
    }

    /// Complex envelope in rad/s; zero outside `[0, duration]`.
    pub fn value(&self, t: f64) -> C64 {
        match self.locate(t) {
            Some((s, start)) if s.duration > 0.0 => {
                let u = (t - start) / s.duration;
                let inphase = s.shape.value(u);
                let quad = self.drag * s.shape.slope(u) / s.duration;
                C64::new(inphase, quad) * C64::from_polar(TAU * s.amplitude, s.phase)
            }
            _ => C64::new(0.0, 0.0),
        }
    }

    /// True when `t` falls inside a ramp segment.
    pub fn in_ramp(&self, t: f64) -> bool {
        matches!(self.locate(t), Some((s, _)) if s.shape != Shape::Flat)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut acc = 0.0;
        for s in &self.segments {
            acc += s.duration;
            out.push(acc);
        }
        out
    }

    /// Whether the envelope is constant on `[t0, t1]` (relative times).
    pub fn is_constant_on(&self, t0: f64, t1: f64) -> bool {
        let mid = 0.5 * (t0 + t1);
        match self.locate(mid) {
            None => true,
            Some((s, start)) => s.shape == Shape::Flat && t0 >= start - 1e-18 && t1 <= start + s.duration + 1e-18,
        }
    }

    /// Peak Rabi rate, Hz.
    pub fn peak_amplitude(&self) -> f64 {
        let drag_peak = |s: &Segment| {
            if s.shape == Shape::Flat || s.duration == 0.0 {
                0.0
            } else {
                0.5 * PI * self.drag.abs() / s.duration
            }
        };
        self.segments
            .iter()
            .map(|s| s.amplitude * (1.0 + drag_peak(s)))
            .fold(0.0, f64::max)
    }
}

/// Uniformly sampled complex envelope in rad/s, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledEnvelope {
    pub dt: f64,
    pub samples: Vec<C64>,
    /// Sample-index runs `[a, b]` holding one exact value.
    pub flat_runs: Vec<(usize, usize)>,
}

impl SampledEnvelope {
    pub fn duration(&self) -> f64 {
        self.dt * (self.samples.len().saturating_sub(1)) as f64
    }

    pub fn value(&self, t: f64) -> C64 {
        if t < 0.0 || self.samples.is_empty() {
            return C64::new(0.0, 0.0);
        }
        let x = t / self.dt;
        let k = x.floor() as usize;
        if k + 1 >= self.samples.len() {
            return if k + 1 == self.samples.len() && (x - k as f64) < 1e-9 {
                self.samples[k]
            } else {
                C64::new(0.0, 0.0)
            };
        }
        let f = x - k as f64;
        self.samples[k] * (1.0 - f) + self.samples[k + 1] * f
    }

    /// Trapezoidal area of the complex envelope, rad.
    pub fn area(&self) -> C64 {
        let n = self.samples.len();
        if n < 2 {
            return C64::new(0.0, 0.0);
        }
        let inner: C64 = self.samples[1..n - 1].iter().sum();
        (inner + (self.samples[0] + self.samples[n - 1]) * 0.5) * self.dt
    }

    pub fn peak_amplitude(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max) / TAU
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Waveform {
    Analytic(PulseEnvelope),
    Sampled(SampledEnvelope),
}

impl Waveform {
    pub fn value(&self, t: f64) -> C64 {
        match self {
            Waveform::Analytic(e) => e.value(t),
            Waveform::Sampled(s) => s.value(t),
        }
    }

    pub fn duration(&self) -> f64 {
        match self {
            Waveform::Analytic(e) => e.duration(),
            Waveform::Sampled(s) => s.duration(),
        }
    }

    pub fn is_constant_on(&self, t0: f64, t1: f64) -> bool {
        match self {
            Waveform::Analytic(e) => e.is_constant_on(t0, t1),
            Waveform::Sampled(s) => {
                t0 >= s.duration()
                    || t1 <= 0.0
                    || s.flat_runs.iter().any(|&(a, b)| {
                        t0 >= a as f64 * s.dt - 1e-15 && t1 <= b as f64 * s.dt + 1e-15
                    })
            }
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Waveform::Analytic(e) => e.breakpoints(),
            Waveform::Sampled(s) => {
                let mut v = vec![0.0];
                for &(a, b) in &s.flat_runs {
                    v.push(a as f64 * s.dt);
                    v.push(b as f64 * s.dt);
                }
                v.push(s.duration());
                v
            }
        }
    }

    pub fn peak_amplitude(&self) -> f64 {
        match self {
            Waveform::Analytic(e) => e.peak_amplitude(),
            Waveform::Sampled(s) => s.peak_amplitude(),
        }
    }
}

/// Tail kept after the nominal end of a distorted pulse, in ring-up times.
pub const DISTORTION_TAIL: f64 = 7.0;
const DISTORTION_SAMPLE: f64 = 10e-12;

/// Pass an envelope through the line model: edge phase error on ramp segments,
/// then a first-order low-pass on both quadratures. Zero ring-up returns the
/// input unchanged.
pub fn apply_distortion(env: &PulseEnvelope, d: &LineDistortion) -> Waveform {
    if !d.is_enabled() {
        return Waveform::Analytic(env.clone());
    }
    let tau = d.ringup_time;
    let span = env.duration() + DISTORTION_TAIL * tau;
    let n = (span / DISTORTION_SAMPLE).ceil() as usize;
    let h = span / n as f64;
    let edge = C64::from_polar(1.0, d.edge_phase_error);
    let input = |t: f64| {
        let v = env.value(t);
        if env.in_ramp(t) {
            v * edge
        } else {
            v
        }
    };
    // Exact update of y' = (u - y)/τ for u linear across each sample interval.
    let q = (-h / tau).exp();
    let g = 1.0 - q;
    let w0 = tau * g / h - q;
    let w1 = 1.0 - tau * g / h;
    let flat: Vec<(f64, f64)> = {
        let mut t = 0.0;
        let mut v = Vec::new();
        for seg in &env.segments {
            if seg.shape == Shape::Flat {
                v.push((t, t + seg.duration));
            }
            t += seg.duration;
        }
        v
    };
    let settle_tol = 1e-8 * env.segments.iter().map(|s| s.amplitude).fold(0.0, f64::max) * TAU;
    let mut samples = Vec::with_capacity(n + 1);
    let mut flat_runs: Vec<(usize, usize)> = Vec::new();
    let mut y = C64::new(0.0, 0.0);
    let mut u_prev = input(0.0);
    samples.push(y);
    for k in 1..=n {
        let t = k as f64 * h;
        let u = input(t);
        y = y * q + u_prev * w0 + u * w1;
        // Once settled on a plateau the response is the plateau value itself.
        let on_plateau = flat.iter().any(|&(a, b)| t - h >= a && t <= b);
        if on_plateau && u == u_prev && (y - u).norm() < settle_tol {
            y = u;
            match flat_runs.last_mut() {
                Some(run) if run.1 == k - 1 && samples[k - 1] == u => run.1 = k,
                _ => flat_runs.push((k, k)),
            }
        }
        samples.push(y);
        u_prev = u;
    }
    flat_runs.retain(|&(a, b)| b > a);
    Waveform::Sampled(SampledEnvelope {
        dt: h,
        samples,
        flat_runs,
    })
}

/// Physical drive line a tone travels down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Port {
    /// Control line; leaks onto the target with the classical cross-talk factor.
    P1,
    /// Target line.
    P2,
}

/// Frame frequency a tone is generated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Carrier {
    /// The target's transition frequency (CR and cancellation tones).
    Target,
    /// The control's transition frequency (single-qubit control pulses).
    Control,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tone {
    pub port: Port,
    pub carrier: Carrier,
    pub start: f64,
    pub waveform: Waveform,
}

impl Tone {
    pub fn value(&self, t: f64) -> C64 {
        self.waveform.value(t - self.start)
    }

    pub fn end(&self) -> f64 {
        self.start + self.waveform.duration()
    }

    pub fn active_on(&self, t0: f64, t1: f64) -> bool {
        t1 > self.start && t0 < self.end()
    }
}

/// A set of tones played over a fixed window `[0, duration]`. Tone content past
/// the window end is discarded.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub tones: Vec<Tone>,
    pub duration: f64,
}

impl Schedule {
    pub fn empty(duration: f64) -> Self {
        Schedule {
            tones: Vec::new(),
            duration,
        }
    }

    pub fn push(&mut self, tone: Tone) {
        self.tones.push(tone);
    }

    /// Sorted, de-duplicated times where any tone changes piece.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = vec![0.0, self.duration];
        for tone in &self.tones {
            for b in tone.waveform.breakpoints() {
                let t = tone.start + b;
                if t > 0.0 && t < self.duration {
                    pts.push(t);
                }
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        pts
    }

    /// Peak Rabi rate over all tones, Hz.
    pub fn peak_amplitude(&self) -> f64 {
        self.tones.iter().map(|t| t.waveform.peak_amplitude()).fold(0.0, f64::max)
    }

    /// Appends `other` shifted to start at this schedule's end.
    pub fn append(&mut self, other: &Schedule) {
        let offset = self.duration;
        for tone in &other.tones {
            let mut t = tone.clone();
            t.start += offset;
            self.tones.push(t);
        }
        self.duration += other.duration;
    }
}
