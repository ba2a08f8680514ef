//! Stage execution and artifact emission.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::benchmarking::{
    channel_tomography, coherence_limit, fidelity_from_chi, gate_channel, interleaved_fidelity, run_rb,
    write_rb_csv, FidelityReport, RbCurve, RbFidelity,
};
use crate::calibration::sweep::measure_repeated;
use crate::calibration::{
    cancel_crosstalk, correct_transients, extract_classical_crosstalk, CalibrationSession, GateKind, GateSpec,
    Record, SimulatedDevice, SweepResult,
};
use crate::device::{derived_couplings, DerivedCouplings};
use crate::dynamics::{DriveSettings, Noise};
use crate::error::{Error, Result};
use crate::pipeline::config::{RunConfig, Stage, SCHEMA_VERSION};
use crate::tomography::trajectory::{linear_ticks, repetition_ticks};
use crate::tomography::{BlochTrajectory, EffectiveHamiltonian};

pub const SUMMARY_FILE: &str = "summary.json";
pub const LOG_FILE: &str = "session_log.jsonl";
pub const REPORT_FILE: &str = "report.txt";

#[derive(Debug, Clone, Serialize)]
pub struct CrosstalkEstimate {
    pub m12: f64,
    pub isolation_db: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub stage: Stage,
    pub ok: bool,
    pub error: Option<String>,
    pub drive_before: DriveSettings,
    pub drive_after: DriveSettings,
    pub hamiltonian_before: Option<EffectiveHamiltonian>,
    pub hamiltonian_after: Option<EffectiveHamiltonian>,
    /// Files written by the stage, relative to the output directory.
    pub artifacts: Vec<String>,
}

/// Noiseless average gate fidelity of the echoed gate to `ZX_{-π/2}`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct UnitaryFidelity {
    pub before_transients: Option<f64>,
    #[serde(rename = "final")]
    pub final_gate: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub ok: bool,
    pub failed_stage: Option<Stage>,
    pub error: Option<String>,
    pub seed: u64,
    pub target_rate: f64,
    pub stages: Vec<Stage>,
    pub couplings: DerivedCouplings,
    pub converged: bool,
    pub drive: DriveSettings,
    pub classical_crosstalk: Option<CrosstalkEstimate>,
    pub gate_duration: Option<f64>,
    pub unitary_fidelity: UnitaryFidelity,
    pub fidelity: FidelityReport,
    /// Interleaved RB of the gate before transient correction.
    pub rb_uncorrected: Option<RbFidelity>,
    /// Mean population lost from the computational space per gate, from the
    /// process-tomography channel.
    pub leakage: Option<f64>,
    pub stage_reports: Vec<StageReport>,
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    out: PathBuf,
    session: CalibrationSession,
    summary: Summary,
    gate: Option<GateSpec>,
    uncorrected: Option<GateSpec>,
    echoed: Option<EffectiveHamiltonian>,
}

/// Runs the configured stages in order and writes all artifacts under
/// `output_dir`. On a stage error the log and summary are still written and
/// `StageFailed` is returned.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Summary> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::config("output_dir", e.to_string()))?;
    let mut runner = Runner::new(cfg)?;
    let mut failure = None;
    for &stage in &cfg.stages {
        log::info!("stage {stage}");
        if let Err(e) = runner.run_stage(stage) {
            log::error!("stage {stage} failed: {e}");
            failure = Some((stage, e));
            break;
        }
    }
    runner.finish(failure)
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        let device = SimulatedDevice::new(cfg.device.clone())?
            .with_shots(cfg.shot_noise, cfg.seed)
            .with_noise(cfg.measurement_noise);
        let mut session =
            CalibrationSession::new(device, cfg.target_rate, cfg.ramp_time)?.with_settings(cfg.calibration.clone())?;
        session.x_pulse = cfg.x_pulse;
        if let Some(d) = &cfg.initial_drive {
            session = session.with_drive(d.clone())?;
        }
        let summary = Summary {
            schema_version: SCHEMA_VERSION,
            ok: true,
            failed_stage: None,
            error: None,
            seed: cfg.seed,
            target_rate: cfg.target_rate,
            stages: cfg.stages.clone(),
            couplings: derived_couplings(&cfg.device)?,
            converged: false,
            drive: session.drive().clone(),
            classical_crosstalk: None,
            gate_duration: None,
            unitary_fidelity: UnitaryFidelity::default(),
            fidelity: FidelityReport::default(),
            rb_uncorrected: None,
            leakage: None,
            stage_reports: Vec::new(),
        };
        Ok(Runner {
            cfg,
            out: cfg.output_dir.clone(),
            session,
            summary,
            gate: None,
            uncorrected: None,
            echoed: None,
        })
    }

    fn run_stage(&mut self, stage: Stage) -> Result<()> {
        let mut report = StageReport {
            stage,
            ok: true,
            error: None,
            drive_before: self.session.drive().clone(),
            drive_after: self.session.drive().clone(),
            hamiltonian_before: None,
            hamiltonian_after: None,
            artifacts: Vec::new(),
        };
        self.session.record(Record::Note {
            stage: stage.name().into(),
            message: "start".into(),
        });
        let result = match stage {
            Stage::Cancel => self.cancel(&mut report),
            Stage::Echo => self.echo(&mut report),
            Stage::Transients => self.transients(&mut report),
            Stage::TomoReport => self.tomo_report(&mut report),
            Stage::Qpt => self.qpt(&mut report),
            Stage::Rb => self.rb(&mut report),
        };
        report.drive_after = self.session.drive().clone();
        if let Err(e) = &result {
            report.ok = false;
            report.error = Some(e.to_string());
        }
        self.session.record(Record::Note {
            stage: stage.name().into(),
            message: if result.is_ok() { "done".into() } else { "failed".into() },
        });
        self.summary.stage_reports.push(report);
        result
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn cancel(&mut self, report: &mut StageReport) -> Result<()> {
        let first = self.session.history().len();
        let result = cancel_crosstalk(&mut self.session);
        let records: Vec<(usize, DriveSettings, EffectiveHamiltonian)> = self.session.history()[first..]
            .iter()
            .filter_map(|r| match r {
                Record::Tomography {
                    iteration,
                    drive,
                    hamiltonian,
                    ..
                } => Some((*iteration, drive.clone(), *hamiltonian)),
                _ => None,
            })
            .collect();
        report.hamiltonian_before = records.first().map(|r| r.2);
        report.hamiltonian_after = records.last().map(|r| r.2);
        let mut f = create(&self.path("cancel.csv"))?;
        writeln!(f, "iteration,cr_amp,cr_phase,cancel_amp,cancel_phase,{}", TERMS_HEADER)?;
        for (i, d, h) in &records {
            writeln!(
                f,
                "{i},{:.12e},{:.12e},{:.12e},{:.12e},{}",
                d.cr_amp,
                d.cr_phase,
                d.cancel_amp,
                d.cancel_phase,
                terms_row(h)
            )?;
        }
        f.flush()?;
        report.artifacts.push("cancel.csv".into());
        result?;
        self.summary.converged = self.session.converged;
        let (m12, isolation_db) = extract_classical_crosstalk(&self.session)?;
        self.summary.classical_crosstalk = Some(CrosstalkEstimate { m12, isolation_db });
        Ok(())
    }

    fn echo(&mut self, report: &mut StageReport) -> Result<()> {
        let drive = self.session.drive().clone();
        let half = measure_repeated(&mut self.session, GateKind::HalfCr, &drive)?;
        let pre = scaled(&half, 2.0);
        let echoed = measure_repeated(&mut self.session, GateKind::EchoedZx, &drive)?;
        for (stage_label, h) in [("half-cr-doubled", pre), ("echoed", echoed)] {
            self.session.record(Record::Tomography {
                stage: format!("echo/{stage_label}"),
                iteration: 0,
                drive: drive.clone(),
                hamiltonian: h,
            });
        }
        report.hamiltonian_before = Some(pre);
        report.hamiltonian_after = Some(echoed);
        write_hamiltonians(&self.path("echo.csv"), &[("half-cr-doubled", &pre), ("echoed", &echoed)])?;
        report.artifacts.push("echo.csv".into());
        let gate = self.session.echoed_gate();
        self.summary.gate_duration = Some(gate.duration());
        self.summary.unitary_fidelity.final_gate = Some(unitary_fidelity(&self.cfg.device, &gate)?);
        self.summary.fidelity = self
            .summary
            .fidelity
            .with_coherence_limit(coherence_limit(&self.cfg.device, gate.duration())?);
        self.gate = Some(gate);
        self.echoed = Some(echoed);
        Ok(())
    }

    fn echoed_hamiltonian(&mut self) -> Result<EffectiveHamiltonian> {
        match self.echoed {
            Some(h) => Ok(h),
            None => {
                let drive = self.session.drive().clone();
                measure_repeated(&mut self.session, GateKind::EchoedZx, &drive)
            }
        }
    }

    fn transients(&mut self, report: &mut StageReport) -> Result<()> {
        report.hamiltonian_before = Some(self.echoed_hamiltonian()?);
        let before = self.session.echoed_gate();
        self.summary.unitary_fidelity.before_transients = Some(unitary_fidelity(&self.cfg.device, &before)?);
        self.uncorrected = Some(before);
        let first = self.session.history().len();
        let result = correct_transients(&mut self.session);
        let sweeps: Vec<SweepResult> = self.session.history()[first..]
            .iter()
            .filter_map(|r| match r {
                Record::Sweep(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        write_sweeps(&self.path("transients.csv"), &self.path("transients_fits.csv"), &sweeps)?;
        report.artifacts.extend(["transients.csv".into(), "transients_fits.csv".into()]);
        result?;
        let drive = self.session.drive().clone();
        let after = measure_repeated(&mut self.session, GateKind::EchoedZx, &drive)?;
        report.hamiltonian_after = Some(after);
        let gate = self.session.echoed_gate();
        self.summary.unitary_fidelity.final_gate = Some(unitary_fidelity(&self.cfg.device, &gate)?);
        self.gate = Some(gate);
        self.echoed = Some(after);
        Ok(())
    }

    fn tomo_report(&mut self, report: &mut StageReport) -> Result<()> {
        let s = &self.session.settings;
        let ticks = linear_ticks(s.continuous_periods / self.session.target_rate, s.continuous_points);
        let reps = repetition_ticks(s.max_repetitions);
        let gate = self.gate.clone().ok_or_else(|| Error::config("stages", "tomo-report needs a composed gate"))?;
        let drive = self.session.drive().clone();
        let continuous = self.session.device_mut().measure_continuous(&drive, &ticks)?;
        let repeated = self.session.device_mut().measure_repeated(&gate, &reps)?;
        write_trajectories(&self.path("continuous_trajectories.csv"), &continuous)?;
        write_trajectories(&self.path("repeated_trajectories.csv"), &repeated)?;
        let h_cont = crate::tomography::hamiltonian_tomography(&continuous[0], &continuous[1])?;
        let h_rep = crate::tomography::hamiltonian_tomography(&repeated[0], &repeated[1])?;
        write_hamiltonians(
            &self.path("tomo_report.csv"),
            &[("continuous", &h_cont), ("echoed", &h_rep)],
        )?;
        report.hamiltonian_before = Some(h_cont);
        report.hamiltonian_after = Some(h_rep);
        report.artifacts.extend([
            "continuous_trajectories.csv".into(),
            "repeated_trajectories.csv".into(),
            "tomo_report.csv".into(),
        ]);
        Ok(())
    }

    fn qpt(&mut self, report: &mut StageReport) -> Result<()> {
        let gate = self.gate.clone().ok_or_else(|| Error::config("stages", "qpt needs a composed gate"))?;
        let channel = gate_channel(&self.cfg.device, &gate, Noise::Lindblad)?;
        let chi = channel_tomography(&channel)?;
        let ideal = gate.ideal_unitary();
        let (process, average) = fidelity_from_chi(&chi, &ideal);
        let leakage = channel.mean_leakage();
        chi.write_csv(&self.path("chi.csv"))?;
        let mut f = create(&self.path("qpt.csv"))?;
        writeln!(f, "process_fidelity,average_gate_fidelity,leakage")?;
        writeln!(f, "{process:.12e},{average:.12e},{leakage:.12e}")?;
        f.flush()?;
        report.artifacts.extend(["chi.csv".into(), "qpt.csv".into()]);
        self.summary.fidelity = self.summary.fidelity.with_process(process);
        self.summary.leakage = Some(leakage);
        Ok(())
    }

    fn rb(&mut self, report: &mut StageReport) -> Result<()> {
        let gate = self.gate.clone().ok_or_else(|| Error::config("stages", "rb needs a composed gate"))?;
        let opts = self.cfg.rb.options(self.cfg.seed);
        let device = &self.cfg.device;
        let reference = run_rb(device, None, &opts)?;
        let interleaved = run_rb(device, Some(&gate), &opts)?;
        let fid = interleaved_fidelity(&reference, &interleaved)?;
        write_rb_csv(&self.path("rb.csv"), &[&reference, &interleaved])?;
        report.artifacts.push("rb.csv".into());
        let mut rows: Vec<(&str, RbFidelity, &RbCurve)> = vec![("final", fid, &interleaved)];
        let uncorrected_curve;
        if let Some(g0) = &self.uncorrected {
            uncorrected_curve = run_rb(device, Some(g0), &opts)?;
            let f0 = interleaved_fidelity(&reference, &uncorrected_curve)?;
            write_rb_csv(&self.path("rb_uncorrected.csv"), &[&reference, &uncorrected_curve])?;
            report.artifacts.push("rb_uncorrected.csv".into());
            self.summary.rb_uncorrected = Some(f0);
            rows.push(("uncorrected", f0, &uncorrected_curve));
        }
        let mut f = create(&self.path("rb_fidelity.csv"))?;
        writeln!(f, "gate,fidelity,ci_low,ci_high,p_reference,p_interleaved")?;
        for (label, r, curve) in rows {
            writeln!(
                f,
                "{label},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                r.fidelity, r.interval.0, r.interval.1, reference.fit.p, curve.fit.p
            )?;
        }
        f.flush()?;
        report.artifacts.push("rb_fidelity.csv".into());
        self.summary.fidelity = self.summary.fidelity.with_rb(fid);
        Ok(())
    }

    fn finish(mut self, failure: Option<(Stage, Error)>) -> Result<Summary> {
        self.summary.drive = self.session.drive().clone();
        self.summary.converged = self.session.converged;
        if let Some((stage, e)) = &failure {
            self.summary.ok = false;
            self.summary.failed_stage = Some(*stage);
            self.summary.error = Some(e.to_string());
        }
        let mut log = create(&self.path(LOG_FILE))?;
        self.session.write_log(&mut log)?;
        log.flush()?;
        let json = serde_json::to_string_pretty(&self.summary).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(self.path(SUMMARY_FILE), json + "\n")?;
        std::fs::write(self.path(REPORT_FILE), self.report_text())?;
        match failure {
            None => Ok(self.summary),
            Some((stage, e)) => Err(Error::StageFailed {
                stage: stage.name().into(),
                source: Box::new(e),
            }),
        }
    }

    fn report_text(&self) -> String {
        let s = &self.summary;
        let mut t = String::new();
        t += &format!("mu: {:.4}\n", s.couplings.mu);
        t += &format!("nu: {:.4}\n", s.couplings.nu);
        t += &format!("epsilon_hz: {:.4e}\n", s.couplings.epsilon);
        t += &format!("converged: {}\n", s.converged);
        if let Some(c) = &s.classical_crosstalk {
            t += &format!("m12: {:.4}\nisolation_db: {:.2}\n", c.m12, c.isolation_db);
        }
        if let Some(d) = s.gate_duration {
            t += &format!("gate_duration_ns: {:.2}\n", d * 1e9);
        }
        t += &s.fidelity.to_text();
        if let Some(r) = &s.rb_uncorrected {
            t += &format!("rb_fidelity_uncorrected: {:.3}%\n", 100.0 * r.fidelity);
        }
        if let Some(e) = &s.error {
            t += &format!("error: {e}\n");
        }
        t
    }
}

const TERMS_HEADER: &str = "zx,zy,zz,ix,iy,iz";

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn terms_row(h: &EffectiveHamiltonian) -> String {
    h.terms()
        .iter()
        .map(|(_, v)| format!("{v:.12e}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn scaled(h: &EffectiveHamiltonian, k: f64) -> EffectiveHamiltonian {
    EffectiveHamiltonian {
        zx: k * h.zx,
        zy: k * h.zy,
        zz: k * h.zz,
        ix: k * h.ix,
        iy: k * h.iy,
        iz: k * h.iz,
        ..*h
    }
}

fn unit_label(h: &EffectiveHamiltonian) -> &'static str {
    match h.unit {
        crate::tomography::RateUnit::PerSecond => "hz",
        crate::tomography::RateUnit::PerGate => "cycles-per-gate",
    }
}

fn write_hamiltonians(path: &Path, rows: &[(&str, &EffectiveHamiltonian)]) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "label,unit,{TERMS_HEADER}")?;
    for (label, h) in rows {
        writeln!(f, "{label},{},{}", unit_label(h), terms_row(h))?;
    }
    f.flush()?;
    Ok(())
}

fn write_trajectories(path: &Path, pair: &[BlochTrajectory; 2]) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "control,tick,x,y,z,leakage")?;
    for (prep, t) in pair.iter().enumerate() {
        for k in 0..t.len() {
            let [x, y, z] = t.point(k);
            writeln!(f, "{prep},{:.12e},{x:.12e},{y:.12e},{z:.12e},{:.12e}", t.ticks[k], t.leakage[k])?;
        }
    }
    f.flush()?;
    Ok(())
}

fn write_sweeps(points: &Path, fits: &Path, sweeps: &[SweepResult]) -> Result<()> {
    let mut p = create(points)?;
    writeln!(p, "sweep,parameter,scheme,value,coefficient,{TERMS_HEADER}")?;
    let mut q = create(fits)?;
    writeln!(q, "sweep,parameter,scheme,slope,intercept,r_squared,target,previous,update,reliable")?;
    for (i, s) in sweeps.iter().enumerate() {
        let scheme = s.scheme.label();
        for ((v, c), h) in s.values.iter().zip(&s.coefficient).zip(&s.hamiltonians) {
            writeln!(p, "{i},{},{scheme},{v:.12e},{c:.12e},{}", s.parameter.label(), terms_row(h))?;
        }
        let l = &s.linear_fit;
        writeln!(
            q,
            "{i},{},{scheme},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{}",
            s.parameter.label(),
            l.slope,
            l.intercept,
            l.r_squared,
            s.target,
            s.previous,
            s.update,
            s.reliable
        )?;
    }
    p.flush()?;
    q.flush()?;
    Ok(())
}

/// Noiseless average gate fidelity of `gate` to its ideal, leakage included.
pub fn unitary_fidelity(cfg: &crate::device::DeviceConfig, gate: &GateSpec) -> Result<f64> {
    Ok(gate_channel(cfg, gate, Noise::Unitary)?.average_gate_fidelity(&gate.ideal_unitary()))
}
