//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use crgate::benchmarking::*;
use crgate::calibration::sweep::measure_repeated;
use crgate::calibration::*;
use crgate::device::{derived_couplings, DeviceConfig, LineDistortion};
use crgate::dynamics::{DriveSettings, Simulator};
use crgate::linalg::{c, kron, max_abs_diff, CMat};
use crgate::pipeline::{run_pipeline, unitary_fidelity, RbSettings, RunConfig, Stage};
use crgate::tomography::trajectory::linear_ticks;
use crgate::tomography::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
    /// Extra lines reported beside the criterion; they do not affect its verdict.
    notes: Vec<(bool, String)>,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome {
            pass,
            detail,
            notes: Vec::new(),
        }
    }

    fn note(mut self, pass: bool, line: String) -> Self {
        self.notes.push((pass, line));
        self
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

fn calibrated(cfg: DeviceConfig, rate: f64) -> (CalibrationSession, crgate::Result<()>) {
    let dev = SimulatedDevice::new(cfg).expect("valid device");
    let mut session = CalibrationSession::new(dev, rate, 10e-9).expect("valid session");
    let r = cancel_crosstalk(&mut session);
    (session, r)
}

fn couplings() -> Outcome {
    let k = derived_couplings(&DeviceConfig::reference()).unwrap();
    let two_sig = |x: f64, want: f64| {
        let mag = 10f64.powf(x.abs().log10().floor() - 1.0);
        ((x / mag).round() * mag - want).abs() < 1e-9 * want.abs()
    };
    let pass = two_sig(k.mu, 0.024) && two_sig(k.nu.abs(), 0.043) && two_sig(k.epsilon * 1e-6, -0.33);
    Outcome::new(
        pass,
        format!("mu {:.4}, |nu| {:.4}, eps {:.4} MHz", k.mu, k.nu.abs(), k.epsilon * 1e-6),
    )
}

fn weak_drive_oracle() -> Outcome {
    let mut cfg = DeviceConfig::reference();
    cfg.crosstalk_amp = 0.0;
    let k = derived_couplings(&cfg).unwrap();
    let omega = k.detuning / 50.0;
    let sim = Simulator::new(&cfg).unwrap();
    let drive = DriveSettings {
        cr_amp: omega,
        ..DriveSettings::zero(200e-9, 10e-9)
    };
    // long enough to resolve both the ZX and the slower ZZ rate
    let span = 1.2 / k.epsilon.abs().min((k.mu * omega).abs());
    let ticks = linear_ticks(span, 96);
    let [t0, t1] = acquire_pair(
        &sim,
        &cfg,
        &drive,
        &ticks,
        &AcquireMode::Continuous,
        &AcquireOptions::default(),
        None,
    )
    .unwrap();
    let h = hamiltonian_tomography(&t0, &t1).unwrap();
    let zx_err = (h.zx - k.mu * omega).abs() / (k.mu * omega).abs();
    let zz_err = (h.zz - k.epsilon).abs() / k.epsilon.abs();
    Outcome::new(
        zx_err < 0.05 && zz_err < 0.10,
        format!(
            "zx {:.4} MHz vs {:.4} ({}), zz {:.4} MHz vs {:.4} ({})",
            h.zx * 1e-6,
            k.mu * omega * 1e-6,
            pct(zx_err),
            h.zz * 1e-6,
            k.epsilon * 1e-6,
            pct(zz_err)
        ),
    )
}

fn cancellation_at(rate: f64, phi: f64) -> (bool, String) {
    let mut cfg = DeviceConfig::reference();
    cfg.crosstalk_phase = phi;
    let truth = cfg.crosstalk_amp;
    let (session, result) = calibrated(cfg, rate);
    let iterations = session
        .history()
        .iter()
        .filter(|r| matches!(r, Record::Tomography { stage, .. } if stage == "cancel"))
        .count();
    let h = *session.last_hamiltonian("cancel").expect("at least one measurement");
    let residual = h.ix.abs().max(h.iy.abs()) / h.zx.abs();
    let rate_err = (h.zx - rate).abs() / rate;
    let head = format!(
        "{:.1} MHz: {} after {iterations} measurements, zx {:.3} MHz, max(|ix|,|iy|)/zx {}",
        rate * 1e-6,
        if result.is_ok() { "converged" } else { "no convergence" },
        h.zx * 1e-6,
        pct(residual)
    );
    match extract_classical_crosstalk(&session) {
        Ok((m12, db)) => {
            let pass = result.is_ok()
                && iterations <= 12
                && residual < 0.02
                && rate_err < 0.02
                && (m12 - truth).abs() < 0.1 * truth
                && (db + 23.0).abs() < 1.0;
            (pass, format!("{head}, m12 {} ({db:.2} dB)", pct(m12)))
        }
        Err(e) => (false, format!("{head}, m12 unavailable: {e}")),
    }
}

fn cancellation() -> Outcome {
    let phi = ChaCha8Rng::seed_from_u64(31).gen_range(0.0..TAU);
    let (pass, line) = cancellation_at(3.0e6, phi);
    let (pass_low, line_low) = cancellation_at(1.5e6, phi);
    Outcome::new(pass, format!("phi {phi:.3} rad, {line}")).note(pass_low, format!("default rate, {line_low}"))
}

fn echo_cancellation() -> Outcome {
    let (mut session, r) = calibrated(DeviceConfig::reference(), 1.5e6);
    if let Err(e) = r {
        return Outcome::new(false, format!("calibration failed: {e}"));
    }
    let mut drive = session.drive().clone();
    drive.cancel_amp *= 1.02;
    drive.cr_phase += 0.02;
    let half = measure_repeated(&mut session, GateKind::HalfCr, &drive).unwrap();
    let echoed = measure_repeated(&mut session, GateKind::EchoedZx, &drive).unwrap();
    // two halves without the echo: same CR time as the echoed gate
    let (zx0, zz0, iz0) = (2.0 * half.zx, 2.0 * half.zz, 2.0 * half.iz);
    let zz_ratio = echoed.zz.abs() / zz0.abs();
    let iz_ratio = echoed.iz.abs() / iz0.abs();
    let zx_change = (echoed.zx - zx0).abs() / zx0.abs();
    Outcome::new(
        zz_ratio < 0.1 && iz_ratio < 0.1 && zx_change < 0.02,
        format!(
            "zz {zz0:.4} -> {:.4} cycles ({}), iz {iz0:.4} -> {:.4} ({}), zx {zx0:.4} -> {:.4} ({})",
            echoed.zz,
            pct(zz_ratio),
            echoed.iz,
            pct(iz_ratio),
            echoed.zx,
            pct(zx_change)
        ),
    )
    .note(zz_ratio < 0.1, format!("zz clause, ratio {}", pct(zz_ratio)))
    .note(zx_change < 0.02, format!("zx clause, change {}", pct(zx_change)))
    .note(iz_ratio < 0.1, format!("iz clause, ratio {}", pct(iz_ratio)))
}

fn transient_correction() -> Outcome {
    let mut cfg = DeviceConfig::reference();
    cfg.distortion = LineDistortion {
        ringup_time: 8e-9,
        edge_phase_error: 0.03,
    };
    let (mut session, r) = calibrated(cfg.clone(), 1.5e6);
    if let Err(e) = r {
        return Outcome::new(false, format!("calibration failed: {e}"));
    }
    let before = unitary_fidelity(&cfg, &session.echoed_gate()).unwrap();
    if let Err(e) = correct_transients(&mut session) {
        return Outcome::new(false, format!("sweeps failed: {e}"));
    }
    let after = unitary_fidelity(&cfg, &session.echoed_gate()).unwrap();
    let gain = after - before;
    // order of the reported 1.1%: within a factor of about 3
    let pass = after > before && after >= 0.995 && (0.003..=0.03).contains(&gain);
    Outcome::new(
        pass,
        format!("unitary fidelity {} -> {} (+{})", pct(before), pct(after), pct(gain)),
    )
}

fn rb_self_consistency() -> Outcome {
    let u = zx_rotation(-FRAC_PI_2);
    let ideal = Channel::from_unitary(&u, 2).unwrap();
    let opts = RbSettings::default().options(17);
    let reference = run_rb_channel(None, 2, &opts).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for f0 in [0.99, 0.97] {
        let gate = ideal.then(&Channel::depolarizing(Channel::depolarizing_lambda(f0)));
        let curve = run_rb_channel(Some(&Interleave::new(&gate, &u).unwrap()), 2, &opts).unwrap();
        let rb = interleaved_fidelity(&reference, &curve).unwrap();
        pass &= (rb.fidelity - f0).abs() <= 0.002;
        parts.push(format!("F0 {} -> {}", pct(f0), pct(rb.fidelity)));
    }
    Outcome::new(pass, parts.join(", "))
}

fn coherence() -> Outcome {
    let cfg = DeviceConfig::reference();
    let rate = RunConfig::default().target_rate;
    let gate = compose_echo(&DriveSettings::zero(0.25 / rate, 10e-9));
    let duration = gate.duration();
    let limit = coherence_limit(&cfg, duration).unwrap();
    let in_bracket = |f: f64| (0.985..=0.993).contains(&f);
    let short = 0.25 / 3.0e6 + 2.0 * gate.x_pi.span();
    let short_limit = coherence_limit(&cfg, short).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let run = RunConfig {
        output_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    let (ordered, rb_line) = match run_pipeline(&run) {
        Ok(s) => {
            let rb = s.fidelity.rb_fidelity.unwrap_or(f64::NAN);
            let (lo, hi) = s.fidelity.rb_confidence_interval.unwrap_or((f64::NAN, f64::NAN));
            let unc = s.rb_uncorrected.as_ref().map_or(f64::NAN, |r| r.fidelity);
            let cl = s.fidelity.coherence_limit.unwrap_or(f64::NAN);
            let ok = unc < rb && rb < cl && hi - lo <= 0.015;
            (
                ok,
                format!(
                    "RB uncorrected {} < corrected {} [{}, {}] < limit {}",
                    pct(unc),
                    pct(rb),
                    pct(lo),
                    pct(hi),
                    pct(cl)
                ),
            )
        }
        Err(e) => (false, format!("pipeline failed: {e}")),
    };
    Outcome::new(
        in_bracket(limit) && ordered,
        format!("limit {} at {:.1} ns; {rb_line}", pct(limit), duration * 1e9),
    )
    .note(
        in_bracket(short_limit),
        format!("limit {} at {:.1} ns (3 MHz gate plus echo pulses)", pct(short_limit), short * 1e9),
    )
}

fn artifacts(seed: u64) -> BTreeMap<String, Vec<u8>> {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig {
        output_dir: dir.path().to_path_buf(),
        stages: vec![Stage::Cancel, Stage::Echo],
        shot_noise: Some(1000),
        seed,
        ..RunConfig::default()
    };
    cfg.calibration.max_iterations = 4;
    let _ = run_pipeline(&cfg);
    read_dir(dir.path())
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv" || x == "json" || x == "jsonl"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

/// Random trace-preserving channel on two qubits from three random Kraus factors.
fn random_channel(rng: &mut ChaCha8Rng) -> (Channel, Vec<CMat>) {
    let a: Vec<CMat> = (0..3)
        .map(|_| CMat::from_fn(4, 4, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let s = a.iter().fold(CMat::zeros(4, 4), |acc, m| acc + m.adjoint() * m);
    let eig = s.symmetric_eigen();
    let inv_sqrt = (0..4).fold(CMat::zeros(4, 4), |acc, k| {
        let v = eig.eigenvectors.column(k);
        acc + (v * v.adjoint()) * c(eig.eigenvalues[k].powf(-0.5), 0.0)
    });
    let kraus: Vec<CMat> = a.iter().map(|m| m * &inv_sqrt).collect();
    let superop = kraus
        .iter()
        .fold(CMat::zeros(16, 16), |acc, k| acc + kron(k, &k.map(|z| z.conj())));
    (Channel::new(superop, 2).unwrap(), kraus)
}

fn invariants() -> Outcome {
    let mut checks: Vec<(bool, String)> = Vec::new();

    let a = artifacts(42);
    let same = a == artifacts(42);
    checks.push((same && !a.is_empty(), format!("{} artifacts bit-identical", a.len())));

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (ch, kraus) = random_channel(&mut rng);
        let chi = channel_tomography(&ch).unwrap();
        for rho in qpt::tomography_inputs() {
            let direct = kraus.iter().fold(CMat::zeros(4, 4), |acc, k| acc + k * &rho * k.adjoint());
            worst = worst.max(max_abs_diff(&chi.apply(&rho), &direct));
        }
    }
    checks.push((worst <= 1e-8, format!("chi round trip {worst:.1e}")));

    let g = CliffordGroup::get();
    let draws = 20 * g.len();
    let mut counts = vec![0usize; clifford::SYMPLECTIC_ORDER];
    let mut srng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..draws {
        counts[g.class(g.sample(&mut srng))] += 1;
    }
    let e = draws as f64 / counts.len() as f64;
    let chi2: f64 = counts.iter().map(|&n| (n as f64 - e).powi(2) / e).sum();
    let df = (counts.len() - 1) as f64;
    let k = 2.0 / (9.0 * df);
    let critical = df * (1.0 - k + 3.09 * k.sqrt()).powi(3);
    checks.push((chi2 < critical, format!("Clifford chi2 {chi2:.0} < {critical:.0}")));

    let lengths = [1usize, 2, 4, 8, 16, 32, 64];
    let y: Vec<f64> = lengths.iter().map(|&m| 0.7 * 0.97f64.powi(m as i32) + 0.25).collect();
    let (fit, _) = fit_decay(&lengths, &y);
    let decay_ok = (fit.p - 0.97).abs() < 1e-6;

    let x: Vec<f64> = (0..9).map(|i| i as f64).collect();
    let line = linear_fit(&x, &x.iter().map(|v| 3.0 * v - 2.0).collect::<Vec<_>>());
    let line_ok = (line.slope - 3.0).abs() < 1e-9 && (line.intercept + 2.0).abs() < 1e-9;

    let model = RotationFit {
        axis: [0.6, 0.0, 0.8],
        rate: 2e6,
        offset: [0.0, 1.0, 0.0],
        residual: 0.0,
        unit: TickUnit::Seconds,
    };
    let ticks = linear_ticks(1e-6, 50);
    let pts: Vec<[f64; 3]> = ticks.iter().map(|&t| model.predict(t)).collect();
    let traj = BlochTrajectory::new(
        ticks.clone(),
        TickUnit::Seconds,
        [0, 1, 2].map(|k| pts.iter().map(|p| p[k]).collect()),
        vec![0.0; ticks.len()],
        ControlPrep::Zero,
    )
    .unwrap();
    let rot = fit_rotation(&traj).unwrap();
    let rot_ok = (rot.rate.abs() - 2e6).abs() < 1e-6 * 2e6;
    checks.push((decay_ok && line_ok && rot_ok, "decay, linear and rotation fits recovered".into()));

    let pass = checks.iter().all(|(ok, _)| *ok);
    let detail = checks
        .iter()
        .map(|(ok, s)| format!("{s}{}", if *ok { "" } else { " (failed)" }))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome::new(pass, detail)
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, &str, Duration, Check); 8] = [
        ("C1", "closed-form couplings", Duration::from_secs(1), couplings),
        ("C2", "weak-drive tomography oracle", Duration::from_secs(60), weak_drive_oracle),
        ("C3", "cross-talk cancellation at 3.0 MHz", Duration::from_secs(300), cancellation),
        ("C4", "echo cancellation", Duration::from_secs(300), echo_cancellation),
        ("C5", "transient correction", Duration::from_secs(900), transient_correction),
        ("C6", "interleaved RB self-consistency", Duration::from_secs(600), rb_self_consistency),
        ("C7", "coherence limit and RB ordering", Duration::from_secs(600), coherence),
        ("C8", "determinism and invariants", Duration::from_secs(600), invariants),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= budget;
        failed += usize::from(!pass);
        println!(
            "{} {id} {name} ({:.1} s): {}",
            verdict(pass),
            elapsed.as_secs_f64(),
            out.detail
        );
        if elapsed > budget {
            println!("     runtime budget {} s exceeded", budget.as_secs());
        }
        for (ok, line) in out.notes {
            println!("     [{}] {line}", verdict(ok));
        }
    }
    println!("acceptance: {}/8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
