use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crgate::pipeline::*;
use crgate::Error;
use proptest::prelude::*;

fn config(dir: &Path, stages: &[Stage]) -> RunConfig {
    RunConfig {
        output_dir: dir.to_path_buf(),
        stages: stages.to_vec(),
        ..RunConfig::default()
    }
}

fn read_artifacts(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/invalid").join(name)
}

#[test]
fn cancel_only_run_writes_cancel_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_pipeline(&config(dir.path(), &[Stage::Cancel])).unwrap();
    assert!(summary.ok && summary.converged);
    assert_eq!(summary.stages, vec![Stage::Cancel]);
    let files = read_artifacts(dir.path());
    assert!(files.contains_key("cancel.csv"));
    assert!(!files.keys().any(|k| k.starts_with("rb")));
    for f in [SUMMARY_FILE, LOG_FILE, REPORT_FILE] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let x = summary.classical_crosstalk.unwrap();
    assert!((x.m12 - 0.071).abs() < 0.01, "{x:?}");
    let k = summary.couplings;
    assert!((k.mu - 0.024).abs() < 5e-4 && (k.epsilon + 0.33e6).abs() < 5e3);
    // every session-log line is a JSON object
    let log = fs::read_to_string(dir.path().join(LOG_FILE)).unwrap();
    assert!(log.lines().count() > 2);
    for line in log.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.is_object());
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["ok"], true);
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let run = |seed: u64| {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path(), &[Stage::Cancel]);
        cfg.shot_noise = Some(400);
        cfg.seed = seed;
        cfg.calibration.max_iterations = 3;
        // shot noise may keep the loop from converging; artifacts are written either way
        let _ = run_pipeline(&cfg);
        read_artifacts(dir.path())
    };
    let a = run(5);
    let b = run(5);
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert_ne!(a, run(6));
}

#[test]
fn out_of_reach_rate_fails_in_cancel() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), &[Stage::Cancel, Stage::Echo]);
    cfg.target_rate = 3.0e6;
    match run_pipeline(&cfg) {
        Err(Error::StageFailed { stage, .. }) => assert_eq!(stage, "cancel"),
        other => panic!("{other:?}"),
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap()).unwrap();
    assert_eq!(json["ok"], false);
    assert_eq!(json["failed_stage"], "cancel");
    assert!(dir.path().join("cancel.csv").exists());
    assert!(!dir.path().join("echo.csv").exists());
}

#[test]
fn full_default_run() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_pipeline(&config(dir.path(), &Stage::ALL)).unwrap();
    assert!(s.ok && s.converged);
    let before = s.unitary_fidelity.before_transients.unwrap();
    let after = s.unitary_fidelity.final_gate.unwrap();
    assert!(after > before, "{before} → {after}");
    let rb = s.fidelity.rb_fidelity.unwrap();
    let (lo, hi) = s.fidelity.rb_confidence_interval.unwrap();
    let limit = s.fidelity.coherence_limit.unwrap();
    assert!(rb < limit + 0.005, "{rb} vs {limit}");
    assert!(hi - lo < 0.015);
    assert!(s.rb_uncorrected.as_ref().unwrap().fidelity < rb);
    assert!(s.fidelity.process_fidelity.unwrap() > 0.95);
    assert!(s.leakage.unwrap() < 1e-2);
    for f in [
        "cancel.csv",
        "echo.csv",
        "transients.csv",
        "transients_fits.csv",
        "tomo_report.csv",
        "chi.csv",
        "qpt.csv",
        "rb.csv",
        "rb_fidelity.csv",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let report = fs::read_to_string(dir.path().join(REPORT_FILE)).unwrap();
    assert!(report.contains("coherence"));
}

#[test]
fn invalid_configs_rejected_with_field_path() {
    let cases = [
        ("negative_t1", "device.q1.t1"),
        ("positive_anharmonicity", "device.q2.anharmonicity"),
        ("coupling_too_strong", "device.j"),
        ("t2_exceeds_twice_t1", "device.q2.t2"),
        ("crosstalk_above_one", "device.crosstalk_amp"),
        ("single_level", "device.levels"),
        ("missing_t2", "device.q1"),
        ("future_schema", "schema_version"),
        ("no_schema", "<root>"),
        ("misspelled_key", "target_rat"),
        ("seed_not_integer", "seed"),
        ("negative_rate", "target_rate"),
        ("ramp_too_long", "ramp_time"),
        ("zero_shots", "shot_noise"),
        ("stage_before_dependency", "stages[0]"),
        ("unknown_stage", "stages[1]"),
        ("duplicate_stage", "stages[1]"),
        ("no_stages", "stages"),
        ("empty_rb_lengths", "rb.lengths"),
        ("negative_initial_amp", "initial_drive.cr_amp"),
        ("tolerance_above_one", "calibration.tolerance"),
        ("truncated", "device.q1"),
    ];
    let on_disk = fs::read_dir(data("")).unwrap().count();
    assert_eq!(on_disk, cases.len(), "every corpus file has an expectation");
    for (name, want) in cases {
        match RunConfig::load(&data(&format!("{name}.json"))) {
            Err(Error::ConfigInvalid { field, .. }) => assert_eq!(field, want, "{name}"),
            other => panic!("{name}: {other:?}"),
        }
    }
}

#[test]
fn missing_file_is_a_config_error() {
    assert!(matches!(
        RunConfig::load(Path::new("/nonexistent/run.json")),
        Err(Error::ConfigInvalid { .. })
    ));
}

#[test]
fn echo_may_start_from_a_supplied_drive() {
    let mut cfg = RunConfig {
        stages: vec![Stage::Echo, Stage::Rb],
        ..RunConfig::default()
    };
    assert!(cfg.validate().is_err());
    cfg.initial_drive = Some(crgate::dynamics::DriveSettings::zero(1.0 / 6e6, 10e-9));
    cfg.validate().unwrap();
}

fn stage_list() -> impl Strategy<Value = Vec<Stage>> {
    prop::sample::subsequence(Stage::ALL.to_vec(), 1..=6).prop_shuffle()
}

proptest! {
    #[test]
    fn stage_lists_validated_by_dependency_order(stages in stage_list()) {
        let cfg = RunConfig { stages: stages.clone(), ..RunConfig::default() };
        // independent oracle: each stage's prerequisite appears before it
        let pos = |s: Stage| stages.iter().position(|&x| x == s);
        let ok = stages.iter().enumerate().all(|(i, s)| match s {
            Stage::Cancel => true,
            Stage::Echo | Stage::Transients => pos(Stage::Cancel).is_some_and(|p| p < i),
            _ => pos(Stage::Echo).is_some_and(|p| p < i),
        });
        prop_assert_eq!(cfg.validate().is_ok(), ok, "{:?}", stages);
        let text: Vec<&str> = stages.iter().map(|s| s.name()).collect();
        prop_assert_eq!(Stage::parse_list(&text.join(",")).unwrap(), stages);
    }

    #[test]
    fn device_parameters_validated(
        t1 in -10e-6..40e-6f64,
        t2 in -10e-6..80e-6f64,
        alpha in -400e6..400e6f64,
        j in 0.0..80e6f64,
    ) {
        let mut cfg = RunConfig::default();
        cfg.device.q2.t1 = t1;
        cfg.device.q2.t2 = t2;
        cfg.device.q1.anharmonicity = alpha;
        cfg.device.j = j;
        let delta = (cfg.device.q1.frequency - cfg.device.q2.frequency).abs();
        let ok = t1 > 0.0 && t2 > 0.0 && t2 <= 2.0 * t1 && alpha < 0.0 && 10.0 * j <= delta;
        let json = cfg.to_json();
        match RunConfig::from_json(&json) {
            Ok(back) => {
                prop_assert!(ok);
                prop_assert_eq!(back, cfg);
            }
            Err(Error::ConfigInvalid { field, .. }) => {
                prop_assert!(!ok);
                prop_assert!(field.starts_with("device."), "{}", field);
            }
            Err(e) => prop_assert!(false, "{e:?}"),
        }
    }
}
