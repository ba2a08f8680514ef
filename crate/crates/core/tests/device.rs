use crgate::device::*;
use crgate::dynamics::DriveSettings;
use proptest::prelude::*;

fn device() -> impl Strategy<Value = DeviceConfig> {
    (
        4.5e9..7.5e9f64,
        0.2e9..1.2e9f64,
        any::<bool>(),
        -400e6..-150e6f64,
        -400e6..-150e6f64,
        1e6..15e6f64,
        0.0..0.2f64,
        -3.0..3.0f64,
    )
        .prop_map(|(f1, gap, below, a1, a2, j, m, phi)| {
            let mut cfg = DeviceConfig::reference();
            cfg.q1.frequency = f1;
            cfg.q2.frequency = if below { f1 - gap } else { f1 + gap };
            cfg.q1.anharmonicity = a1;
            cfg.q2.anharmonicity = a2;
            cfg.j = j;
            cfg.crosstalk_amp = m;
            cfg.crosstalk_phase = phi;
            cfg
        })
        .prop_filter("valid and non-degenerate", |cfg| {
            cfg.validate().is_ok() && derived_couplings(cfg).is_ok()
        })
}

fn drive(amp: f64, phase: f64, cancel: f64, cancel_phase: f64) -> DriveSettings {
    DriveSettings {
        cr_amp: amp,
        cr_phase: phase,
        cancel_amp: cancel,
        cancel_phase,
        gate_time: 200e-9,
        ramp_time: 10e-9,
    }
}

proptest! {
    #[test]
    fn mu_over_nu_is_anharmonicity_over_detuning(cfg in device()) {
        let k = derived_couplings(&cfg).unwrap();
        let ratio = cfg.q1.anharmonicity / detuning(&cfg);
        prop_assert!((k.mu / k.nu - ratio).abs() < 1e-12 * ratio.abs().max(1.0));
    }

    #[test]
    fn predicted_rates_are_linear_in_drive(
        cfg in device(),
        amp in 1e6..40e6f64,
        scale in 0.1..3.0f64,
        th in -3.0..3.0f64,
        ratio in 0.0..0.2f64,
        cth in -3.0..3.0f64,
    ) {
        let a = predicted_effective_hamiltonian(&cfg, &drive(amp, th, ratio * amp, cth)).unwrap().terms;
        let b = predicted_effective_hamiltonian(&cfg, &drive(scale * amp, th, scale * ratio * amp, cth))
            .unwrap()
            .terms;
        for (x, y) in [(a.zx, b.zx), (a.zy, b.zy), (a.ix, b.ix), (a.iy, b.iy)] {
            prop_assert!((y - scale * x).abs() <= 1e-9 * (scale * x).abs().max(1.0));
        }
        // drive-independent
        prop_assert_eq!(a.zz, b.zz);
        prop_assert_eq!(a.iz, 0.0);
    }

    #[test]
    fn perfect_cancellation_nulls_single_qubit_rates(
        cfg in device(),
        amp in 1e6..40e6f64,
        th in -3.0..3.0f64,
    ) {
        let mut d = drive(amp, th, 0.0, 0.0);
        let (c_amp, c_phase) = perfect_cancellation(&cfg, &d).unwrap();
        let k = derived_couplings(&cfg).unwrap();
        // |ν e^{iθ} + m e^{i(θ+φ)}| Ω
        let x = k.nu * th.cos() + cfg.crosstalk_amp * (th + cfg.crosstalk_phase).cos();
        let y = k.nu * th.sin() + cfg.crosstalk_amp * (th + cfg.crosstalk_phase).sin();
        prop_assert!((c_amp - amp * x.hypot(y)).abs() < 1e-9 * amp);
        d.cancel_amp = c_amp;
        d.cancel_phase = c_phase;
        let h = predicted_effective_hamiltonian(&cfg, &d).unwrap().terms;
        prop_assert!(h.ix.abs() < 1e-9 * amp && h.iy.abs() < 1e-9 * amp, "{:?}", h);
        prop_assert!((h.zx.hypot(h.zy) - k.mu.abs() * amp).abs() < 1e-9 * amp);
    }

    #[test]
    fn detuning_is_antisymmetric(cfg in device()) {
        let mut swapped = cfg.clone();
        std::mem::swap(&mut swapped.q1, &mut swapped.q2);
        prop_assert_eq!(detuning(&swapped), -detuning(&cfg));
    }
}

#[test]
fn measured_device_couplings() {
    let k = derived_couplings(&DeviceConfig::reference()).unwrap();
    // quoted to two significant figures: μ = 2.4 %, ν = 4.3 %, ZZ = −0.33 MHz
    assert!((k.mu - 0.024).abs() < 0.0005, "{}", k.mu);
    assert!((k.nu.abs() - 0.043).abs() < 0.0005, "{}", k.nu);
    assert!((k.epsilon + 0.33e6).abs() < 0.005e6, "{}", k.epsilon);
    // −23 dB isolation for m12 = 7.1 %
    assert!((20.0 * 0.071f64.log10() + 23.0).abs() < 0.5);
}

#[test]
fn closed_forms_against_hand_evaluation() {
    // Δ = 546 MHz, α1 = −300 MHz, α2 = −314 MHz, J = 10.7 MHz
    let (d, a1, a2, j) = (546e6, -300e6, -314e6, 10.7e6);
    let mu = -(j / d) * a1 / (d + a1);
    let nu = -j / (d + a1);
    let eps = j * j * (a1 + a2) / ((d + a1) * (d - a2));
    let k = derived_couplings(&DeviceConfig::reference()).unwrap();
    assert!((k.mu - mu).abs() < 1e-12);
    assert!((k.nu - nu).abs() < 1e-12);
    assert!((k.epsilon - eps).abs() < 1e-6);
}

#[test]
fn degenerate_detuning_reported() {
    let mut cfg = DeviceConfig::reference();
    // Δ12 + α1 = 0
    cfg.q2.frequency = cfg.q1.frequency + cfg.q1.anharmonicity;
    assert!(matches!(
        derived_couplings(&cfg),
        Err(crgate::Error::DegenerateDetuning { .. })
    ));
}

#[test]
fn invalid_devices_rejected_with_field() {
    type Mutation = Box<dyn Fn(&mut DeviceConfig)>;
    let cases: Vec<(&str, Mutation)> = vec![
        ("device.q1", Box::new(|c| c.q1.t1 = -1e-6)),
        ("device.q2", Box::new(|c| c.q2.anharmonicity = 200e6)),
        ("device.j", Box::new(|c| c.j = 60e6)),
        ("device.crosstalk_amp", Box::new(|c| c.crosstalk_amp = 1.5)),
        ("device.levels", Box::new(|c| c.levels = 1)),
    ];
    for (prefix, mutate) in cases {
        let mut cfg = DeviceConfig::reference();
        mutate(&mut cfg);
        match cfg.validate() {
            Err(crgate::Error::ConfigInvalid { field, .. }) => {
                assert!(field.starts_with(prefix), "{field} vs {prefix}")
            }
            other => panic!("{prefix}: {other:?}"),
        }
    }
}

#[test]
fn config_json_round_trip() {
    let cfg = DeviceConfig::reference();
    let text = serde_json::to_string(&cfg).unwrap();
    let back: DeviceConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cfg);
}
