use qreact::avg::{reactivity, Geometry};
use qreact::states::{parse_state_spec, werner};
use qreact::{AveragingMode, AveragingModeF32, DensityMatrix, DensityMatrixF32};

#[test]
fn state_file_round_trip_through_reactivity() {
    let rho: DensityMatrix = parse_state_spec("wstate:3").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    std::fs::write(&path, rho.to_json()).unwrap();
    let back: DensityMatrix = parse_state_spec(&format!("file:{}", path.display())).unwrap();
    let mode = AveragingMode::sphere_fibonacci(4096);
    let a = reactivity(&rho, &mode).unwrap();
    let b = reactivity(&back, &mode).unwrap();
    assert_eq!(a.reactivity.to_bits(), b.reactivity.to_bits());
}

#[test]
fn single_and_double_precision_agree() {
    let r64 = reactivity(
        &werner::<f64>(0.7).unwrap(),
        &AveragingMode::sphere_fibonacci(2048),
    )
    .unwrap();
    let rho32: DensityMatrixF32 = werner(0.7f32).unwrap();
    let r32 = reactivity(&rho32, &AveragingModeF32::sphere_fibonacci(2048)).unwrap();
    assert!((r64.reactivity - r32.reactivity as f64).abs() < 1e-4);
}

#[test]
fn monte_carlo_is_seeded() {
    let rho: DensityMatrix = parse_state_spec("ghz:3").unwrap();
    let run = |seed| {
        reactivity(
            &rho,
            &AveragingMode::monte_carlo(Geometry::Sphere, 500, seed),
        )
        .unwrap()
        .reactivity
    };
    assert_eq!(run(1).to_bits(), run(1).to_bits());
    assert_ne!(run(1).to_bits(), run(2).to_bits());
}

#[test]
fn every_party_count_runs() {
    for n in 2..=6 {
        let rho: DensityMatrix = parse_state_spec(&format!("ghz:{n}")).unwrap();
        let mode = AveragingMode::monte_carlo(Geometry::Sphere, 200, 0);
        let r = reactivity(&rho, &mode).unwrap();
        assert!(r.reactivity.is_finite() && r.reactivity > 0.0, "ghz:{n}");
    }
}
