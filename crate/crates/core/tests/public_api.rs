use mgs_detect::detectors::{ml_detect, mmse_detect};
use mgs_detect::harness::{run_point_with, sweep, sweep_with, trial_system, Execution, ExperimentSpec, StopRule};
use mgs_detect::metrics::{rops_per_symbol, wilson_interval, ComplexityModel};
use mgs_detect::presets::DetectorSpec;
use mgs_detect::rng::derive_stream;
use mgs_detect::system::draw_trial;
use mgs_detect::{PamAlphabet, SweepAxis};
use proptest::prelude::*;

fn iterative_presets(n: usize) -> Vec<DetectorSpec> {
    vec![
        DetectorSpec::mgs_mr_baseline(),
        DetectorSpec::amgs_best(2, n).unwrap(),
        DetectorSpec::dsmgs_default(1),
        DetectorSpec::dsmgs_default(2),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn detections_respect_the_contract(seed in any::<u64>(), k in 1usize..=3, extra in 0usize..=2, m_idx in 0usize..2, snr in 0.0f64..25.0) {
        let m = [4u32, 16][m_idx];
        let n = k + extra;
        let alphabet = PamAlphabet::new(m).unwrap();
        let sys = draw_trial(k, n, &alphabet, snr, &mut derive_stream(seed, 0, 0)).unwrap();
        let ml = ml_detect(&sys).unwrap();
        for (j, spec) in iterative_presets(n).iter().enumerate() {
            let det = spec.resolve(k, m).unwrap();
            let cfg = det.base_config().unwrap().clone();
            let res = det.detect(&sys, &mut derive_stream(seed, 1 + j as u64, 0)).unwrap();
            prop_assert!(res.s_hat.iter().all(|&v| alphabet.index_of(v).is_ok()));
            prop_assert!(res.best_cost >= ml.best_cost * (1.0 - 1e-12));
            prop_assert!((res.best_cost - sys.cost2(&res.s_hat).sqrt()).abs() <= 1e-9 * (1.0 + res.best_cost));
            prop_assert!(res.restarts_used >= 1 && res.restarts_used <= cfg.max_restarts);
            prop_assert!(res.iterations_used <= cfg.max_iterations as u64 * cfg.max_restarts as u64);
            let model = ComplexityModel::with_mmse_init(det.kind(), k, n, alphabet.len());
            prop_assert_eq!(res.rops_charged, rops_per_symbol(&model, res.iterations_used as f64).unwrap());
        }
    }
}

#[test]
fn linear_detector_never_beats_the_oracle() {
    let alphabet = PamAlphabet::new(16).unwrap();
    for t in 0..200 {
        let sys = draw_trial(2, 3, &alphabet, 12.0, &mut derive_stream(5, 0, t)).unwrap();
        let ml = ml_detect(&sys).unwrap();
        let mmse = mmse_detect(&sys).unwrap();
        assert!(mmse.best_cost >= ml.best_cost * (1.0 - 1e-12));
    }
}

fn small_spec() -> ExperimentSpec {
    ExperimentSpec {
        k: 3,
        n: 4,
        m: 16,
        detectors: vec![
            DetectorSpec::mmse(),
            DetectorSpec::dsmgs_default(1),
            DetectorSpec::amgs_best(4, 4).unwrap(),
        ],
        axis: SweepAxis::SnrDb,
        axis_values: vec![6.0, 12.0],
        snr_db: f64::NAN,
        stop: StopRule {
            min_bit_errors: 60,
            max_trials: 3000,
        },
        master_seed: 21,
    }
}

#[test]
fn sweep_is_detector_major_and_engine_independent() {
    let spec = small_spec();
    let pts = sweep(&spec).unwrap();
    let order: Vec<(String, f64)> = pts.iter().map(|p| (p.detector.clone(), p.axis_value)).collect();
    let expected: Vec<(String, f64)> = spec
        .detectors
        .iter()
        .flat_map(|d| spec.axis_values.iter().map(move |&v| (d.name.clone(), v)))
        .collect();
    assert_eq!(order, expected);
    assert_eq!(pts, sweep_with(&spec, Execution::Sequential).unwrap());
    for p in &pts {
        assert_eq!(p.ber, p.bit_errors as f64 / p.total_bits as f64);
        let (lo, hi) = wilson_interval(p.bit_errors, p.total_bits);
        assert!(lo <= p.ber && p.ber <= hi);
        assert!((p.ber_ci95 - (hi - lo) / 2.0).abs() < 1e-15);
    }
}

#[test]
fn detectors_share_channel_realisations() {
    let spec = small_spec();
    let alphabet = PamAlphabet::new(spec.m).unwrap();
    let a = spec.setup(0, 1).unwrap();
    let b = spec.setup(2, 1).unwrap();
    for t in 0..10 {
        let x = trial_system(&spec, &a, &alphabet, 1, t).unwrap();
        let y = trial_system(&spec, &b, &alphabet, 1, t).unwrap();
        assert_eq!((x.y, x.h, x.s), (y.y, y.h, y.s));
    }
}

#[test]
fn sweeps_depend_on_the_master_seed() {
    let mut spec = small_spec();
    spec.detectors.truncate(1);
    let a = run_point_with(&spec, 0, 0, Execution::Sequential).unwrap();
    spec.master_seed += 1;
    let b = run_point_with(&spec, 0, 0, Execution::Sequential).unwrap();
    assert_ne!((a.trials, a.bit_errors), (b.trials, b.bit_errors));
}

#[test]
fn loading_and_iteration_axes_resolve() {
    let mut spec = small_spec();
    spec.n = 8;
    spec.axis = SweepAxis::Loading;
    spec.axis_values = vec![0.25, 0.5];
    spec.snr_db = 10.0;
    spec.detectors.truncate(2);
    let pts = sweep(&spec).unwrap();
    assert_eq!(pts.iter().map(|p| p.k).collect::<Vec<_>>(), vec![2, 4, 2, 4]);

    spec.axis = SweepAxis::IterationScale;
    spec.axis_values = vec![0.5, 2.0];
    let caps: Vec<u32> = (0..2)
        .map(|a| spec.setup(1, a).unwrap().detector.base_config().unwrap().max_iterations)
        .collect();
    assert!(caps[0] < caps[1]);
}
