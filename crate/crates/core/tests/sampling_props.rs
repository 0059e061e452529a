mod common;

use proptest::prelude::*;
use qcorr_core::sampling::born_cells;
use qcorr_core::{
    bell_value, estimate_bell, sample_setting, BellExperiment, ChshObservables, DensityOperator,
    Preset, Setting, ShotPlan, TSIRELSON_BOUND,
};

fn psi4() -> DensityOperator {
    DensityOperator::from_preset(Preset::FourParticlePsi)
}

fn estimate(state: &DensityOperator, shots: u64, seed: u64) -> qcorr_core::EstimatedBellReport {
    estimate_bell(state, &ChshObservables::two_qubit(), &ShotPlan::new(shots, seed).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn same_plan_same_report(seed in any::<u64>(), shots in 1u64..5000) {
        let a = estimate(&psi4(), shots, seed);
        let b = estimate(&psi4(), shots, seed);
        prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
        prop_assert_eq!(a.counts_csv(), b.counts_csv());
        for t in &a.settings {
            prop_assert_eq!(t.counts.signs.iter().flatten().sum::<u64>(), shots);
            prop_assert!((-1.0..=1.0).contains(&t.e));
        }
    }
}

#[test]
fn thread_count_does_not_change_counts() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate(&psi4(), 100_003, 17).counts_csv())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn frequencies_converge_to_born_probabilities() {
    let obs = ChshObservables::two_qubit();
    let shots = 100_000u64;
    for s in Setting::ALL {
        let (x, y) = obs.setting(s);
        let born = born_cells(&psi4(), x, y).unwrap();
        let counts = sample_setting(&psi4(), x, y, shots, 99).unwrap();
        let tv: f64 = born
            .iter()
            .zip(&counts.cells)
            .map(|(c, &n)| (n as f64 / shots as f64 - c.probability).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv <= 5.0 / (shots as f64).sqrt(), "{s:?}: tv {tv}");
    }
}

#[test]
fn single_term_within_five_standard_errors() {
    let exact = bell_value(&BellExperiment::four_qubit());
    let r = estimate(&psi4(), 100_000, 2024);
    for (t, e) in r.settings.iter().zip(&exact.terms) {
        assert!((t.e - e.value).abs() <= 5.0 * t.std_err, "{:?}", t.setting);
    }
}

#[test]
fn violation_is_statistically_clear() {
    let r = estimate(&psi4(), 100_000, 1);
    assert!((r.s.abs() - TSIRELSON_BOUND).abs() <= 5.0 * r.sigma_s, "S = {}", r.s);
    assert!(r.violation_sigmas > 10.0);
}

#[test]
fn maximally_mixed_shows_no_correlation() {
    let r = estimate(&DensityOperator::maximally_mixed(4), 10_000, 3);
    assert!(r.s.abs() <= 5.0 * r.sigma_s);
}

#[test]
fn sigma_scales_as_inverse_root_shots() {
    let small = estimate(&psi4(), 10_000, 5).sigma_s;
    let large = estimate(&psi4(), 1_000_000, 5).sigma_s;
    let ratio = small / large;
    assert!((9.5..=10.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn estimates_are_consistent_across_seeds_and_shot_counts() {
    let exact = bell_value(&BellExperiment::four_qubit()).s;
    let mut mean_errors = Vec::new();
    for shots in [1_000u64, 10_000, 100_000, 1_000_000] {
        let mut passes = 0;
        let mut err_sum = 0.0;
        for seed in 0..100 {
            let r = estimate(&psi4(), shots, seed);
            let err = (r.s - exact).abs();
            err_sum += err;
            if err <= 5.0 * r.sigma_s {
                passes += 1;
            }
        }
        assert!(passes >= 99, "{shots} shots: {passes}/100");
        mean_errors.push(err_sum / 100.0);
    }
    assert!(mean_errors.windows(2).all(|w| w[1] < w[0]), "{mean_errors:?}");
}
