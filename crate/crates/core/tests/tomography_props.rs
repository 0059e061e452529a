mod common;

use common::{cx, rng};
use proptest::prelude::*;
use qcorr_core::random::random_density;
use qcorr_core::{
    correlations_of, mix, pauli_word, real_hilbert_counting, reconstruct, trace_distance,
    ComplexMatrix, CorrelationVector, DensityOperator, MixtureSpec, PauliWord, Preset,
};

fn word(s: &str) -> PauliWord {
    s.parse().unwrap()
}

/// Tr[W σ] with a dense Pauli word, as an independent path to the coefficients.
fn dense_coefficient(w: &DensityOperator, s: &str) -> f64 {
    w.matrix().trace_product(&pauli_word(&word(s))).unwrap().re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_recovers_state(seed in any::<u64>(), n in 1usize..=4) {
        let w = random_density(n, &mut rng(seed));
        let back = reconstruct(&correlations_of(&w)).unwrap();
        prop_assert!(trace_distance(&w, &back).unwrap() <= 1e-10);
        let again = correlations_of(&back);
        for (x, y) in again.coefficients().iter().zip(correlations_of(&w).coefficients()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn correlations_are_linear(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let a = random_density(3, &mut r);
        let b = random_density(3, &mut r);
        let m = mix(&MixtureSpec::new(vec![(alpha, a.clone()), (1.0 - alpha, b.clone())]).unwrap());
        let (ca, cb, cm) = (correlations_of(&a), correlations_of(&b), correlations_of(&m));
        for ((x, y), z) in ca.coefficients().iter().zip(cb.coefficients()).zip(cm.coefficients()) {
            prop_assert!((alpha * x + (1.0 - alpha) * y - z).abs() <= 1e-12);
        }
    }

    #[test]
    fn sparse_coefficients_match_dense_traces(seed in any::<u64>()) {
        let w = random_density(2, &mut rng(seed));
        let c = correlations_of(&w);
        for (wd, v) in c.entries() {
            prop_assert!((dense_coefficient(&w, &wd.to_string()) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn word_index_round_trips(index in 0usize..256) {
        let w = PauliWord::from_index(index, 4);
        prop_assert_eq!(w.index(), index);
        let parsed: PauliWord = w.to_string().to_lowercase().parse().unwrap();
        prop_assert_eq!(parsed, w);
    }
}

#[test]
fn pauli_word_examples() {
    assert_eq!(pauli_word(&word("I")), ComplexMatrix::identity(2));
    assert_eq!(pauli_word(&word("ZZ")), ComplexMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]));
    let xy = pauli_word(&word("xy"));
    assert!(xy.is_hermitian());
    assert!(xy.trace().norm() == 0.0);
    assert_eq!(&xy * &xy, ComplexMatrix::identity(4));
    assert!("XQ".parse::<PauliWord>().is_err());
    assert!("".parse::<PauliWord>().is_err());
}

#[test]
fn singlet_coefficients() {
    let c = correlations_of(&DensityOperator::from_preset(Preset::PsiMinus));
    for (w, v) in c.entries() {
        let want = match w.to_string().as_str() {
            "II" => 1.0,
            "XX" | "YY" | "ZZ" => -1.0,
            _ => 0.0,
        };
        assert!((v - want).abs() < 1e-12, "{w}");
    }
    let mixed = correlations_of(&DensityOperator::maximally_mixed(3));
    assert!(mixed.coefficients()[1..].iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn anticorrelations_rebuild_the_singlet() {
    let c = CorrelationVector::from_entries([
        (word("II"), 1.0),
        (word("XX"), -1.0),
        (word("YY"), -1.0),
        (word("ZZ"), -1.0),
    ])
    .unwrap();
    let w = reconstruct(&c).unwrap();
    // ¼(I − σx⊗σx − σy⊗σy − σz⊗σz) written out
    let mut want = ComplexMatrix::zeros(4, 4);
    want[(1, 1)] = cx(0.5, 0.0);
    want[(2, 2)] = cx(0.5, 0.0);
    want[(1, 2)] = cx(-0.5, 0.0);
    want[(2, 1)] = cx(-0.5, 0.0);
    assert!(w.matrix().max_abs_diff(&want) < 1e-15);
    assert!(w.matrix().max_abs_diff(DensityOperator::from_preset(Preset::PsiMinus).matrix()) < 1e-15);
}

#[test]
fn identity_only_gives_maximally_mixed() {
    let c = CorrelationVector::from_entries([(word("II"), 1.0)]).unwrap();
    assert_eq!(reconstruct(&c).unwrap(), DensityOperator::maximally_mixed(2));
}

#[test]
fn four_particle_state_round_trip() {
    let w = DensityOperator::from_preset(Preset::FourParticlePsi);
    let c = correlations_of(&w);
    // ZIZI: qubits 1 and 3 always agree
    assert!((c.get(&word("ZIZI")).unwrap() - 1.0).abs() < 1e-12);
    assert!((c.get(&word("ZZII")).unwrap() + 1.0).abs() < 1e-12);
    let back = reconstruct(&c).unwrap();
    assert!(trace_distance(&w, &back).unwrap() < 1e-12);
}

#[test]
fn unphysical_data_is_rejected() {
    // all three correlations +1 would need an eigenvalue −1/2
    let c = CorrelationVector::from_entries([
        (word("II"), 1.0),
        (word("XX"), 1.0),
        (word("YY"), 1.0),
        (word("ZZ"), 1.0),
    ])
    .unwrap();
    assert!(matches!(reconstruct(&c), Err(qcorr_core::Error::NotPositive { .. })));
}

#[test]
fn counting_formulas() {
    let r = real_hilbert_counting(2).unwrap();
    assert_eq!((r.subsystem_params, r.composite_params, r.subsystem_params_squared), (3, 10, 9));
    assert!(!r.sufficient);
    let r = real_hilbert_counting(3).unwrap();
    assert_eq!((r.subsystem_params, r.composite_params), (6, 45));
    assert!(!r.sufficient);
    for d in 2u64..=10 {
        let r = real_hilbert_counting(d).unwrap();
        assert_eq!(r.subsystem_params, d * (d + 1) / 2);
        assert_eq!(r.composite_params, d * d * (d * d + 1) / 2);
        assert!(r.composite_params > r.subsystem_params_squared);
        assert!(!r.sufficient);
    }
    assert!(real_hilbert_counting(1).is_err());
    // complex two-qubit case: 16 Pauli words, 16 real parameters of a 4×4 Hermitian matrix
    assert_eq!(correlations_of(&DensityOperator::maximally_mixed(2)).coefficients().len(), 16);
}
