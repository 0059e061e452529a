mod common;

use common::{cx, naive_kron, rng};
use proptest::prelude::*;
use qcorr_core::linalg::pauli;
use qcorr_core::random::{random_density, random_unitary};
use qcorr_core::{hermitian_eigs, trace_distance, ComplexMatrix, DensityOperator, Preset};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), rows * cols).prop_map(move |v| {
        ComplexMatrix::from_vec(rows, cols, v.into_iter().map(|(a, b)| cx(a, b)).collect()).unwrap()
    })
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(dim, dim).prop_map(|m| (&m + &m.adjoint()).scale_real(0.5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_matches_entrywise_oracle(a in matrix(2, 3), b in matrix(3, 2)) {
        prop_assert!(a.kron(&b).max_abs_diff(&naive_kron(&a, &b)) == 0.0);
    }

    #[test]
    fn kron_is_associative(a in matrix(2, 2), b in matrix(2, 2), c in matrix(2, 2)) {
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn kron_is_bilinear(a in matrix(2, 2), b in matrix(2, 2), c in matrix(2, 2), s in -3.0f64..3.0) {
        let lhs = (&a + &b.scale_real(s)).kron(&c);
        let rhs = &a.kron(&c) + &b.kron(&c).scale_real(s);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let lhs = c.kron(&(&a + &b.scale_real(s)));
        let rhs = &c.kron(&a) + &c.kron(&b).scale_real(s);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn trace_of_kron_factorizes(a in hermitian(2), b in hermitian(4)) {
        let t = a.kron(&b).trace();
        prop_assert!((t - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn mixed_product_rule(a in matrix(2, 2), b in matrix(2, 2), c in matrix(2, 2), d in matrix(2, 2)) {
        let lhs = &a.kron(&b) * &c.kron(&d);
        let rhs = (&a * &c).kron(&(&b * &d));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(m in hermitian(8)) {
        let eig = hermitian_eigs(&m).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&m) <= 1e-10);
        let v = &eig.vectors;
        prop_assert!((&v.adjoint() * v).max_abs_diff(&ComplexMatrix::identity(8)) <= 1e-10);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn spectrum_is_unitarily_invariant(m in hermitian(4), seed in any::<u64>()) {
        let u = random_unitary(4, &mut rng(seed));
        let conj = &(&u * &m) * &u.adjoint();
        let conj = (&conj + &conj.adjoint()).scale_real(0.5);
        let before = hermitian_eigs(&m).unwrap().values;
        let after = hermitian_eigs(&conj).unwrap().values;
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn spectrum_invariant_under_eigenbasis_unitaries(m in hermitian(4), n in hermitian(4)) {
        // a test unitary made from the eigenvectors of an unrelated matrix
        let u = hermitian_eigs(&n).unwrap().vectors;
        let conj = &(&u.adjoint() * &m) * &u;
        let conj = (&conj + &conj.adjoint()).scale_real(0.5);
        let before = hermitian_eigs(&m).unwrap().values;
        let after = hermitian_eigs(&conj).unwrap().values;
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_distance_is_a_bounded_symmetric_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_density(2, &mut r);
        let b = random_density(2, &mut r);
        let ab = trace_distance(&a, &b).unwrap();
        let ba = trace_distance(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-12);
    }
}

#[test]
fn kron_examples() {
    assert_eq!(pauli::i2().kron(&pauli::i2()), ComplexMatrix::identity(4));
    let z = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
    assert_eq!(z.kron(&pauli::i2()), ComplexMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
    let xz = pauli::x().kron(&pauli::z());
    assert_eq!(xz[(0, 3)], cx(0.0, 0.0));
    assert_eq!(xz[(0, 2)], cx(1.0, 0.0));
}

#[test]
fn pauli_spectra() {
    for m in [pauli::x(), pauli::y(), pauli::z()] {
        let v = hermitian_eigs(&m).unwrap().values;
        assert!((v[0] + 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn singlet_projector_spectrum() {
    let w = DensityOperator::from_preset(Preset::PsiMinus);
    let v = hermitian_eigs(w.matrix()).unwrap().values;
    for (x, want) in v.iter().zip([0.0, 0.0, 0.0, 1.0]) {
        assert!((x - want).abs() < 1e-12);
    }
}

#[test]
fn trace_distance_examples() {
    let up = DensityOperator::from_preset(Preset::Up);
    let down = DensityOperator::from_preset(Preset::Down);
    assert!((trace_distance(&up, &down).unwrap() - 1.0).abs() < 1e-12);
    let half = trace_distance(&up, &DensityOperator::maximally_mixed(1)).unwrap();
    assert!((half - 0.5).abs() < 1e-12);
    let two = DensityOperator::maximally_mixed(2);
    assert!(trace_distance(&up, &two).is_err());
}

#[test]
fn rejects_non_hermitian_input() {
    let m = ComplexMatrix::from_rows(&[[cx(0.0, 0.0), cx(1.0, 0.0)], [cx(0.0, 0.0), cx(0.0, 0.0)]]);
    assert!(hermitian_eigs(&m).is_err());
}
