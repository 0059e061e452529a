//! Separability checks and the three entanglement non-robustness
//! demonstrations: mixing away, swapping, and flow into a three-qubit state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigs, ComplexMatrix};
use crate::state::{
    bell_basis_projectors, embed_operator, mix, named_state, partial_trace, partial_transpose,
    projective_measure, BellState, DensityOperator, MixtureSpec, Preset,
};

/// Partial-transpose eigenvalues below `-ENTANGLED_TOL` certify entanglement.
pub const ENTANGLED_TOL: f64 = 1e-10;
const DEMO_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-12;

/// Split of the qubits `1..=n` into two nonempty parties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

impl Bipartition {
    pub fn new(first: Vec<usize>, second: Vec<usize>) -> Self {
        Self { first, second }
    }

    /// Qubits `1..=k` against `k+1..=n`.
    pub fn split_at(k: usize, n: usize) -> Self {
        Self::new((1..=k).collect(), (k + 1..=n).collect())
    }

    fn validate(&self, qubits: usize) -> Result<()> {
        let mut all: Vec<usize> = self.first.iter().chain(&self.second).copied().collect();
        all.sort_unstable();
        let covers = all == (1..=qubits).collect::<Vec<_>>();
        if !covers || self.first.is_empty() || self.second.is_empty() {
            return Err(Error::InvalidBipartition {
                first: self.first.clone(),
                second: self.second.clone(),
                qubits,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Separability {
    Separable,
    Entangled,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparabilityVerdict {
    pub bipartition: Bipartition,
    pub min_pt_eigenvalue: f64,
    /// Sum of the magnitudes of the negative partial-transpose eigenvalues.
    pub negativity: f64,
    pub verdict: Separability,
    /// PPT is necessary and sufficient only for 2⊗2 and 2⊗3.
    pub conclusive: bool,
}

impl SeparabilityVerdict {
    pub fn is_separable(&self) -> bool {
        self.verdict == Separability::Separable
    }

    pub fn is_entangled(&self) -> bool {
        self.verdict == Separability::Entangled
    }
}

/// Peres–Horodecki test: transpose the second party and inspect the spectrum.
pub fn ppt_check(w: &DensityOperator, bipartition: &Bipartition) -> Result<SeparabilityVerdict> {
    bipartition.validate(w.qubits())?;
    let pt = partial_transpose(w, &bipartition.second)?;
    let values = hermitian_eigs(&pt)?.values;
    let min_pt_eigenvalue = values[0];
    let negativity = values.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
    let verdict = if min_pt_eigenvalue < -ENTANGLED_TOL {
        Separability::Entangled
    } else {
        Separability::Separable
    };
    let dims = (1usize << bipartition.first.len()) * (1usize << bipartition.second.len());
    Ok(SeparabilityVerdict {
        bipartition: bipartition.clone(),
        min_pt_eigenvalue,
        negativity,
        verdict,
        conclusive: dims <= 6,
    })
}

fn two_qubit_split() -> Bipartition {
    Bipartition::split_at(1, 2)
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    /// Largest entry of |½(P_ψ+ + P_ψ−) − ½(P_↑↓ + P_↓↑)|.
    pub max_entrywise_difference: f64,
    pub components: Vec<SeparabilityVerdict>,
    pub mixture: SeparabilityVerdict,
    pub passed: bool,
}

/// Equal mixing of ψ+ and ψ− equals the equal mixture of `|↑↓⟩`, `|↓↑⟩`.
pub fn mixing_away_demo() -> MixingReport {
    let psi_plus = DensityOperator::from_preset(Preset::PsiPlus);
    let psi_minus = DensityOperator::from_preset(Preset::PsiMinus);
    let lhs = mix(&MixtureSpec::equal(vec![psi_plus.clone(), psi_minus.clone()]).expect("2 qubits"));

    let up_down = DensityOperator::from_preset(Preset::Up).tensor(&DensityOperator::from_preset(Preset::Down));
    let down_up = DensityOperator::from_preset(Preset::Down).tensor(&DensityOperator::from_preset(Preset::Up));
    let rhs = mix(&MixtureSpec::equal(vec![up_down, down_up]).expect("2 qubits"));

    let split = two_qubit_split();
    let components: Vec<SeparabilityVerdict> = [&psi_plus, &psi_minus]
        .iter()
        .map(|w| ppt_check(w, &split).expect("valid split"))
        .collect();
    let mixture = ppt_check(&lhs, &split).expect("valid split");
    let max_entrywise_difference = lhs.matrix().max_abs_diff(rhs.matrix());
    let passed = max_entrywise_difference <= IDENTITY_TOL
        && components.iter().all(SeparabilityVerdict::is_entangled)
        && mixture.is_separable()
        && mixture.conclusive;
    MixingReport {
        max_entrywise_difference,
        components,
        mixture,
        passed,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SwapOutcome {
    /// Bell-basis result on qubits (2, 3).
    pub outcome_label: BellState,
    pub probability: f64,
    /// State of qubits (1, 4); absent for unreachable outcomes.
    #[serde(skip)]
    pub conditional_state: Option<DensityOperator>,
    /// Bell state closest to the conditional state.
    pub matched_bell: Option<BellState>,
    pub fidelity_to_bell: f64,
    pub purity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SwapReport {
    pub source_pairs: (BellState, BellState),
    /// Trace distance of the pre-measurement (1, 4) state from I/4.
    pub pre_measurement_distance_to_mixed: f64,
    pub pre_measurement: SeparabilityVerdict,
    pub outcomes: Vec<SwapOutcome>,
    pub probability_sum: f64,
    pub passed: bool,
}

/// Entanglement swapping with two singlet pairs on (1,2) and (3,4).
pub fn swap_protocol() -> SwapReport {
    swap_protocol_with(BellState::PsiMinus, BellState::PsiMinus)
}

/// Bell-state measurement on qubits (2, 3) of `|first⟩₁₂ ⊗ |second⟩₃₄`.
pub fn swap_protocol_with(first: BellState, second: BellState) -> SwapReport {
    let source = first.ket().tensor(&second.ket());
    let w = DensityOperator::from_ket(&source).expect("normalized");

    let before = partial_trace(&w, &[1, 4]).expect("valid qubits");
    let pre_measurement_distance_to_mixed =
        crate::linalg::trace_distance(&before, &DensityOperator::maximally_mixed(2)).expect("2 qubits");
    let pre_measurement = ppt_check(&before, &two_qubit_split()).expect("valid split");

    let projectors: Vec<ComplexMatrix> = bell_basis_projectors()
        .iter()
        .map(|p| embed_operator(p, &[2, 3], 4).expect("qubits 2,3 of 4"))
        .collect();
    let results = projective_measure(&w, &projectors).expect("Bell basis is complete");

    let outcomes: Vec<SwapOutcome> = BellState::ALL
        .iter()
        .zip(results)
        .map(|(&label, m)| {
            let conditional = m
                .state
                .map(|s| partial_trace(&s, &[1, 4]).expect("valid qubits"));
            let (matched_bell, fidelity_to_bell, purity) = match &conditional {
                Some(s) => {
                    let (best, f) = BellState::ALL
                        .iter()
                        .map(|b| (*b, s.fidelity_with_ket(&b.ket()).expect("2 qubits")))
                        .max_by(|x, y| x.1.total_cmp(&y.1))
                        .expect("four Bell states");
                    (Some(best), f, s.purity())
                }
                None => (None, 0.0, 0.0),
            };
            SwapOutcome {
                outcome_label: label,
                probability: m.probability,
                conditional_state: conditional,
                matched_bell,
                fidelity_to_bell,
                purity,
            }
        })
        .collect();

    let probability_sum: f64 = outcomes.iter().map(|o| o.probability).sum();
    let reachable = || outcomes.iter().filter(|o| o.conditional_state.is_some());
    let passed = (probability_sum - 1.0).abs() <= DEMO_TOL
        && reachable().count() > 0
        && reachable().all(|o| (o.fidelity_to_bell - 1.0).abs() <= DEMO_TOL)
        && pre_measurement_distance_to_mixed <= DEMO_TOL;
    SwapReport {
        source_pairs: (first, second),
        pre_measurement_distance_to_mixed,
        pre_measurement,
        outcomes,
        probability_sum,
        passed,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionVerdict {
    pub keep: Vec<usize>,
    pub verdict: SeparabilityVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowReport {
    pub trace: f64,
    pub min_eigenvalue: f64,
    /// Two-qubit reductions {1,2}, {1,3}, {2,3}.
    pub reductions: Vec<ReductionVerdict>,
    /// Largest entry of |W₂₃ − ½(P_↑↓ + P_↓↑)|.
    pub reduction_23_difference: f64,
    /// (2,3) reductions of the two mixture components.
    pub components: Vec<SeparabilityVerdict>,
    pub passed: bool,
}

/// Normalized components `|↑⟩⊗|ψ−⟩` and `|↓⟩⊗|ψ+⟩` of the three-qubit mixture.
pub fn flow_components() -> [DensityOperator; 2] {
    let ket = named_state;
    [
        DensityOperator::from_ket(&ket(Preset::Up).tensor(&ket(Preset::PsiMinus))).expect("normalized"),
        DensityOperator::from_ket(&ket(Preset::Down).tensor(&ket(Preset::PsiPlus))).expect("normalized"),
    ]
}

/// `½(P_↑ ⊗ P_ψ− + P_↓ ⊗ P_ψ+)`.
pub fn flow_state() -> DensityOperator {
    mix(&MixtureSpec::equal(flow_components().to_vec()).expect("3 qubits"))
}

pub fn flow_demo() -> FlowReport {
    let w = flow_state();
    let split = two_qubit_split();
    let reductions: Vec<ReductionVerdict> = [[1, 2], [1, 3], [2, 3]]
        .iter()
        .map(|keep| {
            let r = partial_trace(&w, keep).expect("valid qubits");
            ReductionVerdict {
                keep: keep.to_vec(),
                verdict: ppt_check(&r, &split).expect("valid split"),
            }
        })
        .collect();
    let r23 = partial_trace(&w, &[2, 3]).expect("valid qubits");
    let reduction_23_difference = r23
        .matrix()
        .max_abs_diff(&ComplexMatrix::from_real_diag(&[0.0, 0.5, 0.5, 0.0]));
    let components: Vec<SeparabilityVerdict> = flow_components()
        .iter()
        .map(|c| {
            let r = partial_trace(c, &[2, 3]).expect("valid qubits");
            ppt_check(&r, &split).expect("valid split")
        })
        .collect();
    let trace = w.matrix().trace().re;
    let min_eigenvalue = w.min_eigenvalue().expect("Hermitian");
    let passed = (trace - 1.0).abs() <= IDENTITY_TOL
        && min_eigenvalue >= crate::state::POSITIVITY_FLOOR
        && reduction_23_difference <= IDENTITY_TOL
        && reductions
            .iter()
            .all(|r| r.verdict.is_separable() && r.verdict.conclusive)
        && components.iter().all(SeparabilityVerdict::is_entangled);
    FlowReport {
        trace,
        min_eigenvalue,
        reductions,
        reduction_23_difference,
        components,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singlet_is_entangled() {
        let v = ppt_check(&DensityOperator::from_preset(Preset::PsiMinus), &two_qubit_split()).unwrap();
        assert!((v.min_pt_eigenvalue + 0.5).abs() < 1e-12);
        assert!(v.is_entangled());
        assert!(v.conclusive);
        assert!((v.negativity - 0.5).abs() < 1e-12);
    }

    #[test]
    fn larger_splits_are_inconclusive() {
        let w = DensityOperator::from_preset(Preset::FourParticlePsi);
        let v = ppt_check(&w, &Bipartition::split_at(2, 4)).unwrap();
        assert!(!v.conclusive);
        assert!(v.is_entangled());
    }

    #[test]
    fn invalid_bipartitions() {
        let w = DensityOperator::from_preset(Preset::PsiMinus);
        for (a, b) in [
            (vec![1, 2], vec![]),
            (vec![1], vec![1]),
            (vec![1], vec![3]),
            (vec![], vec![1, 2]),
        ] {
            assert!(matches!(
                ppt_check(&w, &Bipartition::new(a, b)),
                Err(Error::InvalidBipartition { .. })
            ));
        }
    }

    #[test]
    fn mixing_away() {
        let r = mixing_away_demo();
        assert!(r.max_entrywise_difference < 1e-15);
        assert!(r.components.iter().all(|c| c.is_entangled()));
        assert!(r.mixture.is_separable());
        assert!(r.passed);
    }

    #[test]
    fn swap_singlets() {
        let r = swap_protocol();
        assert!(r.passed);
        assert!(r.pre_measurement.is_separable());
        for o in &r.outcomes {
            assert!((o.probability - 0.25).abs() < 1e-12);
            assert_eq!(o.matched_bell, Some(o.outcome_label));
            assert!((o.fidelity_to_bell - 1.0).abs() < 1e-12);
            assert!((o.purity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_other_pairs_still_land_on_bell_states() {
        for first in BellState::ALL {
            for second in BellState::ALL {
                let r = swap_protocol_with(first, second);
                assert!(r.passed, "{first} {second}");
            }
        }
    }

    #[test]
    fn flow() {
        let r = flow_demo();
        assert!(r.passed, "{r:?}");
        assert!(r.reduction_23_difference < 1e-15);
        assert!(r
            .components
            .iter()
            .all(|c| (c.min_pt_eigenvalue + 0.5).abs() < 1e-12));
    }
}
