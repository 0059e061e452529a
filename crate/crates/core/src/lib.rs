//! Numerical laboratory for Bell inequalities on correlations.
//!
//! The crate builds two-qubit-per-party dichotomic observables whose Bell
//! operator reaches the Tsirelson bound on a four-qubit state, verifies the
//! local bound by enumeration, rebuilds states from Pauli correlations, runs
//! the mixing, swapping and flow entanglement demonstrations, and estimates
//! the CHSH value from finite shot counts.
//!
//! All matrices are at most 16×16; see [`linalg`] for the storage and
//! tensor-ordering conventions.

pub mod bell;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod random;
pub mod sampling;
pub mod state;
pub mod tomography;

pub use bell::{
    bell_operator, bell_value, born_joint_distribution, correlation_term, lhv_bound,
    lhv_enumeration, two_qubit_observable, single_qubit_chsh, tsirelson_check, BellExperiment,
    BellReport, ChshObservables, DichotomicObservable, JointDistribution, LhvEnumeration,
    ObservableName, Setting, TsirelsonCheck, TSIRELSON_BOUND,
};
pub use entanglement::{
    flow_demo, mixing_away_demo, ppt_check, swap_protocol, swap_protocol_with, Bipartition,
    FlowReport, MixingReport, Separability, SeparabilityVerdict, SwapOutcome, SwapReport,
};
pub use error::{Error, Result};
pub use linalg::{hermitian_eigs, trace_distance, ComplexMatrix, HermitianEigen, C64};
pub use sampling::{estimate_bell, sample_setting, EstimatedBellReport, SettingCounts, ShotPlan};
pub use state::{
    density_from_ket, mix, named_state, partial_trace, partial_transpose, projective_measure,
    BellState, DensityOperator, MixtureSpec, Preset, StateVector,
};
pub use tomography::{
    correlations_of, pauli_word, real_hilbert_counting, reconstruct, CorrelationVector,
    CountingReport, Pauli, PauliWord,
};
