//! The individual verification checks. Each returns a serializable result
//! block together with its verdict.

use qcorr_core::bell::{chsh_operator, chsh_terms, dichotomy_deviation, single_qubit_chsh_on};
use qcorr_core::entanglement::flow_components;
use qcorr_core::linalg::hermitian_eigs;
use qcorr_core::random::{random_density, random_dichotomic, random_separable_state};
use qcorr_core::state::partial_trace;
use qcorr_core::{
    correlations_of, estimate_bell, flow_demo, lhv_enumeration, mixing_away_demo,
    real_hilbert_counting, reconstruct, swap_protocol, trace_distance, BellReport,
    ChshObservables, ComplexMatrix, CorrelationVector, DensityOperator, EstimatedBellReport,
    LhvEnumeration, PauliWord, Preset, ShotPlan, TSIRELSON_BOUND,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Quadruple, SweepConfig, Tolerances};
use crate::report::Check;

pub const MUTATION_SIZE: f64 = 1e-3;
const OBSERVABLE_NAMES: [&str; 4] = ["a", "a_prime", "b", "b_prime"];

fn sweep_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn s_of(terms: [f64; 4]) -> f64 {
    terms[0] + terms[1] + terms[2] - terms[3]
}

#[derive(Debug, Clone, Serialize)]
pub struct BellBlock {
    #[serde(flatten)]
    pub report: BellReport,
    pub distance_from_tsirelson: f64,
}

pub fn maximal_violation(state: &DensityOperator, q: &Quadruple, tol: &Tolerances) -> (BellBlock, Check) {
    let [a, ap, b, bp] = &q.matrices;
    let terms = chsh_terms(state, a, ap, b, bp).expect("sizes validated with the config");
    let report = BellReport::from_terms(terms);
    let distance = (report.s.abs() - TSIRELSON_BOUND).abs();
    let mut check = Check::at_most("1", "maximal_violation", distance, tol.maximal_violation, "||S| - 2√2|");
    check.detail = format!("S = {:.15}, {}", report.s, check.detail);
    (
        BellBlock {
            report,
            distance_from_tsirelson: distance,
        },
        check,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyBlock {
    /// max(|O² − 1|, |O − O†|) per observable.
    pub deviations: Vec<(String, f64)>,
    pub max_deviation: f64,
}

pub fn dichotomy(q: &Quadruple, tol: &Tolerances) -> (DichotomyBlock, Check) {
    let deviations: Vec<(String, f64)> = OBSERVABLE_NAMES
        .iter()
        .zip(&q.matrices)
        .map(|(n, m)| (n.to_string(), dichotomy_deviation(m).max(m.hermitian_deviation())))
        .collect();
    let max_deviation = deviations.iter().map(|d| d.1).fold(0.0, f64::max);
    let mut check = Check::at_most("4", "dichotomy", max_deviation, tol.dichotomy, "max |O² - 1|");
    if let Some((name, _)) = deviations.iter().find(|d| !(d.1 <= tol.dichotomy)) {
        check.detail = format!("{name} is not a ±1 observable: {}", check.detail);
    }
    (
        DichotomyBlock {
            deviations,
            max_deviation,
        },
        check,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct LhvBlock {
    pub enumeration: LhvEnumeration,
    pub separable_states: usize,
    pub max_abs_s_separable: f64,
}

pub fn classical_bound(q: &Quadruple, sweeps: &SweepConfig, tol: &Tolerances) -> (LhvBlock, Check) {
    let enumeration = lhv_enumeration();
    let [a, ap, b, bp] = &q.matrices;
    let qubits = q.party_qubits().0 + q.party_qubits().1;
    let mut rng = sweep_rng(sweeps.seed, 2);
    let max_abs_s_separable = (0..sweeps.separable_states)
        .map(|_| {
            let w = random_separable_state(qubits, 8, &mut rng);
            s_of(chsh_terms(&w, a, ap, b, bp).expect("sizes validated")).abs()
        })
        .fold(0.0, f64::max);
    let limit = 2.0 + tol.classical;
    let passed = enumeration.bound == 2 && max_abs_s_separable <= limit;
    let mut check = Check::new(
        "2",
        "classical_bound",
        passed,
        format!(
            "enumerated bound {} over {} assignments; max |S| over {} separable states = {:.12} (limit {limit})",
            enumeration.bound, enumeration.evaluated, sweeps.separable_states, max_abs_s_separable
        ),
    );
    check.value = Some(max_abs_s_separable);
    check.threshold = Some(limit);
    (
        LhvBlock {
            enumeration,
            separable_states: sweeps.separable_states,
            max_abs_s_separable,
        },
        check,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct TsirelsonBlock {
    pub configured_norm: Option<f64>,
    pub configured_error: Option<String>,
    pub quadruples: usize,
    pub max_random_norm: f64,
    pub bound: f64,
}

pub fn tsirelson(q: &Quadruple, sweeps: &SweepConfig, tol: &Tolerances) -> (TsirelsonBlock, Check) {
    let [a, ap, b, bp] = &q.matrices;
    let (configured_norm, configured_error) = match qcorr_core::tsirelson_check(a, ap, b, bp) {
        Ok(t) => (Some(t.norm), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (qa, qb) = q.party_qubits();
    let mut rng = sweep_rng(sweeps.seed, 3);
    let max_random_norm = (0..sweeps.quadruples)
        .map(|_| {
            let a = random_dichotomic(qa, &mut rng);
            let ap = random_dichotomic(qa, &mut rng);
            let b = random_dichotomic(qb, &mut rng);
            let bp = random_dichotomic(qb, &mut rng);
            let eig = hermitian_eigs(&chsh_operator(a.matrix(), ap.matrix(), b.matrix(), bp.matrix()))
                .expect("Bell operator is Hermitian");
            eig.min().abs().max(eig.max().abs())
        })
        .fold(0.0, f64::max);
    let limit = TSIRELSON_BOUND + tol.tsirelson;
    let attained = configured_norm.is_some_and(|n| (n - TSIRELSON_BOUND).abs() <= tol.tsirelson);
    let passed = max_random_norm <= limit && attained;
    let configured = match (&configured_norm, &configured_error) {
        (Some(n), _) => format!("configured quadruple norm {n:.15}"),
        (None, Some(e)) => format!("configured quadruple rejected: {e}"),
        _ => unreachable!(),
    };
    let mut check = Check::new(
        "3",
        "tsirelson",
        passed,
        format!(
            "max norm over {} random quadruples = {max_random_norm:.12} (limit {limit:.12}); {configured}",
            sweeps.quadruples
        ),
    );
    check.value = Some(max_random_norm);
    check.threshold = Some(limit);
    (
        TsirelsonBlock {
            configured_norm,
            configured_error,
            quadruples: sweeps.quadruples,
            max_random_norm,
            bound: TSIRELSON_BOUND,
        },
        check,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTripBlock {
    pub states_per_size: usize,
    /// Largest trace distance for 1, 2, 3, 4 qubits.
    pub max_trace_distance: Vec<(usize, f64)>,
    pub anticorrelation_difference: f64,
}

pub fn round_trip(sweeps: &SweepConfig, tol: &Tolerances) -> (RoundTripBlock, Check) {
    let mut rng = sweep_rng(sweeps.seed, 5);
    let mut max_trace_distance = Vec::new();
    let mut failure = None;
    for n in 1..=4 {
        let mut worst = 0.0f64;
        for _ in 0..sweeps.tomography_states {
            let w = random_density(n, &mut rng);
            match reconstruct(&correlations_of(&w)) {
                Ok(back) => worst = worst.max(trace_distance(&w, &back).expect("same size")),
                Err(e) => {
                    failure.get_or_insert(format!("{n} qubits: {e}"));
                    worst = f64::INFINITY;
                }
            }
        }
        max_trace_distance.push((n, worst));
    }
    let word = |s: &str| s.parse::<PauliWord>().expect("valid word");
    let anti = CorrelationVector::from_entries([
        (word("II"), 1.0),
        (word("XX"), -1.0),
        (word("YY"), -1.0),
        (word("ZZ"), -1.0),
    ])
    .expect("valid vector");
    let singlet = DensityOperator::from_preset(Preset::PsiMinus);
    let anticorrelation_difference = reconstruct(&anti)
        .map(|w| w.matrix().max_abs_diff(singlet.matrix()))
        .unwrap_or(f64::INFINITY);
    let worst = max_trace_distance.iter().map(|x| x.1).fold(0.0, f64::max);
    let passed = worst <= tol.round_trip && anticorrelation_difference <= tol.identity;
    let mut check = Check::new(
        "5",
        "ssc_round_trip",
        passed,
        format!(
            "max trace distance {worst:e} (limit {:e}) over {} states per size; anticorrelation vector vs singlet projector {anticorrelation_difference:e}{}",
            tol.round_trip,
            sweeps.tomography_states,
            failure.map(|f| format!("; {f}")).unwrap_or_default()
        ),
    );
    check.value = Some(worst);
    check.threshold = Some(tol.round_trip);
    (
        RoundTripBlock {
            states_per_size: sweeps.tomography_states,
            max_trace_distance,
            anticorrelation_difference,
        },
        check,
    )
}

pub fn counting_range() -> (Vec<qcorr_core::CountingReport>, Check) {
    let reports: Vec<_> = (2..=10)
        .map(|d| real_hilbert_counting(d).expect("d >= 2"))
        .collect();
    let d2 = &reports[0];
    let passed = d2.composite_params == 10
        && d2.subsystem_params_squared == 9
        && reports.iter().all(|r| !r.sufficient);
    let check = Check::new(
        "6",
        "real_counting",
        passed,
        format!(
            "d=2: composite {} vs N² {}; insufficient for every d in 2..=10: {}",
            d2.composite_params,
            d2.subsystem_params_squared,
            reports.iter().all(|r| !r.sufficient)
        ),
    );
    (reports, check)
}

pub fn mixing(tol: &Tolerances) -> (qcorr_core::MixingReport, Check) {
    let r = mixing_away_demo();
    let passed = r.max_entrywise_difference <= tol.identity
        && r.components.iter().all(|c| c.is_entangled())
        && r.mixture.is_separable()
        && r.mixture.conclusive;
    let check = Check::new(
        "7",
        "mixing_away",
        passed,
        format!(
            "max entrywise difference {:e}; component min PT eigenvalues {:?}; mixture min PT eigenvalue {:e}",
            r.max_entrywise_difference,
            r.components.iter().map(|c| c.min_pt_eigenvalue).collect::<Vec<_>>(),
            r.mixture.min_pt_eigenvalue
        ),
    );
    (r, check)
}

pub fn swap(tol: &Tolerances) -> (qcorr_core::SwapReport, Check) {
    let r = swap_protocol();
    let prob_err = r
        .outcomes
        .iter()
        .map(|o| (o.probability - 0.25).abs())
        .fold(0.0, f64::max);
    let fid_err = r
        .outcomes
        .iter()
        .map(|o| (o.fidelity_to_bell - 1.0).abs())
        .fold(0.0, f64::max);
    let labels_match = r.outcomes.iter().all(|o| o.matched_bell == Some(o.outcome_label));
    let passed = prob_err <= tol.swap
        && fid_err <= tol.swap
        && labels_match
        && r.pre_measurement_distance_to_mixed <= tol.swap;
    let check = Check::new(
        "8",
        "swap",
        passed,
        format!(
            "max |p - 1/4| {prob_err:e}; max |F - 1| {fid_err:e}; labels match {labels_match}; pre-measurement distance to I/4 {:e}",
            r.pre_measurement_distance_to_mixed
        ),
    );
    (r, check)
}

pub fn flow() -> (qcorr_core::FlowReport, Check) {
    let r = flow_demo();
    let reductions_ok = r
        .reductions
        .iter()
        .all(|x| x.verdict.is_separable() && x.verdict.conclusive);
    let components_ok = r.components.iter().all(|c| c.is_entangled());
    // cross-check the component claim directly
    let direct = flow_components().iter().all(|c| {
        let r = partial_trace(c, &[2, 3]).expect("valid qubits");
        qcorr_core::ppt_check(&r, &qcorr_core::Bipartition::split_at(1, 2))
            .expect("valid split")
            .is_entangled()
    });
    let check = Check::new(
        "9",
        "flow",
        reductions_ok && components_ok && direct,
        format!(
            "two-qubit reductions separable: {reductions_ok} (min PT eigenvalues {:?}); (2,3) reductions of components entangled: {components_ok}",
            r.reductions.iter().map(|x| x.verdict.min_pt_eigenvalue).collect::<Vec<_>>()
        ),
    );
    (r, check)
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingBlock {
    pub estimate: Option<EstimatedBellReport>,
    pub deterministic: bool,
    pub error: Option<String>,
}

pub fn sample(
    state: &DensityOperator,
    obs: Option<&ChshObservables>,
    plan: &ShotPlan,
) -> Result<EstimatedBellReport, String> {
    let obs = obs.ok_or("observables are not all ±1 observables, cannot sample")?;
    estimate_bell(state, obs, plan).map_err(|e| e.to_string())
}

pub fn statistical(state: &DensityOperator, q: &Quadruple, plan: &ShotPlan, tol: &Tolerances) -> (SamplingBlock, Check) {
    let first = sample(state, q.observables.as_ref(), plan);
    let second = sample(state, q.observables.as_ref(), plan);
    let (estimate, error) = match first {
        Ok(e) => (Some(e), None),
        Err(e) => (None, Some(e)),
    };
    let bytes = |r: &Result<EstimatedBellReport, String>| r.as_ref().ok().map(|e| serde_json::to_string(e).expect("serializes"));
    let deterministic = estimate.is_some()
        && estimate.as_ref().map(|e| serde_json::to_string(e).expect("serializes")) == bytes(&second);
    let check = match &estimate {
        Some(e) => {
            let distance = (e.s.abs() - TSIRELSON_BOUND).abs() / e.sigma_s;
            let passed = e.violation_sigmas > tol.violation_sigmas
                && distance <= tol.consistency_sigmas
                && deterministic;
            let mut c = Check::new(
                "10",
                "statistical_violation",
                passed,
                format!(
                    "S = {:.6} ± {:.6} at {} shots/setting; (|S| - 2)/σ = {:.2} (must exceed {}); ||S| - 2√2|/σ = {distance:.2} (limit {}); repeat run identical: {deterministic}",
                    e.s,
                    e.sigma_s,
                    plan.shots_per_setting(),
                    e.violation_sigmas,
                    tol.violation_sigmas,
                    tol.consistency_sigmas
                ),
            );
            c.value = Some(e.violation_sigmas);
            c.threshold = Some(tol.violation_sigmas);
            c
        }
        None => Check::new("10", "statistical_violation", false, error.clone().unwrap_or_default()),
    };
    (
        SamplingBlock {
            estimate,
            deterministic,
            error,
        },
        check,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct SingleQubitBlock {
    /// â = −σx, â′ = σz, b̂ = (−σz + σx)/√2, b̂′ = (σz + σx)/√2 on (|↑↑⟩ − |↓↓⟩)/√2.
    pub literal: BellReport,
    /// Same state with â = +σx.
    pub flipped_a: BellReport,
    /// Literal observables on (|↑↓⟩ − |↓↑⟩)/√2.
    pub on_psi_minus: BellReport,
}

pub fn single_qubit(tol: &Tolerances) -> (SingleQubitBlock, Check) {
    let obs = ChshObservables::single_qubit();
    let literal = single_qubit_chsh_on(Preset::PhiMinus, &obs);
    let mut flipped = obs.clone();
    flipped.a = qcorr_core::DichotomicObservable::from_matrix(obs.a.matrix().scale_real(-1.0))
        .expect("negated involution");
    let flipped_a = single_qubit_chsh_on(Preset::PhiMinus, &flipped);
    let on_psi_minus = single_qubit_chsh_on(Preset::PsiMinus, &obs);
    let distance = (literal.s.abs() - TSIRELSON_BOUND).abs();
    let mut check = Check::at_most("11", "single_qubit_chsh", distance, tol.maximal_violation, "||S| - 2√2|");
    check.detail = format!(
        "S = {:.15} with terms {:?}; {} (with â = +σx: S = {:.12}; on ψ-: S = {:.12})",
        literal.s,
        literal.terms.iter().map(|t| t.value).collect::<Vec<_>>(),
        check.detail,
        flipped_a.s,
        on_psi_minus.s
    );
    (
        SingleQubitBlock {
            literal,
            flipped_a,
            on_psi_minus,
        },
        check,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct Mutation {
    pub row: usize,
    pub col: usize,
    pub s: f64,
    pub dichotomy_deviation: f64,
    pub caught_by: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MutationBlock {
    pub size: f64,
    pub baseline_passes: bool,
    pub mutations: Vec<Mutation>,
}

/// Perturbs each entry of b̂ in turn and reruns checks 1 and 4.
pub fn mutation_sensitivity(state: &DensityOperator, q: &Quadruple, tol: &Tolerances) -> (MutationBlock, Check) {
    let baseline_passes = maximal_violation(state, q, tol).1.passed && dichotomy(q, tol).1.passed;
    let b = &q.matrices[2];
    let mut mutations = Vec::new();
    for row in 0..b.rows() {
        for col in 0..b.cols() {
            let mut m: ComplexMatrix = b.clone();
            m[(row, col)] += MUTATION_SIZE;
            let mut mats = q.matrices.clone();
            mats[2] = m;
            let mutated = Quadruple {
                matrices: mats,
                observables: None,
            };
            let (bell, c1) = maximal_violation(state, &mutated, tol);
            let (dich, c4) = dichotomy(&mutated, tol);
            let caught_by = [c1, c4].into_iter().filter(|c| !c.passed).map(|c| c.id).collect();
            mutations.push(Mutation {
                row,
                col,
                s: bell.report.s,
                dichotomy_deviation: dich.max_deviation,
                caught_by,
            });
        }
    }
    let caught = mutations.iter().filter(|m| !m.caught_by.is_empty()).count();
    let check = Check::new(
        "12",
        "mutation_sensitivity",
        baseline_passes && caught == mutations.len(),
        format!(
            "baseline checks 1 and 4 pass: {baseline_passes}; {caught}/{} single-entry perturbations of b by {MUTATION_SIZE} fail check 1 or 4",
            mutations.len()
        ),
    );
    (
        MutationBlock {
            size: MUTATION_SIZE,
            baseline_passes,
            mutations,
        },
        check,
    )
}
