//! Experiment configuration files (JSON).
//!
//! ```json
//! {
//!   "state": "four_particle_Psi",
//!   "observables": { "b": { "matrix": [[1, 0, 0, 0], ...] } },
//!   "shots": { "shots_per_setting": 100000, "seed": 7 },
//!   "tolerances": { "maximal_violation": 1e-10 },
//!   "output": "reports/run.json"
//! }
//! ```
//!
//! Complex numbers are written either as a bare real or as `[re, im]`.

use std::path::{Path, PathBuf};

use qcorr_core::bell::DichotomicObservable;
use qcorr_core::sampling::DEFAULT_SHOTS;
use qcorr_core::{
    two_qubit_observable, ChshObservables, ComplexMatrix, DensityOperator, ObservableName, Preset,
    ShotPlan, StateVector, C64,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const AMPLITUDE_NORM_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    pub fn value(self) -> C64 {
        match self {
            Amplitude::Real(r) => C64::new(r, 0.0),
            Amplitude::Complex([r, i]) => C64::new(r, i),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Preset(String),
    Amplitudes {
        amplitudes: Vec<Amplitude>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    /// One of `a`, `a_prime`, `b`, `b_prime`.
    Preset(String),
    /// Eigenkets grouped by sign.
    Projectors {
        plus: Vec<Vec<Amplitude>>,
        minus: Vec<Vec<Amplitude>>,
    },
    /// Explicit matrix, rows of entries. Accepted as given so that the
    /// dichotomy checks can report on it.
    Matrix { matrix: Vec<Vec<Amplitude>> },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservablesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<ObservableSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_prime: Option<ObservableSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<ObservableSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_prime: Option<ObservableSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShotsConfig {
    #[serde(default = "default_shots")]
    pub shots_per_setting: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_shots() -> u64 {
    DEFAULT_SHOTS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Default for ShotsConfig {
    fn default() -> Self {
        Self {
            shots_per_setting: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
        }
    }
}

/// Sizes and seed of the randomized sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub separable_states: usize,
    pub quadruples: usize,
    pub tomography_states: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            separable_states: 1000,
            quadruples: 500,
            tomography_states: 100,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed distance of |S| from 2√2.
    pub maximal_violation: f64,
    /// Slack above 2 for states that must obey the local bound.
    pub classical: f64,
    pub tsirelson: f64,
    pub dichotomy: f64,
    pub round_trip: f64,
    /// Entrywise tolerance for exact matrix identities.
    pub identity: f64,
    /// Probability and fidelity tolerance in the swap demo.
    pub swap: f64,
    /// Minimum `(|S| − 2)/σ` for the sampled violation.
    pub violation_sigmas: f64,
    /// Maximum distance of the sampled |S| from 2√2, in σ.
    pub consistency_sigmas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            maximal_violation: 1e-10,
            classical: 1e-9,
            tsirelson: 1e-9,
            dichotomy: 1e-10,
            round_trip: 1e-10,
            identity: 1e-12,
            swap: 1e-10,
            violation_sigmas: 10.0,
            consistency_sigmas: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_state")]
    pub state: StateSpec,
    #[serde(default)]
    pub observables: ObservablesConfig,
    #[serde(default)]
    pub shots: ShotsConfig,
    #[serde(default)]
    pub sweeps: SweepConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_state() -> StateSpec {
    StateSpec::Preset(Preset::FourParticlePsi.name().to_string())
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            state: default_state(),
            observables: ObservablesConfig::default(),
            shots: ShotsConfig::default(),
            sweeps: SweepConfig::default(),
            tolerances: Tolerances::default(),
            output: None,
        }
    }
}

/// The four CHSH observables as raw matrices, with the validated
/// eigenprojector form when every matrix is a proper dichotomic observable.
#[derive(Debug, Clone)]
pub struct Quadruple {
    pub matrices: [ComplexMatrix; 4],
    pub observables: Option<ChshObservables>,
}

impl Quadruple {
    pub fn from_observables(obs: ChshObservables) -> Self {
        Self {
            matrices: obs.matrices().map(Clone::clone),
            observables: Some(obs),
        }
    }

    pub fn from_matrices(matrices: [ComplexMatrix; 4]) -> Self {
        let built: Option<Vec<DichotomicObservable>> = matrices
            .iter()
            .map(|m| DichotomicObservable::from_matrix(m.clone()).ok())
            .collect();
        let observables = built.and_then(|v| {
            let [a, ap, b, bp]: [DichotomicObservable; 4] = v.try_into().ok()?;
            ChshObservables::new(a, ap, b, bp).ok()
        });
        Self {
            matrices,
            observables,
        }
    }

    pub fn party_qubits(&self) -> (usize, usize) {
        let q = |m: &ComplexMatrix| m.rows().trailing_zeros() as usize;
        (q(&self.matrices[0]), q(&self.matrices[2]))
    }
}

/// A validated configuration with its state and observables built.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub state: DensityOperator,
    pub quadruple: Quadruple,
    pub plan: ShotPlan,
}

pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, path)
}

pub fn parse_config(text: &str, path: &Path) -> CliResult<ExperimentConfig> {
    let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    resolve(&config)?;
    Ok(config)
}

fn complex_vec(values: &[Amplitude]) -> Vec<C64> {
    values.iter().map(|a| a.value()).collect()
}

fn build_state(spec: &StateSpec) -> CliResult<DensityOperator> {
    match spec {
        StateSpec::Preset(name) => {
            let preset: Preset = name.parse().map_err(|e| CliError::validation("state", e))?;
            Ok(DensityOperator::from_preset(preset))
        }
        StateSpec::Amplitudes { amplitudes } => {
            let n = amplitudes.len();
            if n < 2 || !n.is_power_of_two() {
                return Err(CliError::validation(
                    "state.amplitudes",
                    format!("length {n} is not a power of two"),
                ));
            }
            let ket = StateVector::with_norm_tolerance(complex_vec(amplitudes), AMPLITUDE_NORM_TOL)
                .map_err(|e| CliError::validation("state.amplitudes", e))?;
            DensityOperator::from_ket(&ket).map_err(|e| CliError::validation("state.amplitudes", e))
        }
    }
}

fn build_observable(field: &str, spec: Option<&ObservableSpec>, default: ObservableName) -> CliResult<ComplexMatrix> {
    let field = format!("observables.{field}");
    match spec {
        None => Ok(two_qubit_observable(default).matrix().clone()),
        Some(ObservableSpec::Preset(name)) => {
            let name: ObservableName = name.parse().map_err(|e| CliError::validation(&field, e))?;
            Ok(two_qubit_observable(name).matrix().clone())
        }
        Some(ObservableSpec::Projectors { plus, minus }) => {
            let kets = |list: &[Vec<Amplitude>]| -> CliResult<Vec<StateVector>> {
                list.iter()
                    .map(|k| {
                        StateVector::with_norm_tolerance(complex_vec(k), AMPLITUDE_NORM_TOL)
                            .map_err(|e| CliError::validation(&field, e))
                    })
                    .collect()
            };
            let obs = DichotomicObservable::from_kets(&kets(plus)?, &kets(minus)?)
                .map_err(|e| CliError::validation(&field, e))?;
            Ok(obs.matrix().clone())
        }
        Some(ObservableSpec::Matrix { matrix }) => {
            let dim = matrix.len();
            if dim < 2 || !dim.is_power_of_two() || matrix.iter().any(|r| r.len() != dim) {
                return Err(CliError::validation(
                    &field,
                    format!("matrix must be square with power-of-two size, got {dim} rows"),
                ));
            }
            let rows: Vec<Vec<C64>> = matrix.iter().map(|r| complex_vec(r)).collect();
            Ok(ComplexMatrix::from_rows(&rows))
        }
    }
}

pub fn resolve(config: &ExperimentConfig) -> CliResult<Resolved> {
    let state = build_state(&config.state)?;
    let o = &config.observables;
    let matrices = [
        build_observable("a", o.a.as_ref(), ObservableName::A)?,
        build_observable("a_prime", o.a_prime.as_ref(), ObservableName::APrime)?,
        build_observable("b", o.b.as_ref(), ObservableName::B)?,
        build_observable("b_prime", o.b_prime.as_ref(), ObservableName::BPrime)?,
    ];
    if matrices[0].rows() != matrices[1].rows() || matrices[2].rows() != matrices[3].rows() {
        return Err(CliError::validation(
            "observables",
            "a and a_prime, and b and b_prime, must act on the same number of qubits",
        ));
    }
    let quadruple = Quadruple::from_matrices(matrices);
    let (qa, qb) = quadruple.party_qubits();
    if qa + qb != state.qubits() {
        return Err(CliError::validation(
            "state",
            format!("{}-qubit state for {qa} + {qb} qubit observables", state.qubits()),
        ));
    }
    let plan = ShotPlan::new(config.shots.shots_per_setting, config.shots.seed)
        .map_err(|e| CliError::validation("shots.shots_per_setting", e))?;
    for (name, v) in [
        ("maximal_violation", config.tolerances.maximal_violation),
        ("classical", config.tolerances.classical),
        ("tsirelson", config.tolerances.tsirelson),
        ("dichotomy", config.tolerances.dichotomy),
        ("round_trip", config.tolerances.round_trip),
        ("identity", config.tolerances.identity),
        ("swap", config.tolerances.swap),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(CliError::validation(format!("tolerances.{name}"), "must be a finite nonnegative number"));
        }
    }
    Ok(Resolved {
        config: config.clone(),
        state,
        quadruple,
        plan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<ExperimentConfig> {
        parse_config(text, Path::new("test.json"))
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse(r#"{"state": "four_particle_Psi"}"#).unwrap();
        assert_eq!(c.shots, ShotsConfig::default());
        assert_eq!(c.tolerances, Tolerances::default());
        let r = resolve(&c).unwrap();
        assert_eq!(r.state.qubits(), 4);
        assert!(r.quadruple.observables.is_some());
        assert_eq!(parse("{}").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn amplitude_validation() {
        let err = parse(r#"{"state": {"amplitudes": [1, 0, 0]}}"#).unwrap_err();
        assert!(err.to_string().contains("power of two"), "{err}");
        let err = parse(r#"{"state": {"amplitudes": [0.9, 0]}}"#).unwrap_err();
        assert!(matches!(err, CliError::Validation { .. }), "{err}");
        let ok = parse(r#"{"state": {"amplitudes": [0, [0.7071067811865476, 0], [-0.7071067811865476, 0], 0]},
                          "observables": {"a": {"matrix": [[0, 1], [1, 0]]}, "a_prime": {"matrix": [[1, 0], [0, -1]]},
                                          "b": {"matrix": [[1, 0], [0, -1]]}, "b_prime": {"matrix": [[0, 1], [1, 0]]}}}"#);
        assert!(ok.is_ok(), "{ok:?}");
    }

    #[test]
    fn rejects_unknown_keys_with_position() {
        let err = parse("{\n  \"stat\": \"up\"\n}").unwrap_err();
        match err {
            CliError::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("stat"));
            }
            e => panic!("{e}"),
        }
        assert!(parse(r#"{"tolerances": {"bogus": 1}}"#).is_err());
    }

    #[test]
    fn rejects_mismatched_sizes() {
        let err = parse(r#"{"state": "psi_minus"}"#).unwrap_err();
        assert!(err.to_string().contains("state"), "{err}");
        let err = parse(r#"{"state": "nope"}"#).unwrap_err();
        assert!(matches!(err, CliError::Validation { .. }));
    }

    #[test]
    fn projector_specs_build_observables() {
        let text = r#"{"observables": {"a_prime": {"plus": [[1,0,0,0],[0,1,0,0]], "minus": [[0,0,1,0],[0,0,0,1]]}}}"#;
        let r = resolve(&parse(text).unwrap()).unwrap();
        assert_eq!(r.quadruple.matrices[1], ComplexMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]));
        let bad = r#"{"observables": {"a_prime": {"plus": [[1,0,0,0],[1,0,0,0]], "minus": [[0,0,1,0],[0,0,0,1]]}}}"#;
        assert!(parse(bad).is_err());
    }

    #[test]
    fn non_dichotomic_matrix_is_loaded_but_flagged() {
        let text = r#"{"observables": {"b": {"matrix": [[1.001,0,0,0],[0,1,0,0],[0,0,-1,0],[0,0,0,-1]]}}}"#;
        let r = resolve(&parse(text).unwrap()).unwrap();
        assert!(r.quadruple.observables.is_none());
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = parse(r#"{"state": {"amplitudes": [[1, 0], 0]}, "observables": {"a": "a_prime"}}"#);
        // two-qubit observables on a one-qubit state are rejected
        assert!(c.is_err());
        let c = ExperimentConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(parse(&text).unwrap(), c);
    }
}
