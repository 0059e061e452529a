//! CHSH-form Bell inequality for correlations between two parties.
//!
//! Party I holds the observables `A`, `A′`, party II holds `B`, `B′`. The
//! Bell operator is `A⊗B + A⊗B′ + A′⊗B − A′⊗B′`; local realism bounds its
//! expectation by 2 and quantum mechanics by 2√2.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigs, pauli, ComplexMatrix};
use crate::state::{check_projector_set, named_state, DensityOperator, Preset, StateVector};

/// `|O² − 1|` allowed for a dichotomic observable.
pub const DICHOTOMY_TOL: f64 = 1e-10;
/// `|S|` above `2 + VIOLATION_TOL` counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-10;
pub const TSIRELSON_TOL: f64 = 1e-9;
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

const DISTRIBUTION_TOL: f64 = 1e-9;

/// Hermitian operator with spectrum in {−1, +1}, kept together with its
/// rank-1 eigenprojectors grouped by sign.
#[derive(Debug, Clone, PartialEq)]
pub struct DichotomicObservable {
    qubits: usize,
    matrix: ComplexMatrix,
    plus: Vec<ComplexMatrix>,
    minus: Vec<ComplexMatrix>,
}

/// Largest entry of `|O² − 1|`, or infinity for non-square input.
pub fn dichotomy_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    (m * m).max_abs_diff(&ComplexMatrix::identity(m.rows()))
}

impl DichotomicObservable {
    pub fn from_projectors(plus: Vec<ComplexMatrix>, minus: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = plus
            .first()
            .or(minus.first())
            .map(ComplexMatrix::rows)
            .ok_or_else(|| Error::IncompleteProjectorSet("no projectors".into()))?;
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let all: Vec<ComplexMatrix> = plus.iter().chain(&minus).cloned().collect();
        check_projector_set(&all, dim)?;
        if let Some(p) = all.iter().find(|p| (p.trace().re - 1.0).abs() > DICHOTOMY_TOL) {
            return Err(Error::IncompleteProjectorSet(format!(
                "projector of trace {} is not rank one",
                p.trace().re
            )));
        }
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        for p in &plus {
            matrix = &matrix + p;
        }
        for p in &minus {
            matrix = &matrix - p;
        }
        let deviation = dichotomy_deviation(&matrix);
        if deviation > DICHOTOMY_TOL {
            return Err(Error::DichotomyViolated { deviation });
        }
        Ok(Self {
            qubits: dim.trailing_zeros() as usize,
            matrix,
            plus,
            minus,
        })
    }

    pub fn from_kets(plus: &[StateVector], minus: &[StateVector]) -> Result<Self> {
        let proj = |kets: &[StateVector]| -> Vec<ComplexMatrix> {
            kets.iter().map(|k| ComplexMatrix::outer(k.amplitudes())).collect()
        };
        Self::from_projectors(proj(plus), proj(minus))
    }

    /// Recovers the eigenprojectors of a Hermitian involution.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = dichotomy_deviation(&matrix);
        if deviation > DICHOTOMY_TOL {
            return Err(Error::DichotomyViolated { deviation });
        }
        let eig = hermitian_eigs(&matrix)?;
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (k, &lambda) in eig.values.iter().enumerate() {
            let p = ComplexMatrix::outer(&eig.vector(k));
            if lambda > 0.0 {
                plus.push(p);
            } else {
                minus.push(p);
            }
        }
        let mut obs = Self::from_projectors(plus, minus)?;
        // keep the caller's exact entries rather than the re-summed ones
        obs.matrix = matrix;
        Ok(obs)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn plus_projectors(&self) -> &[ComplexMatrix] {
        &self.plus
    }

    pub fn minus_projectors(&self) -> &[ComplexMatrix] {
        &self.minus
    }

    /// Eigenprojectors paired with their sign, plus projectors first.
    pub fn signed_projectors(&self) -> impl Iterator<Item = (i8, &ComplexMatrix)> {
        self.plus
            .iter()
            .map(|p| (1i8, p))
            .chain(self.minus.iter().map(|p| (-1i8, p)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObservableName {
    A,
    APrime,
    B,
    BPrime,
}

impl ObservableName {
    pub const ALL: [ObservableName; 4] = [
        ObservableName::A,
        ObservableName::APrime,
        ObservableName::B,
        ObservableName::BPrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObservableName::A => "a",
            ObservableName::APrime => "a_prime",
            ObservableName::B => "b",
            ObservableName::BPrime => "b_prime",
        }
    }
}

impl FromStr for ObservableName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ObservableName::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

impl fmt::Display for ObservableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The two-qubit observables that reach the maximal violation with the
/// four-particle state `(|↑↓↑↓⟩ − |↓↑↓↑⟩)/√2`.
pub fn two_qubit_observable(name: ObservableName) -> DichotomicObservable {
    let ket = named_state;
    let basis = |a: bool, b: bool| StateVector::basis(&[a, b]);
    let (uu, ud, du, dd) = (
        basis(false, false),
        basis(false, true),
        basis(true, false),
        basis(true, true),
    );
    let built = match name {
        ObservableName::A => DichotomicObservable::from_kets(
            &[ket(Preset::PsiPlus), ket(Preset::PhiPlus)],
            &[ket(Preset::PsiMinus), ket(Preset::PhiMinus)],
        ),
        ObservableName::APrime => DichotomicObservable::from_kets(&[uu, ud], &[du, dd]),
        ObservableName::B => DichotomicObservable::from_kets(
            &[uu, ket(Preset::BPlus)],
            &[ket(Preset::BMinus), dd],
        ),
        ObservableName::BPrime => DichotomicObservable::from_kets(
            &[dd, ket(Preset::BPrimePlus)],
            &[ket(Preset::BPrimeMinus), uu],
        ),
    };
    built.expect("two-qubit observables are complete and orthogonal")
}

/// The four settings of a CHSH experiment, in the order they are summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Setting {
    #[serde(rename = "AB")]
    AB,
    #[serde(rename = "AB'")]
    ABPrime,
    #[serde(rename = "A'B")]
    APrimeB,
    #[serde(rename = "A'B'")]
    APrimeBPrime,
}

impl Setting {
    pub const ALL: [Setting; 4] = [
        Setting::AB,
        Setting::ABPrime,
        Setting::APrimeB,
        Setting::APrimeBPrime,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Setting::AB => "AB",
            Setting::ABPrime => "AB'",
            Setting::APrimeB => "A'B",
            Setting::APrimeBPrime => "A'B'",
        }
    }

    /// Sign of this term in the CHSH sum.
    pub fn sign(self) -> f64 {
        match self {
            Setting::APrimeBPrime => -1.0,
            _ => 1.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `A`, `A′` for party I and `B`, `B′` for party II.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshObservables {
    pub a: DichotomicObservable,
    pub a_prime: DichotomicObservable,
    pub b: DichotomicObservable,
    pub b_prime: DichotomicObservable,
}

impl ChshObservables {
    pub fn new(
        a: DichotomicObservable,
        a_prime: DichotomicObservable,
        b: DichotomicObservable,
        b_prime: DichotomicObservable,
    ) -> Result<Self> {
        if a.qubits() != a_prime.qubits() || b.qubits() != b_prime.qubits() {
            return Err(Error::DimensionMismatch {
                expected: "matching qubit counts within each party".into(),
                found: format!(
                    "A:{} A':{} B:{} B':{}",
                    a.qubits(),
                    a_prime.qubits(),
                    b.qubits(),
                    b_prime.qubits()
                ),
            });
        }
        Ok(Self {
            a,
            a_prime,
            b,
            b_prime,
        })
    }

    /// The two-qubit-per-party quadruple.
    pub fn two_qubit() -> Self {
        Self {
            a: two_qubit_observable(ObservableName::A),
            a_prime: two_qubit_observable(ObservableName::APrime),
            b: two_qubit_observable(ObservableName::B),
            b_prime: two_qubit_observable(ObservableName::BPrime),
        }
    }

    /// Single-qubit quadruple: `A = −σx`, `A′ = σz`, `B = (−σz + σx)/√2`,
    /// `B′ = (σz + σx)/√2`.
    pub fn single_qubit() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mk = |m: ComplexMatrix| {
            DichotomicObservable::from_matrix(m).expect("Pauli combinations are involutions")
        };
        Self {
            a: mk(pauli::x().scale_real(-1.0)),
            a_prime: mk(pauli::z()),
            b: mk((&pauli::x() - &pauli::z()).scale_real(s)),
            b_prime: mk((&pauli::x() + &pauli::z()).scale_real(s)),
        }
    }

    pub fn get(&self, name: ObservableName) -> &DichotomicObservable {
        match name {
            ObservableName::A => &self.a,
            ObservableName::APrime => &self.a_prime,
            ObservableName::B => &self.b,
            ObservableName::BPrime => &self.b_prime,
        }
    }

    pub fn party_qubits(&self) -> (usize, usize) {
        (self.a.qubits(), self.b.qubits())
    }

    pub fn setting(&self, s: Setting) -> (&DichotomicObservable, &DichotomicObservable) {
        match s {
            Setting::AB => (&self.a, &self.b),
            Setting::ABPrime => (&self.a, &self.b_prime),
            Setting::APrimeB => (&self.a_prime, &self.b),
            Setting::APrimeBPrime => (&self.a_prime, &self.b_prime),
        }
    }

    pub fn matrices(&self) -> [&ComplexMatrix; 4] {
        [
            self.a.matrix(),
            self.a_prime.matrix(),
            self.b.matrix(),
            self.b_prime.matrix(),
        ]
    }
}

/// `A⊗B + A⊗B′ + A′⊗B − A′⊗B′` from raw matrices.
pub fn chsh_operator(
    a: &ComplexMatrix,
    a_prime: &ComplexMatrix,
    b: &ComplexMatrix,
    b_prime: &ComplexMatrix,
) -> ComplexMatrix {
    let plus = &(&a.kron(b) + &a.kron(b_prime)) + &a_prime.kron(b);
    &plus - &a_prime.kron(b_prime)
}

/// `Re Tr[W (X⊗Y)]` for each setting, from raw matrices.
pub fn chsh_terms(
    state: &DensityOperator,
    a: &ComplexMatrix,
    a_prime: &ComplexMatrix,
    b: &ComplexMatrix,
    b_prime: &ComplexMatrix,
) -> Result<[f64; 4]> {
    let pairs = [(a, b), (a, b_prime), (a_prime, b), (a_prime, b_prime)];
    let mut out = [0.0; 4];
    for (slot, (x, y)) in out.iter_mut().zip(pairs) {
        *slot = state.expectation(&x.kron(y))?;
    }
    Ok(out)
}

/// State plus CHSH observables; party I is the leading tensor factors.
#[derive(Debug, Clone)]
pub struct BellExperiment {
    state: DensityOperator,
    observables: ChshObservables,
}

impl BellExperiment {
    pub fn new(state: DensityOperator, observables: ChshObservables) -> Result<Self> {
        let (qa, qb) = observables.party_qubits();
        if state.qubits() != qa + qb {
            return Err(Error::DimensionMismatch {
                expected: format!("{}-qubit state", qa + qb),
                found: format!("{} qubits", state.qubits()),
            });
        }
        Ok(Self { state, observables })
    }

    /// The four-particle state with the two-qubit quadruple.
    pub fn four_qubit() -> Self {
        Self::new(
            DensityOperator::from_preset(Preset::FourParticlePsi),
            ChshObservables::two_qubit(),
        )
        .expect("4 = 2 + 2 qubits")
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn observables(&self) -> &ChshObservables {
        &self.observables
    }

    /// Party I qubit labels (1-based).
    pub fn party_one(&self) -> Vec<usize> {
        (1..=self.observables.a.qubits()).collect()
    }

    pub fn party_two(&self) -> Vec<usize> {
        let qa = self.observables.a.qubits();
        ((qa + 1)..=self.state.qubits()).collect()
    }
}

pub fn bell_operator(exp: &BellExperiment) -> ComplexMatrix {
    let [a, ap, b, bp] = exp.observables.matrices();
    chsh_operator(a, ap, b, bp)
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationTerm {
    pub setting: Setting,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BellReport {
    pub terms: Vec<CorrelationTerm>,
    pub s: f64,
    pub classical_bound: f64,
    pub tsirelson_bound: f64,
    pub violated: bool,
}

impl BellReport {
    pub fn from_terms(values: [f64; 4]) -> Self {
        let terms: Vec<CorrelationTerm> = Setting::ALL
            .iter()
            .zip(values)
            .map(|(&setting, value)| CorrelationTerm { setting, value })
            .collect();
        let mut report = Self {
            terms,
            s: 0.0,
            classical_bound: lhv_bound(),
            tsirelson_bound: TSIRELSON_BOUND,
            violated: false,
        };
        report.s = report.recompute_s();
        report.violated = report.s.abs() > report.classical_bound + VIOLATION_TOL;
        report
    }

    pub fn recompute_s(&self) -> f64 {
        self.terms.iter().map(|t| t.setting.sign() * t.value).sum()
    }
}

pub fn bell_value(exp: &BellExperiment) -> BellReport {
    let [a, ap, b, bp] = exp.observables.matrices();
    let terms = chsh_terms(&exp.state, a, ap, b, bp).expect("dimensions checked at construction");
    BellReport::from_terms(terms)
}

/// Party-level outcome pair labels for the four cells of each side, in the
/// order (+,+), (+,−), (−,+), (−,−).
pub const PAIR_CELLS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Joint distribution `P(ab, cd)` over `(a, b, c, d) ∈ {±1}⁴`, indexed
/// `[ab cell][cd cell]` per [`PAIR_CELLS`].
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    probs: [[f64; 4]; 4],
}

impl JointDistribution {
    pub fn new(probs: [[f64; 4]; 4]) -> Result<Self> {
        let mut sum = 0.0;
        for &p in probs.iter().flatten() {
            if !(p >= -1e-12) {
                return Err(Error::NotADistribution(format!("entry {p} is negative")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::NotADistribution(format!("entries sum to {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn from_flat(flat: [f64; 16]) -> Result<Self> {
        let mut probs = [[0.0; 4]; 4];
        for (i, p) in flat.into_iter().enumerate() {
            probs[i / 4][i % 4] = p;
        }
        Self::new(probs)
    }

    pub fn probs(&self) -> &[[f64; 4]; 4] {
        &self.probs
    }
}

/// `E = Σ abcd · P(ab, cd)`.
pub fn correlation_term(dist: &JointDistribution) -> f64 {
    let mut e = 0.0;
    for (i, &(a, b)) in PAIR_CELLS.iter().enumerate() {
        for (j, &(c, d)) in PAIR_CELLS.iter().enumerate() {
            e += f64::from(a * b * c * d) * dist.probs[i][j];
        }
    }
    e
}

/// Cell index for the k-th eigenprojector of a given sign. Plus projectors
/// alternate between (+,+) and (−,−), minus ones between (+,−) and (−,+), so
/// the cell's product `ab` always equals the eigenvalue.
fn cell_for(sign: i8, k: usize) -> usize {
    match (sign > 0, k % 2 == 0) {
        (true, true) => 0,
        (true, false) => 3,
        (false, true) => 1,
        (false, false) => 2,
    }
}

/// Born-rule joint distribution `Tr[W (Π_i ⊗ Π_j)]` over the parties'
/// eigenprojectors, binned into outcome-pair cells.
pub fn born_joint_distribution(
    state: &DensityOperator,
    obs_one: &DichotomicObservable,
    obs_two: &DichotomicObservable,
) -> Result<JointDistribution> {
    if state.qubits() != obs_one.qubits() + obs_two.qubits() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}-qubit state", obs_one.qubits() + obs_two.qubits()),
            found: format!("{} qubits", state.qubits()),
        });
    }
    let mut probs = [[0.0; 4]; 4];
    let cells = |obs: &DichotomicObservable| -> Vec<(usize, ComplexMatrix)> {
        let plus = obs.plus.iter().enumerate().map(|(k, p)| (cell_for(1, k), p.clone()));
        let minus = obs.minus.iter().enumerate().map(|(k, p)| (cell_for(-1, k), p.clone()));
        plus.chain(minus).collect()
    };
    let right = cells(obs_two);
    for (i, p) in cells(obs_one) {
        for (j, q) in &right {
            probs[i][*j] += state.expectation(&p.kron(q))?;
        }
    }
    JointDistribution::new(probs)
}

/// Exhaustive search over deterministic local correlation assignments.
#[derive(Debug, Clone, Serialize)]
pub struct LhvEnumeration {
    /// Largest value of `|e₁f₁ + e₁f₂ + e₂f₁ − e₂f₂|`.
    pub bound: i32,
    /// Largest signed value of the CHSH expression.
    pub signed_max: i32,
    /// Assignments `(e₁, e₂, f₁, f₂)` attaining `signed_max`.
    pub signed_maximizers: Vec<[i8; 4]>,
    /// How many assignments attain `bound` in absolute value.
    pub abs_attainers: usize,
    pub evaluated: usize,
}

/// Enumerates the 16 extreme points `e₁, e₂, f₁, f₂ ∈ {−1, +1}` of the local
/// correlation polytope. Any factorized model is a mixture of these, so the
/// maximum over them is the local bound.
pub fn lhv_enumeration() -> LhvEnumeration {
    let values: Vec<([i8; 4], i32)> = (0u8..16)
        .map(|bits| {
            let sign = |k: u8| if bits >> k & 1 == 0 { 1i8 } else { -1i8 };
            let (e1, e2, f1, f2) = (sign(3), sign(2), sign(1), sign(0));
            let v = i32::from(e1 * f1) + i32::from(e1 * f2) + i32::from(e2 * f1)
                - i32::from(e2 * f2);
            ([e1, e2, f1, f2], v)
        })
        .collect();
    let bound = values.iter().map(|(_, v)| v.abs()).max().unwrap_or(0);
    let signed_max = values.iter().map(|(_, v)| *v).max().unwrap_or(0);
    LhvEnumeration {
        bound,
        signed_max,
        signed_maximizers: values
            .iter()
            .filter(|(_, v)| *v == signed_max)
            .map(|(a, _)| *a)
            .collect(),
        abs_attainers: values.iter().filter(|(_, v)| v.abs() == bound).count(),
        evaluated: values.len(),
    }
}

pub fn lhv_bound() -> f64 {
    f64::from(lhv_enumeration().bound)
}

#[derive(Debug, Clone, Serialize)]
pub struct TsirelsonCheck {
    pub norm: f64,
    pub pass: bool,
}

/// Operator norm of the Bell operator against `2√2`. Rejects inputs that are
/// not Hermitian involutions.
pub fn tsirelson_check(
    a: &ComplexMatrix,
    a_prime: &ComplexMatrix,
    b: &ComplexMatrix,
    b_prime: &ComplexMatrix,
) -> Result<TsirelsonCheck> {
    for m in [a, a_prime, b, b_prime] {
        let deviation = dichotomy_deviation(m).max(m.hermitian_deviation());
        if deviation > DICHOTOMY_TOL {
            return Err(Error::DichotomyViolated { deviation });
        }
    }
    let eig = hermitian_eigs(&chsh_operator(a, a_prime, b, b_prime))?;
    let norm = eig.min().abs().max(eig.max().abs());
    Ok(TsirelsonCheck {
        norm,
        pass: norm <= TSIRELSON_BOUND + TSIRELSON_TOL,
    })
}

/// `(|↑↑⟩ − |↓↓⟩)/√2` with the single-qubit quadruple.
pub fn single_qubit_chsh() -> BellReport {
    single_qubit_chsh_on(Preset::PhiMinus, &ChshObservables::single_qubit())
}

/// Single-qubit CHSH value for a two-qubit preset and quadruple.
pub fn single_qubit_chsh_on(preset: Preset, observables: &ChshObservables) -> BellReport {
    let exp = BellExperiment::new(DensityOperator::from_preset(preset), observables.clone())
        .expect("two-qubit preset with single-qubit observables");
    bell_value(&exp)
}

/// Eigenvalues of a dichotomic observable are ±1; returns the largest
/// distance of any eigenvalue from that set.
pub fn spectrum_deviation(obs: &DichotomicObservable) -> Result<f64> {
    Ok(hermitian_eigs(obs.matrix())?
        .values
        .iter()
        .map(|x| (x.abs() - 1.0).abs())
        .fold(0.0, f64::max))
}
