//! Multi-qubit kets, density operators and the operations on them.
//!
//! Qubits are labelled 1..=n. Qubit 1 is the leftmost tensor factor, i.e. the
//! most significant bit of a computational-basis index, and `|↑⟩` is bit 0.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigs, re, ComplexMatrix, C64, HERMITIAN_TOL};

pub const NORM_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue a density operator may have.
pub const POSITIVITY_FLOOR: f64 = -1e-10;
/// Outcomes below this probability have no conditional state.
pub const UNREACHABLE_PROBABILITY: f64 = 1e-12;
const COMPLETENESS_TOL: f64 = 1e-10;

/// Named kets available by string from configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Up,
    Down,
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
    FourParticlePsi,
    BPlus,
    BMinus,
    BPrimePlus,
    BPrimeMinus,
}

impl Preset {
    pub const ALL: [Preset; 11] = [
        Preset::Up,
        Preset::Down,
        Preset::PsiPlus,
        Preset::PsiMinus,
        Preset::PhiPlus,
        Preset::PhiMinus,
        Preset::FourParticlePsi,
        Preset::BPlus,
        Preset::BMinus,
        Preset::BPrimePlus,
        Preset::BPrimeMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Up => "up",
            Preset::Down => "down",
            Preset::PsiPlus => "psi_plus",
            Preset::PsiMinus => "psi_minus",
            Preset::PhiPlus => "phi_plus",
            Preset::PhiMinus => "phi_minus",
            Preset::FourParticlePsi => "four_particle_Psi",
            Preset::BPlus => "b_plus",
            Preset::BMinus => "b_minus",
            Preset::BPrimePlus => "bprime_plus",
            Preset::BPrimeMinus => "bprime_minus",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The four Bell states, in the order used for Bell-basis measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellState {
    PsiMinus,
    PsiPlus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiMinus,
        BellState::PsiPlus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    pub fn preset(self) -> Preset {
        match self {
            BellState::PsiMinus => Preset::PsiMinus,
            BellState::PsiPlus => Preset::PsiPlus,
            BellState::PhiPlus => Preset::PhiPlus,
            BellState::PhiMinus => Preset::PhiMinus,
        }
    }

    pub fn ket(self) -> StateVector {
        named_state(self.preset())
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::outer(self.ket().amplitudes())
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.preset().name())
    }
}

/// Normalized ket over `qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<C64>,
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

impl StateVector {
    /// Validates length (a power of two, at least one qubit) and unit norm.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_norm_tolerance(amplitudes, NORM_TOL)
    }

    pub fn with_norm_tolerance(amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        let qubits = qubits_for_len(amplitudes.len())?;
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { qubits, amplitudes })
    }

    /// Rescales to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let qubits = qubits_for_len(amplitudes.len())?;
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= f64::MIN_POSITIVE {
            return Err(Error::NotNormalized { norm_sq });
        }
        let k = norm_sq.sqrt().recip();
        amplitudes.iter_mut().for_each(|a| *a *= k);
        Ok(Self { qubits, amplitudes })
    }

    /// Computational-basis ket; `bits[0]` is qubit 1, `false` is `|↑⟩`.
    pub fn basis(bits: &[bool]) -> Self {
        let qubits = bits.len();
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut amplitudes = vec![C64::default(); 1 << qubits];
        amplitudes[index] = re(1.0);
        Self { qubits, amplitudes }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        StateVector {
            qubits: self.qubits + other.qubits,
            amplitudes,
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Exact amplitudes of the named kets.
///
/// `|b±⟩ = C±(|↑↓⟩ + (1 ± √2)|↓↑⟩)` and `|b′±⟩ = C∓(|↑↓⟩ + (−1 ± √2)|↓↑⟩)`
/// with `C± = (4 ± 2√2)^(−1/2)`.
pub fn named_state(preset: Preset) -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r2 = std::f64::consts::SQRT_2;
    let c_plus = (4.0 + 2.0 * r2).powf(-0.5);
    let c_minus = (4.0 - 2.0 * r2).powf(-0.5);
    let amps: Vec<f64> = match preset {
        Preset::Up => vec![1.0, 0.0],
        Preset::Down => vec![0.0, 1.0],
        Preset::PsiPlus => vec![0.0, s, s, 0.0],
        Preset::PsiMinus => vec![0.0, s, -s, 0.0],
        Preset::PhiPlus => vec![s, 0.0, 0.0, s],
        Preset::PhiMinus => vec![s, 0.0, 0.0, -s],
        Preset::FourParticlePsi => {
            let mut v = vec![0.0; 16];
            v[0b0101] = s;
            v[0b1010] = -s;
            v
        }
        Preset::BPlus => vec![0.0, c_plus, c_plus * (1.0 + r2), 0.0],
        Preset::BMinus => vec![0.0, c_minus, c_minus * (1.0 - r2), 0.0],
        Preset::BPrimePlus => vec![0.0, c_minus, c_minus * (-1.0 + r2), 0.0],
        Preset::BPrimeMinus => vec![0.0, c_plus, c_plus * (-1.0 - r2), 0.0],
    };
    let qubits = qubits_for_len(amps.len()).expect("preset length");
    StateVector {
        qubits,
        amplitudes: amps.into_iter().map(re).collect(),
    }
}

/// `|ψ⟩⟨ψ|`; fails if `psi` is not normalized.
pub fn density_from_ket(psi: &StateVector) -> Result<DensityOperator> {
    DensityOperator::from_ket(psi)
}

/// Hermitian, unit-trace, positive semidefinite operator on `qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates every density-operator invariant.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let qubits = Self::check_shape(&matrix)?;
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::NotDensityOperator(format!(
                "trace is {trace}, expected 1"
            )));
        }
        let min = hermitian_eigs(&matrix)?.min();
        if min < POSITIVITY_FLOOR {
            return Err(Error::NotDensityOperator(format!(
                "minimum eigenvalue {min:e} is negative"
            )));
        }
        Ok(Self { qubits, matrix })
    }

    fn check_shape(matrix: &ComplexMatrix) -> Result<usize> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        qubits_for_len(matrix.rows())
    }

    /// Skips the positivity check; callers have established the invariants
    /// by construction (convex sums, reductions, exact projectors).
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        let qubits = Self::check_shape(&matrix).expect("trusted density shape");
        Self { qubits, matrix }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_ket(psi: &StateVector) -> Result<Self> {
        let norm_sq = psi.norm_sqr();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self {
            qubits: psi.qubits(),
            matrix: ComplexMatrix::outer(psi.amplitudes()),
        })
    }

    pub fn from_preset(preset: Preset) -> Self {
        Self::from_ket(&named_state(preset)).expect("presets are normalized")
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        Self {
            qubits,
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            qubits: self.qubits + other.qubits,
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// `Re Tr[W O]`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        Ok(self.matrix.trace_product(op)?.re)
    }

    /// `Tr[W²]`.
    pub fn purity(&self) -> f64 {
        self.matrix
            .trace_product(&self.matrix)
            .expect("square matrix")
            .re
    }

    /// `⟨ψ|W|ψ⟩`.
    pub fn fidelity_with_ket(&self, psi: &StateVector) -> Result<f64> {
        let w_psi = self.matrix.apply(psi.amplitudes())?;
        Ok(psi
            .amplitudes()
            .iter()
            .zip(&w_psi)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eigs(&self.matrix)?.min())
    }
}

/// Weighted list of density operators to be mixed.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    components: Vec<(f64, DensityOperator)>,
}

impl MixtureSpec {
    pub fn new(components: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::WeightSumInvalid { sum: 0.0 });
        };
        let qubits = first.qubits();
        if let Some((_, bad)) = components.iter().find(|(_, w)| w.qubits() != qubits) {
            return Err(Error::DimensionMismatch {
                expected: format!("{qubits} qubits"),
                found: format!("{} qubits", bad.qubits()),
            });
        }
        if let Some(&(w, _)) = components.iter().find(|(w, _)| !(*w >= 0.0)) {
            return Err(Error::WeightSumInvalid { sum: w });
        }
        let sum: f64 = components.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::WeightSumInvalid { sum });
        }
        Ok(Self { components })
    }

    pub fn equal(states: Vec<DensityOperator>) -> Result<Self> {
        let w = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (w, s)).collect())
    }

    pub fn components(&self) -> &[(f64, DensityOperator)] {
        &self.components
    }
}

/// Convex combination of the mixture's components.
pub fn mix(spec: &MixtureSpec) -> DensityOperator {
    let (_, first) = &spec.components[0];
    let dim = first.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (w, state) in &spec.components {
        for (o, x) in out.as_mut_slice().iter_mut().zip(state.matrix().as_slice()) {
            *o += x * *w;
        }
    }
    DensityOperator::from_trusted(out)
}

/// Checks 1-based qubit labels and returns them sorted.
fn validate_indices(indices: &[usize], qubits: usize) -> Result<Vec<usize>> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let in_range = sorted.iter().all(|&q| (1..=qubits).contains(&q));
    if !in_range || sorted.len() != indices.len() {
        return Err(Error::InvalidSubsystem {
            indices: indices.to_vec(),
            qubits,
        });
    }
    Ok(sorted)
}

/// Bit mask of the given 1-based qubits in an `n`-qubit basis index.
fn qubit_mask(qubits: &[usize], n: usize) -> usize {
    qubits.iter().fold(0, |m, &q| m | 1 << (n - q))
}

/// Places the bits of `value` into the positions of `qubits` (most
/// significant qubit first).
fn scatter(value: usize, qubits: &[usize], n: usize) -> usize {
    let k = qubits.len();
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (pos, &q)| acc | ((value >> (k - 1 - pos)) & 1) << (n - q))
}

/// Reduced state on `keep`, ordered by ascending qubit label.
pub fn partial_trace(w: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let n = w.qubits();
    let keep = validate_indices(keep, n)?;
    if keep.is_empty() {
        return Err(Error::InvalidSubsystem {
            indices: keep,
            qubits: n,
        });
    }
    let traced: Vec<usize> = (1..=n).filter(|q| !keep.contains(q)).collect();
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    let m = w.matrix();
    let mut out = ComplexMatrix::zeros(kd, kd);
    for r in 0..kd {
        let rbits = scatter(r, &keep, n);
        for c in 0..kd {
            let cbits = scatter(c, &keep, n);
            let mut acc = C64::default();
            for t in 0..td {
                let tbits = scatter(t, &traced, n);
                acc += m[(rbits | tbits, cbits | tbits)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(DensityOperator::from_trusted(out))
}

/// Transposes the listed qubit factors; an empty list is the identity map.
pub fn partial_transpose(w: &DensityOperator, transposed: &[usize]) -> Result<ComplexMatrix> {
    let n = w.qubits();
    let transposed = validate_indices(transposed, n)?;
    let mask = qubit_mask(&transposed, n);
    let m = w.matrix();
    let dim = w.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            // swap the selected bits between row and column index
            let diff = (i ^ j) & mask;
            out[(i ^ diff, j ^ diff)] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Lifts an operator on the listed qubits to the full `n`-qubit space,
/// acting as identity elsewhere. `targets` gives the operator's factor order.
pub fn embed_operator(op: &ComplexMatrix, targets: &[usize], n: usize) -> Result<ComplexMatrix> {
    let sorted = validate_indices(targets, n)?;
    if sorted.is_empty() || op.rows() != 1 << targets.len() || !op.is_square() {
        return Err(Error::InvalidSubsystem {
            indices: targets.to_vec(),
            qubits: n,
        });
    }
    let mask = qubit_mask(targets, n);
    let dim = 1usize << n;
    let k = targets.len();
    let gather = |index: usize| -> usize {
        targets
            .iter()
            .fold(0, |acc, &q| (acc << 1) | ((index >> (n - q)) & 1))
    };
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let rest = i & !mask;
        let oi = gather(i);
        for oj in 0..(1usize << k) {
            let v = op[(oi, oj)];
            if v != C64::default() {
                out[(i, rest | scatter(oj, targets, n))] = v;
            }
        }
    }
    Ok(out)
}

/// One outcome of a projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub probability: f64,
    /// `Π W Π / p`, or `None` when `p` is below [`UNREACHABLE_PROBABILITY`].
    pub state: Option<DensityOperator>,
}

/// Born-rule measurement with a complete set of orthogonal projectors.
pub fn projective_measure(
    w: &DensityOperator,
    projectors: &[ComplexMatrix],
) -> Result<Vec<MeasurementOutcome>> {
    check_projector_set(projectors, w.dim())?;
    projectors
        .iter()
        .map(|p| {
            let probability = w.expectation(p)?;
            let state = if probability > UNREACHABLE_PROBABILITY {
                let post = &(p * w.matrix()) * p;
                Some(DensityOperator::from_trusted(post.scale_real(1.0 / probability)))
            } else {
                None
            };
            Ok(MeasurementOutcome {
                probability,
                state,
            })
        })
        .collect()
}

/// Checks that `projectors` are Hermitian, pairwise orthogonal, idempotent
/// and sum to the identity on a `dim`-dimensional space.
pub fn check_projector_set(projectors: &[ComplexMatrix], dim: usize) -> Result<()> {
    let fail = |msg: String| Err(Error::IncompleteProjectorSet(msg));
    if projectors.is_empty() {
        return fail("empty projector list".into());
    }
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for (i, p) in projectors.iter().enumerate() {
        if p.rows() != dim || p.cols() != dim {
            return fail(format!("projector {i} is {}x{}, expected {dim}x{dim}", p.rows(), p.cols()));
        }
        if p.hermitian_deviation() > COMPLETENESS_TOL {
            return fail(format!("projector {i} is not Hermitian"));
        }
        sum = &sum + p;
        for (j, q) in projectors.iter().enumerate().skip(i) {
            let prod = p * q;
            let target = if i == j { p.clone() } else { ComplexMatrix::zeros(dim, dim) };
            let dev = prod.max_abs_diff(&target);
            if dev > COMPLETENESS_TOL {
                return fail(if i == j {
                    format!("projector {i} is not idempotent (deviation {dev:e})")
                } else {
                    format!("projectors {i} and {j} are not orthogonal (deviation {dev:e})")
                });
            }
        }
    }
    let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if dev > COMPLETENESS_TOL {
        return fail(format!("projectors sum to identity only within {dev:e}"));
    }
    Ok(())
}

/// Bell-basis projectors on two qubits in the order (ψ−, ψ+, φ+, φ−).
pub fn bell_basis_projectors() -> Vec<ComplexMatrix> {
    BellState::ALL.iter().map(|b| b.projector()).collect()
}
