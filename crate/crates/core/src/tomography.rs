//! State reconstruction from subsystem correlations.
//!
//! Products of single-qubit Paulis form an orthogonal basis of the Hermitian
//! operators on n qubits (`Tr[σ_μ σ_ν] = 2ⁿ δ_μν`), so a state is fixed by its
//! correlation coefficients `c_μ = Tr[W σ_μ]` and rebuilt as
//! `W = 2⁻ⁿ Σ_μ c_μ σ_μ` with no linear solve.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigs, pauli, re, ComplexMatrix, C64};
use crate::state::DensityOperator;

/// Eigenvalue below which reconstructed data is declared unphysical.
pub const RECONSTRUCTION_FLOOR: f64 = -1e-8;
const COEFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => pauli::i2(),
            Pauli::X => pauli::x(),
            Pauli::Y => pauli::y(),
            Pauli::Z => pauli::z(),
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Nonzero entry of row `bit`; its column is `bit ^ flips()`.
    fn row_entry(self, bit: usize) -> C64 {
        match (self, bit) {
            (Pauli::I | Pauli::X, _) => re(1.0),
            (Pauli::Y, 0) => c(0.0, -1.0),
            (Pauli::Y, _) => c(0.0, 1.0),
            (Pauli::Z, 0) => re(1.0),
            (Pauli::Z, _) => re(-1.0),
        }
    }

    fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of Paulis; the first letter acts on qubit 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord(Vec<Pauli>);

impl PauliWord {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidPauliWord(String::new()));
        }
        Ok(Self(letters))
    }

    /// Word at position `index` of the base-4 enumeration (I=0, X=1, Y=2, Z=3).
    pub fn from_index(index: usize, qubits: usize) -> Self {
        Self(
            (0..qubits)
                .map(|k| Pauli::ALL[(index >> (2 * (qubits - 1 - k))) & 3])
                .collect(),
        )
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &p| (acc << 2) | p as usize)
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn qubits(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    fn flip_mask(&self) -> usize {
        self.0.iter().fold(0, |acc, p| (acc << 1) | p.flips() as usize)
    }

    /// Value of the single nonzero entry in `row`; it sits at column
    /// `row ^ flip_mask()`.
    fn row_entry(&self, row: usize) -> C64 {
        let n = self.0.len();
        self.0
            .iter()
            .enumerate()
            .map(|(k, p)| p.row_entry((row >> (n - 1 - k)) & 1))
            .product()
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Option<Vec<Pauli>> = s.chars().map(Pauli::from_char).collect();
        match letters {
            Some(l) if !l.is_empty() => Ok(Self(l)),
            _ => Err(Error::InvalidPauliWord(s.to_string())),
        }
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.as_char()))
    }
}

/// Dense Kronecker product of the word's Pauli matrices.
pub fn pauli_word(word: &PauliWord) -> ComplexMatrix {
    word.0
        .iter()
        .skip(1)
        .fold(word.0[0].matrix(), |acc, p| acc.kron(&p.matrix()))
}

/// `c_μ = Tr[W σ_μ]` for every Pauli word, in base-4 word order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationVector {
    qubits: usize,
    coefficients: Vec<f64>,
}

impl CorrelationVector {
    pub fn new(qubits: usize, coefficients: Vec<f64>) -> Result<Self> {
        if qubits == 0 || coefficients.len() != 1 << (2 * qubits) {
            return Err(Error::InvalidCorrelations(format!(
                "{} coefficients for {qubits} qubits",
                coefficients.len()
            )));
        }
        if (coefficients[0] - 1.0).abs() > COEFF_TOL {
            return Err(Error::InvalidCorrelations(format!(
                "identity coefficient is {}, expected 1",
                coefficients[0]
            )));
        }
        if let Some((i, v)) = coefficients
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.abs() <= 1.0 + COEFF_TOL))
        {
            return Err(Error::InvalidCorrelations(format!(
                "|c| > 1 for {}: {v}",
                PauliWord::from_index(i, qubits)
            )));
        }
        Ok(Self {
            qubits,
            coefficients,
        })
    }

    /// Builds from (word, value) pairs; words not listed are zero.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliWord, f64)>,
    {
        let mut qubits = None;
        let mut coefficients = Vec::new();
        let mut seen = Vec::new();
        for (word, value) in entries {
            let n = *qubits.get_or_insert(word.qubits());
            if word.qubits() != n {
                return Err(Error::InvalidCorrelations(format!(
                    "word {word} has {} letters, expected {n}",
                    word.qubits()
                )));
            }
            if coefficients.is_empty() {
                coefficients = vec![0.0; 1 << (2 * n)];
                seen = vec![false; 1 << (2 * n)];
            }
            let i = word.index();
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidCorrelations(format!("duplicate word {word}")));
            }
            coefficients[i] = value;
        }
        let qubits = qubits.ok_or_else(|| Error::InvalidCorrelations("no entries".into()))?;
        Self::new(qubits, coefficients)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn get(&self, word: &PauliWord) -> Option<f64> {
        (word.qubits() == self.qubits).then(|| self.coefficients[word.index()])
    }

    pub fn entries(&self) -> impl Iterator<Item = (PauliWord, f64)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, &v)| (PauliWord::from_index(i, self.qubits), v))
    }

    /// Writes `word,coefficient` CSV with every word listed.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["word", "coefficient"]).expect("in-memory write");
        for (word, v) in self.entries() {
            w.write_record([word.to_string(), v.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    /// Parses `word,coefficient` CSV; missing words default to zero.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::InvalidCorrelations(e.to_string()))?;
        if headers.iter().collect::<Vec<_>>() != ["word", "coefficient"] {
            return Err(Error::InvalidCorrelations(format!(
                "expected header `word,coefficient`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::InvalidCorrelations(e.to_string()))?;
            let row = line + 2;
            let word: PauliWord = record[0].parse()?;
            let value: f64 = record[1].parse().map_err(|_| {
                Error::InvalidCorrelations(format!(
                    "line {row}: bad coefficient `{}`",
                    &record[1]
                ))
            })?;
            entries.push((word, value));
        }
        Self::from_entries(entries)
    }
}

/// All `4ⁿ` correlation coefficients of `w`.
pub fn correlations_of(w: &DensityOperator) -> CorrelationVector {
    let n = w.qubits();
    let m = w.matrix();
    let dim = w.dim();
    let coefficients = (0..1usize << (2 * n))
        .into_par_iter()
        .map(|i| {
            let word = PauliWord::from_index(i, n);
            let mask = word.flip_mask();
            // Tr[W σ] = Σ_j σ[j, j^mask] W[j^mask, j]
            (0..dim)
                .map(|j| word.row_entry(j) * m[(j ^ mask, j)])
                .sum::<C64>()
                .re
        })
        .collect();
    CorrelationVector {
        qubits: n,
        coefficients,
    }
}

/// `W = 2⁻ⁿ Σ_μ c_μ σ_μ`, rejected if its spectrum dips below
/// [`RECONSTRUCTION_FLOOR`].
pub fn reconstruct(cv: &CorrelationVector) -> Result<DensityOperator> {
    let n = cv.qubits;
    let dim = 1usize << n;
    let scale = 1.0 / dim as f64;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (i, &coef) in cv.coefficients.iter().enumerate() {
        if coef == 0.0 {
            continue;
        }
        let word = PauliWord::from_index(i, n);
        let mask = word.flip_mask();
        for j in 0..dim {
            out[(j, j ^ mask)] += word.row_entry(j) * (coef * scale);
        }
    }
    let min_eigenvalue = hermitian_eigs(&out)?.min();
    if min_eigenvalue < RECONSTRUCTION_FLOOR {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityOperator::from_trusted(out))
}

/// Parameter count for real-Hilbert-space density matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountingReport {
    pub d: u64,
    /// `d(d+1)/2` for one subsystem.
    pub subsystem_params: u64,
    /// `d²(d²+1)/2` for the `d⊗d` composite.
    pub composite_params: u64,
    pub subsystem_params_squared: u64,
    /// Whether products of subsystem parameters could cover the composite.
    pub sufficient: bool,
}

pub fn real_hilbert_counting(d: u64) -> Result<CountingReport> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let overflow = || Error::InvalidDimension(d);
    let subsystem_params = d
        .checked_mul(d.checked_add(1).ok_or_else(overflow)?)
        .ok_or_else(overflow)?
        / 2;
    let d2 = d.checked_mul(d).ok_or_else(overflow)?;
    let composite_params = d2
        .checked_mul(d2.checked_add(1).ok_or_else(overflow)?)
        .ok_or_else(overflow)?
        / 2;
    let subsystem_params_squared = subsystem_params
        .checked_mul(subsystem_params)
        .ok_or_else(overflow)?;
    Ok(CountingReport {
        d,
        subsystem_params,
        composite_params,
        subsystem_params_squared,
        sufficient: composite_params <= subsystem_params_squared,
    })
}
