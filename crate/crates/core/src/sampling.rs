//! Finite-shot estimation of the CHSH correlation terms.
//!
//! Each shot draws one cell of the Born distribution `Tr[W (Π_i ⊗ Π_j)]`
//! over the two parties' rank-1 eigenprojectors and records the party-level
//! signs. Randomness is keyed by `(seed, setting, shot index)`: shot `k` of
//! setting `s` always uses words `2k, 2k+1` of ChaCha8 stream `s`, so counts
//! do not depend on how shots are split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{ChshObservables, DichotomicObservable, Setting};
use crate::error::{Error, Result};
use crate::state::DensityOperator;

pub const DEFAULT_SHOTS: u64 = 100_000;
/// Born probabilities in `(-NOISE_FLOOR, 0)` are treated as rounding noise.
pub const NOISE_FLOOR: f64 = 1e-12;
const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShotPlan {
    shots_per_setting: u64,
    seed: u64,
}

impl ShotPlan {
    pub fn new(shots_per_setting: u64, seed: u64) -> Result<Self> {
        if shots_per_setting == 0 {
            return Err(Error::EmptyShotPlan);
        }
        Ok(Self {
            shots_per_setting,
            seed,
        })
    }

    pub fn shots_per_setting(&self) -> u64 {
        self.shots_per_setting
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// One Born cell: probability and the party-level signs it maps to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BornCell {
    pub probability: f64,
    pub sign_one: i8,
    pub sign_two: i8,
}

/// Born distribution over eigenprojector pairs, row-major in party I's
/// projector order (plus projectors first).
pub fn born_cells(
    state: &DensityOperator,
    obs_one: &DichotomicObservable,
    obs_two: &DichotomicObservable,
) -> Result<Vec<BornCell>> {
    if state.qubits() != obs_one.qubits() + obs_two.qubits() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}-qubit state", obs_one.qubits() + obs_two.qubits()),
            found: format!("{} qubits", state.qubits()),
        });
    }
    let mut cells = Vec::new();
    for (sign_one, p) in obs_one.signed_projectors() {
        for (sign_two, q) in obs_two.signed_projectors() {
            cells.push(BornCell {
                probability: state.expectation(&p.kron(q))?,
                sign_one,
                sign_two,
            });
        }
    }
    Ok(cells)
}

fn cumulative(cells: &[BornCell]) -> Vec<f64> {
    let clamped: Vec<f64> = cells.iter().map(|c| c.probability.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let mut acc = 0.0;
    clamped
        .iter()
        .map(|p| {
            acc += p / total;
            acc
        })
        .collect()
}

fn draw_cells(cdf: &[f64], shots: u64, seed: u64, stream: u64) -> Vec<u64> {
    let chunks = shots.div_ceil(CHUNK);
    let last = cdf.len() - 1;
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(shots);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            rng.set_word_pos(u128::from(start) * 2);
            let mut counts = vec![0u64; cdf.len()];
            for _ in start..end {
                let u: f64 = rng.random();
                let cell = cdf.partition_point(|&c| c <= u).min(last);
                counts[cell] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; cdf.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Shot counts for one setting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SettingCounts {
    pub shots: u64,
    /// Counts indexed `[a][c]` with index 0 for +1 and 1 for −1.
    pub signs: [[u64; 2]; 2],
    /// Counts per Born cell, same order as [`born_cells`].
    pub cells: Vec<u64>,
}

impl SettingCounts {
    pub fn count(&self, a: i8, c: i8) -> u64 {
        self.signs[usize::from(a < 0)][usize::from(c < 0)]
    }

    /// Empirical mean of the product `a·c`.
    pub fn mean_product(&self) -> f64 {
        let same = self.signs[0][0] + self.signs[1][1];
        let diff = self.signs[0][1] + self.signs[1][0];
        (same as f64 - diff as f64) / self.shots as f64
    }
}

fn sample_keyed(
    state: &DensityOperator,
    obs_one: &DichotomicObservable,
    obs_two: &DichotomicObservable,
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<SettingCounts> {
    if shots == 0 {
        return Err(Error::EmptyShotPlan);
    }
    let born = born_cells(state, obs_one, obs_two)?;
    let cells = draw_cells(&cumulative(&born), shots, seed, stream);
    let mut signs = [[0u64; 2]; 2];
    for (cell, n) in born.iter().zip(&cells) {
        signs[usize::from(cell.sign_one < 0)][usize::from(cell.sign_two < 0)] += n;
    }
    Ok(SettingCounts {
        shots,
        signs,
        cells,
    })
}

/// Samples one observable pair on stream 0.
pub fn sample_setting(
    state: &DensityOperator,
    obs_one: &DichotomicObservable,
    obs_two: &DichotomicObservable,
    shots: u64,
    seed: u64,
) -> Result<SettingCounts> {
    sample_keyed(state, obs_one, obs_two, shots, seed, 0)
}

#[derive(Debug, Clone, Serialize)]
pub struct SettingEstimate {
    pub setting: Setting,
    pub counts: SettingCounts,
    pub e: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimatedBellReport {
    pub plan: ShotPlan,
    pub settings: Vec<SettingEstimate>,
    pub s: f64,
    pub sigma_s: f64,
    /// `(|S| − 2) / σ_S`.
    pub violation_sigmas: f64,
}

impl EstimatedBellReport {
    /// `setting,a,c,count` rows with signs written as `+1` / `-1`.
    pub fn counts_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["setting", "a", "c", "count"])
            .expect("in-memory write");
        let sign = |s: i8| if s > 0 { "+1" } else { "-1" };
        for est in &self.settings {
            for a in [1i8, -1] {
                for c in [1i8, -1] {
                    w.write_record([
                        est.setting.label(),
                        sign(a),
                        sign(c),
                        &est.counts.count(a, c).to_string(),
                    ])
                    .expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

/// Standard error of the mean of ±1 samples with empirical mean `e`.
fn standard_error(e: f64, n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let n = n as f64;
    let var = (n / (n - 1.0)) * (1.0 - e * e).max(0.0);
    (var / n).sqrt()
}

/// Estimates all four CHSH terms; setting `k` draws from stream `k`.
pub fn estimate_bell(
    state: &DensityOperator,
    observables: &ChshObservables,
    plan: &ShotPlan,
) -> Result<EstimatedBellReport> {
    let settings = Setting::ALL
        .iter()
        .map(|&setting| {
            let (x, y) = observables.setting(setting);
            let counts = sample_keyed(
                state,
                x,
                y,
                plan.shots_per_setting,
                plan.seed,
                setting.index() as u64,
            )?;
            let e = counts.mean_product();
            let std_err = standard_error(e, counts.shots);
            Ok(SettingEstimate {
                setting,
                counts,
                e,
                std_err,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let s = settings.iter().map(|t| t.setting.sign() * t.e).sum::<f64>();
    let sigma_s = settings.iter().map(|t| t.std_err * t.std_err).sum::<f64>().sqrt();
    Ok(EstimatedBellReport {
        plan: *plan,
        settings,
        s,
        sigma_s,
        violation_sigmas: (s.abs() - 2.0) / sigma_s,
    })
}
