//! Random states, unitaries and observables for property sweeps.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::bell::DichotomicObservable;
use crate::linalg::{c, ComplexMatrix, C64};
use crate::state::{mix, DensityOperator, MixtureSpec, StateVector};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unitary: Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= proj * y);
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

pub fn random_pure_state<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> StateVector {
    let amps = (0..1usize << qubits).map(|_| gaussian(rng)).collect();
    StateVector::normalized(amps).expect("nonzero Gaussian vector")
}

/// Ginibre ensemble `G G† / Tr` with a random rank in `1..=2ⁿ`.
pub fn random_density<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> DensityOperator {
    let dim = 1usize << qubits;
    let rank = rng.random_range(1..=dim);
    let g = ComplexMatrix::from_vec(dim, rank, (0..dim * rank).map(|_| gaussian(rng)).collect())
        .expect("shape");
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    let mut w = w.scale_real(1.0 / tr);
    // clean rounding asymmetry so the Hermitian check is exact
    let adj = w.adjoint();
    w = (&w + &adj).scale_real(0.5);
    DensityOperator::new(w).expect("Ginibre matrices are valid states")
}

/// Tensor product of independent random single-qubit states.
pub fn random_product_state<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> DensityOperator {
    (1..qubits).fold(random_density(1, rng), |acc, _| acc.tensor(&random_density(1, rng)))
}

/// Convex mixture of `1..=max_components` random product states.
pub fn random_separable_state<R: Rng + ?Sized>(
    qubits: usize,
    max_components: usize,
    rng: &mut R,
) -> DensityOperator {
    let k = rng.random_range(1..=max_components.max(1));
    let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    // push the rounding residue into the last weight
    let residue = 1.0 - weights.iter().sum::<f64>();
    *weights.last_mut().expect("k >= 1") += residue;
    let components = weights
        .into_iter()
        .map(|w| (w, random_product_state(qubits, rng)))
        .collect();
    mix(&MixtureSpec::new(components).expect("weights sum to one"))
}

/// `U diag(+1, …, −1, …) U†` with equally many signs of each kind.
pub fn random_dichotomic<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> DichotomicObservable {
    let dim = 1usize << qubits;
    let u = random_unitary(dim, rng);
    let kets: Vec<StateVector> = (0..dim)
        .map(|j| StateVector::with_norm_tolerance(u.column(j), 1e-10).expect("unit columns"))
        .collect();
    let (plus, minus) = kets.split_at(dim / 2);
    DichotomicObservable::from_kets(plus, minus).expect("orthonormal basis")
}

/// Rank-1 projectors onto the columns of a random unitary.
pub fn random_projective_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let u = random_unitary(dim, rng);
    (0..dim).map(|j| ComplexMatrix::outer(&u.column(j))).collect()
}
