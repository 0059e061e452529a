#![allow(dead_code)]

use num_complex::Complex64;
use qcorr_core::ComplexMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Partial trace by explicit index bookkeeping, independent of the library.
/// `keep` is 1-based and the result keeps ascending qubit order.
pub fn naive_partial_trace(m: &ComplexMatrix, n: usize, keep: &[usize]) -> ComplexMatrix {
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (1..=n).filter(|q| !keep.contains(q)).collect();
    let compose = |kept: usize, tr: usize| {
        let mut idx = 0usize;
        for (k, &q) in keep.iter().enumerate() {
            idx |= ((kept >> (keep.len() - 1 - k)) & 1) << (n - q);
        }
        for (k, &q) in traced.iter().enumerate() {
            idx |= ((tr >> (traced.len() - 1 - k)) & 1) << (n - q);
        }
        idx
    };
    let dk = 1 << keep.len();
    let dt = 1 << traced.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut s = cx(0.0, 0.0);
            for t in 0..dt {
                s += m[(compose(i, t), compose(j, t))];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// Entry-by-entry Kronecker product.
pub fn naive_kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar * br {
        for j in 0..ac * bc {
            out[(i, j)] = a[(i / br, j / bc)] * b[(i % br, j % bc)];
        }
    }
    out
}
