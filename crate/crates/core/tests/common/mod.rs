//! Brute-force reference implementations shared by the integration tests.
//! Subsets come from bitmasks scanned from the top down, and every block is
//! materialized and passed through the full singular-value path.
#![allow(dead_code)]

use eur_lab::haar::{sample_haar_unitary, RngStream};
use eur_lab::matrix::{singular_spectrum, submatrix};
use eur_lab::{ComplexMatrix, IndexSet};

pub fn haar(seed: u64, path: &[u64], n: usize) -> ComplexMatrix {
    sample_haar_unitary(&RngStream::new(seed, path.to_vec()), n).unwrap()
}

/// All `k`-subsets of `0..n`, from mask `2^n - 1` downwards.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .rev()
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

pub fn block_norm(u: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    let r = IndexSet::new(u.rows(), rows.to_vec()).unwrap();
    let c = IndexSet::new(u.cols(), cols.to_vec()).unwrap();
    singular_spectrum(&submatrix(u, &r, &c).unwrap()).largest()
}

/// `‖Û^(n,m)‖` by full enumeration.
pub fn max_block(u: &ComplexMatrix, n: usize, m: usize) -> f64 {
    let cols = subsets(u.cols(), m);
    subsets(u.rows(), n)
        .iter()
        .flat_map(|r| cols.iter().map(move |c| (r, c)))
        .map(|(r, c)| block_norm(u, r, c))
        .fold(0.0, f64::max)
}

/// `s_k = max_{n+m=k+1} ‖Û^(n,m)‖` for `k = 1..N`.
pub fn s_profile(u: &ComplexMatrix) -> Vec<f64> {
    let n = u.rows();
    (1..=n).map(|k| (1..=k).map(|a| max_block(u, a, k + 1 - a)).fold(0.0, f64::max)).collect()
}

/// `S_k` (squared) of the column concatenation, `k = 0..LN-1`.
pub fn multi_profile(us: &[ComplexMatrix]) -> Vec<f64> {
    let cat = ComplexMatrix::hconcat(us).unwrap();
    (1..=cat.cols()).map(|k| max_block(&cat, cat.rows(), k).powi(2)).collect()
}
