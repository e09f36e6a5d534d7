#![allow(dead_code)]

//! Shared generators for the integration suites: random weighted graphs,
//! permutations, and adjacency matrices with planted automorphisms.

use ndarray::Array2;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random weighted adjacency matrix on `n` vertices: a unit-weight cycle
/// backbone (so no vertex is isolated) plus extra edges with probability `p`.
pub fn random_adjacency(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        let j = (i + 1) % n;
        a[[i, j]] = 1.0;
        a[[j, i]] = 1.0;
    }
    for i in 0..n {
        for j in (i + 2)..n {
            if (i, j) != (0, n - 1) && rng.random_range(0.0..1.0) < p {
                let w = rng.random_range(0.2..2.0);
                a[[i, j]] = w;
                a[[j, i]] = w;
            }
        }
    }
    a
}

/// Normalized Laplacian `I - D^{-1/2} A D^{-1/2}` straight from an adjacency
/// matrix (all degrees must be positive).
pub fn normalized_laplacian_from_adjacency(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let deg: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    let inv_sqrt: Vec<f64> = deg
        .iter()
        .map(|d| {
            assert!(*d > 0.0, "isolated vertex in test graph");
            1.0 / d.sqrt()
        })
        .collect();
    let mut l = Array2::eye(n);
    for i in 0..n {
        for j in 0..n {
            if a[[i, j]] != 0.0 {
                l[[i, j]] -= inv_sqrt[i] * a[[i, j]] * inv_sqrt[j];
            }
        }
    }
    l
}

pub fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut sigma: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        sigma.swap(i, j);
    }
    sigma
}

/// Averages `a` over the cyclic group generated by `sigma`, producing an
/// adjacency matrix for which `sigma` is an exact automorphism.
pub fn plant_automorphism(a: &Array2<f64>, sigma: &[usize]) -> Array2<f64> {
    let n = a.nrows();
    let mut total = Array2::zeros((n, n));
    let mut power: Vec<usize> = (0..n).collect();
    let mut count = 0usize;
    loop {
        for i in 0..n {
            for j in 0..n {
                total[[i, j]] += a[[power[i], power[j]]];
            }
        }
        count += 1;
        power = power.iter().map(|&i| sigma[i]).collect();
        if power.iter().enumerate().all(|(i, &v)| i == v) {
            break;
        }
    }
    total / count as f64
}

/// All permutations of `0..n` (for brute-force checks with small `n`).
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut items: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap_permute(&mut items, n, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(items, k - 1, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    heap_permute(items, k - 1, out);
}
