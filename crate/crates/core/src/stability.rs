//! Perturbation harness for the Wasserstein stability of power spectra.
//!
//! A trial decomposes a symmetric matrix `H` and its perturbation
//! `H + t Delta`, measures the exact W1 distance between the two spectra of a
//! fixed function, and compares it against the bound `n |t| ||Delta||_2`. The
//! bound holds for every pair of symmetric matrices, degenerate spectra
//! included, so a ratio above `1 + 1e-9` is a hard failure of the harness,
//! not a tolerance to tune.

use ndarray::Array2;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{indicator, invert_permutation, VertexFunction};
use crate::measures::wasserstein;
use crate::signatures::{heat_kernel_signature, power_spectrum, vertex_spectrum};
use crate::spectral::{decompose, operator_two_norm, symmetrized, SpectralDecomposition};

/// One measured perturbation trial: the W1 distance between the spectra of
/// `f` under `H` and `H + t Delta`, against the bound `n |t| ||Delta||_2`.
#[derive(Debug, Clone)]
pub struct PerturbationTrial {
    pub h: Array2<f64>,
    pub delta: Array2<f64>,
    pub t: f64,
    pub f: VertexFunction,
    pub w1: f64,
    pub delta_norm: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Runs a single trial of the W1 bound for `f` under `H` vs `H + t Delta`.
///
/// `f` is normalized internally. When `t Delta = 0` the bound is zero and the
/// ratio is reported as 0 (or infinity if W1 is somehow positive).
pub fn lipschitz_trial(
    h: &Array2<f64>,
    delta: &Array2<f64>,
    t: f64,
    f: &VertexFunction,
) -> Result<PerturbationTrial> {
    if h.dim() != delta.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            got: delta.nrows(),
        });
    }
    let n = h.nrows();
    let perturbed = h + &(delta * t);
    let d0 = decompose(h, None)?;
    let d1 = decompose(&perturbed, None)?;
    let s0 = power_spectrum(&d0, f)?;
    let s1 = power_spectrum(&d1, f)?;
    let w1 = wasserstein(s0.measure(), s1.measure(), 1.0)?;
    let delta_norm = operator_two_norm(delta)?;
    let bound = n as f64 * t.abs() * delta_norm;
    let ratio = if bound > 0.0 {
        w1 / bound
    } else if w1 == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(PerturbationTrial {
        h: h.clone(),
        delta: delta.clone(),
        t,
        f: f.clone(),
        w1,
        delta_norm,
        bound,
        ratio,
    })
}

/// Stress trial on a base matrix with a degenerate (or nearly degenerate)
/// eigenvalue, using the first vertex indicator as the probe function.
/// Individual eigenvectors move discontinuously when `Delta` splits the
/// eigenvalue; the measured W1 must respect the bound regardless.
pub fn degenerate_stress_trial(
    base: &Array2<f64>,
    delta: &Array2<f64>,
    t: f64,
) -> Result<PerturbationTrial> {
    let f = indicator(0, base.nrows())?;
    lipschitz_trial(base, delta, t, &f)
}

/// Closed-form first-order correction to the projection onto the first `k`
/// eigenspaces under the perturbation `H + t Delta`:
///
/// `sum_{h <= k < j} (P_h Delta P_j + P_j Delta P_h) / (lambda_h - lambda_j)`
///
/// `k` counts groups, `1 <= k < m`.
pub fn first_order_projection(
    d: &SpectralDecomposition,
    delta: &Array2<f64>,
    k: usize,
) -> Result<Array2<f64>> {
    let m = d.group_count();
    if k == 0 || k >= m {
        return Err(Error::IndexOutOfRange { index: k, len: m });
    }
    if delta.nrows() != d.n() || delta.ncols() != d.n() {
        return Err(Error::DimensionMismatch {
            expected: d.n(),
            got: delta.nrows(),
        });
    }
    let delta = symmetrized(delta)?;
    let projections: Vec<Array2<f64>> = (0..m)
        .map(|g| d.projection(g).map(|p| p.matrix))
        .collect::<Result<_>>()?;
    let lambda = d.distinct_eigenvalues();

    let mut out = Array2::zeros((d.n(), d.n()));
    for h in 0..k {
        for j in k..m {
            let coef = 1.0 / (lambda[h] - lambda[j]);
            let cross = projections[h].dot(&delta).dot(&projections[j]);
            out = out + (&cross + &cross.t()) * coef;
        }
    }
    Ok(out)
}

/// Heat-kernel-signature stability: returns
/// `(|hks_L(x, t) - hks_L'(x, t)|, t * n * ||L - L'||_2)`.
pub fn hks_stability_check(
    l: &Array2<f64>,
    l_prime: &Array2<f64>,
    x: usize,
    t: f64,
) -> Result<(f64, f64)> {
    if l.dim() != l_prime.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.nrows(),
            got: l_prime.nrows(),
        });
    }
    let d0 = decompose(l, None)?;
    let d1 = decompose(l_prime, None)?;
    let lhs = (heat_kernel_signature(&d0, x, t)? - heat_kernel_signature(&d1, x, t)?).abs();
    let rhs = t * l.nrows() as f64 * operator_two_norm(&(l - l_prime))?;
    Ok((lhs, rhs))
}

/// Approximate-symmetry bound: for a permutation `sigma`, returns the vector
/// `W1(mu_i, mu_sigma(i))` and the bound `n ||H - P^T H P||_2`.
pub fn approximate_symmetry_bound(
    d: &SpectralDecomposition,
    sigma: &[usize],
    h: &Array2<f64>,
) -> Result<(Vec<f64>, f64)> {
    let n = d.n();
    if h.nrows() != n || h.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: h.nrows(),
        });
    }
    invert_permutation(sigma, n)?;
    let conjugated = Array2::from_shape_fn((n, n), |(i, j)| h[[sigma[i], sigma[j]]]);
    let rhs = n as f64 * operator_two_norm(&(h - &conjugated))?;

    let spectra = (0..n)
        .into_par_iter()
        .map(|x| vertex_spectrum(d, x))
        .collect::<Result<Vec<_>>>()?;
    let lhs = (0..n)
        .into_par_iter()
        .map(|i| wasserstein(spectra[i].measure(), spectra[sigma[i]].measure(), 1.0))
        .collect::<Result<Vec<f64>>>()?;
    Ok((lhs, rhs))
}

/// Flat record of one randomized trial, as logged by the CLI.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TrialRecord {
    pub dim: usize,
    pub t: f64,
    pub delta_norm: f64,
    pub w1: f64,
    pub bound: f64,
    pub ratio: f64,
    pub seed: u64,
}

/// SplitMix64 step; derives independent per-trial seeds from a run seed.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Symmetric matrix with independent Gaussian entries, `(G + G^T) / 2`.
pub fn goe_matrix(n: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let mut h = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let g: f64 = StandardNormal.sample(rng);
            h[[i, j]] = g;
            h[[j, i]] = g;
        }
    }
    h
}

/// Uniformly random unit vector (normalized Gaussian).
pub fn random_unit_function(n: usize, rng: &mut ChaCha8Rng) -> VertexFunction {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return VertexFunction::new(v.iter().map(|x| x / norm).collect());
        }
    }
}

/// Random orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    loop {
        let g = goe_matrix(n, rng);
        if let Some(q) = gram_schmidt(&g) {
            return q;
        }
    }
}

fn gram_schmidt(m: &Array2<f64>) -> Option<Array2<f64>> {
    let n = m.nrows();
    let mut q = m.clone();
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let dot = q.column(i).dot(&q.column(j));
                let col_i = q.column(i).to_owned();
                q.column_mut(j).scaled_add(-dot, &col_i);
            }
        }
        let norm = q.column(j).dot(&q.column(j)).sqrt();
        if norm < 1e-10 {
            return None;
        }
        q.column_mut(j).mapv_inplace(|v| v / norm);
    }
    Some(q)
}

/// Runs `trials` independent randomized trials at a fixed dimension:
/// Gaussian `H` and `Delta`, a random unit probe function, and a step `t`
/// log-uniform in `[1e-6, 1]`. Trials execute in parallel; the output is a
/// deterministic function of `seed`.
pub fn run_goe_trials(dim: usize, trials: usize, seed: u64) -> Result<Vec<TrialRecord>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial_seed = mix_seed(seed, i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
            let h = goe_matrix(dim, &mut rng);
            let delta = goe_matrix(dim, &mut rng);
            let f = random_unit_function(dim, &mut rng);
            let t = 10f64.powf(rng.random_range(-6.0..0.0));
            let trial = lipschitz_trial(&h, &delta, t, &f)?;
            Ok(TrialRecord {
                dim,
                t,
                delta_norm: trial.delta_norm,
                w1: trial.w1,
                bound: trial.bound,
                ratio: trial.ratio,
                seed: trial_seed,
            })
        })
        .collect()
}

/// Ratio tolerance above which a trial contradicts the W1 bound.
pub const RATIO_TOL: f64 = 1e-9;

/// Summary statistics of a trial batch.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub violations: usize,
}

pub fn summarize(records: &[TrialRecord]) -> TrialSummary {
    let max_ratio = records.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let mean_ratio = if records.is_empty() {
        0.0
    } else {
        records.iter().map(|r| r.ratio).sum::<f64>() / records.len() as f64
    };
    let violations = records
        .iter()
        .filter(|r| r.ratio > 1.0 + RATIO_TOL)
        .count();
    TrialSummary {
        trials: records.len(),
        max_ratio,
        mean_ratio,
        violations,
    }
}
