//! Unsupervised pipeline over per-vertex power spectra: quantile-vector
//! features, PCA projection, and DBSCAN clustering.
//!
//! Euclidean distances between quantile rows (scaled by `1/sqrt(m)`)
//! approximate the 2-Wasserstein distance between the underlying spectra, so
//! clustering quantile vectors groups points whose spectra are close.

use ndarray::{Array1, Array2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::signatures::vertex_spectrum;
use crate::spectral::{decompose, SpectralDecomposition};

/// Per-vertex quantile vectors: row `i` samples the quantile function of the
/// spectrum of `delta_i` on the midpoint grid.
#[derive(Debug, Clone)]
pub struct QuantileMatrix {
    m: usize,
    rows: Array2<f64>,
}

impl QuantileMatrix {
    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    /// Quantiles per vertex.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }
}

/// Builds the `n x m` quantile matrix of all vertex spectra, in parallel.
pub fn quantile_matrix(d: &SpectralDecomposition, m: usize) -> Result<QuantileMatrix> {
    let n = d.n();
    let rows_vec = (0..n)
        .into_par_iter()
        .map(|x| {
            let q = vertex_spectrum(d, x)?.measure().sample_quantiles(m)?;
            Ok(q.values().to_vec())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let flat: Vec<f64> = rows_vec.into_iter().flatten().collect();
    let rows = Array2::from_shape_vec((n, m), flat).expect("rectangular");
    Ok(QuantileMatrix { m, rows })
}

/// Principal component analysis of a row-sample matrix.
#[derive(Debug, Clone)]
pub struct Pca {
    /// `n x k` projections onto the principal directions.
    pub scores: Array2<f64>,
    /// `k x m` orthonormal principal directions, one per row.
    pub components: Array2<f64>,
    /// Variance carried by each component, nonincreasing.
    pub explained_variance: Vec<f64>,
    /// Column means subtracted before projecting.
    pub means: Vec<f64>,
}

/// PCA via eigendecomposition of the `m x m` covariance when `m <= n`, of the
/// `n x n` Gram matrix otherwise. Rank-deficient inputs on the Gram route
/// return fewer than `k` components.
pub fn pca(x: &Array2<f64>, k: usize) -> Result<Pca> {
    let (n, m) = x.dim();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if k == 0 || k > n.min(m) {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: n.min(m),
        });
    }

    let means: Array1<f64> = x.mean_axis(Axis(0)).expect("n >= 2");
    let centered = x - &means.view().insert_axis(Axis(0));
    let denom = (n - 1) as f64;

    let (mut components, mut explained) = if m <= n {
        let cov = centered.t().dot(&centered) / denom;
        let d = decompose(&cov, None)?;
        let mut comps = Array2::zeros((k, m));
        let mut vars = Vec::with_capacity(k);
        // eigenvalues ascending; take the top k from the back
        for (row, c) in (0..k).map(|i| (i, m - 1 - i)) {
            comps.row_mut(row).assign(&d.eigenvectors().column(c));
            vars.push(d.eigenvalues()[c].max(0.0));
        }
        (comps, vars)
    } else {
        let gram = centered.dot(&centered.t()) / denom;
        let d = decompose(&gram, None)?;
        let lambda_max = d.eigenvalues().last().copied().unwrap_or(0.0).max(0.0);
        let floor = 1e-12 * lambda_max.max(1.0);
        let mut comps_rows: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut vars = Vec::with_capacity(k);
        for c in (0..n).rev().take(k) {
            let lambda = d.eigenvalues()[c];
            if lambda <= floor {
                break; // rank deficient: remaining directions are noise
            }
            let u = d.eigenvectors().column(c);
            let v = centered.t().dot(&u) / (lambda * denom).sqrt();
            comps_rows.push(v.to_vec());
            vars.push(lambda);
        }
        let avail = comps_rows.len();
        let flat: Vec<f64> = comps_rows.into_iter().flatten().collect();
        (
            Array2::from_shape_vec((avail, m), flat).expect("rectangular"),
            vars,
        )
    };

    // Fix each component's sign so its largest-magnitude entry is positive;
    // scores stay consistent with the flipped directions.
    for mut row in components.rows_mut() {
        let pivot = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if row[pivot] < 0.0 {
            row.mapv_inplace(|v| -v);
        }
    }
    for v in &mut explained {
        *v = v.max(0.0);
    }

    let scores = centered.dot(&components.t());
    Ok(Pca {
        scores,
        components,
        explained_variance: explained,
        means: means.to_vec(),
    })
}

/// Density-based cluster labels: `-1` marks noise, clusters are numbered
/// `0..k` in discovery order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub labels: Vec<i32>,
    pub k: usize,
}

const UNCLASSIFIED: i32 = -2;
const NOISE: i32 = -1;

/// DBSCAN with the Euclidean metric on rows of `x`.
///
/// A point is a core point when at least `min_pts` points (itself included)
/// lie within `eps`; core neighborhoods are expanded transitively, border
/// points join the cluster that reaches them first, and the remainder is
/// noise. Fixed input order gives identical labels.
pub fn dbscan(x: &Array2<f64>, eps: f64, min_pts: usize) -> ClusterAssignment {
    let n = x.nrows();
    let eps_sq = eps * eps;
    let neighbors = |i: usize| -> Vec<usize> {
        let xi = x.row(i);
        (0..n)
            .filter(|&j| {
                let d2: f64 = xi
                    .iter()
                    .zip(x.row(j).iter())
                    .map(|(a, b)| {
                        let d = a - b;
                        d * d
                    })
                    .sum();
                d2 <= eps_sq
            })
            .collect()
    };

    let mut labels = vec![UNCLASSIFIED; n];
    let mut next_cluster = 0i32;
    for i in 0..n {
        if labels[i] != UNCLASSIFIED {
            continue;
        }
        let seed = neighbors(i);
        if seed.len() < min_pts {
            labels[i] = NOISE;
            continue;
        }
        let cluster = next_cluster;
        next_cluster += 1;
        labels[i] = cluster;
        let mut queue: std::collections::VecDeque<usize> = seed.into();
        while let Some(j) = queue.pop_front() {
            if labels[j] == NOISE {
                labels[j] = cluster; // border point reached from a core
            }
            if labels[j] != UNCLASSIFIED {
                continue;
            }
            labels[j] = cluster;
            let nb = neighbors(j);
            if nb.len() >= min_pts {
                queue.extend(nb);
            }
        }
    }
    ClusterAssignment {
        labels,
        k: next_cluster as usize,
    }
}

/// Pearson correlation coefficient of two equal-length samples.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::BadCorrelationInput {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len() as f64;
    let mean_a: f64 = a.iter().sum::<f64>() / n;
    let mean_b: f64 = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(cov / (var_a * var_b).sqrt())
}
