//! Diffusion operators on point clouds: the Gaussian kernel, the
//! alpha-normalized symmetric operator `S`, and a seeded torus sampler for
//! synthetic experiments.
//!
//! With the uniform counting measure over the cloud, `S` is similar to the
//! Markov diffusion operator, so its spectrum lies in `[0, 1]` with the top
//! eigenvalue exactly 1 along the `sqrt(nu)` direction.

use ndarray::{Array2, Axis};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Finite set of points in `R^d`, one point per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Array2<f64>,
}

impl PointCloud {
    pub fn new(points: Array2<f64>) -> Result<Self> {
        if points.nrows() < 2 {
            return Err(Error::TooFewPoints(points.nrows()));
        }
        if points.ncols() == 0 {
            return Err(Error::RaggedPointCloud);
        }
        Ok(Self { points })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        let d = rows[0].len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::RaggedPointCloud);
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let points = Array2::from_shape_vec((n, d), flat).expect("validated shape");
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }
}

/// Bandwidth and normalization exponent of the diffusion operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    pub epsilon: f64,
    pub alpha: f64,
}

impl DiffusionParams {
    pub fn new(epsilon: f64, alpha: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::BadBandwidth(epsilon));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::BadAlpha(alpha));
        }
        Ok(Self { epsilon, alpha })
    }
}

/// Gaussian kernel matrix `K_ij = exp(-||x_i - x_j||^2 / (2 epsilon^2))`.
///
/// Squared distances are accumulated coordinate-wise in double precision;
/// entries lie in `(0, 1]` with a unit diagonal.
pub fn gaussian_kernel_matrix(pc: &PointCloud, epsilon: f64) -> Result<Array2<f64>> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::BadBandwidth(epsilon));
    }
    let n = pc.len();
    let inv = 1.0 / (2.0 * epsilon * epsilon);
    let p = pc.points();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = p.row(i);
            (0..n)
                .map(|j| {
                    let xj = p.row(j);
                    let d2: f64 = xi
                        .iter()
                        .zip(xj.iter())
                        .map(|(a, b)| {
                            let d = a - b;
                            d * d
                        })
                        .sum();
                    (-d2 * inv).exp()
                })
                .collect()
        })
        .collect();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(Array2::from_shape_vec((n, n), flat).expect("square"))
}

/// Symmetric diffusion operator `S = D_nu^{-1/2} k~ D_nu^{-1/2}` where
/// `k~ = D_w^{-alpha} K D_w^{-alpha}`, `w` the kernel row sums and `nu` the
/// row sums of `k~`, with the uniform counting measure over the cloud.
pub fn diffusion_operator(pc: &PointCloud, params: &DiffusionParams) -> Result<Array2<f64>> {
    let kernel = gaussian_kernel_matrix(pc, params.epsilon)?;
    let n = pc.len();

    let omega = kernel.sum_axis(Axis(1));
    for (i, w) in omega.iter().enumerate() {
        if !w.is_finite() || *w <= 0.0 {
            return Err(Error::DegenerateWeight(i));
        }
    }
    let omega_pow: Vec<f64> = omega.iter().map(|w| w.powf(-params.alpha)).collect();

    let mut ktilde = kernel;
    for i in 0..n {
        for j in 0..n {
            ktilde[[i, j]] *= omega_pow[i] * omega_pow[j];
        }
    }

    let nu = ktilde.sum_axis(Axis(1));
    for (i, v) in nu.iter().enumerate() {
        if !v.is_finite() || *v <= 0.0 {
            return Err(Error::DegenerateWeight(i));
        }
    }
    let nu_inv_sqrt: Vec<f64> = nu.iter().map(|v| 1.0 / v.sqrt()).collect();

    let mut s = ktilde;
    for i in 0..n {
        for j in 0..n {
            s[[i, j]] *= nu_inv_sqrt[i] * nu_inv_sqrt[j];
        }
    }
    Ok(s)
}

/// Samples `n` points uniformly (with respect to surface area) on the torus
/// with major radius `big_r` and minor radius `small_r`, embedded in `R^3` as
/// `((R + r cos v) cos u, (R + r cos v) sin u, r sin v)`.
///
/// The tube angle `v` is drawn by rejection against the area density
/// `1 + (r/R) cos v`; the result is deterministic for a fixed seed.
pub fn sample_torus(n: usize, big_r: f64, small_r: f64, seed: u64) -> Result<PointCloud> {
    if !big_r.is_finite() || small_r <= 0.0 || big_r <= small_r {
        return Err(Error::BadRadii {
            major: big_r,
            minor: small_r,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ratio = small_r / big_r;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut points = Array2::zeros((n, 3));
    for mut row in points.rows_mut() {
        let u: f64 = rng.random_range(0.0..two_pi);
        let v = loop {
            let v: f64 = rng.random_range(0.0..two_pi);
            let accept: f64 = rng.random_range(0.0..1.0);
            if accept * (1.0 + ratio) <= 1.0 + ratio * v.cos() {
                break v;
            }
        };
        let rho = big_r + small_r * v.cos();
        row[0] = rho * u.cos();
        row[1] = rho * u.sin();
        row[2] = small_r * v.sin();
    }
    PointCloud::new(points)
}
