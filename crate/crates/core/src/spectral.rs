//! Dense symmetric eigendecomposition with explicit grouping of numerically
//! degenerate eigenvalues into eigenspaces.
//!
//! Everything downstream (power spectra, Wasserstein stability trials) works
//! with *distinct* eigenvalues and the orthogonal projections onto their
//! eigenspaces, never with individual eigenvectors of a degenerate eigenvalue:
//! those are basis-dependent, the projections are not.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use ndarray::Array2;

use crate::error::{Error, Result};

/// Maximum eigensolver iterations before reporting failure.
const MAX_EIGEN_ITER: usize = 100_000;

static NEXT_SOURCE_ID: AtomicU64 = AtomicU64::new(1);

/// Eigendecomposition of a real symmetric matrix with eigenvalues grouped
/// into numerically distinct eigenspaces.
///
/// Eigenvalues are sorted ascending. Column `c` of [`eigenvectors`] is the
/// eigenvector of the `c`-th sorted eigenvalue; columns of a group span that
/// eigenvalue's eigenspace.
///
/// [`eigenvectors`]: SpectralDecomposition::eigenvectors
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    n: usize,
    eigenvalues: Vec<f64>,
    distinct_eigenvalues: Vec<f64>,
    multiplicities: Vec<usize>,
    group_offsets: Vec<usize>,
    eigenvectors: Array2<f64>,
    group_tol: f64,
    source_id: u64,
}

/// Orthogonal projection onto a single (possibly degenerate) eigenspace.
#[derive(Debug, Clone)]
pub struct EigenspaceProjection {
    pub lambda: f64,
    pub matrix: Array2<f64>,
}

/// Decomposes a symmetric matrix, grouping eigenvalues closer than
/// `group_tol` into a single eigenspace.
///
/// `group_tol = None` uses the default `1e-8 * max(1, ||H||_2)`. The input
/// must be symmetric within `1e-10 * max|H|`; it is symmetrized as
/// `(H + H^T) / 2` before solving.
pub fn decompose(h: &Array2<f64>, group_tol: Option<f64>) -> Result<SpectralDecomposition> {
    let n = check_square(h)?;
    if let Some(t) = group_tol {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidTolerance(t));
        }
    }

    let sym = symmetrized(h)?;
    let dm = DMatrix::from_row_iterator(n, n, sym.iter().cloned());
    let eig = nalgebra::linalg::SymmetricEigen::try_new(dm, f64::EPSILON, MAX_EIGEN_ITER)
        .ok_or(Error::SolverFailure)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors =
        Array2::from_shape_fn((n, n), |(i, c)| eig.eigenvectors[(i, order[c])]);

    let max_abs = eigenvalues
        .iter()
        .fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    let tol = group_tol.unwrap_or_else(|| 1e-8 * max_abs.max(1.0));

    // Group by adjacent gap: a gap larger than the tolerance starts a new
    // distinct eigenvalue; the representative is the group mean.
    let mut group_offsets = vec![0usize];
    for i in 1..n {
        if eigenvalues[i] - eigenvalues[i - 1] > tol {
            group_offsets.push(i);
        }
    }
    group_offsets.push(n);

    let mut distinct_eigenvalues = Vec::with_capacity(group_offsets.len() - 1);
    let mut multiplicities = Vec::with_capacity(group_offsets.len() - 1);
    for w in group_offsets.windows(2) {
        let (start, end) = (w[0], w[1]);
        let mean = eigenvalues[start..end].iter().sum::<f64>() / (end - start) as f64;
        distinct_eigenvalues.push(mean);
        multiplicities.push(end - start);
    }

    Ok(SpectralDecomposition {
        n,
        eigenvalues,
        distinct_eigenvalues,
        multiplicities,
        group_offsets,
        eigenvectors,
        group_tol: tol,
        source_id: NEXT_SOURCE_ID.fetch_add(1, Ordering::Relaxed),
    })
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// All `n` eigenvalues, ascending, counted with multiplicity.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Strictly increasing distinct eigenvalues (one per group).
    pub fn distinct_eigenvalues(&self) -> &[f64] {
        &self.distinct_eigenvalues
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Number of distinct eigenvalues.
    pub fn group_count(&self) -> usize {
        self.distinct_eigenvalues.len()
    }

    /// Column range of `eigenvectors` spanned by group `k`.
    pub fn group_range(&self, k: usize) -> Result<std::ops::Range<usize>> {
        if k >= self.group_count() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.group_count(),
            });
        }
        Ok(self.group_offsets[k]..self.group_offsets[k + 1])
    }

    /// Orthonormal eigenvector basis, one eigenvector per column.
    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    pub fn group_tol(&self) -> f64 {
        self.group_tol
    }

    /// Identifies the decomposition a spectrum was computed from.
    pub(crate) fn source_id(&self) -> u64 {
        self.source_id
    }

    /// Projection matrix onto the eigenspace of group `k`:
    /// the sum of `phi phi^T` over the group's eigenvector columns.
    pub fn projection(&self, k: usize) -> Result<EigenspaceProjection> {
        let range = self.group_range(k)?;
        let cols = self.eigenvectors.slice(ndarray::s![.., range]);
        let matrix = cols.dot(&cols.t());
        Ok(EigenspaceProjection {
            lambda: self.distinct_eigenvalues[k],
            matrix,
        })
    }

    /// Minimum gap between distinct eigenvalues.
    pub fn spectral_gap(&self) -> Result<f64> {
        if self.group_count() < 2 {
            return Err(Error::SingleEigenvalue);
        }
        Ok(self
            .distinct_eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min))
    }
}

/// Spectral radius of a symmetric matrix, `max |eigenvalue|`.
pub fn operator_two_norm(m: &Array2<f64>) -> Result<f64> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(0.0);
    }
    let sym = symmetrized(m)?;
    let dm = DMatrix::from_row_iterator(n, n, sym.iter().cloned());
    let eig = nalgebra::linalg::SymmetricEigen::try_new(dm, f64::EPSILON, MAX_EIGEN_ITER)
        .ok_or(Error::SolverFailure)?;
    Ok(eig
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, &v| acc.max(v.abs())))
}

fn check_square(m: &Array2<f64>) -> Result<usize> {
    let (rows, cols) = m.dim();
    if rows != cols || rows == 0 {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(rows)
}

/// Validates approximate symmetry and returns `(M + M^T) / 2`.
pub(crate) fn symmetrized(m: &Array2<f64>) -> Result<Array2<f64>> {
    let n = m.nrows();
    let mut max_abs = 0.0_f64;
    let mut max_asym = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            max_abs = max_abs.max(m[[i, j]].abs());
            if j > i {
                max_asym = max_asym.max((m[[i, j]] - m[[j, i]]).abs());
            }
        }
    }
    if !max_abs.is_finite() {
        return Err(Error::SolverFailure);
    }
    let tol = 1e-10 * max_abs;
    if max_asym > tol {
        return Err(Error::NotSymmetric { max_asym, tol });
    }
    Ok((m + &m.t()) * 0.5)
}
