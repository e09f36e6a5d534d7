//! Power spectrum signatures and the point-signature family derived from
//! them.
//!
//! The power spectrum of a unit vertex function `f` under a symmetric
//! operator `H` is the probability measure placing mass `<f, P_lambda f>` at
//! each distinct eigenvalue `lambda`. It depends only on eigenspace
//! projections, never on a choice of basis inside degenerate eigenspaces, and
//! is invariant under automorphisms of `H`. Heat kernel, wavelet, and
//! diffusion-distance signatures are expectations against it, and the full
//! collection over vertex pairs determines `H` exactly.

use ndarray::{Array1, Array2, ArrayView1};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::VertexFunction;
use crate::measures::{wasserstein, DiscreteMeasure};
use crate::spectral::SpectralDecomposition;

/// Spectrum atoms below this mass are dropped; this moves W1 by at most
/// `1e-14 * spectral diameter`.
const MASS_FLOOR: f64 = 1e-14;

/// Power spectrum of a vertex function: a probability measure supported on
/// the distinct eigenvalues of the source decomposition.
#[derive(Debug, Clone)]
pub struct PowerSpectrum {
    measure: DiscreteMeasure,
    f_norm: f64,
    source_id: u64,
}

impl PowerSpectrum {
    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    /// Norm of the input function before internal normalization.
    pub fn f_norm(&self) -> f64 {
        self.f_norm
    }

    /// `integral of t dP(t)` -- the Rayleigh quotient `<f, H f> / <f, f>`.
    pub fn first_moment(&self) -> f64 {
        self.measure.first_moment()
    }

    pub(crate) fn source_id(&self) -> u64 {
        self.source_id
    }
}

/// Computes group masses `sum_{i in group} coeffs[i]^2` and assembles the
/// spectrum measure. `coeffs` are eigenbasis coefficients of a unit vector.
fn spectrum_from_coeffs(
    d: &SpectralDecomposition,
    coeffs: &[f64],
    f_norm: f64,
) -> Result<PowerSpectrum> {
    let mut atoms = Vec::with_capacity(d.group_count());
    let mut masses = Vec::with_capacity(d.group_count());
    for k in 0..d.group_count() {
        let range = d.group_range(k).expect("group index in range");
        let mass: f64 = coeffs[range].iter().map(|c| c * c).sum();
        if mass >= MASS_FLOOR {
            atoms.push(d.distinct_eigenvalues()[k]);
            masses.push(mass);
        }
    }
    Ok(PowerSpectrum {
        measure: DiscreteMeasure::probability(atoms, masses)?,
        f_norm,
        source_id: d.source_id(),
    })
}

/// Power spectrum of `f` under the decomposed operator.
///
/// `f` is normalized internally; its original norm is recorded on the
/// returned spectrum. Fails with [`Error::ZeroFunction`] on zero input.
pub fn power_spectrum(d: &SpectralDecomposition, f: &VertexFunction) -> Result<PowerSpectrum> {
    if f.len() != d.n() {
        return Err(Error::DimensionMismatch {
            expected: d.n(),
            got: f.len(),
        });
    }
    let norm = f.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroFunction);
    }
    let fv = ArrayView1::from(f.values());
    let coeffs: Array1<f64> = d.eigenvectors().t().dot(&fv) / norm;
    spectrum_from_coeffs(d, coeffs.as_slice().expect("contiguous"), norm)
}

/// Power spectrum of the vertex indicator `delta_x` -- the spectral feature
/// of vertex `x`. Reads row `x` of the eigenvector matrix directly.
pub fn vertex_spectrum(d: &SpectralDecomposition, x: usize) -> Result<PowerSpectrum> {
    if x >= d.n() {
        return Err(Error::IndexOutOfRange {
            index: x,
            len: d.n(),
        });
    }
    let row: Vec<f64> = d.eigenvectors().row(x).to_vec();
    spectrum_from_coeffs(d, &row, 1.0)
}

/// Power spectrum of the pair indicator `f_{x,y}`.
pub fn pair_spectrum(d: &SpectralDecomposition, x: usize, y: usize) -> Result<PowerSpectrum> {
    let n = d.n();
    if x >= n || y >= n {
        let bad = if x >= n { x } else { y };
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    if x == y {
        return vertex_spectrum(d, x);
    }
    let q = d.eigenvectors();
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    let coeffs: Vec<f64> = (0..n)
        .map(|c| (q[[x, c]] + q[[y, c]]) * inv_sqrt2)
        .collect();
    spectrum_from_coeffs(d, &coeffs, 1.0)
}

/// Power spectra of all `n (n + 1) / 2` unordered vertex pairs, keyed so the
/// original operator can be reconstructed.
#[derive(Debug, Clone)]
pub struct PairSpectra {
    n: usize,
    entries: Vec<Option<PowerSpectrum>>,
    source_id: Option<u64>,
}

impl PairSpectra {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: vec![None; n * (n + 1) / 2],
            source_id: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn index(&self, x: usize, y: usize) -> Result<usize> {
        if x >= self.n || y >= self.n {
            let bad = if x >= self.n { x } else { y };
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.n,
            });
        }
        let (a, b) = (x.min(y), x.max(y));
        Ok(a * self.n - a * (a + 1) / 2 + b)
    }

    /// Stores the spectrum for `{x, y}`. Every entry must come from the same
    /// decomposition.
    pub fn insert(&mut self, x: usize, y: usize, spectrum: PowerSpectrum) -> Result<()> {
        let idx = self.index(x, y)?;
        match self.source_id {
            None => self.source_id = Some(spectrum.source_id()),
            Some(id) if id != spectrum.source_id() => return Err(Error::SourceMismatch),
            _ => {}
        }
        self.entries[idx] = Some(spectrum);
        Ok(())
    }

    pub fn get(&self, x: usize, y: usize) -> Result<&PowerSpectrum> {
        let idx = self.index(x, y)?;
        self.entries[idx]
            .as_ref()
            .ok_or(Error::MissingPair(x.min(y), x.max(y)))
    }
}

/// Computes the pair spectra of every unordered vertex pair, in parallel.
pub fn all_pair_spectra(d: &SpectralDecomposition) -> Result<PairSpectra> {
    let n = d.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (x..n).map(move |y| (x, y)))
        .collect();
    let spectra = pairs
        .par_iter()
        .map(|&(x, y)| pair_spectrum(d, x, y))
        .collect::<Result<Vec<_>>>()?;
    let mut out = PairSpectra::new(n);
    for (&(x, y), s) in pairs.iter().zip(spectra) {
        out.insert(x, y, s)?;
    }
    Ok(out)
}

/// Recovers the symmetric matrix from its pair spectra:
/// `H_xx` is the first moment of the vertex spectrum, and
/// `H_xy = m(f_xy) - (m(f_x) + m(f_y)) / 2` for the off-diagonal entries.
pub fn reconstruct_matrix(spectra: &PairSpectra) -> Result<Array2<f64>> {
    let n = spectra.n();
    let mut diag = vec![0.0; n];
    for (x, d) in diag.iter_mut().enumerate() {
        *d = spectra.get(x, x)?.first_moment();
    }
    let mut h = Array2::zeros((n, n));
    for x in 0..n {
        h[[x, x]] = diag[x];
        for y in (x + 1)..n {
            let v = spectra.get(x, y)?.first_moment() - 0.5 * (diag[x] + diag[y]);
            h[[x, y]] = v;
            h[[y, x]] = v;
        }
    }
    Ok(h)
}

/// Heat kernel signature `hks(x, t) = integral of e^{-st} dP[delta_x](s)`.
pub fn heat_kernel_signature(d: &SpectralDecomposition, x: usize, t: f64) -> Result<f64> {
    Ok(vertex_spectrum(d, x)?
        .measure()
        .expectation(|s| (-s * t).exp()))
}

/// Wavelet signature `W_g(x, t) = integral of g(ts) dP[delta_x](s)`.
pub fn wavelet_signature<G: Fn(f64) -> f64>(
    d: &SpectralDecomposition,
    x: usize,
    g: G,
    t: f64,
) -> Result<f64> {
    Ok(vertex_spectrum(d, x)?.measure().expectation(|s| g(t * s)))
}

/// Squared diffusion distance
/// `D_t^2(x, y) = sum_i e^{-lambda_i t} (phi_i(x) - phi_i(y))^2`.
///
/// Computed as twice the `e^{-st}` expectation of the spectrum of the
/// normalized difference `(delta_x - delta_y) / sqrt(2)`, which matches the
/// unnormalized identity exactly.
pub fn diffusion_distance_sq(
    d: &SpectralDecomposition,
    x: usize,
    y: usize,
    t: f64,
) -> Result<f64> {
    if x == y {
        return Err(Error::SameVertex(x));
    }
    let n = d.n();
    if x >= n || y >= n {
        let bad = if x >= n { x } else { y };
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let q = d.eigenvectors();
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    let coeffs: Vec<f64> = (0..n)
        .map(|c| (q[[x, c]] - q[[y, c]]) * inv_sqrt2)
        .collect();
    let spectrum = spectrum_from_coeffs(d, &coeffs, 2.0_f64.sqrt())?;
    Ok(2.0 * spectrum.measure().expectation(|s| (-s * t).exp()))
}

/// Global point signature: `phi_i(x) / sqrt(lambda_i)` over eigenvectors with
/// eigenvalue above the grouping tolerance. The zero eigenspace is skipped,
/// and each entry is defined only up to the sign of its eigenvector.
pub fn global_point_signature(d: &SpectralDecomposition, x: usize) -> Result<Vec<f64>> {
    if x >= d.n() {
        return Err(Error::IndexOutOfRange {
            index: x,
            len: d.n(),
        });
    }
    let q = d.eigenvectors();
    Ok(d.eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam > d.group_tol())
        .map(|(i, &lam)| q[[x, i]] / lam.sqrt())
        .collect())
}

/// All-pairs W1 distances between vertex power spectra.
#[derive(Debug, Clone)]
pub struct SignatureMatrix {
    n: usize,
    dist: Array2<f64>,
}

impl SignatureMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self) -> &Array2<f64> {
        &self.dist
    }
}

/// Computes the symmetric matrix `dist[i][j] = W1(mu_i, mu_j)` of pairwise
/// distances between vertex spectra. Spectra and pair distances are
/// evaluated in parallel; the result does not depend on the schedule.
pub fn signature_distance_matrix(d: &SpectralDecomposition) -> Result<SignatureMatrix> {
    let n = d.n();
    let spectra = (0..n)
        .into_par_iter()
        .map(|x| vertex_spectrum(d, x))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let distances = pairs
        .par_iter()
        .map(|&(i, j)| wasserstein(spectra[i].measure(), spectra[j].measure(), 1.0))
        .collect::<Result<Vec<_>>>()?;
    let mut dist = Array2::zeros((n, n));
    for (&(i, j), w) in pairs.iter().zip(distances) {
        dist[[i, j]] = w;
        dist[[j, i]] = w;
    }
    Ok(SignatureMatrix { n, dist })
}
