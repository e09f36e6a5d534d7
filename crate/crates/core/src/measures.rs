//! Finitely supported measures on the real line, quantile functions, and
//! closed-form 1-D p-Wasserstein distances.
//!
//! Both CDFs of a pair of discrete measures are step functions, so the
//! Wasserstein integral over quantiles reduces to a finite sum over the merged
//! cumulative-mass breakpoints. [`wasserstein`] computes that sum exactly; no
//! sampling is involved. [`QuantileVector`]s are the finite-dimensional
//! summaries used as machine-learning features, and their L_p means converge
//! to the exact distance as the sample count grows.

use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability measure.
const MASS_TOL: f64 = 1e-9;
/// Masses in `[-NEG_MASS_FLOOR, 0)` are clamped to zero; anything lower is an
/// error (it signals a broken projection upstream, not roundoff).
const NEG_MASS_FLOOR: f64 = 1e-12;

/// Finitely supported measure on the real line with strictly increasing
/// support. Duplicate atoms are merged at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    masses: Vec<f64>,
    probability: bool,
}

impl DiscreteMeasure {
    /// Canonicalizes a probability measure: sorts, merges duplicate atoms,
    /// clamps `[-1e-12, 0)` masses to zero, checks the total is 1 within
    /// 1e-9, and renormalizes so the total is exactly 1.
    pub fn probability(atoms: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if atoms.len() != masses.len() {
            return Err(Error::LengthMismatch {
                left: atoms.len(),
                right: masses.len(),
            });
        }
        if atoms.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut masses = masses;
        for m in &mut masses {
            if *m < 0.0 {
                if *m < -NEG_MASS_FLOOR {
                    return Err(Error::NegativeMass(*m));
                }
                *m = 0.0;
            }
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::MassMismatch(total));
        }
        let (atoms, mut masses) = sort_and_merge(atoms, masses);
        for m in &mut masses {
            *m /= total;
        }
        Ok(Self {
            atoms,
            masses,
            probability: true,
        })
    }

    /// Signed measure: sorted and merged, with no constraint on the masses.
    pub fn signed(atoms: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if atoms.len() != masses.len() {
            return Err(Error::LengthMismatch {
                left: atoms.len(),
                right: masses.len(),
            });
        }
        if atoms.is_empty() {
            return Err(Error::EmptySupport);
        }
        let (atoms, masses) = sort_and_merge(atoms, masses);
        Ok(Self {
            atoms,
            masses,
            probability: false,
        })
    }

    /// Point mass at `a`.
    pub fn dirac(a: f64) -> Self {
        Self {
            atoms: vec![a],
            masses: vec![1.0],
            probability: true,
        }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn is_probability(&self) -> bool {
        self.probability
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Translates every atom by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|a| a + c).collect(),
            masses: self.masses.clone(),
            probability: self.probability,
        }
    }

    /// Prefix sums of the masses. For a probability measure the values are
    /// clamped to 1 and the final entry is forced to exactly 1, so the CDF
    /// never exceeds 1 through accumulated roundoff.
    fn cumulative(&self) -> Vec<f64> {
        let mut cum = Vec::with_capacity(self.masses.len());
        let mut acc = 0.0;
        for m in &self.masses {
            acc += m;
            cum.push(if self.probability { acc.min(1.0) } else { acc });
        }
        if self.probability {
            *cum.last_mut().expect("non-empty support") = 1.0;
        }
        cum
    }

    /// Right-continuous CDF `F(x) = mu((-inf, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let cum = self.cumulative();
        let mut result = 0.0;
        for (a, c) in self.atoms.iter().zip(&cum) {
            if *a <= x {
                result = *c;
            } else {
                break;
            }
        }
        result
    }

    /// Generalized inverse CDF `q(t) = inf { x : F(x) >= t }` for `t` in
    /// `(0, 1]`: the smallest atom whose cumulative mass reaches `t`.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !self.probability {
            return Err(Error::NotProbability);
        }
        if t.is_nan() || t <= 0.0 || t > 1.0 {
            return Err(Error::OutOfDomain(t));
        }
        let cum = self.cumulative();
        for (i, c) in cum.iter().enumerate() {
            if *c >= t {
                return Ok(self.atoms[i]);
            }
        }
        // Roundoff can leave the final cumulative sum a hair below 1.
        Ok(*self.atoms.last().expect("non-empty support"))
    }

    /// Samples the quantile function on the midpoint grid
    /// `t_i = (i + 1/2) / m`, avoiding the undefined `q(0)` endpoint.
    pub fn sample_quantiles(&self, m: usize) -> Result<QuantileVector> {
        if !self.probability {
            return Err(Error::NotProbability);
        }
        assert!(m >= 1, "quantile sample count must be >= 1");
        let cum = self.cumulative();
        let mut values = Vec::with_capacity(m);
        let mut idx = 0usize;
        for i in 0..m {
            let t = (i as f64 + 0.5) / m as f64;
            while idx + 1 < cum.len() && cum[idx] < t {
                idx += 1;
            }
            values.push(self.atoms[idx]);
        }
        Ok(QuantileVector { values })
    }

    /// `sum_i masses[i] * g(atoms[i])`; the expectation of `g` when the
    /// measure is a probability measure.
    pub fn expectation<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.atoms
            .iter()
            .zip(&self.masses)
            .map(|(a, m)| m * g(*a))
            .sum()
    }

    /// First moment `integral of t dmu(t)`.
    pub fn first_moment(&self) -> f64 {
        self.expectation(|t| t)
    }
}

/// Sorts atom/mass pairs by atom and merges runs closer than
/// `1e-12 * max(1, range)`, summing masses. A merged run is represented by
/// its mass-weighted mean (plain mean when the run carries no mass).
fn sort_and_merge(atoms: Vec<f64>, masses: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(masses).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let range = pairs.last().unwrap().0 - pairs.first().unwrap().0;
    let tol = 1e-12 * range.abs().max(1.0);

    let mut out_atoms: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut out_masses: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut run: Vec<(f64, f64)> = vec![pairs[0]];
    let flush = |run: &[(f64, f64)], atoms: &mut Vec<f64>, masses: &mut Vec<f64>| {
        let mass: f64 = run.iter().map(|p| p.1).sum();
        let atom = if mass.abs() > 0.0 {
            run.iter().map(|p| p.0 * p.1).sum::<f64>() / mass
        } else {
            run.iter().map(|p| p.0).sum::<f64>() / run.len() as f64
        };
        atoms.push(atom);
        masses.push(mass);
    };
    for p in pairs.into_iter().skip(1) {
        if p.0 - run.last().unwrap().0 <= tol {
            run.push(p);
        } else {
            flush(&run, &mut out_atoms, &mut out_masses);
            run.clear();
            run.push(p);
        }
    }
    flush(&run, &mut out_atoms, &mut out_masses);
    (out_atoms, out_masses)
}

/// Fixed-length sample of a quantile function; nondecreasing by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileVector {
    values: Vec<f64>,
}

impl QuantileVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Exact p-Wasserstein distance between two discrete probability measures.
///
/// Integrates `|q_mu(t) - q_nu(t)|^p` over the merged cumulative-mass
/// breakpoints of the two step-function quantiles, then takes the p-th root.
pub fn wasserstein(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<f64> {
    if !mu.probability || !nu.probability {
        return Err(Error::NotProbability);
    }
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let ca = mu.cumulative();
    let cb = nu.cumulative();
    let mut acc = 0.0;
    let mut t = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < ca.len() && j < cb.len() {
        let t_next = ca[i].min(cb[j]);
        let d = (mu.atoms[i] - nu.atoms[j]).abs();
        acc += pow_cost(d, p) * (t_next - t);
        if ca[i] <= t_next {
            i += 1;
        }
        if cb[j] <= t_next {
            j += 1;
        }
        t = t_next;
    }
    Ok(root_cost(acc, p))
}

/// L_p mean of entrywise quantile differences,
/// `(1/m * sum |a_i - b_i|^p)^(1/p)`; converges to [`wasserstein`] as the
/// sample count grows.
pub fn wasserstein_from_quantiles(a: &QuantileVector, b: &QuantileVector, p: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| pow_cost((x - y).abs(), p))
        .sum();
    Ok(root_cost(sum / a.len() as f64, p))
}

fn pow_cost(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        d.powf(p)
    }
}

fn root_cost(acc: f64, p: f64) -> f64 {
    if p == 1.0 {
        acc
    } else if p == 2.0 {
        acc.sqrt()
    } else {
        acc.powf(1.0 / p)
    }
}
