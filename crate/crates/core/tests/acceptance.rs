//! Acceptance suite: every release-gating property, one test per criterion,
//! each printing a single PASS/FAIL line (visible with `--nocapture`).
//!
//! Thresholds are pinned in code; none are tuned at runtime. Criterion 8
//! (torus geometry recovery) is measured at the pinned desk scale and is
//! currently expected to fail there; the printed line carries the measured
//! value. See the README for the scaling analysis.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use common::*;
use ndarray::{Array1, Array2};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use spectra_sig::analysis::{correlation, pca, quantile_matrix};
use spectra_sig::diffusion::{diffusion_operator, sample_torus, DiffusionParams};
use spectra_sig::graph::Graph;
use spectra_sig::measures::{wasserstein, wasserstein_from_quantiles, DiscreteMeasure};
use spectra_sig::signatures::{
    all_pair_spectra, heat_kernel_signature, reconstruct_matrix, vertex_spectrum,
};
use spectra_sig::spectral::{decompose, operator_two_norm};
use spectra_sig::stability::{
    first_order_projection, goe_matrix, hks_stability_check, lipschitz_trial, mix_seed,
    random_orthogonal, random_unit_function, run_goe_trials, RATIO_TOL,
};

fn report(num: usize, name: &str, pass: bool, details: &str) {
    println!(
        "ACCEPTANCE {num} ({name}): {} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn c1_injectivity_round_trip() {
    let start = Instant::now();
    let mut max_err: f64 = 0.0;
    for i in 0..100u64 {
        let dim = 4 + (i as usize % 9); // dimensions 4..=12
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(1000, i));
        let h = goe_matrix(dim, &mut rng);
        let d = decompose(&h, None).unwrap();
        let rec = reconstruct_matrix(&all_pair_spectra(&d).unwrap()).unwrap();
        for (a, b) in rec.iter().zip(h.iter()) {
            max_err = max_err.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = max_err <= 1e-8 && elapsed.as_secs_f64() < 10.0;
    report(
        1,
        "injectivity round-trip",
        pass,
        &format!("max reconstruction error {max_err:.2e} over 100 matrices in {elapsed:?}"),
    );
    assert!(max_err <= 1e-8, "max error {max_err:e}");
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
}

/// Eigenvalue lists with at least one exactly repeated value.
fn degenerate_eigenvalues(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mult = rng.random_range(2..=dim.min(4));
    let repeated: f64 = rng.random_range(-1.0..1.0);
    let mut evs = vec![repeated; mult];
    let mut level = repeated;
    for _ in mult..dim {
        level += rng.random_range(0.5..1.5);
        evs.push(level);
    }
    evs
}

#[test]
fn c2_lipschitz_bound() {
    let start = Instant::now();
    let mut max_ratio: f64 = 0.0;
    let mut total = 0usize;

    // 8100 generic trials: Gaussian H and Delta, random unit f,
    // t log-uniform in [1e-6, 1]
    for dim in 2..=16usize {
        let records = run_goe_trials(dim, 540, mix_seed(2000, dim as u64)).unwrap();
        total += records.len();
        for r in &records {
            max_ratio = max_ratio.max(r.ratio);
        }
    }

    // 950 exactly degenerate bases: repeated-eigenvalue diagonals (plain and
    // orthogonally conjugated) and cycle Laplacians
    let degenerate: Vec<f64> = (0..950u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(2100, i));
            let dim = rng.random_range(4..=12usize);
            let base = match i % 3 {
                0 => Array2::from_diag(&Array1::from(degenerate_eigenvalues(dim, &mut rng))),
                1 => {
                    let d = Array2::from_diag(&Array1::from(degenerate_eigenvalues(
                        dim, &mut rng,
                    )));
                    let q = random_orthogonal(dim, &mut rng);
                    q.dot(&d).dot(&q.t())
                }
                _ => Graph::cycle(dim).unwrap().normalized_laplacian().unwrap(),
            };
            let delta = goe_matrix(dim, &mut rng);
            let f = random_unit_function(dim, &mut rng);
            let t = 10f64.powf(rng.random_range(-6.0..-1.0));
            lipschitz_trial(&base, &delta, t, &f).unwrap().ratio
        })
        .collect();
    total += degenerate.len();

    // 950 nearly degenerate bases with a 1e-12 gap
    let near_degenerate: Vec<f64> = (0..950u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(2200, i));
            let dim = rng.random_range(4..=12usize);
            let mut evs: Vec<f64> = vec![0.0];
            let mut level = 0.0;
            for _ in 1..dim {
                level += rng.random_range(0.5..1.5);
                evs.push(level);
            }
            let split = rng.random_range(1..dim);
            evs[split] = evs[split - 1] + 1e-12;
            let d = Array2::from_diag(&Array1::from(evs));
            let q = random_orthogonal(dim, &mut rng);
            let base = q.dot(&d).dot(&q.t());
            let delta = goe_matrix(dim, &mut rng);
            let f = random_unit_function(dim, &mut rng);
            let t = 10f64.powf(rng.random_range(-6.0..-1.0));
            lipschitz_trial(&base, &delta, t, &f).unwrap().ratio
        })
        .collect();
    total += near_degenerate.len();

    for r in degenerate.iter().chain(&near_degenerate) {
        max_ratio = max_ratio.max(*r);
    }
    let elapsed = start.elapsed();
    let pass = max_ratio <= 1.0 + RATIO_TOL && elapsed.as_secs_f64() < 120.0;
    report(
        2,
        "W1 perturbation bound",
        pass,
        &format!("{total} trials, max W1/bound ratio {max_ratio:.6} in {elapsed:?}"),
    );
    assert_eq!(total, 10_000);
    assert!(max_ratio <= 1.0 + RATIO_TOL, "ratio {max_ratio}");
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
}

#[test]
fn c3_automorphism_invariance() {
    let mut worst: f64 = 0.0;

    // cycle graphs are vertex-transitive: all spectra coincide
    for n in 4..=12usize {
        let l = Graph::cycle(n).unwrap().normalized_laplacian().unwrap();
        let d = decompose(&l, None).unwrap();
        let spectra: Vec<_> = (0..n).map(|x| vertex_spectrum(&d, x).unwrap()).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let w1 = wasserstein(spectra[i].measure(), spectra[j].measure(), 1.0).unwrap();
                worst = worst.max(w1);
            }
        }
    }

    // 50 random graphs with planted automorphisms
    for i in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(3000, i));
        let n = rng.random_range(6..=12usize);
        let base = random_adjacency(n, 0.5, &mut rng);
        let sigma = random_permutation(n, &mut rng);
        let a = plant_automorphism(&base, &sigma);
        let l = normalized_laplacian_from_adjacency(&a);
        let d = decompose(&l, None).unwrap();
        for (x, &sx) in sigma.iter().enumerate() {
            let w1 = wasserstein(
                vertex_spectrum(&d, x).unwrap().measure(),
                vertex_spectrum(&d, sx).unwrap().measure(),
                1.0,
            )
            .unwrap();
            worst = worst.max(w1);
        }
    }

    let pass = worst <= 1e-9;
    report(
        3,
        "automorphism invariance",
        pass,
        &format!("max orbit W1 {worst:.2e} over C4..C12 and 50 planted automorphisms"),
    );
    assert!(pass, "max orbit W1 {worst:e}");
}

#[test]
fn c4_hks_identity_and_stability() {
    // identity: measure-expectation form vs the direct eigenpair sum
    let mut max_gap: f64 = 0.0;
    for i in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(4000, i));
        let n = rng.random_range(4..=10usize);
        let a = random_adjacency(n, 0.5, &mut rng);
        let l = normalized_laplacian_from_adjacency(&a);
        let d = decompose(&l, None).unwrap();
        let q = d.eigenvectors();
        for t in [0.1, 1.0, 10.0] {
            for x in 0..n {
                let direct: f64 = (0..n)
                    .map(|c| (-d.eigenvalues()[c] * t).exp() * q[[x, c]] * q[[x, c]])
                    .sum();
                let via_spectrum = heat_kernel_signature(&d, x, t).unwrap();
                max_gap = max_gap.max((via_spectrum - direct).abs());
            }
        }
    }

    // stability: perturb edge weights, check |hks - hks'| <= t n ||L - L'||
    let mut violations = 0usize;
    for i in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(4100, i));
        let n = rng.random_range(5..=10usize);
        let a = random_adjacency(n, 0.5, &mut rng);
        let mut perturbed = a.clone();
        for r in 0..n {
            for c in (r + 1)..n {
                if perturbed[[r, c]] > 0.0 {
                    let factor = 1.0 + rng.random_range(-0.10..0.10);
                    perturbed[[r, c]] *= factor;
                    perturbed[[c, r]] = perturbed[[r, c]];
                }
            }
        }
        let l = normalized_laplacian_from_adjacency(&a);
        let l_prime = normalized_laplacian_from_adjacency(&perturbed);
        let x = rng.random_range(0..n);
        for t in [0.1, 1.0, 10.0] {
            let (lhs, rhs) = hks_stability_check(&l, &l_prime, x, t).unwrap();
            if lhs > rhs + 1e-12 {
                violations += 1;
            }
        }
    }

    let pass = max_gap <= 1e-10 && violations == 0;
    report(
        4,
        "heat kernel signature identity and stability",
        pass,
        &format!("max identity gap {max_gap:.2e}, {violations} bound violations over 100 seeds"),
    );
    assert!(max_gap <= 1e-10, "identity gap {max_gap:e}");
    assert_eq!(violations, 0);
}

#[test]
fn c5_first_order_projection_oracle() {
    let mut min_improvement = f64::INFINITY;
    for i in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(5000, i));
        let dim = rng.random_range(5..=8usize);
        // simple spectrum with gaps >= 0.4
        let evs: Vec<f64> = {
            let mut level = 0.0;
            (0..dim)
                .map(|_| {
                    let v = level;
                    level += rng.random_range(0.4..1.2);
                    v
                })
                .collect()
        };
        let q = random_orthogonal(dim, &mut rng);
        let h = q.dot(&Array2::from_diag(&Array1::from(evs))).dot(&q.t());
        let delta = goe_matrix(dim, &mut rng);

        let d = decompose(&h, None).unwrap();
        let gamma = d.spectral_gap().unwrap();
        let dnorm = operator_two_norm(&delta).unwrap();
        let k = rng.random_range(1..d.group_count());
        let closed = first_order_projection(&d, &delta, k).unwrap();

        let central_fd = |t: f64| -> Array2<f64> {
            let first_k = |m: &Array2<f64>| {
                let dm = decompose(m, None).unwrap();
                let mut p = Array2::zeros(m.dim());
                for g in 0..k {
                    p = p + dm.projection(g).unwrap().matrix;
                }
                p
            };
            let plus = first_k(&(&h + &(&delta * t)));
            let minus = first_k(&(&h - &(&delta * t)));
            (&plus - &minus) / (2.0 * t)
        };
        let residual = |t: f64| -> f64 {
            central_fd(t)
                .iter()
                .zip(closed.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };

        let t1 = 1e-3 * gamma / dnorm;
        let r1 = residual(t1);
        let r2 = residual(t1 / 2.0);
        min_improvement = min_improvement.min(r1 / r2);
    }

    let pass = min_improvement >= 3.5;
    report(
        5,
        "first-order projection oracle",
        pass,
        &format!(
            "halving the step shrinks the residual by at least {min_improvement:.2}x \
             across 50 matrices (second-order agreement)"
        ),
    );
    assert!(pass, "worst residual improvement {min_improvement}");
}

/// Torus eigenvalues shared by criteria 6 and 7: (epsilon, sorted eigenvalues).
fn torus_eigenvalues() -> &'static Vec<(f64, Vec<f64>)> {
    static CACHE: OnceLock<Vec<(f64, Vec<f64>)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let cloud = sample_torus(1000, 1.0, 0.25, 7).unwrap();
        [0.5, 1.0, 1.5]
            .iter()
            .map(|&eps| {
                let params = DiffusionParams::new(eps, 0.5).unwrap();
                let s = diffusion_operator(&cloud, &params).unwrap();
                let d = decompose(&s, None).unwrap();
                (eps, d.eigenvalues().to_vec())
            })
            .collect()
    })
}

#[test]
fn c6_diffusion_operator_spectrum() {
    let mut details = String::new();
    let mut pass = true;
    for (eps, evs) in torus_eigenvalues() {
        let min = evs.first().copied().unwrap();
        let max = evs.last().copied().unwrap();
        let ok = min >= -1e-9 && max <= 1.0 + 1e-9 && (max - 1.0).abs() <= 1e-9;
        pass &= ok;
        details.push_str(&format!("eps={eps}: [{min:.2e}, {max:.12}] "));
    }
    report(6, "diffusion operator spectrum in [0, 1]", pass, &details);
    assert!(pass, "{details}");
}

#[test]
fn c7_spectral_concentration_trend() {
    let counts: Vec<(f64, usize)> = torus_eigenvalues()
        .iter()
        .map(|(eps, evs)| (*eps, evs.iter().filter(|&&v| v > 0.01).count()))
        .collect();
    let pass = counts.windows(2).all(|w| w[0].1 > w[1].1);
    let details = counts
        .iter()
        .map(|(eps, c)| format!("eps={eps}: {c} eigenvalues > 0.01"))
        .collect::<Vec<_>>()
        .join(", ");
    report(7, "spectral concentration trend", pass, &details);
    assert!(pass, "{details}");
}

#[test]
fn c8_torus_geometry_recovery() {
    let start = Instant::now();
    let cloud = sample_torus(1000, 1.0, 0.25, 7).unwrap();
    let params = DiffusionParams::new(1.0, 0.5).unwrap();
    let s = diffusion_operator(&cloud, &params).unwrap();
    let d = decompose(&s, None).unwrap();
    let qm = quantile_matrix(&d, 1000).unwrap();
    let p = pca(qm.rows(), 2).unwrap();
    let rho: Vec<f64> = cloud
        .points()
        .rows()
        .into_iter()
        .map(|r| (r[0] * r[0] + r[1] * r[1]).sqrt())
        .collect();
    let pc1: Vec<f64> = p.scores.column(0).to_vec();
    let corr = correlation(&pc1, &rho).unwrap().abs();
    let elapsed = start.elapsed();

    let pass = corr >= 0.9 && elapsed.as_secs_f64() < 180.0;
    report(
        8,
        "torus geometry recovery",
        pass,
        &format!(
            "|corr(PC1, rho)| = {corr:.4} against pinned threshold 0.9 \
             (n = 1000, eps = 1.0, m = 1000, seed 7) in {elapsed:?}"
        ),
    );
    assert!(elapsed.as_secs_f64() < 180.0, "took {elapsed:?}");
    assert!(
        corr >= 0.9,
        "|corr(PC1, rho)| = {corr:.4} < 0.9 at the pinned configuration \
         (measured 0.78-0.87 across seeds at n = 1000; strongly monotone \
         but curved -- see the README scaling notes)"
    );
}

/// Independent W1 oracle: integrate |F_mu - F_nu| over the merged atom grid
/// (x-domain cumulative sums, no quantile machinery).
fn w1_by_cdf_integration(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let mut xs: Vec<f64> = mu.atoms().iter().chain(nu.atoms()).cloned().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.windows(2)
        .map(|w| (mu.cdf(w[0]) - nu.cdf(w[0])).abs() * (w[1] - w[0]))
        .sum()
}

#[test]
fn c9_exact_wasserstein_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(9000);
    let mut max_oracle_gap: f64 = 0.0;
    let mut max_quantile_gap_vs_budget: f64 = 0.0;
    let m = 1000usize;
    for _ in 0..1000 {
        let make = |rng: &mut ChaCha8Rng| {
            if rng.random_range(0.0..1.0) < 0.25 {
                DiscreteMeasure::dirac(rng.random_range(-5.0..5.0))
            } else {
                let a = rng.random_range(-5.0..5.0);
                let b = rng.random_range(-5.0..5.0);
                let w = rng.random_range(0.05..0.95);
                DiscreteMeasure::probability(vec![a, b], vec![w, 1.0 - w]).unwrap()
            }
        };
        let mu = make(&mut rng);
        let nu = make(&mut rng);

        let exact = wasserstein(&mu, &nu, 1.0).unwrap();
        let oracle = w1_by_cdf_integration(&mu, &nu);
        max_oracle_gap = max_oracle_gap.max((exact - oracle).abs());

        let approx = wasserstein_from_quantiles(
            &mu.sample_quantiles(m).unwrap(),
            &nu.sample_quantiles(m).unwrap(),
            1.0,
        )
        .unwrap();
        let lo = mu.atoms()[0].min(nu.atoms()[0]);
        let hi = mu
            .atoms()
            .last()
            .unwrap()
            .max(*nu.atoms().last().unwrap());
        let range = hi - lo;
        if range > 0.0 {
            max_quantile_gap_vs_budget =
                max_quantile_gap_vs_budget.max((approx - exact).abs() / (range / 250.0));
        } else {
            assert_eq!(approx, exact);
        }
    }

    let pass = max_oracle_gap <= 1e-12 && max_quantile_gap_vs_budget <= 1.0;
    report(
        9,
        "exact Wasserstein engine",
        pass,
        &format!(
            "max |exact - cdf oracle| = {max_oracle_gap:.2e}, \
             worst quantile-proxy error at {:.0}% of the range/250 budget",
            max_quantile_gap_vs_budget * 100.0
        ),
    );
    assert!(max_oracle_gap <= 1e-12, "oracle gap {max_oracle_gap:e}");
    assert!(
        max_quantile_gap_vs_budget <= 1.0,
        "quantile proxy exceeded budget: {max_quantile_gap_vs_budget}"
    );
}
