//! Command-line surface for the power-spectrum-signature pipeline.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 eigensolver
//! failure, 4 a stability trial contradicted the W1 bound.
//!
//! Every output file starts with a `#` comment line carrying the resolved
//! configuration, so runs are self-describing and reproducible.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ndarray::Array2;

use spectra_sig::analysis::{dbscan, pca, quantile_matrix};
use spectra_sig::diffusion::{diffusion_operator, sample_torus, DiffusionParams};
use spectra_sig::graph::Graph;
use spectra_sig::io;
use spectra_sig::signatures::{
    all_pair_spectra, reconstruct_matrix, signature_distance_matrix, vertex_spectrum,
};
use spectra_sig::spectral::decompose;
use spectra_sig::stability::{run_goe_trials, summarize, RATIO_TOL};
use spectra_sig::Error;

#[derive(Parser)]
#[command(
    name = "spectra-sig",
    version,
    about = "Power spectrum signatures of vertices: spectral measures, quantile features, \
             Wasserstein stability trials, and point-cloud clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Exactly one spectral input: a symmetric matrix or a graph edge list
/// (converted to its normalized Laplacian).
#[derive(Args)]
#[group(required = true, multiple = false)]
struct SpectralInput {
    /// Symmetric operator as dense CSV (one row per line) or JSON
    /// {"n": ..., "data": [row-major]}, selected by file extension
    #[arg(long)]
    matrix: Option<PathBuf>,

    /// Graph edge list: one `i j [w]` per line, `#` comments, optional
    /// `n <count>` header; the normalized Laplacian is decomposed
    #[arg(long)]
    graph: Option<PathBuf>,
}

impl SpectralInput {
    fn load(&self) -> Result<Array2<f64>, Error> {
        match (&self.matrix, &self.graph) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)?;
                if path.extension().is_some_and(|e| e == "json") {
                    io::matrix_from_json(&text)
                } else {
                    io::matrix_from_csv(&text)
                }
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)?;
                Graph::from_edge_list(&text)?.normalized_laplacian()
            }
            _ => unreachable!("clap enforces exactly one input"),
        }
    }

    fn describe(&self) -> String {
        match (&self.matrix, &self.graph) {
            (Some(p), None) => format!("--matrix {}", p.display()),
            (None, Some(p)) => format!("--graph {}", p.display()),
            _ => unreachable!(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the normalized Laplacian I - D^{-1/2} A D^{-1/2} of a graph
    Laplacian {
        /// Graph edge list file
        #[arg(long)]
        graph: PathBuf,
        /// Destination file
        #[arg(long)]
        output: PathBuf,
        /// Output format: csv (rows) or json ({"n", "data"})
        #[arg(long, default_value = "csv")]
        format: String,
    },

    /// Build the symmetric diffusion operator of a point cloud
    Diffusion {
        /// Point cloud CSV, one point per line, comma-separated coordinates
        #[arg(long)]
        cloud: PathBuf,
        /// Gaussian kernel bandwidth (> 0) in exp(-d^2 / (2 epsilon^2))
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Density-normalization exponent in [0, 1]
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Destination file
        #[arg(long)]
        output: PathBuf,
        /// Output format: csv or json
        #[arg(long, default_value = "csv")]
        format: String,
    },

    /// Per-vertex power spectra as JSON arrays of {atom, mass}
    Spectra {
        #[command(flatten)]
        input: SpectralInput,
        #[arg(long)]
        output: PathBuf,
    },

    /// Per-vertex quantile vectors (n rows by m columns, CSV)
    Quantiles {
        #[command(flatten)]
        input: SpectralInput,
        /// Quantile samples per vertex on the midpoint grid (i + 1/2) / m
        #[arg(long, default_value_t = 1000)]
        quantiles: usize,
        #[arg(long)]
        output: PathBuf,
    },

    /// All-pairs W1 distance matrix between vertex spectra
    Distances {
        #[command(flatten)]
        input: SpectralInput,
        #[arg(long)]
        output: PathBuf,
    },

    /// Recover the operator from its pair spectra and report the error
    Reconstruct {
        #[command(flatten)]
        input: SpectralInput,
        #[arg(long)]
        output: PathBuf,
    },

    /// Randomized W1-stability trials: W1(spectra) vs n |t| ||Delta||_2
    Stability {
        /// Matrix dimension of each trial
        #[arg(long, default_value_t = 8)]
        dim: usize,
        /// Number of independent trials
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Run seed; per-trial seeds derive from it deterministically
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trial log CSV (dim,t,delta_norm,w1,bound,ratio,seed)
        #[arg(long)]
        output: PathBuf,
        /// Summary JSON (max/mean ratio, violation count)
        #[arg(long)]
        summary: Option<PathBuf>,
    },

    /// Full pipeline: diffusion operator, per-point spectra, quantile
    /// vectors, PCA scores, and DBSCAN labels
    Cluster {
        /// Point cloud CSV
        #[arg(long)]
        cloud: PathBuf,
        /// Gaussian kernel bandwidth (> 0)
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Density-normalization exponent in [0, 1]
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Quantile samples per point
        #[arg(long, default_value_t = 1000)]
        quantiles: usize,
        /// Number of principal components to keep
        #[arg(long, default_value_t = 2)]
        pca: usize,
        /// DBSCAN radius on PCA scores; default is 5% of the largest
        /// pairwise score distance
        #[arg(long)]
        dbscan_eps: Option<f64>,
        /// DBSCAN core threshold (neighbors within eps, self included)
        #[arg(long, default_value_t = 10)]
        min_pts: usize,
        /// Output prefix; writes `PREFIX_quantiles.csv`, `PREFIX_scores.csv`,
        /// and `PREFIX_labels.csv`
        #[arg(long)]
        output_prefix: PathBuf,
    },

    /// Sample points uniformly (by surface area) on a torus in R^3
    GenTorus {
        /// Number of points
        #[arg(long, default_value_t = 5000)]
        n: usize,
        /// Major radius (center of torus to center of tube)
        #[arg(long = "R", default_value_t = 1.0)]
        major_radius: f64,
        /// Minor radius (tube radius), 0 < r < R
        #[arg(long = "r", default_value_t = 0.25)]
        minor_radius: f64,
        /// Sampling seed; identical seeds give identical clouds
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Destination CSV
        #[arg(long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("SPECTRA_SIG_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Json(_) | Error::Parse { .. } => 1,
        Error::SolverFailure => 3,
        _ => 2,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents)?;
    Ok(())
}

fn write_matrix(path: &Path, m: &Array2<f64>, format: &str, config: &str) -> Result<(), Error> {
    match format {
        "csv" => write_file(path, &format!("# {config}\n{}", io::matrix_to_csv(m))),
        "json" => {
            let mut value: serde_json::Value = serde_json::from_str(&io::matrix_to_json(m)?)?;
            value["config"] = serde_json::Value::String(config.to_string());
            write_file(path, &serde_json::to_string(&value)?)
        }
        other => Err(Error::Parse {
            line: 0,
            msg: format!("unknown format `{other}` (expected csv or json)"),
        }),
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Laplacian { graph, output, format } => {
            let text = std::fs::read_to_string(&graph)?;
            let l = Graph::from_edge_list(&text)?.normalized_laplacian()?;
            let config = format!(
                "spectra-sig laplacian --graph {} --output {} --format {}",
                graph.display(),
                output.display(),
                format
            );
            write_matrix(&output, &l, &format, &config)?;
            println!("wrote {} ({} vertices)", output.display(), l.nrows());
            Ok(ExitCode::SUCCESS)
        }

        Command::Diffusion { cloud, epsilon, alpha, output, format } => {
            let text = std::fs::read_to_string(&cloud)?;
            let pc = io::point_cloud_from_csv(&text)?;
            let params = DiffusionParams::new(epsilon, alpha)?;
            let s = diffusion_operator(&pc, &params)?;
            let config = format!(
                "spectra-sig diffusion --cloud {} --epsilon {} --alpha {} --output {} --format {}",
                cloud.display(),
                epsilon,
                alpha,
                output.display(),
                format
            );
            write_matrix(&output, &s, &format, &config)?;
            println!(
                "wrote {} ({} points, dimension {})",
                output.display(),
                pc.len(),
                pc.dim()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Spectra { input, output } => {
            let h = input.load()?;
            let d = decompose(&h, None)?;
            let spectra = (0..d.n())
                .map(|x| vertex_spectrum(&d, x))
                .collect::<Result<Vec<_>, _>>()?;
            let config = format!(
                "spectra-sig spectra {} --output {}",
                input.describe(),
                output.display()
            );
            let mut value: serde_json::Value =
                serde_json::from_str(&io::vertex_spectra_to_json(&spectra)?)?;
            value = serde_json::json!({ "config": config, "spectra": value });
            write_file(&output, &serde_json::to_string(&value)?)?;
            println!("wrote {} ({} vertex spectra)", output.display(), d.n());
            Ok(ExitCode::SUCCESS)
        }

        Command::Quantiles { input, quantiles, output } => {
            if quantiles == 0 {
                eprintln!("error: --quantiles must be at least 1");
                return Ok(ExitCode::from(2));
            }
            let h = input.load()?;
            let d = decompose(&h, None)?;
            let qm = quantile_matrix(&d, quantiles)?;
            let config = format!(
                "spectra-sig quantiles {} --quantiles {} --output {}",
                input.describe(),
                quantiles,
                output.display()
            );
            write_file(
                &output,
                &format!("# {config}\n{}", io::matrix_to_csv(qm.rows())),
            )?;
            println!(
                "wrote {} ({} rows x {} quantiles)",
                output.display(),
                qm.n(),
                qm.m()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Distances { input, output } => {
            let h = input.load()?;
            let d = decompose(&h, None)?;
            let m = signature_distance_matrix(&d)?;
            let config = format!(
                "spectra-sig distances {} --output {}",
                input.describe(),
                output.display()
            );
            write_file(
                &output,
                &format!("# {config}\n{}", io::matrix_to_csv(m.dist())),
            )?;
            println!("wrote {} ({n}x{n} W1 matrix)", output.display(), n = m.n());
            Ok(ExitCode::SUCCESS)
        }

        Command::Reconstruct { input, output } => {
            let h = input.load()?;
            let d = decompose(&h, None)?;
            let rec = reconstruct_matrix(&all_pair_spectra(&d)?)?;
            let max_err = rec
                .iter()
                .zip(h.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max);
            let config = format!(
                "spectra-sig reconstruct {} --output {}",
                input.describe(),
                output.display()
            );
            write_file(
                &output,
                &format!("# {config}\n# max reconstruction error {max_err:e}\n{}",
                    io::matrix_to_csv(&rec)),
            )?;
            println!(
                "wrote {} (max reconstruction error {max_err:e})",
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Stability { dim, trials, seed, output, summary } => {
            let records = run_goe_trials(dim, trials, seed)?;
            let stats = summarize(&records);
            let config = format!(
                "spectra-sig stability --dim {dim} --trials {trials} --seed {seed} --output {}",
                output.display()
            );
            write_file(&output, &format!("# {config}\n{}", io::trials_to_csv(&records)))?;
            if let Some(path) = summary {
                let mut value = serde_json::to_value(&stats)?;
                value["config"] = serde_json::Value::String(config.clone());
                write_file(&path, &serde_json::to_string_pretty(&value)?)?;
            }
            println!(
                "{} trials: max ratio {:.6}, mean ratio {:.6}, {} violations",
                stats.trials, stats.max_ratio, stats.mean_ratio, stats.violations
            );
            if stats.violations > 0 {
                eprintln!(
                    "error: {} trials exceeded the W1 bound (ratio > 1 + {RATIO_TOL:e})",
                    stats.violations
                );
                return Ok(ExitCode::from(4));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Cluster {
            cloud,
            epsilon,
            alpha,
            quantiles,
            pca: pca_k,
            dbscan_eps,
            min_pts,
            output_prefix,
        } => {
            if quantiles == 0 {
                eprintln!("error: --quantiles must be at least 1");
                return Ok(ExitCode::from(2));
            }
            let text = std::fs::read_to_string(&cloud)?;
            let pc = io::point_cloud_from_csv(&text)?;
            let params = DiffusionParams::new(epsilon, alpha)?;
            let s = diffusion_operator(&pc, &params)?;
            let d = decompose(&s, None)?;
            let qm = quantile_matrix(&d, quantiles)?;
            let p = pca(qm.rows(), pca_k)?;

            // default radius: 5% of the largest pairwise score distance
            let eps = match dbscan_eps {
                Some(e) => e,
                None => {
                    let n = p.scores.nrows();
                    let mut max_d2 = 0.0_f64;
                    for i in 0..n {
                        for j in (i + 1)..n {
                            let d2: f64 = p
                                .scores
                                .row(i)
                                .iter()
                                .zip(p.scores.row(j))
                                .map(|(a, b)| (a - b) * (a - b))
                                .sum();
                            max_d2 = max_d2.max(d2);
                        }
                    }
                    0.05 * max_d2.sqrt()
                }
            };
            if eps.is_nan() || eps <= 0.0 {
                eprintln!("error: dbscan radius must be positive, got {eps}");
                return Ok(ExitCode::from(2));
            }
            let assignment = dbscan(&p.scores, eps, min_pts);

            let config = format!(
                "spectra-sig cluster --cloud {} --epsilon {} --alpha {} --quantiles {} \
                 --pca {} --dbscan-eps {} --min-pts {} --output-prefix {}",
                cloud.display(),
                epsilon,
                alpha,
                quantiles,
                pca_k,
                eps,
                min_pts,
                output_prefix.display()
            );
            let prefix = output_prefix.display();
            write_file(
                &PathBuf::from(format!("{prefix}_quantiles.csv")),
                &format!("# {config}\n{}", io::matrix_to_csv(qm.rows())),
            )?;
            write_file(
                &PathBuf::from(format!("{prefix}_scores.csv")),
                &format!("# {config}\n{}", io::scores_to_csv(&p.scores)),
            )?;
            write_file(
                &PathBuf::from(format!("{prefix}_labels.csv")),
                &format!("# {config}\n{}", io::labels_to_csv(&assignment)),
            )?;
            println!(
                "wrote {prefix}_quantiles.csv, {prefix}_scores.csv, {prefix}_labels.csv \
                 ({} clusters, {} noise points, dbscan eps {:.6})",
                assignment.k,
                assignment.labels.iter().filter(|&&l| l == -1).count(),
                eps
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::GenTorus { n, major_radius, minor_radius, seed, output } => {
            let cloud = sample_torus(n, major_radius, minor_radius, seed)?;
            let config = format!(
                "spectra-sig gen-torus --n {n} --R {major_radius} --r {minor_radius} \
                 --seed {seed} --output {}",
                output.display()
            );
            write_file(
                &output,
                &format!("# {config}\n{}", io::point_cloud_to_csv(cloud.points())),
            )?;
            println!("wrote {} ({n} points)", output.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
