//! Text formats for matrices, point clouds, measures, and trial logs.
//!
//! All CSV readers skip blank lines and `#` comments, and tolerate a single
//! non-numeric header line, so files round-trip even when a tool prepends a
//! config comment or column names. Floats are written with Rust's shortest
//! round-trip formatting.

use std::fmt::Write as _;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::analysis::ClusterAssignment;
use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, QuantileVector};
use crate::signatures::PowerSpectrum;
use crate::spectral::SpectralDecomposition;
use crate::stability::{TrialRecord, TrialSummary};

fn parse_row(line: &str, sep: char) -> Option<Vec<f64>> {
    line.split(sep)
        .map(|t| t.trim().parse::<f64>().ok())
        .collect()
}

/// Parses comma-separated numeric rows, skipping comments and at most one
/// leading header line. Rows must have equal lengths.
fn rows_from_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut saw_content = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match parse_row(line, ',') {
            Some(row) => {
                if let Some(first) = rows.first() {
                    if row.len() != first.len() {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: format!(
                                "row has {} fields, expected {}",
                                row.len(),
                                first.len()
                            ),
                        });
                    }
                }
                rows.push(row);
                saw_content = true;
            }
            None if !saw_content => continue, // header line
            None => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: "unparseable numeric row".to_string(),
                })
            }
        }
    }
    Ok(rows)
}

/// Dense matrix as CSV, one row per line.
pub fn matrix_to_csv(m: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<Array2<f64>> {
    let rows = rows_from_csv(text)?;
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no numeric rows".to_string(),
        });
    }
    let (n, m) = (rows.len(), rows[0].len());
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(Array2::from_shape_vec((n, m), flat).expect("equal row lengths"))
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    data: Vec<f64>,
}

/// Square matrix as JSON `{"n": ..., "data": [row-major]}`.
pub fn matrix_to_json(m: &Array2<f64>) -> Result<String> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(serde_json::to_string(&MatrixJson {
        n: rows,
        data: m.iter().cloned().collect(),
    })?)
}

pub fn matrix_from_json(text: &str) -> Result<Array2<f64>> {
    let parsed: MatrixJson = serde_json::from_str(text)?;
    if parsed.data.len() != parsed.n * parsed.n {
        return Err(Error::Parse {
            line: 0,
            msg: format!(
                "matrix JSON claims n = {} but carries {} entries",
                parsed.n,
                parsed.data.len()
            ),
        });
    }
    Ok(Array2::from_shape_vec((parsed.n, parsed.n), parsed.data).expect("checked"))
}

/// Point cloud as CSV, `d` comma-separated coordinates per line.
pub fn point_cloud_to_csv(points: &Array2<f64>) -> String {
    matrix_to_csv(points)
}

pub fn point_cloud_from_csv(text: &str) -> Result<crate::diffusion::PointCloud> {
    crate::diffusion::PointCloud::new(matrix_from_csv(text)?)
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    atoms: Vec<f64>,
    masses: Vec<f64>,
}

pub fn measure_to_json(m: &DiscreteMeasure) -> Result<String> {
    Ok(serde_json::to_string(&MeasureJson {
        atoms: m.atoms().to_vec(),
        masses: m.masses().to_vec(),
    })?)
}

pub fn probability_measure_from_json(text: &str) -> Result<DiscreteMeasure> {
    let parsed: MeasureJson = serde_json::from_str(text)?;
    DiscreteMeasure::probability(parsed.atoms, parsed.masses)
}

/// Measure as CSV lines `atom,mass`.
pub fn measure_to_csv(m: &DiscreteMeasure) -> String {
    let mut out = String::from("atom,mass\n");
    for (a, w) in m.atoms().iter().zip(m.masses()) {
        let _ = writeln!(out, "{a},{w}");
    }
    out
}

pub fn quantiles_to_json(q: &QuantileVector) -> Result<String> {
    Ok(serde_json::to_string(&q.values())?)
}

pub fn quantiles_from_json(text: &str) -> Result<QuantileVector> {
    let values: Vec<f64> = serde_json::from_str(text)?;
    Ok(QuantileVector::new(values))
}

/// Per-vertex spectra as arrays of `{atom, mass}` objects.
pub fn vertex_spectra_to_json(spectra: &[PowerSpectrum]) -> Result<String> {
    #[derive(Serialize)]
    struct AtomMass {
        atom: f64,
        mass: f64,
    }
    let out: Vec<Vec<AtomMass>> = spectra
        .iter()
        .map(|s| {
            s.measure()
                .atoms()
                .iter()
                .zip(s.measure().masses())
                .map(|(a, m)| AtomMass { atom: *a, mass: *m })
                .collect()
        })
        .collect();
    Ok(serde_json::to_string(&out)?)
}

pub fn measures_from_spectra_json(text: &str) -> Result<Vec<DiscreteMeasure>> {
    #[derive(Deserialize)]
    struct AtomMass {
        atom: f64,
        mass: f64,
    }
    let parsed: Vec<Vec<AtomMass>> = serde_json::from_str(text)?;
    parsed
        .into_iter()
        .map(|entries| {
            let (atoms, masses) = entries.into_iter().map(|e| (e.atom, e.mass)).unzip();
            DiscreteMeasure::probability(atoms, masses)
        })
        .collect()
}

/// Debugging export of a decomposition: eigenvalues, grouping, eigenvectors.
pub fn decomposition_to_json(d: &SpectralDecomposition) -> Result<String> {
    #[derive(Serialize)]
    struct DecompositionJson<'a> {
        n: usize,
        distinct_eigenvalues: &'a [f64],
        multiplicities: &'a [usize],
        eigenvalues: &'a [f64],
        group_tol: f64,
        eigenvectors: Vec<Vec<f64>>,
    }
    let eigenvectors = d
        .eigenvectors()
        .rows()
        .into_iter()
        .map(|r| r.to_vec())
        .collect();
    Ok(serde_json::to_string(&DecompositionJson {
        n: d.n(),
        distinct_eigenvalues: d.distinct_eigenvalues(),
        multiplicities: d.multiplicities(),
        eigenvalues: d.eigenvalues(),
        group_tol: d.group_tol(),
        eigenvectors,
    })?)
}

/// Trial log as CSV with the header `dim,t,delta_norm,w1,bound,ratio,seed`.
pub fn trials_to_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("dim,t,delta_norm,w1,bound,ratio,seed\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.dim, r.t, r.delta_norm, r.w1, r.bound, r.ratio, r.seed
        );
    }
    out
}

pub fn trials_from_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut records = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with("dim,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let err = |msg: &str| Error::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        if fields.len() != 7 {
            return Err(err("expected 7 fields"));
        }
        records.push(TrialRecord {
            dim: fields[0].trim().parse().map_err(|_| err("bad dim"))?,
            t: fields[1].trim().parse().map_err(|_| err("bad t"))?,
            delta_norm: fields[2].trim().parse().map_err(|_| err("bad delta_norm"))?,
            w1: fields[3].trim().parse().map_err(|_| err("bad w1"))?,
            bound: fields[4].trim().parse().map_err(|_| err("bad bound"))?,
            ratio: fields[5].trim().parse().map_err(|_| err("bad ratio"))?,
            seed: fields[6].trim().parse().map_err(|_| err("bad seed"))?,
        });
    }
    Ok(records)
}

pub fn summary_to_json(summary: &TrialSummary) -> Result<String> {
    Ok(serde_json::to_string_pretty(summary)?)
}

/// PCA scores as CSV with a `pc1,...,pck` header.
pub fn scores_to_csv(scores: &Array2<f64>) -> String {
    let k = scores.ncols();
    let header: Vec<String> = (1..=k).map(|i| format!("pc{i}")).collect();
    let mut out = header.join(",");
    out.push('\n');
    out.push_str(&matrix_to_csv(scores));
    out
}

/// Cluster labels as a single-column CSV.
pub fn labels_to_csv(assignment: &ClusterAssignment) -> String {
    let mut out = String::new();
    for l in &assignment.labels {
        let _ = writeln!(out, "{l}");
    }
    out
}

pub fn labels_from_csv(text: &str) -> Result<Vec<i32>> {
    let mut labels = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        labels.push(line.parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: "bad label".to_string(),
        })?);
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn matrix_csv_round_trip() {
        let m = array![[1.0, -0.5], [0.25, 1e-17]];
        let text = matrix_to_csv(&m);
        let back = matrix_from_csv(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn matrix_csv_skips_comments_and_header() {
        let text = "# config line\nc1,c2\n1,2\n3,4\n";
        let m = matrix_from_csv(text).unwrap();
        assert_eq!(m, array![[1.0, 2.0], [3.0, 4.0]]);
    }

    #[test]
    fn matrix_csv_rejects_ragged_rows() {
        assert!(matches!(
            matrix_from_csv("1,2\n3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = array![[0.0, 1.5], [1.5, -2.0]];
        let back = matrix_from_json(&matrix_to_json(&m).unwrap()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn measure_json_round_trip() {
        let m = DiscreteMeasure::probability(vec![0.0, 2.0], vec![0.25, 0.75]).unwrap();
        let back = probability_measure_from_json(&measure_to_json(&m).unwrap()).unwrap();
        assert_eq!(m.atoms(), back.atoms());
        assert_eq!(m.masses(), back.masses());
    }

    #[test]
    fn trial_csv_round_trip() {
        let records = crate::stability::run_goe_trials(3, 4, 1).unwrap();
        let text = trials_to_csv(&records);
        let back = trials_from_csv(&text).unwrap();
        assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(a.ratio, b.ratio);
            assert_eq!(a.seed, b.seed);
        }
    }

    #[test]
    fn spectra_json_round_trip() {
        let l = crate::graph::Graph::cycle(4)
            .unwrap()
            .normalized_laplacian()
            .unwrap();
        let d = crate::spectral::decompose(&l, None).unwrap();
        let spectra: Vec<_> = (0..4)
            .map(|x| crate::signatures::vertex_spectrum(&d, x).unwrap())
            .collect();
        let text = vertex_spectra_to_json(&spectra).unwrap();
        let measures = measures_from_spectra_json(&text).unwrap();
        for (s, m) in spectra.iter().zip(&measures) {
            assert_eq!(s.measure().atoms(), m.atoms());
        }
    }

    #[test]
    fn decomposition_json_exports_grouping() {
        let l = crate::graph::Graph::cycle(4)
            .unwrap()
            .normalized_laplacian()
            .unwrap();
        let d = crate::spectral::decompose(&l, None).unwrap();
        let value: serde_json::Value =
            serde_json::from_str(&decomposition_to_json(&d).unwrap()).unwrap();
        assert_eq!(value["n"], 4);
        assert_eq!(value["multiplicities"], serde_json::json!([1, 2, 1]));
        assert_eq!(value["eigenvectors"].as_array().unwrap().len(), 4);
        assert_eq!(value["eigenvalues"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn labels_csv_round_trip() {
        let a = ClusterAssignment {
            labels: vec![0, 1, -1, 0],
            k: 2,
        };
        let text = labels_to_csv(&a);
        assert_eq!(labels_from_csv(&text).unwrap(), a.labels);
    }

    #[test]
    fn scores_csv_has_header_and_reads_back() {
        let scores = array![[1.0, 2.0], [3.0, 4.0]];
        let text = scores_to_csv(&scores);
        assert!(text.starts_with("pc1,pc2\n"));
        let back = matrix_from_csv(&text).unwrap();
        assert_eq!(back, scores);
    }
}
