//! File formats: edge lists, adjacency CSV, complex/spectrum/filter/group
//! JSON, and CSV exchange for edge series, node time series and test
//! results.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::complex::{OrientedComplex2, WeightedAdjacency};
use crate::error::{Error, Result};
use crate::filter::FilterSpec;
use crate::hodge::{HodgeSpectrum, SubspaceKind};
use crate::leadlag::NodeTimeSeries;
use crate::stats::GroupAssignment;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn json_err(path: &Path, err: serde_json::Error) -> Error {
    Error::Json {
        path: path.display().to_string(),
        message: err.to_string(),
    }
}

/// Reads a text edge list: one `i j` pair per line, `#` starts a comment,
/// blank lines ignored.
pub fn read_edge_list(path: &Path) -> Result<Vec<(usize, usize)>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.ok_or_else(|| {
                Error::InvalidInput(format!(
                    "{}:{}: expected `i j` pair",
                    path.display(),
                    lineno + 1
                ))
            })?
            .parse()
            .map_err(|_| {
                Error::InvalidInput(format!(
                    "{}:{}: not a vertex index",
                    path.display(),
                    lineno + 1
                ))
            })
        };
        let i = parse(parts.next())?;
        let j = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(Error::InvalidInput(format!(
                "{}:{}: expected exactly two indices",
                path.display(),
                lineno + 1
            )));
        }
        edges.push((i, j));
    }
    Ok(edges)
}

pub fn write_edge_list(path: &Path, edges: &[(usize, usize)]) -> Result<()> {
    let mut out = String::new();
    for (i, j) in edges {
        out.push_str(&format!("{i} {j}\n"));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Reads an N×N adjacency CSV. With `has_header` the first row carries node
/// labels; otherwise labels default to row indices.
pub fn read_adjacency_csv(path: &Path, has_header: bool) -> Result<(WeightedAdjacency, Vec<String>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_err(path, e.to_string()))?;
    let labels: Option<Vec<String>> = if has_header {
        Some(
            reader
                .headers()
                .map_err(|e| csv_err(path, e.to_string()))?
                .iter()
                .map(|s| s.trim().to_string())
                .collect(),
        )
    } else {
        None
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, format!("row {}: {e}", r + 1)))?;
        let mut row = Vec::with_capacity(record.len());
        for (cidx, field) in record.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                csv_err(
                    path,
                    format!("row {}, column {}: {field:?} is not a number", r + 1, cidx + 1),
                )
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(csv_err(path, "no data rows"));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(csv_err(
                path,
                format!("row {} has {} columns, expected {n}", r + 1, row.len()),
            ));
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let labels = match labels {
        Some(l) if l.len() == n => l,
        Some(l) => {
            return Err(csv_err(
                path,
                format!("header has {} labels for {n} rows", l.len()),
            ))
        }
        None => (0..n).map(|i| i.to_string()).collect(),
    };
    Ok((WeightedAdjacency::new(m)?, labels))
}

#[derive(Debug, Serialize, Deserialize)]
struct ComplexJson {
    n_vertices: usize,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
}

pub fn write_complex_json(path: &Path, c: &OrientedComplex2) -> Result<()> {
    let doc = ComplexJson {
        n_vertices: c.n_vertices(),
        edges: c.edges().iter().map(|e| [e.tail, e.tip]).collect(),
        triangles: c.triangles().iter().map(|t| [t.a, t.b, t.c]).collect(),
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| json_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

pub fn read_complex_json(path: &Path) -> Result<OrientedComplex2> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let doc: ComplexJson = serde_json::from_str(&text).map_err(|e| json_err(path, e))?;
    let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
    OrientedComplex2::with_triangles(doc.n_vertices, &edges, &doc.triangles)
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrumBlockJson {
    kind: SubspaceKind,
    eigvals: Vec<f64>,
    /// Row-major E×k block: one inner list per edge.
    eigvecs: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrumJson {
    zero_tol: f64,
    blocks: Vec<SpectrumBlockJson>,
}

fn block_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

pub fn write_spectrum_json(path: &Path, s: &HodgeSpectrum) -> Result<()> {
    let doc = SpectrumJson {
        zero_tol: s.zero_tol,
        blocks: vec![
            SpectrumBlockJson {
                kind: SubspaceKind::Harmonic,
                eigvals: vec![0.0; s.n_harm()],
                eigvecs: block_rows(&s.harm_vecs),
            },
            SpectrumBlockJson {
                kind: SubspaceKind::Gradient,
                eigvals: s.grad_eigvals.clone(),
                eigvecs: block_rows(&s.grad_vecs),
            },
            SpectrumBlockJson {
                kind: SubspaceKind::Curl,
                eigvals: s.curl_eigvals.clone(),
                eigvecs: block_rows(&s.curl_vecs),
            },
        ],
    };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| json_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

/// CSV of eigenvalues with subspace labels: `index,kind,eigenvalue`.
pub fn write_eigenvalues_csv(path: &Path, s: &HodgeSpectrum) -> Result<()> {
    let mut out = String::from("index,kind,eigenvalue\n");
    for (i, (kind, lambda)) in s.labels().iter().enumerate() {
        out.push_str(&format!("{i},{kind},{lambda}\n"));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Reads an edge-series CSV (header of `tail-tip` labels, one row per time
/// point) into an E×L matrix with rows in complex edge order.
pub fn read_edge_series_csv(path: &Path, c: &OrientedComplex2) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_err(path, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| csv_err(path, e.to_string()))?
        .clone();
    let mut order = Vec::with_capacity(headers.len());
    for label in headers.iter() {
        let mut split = label.trim().split('-');
        let (Some(a), Some(b), None) = (split.next(), split.next(), split.next()) else {
            return Err(csv_err(path, format!("bad edge label {label:?}")));
        };
        let (a, b): (usize, usize) = match (a.parse(), b.parse()) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Err(csv_err(path, format!("bad edge label {label:?}"))),
        };
        let Some(idx) = c.edge_position(a, b) else {
            return Err(csv_err(path, format!("edge {a}-{b} is not in the complex")));
        };
        if order.contains(&idx) {
            return Err(csv_err(path, format!("duplicate edge column {a}-{b}")));
        }
        order.push(idx);
    }
    if order.len() != c.n_edges() {
        return Err(csv_err(
            path,
            format!("{} edge columns for a complex with {} edges", order.len(), c.n_edges()),
        ));
    }
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, format!("row {}: {e}", r + 2)))?;
        if record.len() != order.len() {
            return Err(csv_err(
                path,
                format!("row {}: {} fields, expected {}", r + 2, record.len(), order.len()),
            ));
        }
        let mut col = vec![0.0; order.len()];
        for (k, field) in record.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                csv_err(path, format!("row {}, column {}: not a number", r + 2, k + 1))
            })?;
            col[order[k]] = v;
        }
        columns.push(col);
    }
    let l = columns.len();
    Ok(DMatrix::from_fn(c.n_edges(), l, |i, t| columns[t][i]))
}

/// Writes an E×L edge series: header of `tail-tip` labels, one row per time
/// point.
pub fn write_edge_series_csv(path: &Path, c: &OrientedComplex2, series: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    let labels: Vec<String> = c.edges().iter().map(|e| e.label()).collect();
    out.push_str(&labels.join(","));
    out.push('\n');
    for t in 0..series.ncols() {
        let row: Vec<String> = (0..series.nrows()).map(|i| series[(i, t)].to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Component export: a leading `component` column (down|up|harm) ahead of
/// the edge columns, one row per component per time point.
pub fn write_component_series_csv(
    path: &Path,
    c: &OrientedComplex2,
    down: &DMatrix<f64>,
    up: &DMatrix<f64>,
    harm: &DMatrix<f64>,
) -> Result<()> {
    let mut out = String::from("component,");
    let labels: Vec<String> = c.edges().iter().map(|e| e.label()).collect();
    out.push_str(&labels.join(","));
    out.push('\n');
    for t in 0..down.ncols() {
        for (name, m) in [("down", down), ("up", up), ("harm", harm)] {
            out.push_str(name);
            for i in 0..m.nrows() {
                out.push(',');
                out.push_str(&m[(i, t)].to_string());
            }
            out.push('\n');
        }
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Reads a node time-series CSV.
///
/// Default layout: first row node labels, each subsequent row one time
/// point. With `transpose` each row is one node: label first, samples after.
pub fn read_node_series_csv(path: &Path, transpose: bool) -> Result<(NodeTimeSeries, Vec<String>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_err(path, e.to_string()))?;
    let records: Vec<csv::StringRecord> = reader
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| csv_err(path, e.to_string()))?;
    if records.is_empty() {
        return Err(csv_err(path, "empty file"));
    }
    if transpose {
        let n = records.len();
        let l = records[0].len().saturating_sub(1);
        let mut labels = Vec::with_capacity(n);
        let mut data = DMatrix::zeros(n, l);
        for (i, record) in records.iter().enumerate() {
            if record.len() != l + 1 {
                return Err(csv_err(
                    path,
                    format!("row {}: {} fields, expected {}", i + 1, record.len(), l + 1),
                ));
            }
            labels.push(record[0].trim().to_string());
            for t in 0..l {
                data[(i, t)] = record[t + 1].trim().parse().map_err(|_| {
                    csv_err(path, format!("row {}, column {}: not a number", i + 1, t + 2))
                })?;
            }
        }
        Ok((NodeTimeSeries::new(data), labels))
    } else {
        let labels: Vec<String> = records[0].iter().map(|s| s.trim().to_string()).collect();
        let n = labels.len();
        let l = records.len() - 1;
        let mut data = DMatrix::zeros(n, l);
        for (t, record) in records[1..].iter().enumerate() {
            if record.len() != n {
                return Err(csv_err(
                    path,
                    format!("row {}: {} fields, expected {n}", t + 2, record.len()),
                ));
            }
            for i in 0..n {
                data[(i, t)] = record[i].trim().parse().map_err(|_| {
                    csv_err(path, format!("row {}, column {}: not a number", t + 2, i + 1))
                })?;
            }
        }
        Ok((NodeTimeSeries::new(data), labels))
    }
}

/// Writes a node time series in the default layout (labels row, then one
/// row per time point).
pub fn write_node_series_csv(path: &Path, x: &NodeTimeSeries, labels: &[String]) -> Result<()> {
    if labels.len() != x.n_nodes() {
        return Err(Error::DimensionMismatch {
            context: "write_node_series_csv",
            expected: x.n_nodes(),
            actual: labels.len(),
        });
    }
    let mut out = String::new();
    out.push_str(&labels.join(","));
    out.push('\n');
    for t in 0..x.n_samples() {
        let row: Vec<String> = (0..x.n_nodes()).map(|i| x.data[(i, t)].to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_filter_json(path: &Path) -> Result<FilterSpec> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| json_err(path, e))
}

pub fn write_filter_json(path: &Path, f: &FilterSpec) -> Result<()> {
    let text = serde_json::to_string_pretty(f).map_err(|e| json_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

/// Group file: `{groups: [ordered labels], assignment: {node_label: group}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupsFile {
    pub groups: Vec<String>,
    pub assignment: std::collections::BTreeMap<String, String>,
}

impl GroupsFile {
    /// Resolves the assignment against the pipeline's node labels.
    pub fn assign(&self, node_labels: &[String]) -> Result<GroupAssignment> {
        let mut per_node = Vec::with_capacity(node_labels.len());
        for (idx, label) in node_labels.iter().enumerate() {
            let Some(group) = self.assignment.get(label) else {
                return Err(Error::UnlabeledNode(idx));
            };
            per_node.push(group.clone());
        }
        GroupAssignment::new(self.groups.clone(), &per_node)
    }
}

pub fn read_groups_json(path: &Path) -> Result<GroupsFile> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| json_err(path, e))
}
