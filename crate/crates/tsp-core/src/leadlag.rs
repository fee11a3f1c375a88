//! Lead-lag edge signals derived from nodal time series.
//!
//! For an edge (i,j) with i<j the signal at time t is
//! `x_i[t-1]·x_j[t] - x_j[t-1]·x_i[t]`: the 2x2 determinant of the two node
//! trajectories over consecutive time points. Input columns are t = 0..L-1;
//! edge-series columns correspond to t = 1..L-1, one sample shorter.

use nalgebra::DMatrix;

use crate::complex::OrientedComplex2;
use crate::error::{Error, Result};

/// Nodal time series, rows = nodes, columns = time points.
#[derive(Debug, Clone)]
pub struct NodeTimeSeries {
    pub data: DMatrix<f64>,
    /// Sampling period in seconds, when known.
    pub sample_period: Option<f64>,
}

impl NodeTimeSeries {
    pub fn new(data: DMatrix<f64>) -> Self {
        Self {
            data,
            sample_period: None,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.data.ncols()
    }

    /// Row-wise z-scoring with population variance (divide by L).
    ///
    /// Constant rows are left at zero rather than dividing by zero.
    pub fn zscore(&self) -> NodeTimeSeries {
        let l = self.n_samples() as f64;
        let mut out = self.data.clone();
        for mut row in out.row_iter_mut() {
            let mean = row.sum() / l;
            row.add_scalar_mut(-mean);
            let var = row.iter().map(|v| v * v).sum::<f64>() / l;
            if var > 0.0 {
                let sd = var.sqrt();
                row /= sd;
            }
        }
        NodeTimeSeries {
            data: out,
            sample_period: self.sample_period,
        }
    }

    /// True when every row has mean ≈ 0 and population variance ≈ 1.
    pub fn is_zscored(&self, tol: f64) -> bool {
        let l = self.n_samples() as f64;
        self.data.row_iter().all(|row| {
            let mean = row.sum() / l;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / l;
            mean.abs() <= tol && (var - 1.0).abs() <= tol
        })
    }
}

fn check_node_count(x: &NodeTimeSeries, c: &OrientedComplex2, context: &'static str) -> Result<()> {
    if x.n_nodes() != c.n_vertices() {
        return Err(Error::DimensionMismatch {
            context,
            expected: c.n_vertices(),
            actual: x.n_nodes(),
        });
    }
    Ok(())
}

/// Lead-lag edge series over every edge of the complex: E×(L-1).
pub fn edge_signal(x: &NodeTimeSeries, c: &OrientedComplex2) -> Result<DMatrix<f64>> {
    check_node_count(x, c, "edge_signal")?;
    let l = x.n_samples();
    if l < 2 {
        return Err(Error::TooFewTimePoints { needed: 2, got: l });
    }
    let mut out = DMatrix::zeros(c.n_edges(), l - 1);
    for (row, e) in c.edges().iter().enumerate() {
        for t in 1..l {
            out[(row, t - 1)] = x.data[(e.tail, t - 1)] * x.data[(e.tip, t)]
                - x.data[(e.tip, t - 1)] * x.data[(e.tail, t)];
        }
    }
    Ok(out)
}

/// Edge series of one node pair in the increment form
/// `x_i[t-1]·Δx_j[t] - x_j[t-1]·Δx_i[t]`; algebraically identical to the
/// determinant form.
pub fn lag_form(xi: &[f64], xj: &[f64]) -> Result<Vec<f64>> {
    if xi.len() != xj.len() {
        return Err(Error::DimensionMismatch {
            context: "lag_form",
            expected: xi.len(),
            actual: xj.len(),
        });
    }
    let l = xi.len();
    if l < 2 {
        return Err(Error::TooFewTimePoints { needed: 2, got: l });
    }
    Ok((1..l)
        .map(|t| xi[t - 1] * (xj[t] - xj[t - 1]) - xj[t - 1] * (xi[t] - xi[t - 1]))
        .collect())
}

/// Concatenates per-run edge series.
///
/// With `drop_junction` each run contributes its own L-1 samples and the
/// spurious cross-run sample is dropped; otherwise the runs are concatenated
/// at the node level first and the junction sample is kept.
pub fn edge_signal_runs(
    runs: &[NodeTimeSeries],
    c: &OrientedComplex2,
    drop_junction: bool,
) -> Result<DMatrix<f64>> {
    if runs.is_empty() {
        return Err(Error::InvalidInput("no runs provided".into()));
    }
    if drop_junction {
        let per_run: Vec<DMatrix<f64>> = runs
            .iter()
            .map(|r| edge_signal(r, c))
            .collect::<Result<_>>()?;
        let total: usize = per_run.iter().map(|m| m.ncols()).sum();
        let mut out = DMatrix::zeros(c.n_edges(), total);
        let mut col = 0;
        for m in per_run {
            out.columns_mut(col, m.ncols()).copy_from(&m);
            col += m.ncols();
        }
        Ok(out)
    } else {
        let n = runs[0].n_nodes();
        if runs.iter().any(|r| r.n_nodes() != n) {
            return Err(Error::InvalidInput("runs disagree on node count".into()));
        }
        let total: usize = runs.iter().map(|r| r.n_samples()).sum();
        let mut data = DMatrix::zeros(n, total);
        let mut col = 0;
        for r in runs {
            data.columns_mut(col, r.n_samples()).copy_from(&r.data);
            col += r.n_samples();
        }
        edge_signal(
            &NodeTimeSeries {
                data,
                sample_period: runs[0].sample_period,
            },
            c,
        )
    }
}

/// Per-edge lag ±1 cross-correlation estimates and the temporal mean of the
/// edge series. All three share the 1/(L-1) normalization, so
/// `mean_edge = r_plus - r_minus` holds as a summation identity.
#[derive(Debug, Clone)]
pub struct LeadLagStats {
    pub r_plus: Vec<f64>,
    pub r_minus: Vec<f64>,
    pub mean_edge: Vec<f64>,
}

/// Lagged cross-correlations `r̂(1)`, `r̂(-1)` and the temporal mean of a
/// lead-lag edge series produced from `x` over `c`.
pub fn temporal_stats(
    e: &DMatrix<f64>,
    x: &NodeTimeSeries,
    c: &OrientedComplex2,
) -> Result<LeadLagStats> {
    check_node_count(x, c, "temporal_stats")?;
    if e.nrows() != c.n_edges() {
        return Err(Error::DimensionMismatch {
            context: "temporal_stats",
            expected: c.n_edges(),
            actual: e.nrows(),
        });
    }
    let l = x.n_samples();
    if e.ncols() != l - 1 {
        return Err(Error::DimensionMismatch {
            context: "temporal_stats",
            expected: l - 1,
            actual: e.ncols(),
        });
    }
    let norm = (l - 1) as f64;
    let mut r_plus = Vec::with_capacity(c.n_edges());
    let mut r_minus = Vec::with_capacity(c.n_edges());
    let mut mean_edge = Vec::with_capacity(c.n_edges());
    for (row, edge) in c.edges().iter().enumerate() {
        let mut plus = 0.0;
        let mut minus = 0.0;
        for t in 1..l {
            plus += x.data[(edge.tail, t - 1)] * x.data[(edge.tip, t)];
            minus += x.data[(edge.tip, t - 1)] * x.data[(edge.tail, t)];
        }
        r_plus.push(plus / norm);
        r_minus.push(minus / norm);
        mean_edge.push(e.row(row).sum() / norm);
    }
    Ok(LeadLagStats {
        r_plus,
        r_minus,
        mean_edge,
    })
}

/// Determinant of the 3x3 matrix with the given columns, as a fixed-order
/// sum of the six signed monomials.
fn det3(col0: [f64; 3], col1: [f64; 3], col2: [f64; 3]) -> f64 {
    col0[0] * (col1[1] * col2[2] - col1[2] * col2[1])
        - col1[0] * (col0[1] * col2[2] - col0[2] * col2[1])
        + col2[0] * (col0[1] * col1[2] - col0[2] * col1[1])
}

/// Triangle lead-lag series: T×(L-2).
///
/// For the triangle (i,j,k) with i<j<k the entry at time t is the
/// determinant of the 3x3 matrix whose columns are the trajectories of
/// i, j, k over the rows t-2, t-1, t.
pub fn triangle_signal(x: &NodeTimeSeries, c: &OrientedComplex2) -> Result<DMatrix<f64>> {
    check_node_count(x, c, "triangle_signal")?;
    let l = x.n_samples();
    if l < 3 {
        return Err(Error::TooFewTimePoints { needed: 3, got: l });
    }
    let mut out = DMatrix::zeros(c.n_triangles(), l - 2);
    for (row, t) in c.triangles().iter().enumerate() {
        for time in 2..l {
            let grab = |v: usize| [x.data[(v, time - 2)], x.data[(v, time - 1)], x.data[(v, time)]];
            out[(row, time - 2)] = det3(grab(t.a), grab(t.b), grab(t.c));
        }
    }
    Ok(out)
}

/// Parity of the permutation sorting three distinct values ascending.
pub fn permutation_parity(v: [usize; 3]) -> i8 {
    let mut inversions = 0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            if v[i] > v[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Triangle series for an arbitrary vertex ordering: the canonical series of
/// the sorted triple times the permutation sign, so antisymmetry under
/// transpositions is exact by construction.
pub fn oriented_triangle_series(
    x: &NodeTimeSeries,
    vertices: [usize; 3],
) -> Result<Vec<f64>> {
    let l = x.n_samples();
    if l < 3 {
        return Err(Error::TooFewTimePoints { needed: 3, got: l });
    }
    for v in vertices {
        if v >= x.n_nodes() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n_vertices: x.n_nodes(),
            });
        }
    }
    let mut sorted = vertices;
    sorted.sort_unstable();
    if sorted[0] == sorted[1] || sorted[1] == sorted[2] {
        return Err(Error::InvalidInput(format!(
            "repeated vertex in triple {vertices:?}"
        )));
    }
    let sign = f64::from(permutation_parity(vertices));
    let mut out = Vec::with_capacity(l - 2);
    for time in 2..l {
        let grab = |v: usize| [x.data[(v, time - 2)], x.data[(v, time - 1)], x.data[(v, time)]];
        out.push(sign * det3(grab(sorted[0]), grab(sorted[1]), grab(sorted[2])));
    }
    Ok(out)
}

/// Skew-symmetric lead-lag matrix over all node pairs:
/// `M[i][j] = (1/2)·mean_t(x_i[t-1]·Δx_j[t] - x_j[t-1]·Δx_i[t])`.
pub fn leadlag_matrix(x: &NodeTimeSeries) -> Result<DMatrix<f64>> {
    let l = x.n_samples();
    if l < 2 {
        return Err(Error::TooFewTimePoints { needed: 2, got: l });
    }
    let n = x.n_nodes();
    let norm = (l - 1) as f64;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut acc = 0.0;
            for t in 1..l {
                acc += x.data[(i, t - 1)] * (x.data[(j, t)] - x.data[(j, t - 1)])
                    - x.data[(j, t - 1)] * (x.data[(i, t)] - x.data[(i, t - 1)]);
            }
            let value = 0.5 * acc / norm;
            m[(i, j)] = value;
            m[(j, i)] = -value;
        }
    }
    Ok(m)
}
