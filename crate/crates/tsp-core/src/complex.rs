//! Oriented 2-dimensional simplicial complexes.
//!
//! The orientation convention is fixed globally: every simplex is stored
//! with ascending vertex indices, so an edge points from its smaller vertex
//! (tail) to its larger one (tip), and a triangle (a,b,c) with a<b<c carries
//! the rotation a→b→c. Orientation is a sign convention, not a direction of
//! flow.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sparse::IncidenceMatrix;

/// Edge with `tail < tip`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedEdge {
    pub tail: usize,
    pub tip: usize,
}

impl OrientedEdge {
    /// Canonicalizes an unordered vertex pair; rejects self-loops.
    pub fn new(u: usize, v: usize) -> Result<Self> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(Self {
            tail: u.min(v),
            tip: u.max(v),
        })
    }

    pub fn label(&self) -> String {
        format!("{}-{}", self.tail, self.tip)
    }
}

/// Triangle with `a < b < c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedTriangle {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl OrientedTriangle {
    pub fn new(mut v: [usize; 3]) -> Result<Self> {
        v.sort_unstable();
        if v[0] == v[1] || v[1] == v[2] {
            return Err(Error::InvalidInput(format!(
                "invalid 2-simplex: repeated vertex in ({},{},{})",
                v[0], v[1], v[2]
            )));
        }
        Ok(Self {
            a: v[0],
            b: v[1],
            c: v[2],
        })
    }

    /// The three boundary edges, in lexicographic order.
    pub fn edges(&self) -> [OrientedEdge; 3] {
        [
            OrientedEdge { tail: self.a, tip: self.b },
            OrientedEdge { tail: self.a, tip: self.c },
            OrientedEdge { tail: self.b, tip: self.c },
        ]
    }
}

/// Oriented simplicial complex of order ≤ 2 with dense 0-based vertices.
///
/// Edges and triangles are sorted lexicographically; index maps give each
/// simplex its column in the corresponding boundary matrix. Immutable after
/// construction.
#[derive(Debug, Clone)]
pub struct OrientedComplex2 {
    n_vertices: usize,
    edges: Vec<OrientedEdge>,
    triangles: Vec<OrientedTriangle>,
    edge_index: HashMap<(usize, usize), usize>,
    tri_index: HashMap<(usize, usize, usize), usize>,
}

/// Integer boundary matrices of a complex: `b1` is vertices × edges and
/// `b2` is edges × triangles, with `b1 * b2 = 0` exactly.
#[derive(Debug, Clone)]
pub struct BoundaryPair {
    pub b1: IncidenceMatrix,
    pub b2: IncidenceMatrix,
}

impl OrientedComplex2 {
    /// Builds a 1-dimensional complex (a graph) from an edge list.
    ///
    /// Pairs are canonicalized to tail<tip, deduplicated and sorted; the
    /// result does not depend on input order.
    pub fn build_from_edges(n_vertices: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(u, v) in edge_list {
            for w in [u, v] {
                if w >= n_vertices {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        n_vertices,
                    });
                }
            }
            edges.push(OrientedEdge::new(u, v)?);
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_parts(n_vertices, edges, Vec::new()))
    }

    /// Rebuilds a complex from explicit simplex lists, validating closure.
    ///
    /// Conflicting duplicate triangles are rejected as malformed input.
    pub fn with_triangles(
        n_vertices: usize,
        edge_list: &[(usize, usize)],
        triangle_list: &[[usize; 3]],
    ) -> Result<Self> {
        let base = Self::build_from_edges(n_vertices, edge_list)?;
        let mut triangles = Vec::with_capacity(triangle_list.len());
        for &t in triangle_list {
            for w in t {
                if w >= n_vertices {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        n_vertices,
                    });
                }
            }
            triangles.push(OrientedTriangle::new(t)?);
        }
        triangles.sort_unstable();
        if let Some(w) = triangles.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateTriangle(w[0].a, w[0].b, w[0].c));
        }
        for t in &triangles {
            for e in t.edges() {
                if !base.edge_index.contains_key(&(e.tail, e.tip)) {
                    return Err(Error::ClosureViolation {
                        a: t.a,
                        b: t.b,
                        c: t.c,
                        i: e.tail,
                        j: e.tip,
                    });
                }
            }
        }
        Ok(Self::from_parts(n_vertices, base.edges, triangles))
    }

    fn from_parts(
        n_vertices: usize,
        edges: Vec<OrientedEdge>,
        triangles: Vec<OrientedTriangle>,
    ) -> Self {
        let edge_index = edges
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.tail, e.tip), i))
            .collect();
        let tri_index = triangles
            .iter()
            .enumerate()
            .map(|(i, t)| ((t.a, t.b, t.c), i))
            .collect();
        Self {
            n_vertices,
            edges,
            triangles,
            edge_index,
            tri_index,
        }
    }

    /// Fills every 3-clique of the edge set with a triangle.
    ///
    /// Vertices and edges are unchanged; the operation is idempotent.
    pub fn clique_complex(&self) -> Self {
        let mut neighbors = vec![Vec::new(); self.n_vertices];
        for e in &self.edges {
            neighbors[e.tail].push(e.tip);
            neighbors[e.tip].push(e.tail);
        }
        let adjacent = |u: usize, v: usize| self.edge_index.contains_key(&(u.min(v), u.max(v)));
        let mut triangles = Vec::new();
        for e in &self.edges {
            // Third vertex above the tip keeps each triangle enumerated once.
            for &c in &neighbors[e.tail] {
                if c > e.tip && adjacent(e.tip, c) {
                    triangles.push(OrientedTriangle {
                        a: e.tail,
                        b: e.tip,
                        c,
                    });
                }
            }
        }
        triangles.sort_unstable();
        Self::from_parts(self.n_vertices, self.edges.clone(), triangles)
    }

    /// Signed incidence matrices under the ascending-index convention.
    ///
    /// Each `b1` column holds -1 at the tail and +1 at the tip of its edge;
    /// each `b2` column holds the boundary signs (+1, -1, +1) of its triangle
    /// on the edges (a,b), (a,c), (b,c).
    pub fn boundaries(&self) -> Result<BoundaryPair> {
        let b1_cols: Vec<Vec<(usize, i8)>> = self
            .edges
            .iter()
            .map(|e| vec![(e.tail, -1), (e.tip, 1)])
            .collect();
        let b1 = IncidenceMatrix::from_columns(self.n_vertices, &b1_cols);

        let mut b2_cols = Vec::with_capacity(self.triangles.len());
        for t in &self.triangles {
            let signs = [1i8, -1, 1];
            let mut col = Vec::with_capacity(3);
            for (e, s) in t.edges().iter().zip(signs) {
                let Some(&idx) = self.edge_index.get(&(e.tail, e.tip)) else {
                    return Err(Error::ClosureViolation {
                        a: t.a,
                        b: t.b,
                        c: t.c,
                        i: e.tail,
                        j: e.tip,
                    });
                };
                col.push((idx, s));
            }
            col.sort_unstable_by_key(|&(r, _)| r);
            b2_cols.push(col);
        }
        let b2 = IncidenceMatrix::from_columns(self.edges.len(), &b2_cols);
        Ok(BoundaryPair { b1, b2 })
    }

    /// Line-graph adjacency: edges are nodes, adjacent when sharing a vertex.
    ///
    /// Baseline for node-centric processing of edge data; it captures only
    /// lower adjacencies and discards orientation.
    pub fn line_graph(&self) -> DMatrix<f64> {
        let e = self.edges.len();
        let mut adj = DMatrix::zeros(e, e);
        for i in 0..e {
            for j in (i + 1)..e {
                let (a, b) = (self.edges[i], self.edges[j]);
                let shares = a.tail == b.tail || a.tail == b.tip || a.tip == b.tail || a.tip == b.tip;
                if shares {
                    adj[(i, j)] = 1.0;
                    adj[(j, i)] = 1.0;
                }
            }
        }
        adj
    }

    /// Number of connected components (isolated vertices count).
    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n_vertices).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = x;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for e in &self.edges {
            let (ra, rb) = (find(&mut parent, e.tail), find(&mut parent, e.tip));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        (0..self.n_vertices)
            .filter(|&v| find(&mut parent, v) == v)
            .count()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    pub fn triangles(&self) -> &[OrientedTriangle] {
        &self.triangles
    }

    /// Column of the edge (u,v) in `b1`, if present.
    pub fn edge_position(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&(u.min(v), u.max(v))).copied()
    }

    /// Column of the triangle in `b2`, if present.
    pub fn triangle_position(&self, t: &OrientedTriangle) -> Option<usize> {
        self.tri_index.get(&(t.a, t.b, t.c)).copied()
    }
}

/// Symmetric non-negative weight matrix with zero diagonal.
#[derive(Debug, Clone)]
pub struct WeightedAdjacency {
    n: usize,
    w: DMatrix<f64>,
}

impl WeightedAdjacency {
    pub fn new(w: DMatrix<f64>) -> Result<Self> {
        if w.nrows() != w.ncols() {
            return Err(Error::InvalidAdjacency(format!(
                "matrix is {}x{}, expected square",
                w.nrows(),
                w.ncols()
            )));
        }
        let n = w.nrows();
        for i in 0..n {
            if w[(i, i)] != 0.0 {
                return Err(Error::InvalidAdjacency(format!(
                    "nonzero diagonal at ({i},{i})"
                )));
            }
            for j in (i + 1)..n {
                if w[(i, j)] != w[(j, i)] {
                    return Err(Error::InvalidAdjacency(format!(
                        "asymmetric entries at ({i},{j})"
                    )));
                }
                if w[(i, j)] < 0.0 || !w[(i, j)].is_finite() {
                    return Err(Error::InvalidAdjacency(format!(
                        "invalid weight {} at ({i},{j})",
                        w[(i, j)]
                    )));
                }
            }
        }
        Ok(Self { n, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.w
    }
}

/// Retains the vertex pairs whose weight reaches the given percentile of the
/// strictly positive upper-triangular weights (inclusive cut, zeros excluded).
///
/// `percentile` 0 keeps every positive pair; 100 keeps only maximal-weight
/// ties. Output is sorted and deduplicated by construction.
pub fn threshold_binarize(w: &WeightedAdjacency, percentile: f64) -> Result<Vec<(usize, usize)>> {
    if !(0.0..=100.0).contains(&percentile) {
        return Err(Error::InvalidInput(format!(
            "percentile must lie in [0, 100], got {percentile}"
        )));
    }
    let mut positive = Vec::new();
    for i in 0..w.n {
        for j in (i + 1)..w.n {
            if w.w[(i, j)] > 0.0 {
                positive.push(w.w[(i, j)]);
            }
        }
    }
    if positive.is_empty() {
        return Err(Error::EmptyConnectome);
    }
    positive.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cut = percentile_linear(&positive, percentile);
    let mut pairs = Vec::new();
    for i in 0..w.n {
        for j in (i + 1)..w.n {
            if w.w[(i, j)] > 0.0 && w.w[(i, j)] >= cut {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}

/// Linear-interpolation percentile of sorted values.
fn percentile_linear(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = p / 100.0 * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = rank - lo as f64;
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}
