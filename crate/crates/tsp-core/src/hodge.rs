//! Hodge Laplacians and their spectral decomposition.
//!
//! For an oriented complex of order 2 the edge space splits into three
//! mutually orthogonal subspaces: gradient (image of B1ᵀ), curl (image of
//! B2) and harmonic (kernel of L1). The spectrum is assembled from the
//! eigenvectors of the lower and upper Laplacians plus an orthonormal basis
//! of the kernel, with dimensions cross-checked against integer ranks.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::complex::BoundaryPair;
use crate::error::{Error, Result};
use crate::sparse::IncidenceMatrix;

/// The five Laplacians of an order-2 complex, computed exactly from integer
/// boundary products.
#[derive(Debug, Clone)]
pub struct HodgeLaplacians {
    pub l0: DMatrix<f64>,
    pub l1_down: DMatrix<f64>,
    pub l1_up: DMatrix<f64>,
    pub l1: DMatrix<f64>,
    pub l2: DMatrix<f64>,
}

impl HodgeLaplacians {
    pub fn n_vertices(&self) -> usize {
        self.l0.nrows()
    }

    pub fn n_edges(&self) -> usize {
        self.l1.nrows()
    }

    pub fn n_triangles(&self) -> usize {
        self.l2.nrows()
    }
}

/// `L0 = B1·B1ᵀ`, `L1 = B1ᵀ·B1 + B2·B2ᵀ`, `L2 = B2ᵀ·B2`.
pub fn laplacians(b: &BoundaryPair) -> HodgeLaplacians {
    let l0_i = b.b1.gram_up();
    let down_i = b.b1.gram_down();
    let up_i = b.b2.gram_up();
    let l1_i = &down_i + &up_i;
    let l2_i = b.b2.gram_down();
    HodgeLaplacians {
        l0: l0_i.map(|v| v as f64),
        l1_down: down_i.map(|v| v as f64),
        l1_up: up_i.map(|v| v as f64),
        l1: l1_i.map(|v| v as f64),
        l2: l2_i.map(|v| v as f64),
    }
}

/// Subspace label of an edge-space frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceKind {
    Harmonic,
    Gradient,
    Curl,
}

impl std::fmt::Display for SubspaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubspaceKind::Harmonic => write!(f, "harmonic"),
            SubspaceKind::Gradient => write!(f, "gradient"),
            SubspaceKind::Curl => write!(f, "curl"),
        }
    }
}

/// Orthonormal eigenbasis of the edge space, partitioned by subspace.
///
/// Eigenvalues are ascending within each block. Every column has its
/// largest-magnitude entry made positive so outputs are reproducible;
/// individual eigenvectors inside a repeated eigenvalue remain
/// basis-dependent and are flagged in `warnings`.
#[derive(Debug, Clone)]
pub struct HodgeSpectrum {
    pub zero_tol: f64,
    pub grad_eigvals: Vec<f64>,
    pub grad_vecs: DMatrix<f64>,
    pub curl_eigvals: Vec<f64>,
    pub curl_vecs: DMatrix<f64>,
    pub harm_vecs: DMatrix<f64>,
    /// Connected components of the 1-skeleton (kernel dimension of L0).
    pub components: usize,
    pub warnings: Vec<String>,
}

impl HodgeSpectrum {
    pub fn n_down(&self) -> usize {
        self.grad_eigvals.len()
    }

    pub fn n_up(&self) -> usize {
        self.curl_eigvals.len()
    }

    pub fn n_harm(&self) -> usize {
        self.harm_vecs.ncols()
    }

    pub fn n_edges(&self) -> usize {
        self.harm_vecs.nrows()
    }

    /// Frequency labels in basis order: harmonic block, then gradient, then
    /// curl.
    pub fn labels(&self) -> Vec<(SubspaceKind, f64)> {
        let mut out = Vec::with_capacity(self.n_edges());
        out.extend(std::iter::repeat_n((SubspaceKind::Harmonic, 0.0), self.n_harm()));
        out.extend(self.grad_eigvals.iter().map(|&l| (SubspaceKind::Gradient, l)));
        out.extend(self.curl_eigvals.iter().map(|&l| (SubspaceKind::Curl, l)));
        out
    }

    /// Full E×E orthogonal basis `[harmonic | gradient | curl]`.
    pub fn basis(&self) -> DMatrix<f64> {
        let e = self.n_edges();
        let mut u = DMatrix::zeros(e, e);
        let mut col = 0;
        for block in [&self.harm_vecs, &self.grad_vecs, &self.curl_vecs] {
            for j in 0..block.ncols() {
                u.set_column(col, &block.column(j));
                col += 1;
            }
        }
        u
    }
}

/// Zeroth and first Betti numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiNumbers {
    pub beta0: usize,
    pub beta1: usize,
}

fn symmetric_eig_ascending(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Makes the largest-magnitude entry of each column positive (first index
/// wins ties).
fn fix_signs(m: &mut DMatrix<f64>) {
    for j in 0..m.ncols() {
        let mut best = 0;
        let mut best_abs = 0.0;
        for (i, v) in m.column(j).iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        if m[(best, j)] < 0.0 {
            m.column_mut(j).neg_mut();
        }
    }
}

fn components_from_b1(b1: &IncidenceMatrix) -> usize {
    let n = b1.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
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
    for j in 0..b1.ncols() {
        let rows: Vec<usize> = b1.col(j).map(|(r, _)| r).collect();
        if let [a, b] = rows[..] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    (0..n).filter(|&v| find(&mut parent, v) == v).count()
}

fn degeneracy_warnings(kind: SubspaceKind, vals: &[f64], warnings: &mut Vec<String>) {
    let mut i = 0;
    while i < vals.len() {
        let mut j = i + 1;
        while j < vals.len() && (vals[j] - vals[i]).abs() <= 1e-9 * vals[i].abs().max(1.0) {
            j += 1;
        }
        if j - i > 1 {
            warnings.push(format!(
                "{kind} eigenvalue {:.12} has multiplicity {}; eigenvectors within the block are basis-dependent",
                vals[i],
                j - i
            ));
        }
        i = j;
    }
}

/// Budget for the exact GF(p) rank cross-check of B2.
const RANK_WORK_BUDGET: usize = 200_000_000;

/// Spectral decomposition of the edge space.
///
/// `zero_tol` separates kernel from non-kernel eigenvalues; `None` uses
/// `E · ε · λ_max(L1)`. Classification is double-checked: the gradient count
/// must equal `N - components` (an exact integer rank), the curl count is
/// compared against the GF(p) rank of B2 when affordable, and the kernel of
/// L1 must account for exactly the remaining dimensions.
pub fn spectrum(h: &HodgeLaplacians, b: &BoundaryPair, zero_tol: Option<f64>) -> Result<HodgeSpectrum> {
    let e = h.n_edges();
    let (l1_vals, l1_vecs) = symmetric_eig_ascending(&h.l1);
    let lambda_max = l1_vals.last().copied().unwrap_or(0.0).max(0.0);
    let tol = zero_tol.unwrap_or(e as f64 * f64::EPSILON * lambda_max);

    let (down_vals, down_vecs) = symmetric_eig_ascending(&h.l1_down);
    let (up_vals, up_vecs) = symmetric_eig_ascending(&h.l1_up);

    let first_grad = down_vals.partition_point(|&l| l <= tol);
    let grad_eigvals: Vec<f64> = down_vals[first_grad..].to_vec();
    let mut grad_vecs = down_vecs.columns(first_grad, e - first_grad).into_owned();

    let first_curl = up_vals.partition_point(|&l| l <= tol);
    let curl_eigvals: Vec<f64> = up_vals[first_curl..].to_vec();
    let mut curl_vecs = up_vecs.columns(first_curl, e - first_curl).into_owned();

    let n_down = grad_eigvals.len();
    let n_up = curl_eigvals.len();
    if n_down + n_up > e {
        return Err(Error::ToleranceMisclassification(format!(
            "gradient ({n_down}) + curl ({n_up}) dimensions exceed edge count {e} at tolerance {tol:e}"
        )));
    }

    let components = components_from_b1(&b.b1);
    let rank_b1 = h.n_vertices() - components;
    if n_down != rank_b1 {
        return Err(Error::ToleranceMisclassification(format!(
            "gradient dimension {n_down} does not match rank(B1) = {rank_b1} at tolerance {tol:e}"
        )));
    }
    if b.b2.rank_work_estimate() <= RANK_WORK_BUDGET {
        let rank_b2 = b.b2.rank_mod_p();
        if n_up != rank_b2 {
            return Err(Error::ToleranceMisclassification(format!(
                "curl dimension {n_up} does not match rank(B2) = {rank_b2} at tolerance {tol:e}"
            )));
        }
    }

    let n_harm = e - n_down - n_up;
    let kernel_dim = l1_vals.partition_point(|&l| l <= tol);
    if kernel_dim != n_harm {
        return Err(Error::ToleranceMisclassification(format!(
            "kernel of L1 has dimension {kernel_dim} but rank bookkeeping expects {n_harm}"
        )));
    }

    // Kernel vectors of L1, re-orthogonalized against the gradient and curl
    // blocks so the concatenated basis is orthonormal by construction.
    let mut harm_vecs = DMatrix::zeros(e, n_harm);
    for j in 0..kernel_dim {
        let mut v: DVector<f64> = l1_vecs.column(j).into_owned();
        for _ in 0..2 {
            for block in [&grad_vecs, &curl_vecs] {
                for col in block.column_iter() {
                    let proj = col.dot(&v);
                    v -= proj * DVector::from_column_slice(col.as_slice());
                }
            }
            for k in 0..j {
                let col = harm_vecs.column(k);
                let proj = col.dot(&v);
                v -= proj * DVector::from_column_slice(col.as_slice());
            }
        }
        let norm = v.norm();
        if norm < 1e-6 {
            return Err(Error::NumericalConsistency(format!(
                "harmonic candidate {j} collapsed during orthogonalization (residual norm {norm:e})"
            )));
        }
        harm_vecs.set_column(j, &(v / norm));
    }

    fix_signs(&mut grad_vecs);
    fix_signs(&mut curl_vecs);
    fix_signs(&mut harm_vecs);

    let mut warnings = Vec::new();
    degeneracy_warnings(SubspaceKind::Gradient, &grad_eigvals, &mut warnings);
    degeneracy_warnings(SubspaceKind::Curl, &curl_eigvals, &mut warnings);

    Ok(HodgeSpectrum {
        zero_tol: tol,
        grad_eigvals,
        grad_vecs,
        curl_eigvals,
        curl_vecs,
        harm_vecs,
        components,
        warnings,
    })
}

/// Betti numbers with double-entry verification against the kernels of L0
/// and L1.
pub fn betti(h: &HodgeLaplacians, s: &HodgeSpectrum) -> Result<BettiNumbers> {
    let n = h.n_vertices();
    let beta0 = n - s.n_down();
    let (l0_vals, _) = symmetric_eig_ascending(&h.l0);
    let tol0 = n as f64 * f64::EPSILON * l0_vals.last().copied().unwrap_or(0.0).max(1.0);
    let ker_l0 = l0_vals.partition_point(|&l| l <= tol0);
    if ker_l0 != beta0 {
        return Err(Error::NumericalConsistency(format!(
            "kernel of L0 has dimension {ker_l0} but rank bookkeeping gives beta0 = {beta0}"
        )));
    }
    if beta0 != s.components {
        return Err(Error::NumericalConsistency(format!(
            "beta0 = {beta0} does not match {} connected components",
            s.components
        )));
    }

    let beta1 = s.n_harm();
    let (l1_vals, _) = symmetric_eig_ascending(&h.l1);
    let ker_l1 = l1_vals.partition_point(|&l| l <= s.zero_tol);
    if ker_l1 != beta1 {
        return Err(Error::NumericalConsistency(format!(
            "kernel of L1 has dimension {ker_l1} but spectrum gives beta1 = {beta1}"
        )));
    }
    Ok(BettiNumbers { beta0, beta1 })
}

/// Maps a unit gradient eigenvector of the edge Laplacian to the node
/// eigenvector of L0 sharing the eigenvalue: `u0 = B1·u1 / sqrt(lambda)`.
pub fn lift_edge_to_node(
    b1: &IncidenceMatrix,
    u1: &DVector<f64>,
    lambda: f64,
    zero_tol: f64,
) -> Result<DVector<f64>> {
    if u1.len() != b1.ncols() {
        return Err(Error::DimensionMismatch {
            context: "lift_edge_to_node",
            expected: b1.ncols(),
            actual: u1.len(),
        });
    }
    if lambda <= zero_tol {
        return Err(Error::LiftKernelVector { lambda, zero_tol });
    }
    let u0 = b1.apply(u1) / lambda.sqrt();
    let norm = u0.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotGradientEigenpair { norm });
    }
    Ok(u0)
}

/// Quadratic form `xᵀ·L·x`; for a unit gradient eigenvector this equals its
/// eigenvalue and the squared divergence norm.
pub fn quadratic_variation(l: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    assert_eq!(l.ncols(), x.len(), "dimension mismatch in quadratic_variation");
    x.dot(&(l * x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::OrientedComplex2;

    fn filled_triangle() -> (HodgeLaplacians, BoundaryPair) {
        let c = OrientedComplex2::build_from_edges(3, &[(0, 1), (0, 2), (1, 2)])
            .unwrap()
            .clique_complex();
        let b = c.boundaries().unwrap();
        (laplacians(&b), b)
    }

    fn hollow_triangle() -> (HodgeLaplacians, BoundaryPair) {
        let c = OrientedComplex2::build_from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let b = c.boundaries().unwrap();
        (laplacians(&b), b)
    }

    #[test]
    fn l0_of_triangle_is_degree_minus_adjacency() {
        let (h, _) = filled_triangle();
        let expect = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        assert_eq!(h.l0, expect);
    }

    #[test]
    fn l1_of_filled_triangle_is_three_i() {
        let (h, _) = filled_triangle();
        assert_eq!(h.l1, DMatrix::from_diagonal_element(3, 3, 3.0));
        assert_eq!(h.l1, &h.l1_down + &h.l1_up);
    }

    #[test]
    fn no_triangles_means_zero_upper_laplacian() {
        let (h, _) = hollow_triangle();
        assert_eq!(h.l1_up, DMatrix::zeros(3, 3));
    }

    #[test]
    fn spectrum_of_filled_triangle() {
        let (h, b) = filled_triangle();
        let s = spectrum(&h, &b, None).unwrap();
        assert_eq!(s.n_down(), 2);
        assert_eq!(s.n_up(), 1);
        assert_eq!(s.n_harm(), 0);
        for l in &s.grad_eigvals {
            assert!((l - 3.0).abs() < 1e-12);
        }
        assert!((s.curl_eigvals[0] - 3.0).abs() < 1e-12);
        // Repeated gradient eigenvalue 3 is flagged.
        assert!(s.warnings.iter().any(|w| w.contains("multiplicity 2")));
    }

    #[test]
    fn spectrum_of_hollow_triangle_has_harmonic_mode() {
        let (h, b) = hollow_triangle();
        let s = spectrum(&h, &b, None).unwrap();
        assert_eq!(s.n_down(), 2);
        assert_eq!(s.n_up(), 0);
        assert_eq!(s.n_harm(), 1);
        let expect = DVector::from_vec(vec![1.0, -1.0, 1.0]) / 3.0f64.sqrt();
        let got = s.harm_vecs.column(0);
        for i in 0..3 {
            assert!((got[i] - expect[i]).abs() < 1e-12, "harmonic vector mismatch");
        }
    }

    #[test]
    fn spectrum_of_single_edge() {
        let c = OrientedComplex2::build_from_edges(2, &[(0, 1)]).unwrap();
        let b = c.boundaries().unwrap();
        let h = laplacians(&b);
        let s = spectrum(&h, &b, None).unwrap();
        assert_eq!(s.grad_eigvals, vec![2.0]);
        assert_eq!(s.n_harm(), 0);
    }

    #[test]
    fn absurd_tolerance_is_reported() {
        let (h, b) = filled_triangle();
        let err = spectrum(&h, &b, Some(100.0)).unwrap_err();
        assert!(matches!(err, Error::ToleranceMisclassification(_)));
    }

    #[test]
    fn betti_hollow_vs_filled() {
        let (h, b) = hollow_triangle();
        let s = spectrum(&h, &b, None).unwrap();
        assert_eq!(betti(&h, &s).unwrap(), BettiNumbers { beta0: 1, beta1: 1 });

        let (h, b) = filled_triangle();
        let s = spectrum(&h, &b, None).unwrap();
        assert_eq!(betti(&h, &s).unwrap(), BettiNumbers { beta0: 1, beta1: 0 });
    }

    #[test]
    fn betti_of_two_disjoint_filled_triangles() {
        let c = OrientedComplex2::build_from_edges(
            6,
            &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)],
        )
        .unwrap()
        .clique_complex();
        let b = c.boundaries().unwrap();
        let h = laplacians(&b);
        let s = spectrum(&h, &b, None).unwrap();
        assert_eq!(betti(&h, &s).unwrap(), BettiNumbers { beta0: 2, beta1: 0 });
    }

    #[test]
    fn lift_gradient_eigenvector() {
        let (h, b) = filled_triangle();
        let s = spectrum(&h, &b, None).unwrap();
        let u1: DVector<f64> = s.grad_vecs.column(0).into_owned();
        let lambda = s.grad_eigvals[0];
        let u0 = lift_edge_to_node(&b.b1, &u1, lambda, s.zero_tol).unwrap();
        let residual = (&h.l0 * &u0 - lambda * &u0).norm();
        assert!(residual < 1e-10, "residual {residual}");
    }

    #[test]
    fn lift_rejects_curl_eigenvector() {
        let (h, b) = filled_triangle();
        let s = spectrum(&h, &b, None).unwrap();
        let u1: DVector<f64> = s.curl_vecs.column(0).into_owned();
        let err = lift_edge_to_node(&b.b1, &u1, s.curl_eigvals[0], s.zero_tol).unwrap_err();
        assert!(matches!(err, Error::NotGradientEigenpair { .. }));
    }

    #[test]
    fn lift_rejects_kernel_eigenvalue() {
        let (_, b) = hollow_triangle();
        let u1 = DVector::from_vec(vec![1.0, -1.0, 1.0]) / 3.0f64.sqrt();
        let err = lift_edge_to_node(&b.b1, &u1, 0.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::LiftKernelVector { .. }));
    }

    #[test]
    fn lift_matches_direct_l0_eigenvectors_on_path() {
        // Oracle: brute-force eigensolve of L0 for the 3-node path.
        let c = OrientedComplex2::build_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let b = c.boundaries().unwrap();
        let h = laplacians(&b);
        let s = spectrum(&h, &b, None).unwrap();
        let (l0_vals, l0_vecs) = symmetric_eig_ascending(&h.l0);
        for (j, (&lambda, u1)) in s.grad_eigvals.iter().zip(s.grad_vecs.column_iter()).enumerate() {
            let u0 = lift_edge_to_node(&b.b1, &u1.into_owned(), lambda, s.zero_tol).unwrap();
            // Nonzero L0 eigenvalues start after its 1-dim kernel.
            let direct = l0_vecs.column(j + 1);
            assert!((l0_vals[j + 1] - lambda).abs() < 1e-12);
            let align = u0.dot(&direct.into_owned()).abs();
            assert!((align - 1.0).abs() < 1e-10, "alignment {align}");
        }
    }

    #[test]
    fn quadratic_variation_examples() {
        let (h, b) = hollow_triangle();
        let s = spectrum(&h, &b, None).unwrap();
        let harm: DVector<f64> = s.harm_vecs.column(0).into_owned();
        assert!(quadratic_variation(&h.l1, &harm).abs() < 1e-12);

        let (h, b) = filled_triangle();
        let s = spectrum(&h, &b, None).unwrap();
        let g: DVector<f64> = s.grad_vecs.column(0).into_owned();
        assert!((quadratic_variation(&h.l1, &g) - 3.0).abs() < 1e-12);
        assert!((quadratic_variation(&h.l1_down, &g) - 3.0).abs() < 1e-12);
        // Matches the squared divergence norm.
        let div = b.b1.apply(&g);
        assert!((quadratic_variation(&h.l1_down, &g) - div.norm_squared()).abs() < 1e-12);

        let zero = DVector::zeros(3);
        assert_eq!(quadratic_variation(&h.l1, &zero), 0.0);
    }

    #[test]
    fn basis_is_orthonormal_and_harmonics_annihilate_boundaries() {
        // Filled triangle plus a disjoint hollow square: all three blocks
        // are nonempty and beta1 = 1.
        let c = OrientedComplex2::build_from_edges(
            7,
            &[(0, 1), (0, 2), (1, 2), (3, 4), (4, 5), (5, 6), (3, 6)],
        )
        .unwrap()
        .clique_complex();
        let b = c.boundaries().unwrap();
        let h = laplacians(&b);
        let s = spectrum(&h, &b, None).unwrap();
        assert!(s.n_down() > 0 && s.n_up() > 0 && s.n_harm() > 0);

        let basis = s.basis();
        let gram = basis.transpose() * &basis;
        let eye = DMatrix::<f64>::identity(gram.nrows(), gram.ncols());
        let deviation = (gram - eye).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(deviation <= 1e-8, "Gram deviation {deviation}");

        for col in s.harm_vecs.column_iter() {
            let u: DVector<f64> = col.into_owned();
            assert!(b.b1.apply(&u).norm() <= 1e-8, "harmonic vector has divergence");
            assert!(b.b2.apply_transpose(&u).norm() <= 1e-8, "harmonic vector has curl");
        }
    }

    #[test]
    fn l0_and_l1_down_share_nonzero_spectra() {
        let c = OrientedComplex2::build_from_edges(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (1, 4)])
            .unwrap()
            .clique_complex();
        let b = c.boundaries().unwrap();
        let h = laplacians(&b);
        let (l0_vals, _) = symmetric_eig_ascending(&h.l0);
        let (down_vals, _) = symmetric_eig_ascending(&h.l1_down);
        let tol = 1e-9;
        let nz0: Vec<f64> = l0_vals.iter().copied().filter(|&l| l > tol).collect();
        let nz1: Vec<f64> = down_vals.iter().copied().filter(|&l| l > tol).collect();
        assert_eq!(nz0.len(), nz1.len());
        for (a, b) in nz0.iter().zip(&nz1) {
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0));
        }
    }
}
