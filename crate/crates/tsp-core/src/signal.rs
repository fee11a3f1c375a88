//! Edge-signal calculus: divergence, curl, Hodge decomposition and the
//! Fourier transform over the edge-space eigenbasis.
//!
//! Edge signals are vectors of length E under the tail<tip convention: a
//! positive entry is a flow from the smaller to the larger vertex index.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hodge::{HodgeSpectrum, SubspaceKind};
use crate::sparse::IncidenceMatrix;

/// Net flow at each node: `B1 · e`. Positive entries are sinks, negative
/// entries sources.
pub fn divergence(b1: &IncidenceMatrix, e: &DVector<f64>) -> Result<DVector<f64>> {
    if e.len() != b1.ncols() {
        return Err(Error::DimensionMismatch {
            context: "divergence",
            expected: b1.ncols(),
            actual: e.len(),
        });
    }
    Ok(b1.apply(e))
}

/// Signed circulation around each triangle: `B2ᵀ · e`.
pub fn curl(b2: &IncidenceMatrix, e: &DVector<f64>) -> Result<DVector<f64>> {
    if e.len() != b2.nrows() {
        return Err(Error::DimensionMismatch {
            context: "curl",
            expected: b2.nrows(),
            actual: e.len(),
        });
    }
    Ok(b2.apply_transpose(e))
}

/// Orthogonal components of an edge signal.
#[derive(Debug, Clone)]
pub struct HodgeComponents {
    pub down: DVector<f64>,
    pub up: DVector<f64>,
    pub harm: DVector<f64>,
}

fn check_edge_dim(s: &HodgeSpectrum, len: usize, context: &'static str) -> Result<()> {
    if len != s.n_edges() {
        return Err(Error::DimensionMismatch {
            context,
            expected: s.n_edges(),
            actual: len,
        });
    }
    Ok(())
}

fn project(block: &DMatrix<f64>, e: &DVector<f64>) -> DVector<f64> {
    if block.ncols() == 0 {
        return DVector::zeros(e.len());
    }
    block * (block.transpose() * e)
}

/// Splits an edge signal into gradient, curl and harmonic components by
/// projection onto the spectral basis blocks.
pub fn hodge_decompose(s: &HodgeSpectrum, e: &DVector<f64>) -> Result<HodgeComponents> {
    check_edge_dim(s, e.len(), "hodge_decompose")?;
    Ok(HodgeComponents {
        down: project(&s.grad_vecs, e),
        up: project(&s.curl_vecs, e),
        harm: project(&s.harm_vecs, e),
    })
}

/// Column-wise decomposition of an E×L time-series matrix into the three
/// component blocks `(down, up, harm)`.
pub fn decompose_series(
    s: &HodgeSpectrum,
    series: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    check_edge_dim(s, series.nrows(), "decompose_series")?;
    let down = if s.n_down() == 0 {
        DMatrix::zeros(series.nrows(), series.ncols())
    } else {
        &s.grad_vecs * (s.grad_vecs.transpose() * series)
    };
    let up = if s.n_up() == 0 {
        DMatrix::zeros(series.nrows(), series.ncols())
    } else {
        &s.curl_vecs * (s.curl_vecs.transpose() * series)
    };
    let harm = if s.n_harm() == 0 {
        DMatrix::zeros(series.nrows(), series.ncols())
    } else {
        &s.harm_vecs * (s.harm_vecs.transpose() * series)
    };
    Ok((down, up, harm))
}

/// Fraction of non-harmonic energy lying in the curl block:
/// `‖up‖²_F / (‖down‖²_F + ‖up‖²_F)`.
pub fn curl_energy_fraction(down: &DMatrix<f64>, up: &DMatrix<f64>) -> Result<f64> {
    let d = down.iter().map(|v| v * v).sum::<f64>();
    let u = up.iter().map(|v| v * v).sum::<f64>();
    if d + u == 0.0 {
        return Err(Error::DegenerateSignal);
    }
    Ok(u / (d + u))
}

/// Fourier coefficients of an edge signal, labeled by subspace and
/// frequency in basis order (harmonic, gradient, curl).
#[derive(Debug, Clone)]
pub struct TftCoefficients {
    pub labels: Vec<(SubspaceKind, f64)>,
    pub coeffs: DVector<f64>,
}

/// Projects an edge signal onto the spectral basis: `x̃ = Uᵀ·x`.
pub fn tft(s: &HodgeSpectrum, e: &DVector<f64>) -> Result<TftCoefficients> {
    check_edge_dim(s, e.len(), "tft")?;
    let mut coeffs = DVector::zeros(s.n_edges());
    let mut idx = 0;
    for block in [&s.harm_vecs, &s.grad_vecs, &s.curl_vecs] {
        for j in 0..block.ncols() {
            coeffs[idx] = block.column(j).dot(e);
            idx += 1;
        }
    }
    Ok(TftCoefficients {
        labels: s.labels(),
        coeffs,
    })
}

/// Reconstructs the edge signal from its Fourier coefficients: `x = U·x̃`.
pub fn itft(s: &HodgeSpectrum, coeffs: &TftCoefficients) -> Result<DVector<f64>> {
    if coeffs.coeffs.len() != s.n_edges() {
        return Err(Error::DimensionMismatch {
            context: "itft",
            expected: s.n_edges(),
            actual: coeffs.coeffs.len(),
        });
    }
    let mut out = DVector::zeros(s.n_edges());
    let mut idx = 0;
    for block in [&s.harm_vecs, &s.grad_vecs, &s.curl_vecs] {
        for j in 0..block.ncols() {
            out += coeffs.coeffs[idx] * DVector::from_column_slice(block.column(j).as_slice());
            idx += 1;
        }
    }
    Ok(out)
}
