//! Simplicial convolutional filters: a harmonic offset plus polynomials in
//! the lower and upper Hodge Laplacians.
//!
//! `h(L1) = h_harm·I + Σ_m α_m·L1↓^m + Σ_n β_n·L1↑^n`, applied either
//! spatially (iterated shift-and-sum) or spectrally (pointwise multiplication
//! of Fourier coefficients by the frequency response).

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hodge::{HodgeLaplacians, HodgeSpectrum, SubspaceKind};
use crate::signal::{itft, tft};

/// Filter coefficients. Polynomial indexing starts at power 1; the constant
/// term is exclusively `h_harm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub h_harm: f64,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub betas: Vec<f64>,
}

impl FilterSpec {
    pub fn identity() -> Self {
        Self {
            h_harm: 1.0,
            alphas: Vec::new(),
            betas: Vec::new(),
        }
    }
}

/// Norm growth beyond this factor of the input triggers a warning: high
/// polynomial degrees on large spectra are better evaluated spectrally.
const NORM_GROWTH_WARN: f64 = 1e12;

/// Applies the filter by iterated matrix-vector products, never forming
/// matrix powers.
pub fn apply_spatial(f: &FilterSpec, h: &HodgeLaplacians, e: &DVector<f64>) -> Result<DVector<f64>> {
    if e.len() != h.n_edges() {
        return Err(Error::DimensionMismatch {
            context: "apply_spatial",
            expected: h.n_edges(),
            actual: e.len(),
        });
    }
    let input_norm = e.norm();
    let mut out = f.h_harm * e;
    for (laplacian, coeffs) in [(&h.l1_down, &f.alphas), (&h.l1_up, &f.betas)] {
        let mut power = e.clone();
        for &coeff in coeffs.iter() {
            power = laplacian * power;
            if input_norm > 0.0 && power.norm() > NORM_GROWTH_WARN * input_norm {
                log::warn!(
                    "spatial filter intermediate grew to {:e}x the input norm; prefer the spectral path",
                    power.norm() / input_norm
                );
            }
            out += coeff * &power;
        }
    }
    Ok(out)
}

/// Frequency response at `lambda` for the given subspace.
pub fn frequency_response(f: &FilterSpec, lambda: f64, kind: SubspaceKind) -> Result<f64> {
    match kind {
        SubspaceKind::Harmonic => {
            if lambda > 0.0 {
                return Err(Error::HarmonicNonzeroFrequency(lambda));
            }
            Ok(f.h_harm)
        }
        SubspaceKind::Gradient => Ok(f.h_harm + poly_eval(&f.alphas, lambda)),
        SubspaceKind::Curl => Ok(f.h_harm + poly_eval(&f.betas, lambda)),
    }
}

/// Horner evaluation of `Σ_k c_k·λ^k` with powers starting at 1.
fn poly_eval(coeffs: &[f64], lambda: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * lambda + c;
    }
    acc * lambda
}

/// Applies the filter spectrally: transform, scale each coefficient by the
/// response at its frequency, transform back.
pub fn apply_spectral(f: &FilterSpec, s: &HodgeSpectrum, e: &DVector<f64>) -> Result<DVector<f64>> {
    let mut t = tft(s, e)?;
    for (i, &(kind, lambda)) in t.labels.iter().enumerate() {
        let response = match kind {
            SubspaceKind::Harmonic => f.h_harm,
            _ => frequency_response(f, lambda, kind)?,
        };
        t.coeffs[i] *= response;
    }
    itft(s, &t)
}
