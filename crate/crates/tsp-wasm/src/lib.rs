//! Browser demo bindings: build a random geometric complex, decompose a
//! synthetic lead-lag edge signal, and explore simplicial filters.
//!
//! Every export takes and returns JSON strings so the page stays a thin
//! renderer and the same functions are testable on the host. Errors come
//! back as `{"error": "..."}` rather than trapping.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::wasm_bindgen;

use tsp_core::complex::{threshold_binarize, OrientedComplex2, WeightedAdjacency};
use tsp_core::error::Result;
use tsp_core::filter::{apply_spatial, apply_spectral, frequency_response, FilterSpec};
use tsp_core::hodge::{betti, laplacians, spectrum, HodgeSpectrum, SubspaceKind};
use tsp_core::leadlag::{edge_signal, NodeTimeSeries};
use tsp_core::signal::{curl_energy_fraction, decompose_series, divergence, hodge_decompose};

#[derive(Serialize, Deserialize)]
struct ComplexDoc {
    n_vertices: usize,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
}

impl ComplexDoc {
    fn from_complex(c: &OrientedComplex2) -> Self {
        Self {
            n_vertices: c.n_vertices(),
            edges: c.edges().iter().map(|e| [e.tail, e.tip]).collect(),
            triangles: c.triangles().iter().map(|t| [t.a, t.b, t.c]).collect(),
        }
    }

    fn to_complex(&self) -> Result<OrientedComplex2> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        OrientedComplex2::with_triangles(self.n_vertices, &edges, &self.triangles)
    }
}

#[derive(Serialize)]
struct EigvalEntry {
    kind: SubspaceKind,
    value: f64,
}

#[derive(Serialize)]
struct BuildResponse {
    complex: ComplexDoc,
    positions: Vec<[f64; 2]>,
    beta0: usize,
    beta1: usize,
    n_harm: usize,
    n_down: usize,
    n_up: usize,
    eigenvalues: Vec<EigvalEntry>,
}

fn json_or_error<T: Serialize>(r: std::result::Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| format!("{{\"error\":{:?}}}", e.to_string())),
        Err(msg) => serde_json::to_string(&serde_json::json!({ "error": msg }))
            .unwrap_or_else(|_| "{\"error\":\"unknown\"}".to_string()),
    }
}

fn spectrum_for(c: &OrientedComplex2) -> Result<(tsp_core::complex::BoundaryPair, tsp_core::hodge::HodgeLaplacians, HodgeSpectrum)> {
    let b = c.boundaries()?;
    let h = laplacians(&b);
    let s = spectrum(&h, &b, None)?;
    Ok((b, h, s))
}

/// Random geometric complex: seeded points in the unit square, Gaussian
/// distance weights, percentile threshold, 3-cliques filled. Returns the
/// complex, point positions, Betti numbers and the labeled spectrum.
#[wasm_bindgen]
pub fn build_complex(n_points: u32, percentile: f64, seed: u32) -> String {
    json_or_error(build_complex_impl(n_points, percentile, seed).map_err(|e| e.to_string()))
}

fn build_complex_impl(n_points: u32, percentile: f64, seed: u32) -> Result<BuildResponse> {
    let n = (n_points.clamp(3, 80)) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(u64::from(seed));
    let positions: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();

    // Gaussian kernel on pairwise distances; sigma tracks typical spacing so
    // density stays usable across point counts.
    let sigma = 0.8 / (n as f64).sqrt();
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = positions[i][0] - positions[j][0];
            let dy = positions[i][1] - positions[j][1];
            let d2 = dx * dx + dy * dy;
            let weight = (-d2 / (2.0 * sigma * sigma)).exp();
            w[(i, j)] = weight;
            w[(j, i)] = weight;
        }
    }
    let adjacency = WeightedAdjacency::new(w)?;
    let pairs = threshold_binarize(&adjacency, percentile.clamp(0.0, 100.0))?;
    let complex = OrientedComplex2::build_from_edges(n, &pairs)?.clique_complex();
    let (_, h, s) = spectrum_for(&complex)?;
    let betti_numbers = betti(&h, &s)?;

    let eigenvalues = s
        .labels()
        .into_iter()
        .map(|(kind, value)| EigvalEntry { kind, value })
        .collect();
    Ok(BuildResponse {
        complex: ComplexDoc::from_complex(&complex),
        positions,
        beta0: betti_numbers.beta0,
        beta1: betti_numbers.beta1,
        n_harm: s.n_harm(),
        n_down: s.n_down(),
        n_up: s.n_up(),
        eigenvalues,
    })
}

#[derive(Serialize)]
struct DecomposeResponse {
    mean_edge: Vec<f64>,
    down: Vec<f64>,
    up: Vec<f64>,
    harm: Vec<f64>,
    divergence: Vec<f64>,
    curl: Vec<f64>,
    curl_energy_fraction: f64,
    energy_down: f64,
    energy_up: f64,
    energy_harm: f64,
    coupled_edges: Vec<usize>,
}

/// Synthesizes coupled node time series on the complex, computes the
/// lead-lag edge signal, and splits its temporal mean into gradient, curl
/// and harmonic parts. `coupling` in [0, 1) sets the lag-1 strength on a
/// seeded third of the edges.
#[wasm_bindgen]
pub fn leadlag_decompose(complex_json: &str, coupling: f64, seed: u32) -> String {
    json_or_error(leadlag_decompose_impl(complex_json, coupling, seed))
}

fn leadlag_decompose_impl(
    complex_json: &str,
    coupling: f64,
    seed: u32,
) -> std::result::Result<DecomposeResponse, String> {
    let doc: ComplexDoc = serde_json::from_str(complex_json).map_err(|e| e.to_string())?;
    let c = doc.to_complex().map_err(|e| e.to_string())?;
    if c.n_edges() == 0 {
        return Err("complex has no edges".to_string());
    }
    let coupling = coupling.clamp(0.0, 0.99);
    let mut rng = ChaCha8Rng::seed_from_u64(u64::from(seed) ^ 0xD1CE);
    let n = c.n_vertices();
    let l = 400;
    let mut data = DMatrix::zeros(n, l);
    for i in 0..n {
        for t in 0..l {
            data[(i, t)] = normal(&mut rng);
        }
    }
    // Plant lag-1 coupling along a seeded subset of edges; direction is
    // random so flows run both with and against the orientation.
    let mut coupled = Vec::new();
    if coupling > 0.0 {
        let residual = (1.0 - coupling * coupling).sqrt();
        for (idx, e) in c.edges().iter().enumerate() {
            if rng.gen::<f64>() < 1.0 / 3.0 {
                let (src, dst) = if rng.gen::<bool>() { (e.tail, e.tip) } else { (e.tip, e.tail) };
                for t in 1..l {
                    data[(dst, t)] = coupling * data[(src, t - 1)] + residual * data[(dst, t)];
                }
                coupled.push(idx);
            }
        }
    }
    let x = NodeTimeSeries::new(data).zscore();
    let series = edge_signal(&x, &c).map_err(|e| e.to_string())?;
    let (b, _, s) = spectrum_for(&c).map_err(|e| e.to_string())?;

    let cols = series.ncols() as f64;
    let mean_edge = DVector::from_fn(series.nrows(), |i, _| series.row(i).sum() / cols);
    let comps = hodge_decompose(&s, &mean_edge).map_err(|e| e.to_string())?;
    let div = divergence(&b.b1, &mean_edge).map_err(|e| e.to_string())?;
    let curl = b.b2.apply_transpose(&mean_edge);

    let (down_block, up_block, harm_block) = decompose_series(&s, &series).map_err(|e| e.to_string())?;
    let energy = |m: &DMatrix<f64>| m.iter().map(|v| v * v).sum::<f64>();
    let p_k = curl_energy_fraction(&down_block, &up_block).map_err(|e| e.to_string())?;

    Ok(DecomposeResponse {
        mean_edge: mean_edge.iter().copied().collect(),
        down: comps.down.iter().copied().collect(),
        up: comps.up.iter().copied().collect(),
        harm: comps.harm.iter().copied().collect(),
        divergence: div.iter().copied().collect(),
        curl: curl.iter().copied().collect(),
        curl_energy_fraction: p_k,
        energy_down: energy(&down_block),
        energy_up: energy(&up_block),
        energy_harm: energy(&harm_block),
        coupled_edges: coupled,
    })
}

#[derive(Serialize)]
struct ResponsePoint {
    kind: SubspaceKind,
    lambda: f64,
    response: f64,
}

#[derive(Serialize)]
struct FilterResponse {
    input: Vec<f64>,
    output: Vec<f64>,
    spatial_deviation: f64,
    response: Vec<ResponsePoint>,
}

/// Applies a filter `{h_harm, alphas, betas}` to an edge signal (spectral
/// path) and samples the frequency response at every present frequency. The
/// spatial path is evaluated too and the maximum deviation reported.
#[wasm_bindgen]
pub fn filter_signal(complex_json: &str, filter_json: &str, signal_json: &str) -> String {
    json_or_error(filter_signal_impl(complex_json, filter_json, signal_json))
}

fn filter_signal_impl(
    complex_json: &str,
    filter_json: &str,
    signal_json: &str,
) -> std::result::Result<FilterResponse, String> {
    let doc: ComplexDoc = serde_json::from_str(complex_json).map_err(|e| e.to_string())?;
    let c = doc.to_complex().map_err(|e| e.to_string())?;
    let spec: FilterSpec = serde_json::from_str(filter_json).map_err(|e| e.to_string())?;
    let values: Vec<f64> = serde_json::from_str(signal_json).map_err(|e| e.to_string())?;
    if values.len() != c.n_edges() {
        return Err(format!(
            "signal has {} entries for a complex with {} edges",
            values.len(),
            c.n_edges()
        ));
    }
    let e = DVector::from_vec(values.clone());
    let (_, h, s) = spectrum_for(&c).map_err(|e| e.to_string())?;
    let output = apply_spectral(&spec, &s, &e).map_err(|e| e.to_string())?;
    let spatial = apply_spatial(&spec, &h, &e).map_err(|e| e.to_string())?;
    let spatial_deviation = (&output - &spatial).norm();

    let response = s
        .labels()
        .into_iter()
        .map(|(kind, lambda)| {
            let r = frequency_response(&spec, lambda, kind).unwrap_or(f64::NAN);
            ResponsePoint { kind, lambda, response: r }
        })
        .collect();

    Ok(FilterResponse {
        input: values,
        output: output.iter().copied().collect(),
        spatial_deviation,
        response,
    })
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
