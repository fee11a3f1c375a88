//! Shared helpers for integration tests: random complex corpus, independent
//! rank/component oracles, normal sampling, KS distance, and the synthetic
//! cohort generator.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tsp_core::complex::OrientedComplex2;
use tsp_core::io;
use tsp_core::leadlag::NodeTimeSeries;

/// Random clique complex with N in [5, 30] and edge density in [0.1, 0.9].
pub fn random_clique_complex(rng: &mut ChaCha8Rng) -> OrientedComplex2 {
    let n = rng.gen_range(5..=30);
    let density = rng.gen_range(0.1..0.9);
    random_clique_complex_with(rng, n, density)
}

pub fn random_clique_complex_with(rng: &mut ChaCha8Rng, n: usize, density: f64) -> OrientedComplex2 {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < density {
                edges.push((i, j));
            }
        }
    }
    OrientedComplex2::build_from_edges(n, &edges)
        .expect("generated edges are valid")
        .clique_complex()
}

/// Matrix rank over GF(1_000_000_007); an oracle independent of the library
/// implementation (different prime, different code path).
pub fn rank_gf_oracle(m: &DMatrix<i64>) -> usize {
    const P: i128 = 1_000_000_007;
    let (nr, nc) = (m.nrows(), m.ncols());
    let mut a: Vec<i128> = Vec::with_capacity(nr * nc);
    for i in 0..nr {
        for j in 0..nc {
            a.push(((m[(i, j)] as i128) % P + P) % P);
        }
    }
    let mut rank = 0;
    let mut col = 0;
    while rank < nr && col < nc {
        let Some(pivot) = (rank..nr).find(|&i| a[i * nc + col] != 0) else {
            col += 1;
            continue;
        };
        for j in col..nc {
            a.swap(rank * nc + j, pivot * nc + j);
        }
        let inv = mod_pow(a[rank * nc + col], P - 2, P);
        for j in col..nc {
            a[rank * nc + j] = a[rank * nc + j] * inv % P;
        }
        for i in 0..nr {
            if i != rank && a[i * nc + col] != 0 {
                let f = a[i * nc + col];
                for j in col..nc {
                    a[i * nc + j] = ((a[i * nc + j] - f * a[rank * nc + j]) % P + P) % P;
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

fn mod_pow(mut base: i128, mut exp: i128, p: i128) -> i128 {
    let mut acc = 1i128;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Connected components by breadth-first search over the edge list.
pub fn components_oracle(c: &OrientedComplex2) -> usize {
    let n = c.n_vertices();
    let mut adj = vec![Vec::new(); n];
    for e in c.edges() {
        adj[e.tail].push(e.tip);
        adj[e.tip].push(e.tail);
    }
    let mut seen = vec![false; n];
    let mut components = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut queue = vec![start];
        seen[start] = true;
        while let Some(v) = queue.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
    }
    components
}

/// Standard normal draw via Box-Muller.
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_edge_signal(rng: &mut ChaCha8Rng, e: usize) -> DVector<f64> {
    DVector::from_fn(e, |_, _| rng.gen_range(-1.0..1.0))
}

/// Kolmogorov-Smirnov distance from the uniform distribution on [0, 1].
pub fn ks_distance_uniform(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &p) in samples.iter().enumerate() {
        let hi = (i as f64 + 1.0) / n - p;
        let lo = p - i as f64 / n;
        d = d.max(hi.abs()).max(lo.abs());
    }
    d
}

/// Synthetic cohort on 20 nodes whose complex is exactly the five planted
/// pairs. With `coupling` > 0 the tip of each planted edge follows its tail
/// at lag one; with 0 all nodes are independent white noise.
pub struct Cohort {
    pub adjacency: PathBuf,
    pub subjects: Vec<PathBuf>,
    pub planted: Vec<(usize, usize)>,
}

pub const COHORT_NODES: usize = 20;
pub const PLANTED_EDGES: [(usize, usize); 5] = [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9)];

pub fn write_cohort(
    dir: &Path,
    seed: u64,
    n_subjects: usize,
    n_samples: usize,
    coupling: f64,
) -> Cohort {
    let n = COHORT_NODES;
    let mut adjacency = DMatrix::zeros(n, n);
    for &(i, j) in PLANTED_EDGES.iter() {
        adjacency[(i, j)] = 1.0;
        adjacency[(j, i)] = 1.0;
    }
    let adjacency_path = dir.join("adjacency.csv");
    let mut text = String::new();
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| adjacency[(i, j)].to_string()).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(&adjacency_path, text).expect("write adjacency");

    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut subjects = Vec::with_capacity(n_subjects);
    for s in 0..n_subjects {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(s as u64 + 1)));
        let mut data = DMatrix::zeros(n, n_samples);
        for i in 0..n {
            for t in 0..n_samples {
                data[(i, t)] = normal(&mut rng);
            }
        }
        if coupling > 0.0 {
            let residual = (1.0 - coupling * coupling).sqrt();
            for &(i, j) in PLANTED_EDGES.iter() {
                for t in 1..n_samples {
                    data[(j, t)] = coupling * data[(i, t - 1)] + residual * data[(j, t)];
                }
            }
        }
        let path = dir.join(format!("subject_{s:02}.csv"));
        io::write_node_series_csv(&path, &NodeTimeSeries::new(data), &labels).expect("write subject");
        subjects.push(path);
    }

    Cohort {
        adjacency: adjacency_path,
        subjects,
        planted: PLANTED_EDGES.to_vec(),
    }
}
