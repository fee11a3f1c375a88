//! Group-level aggregation and nonparametric sign-flip testing.
//!
//! The sign-flip test draws, per permutation, an independent ±1 sign per
//! subject and compares the permuted mean against the observed one. Sampling
//! uses ChaCha8 with one stream per fixed-size chunk of permutations, so
//! results are identical for any worker count; an exhaustive enumeration
//! mode is available for small cohorts and doubles as the test oracle.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::complex::OrientedComplex2;
use crate::error::{Error, Result};
use crate::leadlag::permutation_parity;

/// Ordered group labels plus a per-node group index; the position in
/// `group_order` is the group's rank.
#[derive(Debug, Clone)]
pub struct GroupAssignment {
    pub group_order: Vec<String>,
    pub node_group: Vec<usize>,
}

impl GroupAssignment {
    /// Builds the assignment from per-node group names, validating that
    /// every name appears in the ordered group list.
    pub fn new(group_order: Vec<String>, node_labels: &[String]) -> Result<Self> {
        let mut node_group = Vec::with_capacity(node_labels.len());
        for label in node_labels {
            let Some(rank) = group_order.iter().position(|g| g == label) else {
                return Err(Error::UnknownGroup(label.clone()));
            };
            node_group.push(rank);
        }
        Ok(Self {
            group_order,
            node_group,
        })
    }

    pub fn n_groups(&self) -> usize {
        self.group_order.len()
    }
}

/// Outcome of a sign-flip test over an S×R subject panel.
#[derive(Debug, Clone)]
pub struct SignFlipResult {
    pub observed_mean: Vec<f64>,
    pub p_value: Vec<f64>,
    pub z_score: Vec<f64>,
    pub survives: Vec<bool>,
    pub n_permutations: usize,
    pub seed: u64,
    pub alpha: f64,
    /// Identifier of the randomization scheme, recorded for provenance.
    pub method: String,
}

/// Permutations per ChaCha8 stream; fixed so results do not depend on the
/// worker count.
const CHUNK: usize = 1024;

/// Sign-flip identifier recorded in reports.
pub const SIGN_FLIP_METHOD: &str = "sign-flip/chacha8/stream-per-1024-chunk";

struct ChunkAccumulator {
    count_ge: Vec<u64>,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
}

/// Two-sided sampled sign-flip test on per-item means.
///
/// `p = (1 + #{|mean_perm| >= |mean_obs|}) / (1 + n_perm)`,
/// `z = (mean_obs - mean(null)) / std(null)` with the sample standard
/// deviation, and the Bonferroni mask uses divisor R (the item count).
pub fn sign_flip_test(
    panel: &DMatrix<f64>,
    n_perm: usize,
    alpha: f64,
    seed: u64,
) -> Result<SignFlipResult> {
    let s = panel.nrows();
    let r = panel.ncols();
    if s < 2 {
        return Err(Error::TooFewSubjects(s));
    }
    if n_perm < 1000 {
        return Err(Error::TooFewPermutations(n_perm));
    }
    check_alpha(alpha)?;

    let observed: Vec<f64> = (0..r).map(|j| panel.column(j).sum() / s as f64).collect();
    let n_chunks = n_perm.div_ceil(CHUNK);

    let chunks: Vec<ChunkAccumulator> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64 + 1);
            let perms_here = CHUNK.min(n_perm - chunk * CHUNK);
            let mut acc = ChunkAccumulator {
                count_ge: vec![0; r],
                sum: vec![0.0; r],
                sumsq: vec![0.0; r],
            };
            let mut signs = vec![1.0f64; s];
            for _ in 0..perms_here {
                for sign in signs.iter_mut() {
                    *sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                }
                for j in 0..r {
                    let mut total = 0.0;
                    for (i, &sign) in signs.iter().enumerate() {
                        total += sign * panel[(i, j)];
                    }
                    let mean = total / s as f64;
                    if mean.abs() >= observed[j].abs() {
                        acc.count_ge[j] += 1;
                    }
                    acc.sum[j] += mean;
                    acc.sumsq[j] += mean * mean;
                }
            }
            acc
        })
        .collect();

    let mut count_ge = vec![0u64; r];
    let mut sum = vec![0.0f64; r];
    let mut sumsq = vec![0.0f64; r];
    for acc in &chunks {
        for j in 0..r {
            count_ge[j] += acc.count_ge[j];
            sum[j] += acc.sum[j];
            sumsq[j] += acc.sumsq[j];
        }
    }

    let p_value: Vec<f64> = count_ge
        .iter()
        .map(|&c| (1.0 + c as f64) / (1.0 + n_perm as f64))
        .collect();
    Ok(finish(
        observed,
        p_value,
        sum,
        sumsq,
        n_perm,
        alpha,
        seed,
        SIGN_FLIP_METHOD.to_string(),
    ))
}

/// Exhaustive sign-flip test over all 2^S sign patterns (S ≤ 16).
///
/// `p = #{|mean_perm| >= |mean_obs|} / 2^S`; the identity pattern always
/// ties, so p ∈ (0, 1].
pub fn sign_flip_exact(panel: &DMatrix<f64>, alpha: f64) -> Result<SignFlipResult> {
    let s = panel.nrows();
    let r = panel.ncols();
    if s < 2 {
        return Err(Error::TooFewSubjects(s));
    }
    if s > 16 {
        return Err(Error::TooManySubjectsForExact(s));
    }
    check_alpha(alpha)?;

    let observed: Vec<f64> = (0..r).map(|j| panel.column(j).sum() / s as f64).collect();
    let total = 1usize << s;
    let mut count_ge = vec![0u64; r];
    let mut sum = vec![0.0f64; r];
    let mut sumsq = vec![0.0f64; r];
    for pattern in 0..total {
        for j in 0..r {
            let mut acc = 0.0;
            for i in 0..s {
                let v = panel[(i, j)];
                acc += if pattern >> i & 1 == 1 { -v } else { v };
            }
            let mean = acc / s as f64;
            if mean.abs() >= observed[j].abs() {
                count_ge[j] += 1;
            }
            sum[j] += mean;
            sumsq[j] += mean * mean;
        }
    }

    // Exhaustive p has no add-one correction: the identity pattern is
    // already counted among the 2^S.
    let p_value: Vec<f64> = count_ge.iter().map(|&c| c as f64 / total as f64).collect();
    Ok(finish(
        observed,
        p_value,
        sum,
        sumsq,
        total,
        alpha,
        0,
        "sign-flip/exhaustive".to_string(),
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    observed: Vec<f64>,
    p_value: Vec<f64>,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    n_perm: usize,
    alpha: f64,
    seed: u64,
    method: String,
) -> SignFlipResult {
    let r = observed.len();
    let n = n_perm as f64;
    let mut z_score = Vec::with_capacity(r);
    let mut survives = Vec::with_capacity(r);
    for j in 0..r {
        let mean_null = sum[j] / n;
        let var_null = ((sumsq[j] - n * mean_null * mean_null) / (n - 1.0)).max(0.0);
        let sd = var_null.sqrt();
        let z = if sd > 0.0 {
            (observed[j] - mean_null) / sd
        } else {
            0.0
        };
        z_score.push(z);
        survives.push(p_value[j] <= alpha / r as f64);
    }
    SignFlipResult {
        observed_mean: observed,
        p_value,
        z_score,
        survives,
        n_permutations: n_perm,
        seed,
        alpha,
        method,
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// Per-group mean and standard error across subjects.
#[derive(Debug, Clone)]
pub struct GroupStats {
    pub groups: Vec<String>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Averages node values within each group per subject, then reports the
/// across-subject mean and standard error (sample std / sqrt(S); zero when
/// only one subject is present).
pub fn aggregate_nodes_by_group(panel: &DMatrix<f64>, g: &GroupAssignment) -> Result<GroupStats> {
    let s = panel.nrows();
    let n = panel.ncols();
    if n != g.node_group.len() {
        return Err(Error::DimensionMismatch {
            context: "aggregate_nodes_by_group",
            expected: g.node_group.len(),
            actual: n,
        });
    }
    let n_groups = g.n_groups();
    let mut members = vec![0usize; n_groups];
    for &grp in &g.node_group {
        members[grp] += 1;
    }
    if let Some(empty) = members.iter().position(|&m| m == 0) {
        return Err(Error::EmptyGroup(g.group_order[empty].clone()));
    }

    let mut mean = Vec::with_capacity(n_groups);
    let mut stderr = Vec::with_capacity(n_groups);
    for (grp, &n_members) in members.iter().enumerate() {
        let mut per_subject = Vec::with_capacity(s);
        for i in 0..s {
            let mut acc = 0.0;
            for j in 0..n {
                if g.node_group[j] == grp {
                    acc += panel[(i, j)];
                }
            }
            per_subject.push(acc / n_members as f64);
        }
        let m = per_subject.iter().sum::<f64>() / s as f64;
        let se = if s > 1 {
            let var = per_subject.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (s - 1) as f64;
            (var / s as f64).sqrt()
        } else {
            0.0
        };
        mean.push(m);
        stderr.push(se);
    }
    Ok(GroupStats {
        groups: g.group_order.clone(),
        mean,
        stderr,
    })
}

/// Mean signed edge value per group pair, under the reference orientation
/// lower-rank group → higher-rank group.
///
/// An edge (i,j) with i<j contributes +value when rank(i's group) is below
/// rank(j's group) and -value when above; within-group edges aggregate
/// unsigned into the diagonal cell. Keys are `(rank_a, rank_b)` with
/// `rank_a <= rank_b`; empty cells are absent.
pub fn aggregate_edges_by_group_pair(
    edge_values: &[f64],
    g: &GroupAssignment,
    c: &OrientedComplex2,
) -> Result<BTreeMap<(usize, usize), f64>> {
    if edge_values.len() != c.n_edges() {
        return Err(Error::DimensionMismatch {
            context: "aggregate_edges_by_group_pair",
            expected: c.n_edges(),
            actual: edge_values.len(),
        });
    }
    if g.node_group.len() != c.n_vertices() {
        return Err(Error::DimensionMismatch {
            context: "aggregate_edges_by_group_pair",
            expected: c.n_vertices(),
            actual: g.node_group.len(),
        });
    }
    let mut cells: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    for (idx, e) in c.edges().iter().enumerate() {
        let (gi, gj) = (g.node_group[e.tail], g.node_group[e.tip]);
        let (key, signed) = if gi <= gj {
            ((gi, gj), edge_values[idx])
        } else {
            ((gj, gi), -edge_values[idx])
        };
        let cell = cells.entry(key).or_insert((0.0, 0));
        cell.0 += signed;
        cell.1 += 1;
    }
    Ok(cells
        .into_iter()
        .map(|(k, (sum, count))| (k, sum / count as f64))
        .collect())
}

/// Curl aggregation over label triplets.
#[derive(Debug, Clone, Default)]
pub struct TripletAggregate {
    /// Mean signed curl per distinct-label triplet, keyed by ascending group
    /// ranks.
    pub named: BTreeMap<[usize; 3], f64>,
    /// Mean raw curl over triangles whose vertices repeat a label; no sign
    /// correction applies.
    pub degenerate: Option<f64>,
}

/// Aggregates triangle curl values by the label triplet of their vertices.
///
/// The reference orientation of a distinct-label triplet is ascending group
/// rank; a triangle contributes +curl when the permutation from its
/// vertex-order labels to rank order is even, -curl when odd.
pub fn aggregate_curl_by_triplet(
    curl_values: &[f64],
    g: &GroupAssignment,
    c: &OrientedComplex2,
) -> Result<TripletAggregate> {
    if curl_values.len() != c.n_triangles() {
        return Err(Error::DimensionMismatch {
            context: "aggregate_curl_by_triplet",
            expected: c.n_triangles(),
            actual: curl_values.len(),
        });
    }
    if g.node_group.len() != c.n_vertices() {
        return Err(Error::DimensionMismatch {
            context: "aggregate_curl_by_triplet",
            expected: c.n_vertices(),
            actual: g.node_group.len(),
        });
    }
    let mut named: BTreeMap<[usize; 3], (f64, usize)> = BTreeMap::new();
    let mut degenerate = (0.0, 0usize);
    for (idx, t) in c.triangles().iter().enumerate() {
        let labels = [g.node_group[t.a], g.node_group[t.b], g.node_group[t.c]];
        let mut sorted = labels;
        sorted.sort_unstable();
        if sorted[0] == sorted[1] || sorted[1] == sorted[2] {
            degenerate.0 += curl_values[idx];
            degenerate.1 += 1;
            continue;
        }
        let sign = f64::from(permutation_parity(labels));
        let cell = named.entry(sorted).or_insert((0.0, 0));
        cell.0 += sign * curl_values[idx];
        cell.1 += 1;
    }
    Ok(TripletAggregate {
        named: named
            .into_iter()
            .map(|(k, (sum, count))| (k, sum / count as f64))
            .collect(),
        degenerate: if degenerate.1 > 0 {
            Some(degenerate.0 / degenerate.1 as f64)
        } else {
            None
        },
    })
}
