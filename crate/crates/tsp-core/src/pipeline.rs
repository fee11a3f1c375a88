//! End-to-end case-study pipeline: complex construction from a weighted
//! adjacency, per-subject lead-lag edge series, Hodge decomposition and
//! energies, divergence/curl of the time-averaged signal, group
//! aggregation, sign-flip testing, and report/plot emission.
//!
//! Given a fixed seed and configuration, two runs produce byte-identical
//! artifacts; the report timestamp is isolated in the provenance block.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{threshold_binarize, BoundaryPair, OrientedComplex2};
use crate::error::{Error, Result};
use crate::hodge::{betti, laplacians, spectrum, HodgeSpectrum};
use crate::io;
use crate::leadlag::edge_signal_runs;
use crate::plot;
use crate::signal::{curl_energy_fraction, decompose_series};
use crate::stats::{
    aggregate_curl_by_triplet, aggregate_edges_by_group_pair, aggregate_nodes_by_group,
    sign_flip_test, SignFlipResult,
};

/// One subject's recording: a single run file or several runs to
/// concatenate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubjectRuns {
    Single(PathBuf),
    Multi(Vec<PathBuf>),
}

impl SubjectRuns {
    pub fn paths(&self) -> Vec<&PathBuf> {
        match self {
            SubjectRuns::Single(p) => vec![p],
            SubjectRuns::Multi(ps) => ps.iter().collect(),
        }
    }

    fn id(&self) -> String {
        let first = match self {
            SubjectRuns::Single(p) => p,
            SubjectRuns::Multi(ps) => ps.first().expect("validated non-empty"),
        };
        first
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| first.display().to_string())
    }
}

fn default_percentile() -> f64 {
    90.0
}

fn default_n_permutations() -> usize {
    20_000
}

fn default_alpha() -> f64 {
    0.05
}

fn default_true() -> bool {
    true
}

/// Pipeline configuration; defaults mirror the case-study parameters
/// (percentile 90, 20000 permutations, alpha 0.05).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub adjacency_path: PathBuf,
    /// First adjacency row carries node labels.
    #[serde(default)]
    pub adjacency_header: bool,
    #[serde(default = "default_percentile")]
    pub percentile: f64,
    /// One entry per subject; an entry may list several run files.
    pub timeseries_paths: Vec<SubjectRuns>,
    /// Node time-series files laid out one row per node.
    #[serde(default)]
    pub transpose: bool,
    #[serde(default)]
    pub groups_path: Option<PathBuf>,
    #[serde(default = "default_n_permutations")]
    pub n_permutations: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub zero_tol: Option<f64>,
    pub output_dir: PathBuf,
    /// Drop the spurious edge sample at each run junction.
    #[serde(default = "default_true")]
    pub junction_drop: bool,
    /// Also write per-subject time-resolved divergence series.
    #[serde(default)]
    pub time_resolved_divergence: bool,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.percentile > 0.0 && self.percentile < 100.0) {
            return Err(Error::InvalidConfig(format!(
                "percentile must lie in (0, 100), got {}",
                self.percentile
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.timeseries_paths.is_empty() {
            return Err(Error::InvalidConfig("no subject time series listed".into()));
        }
        if !self.adjacency_path.exists() {
            return Err(Error::InvalidConfig(format!(
                "adjacency file {} does not exist",
                self.adjacency_path.display()
            )));
        }
        for subject in &self.timeseries_paths {
            let paths = subject.paths();
            if paths.is_empty() {
                return Err(Error::InvalidConfig("subject with no run files".into()));
            }
            for p in paths {
                if !p.exists() {
                    return Err(Error::InvalidConfig(format!(
                        "time-series file {} does not exist",
                        p.display()
                    )));
                }
            }
        }
        if let Some(g) = &self.groups_path {
            if !g.exists() {
                return Err(Error::InvalidConfig(format!(
                    "groups file {} does not exist",
                    g.display()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexSummary {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub n_triangles: usize,
    pub beta0: usize,
    pub beta1: usize,
    pub n_down: usize,
    pub n_up: usize,
    pub n_harm: usize,
    pub zero_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubjectSummary {
    pub id: String,
    pub n_samples: usize,
    pub curl_energy_fraction: f64,
    pub energy_total: f64,
    pub energy_down: f64,
    pub energy_up: f64,
    pub energy_harm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupTable {
    pub groups: Vec<String>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupPairCell {
    pub group_a: String,
    pub group_b: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripletRow {
    pub labels: [String; 3],
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripletTable {
    pub triplets: Vec<TripletRow>,
    pub degenerate: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignFlipTable {
    pub items: Vec<String>,
    pub observed_mean: Vec<f64>,
    pub z_score: Vec<f64>,
    pub p_value: Vec<f64>,
    pub survives: Vec<bool>,
    pub n_survivors: usize,
    pub n_permutations: usize,
    pub method: String,
}

impl SignFlipTable {
    fn from_result(items: Vec<String>, r: &SignFlipResult) -> Self {
        Self {
            items,
            observed_mean: r.observed_mean.clone(),
            z_score: r.z_score.clone(),
            p_value: r.p_value.clone(),
            survives: r.survives.clone(),
            n_survivors: r.survives.iter().filter(|&&s| s).count(),
            n_permutations: r.n_permutations,
            method: r.method.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub config: PipelineConfig,
    pub seed: u64,
    pub rng: String,
    pub version: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub complex: ComplexSummary,
    pub subjects: Vec<SubjectSummary>,
    pub group_divergence: Option<GroupTable>,
    pub group_pair_edge_means: Option<Vec<GroupPairCell>>,
    pub triplet_curl: Option<TripletTable>,
    pub sign_flip_edges: Option<SignFlipTable>,
    pub sign_flip_divergence: Option<SignFlipTable>,
    pub notices: Vec<String>,
    pub provenance: Provenance,
}

struct SubjectOutcome {
    summary: SubjectSummary,
    mean_edge: DVector<f64>,
    divergence: DVector<f64>,
    curl: DVector<f64>,
    divergence_series: Option<DMatrix<f64>>,
}

fn stage<T>(name: &'static str, input: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name,
        input: input.to_string(),
        source: Box::new(e),
    })
}

/// Builds the complex, spectrum and Betti summary from a weighted adjacency
/// file (threshold → binarize → clique complex).
pub struct DomainArtifacts {
    pub complex: OrientedComplex2,
    pub boundaries: BoundaryPair,
    pub spectrum: HodgeSpectrum,
    pub summary: ComplexSummary,
    pub node_labels: Vec<String>,
}

pub fn build_domain(
    adjacency_path: &Path,
    adjacency_header: bool,
    percentile: f64,
    zero_tol: Option<f64>,
) -> Result<DomainArtifacts> {
    let input = adjacency_path.display().to_string();
    let (adj, node_labels) = stage(
        "complex-build",
        &input,
        io::read_adjacency_csv(adjacency_path, adjacency_header),
    )?;
    let pairs = stage("complex-build", &input, threshold_binarize(&adj, percentile))?;
    let complex = stage(
        "complex-build",
        &input,
        OrientedComplex2::build_from_edges(adj.n(), &pairs),
    )?
    .clique_complex();
    let boundaries = stage("complex-build", &input, complex.boundaries())?;
    let h = laplacians(&boundaries);
    let s = stage("spectrum", &input, spectrum(&h, &boundaries, zero_tol))?;
    let b = stage("spectrum", &input, betti(&h, &s))?;

    let e = complex.n_edges();
    if s.n_down() + s.n_up() + s.n_harm() != e || b.beta1 != s.n_harm() {
        return Err(Error::NumericalConsistency(format!(
            "dimension bookkeeping violated: {} + {} + {} vs E = {e}, beta1 = {}",
            s.n_down(),
            s.n_up(),
            s.n_harm(),
            b.beta1
        )));
    }

    let summary = ComplexSummary {
        n_vertices: complex.n_vertices(),
        n_edges: e,
        n_triangles: complex.n_triangles(),
        beta0: b.beta0,
        beta1: b.beta1,
        n_down: s.n_down(),
        n_up: s.n_up(),
        n_harm: s.n_harm(),
        zero_tol: s.zero_tol,
    };
    Ok(DomainArtifacts {
        complex,
        boundaries,
        spectrum: s,
        summary,
        node_labels,
    })
}

fn process_subject(
    subject: &SubjectRuns,
    cfg: &PipelineConfig,
    domain: &DomainArtifacts,
) -> Result<SubjectOutcome> {
    let id = subject.id();
    let mut runs = Vec::new();
    for path in subject.paths() {
        let (x, _labels) = stage("load-timeseries", &id, io::read_node_series_csv(path, cfg.transpose))?;
        if x.n_nodes() != domain.complex.n_vertices() {
            return Err(Error::Stage {
                stage: "load-timeseries",
                input: id.clone(),
                source: Box::new(Error::DimensionMismatch {
                    context: "subject node count",
                    expected: domain.complex.n_vertices(),
                    actual: x.n_nodes(),
                }),
            });
        }
        runs.push(x.zscore());
    }
    let series = stage(
        "edge-signal",
        &id,
        edge_signal_runs(&runs, &domain.complex, cfg.junction_drop),
    )?;

    let (down, up, harm) = stage("decompose", &id, decompose_series(&domain.spectrum, &series))?;
    let energy = |m: &DMatrix<f64>| m.iter().map(|v| v * v).sum::<f64>();
    let (e_total, e_down, e_up, e_harm) = (energy(&series), energy(&down), energy(&up), energy(&harm));
    if e_total > 0.0 && ((e_down + e_up + e_harm) - e_total).abs() > 1e-8 * e_total {
        return Err(Error::NumericalConsistency(format!(
            "subject {id}: component energies {} do not reconstruct the total {e_total}",
            e_down + e_up + e_harm
        )));
    }
    let p_k = stage("curl-energy", &id, curl_energy_fraction(&down, &up))?;

    let l = series.ncols() as f64;
    let mean_edge = DVector::from_fn(series.nrows(), |i, _| series.row(i).sum() / l);
    let divergence = domain.boundaries.b1.apply(&mean_edge);
    let curl = domain.boundaries.b2.apply_transpose(&mean_edge);

    let divergence_series = cfg.time_resolved_divergence.then(|| {
        let mut out = DMatrix::zeros(domain.complex.n_vertices(), series.ncols());
        for t in 0..series.ncols() {
            let col = series.column(t).into_owned();
            out.set_column(t, &domain.boundaries.b1.apply(&col));
        }
        out
    });

    Ok(SubjectOutcome {
        summary: SubjectSummary {
            id,
            n_samples: series.ncols(),
            curl_energy_fraction: p_k,
            energy_total: e_total,
            energy_down: e_down,
            energy_up: e_up,
            energy_harm: e_harm,
        },
        mean_edge,
        divergence,
        curl,
        divergence_series,
    })
}

/// Runs the full pipeline and writes all artifacts into
/// `config.output_dir`. Returns the report that was written.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineReport> {
    config.validate()?;
    let mut notices = Vec::new();

    let domain = build_domain(
        &config.adjacency_path,
        config.adjacency_header,
        config.percentile,
        config.zero_tol,
    )?;
    if domain.complex.n_edges() == 0 {
        return Err(Error::InvalidInput(
            "thresholded graph has no edges".to_string(),
        ));
    }
    for w in &domain.spectrum.warnings {
        notices.push(format!("spectrum: {w}"));
    }

    // Per-subject stages run in a worker pool; results are reduced in
    // subject order so reports do not depend on scheduling.
    let outcomes: Vec<Result<SubjectOutcome>> = config
        .timeseries_paths
        .par_iter()
        .map(|subject| process_subject(subject, config, &domain))
        .collect();
    let mut subjects = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        subjects.push(outcome?);
    }

    let s_count = subjects.len();
    let e_count = domain.complex.n_edges();
    let n_count = domain.complex.n_vertices();
    let t_count = domain.complex.n_triangles();

    let edge_panel = DMatrix::from_fn(s_count, e_count, |s, j| subjects[s].mean_edge[j]);
    let div_panel = DMatrix::from_fn(s_count, n_count, |s, j| subjects[s].divergence[j]);

    // Group aggregation.
    let groups = match &config.groups_path {
        Some(path) => {
            let file = io::read_groups_json(path)?;
            Some(file.assign(&domain.node_labels)?)
        }
        None => {
            notices.push("group aggregation skipped: no groups file".to_string());
            None
        }
    };

    let mut group_divergence = None;
    let mut group_pair_edge_means = None;
    let mut triplet_curl = None;
    if let Some(g) = &groups {
        let stats = aggregate_nodes_by_group(&div_panel, g)?;
        group_divergence = Some(GroupTable {
            groups: stats.groups,
            mean: stats.mean,
            stderr: stats.stderr,
        });

        let mut pair_cells: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
        for subject in &subjects {
            let cells = aggregate_edges_by_group_pair(subject.mean_edge.as_slice(), g, &domain.complex)?;
            for (key, value) in cells {
                let cell = pair_cells.entry(key).or_insert((0.0, 0));
                cell.0 += value;
                cell.1 += 1;
            }
        }
        group_pair_edge_means = Some(
            pair_cells
                .iter()
                .map(|(&(a, b), &(sum, count))| GroupPairCell {
                    group_a: g.group_order[a].clone(),
                    group_b: g.group_order[b].clone(),
                    value: sum / count as f64,
                })
                .collect::<Vec<_>>(),
        );

        if t_count > 0 {
            let mut named: BTreeMap<[usize; 3], (f64, usize)> = BTreeMap::new();
            let mut degenerate = (0.0, 0usize);
            for subject in &subjects {
                let agg = aggregate_curl_by_triplet(subject.curl.as_slice(), g, &domain.complex)?;
                for (key, value) in agg.named {
                    let cell = named.entry(key).or_insert((0.0, 0));
                    cell.0 += value;
                    cell.1 += 1;
                }
                if let Some(d) = agg.degenerate {
                    degenerate.0 += d;
                    degenerate.1 += 1;
                }
            }
            triplet_curl = Some(TripletTable {
                triplets: named
                    .iter()
                    .map(|(key, &(sum, count))| TripletRow {
                        labels: [
                            g.group_order[key[0]].clone(),
                            g.group_order[key[1]].clone(),
                            g.group_order[key[2]].clone(),
                        ],
                        value: sum / count as f64,
                    })
                    .collect(),
                degenerate: (degenerate.1 > 0).then(|| degenerate.0 / degenerate.1 as f64),
            });
        }
    }

    // Sign-flip tests across subjects.
    let (sign_flip_edges, sign_flip_divergence) = if s_count >= 2 {
        let edge_items: Vec<String> = domain.complex.edges().iter().map(|e| e.label()).collect();
        let node_items: Vec<String> = domain.node_labels.clone();
        let edges_result = stage(
            "sign-flip",
            "edge means",
            sign_flip_test(&edge_panel, config.n_permutations, config.alpha, config.seed),
        )?;
        let div_result = stage(
            "sign-flip",
            "divergence",
            sign_flip_test(&div_panel, config.n_permutations, config.alpha, config.seed),
        )?;
        (
            Some(SignFlipTable::from_result(edge_items, &edges_result)),
            Some(SignFlipTable::from_result(node_items, &div_result)),
        )
    } else {
        notices.push("sign-flip stage skipped: fewer than 2 subjects".to_string());
        (None, None)
    };

    let report = PipelineReport {
        complex: domain.summary.clone(),
        subjects: subjects.iter().map(|s| s.summary.clone()).collect(),
        group_divergence,
        group_pair_edge_means,
        triplet_curl,
        sign_flip_edges,
        sign_flip_divergence,
        notices,
        provenance: Provenance {
            config: config.clone(),
            seed: config.seed,
            rng: crate::stats::SIGN_FLIP_METHOD.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        },
    };

    write_artifacts(config, &domain, &subjects, &report)?;
    Ok(report)
}

fn write_artifacts(
    config: &PipelineConfig,
    domain: &DomainArtifacts,
    subjects: &[SubjectOutcome],
    report: &PipelineReport,
) -> Result<()> {
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;

    let report_path = dir.join("report.json");
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Json {
        path: report_path.display().to_string(),
        message: e.to_string(),
    })?;
    std::fs::write(&report_path, text + "\n").map_err(|e| Error::Io {
        path: report_path.display().to_string(),
        source: e,
    })?;

    io::write_complex_json(&dir.join("complex.json"), &domain.complex)?;
    io::write_spectrum_json(&dir.join("spectrum.json"), &domain.spectrum)?;
    io::write_eigenvalues_csv(&dir.join("eigenvalues.csv"), &domain.spectrum)?;

    // Subject table.
    let mut out = String::from("subject,n_samples,curl_energy_fraction,energy_total,energy_down,energy_up,energy_harm\n");
    for s in subjects {
        let row = &s.summary;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.id,
            row.n_samples,
            row.curl_energy_fraction,
            row.energy_total,
            row.energy_down,
            row.energy_up,
            row.energy_harm
        ));
    }
    write_text(&dir.join("subjects.csv"), &out)?;

    // Per-edge cohort means.
    let mut out = String::from("edge,mean_edge_cohort\n");
    let s_count = subjects.len() as f64;
    for (j, e) in domain.complex.edges().iter().enumerate() {
        let cohort = subjects.iter().map(|s| s.mean_edge[j]).sum::<f64>() / s_count;
        out.push_str(&format!("{},{}\n", e.label(), cohort));
    }
    write_text(&dir.join("edge_means.csv"), &out)?;

    if let Some(table) = &report.group_divergence {
        let mut out = String::from("group,mean,stderr\n");
        for i in 0..table.groups.len() {
            out.push_str(&format!("{},{},{}\n", table.groups[i], table.mean[i], table.stderr[i]));
        }
        write_text(&dir.join("group_divergence.csv"), &out)?;
        let whisker: Vec<f64> = table.stderr.iter().map(|s| 3.0 * s).collect();
        write_text(
            &dir.join("group_divergence.svg"),
            &plot::bar_chart_svg(
                "Divergence by group (mean +/- 3 SE)",
                &table.groups,
                &table.mean,
                Some(&whisker),
            ),
        )?;
    }

    if let Some(cells) = &report.group_pair_edge_means {
        let mut out = String::from("group_a,group_b,value\n");
        for c in cells {
            out.push_str(&format!("{},{},{}\n", c.group_a, c.group_b, c.value));
        }
        write_text(&dir.join("group_pair_edges.csv"), &out)?;
        if let Some(table) = &report.group_divergence {
            let labels = &table.groups;
            let lookup: BTreeMap<(String, String), f64> = cells
                .iter()
                .map(|c| ((c.group_a.clone(), c.group_b.clone()), c.value))
                .collect();
            let svg = plot::heatmap_svg("Group-pair edge means", labels, |i, j| {
                let (a, b) = (labels[i.min(j)].clone(), labels[i.max(j)].clone());
                let v = lookup.get(&(a, b)).copied();
                // The lower triangle mirrors with flipped sign.
                v.map(|v| if i <= j { v } else { -v })
            });
            write_text(&dir.join("group_pair_edges.svg"), &svg)?;
        }
    }

    if let Some(table) = &report.triplet_curl {
        let mut out = String::from("group_a,group_b,group_c,value\n");
        for row in &table.triplets {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.labels[0], row.labels[1], row.labels[2], row.value
            ));
        }
        if let Some(d) = table.degenerate {
            out.push_str(&format!("degenerate,,,{d}\n"));
        }
        write_text(&dir.join("triplet_curl.csv"), &out)?;
        let labels: Vec<String> = table
            .triplets
            .iter()
            .map(|r| format!("{}-{}-{}", r.labels[0], r.labels[1], r.labels[2]))
            .collect();
        let values: Vec<f64> = table.triplets.iter().map(|r| r.value).collect();
        write_text(
            &dir.join("triplet_curl.svg"),
            &plot::bar_chart_svg("Curl by network triplet", &labels, &values, None),
        )?;
    }

    for (name, table) in [
        ("signflip_edges", &report.sign_flip_edges),
        ("signflip_divergence", &report.sign_flip_divergence),
    ] {
        if let Some(t) = table {
            let mut out = String::from("item,observed_mean,z,p,survives\n");
            for i in 0..t.items.len() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    t.items[i], t.observed_mean[i], t.z_score[i], t.p_value[i], t.survives[i]
                ));
            }
            write_text(&dir.join(format!("{name}.csv")), &out)?;
        }
    }

    if config.time_resolved_divergence {
        for s in subjects {
            if let Some(series) = &s.divergence_series {
                let mut out = String::new();
                out.push_str(&domain.node_labels.join(","));
                out.push('\n');
                for t in 0..series.ncols() {
                    let row: Vec<String> =
                        (0..series.nrows()).map(|i| series[(i, t)].to_string()).collect();
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                write_text(&dir.join(format!("divergence_time_{}.csv", s.summary.id)), &out)?;
            }
        }
    }

    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}
