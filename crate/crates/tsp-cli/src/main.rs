//! `tsp` command line: complex construction, spectra, decomposition,
//! lead-lag signals, filtering and the end-to-end pipeline.
//!
//! Exit codes: 0 success, 2 input/validation error, 3 numerical-consistency
//! failure. `TSP_SEED` overrides the configured seed and `TSP_THREADS` caps
//! the worker pool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tsp_core::complex::OrientedComplex2;
use tsp_core::error::{Error, Result};
use tsp_core::filter;
use tsp_core::hodge::{betti, laplacians, spectrum};
use tsp_core::io;
use tsp_core::leadlag::{edge_signal_runs, temporal_stats};
use tsp_core::pipeline::{self, PipelineConfig, SubjectRuns};
use tsp_core::signal::{curl_energy_fraction, decompose_series};

#[derive(Parser)]
#[command(name = "tsp", version, about = "Topological signal processing on oriented simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build oriented 2-complexes from adjacency or edge-list data
    Complex {
        #[command(subcommand)]
        command: ComplexCommand,
    },
    /// Eigendecomposition of the edge space into harmonic/gradient/curl blocks
    Spectrum(SpectrumArgs),
    /// Split an edge signal into gradient, curl and harmonic components
    Decompose(DecomposeArgs),
    /// Lead-lag edge series and lagged cross-correlation statistics
    Leadlag(LeadlagArgs),
    /// Simplicial convolutional filters
    Filter {
        #[command(subcommand)]
        command: FilterCommand,
    },
    /// End-to-end analysis pipeline
    Pipeline {
        #[command(subcommand)]
        command: PipelineCommand,
    },
}

#[derive(Subcommand)]
enum ComplexCommand {
    /// Threshold a weighted adjacency, binarize, and fill 3-cliques
    Build(ComplexBuildArgs),
}

#[derive(Args)]
struct ComplexBuildArgs {
    /// Weighted adjacency CSV (N rows x N columns)
    #[arg(long, conflicts_with = "edges")]
    adjacency: Option<PathBuf>,
    /// First adjacency row holds node labels
    #[arg(long)]
    header: bool,
    /// Percentile cut over strictly positive weights (inclusive)
    #[arg(long, default_value_t = 90.0)]
    percentile: f64,
    /// Edge-list file (`i j` per line) instead of an adjacency matrix
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Vertex count for edge-list input (default: max index + 1)
    #[arg(long)]
    n_vertices: Option<usize>,
    /// Output complex JSON
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Complex JSON
    #[arg(long)]
    complex: PathBuf,
    /// Kernel threshold (default: E * eps * lambda_max)
    #[arg(long)]
    zero_tol: Option<f64>,
    /// Spectrum JSON output
    #[arg(long)]
    output_json: Option<PathBuf>,
    /// Labeled eigenvalue CSV output
    #[arg(long)]
    output_csv: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    complex: PathBuf,
    /// Edge-series CSV (header of tail-tip labels, one row per time point)
    #[arg(long)]
    signal: PathBuf,
    /// Component CSV output
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    zero_tol: Option<f64>,
}

#[derive(Args)]
struct LeadlagArgs {
    /// Node time-series CSV; repeat for multiple runs of one subject
    #[arg(long, required = true)]
    timeseries: Vec<PathBuf>,
    #[arg(long)]
    complex: PathBuf,
    /// Input rows are nodes rather than time points
    #[arg(long)]
    transpose: bool,
    /// Skip per-row z-scoring
    #[arg(long)]
    no_zscore: bool,
    /// Keep the spurious edge sample at run junctions
    #[arg(long)]
    no_junction_drop: bool,
    /// Edge-series CSV output
    #[arg(long)]
    output_edges: PathBuf,
    /// Per-edge statistics CSV output
    #[arg(long)]
    output_stats: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FilterCommand {
    /// Apply a filter to an edge signal
    Apply(FilterApplyArgs),
}

#[derive(Args)]
struct FilterApplyArgs {
    #[arg(long)]
    complex: PathBuf,
    /// Filter JSON {h_harm, alphas, betas}
    #[arg(long)]
    filter: PathBuf,
    /// Edge-series CSV input
    #[arg(long)]
    signal: PathBuf,
    /// Evaluate by iterated shifts instead of the spectral path
    #[arg(long)]
    spatial: bool,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    zero_tol: Option<f64>,
}

#[derive(Subcommand)]
enum PipelineCommand {
    /// Run the full pipeline described by a config file plus overrides
    Run(PipelineRunArgs),
}

#[derive(Args)]
struct PipelineRunArgs {
    /// Pipeline config JSON; individual flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    adjacency: Option<PathBuf>,
    #[arg(long)]
    header: bool,
    #[arg(long)]
    percentile: Option<f64>,
    /// One subject per occurrence
    #[arg(long)]
    timeseries: Vec<PathBuf>,
    #[arg(long)]
    transpose: bool,
    #[arg(long)]
    groups: Option<PathBuf>,
    #[arg(long)]
    n_permutations: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    zero_tol: Option<f64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    no_junction_drop: bool,
    /// Also write per-subject time-resolved divergence
    #[arg(long)]
    time_resolved_divergence: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(threads) = std::env::var("TSP_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: TSP_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Complex { command: ComplexCommand::Build(args) } => complex_build(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Leadlag(args) => cmd_leadlag(args),
        Command::Filter { command: FilterCommand::Apply(args) } => filter_apply(args),
        Command::Pipeline { command: PipelineCommand::Run(args) } => pipeline_run(args),
    }
}

fn complex_build(args: ComplexBuildArgs) -> Result<()> {
    let complex = match (&args.adjacency, &args.edges) {
        (Some(adjacency), None) => {
            pipeline::build_domain(adjacency, args.header, args.percentile, None)?.complex
        }
        (None, Some(edges)) => {
            let list = io::read_edge_list(edges)?;
            let n = args
                .n_vertices
                .unwrap_or_else(|| list.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0));
            OrientedComplex2::build_from_edges(n, &list)?.clique_complex()
        }
        _ => {
            return Err(Error::InvalidConfig(
                "provide exactly one of --adjacency or --edges".into(),
            ))
        }
    };
    let b = complex.boundaries()?;
    let h = laplacians(&b);
    let s = spectrum(&h, &b, None)?;
    let bn = betti(&h, &s)?;
    io::write_complex_json(&args.output, &complex)?;
    println!("vertices: {}", complex.n_vertices());
    println!("edges: {}", complex.n_edges());
    println!("triangles: {}", complex.n_triangles());
    println!("beta0: {}", bn.beta0);
    println!("beta1: {}", bn.beta1);
    println!("wrote {}", args.output.display());
    Ok(())
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<()> {
    let complex = io::read_complex_json(&args.complex)?;
    if complex.n_edges() == 0 {
        return Err(Error::InvalidInput("no edges".into()));
    }
    let b = complex.boundaries()?;
    let h = laplacians(&b);
    let s = spectrum(&h, &b, args.zero_tol)?;
    println!("zero_tol: {:e}", s.zero_tol);
    println!("harmonic: {}", s.n_harm());
    println!("gradient: {}", s.n_down());
    println!("curl: {}", s.n_up());
    for w in &s.warnings {
        println!("warning: {w}");
    }
    if let Some(path) = &args.output_json {
        io::write_spectrum_json(path, &s)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.output_csv {
        io::write_eigenvalues_csv(path, &s)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_decompose(args: DecomposeArgs) -> Result<()> {
    let complex = io::read_complex_json(&args.complex)?;
    if complex.n_edges() == 0 {
        return Err(Error::InvalidInput("no edges".into()));
    }
    let series = io::read_edge_series_csv(&args.signal, &complex)?;
    let b = complex.boundaries()?;
    let h = laplacians(&b);
    let s = spectrum(&h, &b, args.zero_tol)?;
    let (down, up, harm) = decompose_series(&s, &series)?;
    io::write_component_series_csv(&args.output, &complex, &down, &up, &harm)?;
    let energy = |m: &nalgebra::DMatrix<f64>| m.iter().map(|v| v * v).sum::<f64>();
    println!("energy_total: {}", energy(&series));
    println!("energy_down: {}", energy(&down));
    println!("energy_up: {}", energy(&up));
    println!("energy_harm: {}", energy(&harm));
    match curl_energy_fraction(&down, &up) {
        Ok(p) => println!("curl_energy_fraction: {p}"),
        Err(Error::DegenerateSignal) => println!("curl_energy_fraction: undefined (degenerate signal)"),
        Err(e) => return Err(e),
    }
    println!("wrote {}", args.output.display());
    Ok(())
}

fn cmd_leadlag(args: LeadlagArgs) -> Result<()> {
    let complex = io::read_complex_json(&args.complex)?;
    let mut runs = Vec::new();
    for path in &args.timeseries {
        let (x, _) = io::read_node_series_csv(path, args.transpose)?;
        if x.n_nodes() != complex.n_vertices() {
            return Err(Error::DimensionMismatch {
                context: "leadlag node count",
                expected: complex.n_vertices(),
                actual: x.n_nodes(),
            });
        }
        let x = if args.no_zscore {
            if !x.is_zscored(1e-3) {
                eprintln!("warning: input is not z-scored; lagged cross-correlation readings assume zero mean and unit variance");
            }
            x
        } else {
            x.zscore()
        };
        runs.push(x);
    }
    let series = edge_signal_runs(&runs, &complex, !args.no_junction_drop)?;
    if series.iter().all(|&v| v == 0.0) {
        eprintln!("warning: degenerate input (edge series identically zero)");
    }
    io::write_edge_series_csv(&args.output_edges, &complex, &series)?;
    println!("edges: {}", series.nrows());
    println!("samples: {}", series.ncols());
    println!("wrote {}", args.output_edges.display());
    if let Some(path) = &args.output_stats {
        if args.timeseries.len() == 1 {
            let stats = temporal_stats(&series, &runs[0], &complex)?;
            let mut out = String::from("edge,r_plus,r_minus,mean_edge\n");
            for (i, e) in complex.edges().iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    e.label(),
                    stats.r_plus[i],
                    stats.r_minus[i],
                    stats.mean_edge[i]
                ));
            }
            std::fs::write(path, out).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })?;
        } else {
            // Lagged correlations are per-run quantities; for concatenated
            // runs report the mean edge signal only.
            let l = series.ncols() as f64;
            let mut out = String::from("edge,mean_edge\n");
            for (i, e) in complex.edges().iter().enumerate() {
                out.push_str(&format!("{},{}\n", e.label(), series.row(i).sum() / l));
            }
            std::fs::write(path, out).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })?;
        }
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn filter_apply(args: FilterApplyArgs) -> Result<()> {
    let complex = io::read_complex_json(&args.complex)?;
    if complex.n_edges() == 0 {
        return Err(Error::InvalidInput("no edges".into()));
    }
    let spec = io::read_filter_json(&args.filter)?;
    let series = io::read_edge_series_csv(&args.signal, &complex)?;
    let b = complex.boundaries()?;
    let h = laplacians(&b);
    let s = spectrum(&h, &b, args.zero_tol)?;
    let mut out = nalgebra::DMatrix::zeros(series.nrows(), series.ncols());
    for t in 0..series.ncols() {
        let col = series.column(t).into_owned();
        let filtered = if args.spatial {
            filter::apply_spatial(&spec, &h, &col)?
        } else {
            filter::apply_spectral(&spec, &s, &col)?
        };
        out.set_column(t, &filtered);
    }
    io::write_edge_series_csv(&args.output, &complex, &out)?;
    println!(
        "applied {} filter to {} samples",
        if args.spatial { "spatial" } else { "spectral" },
        out.ncols()
    );
    println!("wrote {}", args.output.display());
    Ok(())
}

fn pipeline_run(args: PipelineRunArgs) -> Result<()> {
    let mut config: PipelineConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            serde_json::from_str(&text).map_err(|e| Error::Json {
                path: path.display().to_string(),
                message: e.to_string(),
            })?
        }
        None => PipelineConfig {
            adjacency_path: args
                .adjacency
                .clone()
                .ok_or_else(|| Error::InvalidConfig("--adjacency required without --config".into()))?,
            adjacency_header: false,
            percentile: 90.0,
            timeseries_paths: Vec::new(),
            transpose: false,
            groups_path: None,
            n_permutations: 20_000,
            alpha: 0.05,
            seed: 0,
            zero_tol: None,
            output_dir: PathBuf::new(),
            junction_drop: true,
            time_resolved_divergence: false,
        },
    };

    if let Some(v) = args.adjacency {
        config.adjacency_path = v;
    }
    if args.header {
        config.adjacency_header = true;
    }
    if let Some(v) = args.percentile {
        config.percentile = v;
    }
    if !args.timeseries.is_empty() {
        config.timeseries_paths = args.timeseries.into_iter().map(SubjectRuns::Single).collect();
    }
    if args.transpose {
        config.transpose = true;
    }
    if let Some(v) = args.groups {
        config.groups_path = Some(v);
    }
    if let Some(v) = args.n_permutations {
        config.n_permutations = v;
    }
    if let Some(v) = args.alpha {
        config.alpha = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.zero_tol {
        config.zero_tol = Some(v);
    }
    if let Some(v) = args.output_dir {
        config.output_dir = v;
    }
    if args.no_junction_drop {
        config.junction_drop = false;
    }
    if args.time_resolved_divergence {
        config.time_resolved_divergence = true;
    }
    if let Ok(seed) = std::env::var("TSP_SEED") {
        config.seed = seed.parse().map_err(|_| {
            Error::InvalidConfig(format!("TSP_SEED must be an integer, got {seed:?}"))
        })?;
    }
    if config.output_dir.as_os_str().is_empty() {
        return Err(Error::InvalidConfig("--output-dir required".into()));
    }

    let report = pipeline::run_pipeline(&config)?;
    let c = &report.complex;
    println!(
        "complex: N={} E={} T={} beta0={} beta1={}",
        c.n_vertices, c.n_edges, c.n_triangles, c.beta0, c.beta1
    );
    println!(
        "spectrum: harmonic={} gradient={} curl={}",
        c.n_harm, c.n_down, c.n_up
    );
    println!("subjects: {}", report.subjects.len());
    for s in &report.subjects {
        println!("  {}: p_k={:.4}", s.id, s.curl_energy_fraction);
    }
    if let Some(t) = &report.sign_flip_edges {
        println!("sign-flip edges: {}/{} survive Bonferroni", t.n_survivors, t.items.len());
    }
    if let Some(t) = &report.sign_flip_divergence {
        println!("sign-flip divergence: {}/{} survive Bonferroni", t.n_survivors, t.items.len());
    }
    for n in &report.notices {
        println!("notice: {n}");
    }
    println!("report: {}", config.output_dir.join("report.json").display());
    Ok(())
}
