//! Error type shared across the crate.
//!
//! Errors fall into two categories: input/validation problems (bad files,
//! dimension mismatches, precondition violations) and numerical-consistency
//! failures (tolerance misclassification, bookkeeping violations). The CLI
//! maps the former to exit code 2 and the latter to exit code 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid 1-simplex: self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex {vertex} out of range for complex with {n_vertices} vertices")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },

    #[error("empty connectome: no strictly positive off-diagonal weights")]
    EmptyConnectome,

    #[error("adjacency matrix is not valid: {0}")]
    InvalidAdjacency(String),

    #[error("triangle ({a},{b},{c}) violates closure: edge ({i},{j}) is missing")]
    ClosureViolation {
        a: usize,
        b: usize,
        c: usize,
        i: usize,
        j: usize,
    },

    #[error("malformed input: duplicate triangle ({0},{1},{2})")]
    DuplicateTriangle(usize, usize, usize),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("need at least {needed} time points, got {got}")]
    TooFewTimePoints { needed: usize, got: usize },

    #[error("cannot lift kernel vector: eigenvalue {lambda} is at or below tolerance {zero_tol}")]
    LiftKernelVector { lambda: f64, zero_tol: f64 },

    #[error("input is not a gradient eigenpair: lifted vector has norm {norm}, expected 1")]
    NotGradientEigenpair { norm: f64 },

    #[error("harmonic frequency response requires lambda = 0, got {0}")]
    HarmonicNonzeroFrequency(f64),

    #[error("degenerate signal: zero energy in both gradient and curl blocks")]
    DegenerateSignal,

    #[error("empty group: {0}")]
    EmptyGroup(String),

    #[error("node {0} has no group label")]
    UnlabeledNode(usize),

    #[error("unknown group label {0:?} (not listed in the group order)")]
    UnknownGroup(String),

    #[error("need at least 2 subjects for the sign-flip test, got {0}")]
    TooFewSubjects(usize),

    #[error("need at least 1000 permutations, got {0}")]
    TooFewPermutations(usize),

    #[error("exhaustive sign-flip enumeration requires at most 16 subjects, got {0}")]
    TooManySubjectsForExact(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pipeline stage {stage} failed on {input}: {source}")]
    Stage {
        stage: &'static str,
        input: String,
        #[source]
        source: Box<Error>,
    },

    #[error("tolerance misclassification: {0}")]
    ToleranceMisclassification(String),

    #[error("numerical consistency failure: {0}")]
    NumericalConsistency(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {message}")]
    Csv { path: String, message: String },

    #[error("json error on {path}: {message}")]
    Json { path: String, message: String },
}

impl Error {
    /// True when the error reports a numerical-consistency failure rather
    /// than a bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::ToleranceMisclassification(_) | Error::NumericalConsistency(_) => true,
            Error::Stage { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    /// Process exit code for the CLI: 2 input/validation, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            3
        } else {
            2
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
