//! Topological signal processing on oriented 2-dimensional simplicial
//! complexes: boundary operators, Hodge Laplacians and their spectra,
//! edge-signal calculus, simplicial convolutional filters, lead-lag edge
//! signals derived from nodal time series, and group-level statistics with
//! sign-flip permutation testing.

pub mod complex;
pub mod error;
pub mod filter;
pub mod hodge;
pub mod io;
pub mod leadlag;
pub mod pipeline;
pub mod plot;
pub mod signal;
pub mod sparse;
pub mod stats;

pub use complex::{threshold_binarize, BoundaryPair, OrientedComplex2, OrientedEdge, OrientedTriangle, WeightedAdjacency};
pub use error::{Error, Result};
pub use hodge::{betti, laplacians, lift_edge_to_node, quadratic_variation, spectrum, BettiNumbers, HodgeLaplacians, HodgeSpectrum, SubspaceKind};
pub use signal::{curl, curl_energy_fraction, divergence, hodge_decompose, itft, tft, HodgeComponents, TftCoefficients};
