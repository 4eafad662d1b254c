//! Fully dynamic maximal independent set maintenance.
//!
//! A [`DynamicGraph`] receives a stream of edge insertions and deletions; an
//! [`MisAlgorithm`] keeps a maximal independent set of it valid after every
//! update while charging each adjacency visit and counter mutation to a
//! [`WorkMeter`]. Four strategies are provided through the [`Registry`]:
//! `naive`, `det`, `rand` and `arb`.

pub mod algo;
pub mod generate;
pub mod graph;
pub mod meter;
pub mod metrics;
pub mod mis;
pub mod registry;
pub mod replay;
pub mod stream;

pub use algo::{EpochReport, Fallback, MisAlgorithm, StepReport};
pub use graph::{degeneracy, DynamicGraph, GraphError, VertexId};
pub use meter::WorkMeter;
pub use metrics::{MetricsRow, RunRecord, RunSummary};
pub use mis::{verify_mis, MisError, MisState, Verdict};
pub use registry::{AlgorithmParams, Registry, RegistryError};
pub use replay::{run, Replay, ReplayError, ReplayFailure};
pub use stream::{parse_stream, serialize_stream, UpdateEvent, UpdateKind, UpdateStream};
