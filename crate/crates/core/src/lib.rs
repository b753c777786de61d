//! Community detection on directed weighted graphs with the synchronized
//! Louvain method, plus an LFR-style benchmark generator and a speedup
//! harness.

pub mod bench_gen;
pub mod error;
pub mod fmt;
pub mod graph;
pub mod louvain;
pub mod metrics;
pub mod partition;
pub mod perf;
pub mod quality;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId, Strengths};
pub use louvain::{run, AssignmentForest, Hierarchy, RunConfig};
pub use partition::Partition;
pub use quality::{modularity, CommunityAggregates, QualityParams};
