//! Connectivity oracle for vertex-induced subgraphs under a bounded batch of
//! on/off switches.

pub mod cut_matching;
pub mod dsu;
pub mod euler;
pub mod flow;
pub mod gen;
pub mod graph;
pub mod hierarchy;
pub mod oracle;
pub mod par;
pub mod preprocess;
pub mod query;
pub mod range_count;
pub mod scaling;
pub mod shadow;
pub mod sparsify;
pub mod tree;
pub mod update;
pub mod verify;
pub mod workload;

pub use graph::{Graph, GraphError, VertexId, VertexSet};
pub use oracle::{Oracle, OracleError, OracleOptions, PreprocessMetrics};
pub use par::Execution;
pub use query::{QueryResult, Resolution};
pub use update::UpdateState;
