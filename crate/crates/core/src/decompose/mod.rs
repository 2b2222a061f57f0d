//! Structural decompositions of sparse graphs: 2-core and kernel, edge
//! expansion, the weighted pruning process, the good-graph conditions and
//! statistics of vertex partitions.

mod expansion;
mod good;
mod kernel;
mod partition;
mod prune;

pub use expansion::{expansion, min_weighted_ratio, ExpansionMode, ExpansionReport, EXACT_LIMIT};
pub use good::{good_graph_check, ln_bounds, EXHAUSTIVE_LIMIT, ConditionResult, GoodGraphReport};
pub use kernel::{kernelize, two_core, KernelDecomposition};
pub use partition::{count_partitions_f, partition_count_bound, partition_stats, PartitionStats, COUNT_LIMIT};
pub use prune::{prune, Conclusions, PruneReport, PruneStep, PruneRule};
