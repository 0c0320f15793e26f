//! Continuous-time simulations: the full splitting process, its root
//! cluster, the genealogical-tree realisation of the cluster, the
//! singleton-free variant, the root-degree chain and old-edge killing.

mod chain;
mod full;
mod singleton_free;
mod tree_sampler;

pub use chain::{
    degree_chain_survival, degree_chain_transition, kill_time_all_old_edges, simulate_degree_chain, KillOutcome,
};
pub use full::{
    run_cluster_process, run_cluster_process_with, run_full_process, FullProcessState,
    ProcessOptions, Pruning, SplitRecord, DEFAULT_MAX_VERTICES,
};
pub use singleton_free::run_singleton_free;
pub use tree_sampler::sample_gtcirc_via_tree;
