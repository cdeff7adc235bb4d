//! Random cluster decompositions with degree certificates.
//!
//! Vertices and colors are split into blocks by uniform permutations. Blocks
//! whose sub-system loses too much minimum degree are declared bad, their
//! elements are redistributed over the good blocks through a perfect matching
//! of an auxiliary partite hypergraph, and every final cluster carries an
//! exact minimum-degree certificate.

mod bipartite;
mod location;
mod plan;
mod system;

pub use bipartite::{
    degree_sum_within, sample_bipartite_clusters, BipartiteAudit, BipartiteCluster,
    BipartiteClusterConfig, BipartiteClusterOutcome,
};
pub use location::{location_spread_audit, LocationReport};
pub use plan::{BipartiteClusterPlan, SystemClusterPlan};
pub use system::{
    degree_inheritance_check, sample_system_clusters, BadClusterFamily, BadReason, ClusterAudit,
    ClusterCertificate, ClusterConfig, ClusterOutcome, ClusterPartition, InheritanceChecker,
    InheritanceVerdict,
};

use crate::hypercore::binomial;

/// Smallest integer degree meeting `fraction * C(pool, r)`.
pub fn degree_requirement(fraction: f64, pool: usize, r: usize) -> usize {
    let v = fraction * binomial(pool, r) as f64;
    if v <= 0.0 {
        0
    } else {
        v.ceil() as usize
    }
}
