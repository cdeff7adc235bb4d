use rand::Rng;
use serde::{Deserialize, Serialize};

use super::count::{UniformFactorSampler, ENUMERATION_VERTEX_CAP};
use super::embedding::{compose_global_embedding, Embedding};
use super::search::{search_transversal_factor, SearchOptions};
use crate::clustering::{sample_system_clusters, ClusterConfig, ClusterOutcome};
use crate::error::{Error, Result};
use crate::hypercore::HypergraphSystem;
use crate::patterns::Pattern;
use crate::randmodels::RngSpec;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub cluster: ClusterConfig,
    /// Clusters with at most this many vertices are solved by exact uniform
    /// sampling, larger ones by randomized search.
    pub uniform_vertex_cap: usize,
}

impl PipelineConfig {
    pub fn new(cluster: ClusterConfig) -> Self {
        PipelineConfig {
            cluster,
            uniform_vertex_cap: ENUMERATION_VERTEX_CAP,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineOutcome {
    pub embedding: Embedding,
    pub clusters: ClusterOutcome,
    pub uniform_clusters: usize,
    pub searched_clusters: usize,
    pub search_nodes: u64,
}

/// Clusters `sys`, solves every cluster and composes the validated global
/// embedding.
pub fn embed_via_clusters<R: Rng + ?Sized>(
    sys: &HypergraphSystem,
    pattern: &Pattern,
    cfg: &PipelineConfig,
    rng: &mut R,
) -> Result<PipelineOutcome> {
    if pattern.k() != sys.k() || pattern.s() != sys.s() || pattern.t() != sys.t() {
        return Err(Error::param("pattern shape does not match the system"));
    }
    let clusters = sample_system_clusters(sys, &cfg.cluster, rng)?;
    let parts: Vec<(Vec<usize>, Vec<usize>)> = clusters
        .partition
        .u
        .iter()
        .cloned()
        .zip(clusters.partition.w.iter().cloned())
        .collect();
    let mut per_cluster = Vec::with_capacity(parts.len());
    let (mut uniform, mut searched, mut nodes) = (0, 0, 0);
    for (i, (u, w)) in parts.iter().enumerate() {
        let sub = sys.sub_system(u, w)?;
        let local = if u.len() <= cfg.uniform_vertex_cap.min(ENUMERATION_VERTEX_CAP) {
            uniform += 1;
            UniformFactorSampler::new(&sub, pattern)?.sample(rng)
        } else {
            searched += 1;
            let opts = SearchOptions {
                shuffle: Some(RngSpec::new(rng.random())),
                ..Default::default()
            };
            let out = search_transversal_factor(&sub, pattern, &opts)?;
            nodes += out.nodes;
            out.embedding
        };
        let Some(local) = local else {
            return Err(Error::Failure {
                stage: "cluster solve",
                attempts: 1,
                reason: format!("cluster {} has no transversal factor", i),
            });
        };
        per_cluster.push(Embedding {
            vertex_map: local.vertex_map.iter().map(|&v| u[v]).collect(),
            color_map: local.color_map.iter().map(|&c| w[c]).collect(),
        });
    }
    let embedding = compose_global_embedding(sys, pattern, &parts, &per_cluster)?;
    Ok(PipelineOutcome {
        embedding,
        clusters,
        uniform_clusters: uniform,
        searched_clusters: searched,
        search_nodes: nodes,
    })
}
