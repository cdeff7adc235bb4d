//! Exact search, counting and uniform sampling of transversal factors.

mod count;
mod embedding;
mod expansion_search;
mod pipeline;
mod search;

pub use count::{
    count_transversal_factors, uniform_random_factor, FactorCount, UniformFactorSampler,
    ENUMERATION_VERTEX_CAP,
};
pub use embedding::{compose_global_embedding, validate_embedding, Embedding};
pub use expansion_search::find_factor_in_expansion;
pub use pipeline::{embed_via_clusters, PipelineConfig, PipelineOutcome};
pub use search::{
    find_transversal_factor, search_transversal_factor, SearchOptions, SearchOutcome,
    SearchStrategy, OPTION_CAP, SEARCH_VERTEX_CAP,
};
