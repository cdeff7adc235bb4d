//! Hypergraphs, hypergraph systems, partite hypergraphs and their text formats.

mod combin;
mod expansion;
mod hypergraph;
mod index;
pub mod io;
mod partite;
mod system;

pub use combin::{binomial, for_each_subset, subsets};
pub use expansion::ColoredExpansionGraph;
pub use hypergraph::Hypergraph;
pub use index::CodegreeIndex;
pub use partite::PartiteHypergraph;
pub use system::{HypergraphSystem, SystemIndex};
