//! Transversal factors in hypergraph systems.
//!
//! A hypergraph system is a family of `t*n` uniform hypergraphs ("colors") on a
//! common set of `s*n` vertices. A transversal F-factor covers every vertex by
//! vertex-disjoint copies of a pattern F and uses every color exactly once, one
//! color per edge of every copy.
//!
//! The crate is split by concern:
//!
//! * [`hypercore`]: hypergraphs, systems, partite hypergraphs and file formats.
//! * [`patterns`]: densities, balance certificates, expansions and copy enumeration.
//! * [`randmodels`]: seeded streams and monotone (coupled) sparsification.
//! * [`matchings`]: permanents, uniform perfect matchings, spread audits and gluing.
//! * [`clustering`]: randomized cluster decompositions with degree certificates.
//! * [`solver`]: exact search, counting and uniform sampling of transversal factors.

pub mod clustering;
pub mod error;
pub mod hypercore;
pub mod mask;
pub mod matchings;
pub mod patterns;
pub mod randmodels;
pub mod solver;

pub use error::{Error, Result};
