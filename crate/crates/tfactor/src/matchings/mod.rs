//! Bipartite perfect matchings, spread audits and partite gluing.

mod bipartite;
mod glue;
mod spread;

pub use bipartite::{
    count_pms, uniform_pm_complete, uniform_pm_dense, BipartiteGraph, Matching, PmSampler,
    PERMANENT_CAP,
};
pub use glue::{pikhurko_glue, GlueConfig, GlueDiagnostics, GlueOutcome, PartiteMatching};
pub use spread::{
    spread_audit, vertex_spread_audit, SetSizeReport, SpreadAuditConfig, SpreadReport,
};
