//! End-to-end runs: thin, cluster, solve every cluster, compose, validate.

use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tfactor::matchings::{vertex_spread_audit, SpreadAuditConfig, SpreadReport};
use tfactor::randmodels::sparsify_system;
use tfactor::solver::{embed_via_clusters, validate_embedding, Embedding, PipelineConfig};
use tfactor::{Error, Result};

use crate::config::ExperimentConfig;
use crate::stats::{wilson, Interval, Z95};
use crate::sweep::trial_spec;

/// Extra attempts an audit sampler makes when the pipeline fails.
const AUDIT_RESAMPLES: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RobustnessRecord {
    pub n: usize,
    pub p: f64,
    pub trial: usize,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<String>,
    pub cluster_attempts: usize,
    pub clusters: usize,
    pub bad_low_degree: usize,
    pub padding: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub embedding: Option<Embedding>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RobustnessPoint {
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub interval: Interval,
    pub mean_cluster_attempts: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vertex_spread: Option<SpreadReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RobustnessResult {
    pub points: Vec<RobustnessPoint>,
    pub records: Vec<RobustnessRecord>,
}

/// Runs the full pipeline `cfg.trials` times per `(n, p)`. Without a grid, `p = 1`.
pub fn end_to_end_robustness(cfg: &ExperimentConfig, base: &Path) -> Result<RobustnessResult> {
    cfg.validate()?;
    let pattern = cfg.pattern.load(base)?;
    let pipeline = PipelineConfig::new(cfg.clustering.to_cluster_config());
    let mut ns = cfg.n_grid.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut points = Vec::new();
    let mut records = Vec::new();
    for &n in &ns {
        let ps = if cfg.p_grid.is_some() || cfg.multipliers.is_some() {
            cfg.probabilities(&pattern, n)?
        } else {
            vec![1.0]
        };
        for (pi, &p) in ps.iter().enumerate() {
            let rows: Vec<RobustnessRecord> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    let spec = trial_spec(cfg.seed, n, trial).child(pi as u64);
                    let sys = cfg.generator.build(&pattern, n, spec.child(0), base)?;
                    let thin = sparsify_system(&sys, p, spec.child(1))?.system;
                    let mut rng = spec.child(2).rng();
                    let mut rec = RobustnessRecord {
                        n,
                        p,
                        trial,
                        success: false,
                        failure: None,
                        cluster_attempts: 0,
                        clusters: 0,
                        bad_low_degree: 0,
                        padding: 0,
                        embedding: None,
                    };
                    match embed_via_clusters(&thin, &pattern, &pipeline, &mut rng) {
                        Ok(out) => {
                            validate_embedding(&thin, &pattern, &out.embedding)?;
                            rec.success = true;
                            rec.cluster_attempts = out.clusters.audit.attempts;
                            rec.clusters = out.clusters.partition.len();
                            rec.bad_low_degree = out
                                .clusters
                                .bad
                                .count(tfactor::clustering::BadReason::LowDegree);
                            rec.padding = out.clusters.audit.padding;
                            rec.embedding = Some(out.embedding);
                        }
                        Err(e @ (Error::Failure { .. } | Error::Parameter(_))) => {
                            rec.failure = Some(e.to_string());
                        }
                        Err(e) => return Err(e),
                    }
                    Ok(rec)
                })
                .collect::<Result<_>>()?;
            let successes = rows.iter().filter(|r| r.success).count();
            let attempts: usize = rows.iter().map(|r| r.cluster_attempts).sum();
            let vertex_spread = if cfg.audit.trials > 0 {
                Some(audit_point(cfg, &pattern, &pipeline, n, p, base)?)
            } else {
                None
            };
            points.push(RobustnessPoint {
                n,
                p,
                trials: cfg.trials,
                successes,
                success_rate: successes as f64 / cfg.trials as f64,
                interval: wilson(successes, cfg.trials, Z95),
                mean_cluster_attempts: attempts as f64 / successes.max(1) as f64,
                vertex_spread,
            });
            records.extend(rows);
        }
    }
    Ok(RobustnessResult { points, records })
}

/// Vertex-spread audit of the embedding distribution on one fixed instance.
fn audit_point(
    cfg: &ExperimentConfig,
    pattern: &tfactor::patterns::Pattern,
    pipeline: &PipelineConfig,
    n: usize,
    p: f64,
    base: &Path,
) -> Result<SpreadReport> {
    let spec = trial_spec(cfg.seed, n, usize::MAX);
    let sys = cfg.generator.build(pattern, n, spec.child(0), base)?;
    let thin = sparsify_system(&sys, p, spec.child(1))?.system;
    let nv = thin.vertex_count();
    let q = cfg.audit.q.unwrap_or(std::f64::consts::E / nv as f64);
    let audit_cfg = SpreadAuditConfig::new(q, cfg.audit.max_set_size, cfg.audit.trials);
    let sampler = |rng: &mut ChaCha8Rng| -> Result<Vec<usize>> {
        let mut last = None;
        for _ in 0..AUDIT_RESAMPLES {
            match embed_via_clusters(&thin, pattern, pipeline, rng) {
                Ok(out) => return Ok(out.embedding.vertex_map),
                Err(e @ Error::Failure { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one attempt"))
    };
    vertex_spread_audit(sampler, nv, nv, &audit_cfg, spec.child(3))
}
