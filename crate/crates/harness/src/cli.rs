//! Command line interface. Every subcommand prints one JSON document.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tfactor::clustering::{sample_system_clusters, ClusterConfig};
use tfactor::hypercore::io::{parse_hypergraph, parse_system};
use tfactor::hypercore::{HypergraphSystem, PartiteHypergraph};
use tfactor::matchings::{
    pikhurko_glue, spread_audit, uniform_pm_complete, GlueConfig, SpreadAuditConfig,
};
use tfactor::patterns::{verify_expansion_claims, Pattern};
use tfactor::randmodels::RngSpec;
use tfactor::solver::{count_transversal_factors, embed_via_clusters, PipelineConfig};
use tfactor::{Error, Result};

use crate::bounds::{evaluate, BoundQuery};
use crate::config::ExperimentConfig;
use crate::output::{save_robustness, save_sweep, to_pretty_json};
use crate::robustness::end_to_end_robustness;
use crate::sweep::{run_general_sweep_m1, run_threshold_sweep};

#[derive(Parser, Debug)]
#[command(
    name = "tfactor",
    version,
    about = "Transversal factors in hypergraph systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct PatternArg {
    /// A built-in pattern: K2, K3, K4, K4-e, C4, P3, 2K2, E3, K4(3), D3, L3.
    #[arg(long)]
    pub pattern: Option<String>,
    /// A pattern in the `k n m` edge-list format.
    #[arg(long)]
    pub pattern_file: Option<PathBuf>,
}

impl PatternArg {
    fn load(&self) -> Result<Pattern> {
        match (&self.pattern, &self.pattern_file) {
            (Some(name), _) => Pattern::named(name),
            (None, Some(path)) => {
                Pattern::new(parse_hypergraph(&std::fs::read_to_string(path)?)?.0)
            }
            (None, None) => Err(Error::param("a pattern is required")),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SamplerKind {
    Uniform,
    PointMass,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BoundKind {
    ChernoffUpper,
    ChernoffLower,
    Mcdiarmid,
    Subset,
    Degree,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Densities, balance and expansion identities of a pattern.
    Analyze(PatternArg),
    /// Random cluster partition of a system.
    Cluster {
        #[arg(long)]
        system: PathBuf,
        /// JSON with fields C, d, delta, alpha and optional retryCap, augmentSamples.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cluster, solve each cluster and compose a transversal factor.
    Embed {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        pattern: PatternArg,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact number of transversal factors of a small system.
    Count {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        pattern: PatternArg,
    },
    /// Spread audit of a perfect matching sampler on the complete bipartite graph.
    SpreadTest {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        max_set_size: usize,
        /// Defaults to e/n.
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, value_enum, default_value_t = SamplerKind::Uniform)]
        sampler: SamplerKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Perfect matching of a random partite hypergraph by gluing.
    GlueDemo {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        /// 0-based part indices chained first.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        classes: Vec<usize>,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Threshold sweep; writes trials.jsonl, summary.csv and curve.json.
    Threshold {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Use the maximum 1-density reference rate.
        #[arg(long)]
        general: bool,
    },
    /// End-to-end pipeline runs; writes trials.jsonl, summary.csv and points.json.
    Robustness {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reference value of a concentration bound.
    Bounds {
        #[arg(value_enum)]
        kind: BoundKind,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        mean: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        ell: Option<f64>,
        #[arg(long)]
        gap: Option<f64>,
    },
}

/// Clustering parameters as given to `cluster` and `embed`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ClusterFileConfig {
    #[serde(rename = "C")]
    pub c: usize,
    pub d: usize,
    pub delta: f64,
    pub alpha: f64,
    #[serde(default = "default_retry")]
    pub retry_cap: usize,
    #[serde(default = "default_samples")]
    pub augment_samples: usize,
}

fn default_retry() -> usize {
    50
}

fn default_samples() -> usize {
    500
}

impl ClusterFileConfig {
    fn load(path: &Path) -> Result<ClusterConfig> {
        let c: ClusterFileConfig =
            serde_json::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Parse {
                line: e.line(),
                msg: e.to_string(),
            })?;
        Ok(ClusterConfig {
            retry_cap: c.retry_cap,
            augment_samples: c.augment_samples,
            ..ClusterConfig::new(c.c, c.d, c.delta, c.alpha)
        })
    }
}

fn load_system(path: &Path) -> Result<HypergraphSystem> {
    Ok(parse_system(&std::fs::read_to_string(path)?)?.0)
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::param(format!("--{} is required for this bound", name)))
}

fn config_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Runs one command and returns its JSON output.
pub fn execute(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Analyze(p) => {
            let f = p.load()?;
            let exp = verify_expansion_claims(&f)?;
            let r = |d: tfactor::patterns::Density| d.to_string();
            Ok(to_pretty_json(&json!({
                "k": f.k(),
                "s": f.s(),
                "t": f.t(),
                "oneDensity": r(f.one_density()),
                "maxOneDensity": r(f.max_one_density()),
                "strictlyBalanced": f.is_strictly_balanced(),
                "witness": f.balance().witness,
                "automorphisms": f.automorphism_count(),
                "thresholdExponent": r(Pattern::threshold_exponent(f.one_density())),
                "expansion": {
                    "oneDensity": r(exp.one_density),
                    "oneDensityFormula": r(exp.one_density_formula),
                    "maxOneDensity": r(exp.max_one_density),
                    "maxOneDensityFormula": r(exp.max_one_density_formula),
                    "strictlyBalanced": exp.expanded_strictly_balanced,
                    "identitiesHold": exp.identities_hold,
                    "implicationHolds": exp.implication_holds,
                },
            })))
        }
        Command::Cluster {
            system,
            config,
            seed,
        } => {
            let sys = load_system(system)?;
            let cfg = ClusterFileConfig::load(config)?;
            let out = sample_system_clusters(&sys, &cfg, &mut RngSpec::new(*seed).rng())?;
            Ok(to_pretty_json(&json!({
                "U": out.partition.u,
                "W": out.partition.w,
                "certificates": out.partition.certificates,
                "bad": out.bad,
                "audit": out.audit,
            })))
        }
        Command::Embed {
            system,
            pattern,
            config,
            seed,
        } => {
            let sys = load_system(system)?;
            let f = pattern.load()?;
            let cfg = PipelineConfig::new(ClusterFileConfig::load(config)?);
            let out = embed_via_clusters(&sys, &f, &cfg, &mut RngSpec::new(*seed).rng())?;
            Ok(to_pretty_json(&out.embedding))
        }
        Command::Count { system, pattern } => {
            let c = count_transversal_factors(&load_system(system)?, &pattern.load()?)?;
            Ok(to_pretty_json(&json!({
                "unordered": c.unordered.to_string(),
                "labeled": c.labeled.to_string(),
                "vertexFactors": c.vertex_factors,
            })))
        }
        Command::SpreadTest {
            n,
            trials,
            max_set_size,
            q,
            sampler,
            seed,
        } => {
            let n = *n;
            if n == 0 {
                return Err(Error::param("n must be positive"));
            }
            let q = q.unwrap_or(std::f64::consts::E / n as f64);
            let host: Vec<Vec<usize>> = (0..n)
                .flat_map(|a| (0..n).map(move |b| vec![a, n + b]))
                .collect();
            let cfg = SpreadAuditConfig::new(q, *max_set_size, *trials);
            let kind = *sampler;
            let draw = move |rng: &mut ChaCha8Rng| -> Result<Vec<Vec<usize>>> {
                let perm = match kind {
                    SamplerKind::Uniform => uniform_pm_complete(n, rng).as_permutation(),
                    SamplerKind::PointMass => (0..n).collect(),
                };
                Ok(perm
                    .iter()
                    .enumerate()
                    .map(|(a, &b)| vec![a, n + b])
                    .collect())
            };
            Ok(to_pretty_json(&spread_audit(
                draw,
                &host,
                &cfg,
                RngSpec::new(*seed),
            )?))
        }
        Command::GlueDemo {
            k,
            n,
            density,
            classes,
            eps,
            seed,
        } => {
            if *k < 2 || *n == 0 || !(0.0..=1.0).contains(density) {
                return Err(Error::param("need k >= 2, n >= 1 and density in [0, 1]"));
            }
            let parts: Vec<Vec<usize>> = (0..*k).map(|p| (p * n..(p + 1) * n).collect()).collect();
            let mut rng = RngSpec::new(*seed).rng();
            let mut coin = RngSpec::new(*seed).child(1).rng();
            let h = PartiteHypergraph::from_predicate(parts, |_| coin.random::<f64>() < *density)?;
            let out = pikhurko_glue(&h, classes, &GlueConfig::new(*eps), &mut rng)?;
            Ok(to_pretty_json(&json!({
                "matching": out.matching.edges,
                "valid": out.matching.is_perfect_in(&h),
                "diagnostics": out.diagnostics,
            })))
        }
        Command::Threshold {
            config,
            out,
            general,
        } => {
            let cfg = ExperimentConfig::from_file(config)?;
            let base = config_dir(config);
            let res = if *general {
                run_general_sweep_m1(&cfg, &base)?
            } else {
                run_threshold_sweep(&cfg, &base)?
            };
            save_sweep(&res, out)?;
            Ok(to_pretty_json(&res.curve))
        }
        Command::Robustness { config, out } => {
            let cfg = ExperimentConfig::from_file(config)?;
            let res = end_to_end_robustness(&cfg, &config_dir(config))?;
            save_robustness(&res, out)?;
            Ok(to_pretty_json(&res.points))
        }
        Command::Bounds {
            kind,
            a,
            mean,
            c,
            r,
            t,
            alpha,
            ell,
            gap,
        } => {
            let q = match kind {
                BoundKind::ChernoffUpper => BoundQuery::ChernoffUpper {
                    a: need(*a, "a")?,
                    mean: need(*mean, "mean")?,
                },
                BoundKind::ChernoffLower => BoundQuery::ChernoffLower {
                    a: need(*a, "a")?,
                    mean: need(*mean, "mean")?,
                },
                BoundKind::Mcdiarmid => BoundQuery::Mcdiarmid {
                    c: need(*c, "c")?,
                    r: need(*r, "r")?,
                    t: need(*t, "t")?,
                    mean: need(*mean, "mean")?,
                },
                BoundKind::Subset => BoundQuery::Subset {
                    alpha: need(*alpha, "alpha")?,
                },
                BoundKind::Degree => BoundQuery::Degree {
                    ell: need(*ell, "ell")?,
                    gap: need(*gap, "gap")?,
                },
            };
            Ok(to_pretty_json(&evaluate(&q)?))
        }
    }
}

/// Exit status for an error: 2 for bad requests, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_usage() {
        2
    } else {
        1
    }
}
