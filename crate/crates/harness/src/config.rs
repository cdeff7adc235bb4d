//! Experiment configuration, read from and written to JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tfactor::clustering::ClusterConfig;
use tfactor::hypercore::io::{parse_hypergraph, parse_system};
use tfactor::hypercore::{binomial, Hypergraph, HypergraphSystem};
use tfactor::patterns::Pattern;
use tfactor::randmodels::{random_system_with_floor, RngSpec};
use tfactor::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum PatternSource {
    Named(String),
    File(PathBuf),
    Inline {
        k: usize,
        n: usize,
        edges: Vec<Vec<usize>>,
    },
}

impl PatternSource {
    /// Relative file paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<Pattern> {
        match self {
            PatternSource::Named(name) => Pattern::named(name),
            PatternSource::File(p) => {
                let text = std::fs::read_to_string(base.join(p))?;
                Pattern::new(parse_hypergraph(&text)?.0)
            }
            PatternSource::Inline { k, n, edges } => {
                Pattern::new(Hypergraph::from_edges(*k, *n, edges.iter().cloned())?)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// Every color is the complete `k`-graph.
    Complete,
    /// Complete colors thinned at random, never letting a `d`-set's degree
    /// drop below `ceil(floorFraction * C(s*n, k-d))`.
    #[serde(rename_all = "camelCase")]
    RandomWithDegreeFloor {
        density: f64,
        d: usize,
        floor_fraction: f64,
    },
    /// A fixed system; only its own `n` is usable.
    FromFile { path: PathBuf },
}

impl GeneratorSpec {
    pub fn floor(&self, k: usize, s: usize, n: usize) -> Option<usize> {
        match *self {
            GeneratorSpec::RandomWithDegreeFloor {
                d, floor_fraction, ..
            } => Some((floor_fraction * binomial(s * n, k - d) as f64).ceil() as usize),
            _ => None,
        }
    }

    pub fn build(
        &self,
        pattern: &Pattern,
        n: usize,
        spec: RngSpec,
        base: &Path,
    ) -> Result<HypergraphSystem> {
        let (k, s, t) = (pattern.k(), pattern.s(), pattern.t());
        match self {
            GeneratorSpec::Complete => HypergraphSystem::complete(k, s, t, n),
            GeneratorSpec::RandomWithDegreeFloor { density, d, .. } => {
                let floor = self.floor(k, s, n).expect("floor generator");
                random_system_with_floor(k, s, t, n, *d, *density, floor, spec)
            }
            GeneratorSpec::FromFile { path } => {
                let sys = parse_system(&std::fs::read_to_string(base.join(path))?)?.0;
                if sys.n() != n || sys.k() != k || sys.s() != s || sys.t() != t {
                    return Err(Error::param(format!(
                        "system file has (k, s, t, n) = ({}, {}, {}, {}), expected ({}, {}, {}, {})",
                        sys.k(),
                        sys.s(),
                        sys.t(),
                        sys.n(),
                        k,
                        s,
                        t,
                        n
                    )));
                }
                Ok(sys)
            }
        }
    }
}

/// Which density sets the reference rate `p0(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BaseRate {
    /// `n^(-1/d1 - 1) (log n)^(1/t)`.
    OneDensity,
    /// `n^(-1/m1 - 1) log n`.
    MaxOneDensity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct ClusteringParams {
    #[serde(rename = "C")]
    pub c: usize,
    pub d: usize,
    pub delta: f64,
    pub alpha: f64,
    pub retry_cap: usize,
    pub augment_samples: usize,
}

impl Default for ClusteringParams {
    fn default() -> Self {
        ClusteringParams {
            c: 3,
            d: 1,
            delta: 0.5,
            alpha: 0.1,
            retry_cap: 50,
            augment_samples: 500,
        }
    }
}

impl ClusteringParams {
    pub fn to_cluster_config(&self) -> ClusterConfig {
        ClusterConfig {
            retry_cap: self.retry_cap,
            augment_samples: self.augment_samples,
            ..ClusterConfig::new(self.c, self.d, self.delta, self.alpha)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct AuditParams {
    /// Spread parameter; `None` means `e / (s n)`.
    pub q: Option<f64>,
    pub max_set_size: usize,
    pub trials: usize,
}

impl Default for AuditParams {
    fn default() -> Self {
        AuditParams {
            q: None,
            max_set_size: 1,
            trials: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pattern: PatternSource,
    pub generator: GeneratorSpec,
    pub n_grid: Vec<usize>,
    /// Absolute edge probabilities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    /// Multiples of `p0(n)`; probabilities above 1 are clipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multipliers: Option<Vec<f64>>,
    #[serde(default = "default_base")]
    pub base_rate: BaseRate,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub clustering: ClusteringParams,
    #[serde(default)]
    pub audit: AuditParams,
    /// Search nodes allowed per solver call; `None` is unlimited.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_limit: Option<u64>,
}

fn default_base() -> BaseRate {
    BaseRate::OneDensity
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Canonical form: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(Error::param("nGrid must be nonempty with positive entries"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if let Some(g) = &self.p_grid {
            if g.is_empty() || g.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::param(
                    "pGrid must be nonempty with entries in [0, 1]",
                ));
            }
        }
        if let Some(g) = &self.multipliers {
            if g.is_empty() || g.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
                return Err(Error::param(
                    "multipliers must be nonempty, finite and nonnegative",
                ));
            }
        }
        if self.p_grid.is_some() && self.multipliers.is_some() {
            return Err(Error::param("give either pGrid or multipliers, not both"));
        }
        if let GeneratorSpec::RandomWithDegreeFloor {
            density,
            floor_fraction,
            ..
        } = self.generator
        {
            if !(0.0..=1.0).contains(&density) || !(0.0..=1.0).contains(&floor_fraction) {
                return Err(Error::param("density and floorFraction must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// Edge probabilities for instance size `n`, ascending.
    pub fn probabilities(&self, pattern: &Pattern, n: usize) -> Result<Vec<f64>> {
        let mut ps = match (&self.p_grid, &self.multipliers) {
            (Some(g), None) => g.clone(),
            (None, Some(m)) => {
                let p0 = reference_rate(pattern, self.base_rate, n);
                m.iter().map(|x| (x * p0).min(1.0)).collect()
            }
            _ => return Err(Error::param("a sweep needs pGrid or multipliers")),
        };
        ps.sort_by(f64::total_cmp);
        Ok(ps)
    }
}

/// The reference rate `p0(n)` of the chosen density.
pub fn reference_rate(pattern: &Pattern, base: BaseRate, n: usize) -> f64 {
    let nf = n as f64;
    let ln = nf.ln().max(f64::MIN_POSITIVE);
    match base {
        BaseRate::OneDensity => {
            let d = pattern.one_density();
            nf.powf(-(*d.denom() as f64) / *d.numer() as f64 - 1.0)
                * ln.powf(1.0 / pattern.t() as f64)
        }
        BaseRate::MaxOneDensity => {
            let m = pattern.max_one_density();
            nf.powf(-(*m.denom() as f64) / *m.numer() as f64 - 1.0) * ln
        }
    }
}
