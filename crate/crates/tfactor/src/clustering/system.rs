use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::degree_requirement;
use super::plan::SystemClusterPlan;
use crate::error::{Error, Result};
use crate::hypercore::{HypergraphSystem, PartiteHypergraph, SystemIndex};
use crate::matchings::{pikhurko_glue, GlueConfig, GlueDiagnostics};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub c: usize,
    /// Degree order of the minimum-degree condition.
    pub d: usize,
    pub delta: f64,
    pub alpha: f64,
    /// Fresh permutation pairs tried before giving up.
    pub retry_cap: usize,
    /// Random augment pairs used to estimate the bad-augment fraction.
    pub augment_samples: usize,
    /// One-sided error level of the bad-augment estimate.
    pub augment_confidence: f64,
}

impl ClusterConfig {
    pub fn new(c: usize, d: usize, delta: f64, alpha: f64) -> Self {
        ClusterConfig {
            c,
            d,
            delta,
            alpha,
            retry_cap: 50,
            augment_samples: 500,
            augment_confidence: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterCertificate {
    /// Minimum `d`-degree over the cluster's colors; `None` for an empty color set.
    pub min_degree: Option<usize>,
    pub required: usize,
    pub passes: bool,
}

/// Vertex sets `U` and color sets `W` of the final clusters. Cluster 0 is the
/// enlarged first block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterPartition {
    #[serde(rename = "U")]
    pub u: Vec<Vec<usize>>,
    #[serde(rename = "W")]
    pub w: Vec<Vec<usize>>,
    pub certificates: Vec<ClusterCertificate>,
}

impl ClusterPartition {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Index of the cluster holding vertex `v`.
    pub fn cluster_of_vertex(&self, v: usize) -> Option<usize> {
        self.u.iter().position(|c| c.contains(&v))
    }

    pub fn cluster_of_color(&self, c: usize) -> Option<usize> {
        self.w.iter().position(|w| w.contains(&c))
    }

    /// Checks that `U` and `W` partition `0..vertices` and `0..colors`.
    pub fn is_exact(&self, vertices: usize, colors: usize) -> bool {
        covers(&self.u, vertices) && covers(&self.w, colors)
    }
}

fn covers(sets: &[Vec<usize>], n: usize) -> bool {
    let mut seen = vec![false; n];
    for s in sets {
        for &x in s {
            if x >= n || seen[x] {
                return false;
            }
            seen[x] = true;
        }
    }
    seen.into_iter().all(|b| b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BadReason {
    LowDegree,
    ManyBadAugments,
    Padding,
}

/// Raw blocks removed before redistribution, keyed by block index (block 0 is
/// never a member).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadClusterFamily {
    pub members: BTreeMap<usize, BadReason>,
}

impl BadClusterFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn count(&self, reason: BadReason) -> usize {
        self.members.values().filter(|&&r| r == reason).count()
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ClusterAudit {
    pub attempts: usize,
    /// Why each rejected attempt was rejected.
    pub rejections: Vec<String>,
    /// Non-first blocks that failed the low-degree test, over all attempts.
    pub low_degree_blocks: usize,
    pub blocks_examined: usize,
    pub many_bad_augment_blocks: usize,
    /// Fraction threshold for the bad-augment test.
    pub bad_augment_threshold: f64,
    /// Largest estimated bad-augment fraction over examined blocks.
    pub max_bad_augment_fraction: f64,
    pub padding: usize,
    pub aux_edges: usize,
    pub aux_tuples: usize,
    /// Set when some certificate was evaluated over an empty color set.
    pub empty_color_sets: bool,
    pub glue: Option<GlueDiagnostics>,
}

impl ClusterAudit {
    /// Fraction of examined non-first blocks that lost minimum degree.
    pub fn inheritance_failure_rate(&self) -> f64 {
        if self.blocks_examined == 0 {
            0.0
        } else {
            self.low_degree_blocks as f64 / self.blocks_examined as f64
        }
    }

    fn summary(&self) -> String {
        let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &self.rejections {
            *tally.entry(r.split(':').next().unwrap_or(r)).or_insert(0) += 1;
        }
        let parts: Vec<String> = tally.iter().map(|(k, v)| format!("{} x{}", k, v)).collect();
        format!(
            "{}; inheritance failure rate {:.3}",
            parts.join(", "),
            self.inheritance_failure_rate()
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterOutcome {
    pub plan: SystemClusterPlan,
    pub partition: ClusterPartition,
    pub bad: BadClusterFamily,
    pub audit: ClusterAudit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InheritanceVerdict {
    pub holds: bool,
    pub min_degree: Option<usize>,
    pub required: usize,
}

/// Minimum-degree tests on sub-systems of one fixed system.
pub struct InheritanceChecker {
    index: SystemIndex,
    k: usize,
    d: usize,
    fraction: f64,
}

impl InheritanceChecker {
    /// Tests against `fraction * C(|U| - d, k - d)`.
    pub fn new(sys: &HypergraphSystem, d: usize, fraction: f64) -> Result<Self> {
        if d == 0 || d >= sys.k() {
            return Err(Error::param(format!(
                "degree order d = {} must lie in 1..k-1",
                d
            )));
        }
        Ok(InheritanceChecker {
            index: SystemIndex::new(sys)?,
            k: sys.k(),
            d,
            fraction,
        })
    }

    pub fn required(&self, vertices: usize) -> usize {
        degree_requirement(
            self.fraction,
            vertices.saturating_sub(self.d),
            self.k - self.d,
        )
    }

    /// Exact minimum degree and verdict. An empty color set holds vacuously.
    pub fn verdict(&self, vertices: &[usize], colors: &[usize]) -> InheritanceVerdict {
        let required = self.required(vertices.len());
        let min_degree = self.index.min_degree_within(self.d, vertices, colors);
        InheritanceVerdict {
            holds: min_degree.is_none_or(|m| m >= required),
            min_degree,
            required,
        }
    }

    /// Verdict only, stopping at the first violation.
    pub fn holds(&self, vertices: &[usize], colors: &[usize]) -> bool {
        self.index
            .min_degree_at_least(self.d, vertices, colors, self.required(vertices.len()))
    }
}

fn merged(base: &[usize], extra: &[usize]) -> Vec<usize> {
    let mut v = base.to_vec();
    v.extend_from_slice(extra);
    v.sort_unstable();
    v.dedup();
    v
}

/// Does the cluster `(vertices, colors)` augmented by `aug_vertices` and
/// `aug_colors` keep minimum `d`-degree `(δ + α/2) C(|V ∪ S| - d, k - d)`?
pub fn degree_inheritance_check(
    sys: &HypergraphSystem,
    d: usize,
    vertices: &[usize],
    colors: &[usize],
    aug_vertices: &[usize],
    aug_colors: &[usize],
    delta: f64,
    alpha: f64,
) -> Result<InheritanceVerdict> {
    if aug_vertices.len() > sys.s() || aug_colors.len() > sys.t() {
        return Err(Error::param(
            "augments may hold at most s vertices and t colors",
        ));
    }
    let checker = InheritanceChecker::new(sys, d, delta + alpha / 2.0)?;
    Ok(checker.verdict(&merged(vertices, aug_vertices), &merged(colors, aug_colors)))
}

fn chunks(perm: &[usize], plan: &SystemClusterPlan, vertex: bool) -> Vec<Vec<usize>> {
    (0..plan.m_prime)
        .map(|i| {
            let r = if vertex {
                plan.vertex_block(i)
            } else {
                plan.color_block(i)
            };
            let mut b = perm[r].to_vec();
            b.sort_unstable();
            b
        })
        .collect()
}

/// Random cluster partition of `sys` with every cluster keeping minimum
/// `d`-degree `(δ + α/2)` of the complete value.
pub fn sample_system_clusters<R: Rng + ?Sized>(
    sys: &HypergraphSystem,
    cfg: &ClusterConfig,
    rng: &mut R,
) -> Result<ClusterOutcome> {
    let (k, s, t) = (sys.k(), sys.s(), sys.t());
    let plan = SystemClusterPlan::new(s, t, sys.n(), cfg.c)?;
    if cfg.alpha <= 0.0 || cfg.delta < 0.0 {
        return Err(Error::param("need alpha > 0 and delta >= 0"));
    }
    let nv = sys.vertex_count();
    let nc = sys.color_count();
    let all: Vec<usize> = (0..nv).collect();
    let top = InheritanceChecker::new(sys, cfg.d, cfg.delta + cfg.alpha)?;
    let whole = top.verdict(&all, &(0..nc).collect::<Vec<_>>());
    if !whole.holds {
        return Err(Error::param(format!(
            "minimum {}-degree {:?} is below the required {}",
            cfg.d, whole.min_degree, whole.required
        )));
    }
    let checker = InheritanceChecker::new(sys, cfg.d, cfg.delta + cfg.alpha / 2.0)?;
    let full_size = s * cfg.c;
    let bad_threshold = (-(full_size as f64) * cfg.alpha * cfg.alpha / 500.0).exp();
    let margin = if cfg.augment_samples == 0 {
        0.0
    } else {
        ((1.0 / cfg.augment_confidence).ln() / (2.0 * cfg.augment_samples as f64)).sqrt()
    };
    let mut audit = ClusterAudit {
        bad_augment_threshold: bad_threshold,
        ..Default::default()
    };
    let colors_all: Vec<usize> = (0..nc).collect();

    for attempt in 1..=cfg.retry_cap {
        audit.attempts = attempt;
        let mut vperm = all.clone();
        vperm.shuffle(rng);
        let mut cperm = colors_all.clone();
        cperm.shuffle(rng);
        let vb = chunks(&vperm, &plan, true);
        let cb = chunks(&cperm, &plan, false);

        if !checker.holds(&vb[0], &cb[0]) {
            audit
                .rejections
                .push("first block: low minimum degree".into());
            continue;
        }

        let mut members = BTreeMap::new();
        for i in 1..plan.m_prime {
            audit.blocks_examined += 1;
            if !checker.holds(&vb[i], &cb[i]) {
                audit.low_degree_blocks += 1;
                members.insert(i, BadReason::LowDegree);
                continue;
            }
            if cfg.augment_samples > 0 {
                let mut bad = 0usize;
                for _ in 0..cfg.augment_samples {
                    let sv: Vec<usize> = all.choose_multiple(rng, s).copied().collect();
                    let sc: Vec<usize> = colors_all.choose_multiple(rng, t).copied().collect();
                    if !checker.holds(&merged(&vb[i], &sv), &merged(&cb[i], &sc)) {
                        bad += 1;
                    }
                }
                let frac = bad as f64 / cfg.augment_samples as f64;
                audit.max_bad_augment_fraction = audit.max_bad_augment_fraction.max(frac);
                if frac - margin >= bad_threshold {
                    audit.many_bad_augment_blocks += 1;
                    members.insert(i, BadReason::ManyBadAugments);
                }
            }
        }
        if members.len() > plan.bad_capacity() {
            audit.rejections.push(format!(
                "too many bad blocks: {} > {}",
                members.len(),
                plan.bad_capacity()
            ));
            continue;
        }
        let mut spare: Vec<usize> = (1..plan.m_prime)
            .filter(|i| !members.contains_key(i))
            .collect();
        spare.shuffle(rng);
        let need = plan.bad_capacity() - members.len();
        audit.padding = need;
        for &i in &spare[..need] {
            members.insert(i, BadReason::Padding);
        }
        let good: Vec<usize> = (1..plan.m_prime)
            .filter(|i| !members.contains_key(i))
            .collect();
        let g = good.len();
        debug_assert_eq!(g, plan.m - 1);

        let mut left_v: Vec<usize> = members
            .keys()
            .flat_map(|&i| vb[i].iter().copied())
            .collect();
        let mut left_c: Vec<usize> = members
            .keys()
            .flat_map(|&i| cb[i].iter().copied())
            .collect();
        left_v.shuffle(rng);
        left_c.shuffle(rng);
        let mut parts: Vec<Vec<usize>> = vec![good.clone()];
        for j in 0..s {
            parts.push(
                left_v[j * g..(j + 1) * g]
                    .iter()
                    .map(|&v| plan.m_prime + v)
                    .collect(),
            );
        }
        for j in 0..t {
            parts.push(
                left_c[j * g..(j + 1) * g]
                    .iter()
                    .map(|&c| plan.m_prime + nv + c)
                    .collect(),
            );
        }
        let aux = PartiteHypergraph::from_predicate(parts, |tuple| {
            let i = good[tuple[0]];
            let mut u = vb[i].clone();
            u.extend((0..s).map(|j| left_v[j * g + tuple[1 + j]]));
            let mut w = cb[i].clone();
            w.extend((0..t).map(|j| left_c[j * g + tuple[1 + s + j]]));
            u.sort_unstable();
            w.sort_unstable();
            checker.holds(&u, &w)
        })?;
        audit.aux_edges = aux.edge_count();
        audit.aux_tuples = aux.tuple_count();
        let glued = match pikhurko_glue(&aux, &[0], &GlueConfig::new(cfg.alpha), rng) {
            Ok(o) => o,
            Err(e @ Error::Capacity { .. }) | Err(e @ Error::Integrity(_)) => return Err(e),
            Err(e) => {
                audit.rejections.push(format!("auxiliary matching: {}", e));
                continue;
            }
        };

        let mut u = vec![vb[0].clone()];
        let mut w = vec![cb[0].clone()];
        let mut by_cluster: BTreeMap<usize, &Vec<usize>> = BTreeMap::new();
        for e in &glued.matching.edges {
            by_cluster.insert(e[0], e);
        }
        for &i in &good {
            let e = by_cluster[&i];
            let mut ui = vb[i].clone();
            ui.extend(e[1..=s].iter().map(|&x| x - plan.m_prime));
            let mut wi = cb[i].clone();
            wi.extend(e[s + 1..].iter().map(|&x| x - plan.m_prime - nv));
            ui.sort_unstable();
            wi.sort_unstable();
            u.push(ui);
            w.push(wi);
        }
        audit.glue = Some(glued.diagnostics);

        let certificates: Vec<ClusterCertificate> = u
            .iter()
            .zip(&w)
            .map(|(ui, wi)| {
                let v = checker.verdict(ui, wi);
                if wi.is_empty() {
                    audit.empty_color_sets = true;
                }
                ClusterCertificate {
                    min_degree: v.min_degree,
                    required: v.required,
                    passes: v.holds,
                }
            })
            .collect();
        let partition = ClusterPartition { u, w, certificates };
        validate(&partition, &plan, nv, nc, k)?;
        return Ok(ClusterOutcome {
            plan,
            partition,
            bad: BadClusterFamily { members },
            audit,
        });
    }
    Err(Error::Failure {
        stage: "system clustering",
        attempts: cfg.retry_cap,
        reason: audit.summary(),
    })
}

fn validate(
    p: &ClusterPartition,
    plan: &SystemClusterPlan,
    nv: usize,
    nc: usize,
    k: usize,
) -> Result<()> {
    if !p.is_exact(nv, nc) {
        return Err(Error::integrity(
            "clusters do not partition the vertices and colors",
        ));
    }
    if p.len() != plan.m || p.u[0].len() != plan.r1 || p.w[0].len() != plan.r2 {
        return Err(Error::integrity(
            "first cluster or cluster count has the wrong size",
        ));
    }
    for i in 1..p.len() {
        if p.u[i].len() != plan.s * plan.c || p.w[i].len() != plan.t * plan.c {
            return Err(Error::integrity(format!(
                "cluster {} has the wrong size",
                i
            )));
        }
    }
    if let Some(i) = p.certificates.iter().position(|c| !c.passes) {
        return Err(Error::integrity(format!(
            "cluster {} fails its degree certificate (k = {})",
            i, k
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercore::Hypergraph;
    use crate::randmodels::RngSpec;

    #[test]
    fn complete_system_is_all_padding() {
        let sys = HypergraphSystem::complete(2, 3, 3, 24).unwrap();
        let cfg = ClusterConfig {
            augment_samples: 50,
            ..ClusterConfig::new(3, 1, 0.5, 0.1)
        };
        let out = sample_system_clusters(&sys, &cfg, &mut RngSpec::new(3).rng()).unwrap();
        assert_eq!(out.bad.len(), 3);
        assert_eq!(out.bad.count(BadReason::Padding), 3);
        assert_eq!(out.partition.len(), 7);
        assert!(out.partition.certificates.iter().all(|c| c.passes));
        assert_eq!(out.audit.attempts, 1);
    }

    #[test]
    fn low_codegree_pair_is_detected() {
        // 12 vertices, k = 3: drop every edge through {0, 1} in color 0.
        let full = Hypergraph::complete(3, 12).unwrap();
        let mut holed = full.clone();
        for z in 2..12 {
            holed.remove(&[0, 1, z]);
        }
        let sys = HypergraphSystem::new(
            3,
            3,
            3,
            4,
            vec![
                holed,
                full.clone(),
                full.clone(),
                full.clone(),
                full.clone(),
                full.clone(),
                full.clone(),
                full.clone(),
                full.clone(),
                full.clone(),
                full.clone(),
                full,
            ],
        )
        .unwrap();
        let verts: Vec<usize> = (0..12).collect();
        let v = degree_inheritance_check(&sys, 2, &verts, &[0, 1], &[], &[], 0.5, 0.1).unwrap();
        assert!(!v.holds);
        assert_eq!(v.min_degree, Some(0));
        assert_eq!(v.required, 6);
        assert!(
            degree_inheritance_check(&sys, 2, &verts, &[1, 2], &[], &[], 0.5, 0.1)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn empty_colors_hold_vacuously() {
        let sys = HypergraphSystem::complete(2, 2, 1, 3).unwrap();
        let v = degree_inheritance_check(&sys, 1, &[0, 1, 2], &[], &[], &[], 0.9, 0.1).unwrap();
        assert!(v.holds);
        assert_eq!(v.min_degree, None);
    }

    #[test]
    fn too_sparse_is_a_parameter_error() {
        let colors = vec![Hypergraph::new(2, 72).unwrap(); 72];
        let sys = HypergraphSystem::new(2, 3, 3, 24, colors).unwrap();
        let err = sample_system_clusters(
            &sys,
            &ClusterConfig::new(3, 1, 0.5, 0.1),
            &mut RngSpec::new(0).rng(),
        );
        assert!(matches!(err, Err(Error::Parameter(_))));
    }
}
