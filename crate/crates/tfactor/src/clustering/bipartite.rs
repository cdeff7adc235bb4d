use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::plan::BipartiteClusterPlan;
use super::system::BadReason;
use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::matchings::{BipartiteGraph, PmSampler};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BipartiteClusterConfig {
    pub c: usize,
    pub eps: f64,
    pub retry_cap: usize,
}

impl BipartiteClusterConfig {
    pub fn new(c: usize, eps: f64) -> Self {
        BipartiteClusterConfig {
            c,
            eps,
            retry_cap: 50,
        }
    }
}

/// One cluster: left and right vertex sets, both sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteCluster {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BipartiteAudit {
    pub attempts: usize,
    pub rejections: Vec<String>,
    pub low_degree_blocks: usize,
    pub many_bad_augment_blocks: usize,
    pub padding: usize,
    /// Minimum degree sums of the two redistribution graphs.
    pub first_round_degree_sum: usize,
    pub second_round_degree_sum: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BipartiteClusterOutcome {
    pub plan: BipartiteClusterPlan,
    pub clusters: Vec<BipartiteCluster>,
    /// Degree sum of each final cluster.
    pub degree_sums: Vec<usize>,
    pub bad: BTreeMap<usize, BadReason>,
    pub audit: BipartiteAudit,
}

struct Adjacency {
    left: Vec<Mask>,
    right: Vec<Mask>,
}

impl Adjacency {
    fn new(g: &BipartiteGraph) -> Self {
        let mut right = vec![Mask::EMPTY; g.right()];
        let left = (0..g.left())
            .map(|a| {
                for &b in g.neighbors(a) {
                    right[b].insert(a);
                }
                Mask::from_iter(g.neighbors(a).iter().copied())
            })
            .collect();
        Adjacency { left, right }
    }

    fn degree_sum(&self, a: &Mask, b: &Mask) -> Option<usize> {
        let d1 = a.iter().map(|x| (self.left[x] & *b).count()).min()?;
        let d2 = b.iter().map(|y| (self.right[y] & *a).count()).min()?;
        Some(d1 + d2)
    }
}

/// Minimum left degree plus minimum right degree of `g[left ∪ right]`, or
/// `None` if either side is empty.
pub fn degree_sum_within(
    g: &BipartiteGraph,
    left: &[usize],
    right: &[usize],
) -> Result<Option<usize>> {
    if g.left().max(g.right()) > crate::mask::MASK_BITS {
        return Err(Error::capacity(
            "bipartite side size",
            g.left().max(g.right()),
            crate::mask::MASK_BITS,
        ));
    }
    let adj = Adjacency::new(g);
    Ok(adj.degree_sum(
        &Mask::from_iter(left.iter().copied()),
        &Mask::from_iter(right.iter().copied()),
    ))
}

fn with(m: &Mask, x: Option<usize>) -> Mask {
    let mut r = *m;
    if let Some(x) = x {
        r.insert(x);
    }
    r
}

/// Random partition of a balanced bipartite graph into clusters with equal
/// sides and degree sum at least `(1 + ε/3)|U|/2`.
pub fn sample_bipartite_clusters<R: Rng + ?Sized>(
    g: &BipartiteGraph,
    cfg: &BipartiteClusterConfig,
    rng: &mut R,
) -> Result<BipartiteClusterOutcome> {
    let n = g.left();
    if g.right() != n {
        return Err(Error::param("bipartite graph must be balanced"));
    }
    if n > crate::mask::MASK_BITS {
        return Err(Error::capacity(
            "bipartite side size",
            n,
            crate::mask::MASK_BITS,
        ));
    }
    let plan = BipartiteClusterPlan::new(n, cfg.c)?;
    let eps = cfg.eps;
    let lhs = g.min_left_degree() + g.min_right_degree();
    if (lhs as f64) < (1.0 + eps) * n as f64 {
        return Err(Error::param(format!(
            "degree sum {} is below (1 + {})n = {}",
            lhs,
            eps,
            (1.0 + eps) * n as f64
        )));
    }
    let adj = Adjacency::new(g);
    let c = cfg.c as f64;
    let nf = n as f64;
    let block_need = (1.0 + eps / 2.0) * (c - 1.0);
    let augment_need = (1.0 + eps / 2.0) * c;
    let final_need = (1.0 + eps / 3.0) * c;
    let bad_count_limit = 2.0 * (-c * eps * eps / 16.0).exp() * nf * nf;
    let partner_need = (1.0 - 2.0 * (-c * eps * eps / 16.0).exp()) * nf;
    let passes = |v: Option<usize>, need: f64| v.is_some_and(|x| x as f64 >= need);
    let mut audit = BipartiteAudit::default();

    for attempt in 1..=cfg.retry_cap {
        audit.attempts = attempt;
        let mut lp: Vec<usize> = (0..n).collect();
        let mut rp: Vec<usize> = (0..n).collect();
        lp.shuffle(rng);
        rp.shuffle(rng);
        let blocks: Vec<(Mask, Mask)> = (0..plan.m_prime)
            .map(|i| {
                let r = plan.block(i);
                (
                    Mask::from_iter(lp[r.clone()].iter().copied()),
                    Mask::from_iter(rp[r].iter().copied()),
                )
            })
            .collect();
        if !passes(
            adj.degree_sum(&blocks[0].0, &blocks[0].1),
            (1.0 + eps / 2.0) * plan.r as f64,
        ) {
            audit.rejections.push("first block: low degree sum".into());
            continue;
        }
        let mut bad = BTreeMap::new();
        for (i, (a, b)) in blocks.iter().enumerate().skip(1) {
            if !passes(adj.degree_sum(a, b), block_need) {
                audit.low_degree_blocks += 1;
                bad.insert(i, BadReason::LowDegree);
                continue;
            }
            let mut count = 0usize;
            for x in (0..n).map(Some).chain([None]) {
                let a2 = with(a, x);
                for y in (0..n).map(Some).chain([None]) {
                    if !passes(adj.degree_sum(&a2, &with(b, y)), augment_need) {
                        count += 1;
                    }
                }
            }
            if count as f64 >= bad_count_limit {
                audit.many_bad_augment_blocks += 1;
                bad.insert(i, BadReason::ManyBadAugments);
            }
        }
        if bad.len() > plan.bad_capacity() {
            audit.rejections.push(format!(
                "too many bad blocks: {} > {}",
                bad.len(),
                plan.bad_capacity()
            ));
            continue;
        }
        let mut spare: Vec<usize> = (1..plan.m_prime).filter(|i| !bad.contains_key(i)).collect();
        spare.shuffle(rng);
        let need = plan.bad_capacity() - bad.len();
        audit.padding = need;
        for &i in &spare[..need] {
            bad.insert(i, BadReason::Padding);
        }
        let good: Vec<usize> = (1..plan.m_prime).filter(|i| !bad.contains_key(i)).collect();
        let left_over: Vec<usize> = bad.keys().flat_map(|&i| blocks[i].0.iter()).collect();
        let right_over: Vec<usize> = bad.keys().flat_map(|&i| blocks[i].1.iter()).collect();

        // first round: leftover left vertices to good blocks
        let h1 = BipartiteGraph::from_fn(left_over.len(), good.len(), |x, j| {
            let (a, b) = &blocks[good[j]];
            let a1 = with(a, Some(left_over[x]));
            if !passes(adj.degree_sum(&a1, b), final_need) {
                return false;
            }
            let partners = (0..n)
                .filter(|&y| passes(adj.degree_sum(&a1, &with(b, Some(y))), final_need))
                .count();
            partners as f64 >= partner_need
        });
        audit.first_round_degree_sum = h1.min_left_degree() + h1.min_right_degree();
        let Some(m1) = PmSampler::new(&h1)?.sample(rng) else {
            audit
                .rejections
                .push("first redistribution: no perfect matching".into());
            continue;
        };
        let mut grown: Vec<(Mask, Mask)> = blocks.clone();
        for &(x, j) in &m1.pairs {
            grown[good[j]].0.insert(left_over[x]);
        }

        // second round: leftover right vertices
        let h2 = BipartiteGraph::from_fn(right_over.len(), good.len(), |y, j| {
            let (a, b) = &grown[good[j]];
            passes(adj.degree_sum(a, &with(b, Some(right_over[y]))), final_need)
        });
        audit.second_round_degree_sum = h2.min_left_degree() + h2.min_right_degree();
        let Some(m2) = PmSampler::new(&h2)?.sample(rng) else {
            audit
                .rejections
                .push("second redistribution: no perfect matching".into());
            continue;
        };
        for &(y, j) in &m2.pairs {
            grown[good[j]].1.insert(right_over[y]);
        }

        let mut clusters = Vec::with_capacity(plan.m);
        let mut degree_sums = Vec::with_capacity(plan.m);
        for i in std::iter::once(0).chain(good.iter().copied()) {
            let (a, b) = &grown[i];
            let ds = adj.degree_sum(a, b).unwrap_or(0);
            if (ds as f64) < (1.0 + eps / 3.0) * a.count() as f64 {
                return Err(Error::integrity(format!(
                    "cluster from block {} fails its degree certificate",
                    i
                )));
            }
            clusters.push(BipartiteCluster {
                left: a.iter().collect(),
                right: b.iter().collect(),
            });
            degree_sums.push(ds);
        }
        validate(&clusters, &plan)?;
        return Ok(BipartiteClusterOutcome {
            plan,
            clusters,
            degree_sums,
            bad,
            audit,
        });
    }
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &audit.rejections {
        *tally.entry(r.split(':').next().unwrap_or(r)).or_insert(0) += 1;
    }
    Err(Error::Failure {
        stage: "bipartite clustering",
        attempts: cfg.retry_cap,
        reason: format!("{:?}", tally),
    })
}

fn validate(clusters: &[BipartiteCluster], plan: &BipartiteClusterPlan) -> Result<()> {
    let mut seen_l = vec![false; plan.n];
    let mut seen_r = vec![false; plan.n];
    for (i, cl) in clusters.iter().enumerate() {
        let want = if i == 0 { plan.r } else { plan.c };
        if cl.left.len() != want || cl.right.len() != want {
            return Err(Error::integrity(format!(
                "cluster {} has sides {}+{}",
                i,
                cl.left.len(),
                cl.right.len()
            )));
        }
        for &a in &cl.left {
            if std::mem::replace(&mut seen_l[a], true) {
                return Err(Error::integrity("left vertex in two clusters"));
            }
        }
        for &b in &cl.right {
            if std::mem::replace(&mut seen_r[b], true) {
                return Err(Error::integrity("right vertex in two clusters"));
            }
        }
    }
    if seen_l.iter().chain(&seen_r).any(|&b| !b) {
        return Err(Error::integrity("clusters miss a vertex"));
    }
    Ok(())
}
