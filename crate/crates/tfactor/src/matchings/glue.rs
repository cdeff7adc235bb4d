//! Perfect matchings of dense balanced partite hypergraphs by gluing random
//! bipartite matchings along a chain of parts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bipartite::{uniform_pm_complete, BipartiteGraph, PmSampler};
use crate::error::{Error, Result};
use crate::hypercore::PartiteHypergraph;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GlueConfig {
    pub eps: f64,
    /// Resamples allowed per chain link when a matching misses the tolerance.
    pub retry_cap: usize,
}

impl GlueConfig {
    pub fn new(eps: f64) -> Self {
        GlueConfig {
            eps,
            retry_cap: 100,
        }
    }
}

/// A perfect matching of a partite hypergraph, as global edges in part order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartiteMatching {
    pub edges: Vec<Vec<usize>>,
}

impl PartiteMatching {
    pub fn is_perfect_in(&self, h: &PartiteHypergraph) -> bool {
        let n = h.parts()[0].len();
        if h.parts().iter().any(|p| p.len() != n) || self.edges.len() != n {
            return false;
        }
        let mut used = std::collections::HashSet::new();
        self.edges
            .iter()
            .all(|e| h.contains(e) && e.iter().all(|&v| used.insert(v)))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GlueDiagnostics {
    /// Parts in chain order: the chosen classes first.
    pub order: Vec<usize>,
    pub precondition_lhs: f64,
    pub precondition_rhs: f64,
    /// Allowed deviation of a link matching from its expected hit count.
    pub tolerance: f64,
    /// Largest observed deviation over all accepted links.
    pub max_deviation: f64,
    pub link_attempts: Vec<usize>,
    pub chain_identity_ok: bool,
    /// Minimum left plus minimum right degree of the final bipartite graph.
    pub aux_degree_sum: usize,
    pub aux_degree_target: f64,
    pub aux_perfect_matchings: u128,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GlueOutcome {
    pub matching: PartiteMatching,
    /// Glued tuples after each forward link, as global ids in chain order.
    pub forward_chain: Vec<Vec<Vec<usize>>>,
    /// Glued tuples after each backward link, as global ids in chain order.
    pub backward_chain: Vec<Vec<Vec<usize>>>,
    pub diagnostics: GlueDiagnostics,
}

struct Host<'a> {
    h: &'a PartiteHypergraph,
    order: Vec<usize>,
}

impl Host<'_> {
    /// Edge test for a tuple given in chain positions.
    fn edge(&self, chain_vals: &[usize], buf: &mut [usize]) -> bool {
        for (pos, &v) in chain_vals.iter().enumerate() {
            buf[self.order[pos]] = v;
        }
        self.h.contains_local(buf)
    }

    fn global(&self, chain_vals: &[usize], offset: usize) -> Vec<usize> {
        chain_vals
            .iter()
            .enumerate()
            .map(|(i, &v)| self.h.parts()[self.order[offset + i]][v])
            .collect()
    }
}

/// Visits all tuples over `len` positions with values in `0..n`.
fn for_each_tuple(len: usize, n: usize, mut f: impl FnMut(&[usize])) {
    let mut t = vec![0; len];
    loop {
        f(&t);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
        }
    }
}

/// Finds a perfect matching of the balanced partite hypergraph `h`.
///
/// `classes` (0-based part indices) must be a nonempty proper subset of the
/// parts and satisfy the degree-sum precondition with slack `cfg.eps`.
pub fn pikhurko_glue<R: Rng + ?Sized>(
    h: &PartiteHypergraph,
    classes: &[usize],
    cfg: &GlueConfig,
    rng: &mut R,
) -> Result<GlueOutcome> {
    let k = h.k();
    let n = h.parts()[0].len();
    if h.parts().iter().any(|p| p.len() != n) {
        return Err(Error::param("parts must have equal sizes"));
    }
    let mut in_l = vec![false; k];
    for &c in classes {
        if c >= k || in_l[c] {
            return Err(Error::param(format!("bad class list {:?}", classes)));
        }
        in_l[c] = true;
    }
    let l = classes.len();
    if l == 0 || l == k {
        return Err(Error::param(
            "class list must be a nonempty proper subset of the parts",
        ));
    }
    let rest: Vec<usize> = (0..k).filter(|&p| !in_l[p]).collect();
    let deg_l = h.partite_degree(classes)? as f64;
    let deg_rest = h.partite_degree(&rest)? as f64;
    let nf = n as f64;
    let lhs = deg_l * nf.powi(l as i32) + deg_rest * nf.powi((k - l) as i32);
    let rhs = (1.0 + cfg.eps) * nf.powi(k as i32);
    if lhs < rhs {
        return Err(Error::param(format!(
            "degree-sum precondition fails: {} < {} for classes {:?}",
            lhs, rhs, classes
        )));
    }

    let mut order: Vec<usize> = classes.to_vec();
    order.sort_unstable();
    order.extend(rest.iter().copied());
    let host = Host {
        h,
        order: order.clone(),
    };
    let tolerance = if n > 1 {
        (257.0 * k as f64 * nf * nf.ln()).sqrt()
    } else {
        0.0
    };
    let mut buf = vec![0; k];
    let mut max_dev: f64 = 0.0;
    let mut link_attempts = Vec::new();
    let mut identity_ok = true;

    // forward: tuples over positions 0..=i, indexed by their position-i vertex
    let mut fwd: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
    let mut forward_chain = vec![fwd.iter().map(|t| host.global(t, 0)).collect::<Vec<_>>()];
    for i in 1..l {
        let mut attempts = 0;
        let (sigma, dev) = loop {
            attempts += 1;
            let sigma = uniform_pm_complete(n, rng).as_permutation();
            let dev = link_deviation(
                &host,
                &mut buf,
                |x, y, xs: &[usize], out: &mut Vec<usize>| {
                    out.clear();
                    out.extend_from_slice(&fwd[x]);
                    out.push(y);
                    out.extend_from_slice(xs);
                },
                &sigma,
                k - i - 1,
                n,
            );
            if dev <= tolerance {
                break (sigma, dev);
            }
            if attempts >= cfg.retry_cap {
                return Err(Error::Failure {
                    stage: "gluing (forward link)",
                    attempts,
                    reason: format!("deviation {} exceeds tolerance {}", dev, tolerance),
                });
            }
        };
        link_attempts.push(attempts);
        max_dev = max_dev.max(dev);
        let mut next = vec![Vec::new(); n];
        for (x, t) in fwd.iter().enumerate() {
            let mut nt = t.clone();
            nt.push(sigma[x]);
            next[sigma[x]] = nt;
        }
        let mut prefixes: Vec<&[usize]> = next.iter().map(|t| &t[..i]).collect();
        let mut old: Vec<&[usize]> = fwd.iter().map(|t| t.as_slice()).collect();
        prefixes.sort();
        old.sort();
        identity_ok &= prefixes == old;
        fwd = next;
        forward_chain.push(fwd.iter().map(|t| host.global(t, 0)).collect());
    }

    // backward: tuples over positions j..k, indexed by their position-j vertex
    let mut bwd: Vec<Vec<usize>> = (0..n).map(|y| vec![y]).collect();
    let mut backward_chain = vec![bwd
        .iter()
        .map(|t| host.global(t, k - 1))
        .collect::<Vec<_>>()];
    for j in (l + 1..k).rev() {
        let mut attempts = 0;
        let (tau, dev) = loop {
            attempts += 1;
            // tau maps a position-j vertex to its position-(j-1) partner
            let tau = uniform_pm_complete(n, rng).as_permutation();
            let dev = link_deviation(
                &host,
                &mut buf,
                |y, x, xs: &[usize], out: &mut Vec<usize>| {
                    out.clear();
                    out.extend_from_slice(xs);
                    out.push(x);
                    out.extend_from_slice(&bwd[y]);
                },
                &tau,
                j - 1,
                n,
            );
            if dev <= tolerance {
                break (tau, dev);
            }
            if attempts >= cfg.retry_cap {
                return Err(Error::Failure {
                    stage: "gluing (backward link)",
                    attempts,
                    reason: format!("deviation {} exceeds tolerance {}", dev, tolerance),
                });
            }
        };
        link_attempts.push(attempts);
        max_dev = max_dev.max(dev);
        let mut next = vec![Vec::new(); n];
        for (y, t) in bwd.iter().enumerate() {
            let mut nt = vec![tau[y]];
            nt.extend_from_slice(t);
            next[tau[y]] = nt;
        }
        let mut suffixes: Vec<&[usize]> = next.iter().map(|t| &t[1..]).collect();
        let mut old: Vec<&[usize]> = bwd.iter().map(|t| t.as_slice()).collect();
        suffixes.sort();
        old.sort();
        identity_ok &= suffixes == old;
        bwd = next;
        backward_chain.push(bwd.iter().map(|t| host.global(t, j - 1)).collect());
    }

    let mut tuple = Vec::with_capacity(k);
    let aux = BipartiteGraph::from_fn(n, n, |a, b| {
        tuple.clear();
        tuple.extend_from_slice(&fwd[a]);
        tuple.extend_from_slice(&bwd[b]);
        host.edge(&tuple, &mut buf)
    });
    let aux_degree_sum = aux.min_left_degree() + aux.min_right_degree();
    let sampler = PmSampler::new(&aux)?;
    let pm = sampler.sample(rng).ok_or_else(|| Error::Failure {
        stage: "gluing (final bipartite matching)",
        attempts: 1,
        reason: format!(
            "auxiliary graph has no perfect matching (degree sum {})",
            aux_degree_sum
        ),
    })?;
    let mut edges = Vec::with_capacity(n);
    for (a, b) in pm.pairs {
        tuple.clear();
        tuple.extend_from_slice(&fwd[a]);
        tuple.extend_from_slice(&bwd[b]);
        let mut local = vec![0; k];
        for (pos, &v) in tuple.iter().enumerate() {
            local[order[pos]] = v;
        }
        edges.push(h.globalize(&local));
    }
    edges.sort();
    let matching = PartiteMatching { edges };
    if !matching.is_perfect_in(h) {
        return Err(Error::integrity(
            "glued matching is not a perfect matching of the host",
        ));
    }
    Ok(GlueOutcome {
        matching,
        forward_chain,
        backward_chain,
        diagnostics: GlueDiagnostics {
            order,
            precondition_lhs: lhs,
            precondition_rhs: rhs,
            tolerance,
            max_deviation: max_dev,
            link_attempts,
            chain_identity_ok: identity_ok,
            aux_degree_sum,
            aux_degree_target: (1.0 + cfg.eps / 2.0) * nf,
            aux_perfect_matchings: sampler.total(),
        },
    })
}

/// Largest deviation, over all tuples `xs` on the `free` remaining positions,
/// between the number of matching pairs completing to an edge and `1/n` of the
/// number of all such pairs. `build(a, b, xs, out)` writes the chain tuple for
/// the pair `(a, b)`.
fn link_deviation(
    host: &Host,
    buf: &mut [usize],
    build: impl Fn(usize, usize, &[usize], &mut Vec<usize>),
    perm: &[usize],
    free: usize,
    n: usize,
) -> f64 {
    let mut tuple = Vec::new();
    let mut worst: f64 = 0.0;
    for_each_tuple(free, n, |xs| {
        let mut all = 0usize;
        let mut hit = 0usize;
        for a in 0..n {
            for b in 0..n {
                build(a, b, xs, &mut tuple);
                if host.edge(&tuple, buf) {
                    all += 1;
                    if perm[a] == b {
                        hit += 1;
                    }
                }
            }
        }
        worst = worst.max((hit as f64 - all as f64 / n as f64).abs());
    });
    worst
}
