use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercore::{CodegreeIndex, Hypergraph};
use crate::mask::Mask;

/// Placement order and per-step edge checks for mapping a pattern.
struct Plan {
    order: Vec<usize>,
    /// For step `i`, pattern edges (as vertex lists) whose last placed vertex
    /// is `order[i]`, with `order[i]` removed.
    closing: Vec<Vec<Vec<usize>>>,
}

fn plan(pattern: &Hypergraph, pinned: &[usize]) -> Plan {
    let s = pattern.n();
    let edges: Vec<&[usize]> = pattern.edges().collect();
    let mut placed = vec![false; s];
    let mut order = Vec::with_capacity(s);
    for &p in pinned {
        if !placed[p] {
            placed[p] = true;
            order.push(p);
        }
    }
    while order.len() < s {
        // most edges into the placed set first, then highest degree, then lowest id
        let next = (0..s)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let touching = edges.iter().filter(|e| e.contains(&v));
                let into = touching
                    .clone()
                    .filter(|e| e.iter().any(|&u| placed[u]))
                    .count();
                (into, touching.count(), std::cmp::Reverse(v))
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    let mut step_of = vec![0; s];
    for (i, &v) in order.iter().enumerate() {
        step_of[v] = i;
    }
    let mut closing = vec![Vec::new(); s];
    for e in &edges {
        let last = *e.iter().max_by_key(|&&v| step_of[v]).unwrap();
        closing[step_of[last]].push(e.iter().copied().filter(|&v| v != last).collect());
    }
    Plan { order, closing }
}

/// Enumerates injective maps `pattern -> host` sending edges to edges, with
/// images inside `allowed` and the given `(pattern vertex, host vertex)` pins.
/// `f` receives the map indexed by pattern vertex and returns `false` to stop.
/// Returns `false` iff stopped early.
pub fn for_each_injection(
    pattern: &Hypergraph,
    host: &CodegreeIndex,
    allowed: Mask,
    pins: &[(usize, usize)],
    mut f: impl FnMut(&[usize]) -> bool,
) -> bool {
    debug_assert_eq!(pattern.k(), host.k());
    let pinned: Vec<usize> = pins.iter().map(|&(p, _)| p).collect();
    let pl = plan(pattern, &pinned);
    let mut map = vec![usize::MAX; pattern.n()];
    let mut pin_of = vec![usize::MAX; pattern.n()];
    for &(p, h) in pins {
        if pin_of[p] != usize::MAX && pin_of[p] != h {
            return true;
        }
        pin_of[p] = h;
    }
    let mut key = Vec::with_capacity(pattern.k());
    rec(&pl, host, allowed, &pin_of, 0, &mut map, &mut key, &mut f)
}

#[allow(clippy::too_many_arguments)]
fn rec(
    pl: &Plan,
    host: &CodegreeIndex,
    free: Mask,
    pin_of: &[usize],
    step: usize,
    map: &mut Vec<usize>,
    key: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if step == pl.order.len() {
        return f(map);
    }
    let p = pl.order[step];
    let mut cand = free;
    for rest in &pl.closing[step] {
        key.clear();
        key.extend(rest.iter().map(|&u| map[u]));
        key.sort_unstable();
        cand &= host.completions(key);
        if cand.is_empty() {
            return true;
        }
    }
    if pin_of[p] != usize::MAX {
        let h = pin_of[p];
        if !cand.contains(h) {
            return true;
        }
        cand = Mask::from_iter([h]);
    }
    for h in cand.iter() {
        map[p] = h;
        let mut next = free;
        next.remove(h);
        if !rec(pl, host, next, pin_of, step + 1, map, key, f) {
            map[p] = usize::MAX;
            return false;
        }
    }
    map[p] = usize::MAX;
    true
}

/// Number of edge-preserving injections of `pattern` into `host`.
pub fn count_injections(pattern: &Hypergraph, host: &Hypergraph) -> Result<u64> {
    if pattern.k() != host.k() {
        return Err(Error::param("pattern and host have different uniformity"));
    }
    let idx = CodegreeIndex::new(host)?;
    let mut count = 0u64;
    for_each_injection(pattern, &idx, Mask::prefix(host.n()), &[], |_| {
        count += 1;
        true
    });
    Ok(count)
}

/// All automorphisms of `h`, as vertex permutations.
pub fn automorphisms(h: &Hypergraph) -> Result<Vec<Vec<usize>>> {
    let idx = CodegreeIndex::new(h)?;
    let mut out = Vec::new();
    for_each_injection(h, &idx, Mask::prefix(h.n()), &[], |m| {
        out.push(m.to_vec());
        true
    });
    Ok(out)
}

/// One copy of a pattern in a host: its vertex set and its image edge set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CopyRecord {
    pub vertices: Vec<usize>,
    pub edges: Vec<Vec<usize>>,
}

/// The multiset of vertex sets of all copies of a pattern in a host.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorComplex {
    pub host_vertices: usize,
    pub arity: usize,
    pub copies: Vec<CopyRecord>,
}

impl FactorComplex {
    /// Enumerates the copies of `pattern` in `host`. Each copy is produced by
    /// exactly `|Aut(pattern)|` injections, which the count check confirms.
    pub fn build(host: &Hypergraph, pattern: &Hypergraph) -> Result<Self> {
        if pattern.k() != host.k() {
            return Err(Error::param("pattern and host have different uniformity"));
        }
        let idx = CodegreeIndex::new(host)?;
        let pedges: Vec<&[usize]> = pattern.edges().collect();
        let mut seen: BTreeMap<CopyRecord, usize> = BTreeMap::new();
        for_each_injection(pattern, &idx, Mask::prefix(host.n()), &[], |m| {
            let mut vertices = m.to_vec();
            vertices.sort_unstable();
            let mut edges: Vec<Vec<usize>> = pedges
                .iter()
                .map(|e| {
                    let mut x: Vec<usize> = e.iter().map(|&v| m[v]).collect();
                    x.sort_unstable();
                    x
                })
                .collect();
            edges.sort();
            *seen.entry(CopyRecord { vertices, edges }).or_insert(0) += 1;
            true
        });
        let aut = automorphisms(pattern)?.len();
        if let Some((c, &k)) = seen.iter().find(|(_, &k)| k != aut) {
            return Err(Error::integrity(format!(
                "copy {:?} reached by {} injections, |Aut| = {}",
                c, k, aut
            )));
        }
        Ok(FactorComplex {
            host_vertices: host.n(),
            arity: pattern.n(),
            copies: seen.into_keys().collect(),
        })
    }

    pub fn copy_count(&self) -> usize {
        self.copies.len()
    }

    /// Vertex set multiplicities.
    pub fn multiplicities(&self) -> BTreeMap<Vec<usize>, usize> {
        let mut out = BTreeMap::new();
        for c in &self.copies {
            *out.entry(c.vertices.clone()).or_insert(0) += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangles_in_k5() {
        let k3 = Hypergraph::complete(2, 3).unwrap();
        let k5 = Hypergraph::complete(2, 5).unwrap();
        assert_eq!(count_injections(&k3, &k5).unwrap(), 60);
        let cx = FactorComplex::build(&k5, &k3).unwrap();
        assert_eq!(cx.copy_count(), 10);
        assert!(cx.multiplicities().values().all(|&m| m == 1));
    }

    #[test]
    fn paths_share_vertex_sets() {
        let p3 = Hypergraph::from_edges(2, 3, [[0, 1], [1, 2]]).unwrap();
        let k3 = Hypergraph::complete(2, 3).unwrap();
        let cx = FactorComplex::build(&k3, &p3).unwrap();
        assert_eq!(cx.copy_count(), 3);
        assert_eq!(cx.multiplicities().get(&vec![0, 1, 2]), Some(&3));
    }

    #[test]
    fn pins_restrict_images() {
        let k3 = Hypergraph::complete(2, 3).unwrap();
        let k4 = Hypergraph::complete(2, 4).unwrap();
        let idx = CodegreeIndex::new(&k4).unwrap();
        let mut n = 0;
        for_each_injection(&k3, &idx, Mask::prefix(4), &[(0, 2)], |m| {
            assert_eq!(m[0], 2);
            n += 1;
            true
        });
        assert_eq!(n, 6);
    }

    #[test]
    fn isolated_pattern_vertices_are_mapped() {
        let p = Hypergraph::from_edges(2, 3, [[0, 1]]).unwrap();
        let host = Hypergraph::from_edges(2, 3, [[0, 2]]).unwrap();
        assert_eq!(count_injections(&p, &host).unwrap(), 2);
        assert_eq!(automorphisms(&p).unwrap().len(), 2);
    }
}
