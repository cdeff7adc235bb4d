use std::collections::HashSet;

use super::embedding::Embedding;
use crate::error::{Error, Result};
use crate::hypercore::{CodegreeIndex, ColoredExpansionGraph};
use crate::mask::Mask;
use crate::patterns::{for_each_injection, ExpandedPattern};

use super::search::SEARCH_VERTEX_CAP;

/// Exact cover of all vertex and color elements of the expansion graph by
/// typed copies of the expanded pattern: pattern vertices land on vertex
/// elements and added vertices on color elements.
///
/// This works on the expansion graph alone and shares no search code with
/// [`super::find_transversal_factor`]; the two are cross-checked in tests.
pub fn find_factor_in_expansion(
    x: &ColoredExpansionGraph,
    star: &ExpandedPattern,
) -> Result<Option<Embedding>> {
    let nv = x.vertex_count();
    let nc = x.color_count();
    if nv > SEARCH_VERTEX_CAP {
        return Err(Error::capacity(
            "host vertices for exact search",
            nv,
            SEARCH_VERTEX_CAP,
        ));
    }
    if star.graph.k() != x.base_k() + 1 {
        return Err(Error::param(
            "expanded pattern and expansion graph differ in uniformity",
        ));
    }
    let s = star.base_vertices;
    let t = star.added_vertices;
    if !nv.is_multiple_of(s) || !nc.is_multiple_of(t) || nv / s != nc / t {
        return Err(Error::param(
            "expansion graph shape does not match the pattern",
        ));
    }
    let host = x.as_hypergraph()?;
    let idx = CodegreeIndex::new(&host)?;
    let mut solver = Cover {
        star,
        idx: &idx,
        nv,
        chosen: Vec::new(),
    };
    let all = Mask::prefix(nv + nc);
    if !solver.run(all) {
        return Ok(None);
    }
    let mut vertex_map = Vec::with_capacity(nv);
    let mut color_map = Vec::with_capacity(nc);
    for m in &solver.chosen {
        vertex_map.extend_from_slice(&m[..s]);
        color_map.extend(m[s..].iter().map(|&c| c - nv));
    }
    Ok(Some(Embedding {
        vertex_map,
        color_map,
    }))
}

struct Cover<'a> {
    star: &'a ExpandedPattern,
    idx: &'a CodegreeIndex,
    nv: usize,
    chosen: Vec<Vec<usize>>,
}

impl Cover<'_> {
    fn typed(&self, m: &[usize]) -> bool {
        m.iter()
            .enumerate()
            .all(|(x, &e)| self.star.is_added(x) == (e >= self.nv))
    }

    /// Distinct typed copies through element `e` inside `free`, stopping once
    /// more than `cap` have been seen.
    fn copies_through(&self, e: usize, free: Mask, cap: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let want_added = e >= self.nv;
        for x in 0..self.star.graph.n() {
            if self.star.is_added(x) != want_added {
                continue;
            }
            let done = for_each_injection(&self.star.graph, self.idx, free, &[(x, e)], |m| {
                if self.typed(m) {
                    let mut key = m.to_vec();
                    key.sort_unstable();
                    // key: element set, then edge image
                    let mut edges: Vec<Vec<usize>> = self
                        .star
                        .graph
                        .edges()
                        .map(|ed| {
                            let mut img: Vec<usize> = ed.iter().map(|&v| m[v]).collect();
                            img.sort_unstable();
                            img
                        })
                        .collect();
                    edges.sort();
                    key.push(usize::MAX);
                    key.extend(edges.into_iter().flatten());
                    if seen.insert(key) {
                        out.push(m.to_vec());
                    }
                }
                out.len() <= cap
            });
            if !done {
                break;
            }
        }
        out
    }

    fn run(&mut self, free: Mask) -> bool {
        if free.is_empty() {
            return true;
        }
        let mut best: Option<(usize, Vec<Vec<usize>>)> = None;
        for e in free.iter() {
            let cap = best.as_ref().map_or(usize::MAX, |b| b.1.len());
            let cands = self.copies_through(e, free, cap);
            if cands.is_empty() {
                return false;
            }
            if best.as_ref().is_none_or(|b| cands.len() < b.1.len()) {
                best = Some((e, cands));
            }
        }
        let (_, cands) = best.unwrap();
        for m in cands {
            let mut next = free;
            for &v in &m {
                next.remove(v);
            }
            self.chosen.push(m);
            if self.run(next) {
                return true;
            }
            self.chosen.pop();
        }
        false
    }
}
