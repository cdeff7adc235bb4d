use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::embedding::Embedding;
use super::search::{root_mask, CopyTable, Search, SearchOptions};
use crate::error::{Error, Result};
use crate::hypercore::HypergraphSystem;
use crate::matchings::{count_pms, BipartiteGraph, PmSampler, PERMANENT_CAP};
use crate::patterns::Pattern;

/// Largest host vertex count for exhaustive counting and uniform sampling.
pub const ENUMERATION_VERTEX_CAP: usize = 12;
/// Largest number of vertex factors kept by the uniform sampler.
pub const FACTOR_LIST_CAP: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCount {
    /// Transversal factors as sets of colored copies.
    pub unordered: u128,
    /// Embeddings of the labelled template: `unordered * n! * |Aut(F)|^n`.
    pub labeled: u128,
    /// Vertex factors (uncolored copy sets) with at least one valid coloring.
    pub vertex_factors: usize,
}

/// Each vertex factor paired with its number of valid colorings.
struct Enumeration {
    table: CopyTable,
    factors: Vec<Vec<u32>>,
    weights: Vec<u128>,
}

fn slot_graph(table: &CopyTable, factor: &[u32]) -> BipartiteGraph {
    let slots: Vec<usize> = factor
        .iter()
        .flat_map(|&ci| table.copies[ci as usize].slots.iter().copied())
        .collect();
    let mut g = BipartiteGraph::new(slots.len(), table.colors);
    for (i, &e) in slots.iter().enumerate() {
        for &c in &table.edge_colors[e] {
            let _ = g.add_edge(i, c);
        }
    }
    g
}

fn enumerate(sys: &HypergraphSystem, pattern: &Pattern, keep_list: bool) -> Result<Enumeration> {
    if sys.vertex_count() > ENUMERATION_VERTEX_CAP {
        return Err(Error::capacity(
            "host vertices for exhaustive enumeration",
            sys.vertex_count(),
            ENUMERATION_VERTEX_CAP,
        ));
    }
    if sys.color_count() > PERMANENT_CAP {
        return Err(Error::capacity(
            "host colors for exhaustive enumeration",
            sys.color_count(),
            PERMANENT_CAP,
        ));
    }
    let table = CopyTable::build(sys, pattern)?;
    let mut factors = Vec::new();
    let mut weights = Vec::new();
    let mut cache: HashMap<Vec<u32>, u128> = HashMap::new();
    let mut overflow = false;
    {
        let mut search = Search::new(&table, &SearchOptions::default());
        let alive: Vec<u32> = (0..table.copies.len() as u32).collect();
        search.run(root_mask(&table), &alive, &mut |s| {
            let mut chosen: Vec<u32> = s.chosen.iter().map(|&c| c as u32).collect();
            chosen.sort_unstable();
            let g = slot_graph(&table, &chosen);
            let mut key: Vec<u32> = (0..g.left())
                .map(|i| g.neighbors(i).iter().fold(0u32, |m, &c| m | 1 << c))
                .collect();
            key.sort_unstable();
            let w = *cache
                .entry(key)
                .or_insert_with(|| count_pms(&g).expect("within permanent cap"));
            if keep_list && factors.len() >= FACTOR_LIST_CAP {
                overflow = true;
                return false;
            }
            if keep_list {
                factors.push(chosen);
            }
            weights.push(w);
            true
        });
    }
    if overflow {
        return Err(Error::capacity(
            "vertex factors for uniform sampling",
            FACTOR_LIST_CAP + 1,
            FACTOR_LIST_CAP,
        ));
    }
    Ok(Enumeration {
        table,
        factors,
        weights,
    })
}

/// Exact number of transversal factors.
pub fn count_transversal_factors(sys: &HypergraphSystem, pattern: &Pattern) -> Result<FactorCount> {
    let en = enumerate(sys, pattern, false)?;
    let unordered: u128 = en.weights.iter().sum();
    let n = sys.n() as u128;
    let mut scale: u128 = (1..=n).product();
    for _ in 0..n {
        scale *= pattern.automorphism_count() as u128;
    }
    Ok(FactorCount {
        unordered,
        labeled: unordered * scale,
        vertex_factors: en.weights.len(),
    })
}

/// Exact uniform sampler over the labelled embeddings of the template.
///
/// A vertex factor is drawn with probability proportional to its number of
/// colorings, then a uniform coloring, a uniform order of the copies and a
/// uniform isomorphism onto each copy.
pub struct UniformFactorSampler {
    table: CopyTable,
    factors: Vec<Vec<u32>>,
    cumulative: Vec<u128>,
    automorphisms: Vec<Vec<usize>>,
    pattern_edges: Vec<Vec<usize>>,
}

impl UniformFactorSampler {
    pub fn new(sys: &HypergraphSystem, pattern: &Pattern) -> Result<Self> {
        let en = enumerate(sys, pattern, true)?;
        let mut cumulative = Vec::with_capacity(en.weights.len());
        let mut acc = 0u128;
        for w in &en.weights {
            acc += w;
            cumulative.push(acc);
        }
        Ok(UniformFactorSampler {
            table: en.table,
            factors: en.factors,
            cumulative,
            automorphisms: pattern.automorphisms().to_vec(),
            pattern_edges: pattern.edge_list(),
        })
    }

    /// Number of transversal factors (unordered).
    pub fn total(&self) -> u128 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Embedding> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let target = rng.random_range(0..total);
        let fi = self.cumulative.partition_point(|&c| c <= target);
        let factor = &self.factors[fi];
        let g = slot_graph(&self.table, factor);
        let coloring = PmSampler::new(&g).ok()?.sample(rng)?.as_permutation();
        let t = self.table.t;
        let mut order: Vec<usize> = (0..factor.len()).collect();
        order.shuffle(rng);
        let mut vertex_map = Vec::with_capacity(self.table.vertices);
        let mut color_map = Vec::with_capacity(self.table.colors);
        for &pos in &order {
            let copy = &self.table.copies[factor[pos] as usize];
            let sigma = &self.automorphisms[rng.random_range(0..self.automorphisms.len())];
            let map: Vec<usize> = sigma.iter().map(|&x| copy.map[x]).collect();
            vertex_map.extend_from_slice(&map);
            for e in &self.pattern_edges {
                let emask = e.iter().fold(0u64, |m, &x| m | 1 << map[x]);
                let j = copy
                    .slots
                    .iter()
                    .position(|&sl| self.table.edge_masks[sl] == emask)
                    .expect("automorphism maps edges to edges");
                color_map.push(coloring[pos * t + j]);
            }
        }
        Some(Embedding {
            vertex_map,
            color_map,
        })
    }
}

/// One uniformly random transversal factor, or `None` if there is none.
pub fn uniform_random_factor<R: Rng + ?Sized>(
    sys: &HypergraphSystem,
    pattern: &Pattern,
    rng: &mut R,
) -> Result<Option<Embedding>> {
    Ok(UniformFactorSampler::new(sys, pattern)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercore::Hypergraph;

    #[test]
    fn two_colors_on_two_edges() {
        let sys = HypergraphSystem::complete(2, 2, 1, 2).unwrap();
        let c = count_transversal_factors(&sys, &Pattern::named("K2").unwrap()).unwrap();
        assert_eq!(c.unordered, 6);
        assert_eq!(c.labeled, 48);
        assert_eq!(c.vertex_factors, 3);
    }

    #[test]
    fn empty_color_gives_zero() {
        let colors = vec![
            Hypergraph::complete(2, 4).unwrap(),
            Hypergraph::new(2, 4).unwrap(),
        ];
        let sys = HypergraphSystem::new(2, 2, 1, 2, colors).unwrap();
        let c = count_transversal_factors(&sys, &Pattern::named("K2").unwrap()).unwrap();
        assert_eq!(c.unordered, 0);
        let mut rng = crate::randmodels::RngSpec::new(0).rng();
        assert!(
            uniform_random_factor(&sys, &Pattern::named("K2").unwrap(), &mut rng)
                .unwrap()
                .is_none()
        );
    }
}
