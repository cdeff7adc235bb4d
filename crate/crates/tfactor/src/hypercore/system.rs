use serde::{Deserialize, Serialize};

use super::hypergraph::Hypergraph;
use super::index::CodegreeIndex;
use crate::error::{Error, Result};
use crate::mask::Mask;

/// `t*n` colors, each a `k`-graph on the common vertex set `0..s*n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphSystem {
    k: usize,
    s: usize,
    t: usize,
    n: usize,
    colors: Vec<Hypergraph>,
}

impl HypergraphSystem {
    pub fn new(k: usize, s: usize, t: usize, n: usize, colors: Vec<Hypergraph>) -> Result<Self> {
        if s == 0 || t == 0 || n == 0 {
            return Err(Error::param("s, t and n must be positive"));
        }
        if colors.len() != t * n {
            return Err(Error::param(format!(
                "expected {} colors, got {}",
                t * n,
                colors.len()
            )));
        }
        for (c, h) in colors.iter().enumerate() {
            if h.k() != k || h.n() != s * n {
                return Err(Error::param(format!(
                    "color {} is a {}-graph on {} vertices, expected a {}-graph on {}",
                    c,
                    h.k(),
                    h.n(),
                    k,
                    s * n
                )));
            }
        }
        Ok(HypergraphSystem { k, s, t, n, colors })
    }

    /// Every color is the complete `k`-graph.
    pub fn complete(k: usize, s: usize, t: usize, n: usize) -> Result<Self> {
        let h = Hypergraph::complete(k, s * n)?;
        HypergraphSystem::new(k, s, t, n, vec![h; t * n])
    }

    pub fn k(&self) -> usize {
        self.k
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn t(&self) -> usize {
        self.t
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn vertex_count(&self) -> usize {
        self.s * self.n
    }
    pub fn color_count(&self) -> usize {
        self.t * self.n
    }
    pub fn color(&self, c: usize) -> &Hypergraph {
        &self.colors[c]
    }
    pub fn colors(&self) -> &[Hypergraph] {
        &self.colors
    }

    /// Minimum `d`-degree over all colors.
    pub fn min_degree(&self, d: usize) -> Result<usize> {
        let mut best = usize::MAX;
        for h in &self.colors {
            best = best.min(h.min_degree(d)?);
        }
        Ok(best)
    }

    /// The system induced on a vertex subset and a color subset. The subset
    /// sizes must be `s*m` and `t*m` for a common `m`.
    pub fn sub_system(&self, vertices: &[usize], colors: &[usize]) -> Result<HypergraphSystem> {
        if !vertices.len().is_multiple_of(self.s)
            || !colors.len().is_multiple_of(self.t)
            || vertices.len() / self.s != colors.len() / self.t
        {
            return Err(Error::param(format!(
                "sub-system with {} vertices and {} colors is not ({}m, {}m)",
                vertices.len(),
                colors.len(),
                self.s,
                self.t
            )));
        }
        let m = vertices.len() / self.s;
        let mut hs = Vec::with_capacity(colors.len());
        for &c in colors {
            if c >= self.colors.len() {
                return Err(Error::param(format!("color {} out of range", c)));
            }
            hs.push(self.colors[c].induced(vertices)?);
        }
        HypergraphSystem::new(self.k, self.s, self.t, m, hs)
    }
}

/// Per-color codegree indices of a system.
#[derive(Clone, Debug)]
pub struct SystemIndex {
    pub colors: Vec<CodegreeIndex>,
}

impl SystemIndex {
    pub fn new(sys: &HypergraphSystem) -> Result<Self> {
        Ok(SystemIndex {
            colors: sys
                .colors()
                .iter()
                .map(CodegreeIndex::new)
                .collect::<Result<_>>()?,
        })
    }

    /// Minimum `d`-degree of the colors `colors` restricted to `vertices`.
    /// `None` when the color set is empty.
    pub fn min_degree_within(
        &self,
        d: usize,
        vertices: &[usize],
        colors: &[usize],
    ) -> Option<usize> {
        colors
            .iter()
            .map(|&c| self.colors[c].min_degree_within(d, vertices))
            .min()
    }

    /// Does every listed color have minimum `d`-degree at least `required`
    /// inside `vertices`? Short-circuits on the first failure.
    pub fn min_degree_at_least(
        &self,
        d: usize,
        vertices: &[usize],
        colors: &[usize],
        required: usize,
    ) -> bool {
        let mut best = usize::MAX;
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        let wmask = Mask::from_iter(sorted.iter().copied());
        colors.iter().all(|&c| {
            self.colors[c].min_degree_at_least_in(d, &sorted, &wmask, required, &mut best)
        })
    }
}
