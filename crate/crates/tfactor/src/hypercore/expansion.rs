use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::hypergraph::Hypergraph;
use super::system::HypergraphSystem;
use crate::error::{Error, Result};

/// The `(k+1)`-graph on vertices `0..s*n` plus color elements
/// `s*n..s*n+t*n`, with an edge `e + {c}` whenever `e` is an edge of color `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredExpansionGraph {
    k: usize,
    s: usize,
    t: usize,
    n: usize,
    edges: BTreeSet<Vec<usize>>,
}

impl ColoredExpansionGraph {
    pub fn from_system(sys: &HypergraphSystem) -> Self {
        let base = sys.vertex_count();
        let mut edges = BTreeSet::new();
        for (c, h) in sys.colors().iter().enumerate() {
            for e in h.edges() {
                let mut x = e.to_vec();
                x.push(base + c);
                edges.insert(x);
            }
        }
        ColoredExpansionGraph {
            k: sys.k(),
            s: sys.s(),
            t: sys.t(),
            n: sys.n(),
            edges,
        }
    }

    /// Uniformity of the underlying system (edges here have `k+1` elements).
    pub fn base_k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.s * self.n
    }

    pub fn color_count(&self) -> usize {
        self.t * self.n
    }

    /// Element id of color `c`.
    pub fn color_element(&self, c: usize) -> usize {
        self.vertex_count() + c
    }

    pub fn edges(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.edges.iter().map(|e| e.as_slice())
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, edge: &[usize]) -> bool {
        let mut e = edge.to_vec();
        e.sort_unstable();
        self.edges.contains(&e)
    }

    /// The expansion as a plain `(k+1)`-graph on all elements.
    pub fn as_hypergraph(&self) -> Result<Hypergraph> {
        Hypergraph::from_edges(
            self.k + 1,
            self.vertex_count() + self.color_count(),
            self.edges.iter(),
        )
    }

    /// Recovers the system the expansion was built from.
    pub fn decode(&self) -> Result<HypergraphSystem> {
        let base = self.vertex_count();
        let mut colors = vec![Hypergraph::new(self.k, base)?; self.color_count()];
        for e in &self.edges {
            let (&c, vs) = e.split_last().unwrap();
            if c < base || vs.iter().any(|&v| v >= base) {
                return Err(Error::integrity(format!(
                    "expansion edge {:?} is not typed",
                    e
                )));
            }
            colors[c - base].insert(vs)?;
        }
        HypergraphSystem::new(self.k, self.s, self.t, self.n, colors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let a = Hypergraph::from_edges(2, 4, [[0, 1], [2, 3]]).unwrap();
        let b = Hypergraph::from_edges(2, 4, [[0, 2]]).unwrap();
        let sys = HypergraphSystem::new(2, 2, 1, 2, vec![a, b]).unwrap();
        let x = ColoredExpansionGraph::from_system(&sys);
        assert_eq!(x.edge_count(), 3);
        assert!(x.contains(&[5, 0, 2]));
        assert_eq!(x.decode().unwrap(), sys);
        assert_eq!(x.as_hypergraph().unwrap().k(), 3);
    }
}
