use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::combin::{binomial, for_each_subset};
use crate::error::{Error, Result};

/// A `k`-uniform hypergraph on vertices `0..n`. Edges are stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    k: usize,
    n: usize,
    edges: BTreeSet<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("uniformity k must be at least 1"));
        }
        Ok(Hypergraph {
            k,
            n,
            edges: BTreeSet::new(),
        })
    }

    /// Builds a hypergraph from edges in any vertex order. Duplicate edges are
    /// merged; use [`Hypergraph::insert`] to observe them.
    pub fn from_edges<I, E>(k: usize, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[usize]>,
    {
        let mut h = Hypergraph::new(k, n)?;
        for e in edges {
            h.insert(e.as_ref())?;
        }
        Ok(h)
    }

    /// The complete `k`-graph on `n` vertices.
    pub fn complete(k: usize, n: usize) -> Result<Self> {
        let mut h = Hypergraph::new(k, n)?;
        let verts: Vec<usize> = (0..n).collect();
        for_each_subset(&verts, k, |e| {
            h.edges.insert(e.to_vec());
            true
        });
        Ok(h)
    }

    /// Inserts an edge, returning `false` if it was already present.
    pub fn insert(&mut self, edge: &[usize]) -> Result<bool> {
        let e = self.normalize(edge)?;
        Ok(self.edges.insert(e))
    }

    pub fn remove(&mut self, edge: &[usize]) -> bool {
        let mut e = edge.to_vec();
        e.sort_unstable();
        self.edges.remove(&e)
    }

    fn normalize(&self, edge: &[usize]) -> Result<Vec<usize>> {
        if edge.len() != self.k {
            return Err(Error::param(format!(
                "edge {:?} has {} vertices, expected {}",
                edge,
                edge.len(),
                self.k
            )));
        }
        let mut e = edge.to_vec();
        e.sort_unstable();
        if e.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param(format!("edge {:?} repeats a vertex", edge)));
        }
        if let Some(&v) = e.last() {
            if v >= self.n {
                return Err(Error::param(format!(
                    "edge {:?} uses vertex {} >= n = {}",
                    edge, v, self.n
                )));
            }
        }
        Ok(e)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.edges.iter().map(|e| e.as_slice())
    }

    /// Membership test; `edge` may be in any order.
    pub fn contains(&self, edge: &[usize]) -> bool {
        if edge.windows(2).all(|w| w[0] < w[1]) {
            return self.edges.contains(edge);
        }
        let mut e = edge.to_vec();
        e.sort_unstable();
        self.edges.contains(&e)
    }

    /// Number of edges containing the vertex set `set`.
    pub fn degree(&self, set: &[usize]) -> usize {
        self.edges
            .iter()
            .filter(|e| set.iter().all(|v| e.binary_search(v).is_ok()))
            .count()
    }

    /// Minimum `d`-degree over all `d`-subsets of the vertex set.
    pub fn min_degree(&self, d: usize) -> Result<usize> {
        if d > self.k {
            return Err(Error::param(format!(
                "degree order d = {} exceeds k = {}",
                d, self.k
            )));
        }
        if self.n < d {
            return Err(Error::param(format!("n = {} has no {}-subsets", self.n, d)));
        }
        if d == 0 {
            return Ok(self.edges.len());
        }
        let total = binomial(self.n, d);
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for e in &self.edges {
            for_each_subset(e, d, |sub| {
                *counts.entry(sub.to_vec()).or_insert(0) += 1;
                true
            });
        }
        if (counts.len() as u128) < total {
            return Ok(0);
        }
        Ok(counts.values().copied().min().unwrap_or(0))
    }

    /// The sub-hypergraph induced on `vertices`, relabelled so that
    /// `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[usize]) -> Result<Hypergraph> {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.n {
                return Err(Error::param(format!("vertex {} out of range", v)));
            }
            if pos[v] != usize::MAX {
                return Err(Error::param(format!("vertex {} listed twice", v)));
            }
            pos[v] = i;
        }
        let mut h = Hypergraph::new(self.k, vertices.len())?;
        for e in &self.edges {
            if e.iter().all(|&v| pos[v] != usize::MAX) {
                let mut img: Vec<usize> = e.iter().map(|&v| pos[v]).collect();
                img.sort_unstable();
                h.edges.insert(img);
            }
        }
        Ok(h)
    }

    /// Vertices covered by at least one edge.
    pub fn span(&self) -> BTreeSet<usize> {
        self.edges.iter().flatten().copied().collect()
    }
}
