use std::collections::HashMap;

use crate::error::{Error, Result};

/// Largest number of legal tuples stored densely.
pub const PARTITE_CAP: usize = 1 << 28;

/// A `k`-partite `k`-graph with vertex classes `parts`. Legal tuples pick one
/// vertex per class; edges are stored as a bitset over the mixed-radix index of
/// their local positions.
#[derive(Clone, Debug)]
pub struct PartiteHypergraph {
    parts: Vec<Vec<usize>>,
    strides: Vec<usize>,
    total: usize,
    bits: Vec<u64>,
    edges: usize,
    locate: HashMap<usize, (usize, usize)>,
}

impl PartiteHypergraph {
    pub fn new(parts: Vec<Vec<usize>>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::param(
                "a partite hypergraph needs at least two parts",
            ));
        }
        let mut locate = HashMap::new();
        for (p, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::param(format!("part {} is empty", p)));
            }
            for (i, &v) in part.iter().enumerate() {
                if locate.insert(v, (p, i)).is_some() {
                    return Err(Error::param(format!(
                        "vertex {} appears in two parts or twice",
                        v
                    )));
                }
            }
        }
        let mut total: usize = 1;
        for part in &parts {
            total = total
                .checked_mul(part.len())
                .filter(|&t| t <= PARTITE_CAP)
                .ok_or_else(|| {
                    Error::capacity(
                        "legal tuples of partite hypergraph",
                        usize::MAX,
                        PARTITE_CAP,
                    )
                })?;
        }
        let mut strides = vec![1; parts.len()];
        for p in (0..parts.len() - 1).rev() {
            strides[p] = strides[p + 1] * parts[p + 1].len();
        }
        Ok(PartiteHypergraph {
            parts,
            strides,
            total,
            bits: vec![0; total.div_ceil(64)],
            edges: 0,
            locate,
        })
    }

    /// Builds the hypergraph whose edges are the legal local tuples accepted by
    /// `keep`.
    pub fn from_predicate(
        parts: Vec<Vec<usize>>,
        mut keep: impl FnMut(&[usize]) -> bool,
    ) -> Result<Self> {
        let mut h = PartiteHypergraph::new(parts)?;
        let mut tuple = vec![0; h.k()];
        for idx in 0..h.total {
            h.decode_into(idx, &mut tuple);
            if keep(&tuple) {
                h.bits[idx >> 6] |= 1 << (idx & 63);
                h.edges += 1;
            }
        }
        Ok(h)
    }

    /// Complete partite hypergraph on the given classes.
    pub fn complete(parts: Vec<Vec<usize>>) -> Result<Self> {
        PartiteHypergraph::from_predicate(parts, |_| true)
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Number of legal tuples.
    pub fn tuple_count(&self) -> usize {
        self.total
    }

    fn encode(&self, local: &[usize]) -> usize {
        local.iter().zip(&self.strides).map(|(&x, &s)| x * s).sum()
    }

    fn decode_into(&self, mut idx: usize, out: &mut [usize]) {
        for p in 0..self.parts.len() {
            out[p] = idx / self.strides[p];
            idx %= self.strides[p];
        }
    }

    /// Membership of a local tuple (one position per part, in part order).
    #[inline]
    pub fn contains_local(&self, local: &[usize]) -> bool {
        let idx = self.encode(local);
        (self.bits[idx >> 6] >> (idx & 63)) & 1 == 1
    }

    pub fn insert_local(&mut self, local: &[usize]) -> Result<bool> {
        if local.len() != self.k() || local.iter().zip(&self.parts).any(|(&x, p)| x >= p.len()) {
            return Err(Error::param(format!(
                "{:?} is not a legal local tuple",
                local
            )));
        }
        let idx = self.encode(local);
        let fresh = (self.bits[idx >> 6] >> (idx & 63)) & 1 == 0;
        if fresh {
            self.bits[idx >> 6] |= 1 << (idx & 63);
            self.edges += 1;
        }
        Ok(fresh)
    }

    /// Converts a set of global vertex ids, one per part and in any order, to
    /// a local tuple.
    pub fn localize(&self, edge: &[usize]) -> Result<Vec<usize>> {
        if edge.len() != self.k() {
            return Err(Error::param(format!(
                "edge {:?} does not have {} vertices",
                edge,
                self.k()
            )));
        }
        let mut local = vec![usize::MAX; self.k()];
        for &v in edge {
            let &(p, i) = self
                .locate
                .get(&v)
                .ok_or_else(|| Error::param(format!("vertex {} is in no part", v)))?;
            if local[p] != usize::MAX {
                return Err(Error::param(format!(
                    "edge {:?} meets part {} twice",
                    edge, p
                )));
            }
            local[p] = i;
        }
        Ok(local)
    }

    pub fn insert(&mut self, edge: &[usize]) -> Result<bool> {
        let local = self.localize(edge)?;
        self.insert_local(&local)
    }

    pub fn contains(&self, edge: &[usize]) -> bool {
        self.localize(edge)
            .map(|l| self.contains_local(&l))
            .unwrap_or(false)
    }

    /// Global ids of a local tuple.
    pub fn globalize(&self, local: &[usize]) -> Vec<usize> {
        local.iter().zip(&self.parts).map(|(&x, p)| p[x]).collect()
    }

    /// All edges as local tuples, in index order.
    pub fn edges_local(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.edges);
        let mut tuple = vec![0; self.k()];
        for idx in 0..self.total {
            if (self.bits[idx >> 6] >> (idx & 63)) & 1 == 1 {
                self.decode_into(idx, &mut tuple);
                out.push(tuple.clone());
            }
        }
        out
    }

    /// Minimum, over legal tuples `X` on the classes `classes`, of the number
    /// of edges extending `X`. Classes are 0-based part indices.
    pub fn partite_degree(&self, classes: &[usize]) -> Result<usize> {
        let k = self.k();
        let mut in_l = vec![false; k];
        for &c in classes {
            if c >= k || in_l[c] {
                return Err(Error::param(format!("bad class list {:?}", classes)));
            }
            in_l[c] = true;
        }
        // index tuples by their projection onto the chosen classes
        let mut proj_strides = vec![0; k];
        let mut proj_total = 1;
        for p in (0..k).rev() {
            if in_l[p] {
                proj_strides[p] = proj_total;
                proj_total *= self.parts[p].len();
            }
        }
        let mut counts = vec![0usize; proj_total];
        let mut tuple = vec![0; k];
        for idx in 0..self.total {
            if (self.bits[idx >> 6] >> (idx & 63)) & 1 == 1 {
                self.decode_into(idx, &mut tuple);
                let key: usize = (0..k).map(|p| tuple[p] * proj_strides[p]).sum();
                counts[key] += 1;
            }
        }
        Ok(counts.into_iter().min().unwrap_or(0))
    }
}
