use std::collections::HashMap;

use super::combin::for_each_subset;
use super::hypergraph::Hypergraph;
use crate::error::{Error, Result};
use crate::mask::{Mask, MASK_BITS};

/// For every `(k-1)`-set, the bitset of vertices completing it to an edge.
///
/// Degrees inside a vertex subset then reduce to popcounts, which is what the
/// clustering and search code evaluate in their inner loops.
#[derive(Clone, Debug)]
pub struct CodegreeIndex {
    k: usize,
    n: usize,
    pairs: Vec<Mask>,
    general: HashMap<Vec<usize>, Mask>,
}

impl CodegreeIndex {
    pub fn new(h: &Hypergraph) -> Result<Self> {
        if h.n() > MASK_BITS {
            return Err(Error::capacity(
                "vertices for bitset index",
                h.n(),
                MASK_BITS,
            ));
        }
        let k = h.k();
        let mut idx = CodegreeIndex {
            k,
            n: h.n(),
            pairs: Vec::new(),
            general: HashMap::new(),
        };
        if k == 2 {
            idx.pairs = vec![Mask::EMPTY; h.n()];
            for e in h.edges() {
                idx.pairs[e[0]].insert(e[1]);
                idx.pairs[e[1]].insert(e[0]);
            }
        } else {
            let mut key = Vec::with_capacity(k - 1);
            for e in h.edges() {
                for i in 0..k {
                    key.clear();
                    key.extend(
                        e.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, &v)| v),
                    );
                    idx.general
                        .entry(key.clone())
                        .or_insert(Mask::EMPTY)
                        .insert(e[i]);
                }
            }
        }
        Ok(idx)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Vertices `z` with `prefix + z` an edge. `prefix` must be sorted.
    #[inline]
    pub fn completions(&self, prefix: &[usize]) -> Mask {
        debug_assert_eq!(prefix.len() + 1, self.k);
        if self.k == 2 {
            self.pairs[prefix[0]]
        } else {
            self.general.get(prefix).copied().unwrap_or(Mask::EMPTY)
        }
    }

    /// Is the sorted `k`-set an edge?
    pub fn is_edge(&self, edge: &[usize]) -> bool {
        let (last, head) = edge.split_last().expect("k >= 1");
        self.completions(head).contains(*last)
    }

    /// Number of edges `e` with `set ⊆ e ⊆ within`. `set` must be sorted and
    /// contained in `within`.
    pub fn degree_within(&self, set: &[usize], within: &Mask) -> usize {
        let d = set.len();
        if d == self.k {
            return self.is_edge(set) as usize;
        }
        let mut rest_mask = *within;
        for &v in set {
            rest_mask.remove(v);
        }
        let free = self.k - d - 1;
        if free == 0 {
            return (self.completions(set) & rest_mask).count();
        }
        let rest: Vec<usize> = rest_mask.iter().collect();
        let mut key = Vec::with_capacity(self.k - 1);
        let mut total = 0;
        for_each_subset(&rest, free, |ys| {
            key.clear();
            key.extend_from_slice(set);
            key.extend_from_slice(ys);
            key.sort_unstable();
            // count each completion once, by its largest new vertex
            let top = *ys.last().unwrap();
            total += (self.completions(&key) & rest_mask & Mask::above(top)).count();
            true
        });
        total
    }

    /// Minimum `d`-degree of the sub-hypergraph induced on `within`.
    pub fn min_degree_within(&self, d: usize, within: &[usize]) -> usize {
        let mut best = usize::MAX;
        self.min_degree_at_least(d, within, 0, &mut best);
        if best == usize::MAX {
            0
        } else {
            best
        }
    }

    /// Checks that every `d`-subset of `within` has degree at least `required`
    /// inside `within`, stopping at the first violation. `best` receives the
    /// minimum seen.
    pub fn min_degree_at_least(
        &self,
        d: usize,
        within: &[usize],
        required: usize,
        best: &mut usize,
    ) -> bool {
        let mut sorted = within.to_vec();
        sorted.sort_unstable();
        let wmask = Mask::from_iter(sorted.iter().copied());
        self.min_degree_at_least_in(d, &sorted, &wmask, required, best)
    }

    /// As [`Self::min_degree_at_least`] with `sorted` already sorted and
    /// `wmask` its bitset.
    pub fn min_degree_at_least_in(
        &self,
        d: usize,
        sorted: &[usize],
        wmask: &Mask,
        required: usize,
        best: &mut usize,
    ) -> bool {
        if d == 1 && self.k == 2 {
            return sorted.iter().all(|&v| {
                let deg = (self.pairs[v] & *wmask).count();
                *best = (*best).min(deg);
                deg >= required
            });
        }
        for_each_subset(sorted, d, |ds| {
            let deg = self.degree_within(ds, wmask);
            *best = (*best).min(deg);
            deg >= required
        })
    }
}
