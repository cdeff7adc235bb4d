use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest side length for exact permanents and exact uniform sampling.
pub const PERMANENT_CAP: usize = 24;
const DENSE_TABLE_CAP: usize = 20;

/// Bipartite graph with left vertices `0..left` and right vertices `0..right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    left: usize,
    right: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize) -> Self {
        BipartiteGraph {
            left,
            right,
            adj: vec![Vec::new(); left],
        }
    }

    pub fn complete(n: usize) -> Self {
        BipartiteGraph {
            left: n,
            right: n,
            adj: vec![(0..n).collect(); n],
        }
    }

    pub fn from_edges(
        left: usize,
        right: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut g = BipartiteGraph::new(left, right);
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Builds the graph with an edge wherever `f(a, b)` holds.
    pub fn from_fn(left: usize, right: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let adj = (0..left)
            .map(|a| (0..right).filter(|&b| f(a, b)).collect())
            .collect();
        BipartiteGraph { left, right, adj }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<bool> {
        if a >= self.left || b >= self.right {
            return Err(Error::param(format!("edge ({}, {}) out of range", a, b)));
        }
        match self.adj[a].binary_search(&b) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adj[a].insert(pos, b);
                Ok(true)
            }
        }
    }

    pub fn left(&self) -> usize {
        self.left
    }
    pub fn right(&self) -> usize {
        self.right
    }
    pub fn neighbors(&self, a: usize) -> &[usize] {
        &self.adj[a]
    }
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().map(move |&b| (a, b)))
    }

    pub fn min_left_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn min_right_degree(&self) -> usize {
        let mut deg = vec![0usize; self.right];
        for ns in &self.adj {
            for &b in ns {
                deg[b] += 1;
            }
        }
        deg.into_iter().min().unwrap_or(0)
    }

    fn row_masks(&self) -> Vec<u32> {
        self.adj
            .iter()
            .map(|ns| ns.iter().fold(0u32, |m, &b| m | (1 << b)))
            .collect()
    }

    /// A maximum matching by augmenting paths, as `mate[left] = right`.
    pub fn maximum_matching(&self) -> Vec<Option<usize>> {
        let mut mate_l = vec![None; self.left];
        let mut mate_r: Vec<Option<usize>> = vec![None; self.right];
        for a in 0..self.left {
            let mut seen = vec![false; self.right];
            self.augment(a, &mut seen, &mut mate_l, &mut mate_r);
        }
        mate_l
    }

    fn augment(
        &self,
        a: usize,
        seen: &mut [bool],
        mate_l: &mut [Option<usize>],
        mate_r: &mut [Option<usize>],
    ) -> bool {
        for &b in &self.adj[a] {
            if seen[b] {
                continue;
            }
            seen[b] = true;
            if mate_r[b].is_none_or(|a2| self.augment(a2, seen, mate_l, mate_r)) {
                mate_l[a] = Some(b);
                mate_r[b] = Some(a);
                return true;
            }
        }
        false
    }

    pub fn has_perfect_matching(&self) -> bool {
        self.left == self.right && self.maximum_matching().iter().all(Option::is_some)
    }
}

/// A set of disjoint left-right pairs, sorted by left vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    /// The right partner of each left vertex, for a perfect matching.
    pub fn as_permutation(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.pairs.len()];
        for &(a, b) in &self.pairs {
            out[a] = b;
        }
        out
    }

    pub fn is_perfect_in(&self, g: &BipartiteGraph) -> bool {
        if g.left() != g.right() || self.pairs.len() != g.left() {
            return false;
        }
        let mut used_l = vec![false; g.left()];
        let mut used_r = vec![false; g.right()];
        self.pairs.iter().all(|&(a, b)| {
            let ok = a < g.left() && b < g.right() && !used_l[a] && !used_r[b] && g.has_edge(a, b);
            if ok {
                used_l[a] = true;
                used_r[b] = true;
            }
            ok
        })
    }
}

/// Permanent of a square 0/1 matrix given by row bitmasks, by inclusion and
/// exclusion over column subsets visited in Gray-code order.
fn ryser(rows: &[u32]) -> u128 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    // column -> bitmask of rows having a 1 there
    let mut cols = vec![0u32; n];
    for (i, &r) in rows.iter().enumerate() {
        for (j, c) in cols.iter_mut().enumerate() {
            if r >> j & 1 == 1 {
                *c |= 1 << i;
            }
        }
    }
    let mut sums = vec![0i64; n];
    let mut acc: i128 = 0;
    let mut gray: u32 = 0;
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        gray ^= 1 << j;
        let delta = if gray >> j & 1 == 1 { 1 } else { -1 };
        let mut c = cols[j];
        while c != 0 {
            sums[c.trailing_zeros() as usize] += delta;
            c &= c - 1;
        }
        let mut prod: i128 = 1;
        for &s in &sums {
            if s == 0 {
                prod = 0;
                break;
            }
            prod = prod.wrapping_mul(s as i128);
        }
        if (n - gray.count_ones() as usize).is_multiple_of(2) {
            acc = acc.wrapping_add(prod);
        } else {
            acc = acc.wrapping_sub(prod);
        }
    }
    // the true value is below 24! < 2^128, so the wrapped sum is exact
    acc as u128
}

/// Number of perfect matchings. Zero when the sides differ in size.
pub fn count_pms(g: &BipartiteGraph) -> Result<u128> {
    if g.left() != g.right() {
        return Ok(0);
    }
    if g.left() > PERMANENT_CAP {
        return Err(Error::capacity(
            "side of bipartite graph for permanent",
            g.left(),
            PERMANENT_CAP,
        ));
    }
    Ok(ryser(&g.row_masks()))
}

/// Exact uniform sampler over the perfect matchings of one graph.
///
/// Rows are assigned in order; row `i` takes column `j` with probability
/// proportional to the number of completions of the remaining rows. Completion
/// counts are tabulated once per graph.
pub struct PmSampler {
    n: usize,
    rows: Vec<u32>,
    table: Vec<u128>,
    memo: HashMap<u32, u128>,
    total: u128,
}

impl PmSampler {
    pub fn new(g: &BipartiteGraph) -> Result<Self> {
        if g.left() != g.right() {
            return Err(Error::param("perfect matchings need equal sides"));
        }
        let n = g.left();
        if n > PERMANENT_CAP {
            return Err(Error::capacity(
                "side of bipartite graph for sampling",
                n,
                PERMANENT_CAP,
            ));
        }
        let rows = g.row_masks();
        let mut s = PmSampler {
            n,
            rows,
            table: Vec::new(),
            memo: HashMap::new(),
            total: 0,
        };
        if n <= DENSE_TABLE_CAP {
            let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
            let mut table = vec![0u128; 1usize << n];
            table[full as usize] = 1;
            for mask in (0..full).rev() {
                let i = mask.count_ones() as usize;
                let mut free = s.rows[i] & !mask;
                let mut acc = 0u128;
                while free != 0 {
                    let j = free.trailing_zeros();
                    acc += table[(mask | 1 << j) as usize];
                    free &= free - 1;
                }
                table[mask as usize] = acc;
            }
            s.total = table[0];
            s.table = table;
        } else {
            let mut memo = HashMap::new();
            s.total = Self::completions(&s.rows, n, 0, &mut memo);
            s.memo = memo;
        }
        Ok(s)
    }

    fn completions(rows: &[u32], n: usize, mask: u32, memo: &mut HashMap<u32, u128>) -> u128 {
        let i = mask.count_ones() as usize;
        if i == n {
            return 1;
        }
        if let Some(&v) = memo.get(&mask) {
            return v;
        }
        let mut free = rows[i] & !mask;
        let mut acc = 0u128;
        while free != 0 {
            let j = free.trailing_zeros();
            acc += Self::completions(rows, n, mask | 1 << j, memo);
            free &= free - 1;
        }
        memo.insert(mask, acc);
        acc
    }

    fn lookup(&self, mask: u32) -> u128 {
        if mask.count_ones() as usize == self.n {
            1
        } else if self.table.is_empty() {
            self.memo.get(&mask).copied().unwrap_or(0)
        } else {
            self.table[mask as usize]
        }
    }

    /// Number of perfect matchings.
    pub fn total(&self) -> u128 {
        self.total
    }

    /// One uniformly random perfect matching, or `None` if there is none.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Matching> {
        if self.total == 0 {
            return None;
        }
        let mut mask = 0u32;
        let mut pairs = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let weight = self.lookup(mask);
            let mut target = rng.random_range(0..weight);
            let mut free = self.rows[i] & !mask;
            loop {
                let j = free.trailing_zeros();
                let w = self.lookup(mask | 1 << j);
                if target < w {
                    mask |= 1 << j;
                    pairs.push((i, j as usize));
                    break;
                }
                target -= w;
                free &= free - 1;
            }
        }
        Some(Matching { pairs })
    }
}

/// A uniformly random perfect matching of `g`.
pub fn uniform_pm_dense<R: Rng + ?Sized>(g: &BipartiteGraph, rng: &mut R) -> Result<Matching> {
    PmSampler::new(g)?
        .sample(rng)
        .ok_or_else(|| Error::Failure {
            stage: "uniform perfect matching",
            attempts: 1,
            reason: "graph has no perfect matching".into(),
        })
}

/// A uniformly random perfect matching of the complete bipartite graph.
pub fn uniform_pm_complete<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matching {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Matching {
        pairs: perm.into_iter().enumerate().collect(),
    }
}
