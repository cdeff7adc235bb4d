use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block layout for clustering a system with `s*n` vertices and `t*n` colors.
///
/// The first vertex block has `r1 = sC(C-1) + (sn mod sC(C-1))` elements and
/// every other vertex block `s(C-1)`; colors likewise with `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemClusterPlan {
    pub c: usize,
    pub s: usize,
    pub t: usize,
    pub n: usize,
    pub r1: usize,
    pub r2: usize,
    /// Number of raw blocks.
    pub m_prime: usize,
    /// Number of final clusters.
    pub m: usize,
}

impl SystemClusterPlan {
    pub fn new(s: usize, t: usize, n: usize, c: usize) -> Result<Self> {
        if c < 2 {
            return Err(Error::param("cluster parameter C must be at least 2"));
        }
        let unit_v = s * c * (c - 1);
        let unit_c = t * c * (c - 1);
        let r1 = unit_v + (s * n) % unit_v;
        let r2 = unit_c + (t * n) % unit_c;
        if s * n < r1 {
            return Err(Error::param(format!(
                "n = {} is too small for C = {} (need sn >= {})",
                n, c, r1
            )));
        }
        let m_prime = (s * n - r1) / (s * (c - 1)) + 1;
        if m_prime < 3 {
            return Err(Error::param(format!(
                "n = {} gives only {} blocks for C = {}; need at least 3",
                n, m_prime, c
            )));
        }
        let m = (m_prime - 1) * (c - 1) / c + 1;
        let plan = SystemClusterPlan {
            c,
            s,
            t,
            n,
            r1,
            r2,
            m_prime,
            m,
        };
        debug_assert_eq!((t * n - r2) / (t * (c - 1)) + 1, m_prime);
        Ok(plan)
    }

    /// Vertex positions of block `i` (0-based; block 0 is the first block).
    pub fn vertex_block(&self, i: usize) -> Range<usize> {
        block(i, self.r1, self.s * (self.c - 1))
    }

    pub fn color_block(&self, i: usize) -> Range<usize> {
        block(i, self.r2, self.t * (self.c - 1))
    }

    /// Number of bad blocks the redistribution absorbs.
    pub fn bad_capacity(&self) -> usize {
        self.m_prime - self.m
    }
}

fn block(i: usize, first: usize, width: usize) -> Range<usize> {
    if i == 0 {
        0..first
    } else {
        let lo = first + (i - 1) * width;
        lo..lo + width
    }
}

/// Block layout for clustering a balanced bipartite graph with `n` vertices
/// per side: the first block has `r = (C-1)C + (n mod (C-1)C)` vertices per
/// side, every other block `C-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteClusterPlan {
    pub c: usize,
    pub n: usize,
    pub r: usize,
    pub m_prime: usize,
    pub m: usize,
}

impl BipartiteClusterPlan {
    pub fn new(n: usize, c: usize) -> Result<Self> {
        if c < 2 {
            return Err(Error::param("cluster parameter C must be at least 2"));
        }
        let unit = (c - 1) * c;
        let r = unit + n % unit;
        if n < r {
            return Err(Error::param(format!(
                "n = {} is too small for C = {}",
                n, c
            )));
        }
        let m_prime = (n - r) / (c - 1) + 1;
        if m_prime < 3 {
            return Err(Error::param(format!(
                "n = {} gives only {} blocks for C = {}; need at least 3",
                n, m_prime, c
            )));
        }
        let m = (m_prime - 1) * (c - 1) / c + 1;
        Ok(BipartiteClusterPlan {
            c,
            n,
            r,
            m_prime,
            m,
        })
    }

    /// Positions of block `i` on either side.
    pub fn block(&self, i: usize) -> Range<usize> {
        block(i, self.r, self.c - 1)
    }

    pub fn bad_capacity(&self) -> usize {
        self.m_prime - self.m
    }
}
