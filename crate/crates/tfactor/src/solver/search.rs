use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::embedding::Embedding;
use crate::error::{Error, Result};
use crate::hypercore::{CodegreeIndex, Hypergraph, HypergraphSystem};
use crate::mask::Mask;
use crate::patterns::{for_each_injection, Pattern};
use crate::randmodels::RngSpec;

/// Largest host vertex count accepted by the exact search.
pub const SEARCH_VERTEX_CAP: usize = 40;

const NONE: usize = usize::MAX;

/// One copy of the pattern in the union of all colors.
#[derive(Clone, Debug)]
pub(crate) struct CopyData {
    pub vmask: u64,
    /// Injection, indexed by pattern vertex.
    pub map: Vec<usize>,
    /// Union-edge id of the image of each pattern edge (canonical order).
    pub slots: Vec<usize>,
}

/// All copies of the pattern in the union graph, with per-edge color lists.
#[derive(Clone, Debug)]
pub(crate) struct CopyTable {
    pub t: usize,
    pub colors: usize,
    pub vertices: usize,
    pub copies: Vec<CopyData>,
    pub edge_masks: Vec<u64>,
    pub edge_colors: Vec<Vec<usize>>,
}

impl CopyTable {
    pub fn build(sys: &HypergraphSystem, pattern: &Pattern) -> Result<Self> {
        if sys.s() != pattern.s() || sys.t() != pattern.t() || sys.k() != pattern.k() {
            return Err(Error::param(format!(
                "system shape (k={}, s={}, t={}) does not match pattern (k={}, s={}, t={})",
                sys.k(),
                sys.s(),
                sys.t(),
                pattern.k(),
                pattern.s(),
                pattern.t()
            )));
        }
        let nv = sys.vertex_count();
        if nv > SEARCH_VERTEX_CAP {
            return Err(Error::capacity(
                "host vertices for exact search",
                nv,
                SEARCH_VERTEX_CAP,
            ));
        }
        let mut by_edge: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (c, h) in sys.colors().iter().enumerate() {
            for e in h.edges() {
                by_edge.entry(e.to_vec()).or_default().push(c);
            }
        }
        let union = Hypergraph::from_edges(sys.k(), nv, by_edge.keys())?;
        let mut edge_id = BTreeMap::new();
        let mut edge_masks = Vec::with_capacity(by_edge.len());
        let mut edge_colors = Vec::with_capacity(by_edge.len());
        for (e, cs) in by_edge {
            edge_id.insert(e.clone(), edge_masks.len());
            edge_masks.push(e.iter().fold(0u64, |m, &v| m | 1 << v));
            edge_colors.push(cs);
        }
        let idx = CodegreeIndex::new(&union)?;
        let pedges = pattern.edge_list();
        let mut seen: HashSet<(u64, Vec<usize>)> = HashSet::new();
        let mut copies = Vec::new();
        let mut img = Vec::with_capacity(pattern.k());
        for_each_injection(pattern.graph(), &idx, Mask::prefix(nv), &[], |m| {
            let slots: Vec<usize> = pedges
                .iter()
                .map(|e| {
                    img.clear();
                    img.extend(e.iter().map(|&x| m[x]));
                    img.sort_unstable();
                    edge_id[&img]
                })
                .collect();
            let vmask = m.iter().fold(0u64, |acc, &v| acc | 1 << v);
            let mut key = slots.clone();
            key.sort_unstable();
            if seen.insert((vmask, key)) {
                copies.push(CopyData {
                    vmask,
                    map: m.to_vec(),
                    slots,
                });
            }
            true
        });
        Ok(CopyTable {
            t: pattern.t(),
            colors: sys.color_count(),
            vertices: nv,
            copies,
            edge_masks,
            edge_colors,
        })
    }
}

/// Options for [`search_transversal_factor`].
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Randomizes the branching order with this stream.
    pub shuffle: Option<RngSpec>,
    /// Stops after this many search nodes.
    pub node_limit: Option<u64>,
    pub strategy: SearchStrategy,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SearchStrategy {
    /// Colored-copy cover when the option count allows, matching search otherwise.
    #[default]
    Auto,
    /// Branch on vertices only and keep colors in a bipartite matching.
    Matching,
    /// Branch on vertex and color elements over all colored copies.
    Cover,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub embedding: Option<Embedding>,
    pub nodes: u64,
    /// False when the node limit cut the search short.
    pub complete: bool,
}

/// Backtracking state: chosen copies and a matching of their edge slots to
/// distinct colors.
pub(crate) struct Search<'a> {
    pub table: &'a CopyTable,
    pub chosen: Vec<usize>,
    pub slots: Vec<usize>,
    pub slot_color: Vec<usize>,
    pub color_slot: Vec<usize>,
    pub nodes: u64,
    pub limit: Option<u64>,
    pub rng: Option<ChaCha8Rng>,
    pub stopped: bool,
}

impl<'a> Search<'a> {
    pub fn new(table: &'a CopyTable, opts: &SearchOptions) -> Self {
        Search {
            table,
            chosen: Vec::new(),
            slots: Vec::new(),
            slot_color: Vec::new(),
            color_slot: vec![NONE; table.colors],
            nodes: 0,
            limit: opts.node_limit,
            rng: opts.shuffle.map(|s| s.rng()),
            stopped: false,
        }
    }

    fn augment(&mut self, slot: usize, seen: &mut [bool]) -> bool {
        let edge = self.slots[slot];
        for &c in &self.table.edge_colors[edge] {
            if seen[c] {
                continue;
            }
            seen[c] = true;
            let holder = self.color_slot[c];
            if holder == NONE || self.augment(holder, seen) {
                self.color_slot[c] = slot;
                self.slot_color[slot] = c;
                return true;
            }
        }
        false
    }

    /// Can the colors still be matched when every free color must go to a
    /// future slot, and future slots only accept colors in `usable`?
    fn colors_feasible(&self, usable: &[bool]) -> bool {
        let nc = self.table.colors;
        let future = nc - self.slots.len();
        if usable.iter().filter(|&&u| u).count() < future {
            return false;
        }
        let mut color_slot = self.color_slot.clone();
        let mut slot_color = self.slot_color.clone();
        let real = self.slots.len();
        slot_color.resize(real + future, NONE);
        let usable_list: Vec<usize> = (0..nc).filter(|&c| usable[c]).collect();
        for w in real..real + future {
            let mut seen = vec![false; nc];
            if !self.augment_wild(
                w,
                real,
                &usable_list,
                &mut seen,
                &mut color_slot,
                &mut slot_color,
            ) {
                return false;
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn augment_wild(
        &self,
        slot: usize,
        real: usize,
        usable: &[usize],
        seen: &mut [bool],
        color_slot: &mut [usize],
        slot_color: &mut [usize],
    ) -> bool {
        let avail: &[usize] = if slot < real {
            &self.table.edge_colors[self.slots[slot]]
        } else {
            usable
        };
        for &c in avail {
            if seen[c] {
                continue;
            }
            seen[c] = true;
            let holder = color_slot[c];
            if holder == NONE
                || self.augment_wild(holder, real, usable, seen, color_slot, slot_color)
            {
                color_slot[c] = slot;
                slot_color[slot] = c;
                return true;
            }
        }
        false
    }

    /// Depth-first search over copies covering the uncovered vertices. `leaf`
    /// is called at every complete factor and returns `false` to stop.
    pub fn run(&mut self, uncovered: u64, alive: &[u32], leaf: &mut dyn FnMut(&Search) -> bool) {
        if self.stopped {
            return;
        }
        self.nodes += 1;
        if self.limit.is_some_and(|l| self.nodes > l) {
            self.stopped = true;
            return;
        }
        if uncovered == 0 {
            if !leaf(self) {
                self.stopped = true;
            }
            return;
        }
        let table = self.table;
        let mut count = [0u32; 64];
        let mut edge_alive = vec![false; table.edge_masks.len()];
        for &ci in alive {
            let c = &table.copies[ci as usize];
            let mut m = c.vmask;
            while m != 0 {
                count[m.trailing_zeros() as usize] += 1;
                m &= m - 1;
            }
            for &e in &c.slots {
                edge_alive[e] = true;
            }
        }
        let mut best = NONE;
        let mut m = uncovered;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            if best == NONE || count[v] < count[best] {
                best = v;
            }
            m &= m - 1;
        }
        if count[best] == 0 {
            return;
        }
        let mut usable = vec![false; table.colors];
        for (e, &a) in edge_alive.iter().enumerate() {
            if a {
                for &c in &table.edge_colors[e] {
                    usable[c] = true;
                }
            }
        }
        if !self.colors_feasible(&usable) {
            return;
        }
        let mut cands: Vec<u32> = alive
            .iter()
            .copied()
            .filter(|&ci| table.copies[ci as usize].vmask >> best & 1 == 1)
            .collect();
        if let Some(rng) = self.rng.as_mut() {
            cands.shuffle(rng);
        }
        for ci in cands {
            let copy = &table.copies[ci as usize];
            let saved_sc = self.slot_color.clone();
            let saved_cs = self.color_slot.clone();
            let base = self.slots.len();
            let mut ok = true;
            for &e in &copy.slots {
                self.slots.push(e);
                self.slot_color.push(NONE);
                let mut seen = vec![false; table.colors];
                if !self.augment(self.slots.len() - 1, &mut seen) {
                    ok = false;
                    break;
                }
            }
            if ok {
                let child: Vec<u32> = alive
                    .iter()
                    .copied()
                    .filter(|&cj| table.copies[cj as usize].vmask & copy.vmask == 0)
                    .collect();
                self.chosen.push(ci as usize);
                self.run(uncovered & !copy.vmask, &child, leaf);
                self.chosen.pop();
            }
            self.slots.truncate(base);
            self.slot_color = saved_sc;
            self.color_slot = saved_cs;
            if self.stopped {
                return;
            }
        }
    }

    /// The embedding described by the current complete state.
    pub fn embedding(&self) -> Embedding {
        let t = self.table.t;
        let mut vertex_map = Vec::with_capacity(self.table.vertices);
        let mut color_map = Vec::with_capacity(self.table.colors);
        for (i, &ci) in self.chosen.iter().enumerate() {
            vertex_map.extend_from_slice(&self.table.copies[ci].map);
            color_map.extend_from_slice(&self.slot_color[i * t..(i + 1) * t]);
        }
        Embedding {
            vertex_map,
            color_map,
        }
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Largest number of colored copies for which the search branches on vertex
/// and color elements alike; denser instances use the matching search.
pub const OPTION_CAP: usize = 1 << 20;

/// A copy together with one distinct color per edge slot.
struct ColoredOption {
    elements: u128,
    copy: u32,
    colors: Vec<u16>,
}

/// Exact cover of vertices and colors by colored copies, branching on the
/// element with the fewest live options.
struct OptionCover<'a> {
    table: &'a CopyTable,
    options: Vec<ColoredOption>,
    by_element: Vec<Vec<u32>>,
    chosen: Vec<u32>,
    nodes: u64,
    limit: Option<u64>,
    rng: Option<ChaCha8Rng>,
    stopped: bool,
}

impl<'a> OptionCover<'a> {
    /// `None` when the instance has too many colored copies.
    fn build(table: &'a CopyTable, opts: &SearchOptions) -> Option<Self> {
        let nv = table.vertices;
        if nv + table.colors > 128 {
            return None;
        }
        let mut total = 0usize;
        for c in &table.copies {
            let mut k = 1usize;
            for &e in &c.slots {
                k = k.saturating_mul(table.edge_colors[e].len());
            }
            total = total.saturating_add(k);
            if total > OPTION_CAP {
                return None;
            }
        }
        let mut options = Vec::with_capacity(total);
        let mut pick: Vec<u16> = Vec::new();
        for (ci, c) in table.copies.iter().enumerate() {
            let base = c.vmask as u128;
            colorings(table, &c.slots, 0, 0, &mut pick, &mut |cols, cmask| {
                options.push(ColoredOption {
                    elements: base | cmask << nv,
                    copy: ci as u32,
                    colors: cols.to_vec(),
                });
            });
        }
        let mut by_element = vec![Vec::new(); nv + table.colors];
        for (i, o) in options.iter().enumerate() {
            let mut m = o.elements;
            while m != 0 {
                by_element[m.trailing_zeros() as usize].push(i as u32);
                m &= m - 1;
            }
        }
        Some(OptionCover {
            table,
            options,
            by_element,
            chosen: Vec::new(),
            nodes: 0,
            limit: opts.node_limit,
            rng: opts.shuffle.map(|s| s.rng()),
            stopped: false,
        })
    }

    fn run(&mut self, uncovered: u128, alive: &[u32]) -> bool {
        self.nodes += 1;
        if self.limit.is_some_and(|l| self.nodes > l) {
            self.stopped = true;
            return false;
        }
        if uncovered == 0 {
            return true;
        }
        let mut count = [0u32; 128];
        for &oi in alive {
            let mut m = self.options[oi as usize].elements;
            while m != 0 {
                count[m.trailing_zeros() as usize] += 1;
                m &= m - 1;
            }
        }
        let mut best = NONE;
        let mut m = uncovered;
        while m != 0 {
            let e = m.trailing_zeros() as usize;
            if best == NONE || count[e] < count[best] {
                best = e;
                if count[e] == 0 {
                    return false;
                }
            }
            m &= m - 1;
        }
        let mut cands: Vec<u32> = self.by_element[best]
            .iter()
            .copied()
            .filter(|&oi| self.options[oi as usize].elements & !uncovered == 0)
            .collect();
        if let Some(rng) = self.rng.as_mut() {
            cands.shuffle(rng);
        }
        for oi in cands {
            let taken = self.options[oi as usize].elements;
            let child: Vec<u32> = alive
                .iter()
                .copied()
                .filter(|&oj| self.options[oj as usize].elements & taken == 0)
                .collect();
            self.chosen.push(oi);
            if self.run(uncovered & !taken, &child) {
                return true;
            }
            self.chosen.pop();
            if self.stopped {
                return false;
            }
        }
        false
    }

    fn embedding(&self) -> Embedding {
        let mut vertex_map = Vec::with_capacity(self.table.vertices);
        let mut color_map = Vec::with_capacity(self.table.colors);
        for &oi in &self.chosen {
            let o = &self.options[oi as usize];
            vertex_map.extend_from_slice(&self.table.copies[o.copy as usize].map);
            color_map.extend(o.colors.iter().map(|&c| c as usize));
        }
        Embedding {
            vertex_map,
            color_map,
        }
    }
}

/// Calls `f` with every assignment of distinct colors to `slots[i..]`.
fn colorings(
    table: &CopyTable,
    slots: &[usize],
    i: usize,
    used: u128,
    pick: &mut Vec<u16>,
    f: &mut dyn FnMut(&[u16], u128),
) {
    if i == slots.len() {
        f(pick, used);
        return;
    }
    for &c in &table.edge_colors[slots[i]] {
        if used >> c & 1 == 0 {
            pick.push(c as u16);
            colorings(table, slots, i + 1, used | 1 << c, pick, f);
            pick.pop();
        }
    }
}

/// Exact search for a transversal factor.
pub fn search_transversal_factor(
    sys: &HypergraphSystem,
    pattern: &Pattern,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    let table = CopyTable::build(sys, pattern)?;
    let cover = match opts.strategy {
        SearchStrategy::Matching => None,
        SearchStrategy::Auto => OptionCover::build(&table, opts),
        SearchStrategy::Cover => Some(OptionCover::build(&table, opts).ok_or_else(|| {
            Error::capacity("colored copies for cover search", usize::MAX, OPTION_CAP)
        })?),
    };
    if let Some(mut cover) = cover {
        let alive: Vec<u32> = (0..cover.options.len() as u32).collect();
        let all = (1u128 << (table.vertices + table.colors)) - 1;
        let found = cover.run(all, &alive).then(|| cover.embedding());
        let complete = found.is_some() || !cover.stopped;
        return Ok(SearchOutcome {
            embedding: found,
            nodes: cover.nodes,
            complete,
        });
    }
    let mut search = Search::new(&table, opts);
    let alive: Vec<u32> = (0..table.copies.len() as u32).collect();
    let mut found = None;
    search.run(full_mask(table.vertices), &alive, &mut |s| {
        found = Some(s.embedding());
        false
    });
    let complete = found.is_some() || !search.stopped;
    Ok(SearchOutcome {
        embedding: found,
        nodes: search.nodes,
        complete,
    })
}

/// A transversal factor of `sys`, or `None` if there is none.
pub fn find_transversal_factor(
    sys: &HypergraphSystem,
    pattern: &Pattern,
) -> Result<Option<Embedding>> {
    Ok(search_transversal_factor(sys, pattern, &SearchOptions::default())?.embedding)
}

pub(crate) fn root_mask(table: &CopyTable) -> u64 {
    full_mask(table.vertices)
}
