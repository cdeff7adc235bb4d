use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercore::HypergraphSystem;
use crate::patterns::Pattern;

/// An embedding of the template (`n` disjoint copies of the pattern) into a
/// system. Template vertex `i*s + x` is pattern vertex `x` of copy `i`;
/// template color slot `i*t + j` is pattern edge `j` (canonical order) of copy
/// `i`. Both maps are bijections onto the host vertices and colors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Embedding {
    #[serde(rename = "vertexMap")]
    pub vertex_map: Vec<usize>,
    #[serde(rename = "colorMap")]
    pub color_map: Vec<usize>,
}

impl Embedding {
    /// Host vertices of copy `i`, in pattern vertex order.
    pub fn copy_vertices(&self, s: usize, i: usize) -> &[usize] {
        &self.vertex_map[i * s..(i + 1) * s]
    }

    /// Host colors of copy `i`, in pattern edge order.
    pub fn copy_colors(&self, t: usize, i: usize) -> &[usize] {
        &self.color_map[i * t..(i + 1) * t]
    }
}

fn is_bijection(map: &[usize], size: usize) -> bool {
    let mut seen = vec![false; size];
    map.len() == size
        && map
            .iter()
            .all(|&v| v < size && !std::mem::replace(&mut seen[v], true))
}

/// Checks an embedding against the system, independently of how it was found.
pub fn validate_embedding(
    sys: &HypergraphSystem,
    pattern: &Pattern,
    emb: &Embedding,
) -> Result<()> {
    let (s, t, n) = (pattern.s(), pattern.t(), sys.n());
    if sys.s() != s || sys.t() != t || sys.k() != pattern.k() {
        return Err(Error::param("system shape does not match the pattern"));
    }
    if !is_bijection(&emb.vertex_map, s * n) {
        return Err(Error::integrity(
            "vertex map is not a bijection onto the host vertices",
        ));
    }
    if !is_bijection(&emb.color_map, t * n) {
        return Err(Error::integrity(
            "color map is not a bijection onto the host colors",
        ));
    }
    let edges = pattern.edge_list();
    for i in 0..n {
        let vs = emb.copy_vertices(s, i);
        let cs = emb.copy_colors(t, i);
        for (j, e) in edges.iter().enumerate() {
            let img: Vec<usize> = e.iter().map(|&x| vs[x]).collect();
            if !sys.color(cs[j]).contains(&img) {
                return Err(Error::integrity(format!(
                    "copy {} edge {:?} maps to {:?}, which is not an edge of color {}",
                    i, e, img, cs[j]
                )));
            }
        }
    }
    Ok(())
}

/// Concatenates per-cluster embeddings, each given in global ids, into one
/// embedding of the whole system and validates it.
pub fn compose_global_embedding(
    sys: &HypergraphSystem,
    pattern: &Pattern,
    clusters: &[(Vec<usize>, Vec<usize>)],
    per_cluster: &[Embedding],
) -> Result<Embedding> {
    if clusters.len() != per_cluster.len() {
        return Err(Error::param("one embedding per cluster is required"));
    }
    let mut vertex_map = Vec::with_capacity(sys.vertex_count());
    let mut color_map = Vec::with_capacity(sys.color_count());
    for ((u, w), e) in clusters.iter().zip(per_cluster) {
        let mut us = u.clone();
        us.sort_unstable();
        let mut ws = w.clone();
        ws.sort_unstable();
        let mut ev = e.vertex_map.clone();
        ev.sort_unstable();
        let mut ec = e.color_map.clone();
        ec.sort_unstable();
        if ev != us || ec != ws {
            return Err(Error::integrity("cluster embedding leaves its cluster"));
        }
        vertex_map.extend_from_slice(&e.vertex_map);
        color_map.extend_from_slice(&e.color_map);
    }
    let emb = Embedding {
        vertex_map,
        color_map,
    };
    validate_embedding(sys, pattern, &emb)?;
    Ok(emb)
}
