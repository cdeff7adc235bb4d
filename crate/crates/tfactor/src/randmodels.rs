//! Seeded random streams and monotone sparsification.
//!
//! Every edge gets a uniform value in `[0, 1)` derived from a hash of the seed,
//! the stream and the edge itself. Keeping the edges whose value is below `p`
//! couples all levels `p` on one probability space: raising `p` never removes
//! an edge.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercore::{for_each_subset, Hypergraph, HypergraphSystem};
use crate::patterns::{FactorComplex, Pattern};

/// A seed plus a stream number. Streams split one seed into independent
/// generators, one per trial, color or worker item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        RngSpec { seed, stream: 0 }
    }

    /// A derived spec for sub-task `label`. Distinct labels give distinct
    /// streams with overwhelming probability.
    pub fn child(&self, label: u64) -> Self {
        RngSpec {
            seed: self.seed,
            stream: mix(self.stream ^ mix(label.wrapping_add(0x5851_F42D_4C95_7F2D))),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream);
        r
    }

    /// The coupling value of `edge` under this spec. Order of `edge` matters,
    /// so callers pass sorted edges.
    pub fn edge_value(&self, edge: &[usize]) -> f64 {
        let mut h = mix(self.seed ^ mix(self.stream));
        h = mix(h ^ edge.len() as u64);
        for &v in edge {
            h = mix(h ^ v as u64);
        }
        (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("probability {} outside [0, 1]", p)));
    }
    Ok(())
}

/// Keeps each edge of `h` independently with probability `p`, coupled over `p`.
pub fn sparsify(h: &Hypergraph, p: f64, spec: RngSpec) -> Result<Hypergraph> {
    check_p(p)?;
    Hypergraph::from_edges(h.k(), h.n(), h.edges().filter(|e| spec.edge_value(e) < p))
}

/// `p`-random sub-system: every color is sparsified independently on its own
/// stream (`spec.child(color)`).
#[derive(Clone, Debug)]
pub struct SparsifiedSystem {
    pub p: f64,
    pub system: HypergraphSystem,
    pub kept_edges: usize,
    pub base_edges: usize,
}

pub fn sparsify_system(sys: &HypergraphSystem, p: f64, spec: RngSpec) -> Result<SparsifiedSystem> {
    check_p(p)?;
    let colors = sys
        .colors()
        .iter()
        .enumerate()
        .map(|(c, h)| sparsify(h, p, spec.child(c as u64)))
        .collect::<Result<Vec<_>>>()?;
    let kept_edges = colors.iter().map(Hypergraph::edge_count).sum();
    let base_edges = sys.colors().iter().map(Hypergraph::edge_count).sum();
    Ok(SparsifiedSystem {
        p,
        system: HypergraphSystem::new(sys.k(), sys.s(), sys.t(), sys.n(), colors)?,
        kept_edges,
        base_edges,
    })
}

/// Binomial random `k`-graph, the `p`-sparsification of the complete graph.
pub fn random_k_graph(n: usize, k: usize, p: f64, spec: RngSpec) -> Result<Hypergraph> {
    sparsify(&Hypergraph::complete(k, n)?, p, spec)
}

/// A random `k`-graph together with its pattern complex.
pub fn coupled_complex_sample(
    n: usize,
    k: usize,
    p: f64,
    pattern: &Pattern,
    spec: RngSpec,
) -> Result<(Hypergraph, FactorComplex)> {
    if pattern.k() != k {
        return Err(Error::param("pattern uniformity differs from k"));
    }
    let h = random_k_graph(n, k, p, spec)?;
    let cx = FactorComplex::build(&h, pattern.graph())?;
    Ok((h, cx))
}

/// Generator for dense systems: each color starts complete and edges are
/// visited in random order, each deleted with probability `1 - density`
/// unless that would push some `d`-set below `floor`.
pub fn random_system_with_floor(
    k: usize,
    s: usize,
    t: usize,
    n: usize,
    d: usize,
    density: f64,
    floor: usize,
    spec: RngSpec,
) -> Result<HypergraphSystem> {
    check_p(density)?;
    if d == 0 || d >= k {
        return Err(Error::param(format!(
            "degree order d = {} must lie in 1..k-1",
            d
        )));
    }
    let base = Hypergraph::complete(k, s * n)?;
    let mut colors = Vec::with_capacity(t * n);
    for c in 0..t * n {
        let mut rng = spec.child(c as u64).rng();
        let mut h = base.clone();
        let mut edges: Vec<Vec<usize>> = base.edges().map(<[usize]>::to_vec).collect();
        edges.shuffle(&mut rng);
        let mut deg: HashMap<Vec<usize>, usize> = HashMap::new();
        for e in base.edges() {
            for_each_subset(e, d, |sub| {
                *deg.entry(sub.to_vec()).or_insert(0) += 1;
                true
            });
        }
        for e in edges {
            if rng.random::<f64>() < density {
                continue;
            }
            let mut ok = true;
            for_each_subset(&e, d, |sub| {
                ok = deg[sub] > floor;
                ok
            });
            if ok {
                for_each_subset(&e, d, |sub| {
                    *deg.get_mut(sub).unwrap() -= 1;
                    true
                });
                h.remove(&e);
            }
        }
        colors.push(h);
    }
    HypergraphSystem::new(k, s, t, n, colors)
}
