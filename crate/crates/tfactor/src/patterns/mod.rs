//! Pattern hypergraphs: 1-densities, balance certificates, expansions and
//! copy enumeration.

mod copies;
mod expansion;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use copies::{automorphisms, count_injections, for_each_injection, CopyRecord, FactorComplex};
pub use expansion::{verify_expansion_claims, ExpandedPattern, ExpansionReport};

use crate::error::{Error, Result};
use crate::hypercore::Hypergraph;

pub type Density = Ratio<i64>;

/// Largest edge count for the exhaustive subset scans below.
pub const SUBSET_SCAN_EDGE_CAP: usize = 22;

/// `|E| / (|V| - 1)`.
pub fn one_density(h: &Hypergraph) -> Result<Density> {
    if h.n() < 2 {
        return Err(Error::param("1-density needs at least two vertices"));
    }
    Ok(Density::new(h.edge_count() as i64, h.n() as i64 - 1))
}

/// Visits every nonempty edge subset together with its vertex span size.
fn scan_edge_subsets(h: &Hypergraph, mut f: impl FnMut(u64, usize, usize)) -> Result<()> {
    let edges: Vec<&[usize]> = h.edges().collect();
    if edges.len() > SUBSET_SCAN_EDGE_CAP {
        return Err(Error::capacity(
            "pattern edges for subset scan",
            edges.len(),
            SUBSET_SCAN_EDGE_CAP,
        ));
    }
    let masks: Vec<u64> = edges
        .iter()
        .map(|e| e.iter().fold(0u64, |m, &v| m | (1 << v)))
        .collect();
    if h.n() > 64 {
        return Err(Error::capacity("pattern vertices", h.n(), 64));
    }
    for sub in 1u64..(1u64 << edges.len()) {
        let mut span = 0u64;
        let mut bits = sub;
        while bits != 0 {
            span |= masks[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        f(sub, sub.count_ones() as usize, span.count_ones() as usize);
    }
    Ok(())
}

/// Maximum 1-density over sub-hypergraphs spanned by a nonempty edge subset
/// with at least two vertices.
pub fn max_one_density(h: &Hypergraph) -> Result<Density> {
    if h.edge_count() == 0 {
        return Err(Error::param("max 1-density of an edgeless hypergraph"));
    }
    let mut best: Option<Density> = None;
    scan_edge_subsets(h, |_, e, v| {
        if v >= 2 {
            let d = Density::new(e as i64, v as i64 - 1);
            if best.is_none_or(|b| d > b) {
                best = Some(d);
            }
        }
    })?;
    best.ok_or_else(|| Error::param("no edge subset spans two vertices"))
}

/// Outcome of the strict 1-balance test. When `strictly_balanced` is false,
/// `witness` lists the edges of a proper sub-hypergraph whose 1-density is at
/// least that of the whole pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceCertificate {
    pub strictly_balanced: bool,
    pub witness: Option<Vec<Vec<usize>>>,
    pub witness_vertices: Option<usize>,
}

pub fn balance_certificate(h: &Hypergraph) -> Result<BalanceCertificate> {
    let whole = one_density(h)?;
    let edges: Vec<Vec<usize>> = h.edges().map(<[usize]>::to_vec).collect();
    let full = if edges.is_empty() {
        0
    } else {
        (1u64 << edges.len()) - 1
    };
    let mut witness: Option<(u64, usize)> = None;
    scan_edge_subsets(h, |sub, e, v| {
        if witness.is_some() || v < 2 || (sub == full && v == h.n()) {
            return;
        }
        if Density::new(e as i64, v as i64 - 1) >= whole {
            witness = Some((sub, v));
        }
    })?;
    Ok(match witness {
        None => BalanceCertificate {
            strictly_balanced: true,
            witness: None,
            witness_vertices: None,
        },
        Some((sub, v)) => BalanceCertificate {
            strictly_balanced: false,
            witness: Some(
                (0..edges.len())
                    .filter(|&i| sub >> i & 1 == 1)
                    .map(|i| edges[i].clone())
                    .collect(),
            ),
            witness_vertices: Some(v),
        },
    })
}

/// A pattern hypergraph with `s` vertices and `t >= 1` edges, plus its cached
/// invariants.
#[derive(Clone, Debug)]
pub struct Pattern {
    graph: Hypergraph,
    d1: Density,
    m1: Density,
    balance: BalanceCertificate,
    automorphisms: Vec<Vec<usize>>,
}

impl Pattern {
    pub fn new(graph: Hypergraph) -> Result<Self> {
        if graph.n() < 2 || graph.edge_count() == 0 {
            return Err(Error::param(
                "a pattern needs at least two vertices and one edge",
            ));
        }
        Ok(Pattern {
            d1: one_density(&graph)?,
            m1: max_one_density(&graph)?,
            balance: balance_certificate(&graph)?,
            automorphisms: automorphisms(&graph)?,
            graph,
        })
    }

    /// Built-in patterns: `K2`, `K3`, `K4`, `K4-e`, `C4`, `P3` (path on three
    /// vertices), `2K2`, `E3` (one 3-edge), `K4(3)` (complete 3-graph on four
    /// vertices), `D3` (two 3-edges sharing two vertices), `L3` (two 3-edges
    /// sharing one vertex).
    pub fn named(name: &str) -> Result<Self> {
        let (k, n, edges): (usize, usize, Vec<Vec<usize>>) = match name {
            "K2" => (2, 2, vec![vec![0, 1]]),
            "K3" => (2, 3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]),
            "K4" => (
                2,
                4,
                vec![
                    vec![0, 1],
                    vec![0, 2],
                    vec![0, 3],
                    vec![1, 2],
                    vec![1, 3],
                    vec![2, 3],
                ],
            ),
            "K4-e" => (
                2,
                4,
                vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
            ),
            "C4" => (2, 4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]),
            "P3" => (2, 3, vec![vec![0, 1], vec![1, 2]]),
            "2K2" => (2, 4, vec![vec![0, 1], vec![2, 3]]),
            "E3" => (3, 3, vec![vec![0, 1, 2]]),
            "K4(3)" => (
                3,
                4,
                vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            ),
            "D3" => (3, 4, vec![vec![0, 1, 2], vec![0, 1, 3]]),
            "L3" => (3, 5, vec![vec![0, 1, 2], vec![2, 3, 4]]),
            _ => return Err(Error::param(format!("unknown pattern '{}'", name))),
        };
        Pattern::new(Hypergraph::from_edges(k, n, edges)?)
    }

    pub const NAMES: [&'static str; 11] = [
        "K2", "K3", "K4", "K4-e", "C4", "P3", "2K2", "E3", "K4(3)", "D3", "L3",
    ];

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }
    pub fn k(&self) -> usize {
        self.graph.k()
    }
    /// Vertex count.
    pub fn s(&self) -> usize {
        self.graph.n()
    }
    /// Edge count.
    pub fn t(&self) -> usize {
        self.graph.edge_count()
    }
    pub fn one_density(&self) -> Density {
        self.d1
    }
    pub fn max_one_density(&self) -> Density {
        self.m1
    }
    pub fn balance(&self) -> &BalanceCertificate {
        &self.balance
    }
    pub fn is_strictly_balanced(&self) -> bool {
        self.balance.strictly_balanced
    }
    pub fn automorphisms(&self) -> &[Vec<usize>] {
        &self.automorphisms
    }
    pub fn automorphism_count(&self) -> usize {
        self.automorphisms.len()
    }
    /// Edges in canonical (sorted) order; edge `i` is template slot `i`.
    pub fn edge_list(&self) -> Vec<Vec<usize>> {
        self.graph.edges().map(<[usize]>::to_vec).collect()
    }

    /// Exponent `-1/d - 1` of the threshold scale `n^(-1/d - 1)` for density `d`.
    pub fn threshold_exponent(d: Density) -> Density {
        -d.recip() - Density::from_integer(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_invariants() {
        let k3 = Pattern::named("K3").unwrap();
        assert_eq!(k3.one_density(), Density::new(3, 2));
        assert_eq!(k3.max_one_density(), Density::new(3, 2));
        assert!(k3.is_strictly_balanced());
        assert_eq!(k3.automorphism_count(), 6);
    }

    #[test]
    fn two_disjoint_edges_has_witness() {
        let p = Pattern::named("2K2").unwrap();
        assert_eq!(p.one_density(), Density::new(2, 3));
        assert_eq!(p.max_one_density(), Density::from_integer(1));
        let cert = p.balance();
        assert!(!cert.strictly_balanced);
        assert_eq!(cert.witness.as_ref().unwrap().len(), 1);
    }

    #[test]
    fn isolated_vertices_break_strict_balance() {
        let h = Hypergraph::from_edges(2, 4, [[0, 1], [1, 2], [0, 2]]).unwrap();
        let cert = balance_certificate(&h).unwrap();
        assert!(!cert.strictly_balanced);
        assert!(cert.witness_vertices.unwrap() < 4);
    }

    #[test]
    fn threshold_exponent_of_triangle() {
        assert_eq!(
            Pattern::threshold_exponent(Density::new(3, 2)),
            Density::new(-5, 3)
        );
    }

    #[test]
    fn rejects_degenerate_patterns() {
        assert!(Pattern::new(Hypergraph::new(2, 3).unwrap()).is_err());
        assert!(Pattern::named("K5").is_err());
    }
}
