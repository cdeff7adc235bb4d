use serde::{Deserialize, Serialize};

use super::{balance_certificate, max_one_density, one_density, Density, Pattern};
use crate::error::Result;
use crate::hypercore::Hypergraph;

/// The `(k+1)`-graph obtained from a pattern by adding a private new vertex
/// to each edge. Pattern vertices keep their ids `0..s`; the vertex added to
/// edge `i` (in canonical edge order) is `s + i`.
#[derive(Clone, Debug)]
pub struct ExpandedPattern {
    pub graph: Hypergraph,
    pub base_vertices: usize,
    pub added_vertices: usize,
}

impl ExpandedPattern {
    pub fn new(f: &Pattern) -> Result<Self> {
        let s = f.s();
        let edges: Vec<Vec<usize>> = f
            .edge_list()
            .into_iter()
            .enumerate()
            .map(|(i, mut e)| {
                e.push(s + i);
                e
            })
            .collect();
        Ok(ExpandedPattern {
            graph: Hypergraph::from_edges(f.k() + 1, s + f.t(), edges)?,
            base_vertices: s,
            added_vertices: f.t(),
        })
    }

    /// Is pattern vertex `v` one of the added vertices?
    pub fn is_added(&self, v: usize) -> bool {
        v >= self.base_vertices
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub one_density: Density,
    pub one_density_formula: Density,
    pub max_one_density: Density,
    pub max_one_density_formula: Density,
    pub base_strictly_balanced: bool,
    pub expanded_strictly_balanced: bool,
    /// `d1(F*) = t/(s+t-1)` and `m1(F*) = m1/(1+m1)`, both exactly.
    pub identities_hold: bool,
    /// Strict balance of the pattern carries over to its expansion.
    pub implication_holds: bool,
}

impl ExpansionReport {
    pub fn all_hold(&self) -> bool {
        self.identities_hold && self.implication_holds
    }
}

pub fn verify_expansion_claims(f: &Pattern) -> Result<ExpansionReport> {
    let star = ExpandedPattern::new(f)?;
    let (s, t) = (f.s() as i64, f.t() as i64);
    let one = one_density(&star.graph)?;
    let one_formula = Density::new(t, s + t - 1);
    let m1 = f.max_one_density();
    let max = max_one_density(&star.graph)?;
    let max_formula = m1 / (Density::from_integer(1) + m1);
    let star_strict = balance_certificate(&star.graph)?.strictly_balanced;
    let base_strict = f.is_strictly_balanced();
    Ok(ExpansionReport {
        one_density: one,
        one_density_formula: one_formula,
        max_one_density: max,
        max_one_density_formula: max_formula,
        base_strictly_balanced: base_strict,
        expanded_strictly_balanced: star_strict,
        identities_hold: one == one_formula && max == max_formula,
        implication_holds: !base_strict || star_strict,
    })
}
