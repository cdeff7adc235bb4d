//! Reference values of the concentration bounds used by the clustering
//! arguments. They are reported next to audits, never asserted.

use serde::{Deserialize, Serialize};
use tfactor::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum BoundQuery {
    /// `P[X >= (1+a) mean]` for a sum of independent indicators.
    ChernoffUpper { a: f64, mean: f64 },
    /// `P[X <= (1-a) mean]`.
    ChernoffLower { a: f64, mean: f64 },
    /// Permutation and trial concentration with Lipschitz constant `c` and
    /// certificate rate `r`, at deviation `t`.
    Mcdiarmid { c: f64, r: f64, t: f64, mean: f64 },
    /// Uniform `m`-subset concentration at `alpha` standard units.
    Subset { alpha: f64 },
    /// Degree loss on a random `ell`-set when the density drops by `gap`.
    Degree { ell: f64, gap: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub query: BoundQuery,
    pub probability: f64,
    /// Set when the bound is at least 1.
    pub vacuous: bool,
    /// Extra deviation term of the permutation bound, `60 c sqrt(r mean)`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub offset: Option<f64>,
}

fn need(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::param(msg))
    }
}

pub fn evaluate(query: &BoundQuery) -> Result<BoundValue> {
    let (probability, offset) = match *query {
        BoundQuery::ChernoffUpper { a, mean } => {
            need(
                a > 0.0 && a < 1.5 && mean >= 0.0,
                "chernoff needs 0 < a < 3/2 and mean >= 0",
            )?;
            ((-a * a * mean / 3.0).exp(), None)
        }
        BoundQuery::ChernoffLower { a, mean } => {
            need(
                a > 0.0 && a < 1.5 && mean >= 0.0,
                "chernoff needs 0 < a < 3/2 and mean >= 0",
            )?;
            ((-a * a * mean / 2.0).exp(), None)
        }
        BoundQuery::Mcdiarmid { c, r, t, mean } => {
            need(
                c > 0.0 && r > 0.0 && mean > 0.0,
                "mcdiarmid needs c, r, mean > 0",
            )?;
            need((0.0..=mean).contains(&t), "mcdiarmid needs 0 <= t <= mean")?;
            (
                4.0 * (-t * t / (8.0 * c * c * r * mean)).exp(),
                Some(60.0 * c * (r * mean).sqrt()),
            )
        }
        BoundQuery::Subset { alpha } => {
            need(alpha > 0.0, "subset bound needs alpha > 0")?;
            (2.0 * (-2.0 * alpha * alpha).exp(), None)
        }
        BoundQuery::Degree { ell, gap } => {
            need(
                ell >= 1.0 && gap > 0.0 && gap < 1.0,
                "degree bound needs ell >= 1 and 0 < gap < 1",
            )?;
            (2.0 * (-ell * gap * gap / 2.0).exp(), None)
        }
    };
    Ok(BoundValue {
        query: query.clone(),
        probability,
        vacuous: probability >= 1.0,
        offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: BoundQuery) -> f64 {
        evaluate(&q).unwrap().probability
    }

    #[test]
    fn reference_values() {
        assert!((p(BoundQuery::ChernoffUpper { a: 1.0, mean: 12.0 }) - 0.018_315_6).abs() < 1e-6);
        assert!((p(BoundQuery::Subset { alpha: 2.0 }) - 6.709e-4).abs() < 1e-6);
        let g = evaluate(&BoundQuery::Degree {
            ell: 100.0,
            gap: 0.1,
        })
        .unwrap();
        assert!((g.probability - 1.213_06).abs() < 1e-4);
        assert!(g.vacuous);
    }

    #[test]
    fn ranges_enforced() {
        assert!(evaluate(&BoundQuery::ChernoffUpper { a: 1.5, mean: 1.0 }).is_err());
        assert!(evaluate(&BoundQuery::Mcdiarmid {
            c: 2.0,
            r: 1.0,
            t: 5.0,
            mean: 4.0
        })
        .is_err());
        assert!(evaluate(&BoundQuery::Degree {
            ell: 10.0,
            gap: 0.0
        })
        .is_err());
    }
}
