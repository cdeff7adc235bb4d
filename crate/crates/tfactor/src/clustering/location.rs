use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::system::ClusterPartition;
use crate::error::{Error, Result};
use crate::randmodels::RngSpec;

/// Empirical probability that all pinned vertices and colors land in their
/// target clusters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocationReport {
    pub trials: usize,
    /// Trials whose sampler reported a structured failure; excluded from the estimates.
    pub failures: usize,
    pub joint: f64,
    pub std_error: f64,
    /// One probability per pin, vertex pins first.
    pub marginals: Vec<f64>,
    pub product_of_marginals: f64,
    /// `(C'/n)^(number of pins)`.
    pub bound: f64,
    pub ratio: f64,
    pub flagged: bool,
}

/// Pins are `(vertex, cluster index)` and `(color, cluster index)`, at most
/// three in total. `n` is the system's `n`.
pub fn location_spread_audit<S>(
    sampler: S,
    vertex_pins: &[(usize, usize)],
    color_pins: &[(usize, usize)],
    c_prime: f64,
    n: usize,
    trials: usize,
    spec: RngSpec,
) -> Result<LocationReport>
where
    S: Fn(&mut ChaCha8Rng) -> Result<ClusterPartition> + Sync,
{
    let pins = vertex_pins.len() + color_pins.len();
    if pins == 0 || pins > 3 {
        return Err(Error::param("location audit takes one to three pins"));
    }
    if trials == 0 || n == 0 {
        return Err(Error::param("location audit needs trials > 0 and n > 0"));
    }
    let outcomes: Vec<Option<Vec<bool>>> = (0..trials)
        .into_par_iter()
        .map(|i| match sampler(&mut spec.child(i as u64).rng()) {
            Ok(p) => {
                let hits = vertex_pins
                    .iter()
                    .map(|&(v, c)| p.u.get(c).is_some_and(|u| u.contains(&v)))
                    .chain(
                        color_pins
                            .iter()
                            .map(|&(x, c)| p.w.get(c).is_some_and(|w| w.contains(&x))),
                    )
                    .collect();
                Ok(Some(hits))
            }
            Err(Error::Failure { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let ok: Vec<&Vec<bool>> = outcomes.iter().flatten().collect();
    let failures = trials - ok.len();
    let denom = ok.len().max(1) as f64;
    let joint = ok.iter().filter(|h| h.iter().all(|&b| b)).count() as f64 / denom;
    let marginals: Vec<f64> = (0..pins)
        .map(|j| ok.iter().filter(|h| h[j]).count() as f64 / denom)
        .collect();
    let bound = (c_prime / n as f64).powi(pins as i32);
    let ratio = joint / bound;
    Ok(LocationReport {
        trials,
        failures,
        joint,
        std_error: (joint * (1.0 - joint) / denom).sqrt(),
        product_of_marginals: marginals.iter().product(),
        marginals,
        bound,
        ratio,
        flagged: ratio > 1.0,
    })
}
