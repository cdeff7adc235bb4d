//! Threshold sweeps with monotone coupling.
//!
//! Within one trial every grid probability thins the same base system with
//! the same edge values, so success is monotone in `p` and the smallest
//! successful grid index can be found by bisection.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tfactor::hypercore::HypergraphSystem;
use tfactor::patterns::Pattern;
use tfactor::randmodels::{sparsify_system, RngSpec};
use tfactor::solver::{
    search_transversal_factor, validate_embedding, SearchOptions, SEARCH_VERTEX_CAP,
};
use tfactor::{Error, Result};

use crate::config::{reference_rate, BaseRate, ExperimentConfig};
use crate::stats::{crossing, least_squares, wilson, Interval, Z95};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRecord {
    pub n: usize,
    pub trial: usize,
    /// Smallest grid index with a factor; `None` if even the largest fails.
    pub critical_index: Option<usize>,
    pub critical_p: Option<f64>,
    pub solver_calls: usize,
    pub search_nodes: u64,
    /// Some solver call hit the node limit and was counted as a failure.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CurvePoint {
    pub p: f64,
    pub successes: usize,
    pub trials: usize,
    pub frequency: f64,
    pub interval: Interval,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SizeSummary {
    pub n: usize,
    pub reference_p: f64,
    pub points: Vec<CurvePoint>,
    pub p_half: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ThresholdCurve {
    pub base_rate: BaseRate,
    /// `-1/d - 1` for the density behind the reference rate.
    pub predicted_exponent: f64,
    pub sizes: Vec<SizeSummary>,
    /// Least-squares slope of `log p_half` against `log n`.
    pub fitted_exponent: Option<f64>,
    pub p_half_decreasing: bool,
    /// For strictly balanced patterns, whether the two reference exponents coincide.
    pub exponent_agreement: Option<bool>,
    /// The polylogarithmic factor cannot be separated from constants at these sizes.
    pub log_factor_resolved: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub curve: ThresholdCurve,
    pub trials: Vec<TrialRecord>,
}

fn density_f64(d: tfactor::patterns::Density) -> f64 {
    *d.numer() as f64 / *d.denom() as f64
}

/// Outcome of one solver call on the thinned system.
fn solve_at(
    sys: &HypergraphSystem,
    pattern: &Pattern,
    p: f64,
    coupling: RngSpec,
    node_limit: Option<u64>,
) -> Result<(bool, u64, bool)> {
    let thin = sparsify_system(sys, p, coupling)?.system;
    let out = search_transversal_factor(
        &thin,
        pattern,
        &SearchOptions {
            node_limit,
            ..Default::default()
        },
    )?;
    match out.embedding {
        Some(emb) => {
            validate_embedding(&thin, pattern, &emb)?;
            Ok((true, out.nodes, false))
        }
        None => Ok((false, out.nodes, !out.complete)),
    }
}

/// Smallest successful index of the coupled grid `ps` for one trial.
pub fn bisect_trial(
    sys: &HypergraphSystem,
    pattern: &Pattern,
    ps: &[f64],
    coupling: RngSpec,
    node_limit: Option<u64>,
) -> Result<(Option<usize>, usize, u64, bool)> {
    let (mut lo, mut hi) = (-1i64, ps.len() as i64);
    let (mut calls, mut nodes, mut truncated) = (0, 0, false);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let (ok, k, cut) = solve_at(sys, pattern, ps[mid as usize], coupling, node_limit)?;
        calls += 1;
        nodes += k;
        truncated |= cut;
        if ok {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let critical = (hi < ps.len() as i64).then_some(hi as usize);
    Ok((critical, calls, nodes, truncated))
}

/// Success of every grid point of one trial, solved independently.
pub fn exhaustive_trial(
    sys: &HypergraphSystem,
    pattern: &Pattern,
    ps: &[f64],
    coupling: RngSpec,
) -> Result<Vec<bool>> {
    ps.iter()
        .map(|&p| solve_at(sys, pattern, p, coupling, None).map(|r| r.0))
        .collect()
}

pub fn trial_spec(seed: u64, n: usize, trial: usize) -> RngSpec {
    RngSpec::new(seed).child(n as u64).child(trial as u64)
}

/// Runs the sweep described by `cfg`; relative paths resolve against `base`.
pub fn run_threshold_sweep(cfg: &ExperimentConfig, base: &Path) -> Result<SweepResult> {
    cfg.validate()?;
    let pattern = cfg.pattern.load(base)?;
    for &n in &cfg.n_grid {
        if pattern.s() * n > SEARCH_VERTEX_CAP {
            return Err(Error::capacity(
                "host vertices for exact search",
                pattern.s() * n,
                SEARCH_VERTEX_CAP,
            ));
        }
    }
    let mut ns = cfg.n_grid.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut sizes = Vec::new();
    let mut records = Vec::new();
    for &n in &ns {
        let ps = cfg.probabilities(&pattern, n)?;
        let rows: Vec<TrialRecord> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let spec = trial_spec(cfg.seed, n, trial);
                let sys = cfg.generator.build(&pattern, n, spec.child(0), base)?;
                let (critical, calls, nodes, truncated) =
                    bisect_trial(&sys, &pattern, &ps, spec.child(1), cfg.node_limit)?;
                Ok(TrialRecord {
                    n,
                    trial,
                    critical_index: critical,
                    critical_p: critical.map(|j| ps[j]),
                    solver_calls: calls,
                    search_nodes: nodes,
                    truncated,
                })
            })
            .collect::<Result<_>>()?;
        let points: Vec<CurvePoint> = ps
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let successes = rows
                    .iter()
                    .filter(|r| r.critical_index.is_some_and(|c| c <= j))
                    .count();
                CurvePoint {
                    p,
                    successes,
                    trials: cfg.trials,
                    frequency: successes as f64 / cfg.trials as f64,
                    interval: wilson(successes, cfg.trials, Z95),
                }
            })
            .collect();
        if points.windows(2).any(|w| w[1].successes < w[0].successes) {
            return Err(Error::integrity("coupled success curve decreases in p"));
        }
        let p_half = crossing(
            &points
                .iter()
                .map(|q| (q.p, q.frequency))
                .collect::<Vec<_>>(),
            0.5,
        );
        sizes.push(SizeSummary {
            n,
            reference_p: reference_rate(&pattern, cfg.base_rate, n),
            points,
            p_half,
        });
        records.extend(rows);
    }
    let fit: Vec<(f64, f64)> = sizes
        .iter()
        .filter_map(|s| {
            s.p_half
                .filter(|&p| p > 0.0)
                .map(|p| ((s.n as f64).ln(), p.ln()))
        })
        .collect();
    let p_half_decreasing = sizes.len() >= 2
        && sizes.iter().all(|s| s.p_half.is_some())
        && sizes
            .windows(2)
            .all(|w| w[1].p_half.unwrap() < w[0].p_half.unwrap());
    let density = match cfg.base_rate {
        BaseRate::OneDensity => pattern.one_density(),
        BaseRate::MaxOneDensity => pattern.max_one_density(),
    };
    let exponent_agreement = if pattern.is_strictly_balanced() {
        let agree = pattern.one_density() == pattern.max_one_density();
        if !agree {
            return Err(Error::integrity("strictly balanced pattern with m1 != d1"));
        }
        Some(agree)
    } else {
        None
    };
    let curve = ThresholdCurve {
        base_rate: cfg.base_rate,
        predicted_exponent: -1.0 / density_f64(density) - 1.0,
        fitted_exponent: least_squares(&fit).map(|f| f.0),
        p_half_decreasing,
        exponent_agreement,
        log_factor_resolved: false,
        sizes,
    };
    Ok(SweepResult {
        curve,
        trials: records,
    })
}

/// The same sweep with the reference rate built from the maximum 1-density.
pub fn run_general_sweep_m1(cfg: &ExperimentConfig, base: &Path) -> Result<SweepResult> {
    let mut c = cfg.clone();
    c.base_rate = BaseRate::MaxOneDensity;
    run_threshold_sweep(&c, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AuditParams, ClusteringParams, GeneratorSpec, PatternSource};

    fn cfg(pattern: &str, n: Vec<usize>, ps: Vec<f64>, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            pattern: PatternSource::Named(pattern.into()),
            generator: GeneratorSpec::Complete,
            n_grid: n,
            p_grid: Some(ps),
            multipliers: None,
            base_rate: BaseRate::OneDensity,
            trials,
            seed: 1,
            clustering: ClusteringParams::default(),
            audit: AuditParams::default(),
            node_limit: None,
        }
    }

    #[test]
    fn zero_and_one() {
        let r =
            run_threshold_sweep(&cfg("K3", vec![3], vec![0.0, 1.0], 20), Path::new(".")).unwrap();
        let f: Vec<f64> = r.curve.sizes[0]
            .points
            .iter()
            .map(|p| p.frequency)
            .collect();
        assert_eq!(f, vec![0.0, 1.0]);
        assert_eq!(r.curve.exponent_agreement, Some(true));
    }

    #[test]
    fn perfect_matchings_vanish_when_sparse() {
        let n = 6;
        let r = run_threshold_sweep(
            &cfg("K2", vec![n], vec![0.01 / 36.0, 1.0], 200),
            Path::new("."),
        )
        .unwrap();
        let pts = &r.curve.sizes[0].points;
        assert_eq!(pts[1].frequency, 1.0);
        assert!(pts[0].frequency < 0.02);
    }

    #[test]
    fn disjoint_edges_report_a_curve() {
        let mut c = cfg("2K2", vec![2, 3], vec![0.2, 0.5, 1.0], 20);
        c.p_grid = None;
        c.multipliers = Some(vec![0.5, 2.0, 8.0, 1e9]);
        let r = run_general_sweep_m1(&c, Path::new(".")).unwrap();
        assert_eq!(r.curve.exponent_agreement, None);
        assert!(r
            .curve
            .sizes
            .iter()
            .all(|s| s.points.last().unwrap().frequency == 1.0));
    }

    #[test]
    fn too_large_is_rejected_up_front() {
        let e =
            run_threshold_sweep(&cfg("K3", vec![20], vec![1.0], 1), Path::new(".")).unwrap_err();
        assert!(matches!(e, Error::Capacity { .. }));
    }
}
