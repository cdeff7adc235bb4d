//! Empirical spread audits.
//!
//! A sampler is `q`-spread when every set of `r` atoms is contained in a sample
//! with probability at most `q^r`. Atoms are host edges for edge spread and
//! `(pattern vertex, host vertex)` pins for vertex spread. For each `r` the
//! audit picks the most frequent `r`-set on one batch of samples and estimates
//! its containment probability on a second, independent batch.

use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercore::for_each_subset;
use crate::randmodels::RngSpec;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpreadAuditConfig {
    /// Spread parameter `q`; the bound for `r`-sets is `q^r`.
    pub q: f64,
    pub max_set_size: usize,
    /// Samples per batch. Two batches are drawn.
    pub trials: usize,
    /// Up to this many atoms all `r`-sets are candidates.
    pub exhaustive_atoms: usize,
    /// Seeds of the greedy candidate search beyond that.
    pub greedy_seeds: usize,
}

impl SpreadAuditConfig {
    pub fn new(q: f64, max_set_size: usize, trials: usize) -> Self {
        SpreadAuditConfig {
            q,
            max_set_size,
            trials,
            exhaustive_atoms: 20,
            greedy_seeds: 16,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetSizeReport {
    pub size: usize,
    /// Containment frequency of the witness in the selection batch.
    pub selected_frequency: f64,
    /// Containment frequency of the witness in the estimation batch.
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    pub ratio: f64,
    /// The witness atoms: edges, or `[pattern vertex, host vertex]` pins.
    pub witness: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpreadReport {
    pub q: f64,
    pub trials: usize,
    pub exhaustive: bool,
    pub by_size: Vec<SetSizeReport>,
    pub worst_ratio: f64,
    pub worst_size: usize,
    pub flagged: bool,
}

fn draw<T: Send>(
    trials: usize,
    spec: RngSpec,
    f: &(impl Fn(&mut ChaCha8Rng) -> Result<T> + Sync),
) -> Result<Vec<T>> {
    (0..trials)
        .into_par_iter()
        .map(|i| f(&mut spec.child(i as u64).rng()))
        .collect()
}

fn contains_all(sample: &[u32], set: &[u32]) -> bool {
    set.iter().all(|a| sample.binary_search(a).is_ok())
}

/// Most frequent `r`-set per size among `selection`, by exhaustive counting.
fn exhaustive_candidates(
    selection: &[Vec<u32>],
    atoms: usize,
    max_r: usize,
) -> Vec<(Vec<u32>, usize)> {
    let all: Vec<u32> = (0..atoms as u32).collect();
    (1..=max_r)
        .map(|r| {
            let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
            for s in selection {
                for_each_subset(s, r, |sub| {
                    *counts.entry(sub.to_vec()).or_insert(0) += 1;
                    true
                });
            }
            let best = counts
                .into_iter()
                .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
            best.unwrap_or_else(|| (all.iter().copied().take(r).collect(), 0))
        })
        .collect()
}

/// Greedy candidates: from each frequent seed atom, repeatedly add the atom
/// co-occurring most often with the current set.
fn greedy_candidates(
    selection: &[Vec<u32>],
    atoms: usize,
    max_r: usize,
    seeds: usize,
) -> Vec<(Vec<u32>, usize)> {
    let mut freq = vec![0usize; atoms];
    for s in selection {
        for &a in s {
            freq[a as usize] += 1;
        }
    }
    let mut order: Vec<u32> = (0..atoms as u32).collect();
    order.sort_by(|&a, &b| freq[b as usize].cmp(&freq[a as usize]).then(a.cmp(&b)));
    let mut best: Vec<(Vec<u32>, usize)> = (1..=max_r)
        .map(|r| (order.iter().copied().take(r).collect(), 0))
        .collect();
    for &seed in order.iter().take(seeds.max(1)) {
        let mut set = vec![seed];
        let mut support: Vec<usize> = (0..selection.len())
            .filter(|&i| contains_all(&selection[i], &set))
            .collect();
        loop {
            let r = set.len();
            if support.len() > best[r - 1].1 {
                let mut sorted = set.clone();
                sorted.sort_unstable();
                best[r - 1] = (sorted, support.len());
            }
            if r == max_r {
                break;
            }
            let mut co = vec![0usize; atoms];
            for &i in &support {
                for &a in &selection[i] {
                    co[a as usize] += 1;
                }
            }
            for &a in &set {
                co[a as usize] = 0;
            }
            let next = (0..atoms)
                .max_by(|&a, &b| co[a].cmp(&co[b]).then(b.cmp(&a)))
                .unwrap();
            if set.contains(&(next as u32)) {
                break;
            }
            set.push(next as u32);
            support.retain(|&i| selection[i].binary_search(&(next as u32)).is_ok());
        }
    }
    best
}

fn audit(
    selection: &[Vec<u32>],
    estimation: &[Vec<u32>],
    atoms: usize,
    cfg: &SpreadAuditConfig,
    describe: impl Fn(u32) -> Vec<usize>,
) -> SpreadReport {
    let max_r = cfg.max_set_size.min(atoms).max(1);
    let exhaustive = atoms <= cfg.exhaustive_atoms;
    let cands = if exhaustive {
        exhaustive_candidates(selection, atoms, max_r)
    } else {
        greedy_candidates(selection, atoms, max_r, cfg.greedy_seeds)
    };
    let m = estimation.len().max(1) as f64;
    let by_size: Vec<SetSizeReport> = cands
        .into_iter()
        .enumerate()
        .map(|(i, (set, sel))| {
            let r = i + 1;
            let hits = estimation.iter().filter(|s| contains_all(s, &set)).count();
            let est = hits as f64 / m;
            let bound = cfg.q.powi(r as i32);
            SetSizeReport {
                size: r,
                selected_frequency: sel as f64 / selection.len().max(1) as f64,
                estimate: est,
                std_error: (est * (1.0 - est) / m).sqrt(),
                bound,
                ratio: est / bound,
                witness: set.iter().map(|&a| describe(a)).collect(),
            }
        })
        .collect();
    let (worst_size, worst_ratio) =
        by_size
            .iter()
            .map(|r| (r.size, r.ratio))
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
    SpreadReport {
        q: cfg.q,
        trials: cfg.trials,
        exhaustive,
        by_size,
        worst_ratio,
        worst_size,
        flagged: worst_ratio > 1.0,
    }
}

fn check_cfg(cfg: &SpreadAuditConfig) -> Result<()> {
    if cfg.trials == 0 || !(cfg.q > 0.0) || cfg.max_set_size == 0 {
        return Err(Error::param(
            "spread audit needs trials > 0, q > 0 and max_set_size > 0",
        ));
    }
    Ok(())
}

/// Edge-spread audit of a sampler returning edge sets of a fixed host.
pub fn spread_audit<S>(
    sampler: S,
    host_edges: &[Vec<usize>],
    cfg: &SpreadAuditConfig,
    spec: RngSpec,
) -> Result<SpreadReport>
where
    S: Fn(&mut ChaCha8Rng) -> Result<Vec<Vec<usize>>> + Sync,
{
    check_cfg(cfg)?;
    let mut ids: HashMap<Vec<usize>, u32> = HashMap::new();
    for e in host_edges {
        let mut e = e.clone();
        e.sort_unstable();
        let next = ids.len() as u32;
        ids.entry(e).or_insert(next);
    }
    let mut names = vec![Vec::new(); ids.len()];
    for (e, &i) in &ids {
        names[i as usize] = e.clone();
    }
    let encode = |sample: Vec<Vec<usize>>| -> Result<Vec<u32>> {
        let mut out = sample
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                ids.get(&e)
                    .copied()
                    .ok_or_else(|| Error::integrity(format!("sampled edge {:?} not in host", e)))
            })
            .collect::<Result<Vec<u32>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    };
    let sel = draw(cfg.trials, spec.child(0), &sampler)?
        .into_iter()
        .map(encode)
        .collect::<Result<Vec<_>>>()?;
    let est = draw(cfg.trials, spec.child(1), &sampler)?
        .into_iter()
        .map(encode)
        .collect::<Result<Vec<_>>>()?;
    Ok(audit(&sel, &est, names.len(), cfg, |a| {
        names[a as usize].clone()
    }))
}

/// Vertex-spread audit of a sampler returning maps `pattern vertex -> host vertex`.
pub fn vertex_spread_audit<S>(
    sampler: S,
    pattern_vertices: usize,
    host_vertices: usize,
    cfg: &SpreadAuditConfig,
    spec: RngSpec,
) -> Result<SpreadReport>
where
    S: Fn(&mut ChaCha8Rng) -> Result<Vec<usize>> + Sync,
{
    check_cfg(cfg)?;
    let atoms = pattern_vertices * host_vertices;
    if atoms > u32::MAX as usize {
        return Err(Error::capacity("pin atoms", atoms, u32::MAX as usize));
    }
    let encode = |map: Vec<usize>| -> Result<Vec<u32>> {
        if map.len() != pattern_vertices || map.iter().any(|&y| y >= host_vertices) {
            return Err(Error::integrity(format!(
                "sampled map {:?} has the wrong shape",
                map
            )));
        }
        let mut out: Vec<u32> = map
            .iter()
            .enumerate()
            .map(|(x, &y)| (x * host_vertices + y) as u32)
            .collect();
        out.sort_unstable();
        Ok(out)
    };
    let sel = draw(cfg.trials, spec.child(0), &sampler)?
        .into_iter()
        .map(encode)
        .collect::<Result<Vec<_>>>()?;
    let est = draw(cfg.trials, spec.child(1), &sampler)?
        .into_iter()
        .map(encode)
        .collect::<Result<Vec<_>>>()?;
    Ok(audit(&sel, &est, atoms, cfg, |a| {
        vec![a as usize / host_vertices, a as usize % host_vertices]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_is_flagged() {
        let host: Vec<Vec<usize>> = (0..4)
            .flat_map(|a| (0..4).map(move |b| vec![a, 4 + b]))
            .collect();
        let fixed: Vec<Vec<usize>> = (0..4).map(|a| vec![a, 4 + a]).collect();
        let cfg = SpreadAuditConfig::new(std::f64::consts::E / 4.0, 3, 200);
        let rep = spread_audit(|_| Ok(fixed.clone()), &host, &cfg, RngSpec::new(1)).unwrap();
        assert!(rep.flagged);
        assert_eq!(rep.by_size[0].estimate, 1.0);
        assert_eq!(rep.worst_size, 3);
    }

    #[test]
    fn identity_embedder_ratio() {
        let n = 6;
        let cfg = SpreadAuditConfig::new(1.0 / n as f64, 2, 50);
        let rep = vertex_spread_audit(|_| Ok(vec![0, 1]), 2, n, &cfg, RngSpec::new(2)).unwrap();
        assert!((rep.worst_ratio - (n * n) as f64).abs() < 1e-9);
    }

    #[test]
    fn greedy_finds_planted_pair() {
        let host: Vec<Vec<usize>> = (0..30).map(|i| vec![i, i + 100]).collect();
        let cfg = SpreadAuditConfig::new(0.1, 2, 400);
        let rep = spread_audit(
            |rng| {
                use rand::Rng;
                let mut out = vec![vec![3, 103], vec![7, 107]];
                out.push(host[rng.random_range(0..30)].clone());
                Ok(out)
            },
            &host,
            &cfg,
            RngSpec::new(3),
        )
        .unwrap();
        assert!(!rep.exhaustive);
        assert_eq!(rep.by_size[1].witness, vec![vec![3, 103], vec![7, 107]]);
        assert_eq!(rep.by_size[1].estimate, 1.0);
    }
}
