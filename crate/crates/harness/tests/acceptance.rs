//! Acceptance gate: runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use tfactor::clustering::{sample_system_clusters, BadReason, ClusterConfig};
use tfactor::hypercore::{ColoredExpansionGraph, Hypergraph, HypergraphSystem, PartiteHypergraph};
use tfactor::matchings::{
    count_pms, pikhurko_glue, spread_audit, uniform_pm_complete, uniform_pm_dense, BipartiteGraph,
    GlueConfig, SpreadAuditConfig,
};
use tfactor::patterns::{ExpandedPattern, FactorComplex, Pattern};
use tfactor::randmodels::{random_k_graph, random_system_with_floor, RngSpec};
use tfactor::solver::{count_transversal_factors, Embedding};
use tfactor_harness::config::ExperimentConfig;
use tfactor_harness::output::write_jsonl;
use tfactor_harness::robustness::end_to_end_robustness;
use tfactor_harness::sweep::{run_threshold_sweep, trial_spec};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

// ---------------------------------------------------------------- oracles

/// `(edges, vertices)` of an edge subset given as a bitmask.
fn subset_size(edges: &[Vec<usize>], mask: u32) -> (i64, i64) {
    let mut vs = BTreeSet::new();
    let mut m = 0;
    for (i, e) in edges.iter().enumerate() {
        if mask >> i & 1 == 1 {
            vs.extend(e.iter().copied());
            m += 1;
        }
    }
    (m, vs.len() as i64)
}

/// `a.0/(a.1-1) < b.0/(b.1-1)` by cross multiplication.
fn less(a: (i64, i64), b: (i64, i64)) -> bool {
    a.0 * (b.1 - 1) < b.0 * (a.1 - 1)
}

fn strictly_balanced_oracle(edges: &[Vec<usize>]) -> bool {
    let full = (1u32 << edges.len()) - 1;
    let whole = subset_size(edges, full);
    (1..full).all(|m| less(subset_size(edges, m), whole))
}

/// Largest 1-density as a `(numerator, denominator)` pair.
fn max_density_oracle(edges: &[Vec<usize>]) -> (i64, i64) {
    let full = (1u32 << edges.len()) - 1;
    let best = (1..=full)
        .map(|m| subset_size(edges, m))
        .fold((0, 2), |best, x| if less(best, x) { x } else { best });
    (best.0, best.1 - 1)
}

fn same_ratio(a: (i64, i64), b: (i64, i64)) -> bool {
    a.0 * b.1 == b.0 * a.1
}

fn expand_edges(edges: &[Vec<usize>], s: usize) -> Vec<Vec<usize>> {
    edges
        .iter()
        .enumerate()
        .map(|(j, e)| {
            let mut x = e.clone();
            x.push(s + j);
            x
        })
        .collect()
}

fn corpus() -> Vec<(String, Pattern)> {
    let mut out: Vec<(String, Pattern)> = Pattern::NAMES
        .iter()
        .map(|n| (n.to_string(), Pattern::named(n).unwrap()))
        .collect();
    let extra: [(&str, Vec<Vec<usize>>); 2] = [
        (
            "tight 3-path",
            vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]],
        ),
        (
            "3-uniform loose triangle",
            vec![vec![0, 1, 2], vec![2, 3, 4], vec![0, 4, 5]],
        ),
    ];
    for (name, edges) in extra {
        let n = edges.iter().flatten().max().unwrap() + 1;
        out.push((
            name.into(),
            Pattern::new(Hypergraph::from_edges(3, n, edges).unwrap()).unwrap(),
        ));
    }
    out
}

fn enumerate_pms(g: &BipartiteGraph) -> Vec<Vec<usize>> {
    fn rec(g: &BipartiteGraph, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let a = cur.len();
        if a == g.left() {
            out.push(cur.clone());
            return;
        }
        for b in 0..g.right() {
            if !used[b] && g.has_edge(a, b) {
                used[b] = true;
                cur.push(b);
                rec(g, cur, used, out);
                cur.pop();
                used[b] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(g, &mut Vec::new(), &mut vec![false; g.right()], &mut out);
    out
}

fn permanent_ie(g: &BipartiteGraph) -> i128 {
    let n = g.left();
    let mut total = 0i128;
    for cols in 0u32..(1 << n) {
        let prod: i128 = (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| cols >> b & 1 == 1 && g.has_edge(a, b))
                    .count() as i128
            })
            .product();
        let sign = if (n - cols.count_ones() as usize).is_multiple_of(2) {
            1
        } else {
            -1
        };
        total += sign * prod;
    }
    total
}

/// Exact covers of the expansion graph by copies of the expanded pattern.
fn expansion_cover_count(sys: &HypergraphSystem, f: &Pattern) -> u128 {
    let x = ColoredExpansionGraph::from_system(sys);
    let host = x.as_hypergraph().unwrap();
    let star = ExpandedPattern::new(f).unwrap();
    let masks: Vec<u64> = FactorComplex::build(&host, &star.graph)
        .unwrap()
        .copies
        .iter()
        .map(|c| c.vertices.iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    fn covers(masks: &[u64], left: u64) -> u128 {
        if left == 0 {
            return 1;
        }
        let first = left.trailing_zeros();
        masks
            .iter()
            .filter(|&&m| m >> first & 1 == 1 && m & !left == 0)
            .map(|&m| covers(masks, left & !m))
            .sum()
    }
    covers(&masks, (1u64 << host.n()) - 1)
}

/// Edge-per-color, injectivity and spanning, checked from scratch.
fn independent_validate(sys: &HypergraphSystem, f: &Pattern, emb: &Embedding) -> bool {
    let (s, t, n) = (f.s(), f.t(), sys.n());
    let vs: BTreeSet<usize> = emb.vertex_map.iter().copied().collect();
    let cs: BTreeSet<usize> = emb.color_map.iter().copied().collect();
    if emb.vertex_map.len() != s * n || vs.len() != s * n || vs.iter().any(|&v| v >= s * n) {
        return false;
    }
    if emb.color_map.len() != t * n || cs.len() != t * n || cs.iter().any(|&c| c >= t * n) {
        return false;
    }
    let edges: Vec<Vec<usize>> = f.graph().edges().map(<[usize]>::to_vec).collect();
    (0..n).all(|i| {
        edges.iter().enumerate().all(|(j, e)| {
            let mut img: Vec<usize> = e.iter().map(|&x| emb.vertex_map[i * s + x]).collect();
            img.sort_unstable();
            sys.color(emb.color_map[i * t + j]).contains(&img)
        })
    })
}

fn binom(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

// ---------------------------------------------------------------- criteria

fn balance_certification() -> Verdict {
    let start = Instant::now();
    let list = corpus();
    let mut mismatches = Vec::new();
    for (name, f) in &list {
        let edges = f.edge_list();
        let (num, den) = max_density_oracle(&edges);
        let m1 = f.max_one_density();
        if f.is_strictly_balanced() != strictly_balanced_oracle(&edges)
            || !same_ratio((*m1.numer(), *m1.denom()), (num, den))
        {
            mismatches.push(name.clone());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        list.len() >= 10 && mismatches.is_empty() && secs < 1.0,
        format!(
            "{} patterns, mismatches {:?}, {:.3} s",
            list.len(),
            mismatches,
            secs
        ),
    )
}

fn expansion_claims() -> Verdict {
    let mut failures = Vec::new();
    for (name, f) in corpus() {
        let (s, t) = (f.s() as i64, f.t() as i64);
        let star = expand_edges(&f.edge_list(), f.s());
        let full = (1u32 << star.len()) - 1;
        let (m, v) = subset_size(&star, full);
        let d_ok = same_ratio((m, v - 1), (t, s + t - 1));
        // m1(F*) (1 + m1(F)) = m1(F) with m1(F) = a/b reads m1(F*) = a/(a+b)
        let m1 = f.max_one_density();
        let (a, b) = (*m1.numer(), *m1.denom());
        let m_ok = same_ratio(max_density_oracle(&star), (a, a + b));
        let sb_ok = !f.is_strictly_balanced() || strictly_balanced_oracle(&star);
        if !(d_ok && m_ok && sb_ok) {
            failures.push(name);
        }
    }
    verdict(
        failures.is_empty(),
        format!("exact identities; failures {:?}", failures),
    )
}

fn matching_oracles() -> Verdict {
    let samples = 100_000usize;
    let (mut graphs, mut comparisons, mut worst) = (0, 0usize, 0.0f64);
    let mut count_ok = true;
    let mut seed = 0u64;
    while graphs < 50 {
        seed += 1;
        let spec = RngSpec::new(3_000 + seed);
        let n = 2 + (seed as usize % 5);
        let density = 0.5 + 0.45 * spec.edge_value(&[n]);
        let g = BipartiteGraph::from_fn(n, n, |a, b| spec.edge_value(&[a, b]) < density);
        let pms = enumerate_pms(&g);
        let c = count_pms(&g).unwrap();
        count_ok &= c as i128 == permanent_ie(&g) && c as usize == pms.len();
        if pms.is_empty() {
            continue;
        }
        graphs += 1;
        let mut rng = spec.child(1).rng();
        let mut hits: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..samples {
            let m = uniform_pm_dense(&g, &mut rng).unwrap();
            *hits.entry(m.as_permutation()).or_default() += 1;
        }
        if hits.len() > pms.len() {
            count_ok = false;
        }
        let p = 1.0 / pms.len() as f64;
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        for pm in &pms {
            let f = *hits.get(pm).unwrap_or(&0) as f64 / samples as f64;
            comparisons += 1;
            if sigma > 0.0 {
                worst = worst.max((f - p).abs() / sigma);
            }
        }
    }
    verdict(
        count_ok && worst <= 4.0,
        format!(
            "{} graphs, {} matchings compared, worst deviation {:.2} sigma, counts exact: {}",
            graphs, comparisons, worst, count_ok
        ),
    )
}

fn spread_calibration() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for n in 5..=12usize {
        let host: Vec<Vec<usize>> = (0..n)
            .flat_map(|a| (0..n).map(move |b| vec![a, n + b]))
            .collect();
        let q = std::f64::consts::E / n as f64;
        let cfg = SpreadAuditConfig::new(q, 2, 20_000);
        let to_edges = move |perm: Vec<usize>| -> Vec<Vec<usize>> {
            perm.iter()
                .enumerate()
                .map(|(a, &b)| vec![a, n + b])
                .collect()
        };
        let uniform =
            move |rng: &mut ChaCha8Rng| Ok(to_edges(uniform_pm_complete(n, rng).as_permutation()));
        let point = move |_: &mut ChaCha8Rng| Ok(to_edges((0..n).collect()));
        let u = spread_audit(uniform, &host, &cfg, RngSpec::new(40 + n as u64)).unwrap();
        let pm = spread_audit(point, &host, &cfg, RngSpec::new(40 + n as u64)).unwrap();
        let single = &u.by_size[0];
        let z = (single.estimate - 1.0 / n as f64).abs() / single.std_error.max(f64::MIN_POSITIVE);
        let this =
            z <= 3.0 && u.worst_ratio <= 1.0 && pm.flagged && pm.worst_ratio >= n as f64 / 2.0;
        ok &= this;
        lines.push(format!(
            "n={} z={:.2} ratio={:.3} broken={:.2}",
            n, z, u.worst_ratio, pm.worst_ratio
        ));
    }
    verdict(ok, lines.join("; "))
}

fn gluing() -> Verdict {
    let mut complete_ok = 0;
    let mut complete_total = 0;
    let mut identity_ok = true;
    for k in 2..=4usize {
        for n in [5usize, 8] {
            let parts: Vec<Vec<usize>> = (0..k).map(|p| (p * n..(p + 1) * n).collect()).collect();
            let h = PartiteHypergraph::complete(parts).unwrap();
            for trial in 0..100u64 {
                complete_total += 1;
                let classes: Vec<usize> = (0..(trial as usize % (k - 1)) + 1).collect();
                let mut rng = RngSpec::new(trial).child((k * 10 + n) as u64).rng();
                if let Ok(out) = pikhurko_glue(&h, &classes, &GlueConfig::new(0.2), &mut rng) {
                    let chain_ok = out.forward_chain.windows(2).all(|w| {
                        let prev: BTreeSet<&Vec<usize>> = w[0].iter().collect();
                        let cut: BTreeSet<Vec<usize>> =
                            w[1].iter().map(|t| t[..t.len() - 1].to_vec()).collect();
                        prev.into_iter().cloned().collect::<BTreeSet<_>>() == cut
                    }) && out.backward_chain.windows(2).all(|w| {
                        let prev: BTreeSet<Vec<usize>> = w[0].iter().cloned().collect();
                        let cut: BTreeSet<Vec<usize>> =
                            w[1].iter().map(|t| t[1..].to_vec()).collect();
                        prev == cut
                    });
                    identity_ok &= chain_ok && out.diagnostics.chain_identity_ok;
                    if out.matching.is_perfect_in(&h) {
                        complete_ok += 1;
                    }
                }
            }
        }
    }
    let mut dense = Vec::new();
    for n in [5usize, 8] {
        let parts: Vec<Vec<usize>> = (0..3).map(|p| (p * n..(p + 1) * n).collect()).collect();
        let mut ok = 0;
        for trial in 0..100u64 {
            let spec = RngSpec::new(500 + trial).child(n as u64);
            let h = PartiteHypergraph::from_predicate(parts.clone(), |t| spec.edge_value(t) < 0.9)
                .unwrap();
            if let Ok(out) =
                pikhurko_glue(&h, &[0], &GlueConfig::new(0.2), &mut spec.child(1).rng())
            {
                ok += out.matching.is_perfect_in(&h) as usize;
            }
        }
        dense.push(ok);
    }
    verdict(
        complete_ok == complete_total && identity_ok && dense.iter().all(|&d| d >= 95),
        format!(
            "complete hosts {}/{}, chain identity {}, dense hosts (n=5, n=8) {:?}/100",
            complete_ok, complete_total, identity_ok, dense
        ),
    )
}

fn clustering() -> Verdict {
    let n = 24;
    let cfg = ClusterConfig::new(3, 1, 0.4, 0.1);
    let floor = ((cfg.delta + cfg.alpha) * (3 * n - 1) as f64).ceil() as usize;
    let fraction = cfg.delta + cfg.alpha / 2.0;
    let (mut successes, mut violations, mut attempts) = (0, 0, 0);
    for trial in 0..100u64 {
        let spec = RngSpec::new(6_000 + trial);
        let sys = random_system_with_floor(2, 3, 3, n, 1, 0.9, floor, spec.child(0)).unwrap();
        let Ok(out) = sample_system_clusters(&sys, &cfg, &mut spec.child(1).rng()) else {
            continue;
        };
        successes += 1;
        attempts += out.audit.attempts;
        let (p, plan) = (&out.partition, &out.plan);
        let mut vs: Vec<usize> = p.u.iter().flatten().copied().collect();
        let mut cs: Vec<usize> = p.w.iter().flatten().copied().collect();
        vs.sort_unstable();
        cs.sort_unstable();
        let mut ok = vs == (0..3 * n).collect::<Vec<_>>() && cs == (0..3 * n).collect::<Vec<_>>();
        ok &= p.len() == plan.m && p.u[0].len() == plan.r1 && p.w[0].len() == plan.r2;
        ok &= plan.r1 == 3 * 3 * 2 + (3 * n) % (3 * 3 * 2);
        ok &= (1..p.len()).all(|i| p.u[i].len() == 3 * cfg.c && p.w[i].len() == 3 * cfg.c);
        ok &= out.bad.len() == plan.m_prime - plan.m;
        ok &= out.bad.count(BadReason::Padding) == out.audit.padding;
        for (u, w) in p.u.iter().zip(&p.w) {
            let need = (fraction * binom(u.len() - 1, 1)).ceil() as usize;
            for &v in u {
                for &c in w {
                    let deg = u
                        .iter()
                        .filter(|&&x| x != v && sys.color(c).contains(&[v.min(x), v.max(x)]))
                        .count();
                    ok &= deg >= need;
                }
            }
        }
        violations += !ok as usize;
    }
    verdict(
        violations == 0 && successes >= 90,
        format!(
            "{}/100 partitions, {} property violations, mean attempts {:.2}",
            successes,
            violations,
            attempts as f64 / successes.max(1) as f64
        ),
    )
}

fn end_to_end() -> Verdict {
    let path = configs().join("robustness_k3.json");
    let cfg = ExperimentConfig::from_file(&path).unwrap();
    let res = end_to_end_robustness(&cfg, &configs()).unwrap();
    let pattern = Pattern::named("K3").unwrap();
    let mut rechecked = 0;
    let mut bad = 0;
    for r in &res.records {
        if let Some(emb) = &r.embedding {
            let spec = trial_spec(cfg.seed, r.n, r.trial).child(0);
            let sys = cfg
                .generator
                .build(&pattern, r.n, spec.child(0), &configs())
                .unwrap();
            rechecked += 1;
            bad += !independent_validate(&sys, &pattern, emb) as usize;
        }
    }
    let pt = &res.points[0];
    let spread = pt.vertex_spread.as_ref().map(|s| s.worst_ratio);
    verdict(
        pt.successes >= 95
            && bad == 0
            && rechecked == pt.successes
            && spread.is_some_and(f64::is_finite),
        format!(
            "{}/{} validated, {} failed the independent check, pin ratio {:?}",
            pt.successes, pt.trials, bad, spread
        ),
    )
}

fn counting() -> Verdict {
    let k4 = Hypergraph::complete(2, 4).unwrap();
    let sys = HypergraphSystem::new(2, 2, 1, 2, vec![k4.clone(), k4]).unwrap();
    let k2 = Pattern::named("K2").unwrap();
    let base = count_transversal_factors(&sys, &k2).unwrap().unordered;
    let shapes: [(&str, usize, f64); 5] = [
        ("K2", 3, 0.6),
        ("K2", 4, 0.7),
        ("K3", 2, 0.75),
        ("P3", 2, 0.6),
        ("E3", 2, 0.5),
    ];
    let mut agree = 0;
    let mut nonzero = 0;
    for i in 0..50u64 {
        let (name, n, p) = shapes[i as usize % shapes.len()];
        let f = Pattern::named(name).unwrap();
        let colors = (0..f.t() * n)
            .map(|c| {
                random_k_graph(f.s() * n, f.k(), p, RngSpec::new(8_000 + i).child(c as u64))
                    .unwrap()
            })
            .collect();
        let sys = HypergraphSystem::new(f.k(), f.s(), f.t(), n, colors).unwrap();
        let c = count_transversal_factors(&sys, &f).unwrap().unordered;
        agree += (c == expansion_cover_count(&sys, &f)) as usize;
        nonzero += (c > 0) as usize;
    }
    verdict(
        base == 6 && agree == 50,
        format!(
            "K2 on two K4 colors: {}; {}/50 agree ({} nonzero)",
            base, agree, nonzero
        ),
    )
}

fn threshold_probe() -> Verdict {
    let start = Instant::now();
    let cfg = ExperimentConfig::from_file(&configs().join("threshold_k3.json")).unwrap();
    let res = run_threshold_sweep(&cfg, &configs()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let c = &res.curve;
    let halves: Vec<Option<f64>> = c.sizes.iter().map(|s| s.p_half).collect();
    let slope = c.fitted_exponent;
    verdict(
        cfg.trials >= 500
            && c.p_half_decreasing
            && slope.is_some_and(|x| (-2.4..=-1.0).contains(&x))
            && secs <= 1800.0,
        format!("p_half {:?}, slope {:?}, {:.0} s", halves, slope, secs),
    )
}

fn determinism() -> Verdict {
    let mut sweep = ExperimentConfig::from_file(&configs().join("threshold_k3.json")).unwrap();
    sweep.trials = 30;
    sweep.n_grid = vec![6, 9];
    let mut robust = ExperimentConfig::from_file(&configs().join("robustness_k3.json")).unwrap();
    robust.trials = 10;
    robust.audit.trials = 20;
    let run = |threads: usize| -> (Vec<u8>, Vec<u8>) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let mut a = Vec::new();
            write_jsonl(
                &run_threshold_sweep(&sweep, &configs()).unwrap().trials,
                &mut a,
            )
            .unwrap();
            let mut b = Vec::new();
            write_jsonl(
                &end_to_end_robustness(&robust, &configs()).unwrap().records,
                &mut b,
            )
            .unwrap();
            (a, b)
        })
    };
    let first = run(1);
    let second = run(1);
    let parallel = run(3);
    verdict(
        first == second && first == parallel && !first.0.is_empty() && !first.1.is_empty(),
        format!(
            "sweep {} bytes, robustness {} bytes, identical across reruns and thread counts: {}",
            first.0.len(),
            first.1.len(),
            first == second && first == parallel
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("1 balance certification", balance_certification),
        ("2 expansion identities", expansion_claims),
        ("3 matching oracles", matching_oracles),
        ("4 spread audit calibration", spread_calibration),
        ("5 gluing", gluing),
        ("6 clustering soundness", clustering),
        ("7 end-to-end embedding", end_to_end),
        ("8 counting oracle", counting),
        ("9 threshold probe", threshold_probe),
        ("10 determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        println!(
            "criterion {}: {} ({}; {:.1} s)",
            name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
        failed += !v.pass as usize;
    }
    if failed > 0 {
        println!("{} criteria failed", failed);
        std::process::exit(1);
    }
}
