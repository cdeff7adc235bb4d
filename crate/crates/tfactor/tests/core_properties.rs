use proptest::prelude::*;
use tfactor::hypercore::io::{parse_system, write_system};
use tfactor::hypercore::{
    binomial, subsets, ColoredExpansionGraph, Hypergraph, HypergraphSystem, PartiteHypergraph,
};
use tfactor::randmodels::{random_k_graph, sparsify, sparsify_system, RngSpec};

fn random_system(k: usize, s: usize, t: usize, n: usize, p: f64, seed: u64) -> HypergraphSystem {
    let colors = (0..t * n)
        .map(|c| random_k_graph(s * n, k, p, RngSpec::new(seed).child(c as u64)).unwrap())
        .collect();
    HypergraphSystem::new(k, s, t, n, colors).unwrap()
}

/// Minimum `d`-degree by counting, for each `d`-set, the edges containing it.
fn min_degree_oracle(h: &Hypergraph, d: usize) -> usize {
    let verts: Vec<usize> = (0..h.n()).collect();
    subsets(&verts, d)
        .iter()
        .map(|set| {
            h.edges()
                .filter(|e| set.iter().all(|v| e.contains(v)))
                .count()
        })
        .min()
        .unwrap()
}

#[test]
fn complete_graph_degrees_have_closed_form() {
    for k in 2..=4 {
        for d in 1..k {
            for n in k..=10 {
                let h = Hypergraph::complete(k, n).unwrap();
                assert_eq!(
                    h.min_degree(d).unwrap() as u128,
                    binomial(n - d, k - d),
                    "k={} d={} n={}",
                    k,
                    d,
                    n
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn min_degree_matches_counting(k in 2usize..=3, n in 4usize..=8, p in 0.3f64..1.0, seed in any::<u64>()) {
        let h = random_k_graph(n, k, p, RngSpec::new(seed)).unwrap();
        for d in 1..k {
            prop_assert_eq!(h.min_degree(d).unwrap(), min_degree_oracle(&h, d));
        }
    }

    #[test]
    fn expansion_round_trip(k in 2usize..=3, n in 2usize..=4, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let sys = random_system(k, 3, 2, n, p, seed);
        let x = ColoredExpansionGraph::from_system(&sys);
        prop_assert_eq!(x.edge_count(), sys.colors().iter().map(Hypergraph::edge_count).sum::<usize>());
        prop_assert_eq!(x.decode().unwrap(), sys);
    }

    #[test]
    fn system_text_round_trip(n in 1usize..=4, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let sys = random_system(2, 3, 3, n, p, seed);
        let (back, stats) = parse_system(&write_system(&sys)).unwrap();
        prop_assert_eq!(stats.duplicate_edges, 0);
        prop_assert_eq!(back, sys);
    }

    #[test]
    fn adding_edges_never_lowers_degrees(k in 2usize..=3, n in 4usize..=7, seed in any::<u64>()) {
        let mut h = random_k_graph(n, k, 0.5, RngSpec::new(seed)).unwrap();
        let all = subsets(&(0..n).collect::<Vec<_>>(), k);
        let mut rng = RngSpec::new(seed).child(7).rng();
        for _ in 0..6 {
            let before: Vec<usize> = (1..k).map(|d| h.min_degree(d).unwrap()).collect();
            let e = &all[rand::Rng::random_range(&mut rng, 0..all.len())];
            h.insert(e).unwrap();
            let after: Vec<usize> = (1..k).map(|d| h.min_degree(d).unwrap()).collect();
            prop_assert!(before.iter().zip(&after).all(|(b, a)| a >= b));
        }
    }

    #[test]
    fn partite_degrees_are_bounded_and_monotone(k in 2usize..=3, size in 2usize..=4, seed in any::<u64>()) {
        let parts: Vec<Vec<usize>> = (0..k).map(|p| (p * size..(p + 1) * size).collect()).collect();
        let spec = RngSpec::new(seed);
        let mut h = PartiteHypergraph::from_predicate(parts, |t| spec.edge_value(t) < 0.6).unwrap();
        let class_sets: Vec<Vec<usize>> = (1..(1usize << k) - 1)
            .map(|m| (0..k).filter(|i| m >> i & 1 == 1).collect())
            .collect();
        let degs = |h: &PartiteHypergraph| -> Vec<usize> {
            class_sets.iter().map(|l| h.partite_degree(l).unwrap()).collect()
        };
        let before = degs(&h);
        for (l, d) in class_sets.iter().zip(&before) {
            let free = (0..k).filter(|i| !l.contains(i)).map(|_| size).product::<usize>();
            prop_assert!(*d <= free);
        }
        let mut rng = spec.child(1).rng();
        let local: Vec<usize> = (0..k).map(|_| rand::Rng::random_range(&mut rng, 0..size)).collect();
        h.insert_local(&local).unwrap();
        let after = degs(&h);
        prop_assert!(before.iter().zip(&after).all(|(b, a)| a >= b));
    }

    #[test]
    fn sparsification_is_deterministic_and_nested(
        p1 in 0.0f64..=1.0,
        p2 in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let sys = HypergraphSystem::complete(2, 3, 3, 3).unwrap();
        let spec = RngSpec::new(seed);
        let a = sparsify_system(&sys, lo, spec).unwrap().system;
        let b = sparsify_system(&sys, hi, spec).unwrap().system;
        prop_assert_eq!(&a, &sparsify_system(&sys, lo, spec).unwrap().system);
        for (ca, cb) in a.colors().iter().zip(b.colors()) {
            prop_assert!(ca.edges().all(|e| cb.contains(e)));
        }
    }
}

#[test]
fn sparsify_extremes() {
    let h = Hypergraph::complete(3, 7).unwrap();
    assert_eq!(sparsify(&h, 0.0, RngSpec::new(1)).unwrap().edge_count(), 0);
    assert_eq!(sparsify(&h, 1.0, RngSpec::new(1)).unwrap(), h);
    assert!(sparsify(&h, 1.5, RngSpec::new(1)).is_err());
}

#[test]
fn color_streams_are_uncorrelated() {
    // indicator of one fixed edge being kept in colors 0 and 1
    let sys = HypergraphSystem::complete(2, 2, 2, 2).unwrap();
    let trials = 10_000;
    let (mut x, mut y, mut xy) = (0.0, 0.0, 0.0);
    for trial in 0..trials {
        let thin = sparsify_system(&sys, 0.5, RngSpec::new(trial))
            .unwrap()
            .system;
        let a = thin.color(0).contains(&[0, 1]) as u8 as f64;
        let b = thin.color(1).contains(&[0, 1]) as u8 as f64;
        x += a;
        y += b;
        xy += a * b;
    }
    let nf = trials as f64;
    let cov = xy / nf - (x / nf) * (y / nf);
    // covariance of two fair coins has standard error 1/(4 sqrt(N))
    assert!(cov.abs() <= 3.0 * 0.25 / nf.sqrt(), "cov {}", cov);
}
