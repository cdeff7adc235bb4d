use std::collections::HashMap;

use proptest::prelude::*;
use tfactor::hypercore::{ColoredExpansionGraph, Hypergraph, HypergraphSystem};
use tfactor::patterns::{ExpandedPattern, FactorComplex, Pattern};
use tfactor::randmodels::{random_k_graph, RngSpec};
use tfactor::solver::{
    count_transversal_factors, find_factor_in_expansion, find_transversal_factor,
    search_transversal_factor, Embedding, SearchOptions, SearchStrategy, UniformFactorSampler,
};

fn random_system(k: usize, s: usize, t: usize, n: usize, p: f64, seed: u64) -> HypergraphSystem {
    let colors = (0..t * n)
        .map(|c| random_k_graph(s * n, k, p, RngSpec::new(seed).child(c as u64)).unwrap())
        .collect();
    HypergraphSystem::new(k, s, t, n, colors).unwrap()
}

/// Checks an embedding from first principles: bijective maps, and every
/// pattern edge of every copy present in its assigned color.
fn independent_check(sys: &HypergraphSystem, f: &Pattern, emb: &Embedding) -> bool {
    let (s, t, n) = (f.s(), f.t(), sys.n());
    let mut vs = emb.vertex_map.clone();
    let mut cs = emb.color_map.clone();
    vs.sort_unstable();
    cs.sort_unstable();
    if vs != (0..s * n).collect::<Vec<_>>() || cs != (0..t * n).collect::<Vec<_>>() {
        return false;
    }
    let edges = f.edge_list();
    (0..n).all(|i| {
        edges.iter().enumerate().all(|(j, e)| {
            let mut img: Vec<usize> = e.iter().map(|&x| emb.vertex_map[i * s + x]).collect();
            img.sort_unstable();
            sys.color(emb.color_map[i * t + j]).contains(&img)
        })
    })
}

/// Number of labelled embeddings, by exhaustive assignment of copies in order.
fn labeled_oracle(sys: &HypergraphSystem, f: &Pattern) -> u128 {
    struct St<'a> {
        sys: &'a HypergraphSystem,
        edges: Vec<Vec<usize>>,
        s: usize,
        vmap: Vec<usize>,
        cmap: Vec<usize>,
        vused: Vec<bool>,
        cused: Vec<bool>,
    }
    fn rec(st: &mut St) -> u128 {
        let t = st.edges.len();
        let placed = st.vmap.len() / st.s;
        if st.vmap.len().is_multiple_of(st.s) && st.cmap.len() < placed * t {
            // color the next edge of the last completed copy
            let j = st.cmap.len() - (placed - 1) * t;
            let base = (placed - 1) * st.s;
            let mut img: Vec<usize> = st.edges[j].iter().map(|&x| st.vmap[base + x]).collect();
            img.sort_unstable();
            let mut total = 0;
            for c in 0..st.cused.len() {
                if !st.cused[c] && st.sys.color(c).contains(&img) {
                    st.cused[c] = true;
                    st.cmap.push(c);
                    total += rec(st);
                    st.cmap.pop();
                    st.cused[c] = false;
                }
            }
            return total;
        }
        if st.vmap.len() == st.vused.len() {
            return 1;
        }
        let mut total = 0;
        for v in 0..st.vused.len() {
            if !st.vused[v] {
                st.vused[v] = true;
                st.vmap.push(v);
                total += rec(st);
                st.vmap.pop();
                st.vused[v] = false;
            }
        }
        total
    }
    let mut st = St {
        sys,
        edges: f.edge_list(),
        s: f.s(),
        vmap: Vec::new(),
        cmap: Vec::new(),
        vused: vec![false; sys.vertex_count()],
        cused: vec![false; sys.color_count()],
    };
    rec(&mut st)
}

/// Number of exact covers of the expansion graph by copies of the expanded pattern.
fn expansion_cover_oracle(sys: &HypergraphSystem, f: &Pattern) -> u128 {
    let x = ColoredExpansionGraph::from_system(sys);
    let host = x.as_hypergraph().unwrap();
    let star = ExpandedPattern::new(f).unwrap();
    let cx = FactorComplex::build(&host, &star.graph).unwrap();
    let masks: Vec<u64> = cx
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

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[test]
fn two_edges_two_colors_count() {
    let k4 = Hypergraph::complete(2, 4).unwrap();
    let sys = HypergraphSystem::new(2, 2, 1, 2, vec![k4.clone(), k4]).unwrap();
    let f = Pattern::named("K2").unwrap();
    let c = count_transversal_factors(&sys, &f).unwrap();
    assert_eq!(c.unordered, 6);
    assert_eq!(c.labeled, 6 * 2 * 2 * 2);
    assert_eq!(expansion_cover_oracle(&sys, &f), 6);
    assert_eq!(labeled_oracle(&sys, &f), c.labeled);
}

#[test]
fn counts_match_both_oracles_on_tiny_instances() {
    let shapes: [(&str, usize, f64); 5] = [
        ("K2", 3, 0.6),
        ("K2", 4, 0.7),
        ("K3", 2, 0.7),
        ("P3", 2, 0.6),
        ("E3", 2, 0.5),
    ];
    for (i, &(name, n, p)) in shapes.iter().enumerate() {
        let f = Pattern::named(name).unwrap();
        for trial in 0..10u64 {
            let sys = random_system(f.k(), f.s(), f.t(), n, p, 1000 * i as u64 + trial);
            let c = count_transversal_factors(&sys, &f).unwrap();
            let aut = f.automorphism_count() as u128;
            assert_eq!(
                c.unordered,
                expansion_cover_oracle(&sys, &f),
                "{} n={} trial {}",
                name,
                n,
                trial
            );
            if !(name == "K2" && n == 4) {
                assert_eq!(c.labeled, labeled_oracle(&sys, &f));
            }
            assert_eq!(c.labeled, c.unordered * factorial(n) * aut.pow(n as u32));
            assert_eq!(
                find_transversal_factor(&sys, &f).unwrap().is_some(),
                c.unordered > 0
            );
        }
    }
}

#[test]
fn uniform_sampler_hits_every_embedding_evenly() {
    let k4 = Hypergraph::complete(2, 4).unwrap();
    let sys = HypergraphSystem::new(2, 2, 1, 2, vec![k4.clone(), k4]).unwrap();
    let f = Pattern::named("K2").unwrap();
    let sampler = UniformFactorSampler::new(&sys, &f).unwrap();
    let labeled = 48usize;
    let draws = labeled * 1000;
    let mut rng = RngSpec::new(5).rng();
    let mut hits: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
    for _ in 0..draws {
        let e = sampler.sample(&mut rng).unwrap();
        assert!(independent_check(&sys, &f, &e));
        *hits.entry((e.vertex_map, e.color_map)).or_default() += 1;
    }
    assert_eq!(hits.len(), labeled);
    let p = 1.0 / labeled as f64;
    let sigma = (p * (1.0 - p) * draws as f64).sqrt();
    for (k, &h) in &hits {
        assert!((h as f64 - 1000.0).abs() <= 4.0 * sigma, "{:?}: {}", k, h);
    }
}

fn strategies() -> [SearchStrategy; 2] {
    [SearchStrategy::Matching, SearchStrategy::Cover]
}

#[test]
fn solver_agrees_with_expansion_search() {
    let shapes: [(&str, usize); 5] = [("K2", 4), ("K3", 2), ("K3", 3), ("P3", 3), ("E3", 2)];
    let mut found = 0;
    for i in 0..200u64 {
        let (name, n) = shapes[i as usize % shapes.len()];
        let f = Pattern::named(name).unwrap();
        let p = 0.1 + 0.4 * RngSpec::new(i).edge_value(&[0]);
        let sys = random_system(f.k(), f.s(), f.t(), n, p, 77 + i);
        let x = ColoredExpansionGraph::from_system(&sys);
        let star = ExpandedPattern::new(&f).unwrap();
        let expected = find_factor_in_expansion(&x, &star).unwrap();
        if let Some(e) = &expected {
            assert!(independent_check(&sys, &f, e));
            found += 1;
        }
        for strategy in strategies() {
            let opts = SearchOptions {
                strategy,
                ..Default::default()
            };
            let out = search_transversal_factor(&sys, &f, &opts).unwrap();
            assert!(out.complete);
            assert_eq!(
                out.embedding.is_some(),
                expected.is_some(),
                "instance {} {:?}",
                i,
                strategy
            );
            if let Some(e) = &out.embedding {
                assert!(independent_check(&sys, &f, e));
            }
        }
    }
    assert!(found > 20 && found < 180, "{} satisfiable", found);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn adding_edges_keeps_factors(seed in any::<u64>(), extra in 1usize..6) {
        let f = Pattern::named("K3").unwrap();
        let mut sys = random_system(2, 3, 3, 3, 0.75, seed);
        let before = find_transversal_factor(&sys, &f).unwrap();
        let mut rng = RngSpec::new(seed).child(99).rng();
        let mut colors = sys.colors().to_vec();
        for _ in 0..extra {
            let c = rand::Rng::random_range(&mut rng, 0..colors.len());
            let a = rand::Rng::random_range(&mut rng, 0..9);
            let b = (a + rand::Rng::random_range(&mut rng, 1..9)) % 9;
            colors[c].insert(&[a.min(b), a.max(b)]).unwrap();
        }
        sys = HypergraphSystem::new(2, 3, 3, 3, colors).unwrap();
        for strategy in strategies() {
            let after = search_transversal_factor(&sys, &f, &SearchOptions { strategy, ..Default::default() }).unwrap();
            prop_assert!(before.is_none() || after.embedding.is_some());
            if let Some(e) = &after.embedding {
                prop_assert!(independent_check(&sys, &f, e));
            }
        }
    }

    #[test]
    fn shuffled_search_finds_valid_factors(seed in any::<u64>()) {
        let f = Pattern::named("K3").unwrap();
        let sys = random_system(2, 3, 3, 3, 0.85, seed);
        let plain = find_transversal_factor(&sys, &f).unwrap();
        let opts = SearchOptions { shuffle: Some(RngSpec::new(seed)), ..Default::default() };
        let out = search_transversal_factor(&sys, &f, &opts).unwrap();
        prop_assert_eq!(plain.is_some(), out.embedding.is_some());
        if let Some(e) = &out.embedding {
            prop_assert!(independent_check(&sys, &f, e));
        }
    }
}
