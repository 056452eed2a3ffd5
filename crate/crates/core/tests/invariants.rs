//! Property tests for metatargets, post-functions and graph extraction.

use cfml_core::baselevel::{MeasureSpec, Orientation, PerformanceTable};
use cfml_core::graph::{communities, modularity, BipartiteGraph, NodePartition};
use cfml_core::metafeatures::{extract_graph, post_function, GraphExtractionConfig, PostFunction};
use cfml_core::metatarget::{dominates, frontiers_of, multicriteria_ranking};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Iterated skyline peeling: remove the non-dominated set, repeat.
fn peel(points: &[Vec<f64>]) -> Vec<usize> {
    let mut frontier = vec![0usize; points.len()];
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut layer = 1;
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&p| !left.iter().any(|&q| dominates(&points[q], &points[p])))
            .collect();
        for &p in &front {
            frontier[p] = layer;
        }
        left.retain(|p| !front.contains(p));
        layer += 1;
    }
    frontier
}

#[test]
fn layered_skyline_equals_peeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..1000 {
        let n = rng.random_range(1..25);
        let d = rng.random_range(1..5);
        // Few levels so ties and duplicates are common.
        let levels = rng.random_range(2..7);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(0..levels) as f64).collect())
            .collect();
        assert_eq!(
            frontiers_of(&points),
            peel(&points),
            "case {case}: {points:?}"
        );
    }
}

fn spec(name: &str, orientation: Orientation) -> MeasureSpec {
    MeasureSpec {
        name: name.into(),
        orientation,
    }
}

#[test]
fn multicriteria_is_invariant_to_monotone_transforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let algs: Vec<String> = (0..6).map(|a| format!("A{a}")).collect();
    let measures = vec![
        spec("AUC", Orientation::HigherBetter),
        spec("NDCG", Orientation::HigherBetter),
        spec("RMSE", Orientation::LowerBetter),
    ];
    let names: Vec<String> = measures.iter().map(|m| m.name.clone()).collect();
    for case in 0..200 {
        let values: Vec<f64> = (0..algs.len() * measures.len())
            .map(|_| rng.random_range(0..5) as f64 / 5.0)
            .collect();
        let transformed: Vec<f64> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| match i % 3 {
                0 => v.exp(),
                1 => v * v * v + 2.0 * v - 4.0,
                _ => (1.0 + v).ln(),
            })
            .collect();
        let table = |vals: Vec<f64>| {
            PerformanceTable::new(vec!["d".into()], algs.clone(), measures.clone(), vals).unwrap()
        };
        let a = multicriteria_ranking(&table(values), "d", &names).unwrap();
        let b = multicriteria_ranking(&table(transformed), "d", &names).unwrap();
        assert_eq!(a, b, "case {case}");
    }
}

fn random_graph(rng: &mut ChaCha8Rng, max_users: usize, max_items: usize) -> BipartiteGraph {
    let nu = rng.random_range(1..=max_users);
    let ni = rng.random_range(1..=max_items);
    let density = rng.random_range(0.05..0.9);
    let mut edges = Vec::new();
    for u in 0..nu {
        for i in 0..ni {
            if rng.random_bool(density) {
                edges.push((u, i, rng.random_range(1..=5) as f64));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 0, 3.0));
    }
    BipartiteGraph::from_edges(nu, ni, &edges)
}

#[test]
fn graph_features_are_finite_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = GraphExtractionConfig::default();
    for case in 0..100 {
        let g = random_graph(&mut rng, 12, 12);
        let v = extract_graph(&g, &cfg).unwrap();
        assert_eq!(v.len(), 761);
        if let Some(j) = v.values.iter().position(|x| !x.is_finite()) {
            panic!("case {case}: {} = {}", v.names[j], v.values[j]);
        }
    }
}

/// Best modularity over every partition of a small node set.
fn best_modularity(g: &BipartiteGraph) -> f64 {
    fn rec(g: &BipartiteGraph, labels: &mut Vec<usize>, next: usize, best: &mut f64) {
        if labels.len() == g.order() {
            *best = best.max(modularity(g, &NodePartition::from_labels(labels)));
            return;
        }
        for l in 0..=next {
            labels.push(l);
            rec(g, labels, next.max(l + 1), best);
            labels.pop();
        }
    }
    let mut best = f64::NEG_INFINITY;
    rec(g, &mut Vec::new(), 0, &mut best);
    best
}

#[test]
fn louvain_is_near_optimal_on_small_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut exact = 0;
    for case in 0..60 {
        let g = random_graph(&mut rng, 4, 4);
        let best = best_modularity(&g);
        let got = modularity(&g, &communities(&g, case));
        assert!(got <= best + 1e-12);
        assert!(got >= best - 0.1, "case {case}: {got} vs optimum {best}");
        if got >= best - 1e-9 {
            exact += 1;
        }
    }
    assert!(exact >= 45, "optimum reached on {exact}/60 graphs");
}

#[test]
fn louvain_recovers_planted_blocks() {
    // Two complete 4x4 blocks joined by one light edge.
    let mut edges = Vec::new();
    for b in 0..2 {
        for u in 0..4 {
            for i in 0..4 {
                edges.push((4 * b + u, 4 * b + i, 5.0));
            }
        }
    }
    edges.push((0, 4, 1.0));
    let g = BipartiteGraph::from_edges(8, 8, &edges);
    for seed in 0..10 {
        let p = communities(&g, seed);
        assert_eq!(p.len(), 2, "seed {seed}");
        for v in 0..16 {
            let block = if v < 8 { v / 4 } else { (v - 8) / 4 };
            assert_eq!(
                p.assignment[v],
                p.assignment[if block == 0 { 0 } else { 4 }]
            );
        }
    }
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 1..60)
}

proptest! {
    #[test]
    fn order_statistics_are_bounded(v in values()) {
        let min = post_function(&v, PostFunction::Min);
        let max = post_function(&v, PostFunction::Max);
        for pf in [PostFunction::Mean, PostFunction::Median, PostFunction::Mode] {
            let x = post_function(&v, pf);
            prop_assert!(x >= min - 1e-9 && x <= max + 1e-9, "{} = {x}", pf.as_str());
        }
    }

    #[test]
    fn spread_measures_are_nonnegative(v in values()) {
        prop_assert!(post_function(&v, PostFunction::Variance) >= 0.0);
        let g = post_function(&v, PostFunction::Gini);
        prop_assert!((0.0..=1.0).contains(&g), "gini {g}");
        let h = post_function(&v, PostFunction::Entropy);
        let bins = ((v.len() as f64).log2() + 1.0).ceil();
        prop_assert!(h >= 0.0 && h <= bins.ln() + 1e-12, "entropy {h}");
        prop_assert!(post_function(&v, PostFunction::Kurtosis) >= -2.0 - 1e-9);
    }

    #[test]
    fn constant_input_has_no_spread(c in -1e3f64..1e3, n in 1usize..40) {
        let v = vec![c; n];
        for pf in [PostFunction::Variance, PostFunction::Sd, PostFunction::Skewness,
                   PostFunction::Kurtosis, PostFunction::Entropy, PostFunction::Gini] {
            prop_assert_eq!(post_function(&v, pf), 0.0, "{}", pf.as_str());
        }
    }

    #[test]
    fn location_and_scale_equivariance(v in values(), a in 0.1f64..10.0, b in -100f64..100.0) {
        let w: Vec<f64> = v.iter().map(|x| a * x + b).collect();
        let tol = 1e-6 * (1.0 + b.abs() + a * 1e3);
        prop_assert!((post_function(&w, PostFunction::Mean) - (a * post_function(&v, PostFunction::Mean) + b)).abs() < tol);
        prop_assert!((post_function(&w, PostFunction::Sd) - a * post_function(&v, PostFunction::Sd)).abs() < tol);
        if post_function(&v, PostFunction::Sd) > 1e-3 {
            prop_assert!((post_function(&w, PostFunction::Skewness) - post_function(&v, PostFunction::Skewness)).abs() < 1e-6);
            prop_assert!((post_function(&w, PostFunction::Kurtosis) - post_function(&v, PostFunction::Kurtosis)).abs() < 1e-6);
        }
    }

    #[test]
    fn post_functions_ignore_order(mut v in values(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let before: Vec<f64> = [PostFunction::Median, PostFunction::Mode, PostFunction::Entropy, PostFunction::Gini]
            .iter().map(|pf| post_function(&v, *pf)).collect();
        v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let after: Vec<f64> = [PostFunction::Median, PostFunction::Mode, PostFunction::Entropy, PostFunction::Gini]
            .iter().map(|pf| post_function(&v, *pf)).collect();
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}
