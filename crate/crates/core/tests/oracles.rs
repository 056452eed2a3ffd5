//! Frozen values from independent implementations (networkx, scipy, numpy)
//! and small hand-checked examples.

use cfml_core::graph::{
    build_bipartite, components, graph_level, modularity, node_scores_raw, pairwise_row_summaries,
    BipartiteGraph, NodeFunction, NodePartition, NodeSet, PairFunction, PairwiseConfig, RowSummary,
};
use cfml_core::metafeatures::{post_function, PostFunction};
use cfml_core::metalearn::kendall_tau;
use cfml_core::synth::toy_dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_close(got: &[f64], want: &[f64], tol: f64, what: &str) {
    assert_eq!(got.len(), want.len(), "{what}: length");
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        assert!((g - w).abs() <= tol, "{what}[{i}]: got {g}, want {w}");
    }
}

/// Five users, six items, fourteen weighted edges, connected.
fn oracle_graph() -> BipartiteGraph {
    let edges = [
        (0, 0, 5.0),
        (0, 1, 3.0),
        (0, 2, 4.0),
        (1, 0, 4.0),
        (1, 2, 2.0),
        (2, 1, 3.0),
        (2, 2, 5.0),
        (2, 3, 1.0),
        (3, 3, 4.0),
        (3, 4, 5.0),
        (4, 4, 2.0),
        (4, 5, 3.0),
        (1, 5, 1.0),
        (3, 0, 2.0),
    ];
    BipartiteGraph::from_edges(5, 6, &edges)
}

#[test]
fn toy_graph_structure() {
    let g = build_bipartite(&toy_dataset());
    let gl = graph_level(&g);
    assert_eq!((gl.order, gl.size, gl.girth), (6, 7, 4));
    assert_eq!(components(&g).len(), 1);
    let deg = node_scores_raw(&g, NodeFunction::Degree);
    assert_eq!(&deg[..3], &[3.0, 2.0, 2.0]);
    let strength = node_scores_raw(&g, NodeFunction::Strength);
    assert_eq!(strength[0], 12.0);
    let sim = pairwise_row_summaries(
        &g,
        NodeSet::U,
        PairFunction::Similarity,
        RowSummary::Sum,
        &PairwiseConfig::default(),
    )
    .unwrap();
    // u1 vs u2 = 2/3, u1 vs u3 = 2/3.
    assert!((sim[0] - 4.0 / 3.0).abs() < 1e-12);
}

#[test]
fn pagerank_matches_networkx() {
    let want = [
        0.120891525474,
        0.0793481876962,
        0.0958260956813,
        0.12654129577,
        0.0737073916932,
        0.114549042625,
        0.0664765399093,
        0.112410448525,
        0.0617993701532,
        0.0875878319958,
        0.0608622704773,
    ];
    assert_close(
        &node_scores_raw(&oracle_graph(), NodeFunction::PageRank),
        &want,
        1e-9,
        "pagerank",
    );
}

#[test]
fn eigenvector_matches_networkx() {
    let want = [
        1.0,
        0.560049620458,
        0.669053345499,
        0.405745189136,
        0.0753545592229,
        0.852800188032,
        0.530336814403,
        0.896615084742,
        0.242762375343,
        0.230836370454,
        0.0832617330482,
    ];
    assert_close(
        &node_scores_raw(&oracle_graph(), NodeFunction::Eigenvector),
        &want,
        1e-8,
        "eigenvector",
    );
}

#[test]
fn alpha_matches_direct_solve() {
    // numpy.linalg.solve(I - 0.85 / lambda_max * A, 1)
    let want = [
        8.81108837095,
        5.47835682861,
        6.28378231677,
        5.42554668362,
        2.26136765289,
        7.91597349187,
        5.07689832536,
        7.98799761906,
        3.51953025896,
        3.84943907121,
        2.10396886478,
    ];
    assert_close(
        &node_scores_raw(&oracle_graph(), NodeFunction::Alpha),
        &want,
        1e-7,
        "alpha",
    );
}

#[test]
fn distance_functions_match_networkx() {
    let g = oracle_graph();
    let closeness = [
        0.454545454545,
        0.5,
        0.454545454545,
        0.5,
        0.357142857143,
        0.526315789474,
        0.37037037037,
        0.47619047619,
        0.434782608696,
        0.4,
        0.4,
    ];
    assert_close(
        &node_scores_raw(&g, NodeFunction::Closeness),
        &closeness,
        1e-11,
        "closeness",
    );
    let ecc = [4.0, 3.0, 4.0, 3.0, 5.0, 3.0, 5.0, 4.0, 4.0, 4.0, 4.0];
    assert_close(
        &node_scores_raw(&g, NodeFunction::Eccentricity),
        &ecc,
        0.0,
        "eccentricity",
    );
    let knn = [
        8.0 / 3.0,
        8.0 / 3.0,
        7.0 / 3.0,
        7.0 / 3.0,
        2.0,
        3.0,
        3.0,
        3.0,
        3.0,
        2.5,
        2.5,
    ];
    assert_close(&node_scores_raw(&g, NodeFunction::Knn), &knn, 1e-12, "knn");
    assert_close(
        &node_scores_raw(&g, NodeFunction::Coreness),
        &[2.0; 11],
        0.0,
        "coreness",
    );
    assert_eq!(graph_level(&g).girth, 4);
}

#[test]
fn weighted_modularity_matches_networkx() {
    let mut labels = vec![1usize; 11];
    for v in [0, 1, 2, 5, 6, 7] {
        labels[v] = 0;
    }
    let q = modularity(&oracle_graph(), &NodePartition::from_labels(&labels));
    assert!((q - 0.37190082644628103).abs() < 1e-12, "{q}");
}

#[test]
fn post_functions_match_scipy() {
    let x = [3.0, 1.5, 4.0, 1.5, 9.0, 2.6, 5.0, 3.5, 8.9, 7.9, 3.0, 2.0];
    let cases = [
        (PostFunction::Variance, 7.69659090909091),
        (PostFunction::Sd, 2.7742730415535726),
        (PostFunction::Median, 3.25),
        (PostFunction::Skewness, 0.7821641685593814),
        (PostFunction::Kurtosis, -0.9049357994672702),
        (PostFunction::Entropy, 1.286057336874379),
        (PostFunction::Gini, 0.33060372511239555),
        (PostFunction::Mode, 1.5),
    ];
    for (pf, want) in cases {
        let got = post_function(&x, pf);
        assert!(
            (got - want).abs() < 1e-12,
            "{}: got {got}, want {want}",
            pf.as_str()
        );
    }
}

#[test]
fn tau_b_matches_scipy_with_ties() {
    let a = [1.0, 2.0, 2.0, 3.0, 3.0, 3.0, 4.0, 5.0, 5.0, 6.0, 1.0, 2.0];
    let b = [2.0, 1.0, 2.0, 3.0, 4.0, 3.0, 5.0, 5.0, 4.0, 6.0, 2.0, 2.0];
    let t = kendall_tau(&a, &b).unwrap();
    assert!((t.value - 0.8000302474620596).abs() < 1e-12, "{}", t.value);
}

/// Quadratic tau-b straight from the pair counts.
fn tau_b_naive(a: &[f64], b: &[f64]) -> f64 {
    let (mut s, mut ta, mut tb, mut pairs) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            pairs += 1;
            let da = (a[i] - a[j]).signum() as i64 * (a[i] != a[j]) as i64;
            let db = (b[i] - b[j]).signum() as i64 * (b[i] != b[j]) as i64;
            s += da * db;
            ta += (da == 0) as i64;
            tb += (db == 0) as i64;
        }
    }
    let denom = (((pairs - ta) * (pairs - tb)) as f64).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        s as f64 / denom
    }
}

#[test]
fn tau_b_matches_quadratic_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..500 {
        let n = rng.random_range(2..60);
        let levels = rng.random_range(1..8);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let got = kendall_tau(&a, &b).unwrap().value;
        let want = tau_b_naive(&a, &b);
        assert!((got - want).abs() < 1e-12, "case {case}: {got} vs {want}");
    }
}
