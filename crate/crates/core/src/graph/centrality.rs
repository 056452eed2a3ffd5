//! Node-level functions.
//!
//! Every function is computed for all nodes of a graph. Undefined values (the
//! closeness of an isolated node, the diversity of a node with fewer than two
//! edges, ...) are reported as `NaN` by [`node_scores_raw`] so that aggregation
//! can skip them; [`node_scores`] maps them to `0`.
//!
//! Spectral and random-walk functions need positive edge weights. When a graph
//! carries non-positive weights (e.g. a `[-10, 10]` rating scale) those
//! functions use weights shifted so that the smallest becomes `1`.

use std::collections::HashMap;
use std::str::FromStr;

use rayon::prelude::*;

use super::{BipartiteGraph, NodeSet};
use crate::{Error, Result};

const TOL: f64 = 1e-10;
const PAGERANK_MAX_ITER: usize = 200;
const POWER_MAX_ITER: usize = 1000;
const DAMPING: f64 = 0.85;
const ALPHA_FACTOR: f64 = 0.85;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeFunction {
    Alpha,
    Authority,
    Closeness,
    Constraint,
    Coreness,
    Degree,
    Diversity,
    Eccentricity,
    Eigenvector,
    Hub,
    Knn,
    Neighbours,
    Scan,
    PageRank,
    Strength,
}

impl NodeFunction {
    pub const ALL: [NodeFunction; 15] = [
        NodeFunction::Alpha,
        NodeFunction::Authority,
        NodeFunction::Closeness,
        NodeFunction::Constraint,
        NodeFunction::Coreness,
        NodeFunction::Degree,
        NodeFunction::Diversity,
        NodeFunction::Eccentricity,
        NodeFunction::Eigenvector,
        NodeFunction::Hub,
        NodeFunction::Knn,
        NodeFunction::Neighbours,
        NodeFunction::Scan,
        NodeFunction::PageRank,
        NodeFunction::Strength,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            NodeFunction::Alpha => "alpha",
            NodeFunction::Authority => "authority",
            NodeFunction::Closeness => "closeness",
            NodeFunction::Constraint => "constraint",
            NodeFunction::Coreness => "coreness",
            NodeFunction::Degree => "degree",
            NodeFunction::Diversity => "diversity",
            NodeFunction::Eccentricity => "eccentricity",
            NodeFunction::Eigenvector => "eigenvector",
            NodeFunction::Hub => "hub",
            NodeFunction::Knn => "knn",
            NodeFunction::Neighbours => "neighbours",
            NodeFunction::Scan => "scan",
            NodeFunction::PageRank => "pagerank",
            NodeFunction::Strength => "strength",
        }
    }
}

impl FromStr for NodeFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NodeFunction::ALL
            .iter()
            .copied()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown node function `{s}`")))
    }
}

/// Scores of `f` restricted to `set`, undefined values mapped to `0`.
pub fn node_scores(g: &BipartiteGraph, f: NodeFunction, set: NodeSet) -> Vec<f64> {
    let all = node_scores_raw(g, f);
    g.nodes(set)
        .into_iter()
        .map(|n| if all[n].is_finite() { all[n] } else { 0.0 })
        .collect()
}

/// Scores of `f` for every node, `NaN` where undefined.
pub fn node_scores_raw(g: &BipartiteGraph, f: NodeFunction) -> Vec<f64> {
    match f {
        NodeFunction::Alpha => alpha(g),
        NodeFunction::Authority | NodeFunction::Hub => hits(g),
        NodeFunction::Closeness => closeness(g),
        NodeFunction::Constraint => constraint(g),
        NodeFunction::Coreness => coreness(g).into_iter().map(|c| c as f64).collect(),
        NodeFunction::Degree | NodeFunction::Neighbours => {
            (0..g.order()).map(|v| g.degree(v) as f64).collect()
        }
        NodeFunction::Diversity => diversity(g),
        NodeFunction::Eccentricity => eccentricity(g),
        NodeFunction::Eigenvector => eigenvector(g).0,
        NodeFunction::Knn => knn(g),
        NodeFunction::Scan => (0..g.order())
            .map(|v| {
                let d = g.degree(v);
                if d == 0 {
                    f64::NAN
                } else {
                    g.neighbors(v).iter().map(|&(_, w)| w).sum::<f64>() / d as f64
                }
            })
            .collect(),
        NodeFunction::PageRank => pagerank(g),
        NodeFunction::Strength => (0..g.order())
            .map(|v| g.neighbors(v).iter().map(|&(_, w)| w).sum())
            .collect(),
    }
}

/// Adjacency lists with weights made strictly positive.
fn positive_adjacency(g: &BipartiteGraph) -> Vec<Vec<(usize, f64)>> {
    let min_w = g
        .edges()
        .iter()
        .map(|&(_, _, w)| w)
        .fold(f64::INFINITY, f64::min);
    let shift = if min_w <= 0.0 { 1.0 - min_w } else { 0.0 };
    (0..g.order())
        .map(|v| {
            g.neighbors(v)
                .iter()
                .map(|&(n, w)| (n, w + shift))
                .collect()
        })
        .collect()
}

fn mat_vec(adj: &[Vec<(usize, f64)>], x: &[f64]) -> Vec<f64> {
    adj.iter()
        .map(|row| row.iter().map(|&(n, w)| w * x[n]).sum())
        .collect()
}

fn normalize_max(x: &mut [f64]) -> f64 {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m > 0.0 {
        x.iter_mut().for_each(|v| *v /= m);
    }
    m
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Principal eigenvector of the weighted adjacency matrix scaled to max 1,
/// together with the spectral radius.
///
/// Iterates with `A + I`: bipartite spectra are symmetric, so plain power
/// iteration on `A` would oscillate between the `λ` and `-λ` eigenvectors.
fn eigenvector(g: &BipartiteGraph) -> (Vec<f64>, f64) {
    let n = g.order();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    let adj = positive_adjacency(g);
    let mut x = vec![1.0; n];
    for _ in 0..POWER_MAX_ITER {
        let mut next = mat_vec(&adj, &x);
        next.iter_mut().zip(&x).for_each(|(y, xi)| *y += xi);
        normalize_max(&mut next);
        let done = max_abs_diff(&next, &x) < TOL;
        x = next;
        if done {
            break;
        }
    }
    let ax = mat_vec(&adj, &x);
    let num: f64 = ax.iter().zip(&x).map(|(a, b)| a * b).sum();
    let den: f64 = x.iter().map(|v| v * v).sum();
    let lambda = if den > 0.0 { num / den } else { 0.0 };
    (x, lambda)
}

/// Kleinberg hub/authority scores. On an undirected graph both are the
/// principal eigenvector of `A·A`, scaled to max 1.
fn hits(g: &BipartiteGraph) -> Vec<f64> {
    let n = g.order();
    if g.size() == 0 {
        return vec![1.0; n];
    }
    let adj = positive_adjacency(g);
    let mut x = vec![1.0; n];
    for _ in 0..POWER_MAX_ITER {
        let mut next = mat_vec(&adj, &mat_vec(&adj, &x));
        normalize_max(&mut next);
        let done = max_abs_diff(&next, &x) < TOL;
        x = next;
        if done {
            break;
        }
    }
    x
}

/// Bonacich alpha centrality `x = (I - αAᵀ)⁻¹·1` with `α = 0.85 / λ_max`,
/// solved by Neumann iteration.
fn alpha(g: &BipartiteGraph) -> Vec<f64> {
    let n = g.order();
    let (_, lambda) = eigenvector(g);
    if lambda <= 0.0 {
        return vec![1.0; n];
    }
    let a = ALPHA_FACTOR / lambda;
    let adj = positive_adjacency(g);
    let mut x = vec![1.0; n];
    for _ in 0..POWER_MAX_ITER {
        let ax = mat_vec(&adj, &x);
        let next: Vec<f64> = ax.iter().map(|v| 1.0 + a * v).collect();
        let scale = next.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let done = max_abs_diff(&next, &x) < TOL * scale;
        x = next;
        if done {
            break;
        }
    }
    x
}

/// Weighted PageRank with uniform teleport and dangling-mass redistribution.
fn pagerank(g: &BipartiteGraph) -> Vec<f64> {
    let n = g.order();
    if n == 0 {
        return Vec::new();
    }
    let adj = positive_adjacency(g);
    let strength: Vec<f64> = adj
        .iter()
        .map(|r| r.iter().map(|&(_, w)| w).sum())
        .collect();
    let nf = n as f64;
    let mut p = vec![1.0 / nf; n];
    for _ in 0..PAGERANK_MAX_ITER {
        let dangling: f64 = (0..n).filter(|&v| strength[v] <= 0.0).map(|v| p[v]).sum();
        let base = (1.0 - DAMPING) / nf + DAMPING * dangling / nf;
        let mut next = vec![base; n];
        for (v, row) in adj.iter().enumerate() {
            if strength[v] <= 0.0 {
                continue;
            }
            let share = DAMPING * p[v] / strength[v];
            for &(nb, w) in row {
                next[nb] += share * w;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        let delta: f64 = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        p = next;
        if delta < TOL {
            break;
        }
    }
    p
}

fn closeness(g: &BipartiteGraph) -> Vec<f64> {
    (0..g.order())
        .into_par_iter()
        .map(|v| {
            let (reached, total) = g
                .bfs(v)
                .into_iter()
                .enumerate()
                .filter_map(|(n, d)| if n == v { None } else { d })
                .fold((0usize, 0usize), |(r, s), d| (r + 1, s + d));
            if reached == 0 {
                f64::NAN
            } else {
                reached as f64 / total as f64
            }
        })
        .collect()
}

fn eccentricity(g: &BipartiteGraph) -> Vec<f64> {
    (0..g.order())
        .into_par_iter()
        .map(|v| g.bfs(v).into_iter().flatten().max().unwrap_or(0) as f64)
        .collect()
}

/// Batagelj–Zaversnik bucket algorithm for the k-core decomposition.
pub(crate) fn coreness(g: &BipartiteGraph) -> Vec<usize> {
    let n = g.order();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    if max_deg > 0 || n > 0 {
        bin[0] = 0;
    }
    for i in 0..n {
        let v = vert[i];
        for &(u, _) in g.neighbors(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

fn knn(g: &BipartiteGraph) -> Vec<f64> {
    (0..g.order())
        .map(|v| {
            let d = g.degree(v);
            if d == 0 {
                f64::NAN
            } else {
                g.neighbors(v)
                    .iter()
                    .map(|&(n, _)| g.degree(n) as f64)
                    .sum::<f64>()
                    / d as f64
            }
        })
        .collect()
}

/// Shannon entropy of incident weight shares divided by `ln(degree)`.
fn diversity(g: &BipartiteGraph) -> Vec<f64> {
    let adj = positive_adjacency(g);
    adj.iter()
        .map(|row| {
            if row.len() < 2 {
                return f64::NAN;
            }
            let s: f64 = row.iter().map(|&(_, w)| w).sum();
            let h: f64 = row
                .iter()
                .map(|&(_, w)| {
                    let p = w / s;
                    if p > 0.0 {
                        -p * p.ln()
                    } else {
                        0.0
                    }
                })
                .sum();
            h / (row.len() as f64).ln()
        })
        .collect()
}

/// Burt's constraint with weight-proportional tie shares
/// `p_ij = w_ij / Σ_k w_ik`, summed over direct and two-step contacts.
fn constraint(g: &BipartiteGraph) -> Vec<f64> {
    let adj = positive_adjacency(g);
    let strength: Vec<f64> = adj
        .iter()
        .map(|r| r.iter().map(|&(_, w)| w).sum())
        .collect();
    (0..g.order())
        .map(|i| {
            if adj[i].is_empty() {
                return f64::NAN;
            }
            let mut contrib: HashMap<usize, f64> = HashMap::new();
            for &(j, w) in &adj[i] {
                *contrib.entry(j).or_default() += w / strength[i];
            }
            for &(q, wiq) in &adj[i] {
                let piq = wiq / strength[i];
                for &(j, wqj) in &adj[q] {
                    if j != i {
                        *contrib.entry(j).or_default() += piq * wqj / strength[q];
                    }
                }
            }
            let mut keys: Vec<_> = contrib.into_iter().collect();
            keys.sort_unstable_by_key(|&(k, _)| k);
            keys.into_iter().map(|(_, c)| c * c).sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{star, toy};
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn degree_and_strength_on_toy() {
        let g = toy();
        assert_eq!(
            node_scores(&g, NodeFunction::Degree, NodeSet::U),
            vec![3.0, 2.0, 2.0]
        );
        assert_eq!(node_scores(&g, NodeFunction::Strength, NodeSet::U)[0], 12.0);
        assert_eq!(
            node_scores(&g, NodeFunction::Neighbours, NodeSet::I),
            vec![2.0, 2.0, 3.0]
        );
        assert!(close(
            node_scores(&g, NodeFunction::Scan, NodeSet::U)[0],
            4.0
        ));
    }

    #[test]
    fn pagerank_sums_to_one() {
        for g in [
            toy(),
            star(4),
            BipartiteGraph::from_edges(2, 2, &[(0, 0, 1.0)]),
        ] {
            let p = node_scores_raw(&g, NodeFunction::PageRank);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenvector_max_is_one() {
        let e = node_scores_raw(&toy(), NodeFunction::Eigenvector);
        let m = e.iter().cloned().fold(f64::MIN, f64::max);
        assert!(close(m, 1.0));
        // u1 and i3 are the degree-3 nodes and dominate.
        assert!(e[0] > e[1] && e[5] > e[3]);
    }

    #[test]
    fn star_spectral_values() {
        // K_{1,3}: λ_max = √3, eigenvector (√3, 1, 1, 1) up to scale.
        let g = star(3);
        let (e, lambda) = eigenvector(&g);
        assert!((lambda - 3f64.sqrt()).abs() < 1e-8);
        assert!(close(e[0], 1.0) && (e[1] - 1.0 / 3f64.sqrt()).abs() < 1e-8);
        // Alpha: x = 1 + αAx, α = 0.85/√3. Solve 2x2 system by hand:
        // c = 1 + 3αl, l = 1 + αc → c = (1 + 3α) / (1 - 3α²).
        let a = 0.85 / 3f64.sqrt();
        let c = (1.0 + 3.0 * a) / (1.0 - 3.0 * a * a);
        let x = alpha(&g);
        assert!((x[0] - c).abs() < 1e-6, "{} vs {}", x[0], c);
        assert!((x[1] - (1.0 + a * c)).abs() < 1e-6);
    }

    #[test]
    fn closeness_and_eccentricity() {
        let g = toy();
        let ecc = node_scores_raw(&g, NodeFunction::Eccentricity);
        // u1 reaches every item in 1 and every user in 2.
        assert_eq!(ecc[0], 2.0);
        let clo = node_scores_raw(&g, NodeFunction::Closeness);
        assert!(close(clo[0], 5.0 / 7.0));
        let iso = BipartiteGraph::from_edges(2, 1, &[(0, 0, 1.0)]);
        assert!(node_scores_raw(&iso, NodeFunction::Closeness)[1].is_nan());
        assert_eq!(
            node_scores(&iso, NodeFunction::Closeness, NodeSet::G)[1],
            0.0
        );
        assert_eq!(
            node_scores(&iso, NodeFunction::Eccentricity, NodeSet::G)[1],
            0.0
        );
        assert_eq!(
            node_scores(&iso, NodeFunction::Diversity, NodeSet::G)[1],
            0.0
        );
    }

    #[test]
    fn diversity_of_equal_weights_is_one() {
        let d = node_scores_raw(&star(4), NodeFunction::Diversity);
        assert!(close(d[0], 1.0));
        assert!(d[1].is_nan());
    }

    #[test]
    fn constraint_of_star_centre() {
        // Four equal ties: Σ (1/4)² = 0.25, no two-step contacts.
        let c = node_scores_raw(&star(4), NodeFunction::Constraint);
        assert!(close(c[0], 0.25));
        // A leaf: direct share 1 plus nothing reachable at two steps but other
        // leaves: (1 · 1/4)² each for three leaves.
        assert!(close(c[1], 1.0 + 3.0 / 16.0));
    }

    #[test]
    fn coreness_on_toy_and_star() {
        assert_eq!(coreness(&toy()), vec![2, 2, 2, 2, 2, 2]);
        assert_eq!(coreness(&star(3)), vec![1, 1, 1, 1]);
        let iso = BipartiteGraph::from_edges(1, 1, &[]);
        assert_eq!(coreness(&iso), vec![0, 0]);
    }

    #[test]
    fn hub_equals_authority_and_scaled() {
        let g = toy();
        let h = node_scores_raw(&g, NodeFunction::Hub);
        let a = node_scores_raw(&g, NodeFunction::Authority);
        assert_eq!(h, a);
        assert!(close(h.iter().cloned().fold(f64::MIN, f64::max), 1.0));
    }

    #[test]
    fn knn_is_mean_neighbour_degree() {
        let k = node_scores_raw(&toy(), NodeFunction::Knn);
        // u1 neighbours i1,i2,i3 with degrees 2,2,3.
        assert!(close(k[0], 7.0 / 3.0));
    }

    #[test]
    fn function_names_parse() {
        for f in NodeFunction::ALL {
            assert_eq!(f.as_str().parse::<NodeFunction>().unwrap(), f);
        }
        assert!("bogus".parse::<NodeFunction>().is_err());
    }
}
