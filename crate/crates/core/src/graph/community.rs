//! Louvain communities and connected components.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BipartiteGraph, NodePartition};

const MIN_GAIN: f64 = 1e-12;
const MAX_LEVELS: usize = 32;
const MAX_PASSES: usize = 256;

/// Connected components; bipartite graphs are undirected so strong and weak
/// connectivity coincide.
pub fn components(g: &BipartiteGraph) -> NodePartition {
    let n = g.order();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for root in 0..n {
        if label[root] != usize::MAX {
            continue;
        }
        label[root] = next;
        stack.push(root);
        while let Some(v) = stack.pop() {
            for &(w, _) in g.neighbors(v) {
                if label[w] == usize::MAX {
                    label[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    NodePartition::from_labels(&label)
}

/// Edge weights shifted so that every weight is strictly positive.
fn positive_edges(g: &BipartiteGraph) -> Vec<(usize, usize, f64)> {
    let min_w = g
        .edges()
        .iter()
        .map(|&(_, _, w)| w)
        .fold(f64::INFINITY, f64::min);
    let shift = if min_w <= 0.0 { 1.0 - min_w } else { 0.0 };
    g.edges()
        .iter()
        .map(|&(u, i, w)| (u, i, w + shift))
        .collect()
}

/// Newman modularity of `partition` on the weighted graph.
pub fn modularity(g: &BipartiteGraph, partition: &NodePartition) -> f64 {
    let edges = positive_edges(g);
    let m: f64 = edges.iter().map(|e| e.2).sum();
    if m <= 0.0 {
        return 0.0;
    }
    let k = partition.groups.len();
    let mut inside = vec![0.0; k];
    let mut tot = vec![0.0; k];
    for &(a, b, w) in &edges {
        let (ca, cb) = (partition.assignment[a], partition.assignment[b]);
        if ca == cb {
            inside[ca] += w;
        }
        tot[ca] += w;
        tot[cb] += w;
    }
    (0..k)
        .map(|c| inside[c] / m - (tot[c] / (2.0 * m)).powi(2))
        .sum()
}

/// Weighted graph used at each aggregation level.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl Level {
    fn n(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_loops[v]
    }
}

/// Louvain multilevel modularity optimisation. The node visiting order at
/// every level is a permutation drawn from `seed`, so the result is
/// deterministic per seed.
pub fn communities(g: &BipartiteGraph, seed: u64) -> NodePartition {
    let n = g.order();
    let edges = positive_edges(g);
    let m: f64 = edges.iter().map(|e| e.2).sum();
    if m <= 0.0 {
        return NodePartition::from_labels(&(0..n).collect::<Vec<_>>());
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b, w) in &edges {
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    let mut level = Level {
        adj,
        self_loops: vec![0.0; n],
    };
    let mut membership: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for _ in 0..MAX_LEVELS {
        let (labels, moved) = local_moving(&level, m, &mut rng);
        if !moved {
            break;
        }
        let (renumbered, count) = renumber(&labels);
        for c in membership.iter_mut() {
            *c = renumbered[*c];
        }
        level = aggregate(&level, &renumbered, count);
        if count == 1 {
            break;
        }
    }
    NodePartition::from_labels(&membership)
}

fn local_moving(level: &Level, m: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = level.n();
    let degree: Vec<f64> = (0..n).map(|v| level.degree(v)).collect();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot = degree.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut weight_to = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut any_move = false;
    for _ in 0..MAX_PASSES {
        let mut moved = false;
        for &v in &order {
            let own = comm[v];
            touched.clear();
            touched.push(own);
            weight_to[own] = 0.0;
            for &(u, w) in &level.adj[v] {
                let c = comm[u];
                if !touched.contains(&c) {
                    touched.push(c);
                    weight_to[c] = 0.0;
                }
                weight_to[c] += w;
            }
            tot[own] -= degree[v];
            let k = degree[v];
            let gain = |c: usize| weight_to[c] - tot[c] * k / (2.0 * m);
            let mut best = own;
            let mut best_gain = gain(own);
            for &c in &touched[1..] {
                let gc = gain(c);
                if gc > best_gain + MIN_GAIN {
                    best = c;
                    best_gain = gc;
                }
            }
            tot[best] += k;
            if best != own {
                comm[v] = best;
                moved = true;
                any_move = true;
            }
        }
        if !moved {
            break;
        }
    }
    (comm, any_move)
}

fn renumber(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; labels.len()];
    let mut next = 0;
    let mut out = Vec::with_capacity(labels.len());
    for &l in labels {
        if map[l] == usize::MAX {
            map[l] = next;
            next += 1;
        }
        out.push(map[l]);
    }
    (out, next)
}

fn aggregate(level: &Level, comm: &[usize], count: usize) -> Level {
    let mut self_loops = vec![0.0; count];
    let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); count];
    for v in 0..level.n() {
        let cv = comm[v];
        self_loops[cv] += level.self_loops[v];
        for &(u, w) in &level.adj[v] {
            let cu = comm[u];
            if cu == cv {
                // Each internal edge is seen from both ends.
                self_loops[cv] += w / 2.0;
            } else {
                *weights[cv].entry(cu).or_default() += w;
            }
        }
    }
    Level {
        adj: weights
            .into_iter()
            .map(|row| row.into_iter().collect())
            .collect(),
        self_loops,
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::toy;
    use super::*;

    #[test]
    fn components_of_small_graphs() {
        assert_eq!(components(&toy()).len(), 1);
        let two = BipartiteGraph::from_edges(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]);
        let p = components(&two);
        assert_eq!(p.groups, vec![vec![0, 2], vec![1, 3]]);
        let edgeless = BipartiteGraph::from_edges(2, 1, &[]);
        assert_eq!(components(&edgeless).len(), 3);
    }

    #[test]
    fn edgeless_graph_has_singleton_communities() {
        let g = BipartiteGraph::from_edges(2, 2, &[]);
        assert_eq!(communities(&g, 1).len(), 4);
    }

    #[test]
    fn louvain_is_deterministic() {
        let g = toy();
        assert_eq!(communities(&g, 7), communities(&g, 7));
    }

    #[test]
    fn modularity_of_single_group_is_zero() {
        let g = toy();
        let p = NodePartition::from_labels(&[0; 6]);
        assert!(modularity(&g, &p).abs() < 1e-12);
    }
}
