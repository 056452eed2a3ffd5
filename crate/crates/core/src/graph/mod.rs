//! Weighted user/item bipartite graph and the graph-theory primitives used by
//! the graph metafeatures.
//!
//! Users occupy node ids `0..n_users` and items `n_users..n_users + n_items`.
//! Every rating becomes one undirected edge weighted by the rating value.

mod centrality;
mod community;
pub(crate) mod pairwise;

use std::collections::VecDeque;
use std::io::Write;

use crate::dataset::RatingDataset;
use crate::Result;

pub use centrality::{node_scores, node_scores_raw, NodeFunction};
pub use community::{communities, components, modularity};
pub use pairwise::{pairwise_row_summaries, PairFunction, PairwiseConfig, RowSummary};

/// Node subsets used as metafeature objects: the whole graph, users or items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeSet {
    G,
    U,
    I,
}

impl NodeSet {
    pub const ALL: [NodeSet; 3] = [NodeSet::G, NodeSet::U, NodeSet::I];

    pub fn as_str(&self) -> &'static str {
        match self {
            NodeSet::G => "G",
            NodeSet::U => "U",
            NodeSet::I => "I",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    n_users: usize,
    n_items: usize,
    edges: Vec<(usize, usize, f64)>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl BipartiteGraph {
    /// Builds a graph from `(user, item, weight)` edges with item ids local to
    /// the item side (`0..n_items`).
    pub fn from_edges(n_users: usize, n_items: usize, edges: &[(usize, usize, f64)]) -> Self {
        let n = n_users + n_items;
        let mut adj = vec![Vec::new(); n];
        let mut out = Vec::with_capacity(edges.len());
        for &(u, i, w) in edges {
            assert!(u < n_users && i < n_items, "edge ({u}, {i}) out of range");
            let item_node = n_users + i;
            adj[u].push((item_node, w));
            adj[item_node].push((u, w));
            out.push((u, item_node, w));
        }
        BipartiteGraph {
            n_users,
            n_items,
            edges: out,
            adj,
        }
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.n_users + self.n_items
    }

    /// Number of edges.
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(user node, item node, weight)`.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adj[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    pub fn is_user(&self, node: usize) -> bool {
        node < self.n_users
    }

    /// Weight of the edge between `a` and `b`, if any.
    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        self.adj[a].iter().find(|&&(n, _)| n == b).map(|&(_, w)| w)
    }

    /// Node ids in `set`, ascending.
    pub fn nodes(&self, set: NodeSet) -> Vec<usize> {
        match set {
            NodeSet::G => (0..self.order()).collect(),
            NodeSet::U => (0..self.n_users).collect(),
            NodeSet::I => (self.n_users..self.order()).collect(),
        }
    }

    /// Subgraph induced by `nodes`, re-indexed with its users first.
    pub fn induced(&self, nodes: &[usize]) -> BipartiteGraph {
        let mut map = vec![usize::MAX; self.order()];
        let (mut nu, mut ni) = (0, 0);
        let mut sorted = nodes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for &n in &sorted {
            if self.is_user(n) {
                map[n] = nu;
                nu += 1;
            }
        }
        for &n in &sorted {
            if !self.is_user(n) {
                map[n] = ni;
                ni += 1;
            }
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(u, i, _)| map[u] != usize::MAX && map[i] != usize::MAX)
            .map(|&(u, i, w)| (map[u], map[i], w))
            .collect();
        BipartiteGraph::from_edges(nu, ni, &edges)
    }

    /// Unweighted BFS distances from `src`; `None` for unreachable nodes.
    pub fn bfs(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.order()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &(n, _) in &self.adj[v] {
                if dist[n].is_none() {
                    dist[n] = Some(d + 1);
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    /// Writes the edge list as `source,target,weight` CSV.
    pub fn write_edge_list<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["source", "target", "weight"])?;
        for &(u, i, wt) in &self.edges {
            w.write_record([u.to_string(), i.to_string(), format!("{wt}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds the bipartite graph of a rating dataset.
pub fn build_bipartite(ds: &RatingDataset) -> BipartiteGraph {
    let edges: Vec<_> = ds
        .ratings()
        .iter()
        .map(|r| (r.user, r.item, r.value))
        .collect();
    BipartiteGraph::from_edges(ds.n_users(), ds.n_items(), &edges)
}

/// Disjoint node groups covering every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePartition {
    pub assignment: Vec<usize>,
    pub groups: Vec<Vec<usize>>,
}

impl NodePartition {
    /// Builds a partition from raw labels; groups are renumbered by their
    /// smallest node.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for (node, &l) in labels.iter().enumerate() {
            let g = *remap.entry(l).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(node);
            assignment.push(g);
        }
        NodePartition { assignment, groups }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Graph-level measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphLevel {
    pub edge_density: f64,
    /// Shortest cycle length, `0` when acyclic.
    pub girth: usize,
    pub order: usize,
    pub size: usize,
    /// Minimum eccentricity over the largest connected component.
    pub radius: usize,
}

pub fn graph_level(g: &BipartiteGraph) -> GraphLevel {
    let possible = g.n_users() * g.n_items();
    let edge_density = if possible == 0 {
        0.0
    } else {
        g.size() as f64 / possible as f64
    };
    GraphLevel {
        edge_density,
        girth: girth(g),
        order: g.order(),
        size: g.size(),
        radius: radius(g),
    }
}

/// Shortest cycle via BFS from every node; `0` if the graph is a forest.
pub fn girth(g: &BipartiteGraph) -> usize {
    let n = g.order();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if g.degree(root) < 2 {
            continue;
        }
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[root] = 0;
        parent[root] = usize::MAX;
        queue.clear();
        queue.push_back(root);
        'bfs: while let Some(v) = queue.pop_front() {
            // No shorter cycle through this root can appear past this depth.
            if 2 * dist[v] >= best {
                break;
            }
            for &(w, _) in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                } else if parent[v] != w {
                    best = best.min(dist[v] + dist[w] + 1);
                    if best <= 4 {
                        break 'bfs;
                    }
                }
            }
        }
    }
    if best == usize::MAX {
        0
    } else {
        best
    }
}

fn radius(g: &BipartiteGraph) -> usize {
    let parts = components(g);
    let Some(largest) = parts
        .groups
        .iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
    else {
        return 0;
    };
    largest
        .iter()
        .map(|&v| g.bfs(v).into_iter().flatten().max().unwrap_or(0))
        .min()
        .unwrap_or(0)
}
