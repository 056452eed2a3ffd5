//! Pairwise node comparisons summarised per row of the comparison matrix.

use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{BipartiteGraph, NodeSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairFunction {
    /// Jaccard index of the two neighbour sets.
    Similarity,
    /// Unweighted shortest-path length.
    Distance,
}

impl PairFunction {
    pub const ALL: [PairFunction; 2] = [PairFunction::Similarity, PairFunction::Distance];

    pub fn as_str(&self) -> &'static str {
        match self {
            PairFunction::Similarity => "similarity",
            PairFunction::Distance => "distance",
        }
    }
}

impl FromStr for PairFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "similarity" => Ok(PairFunction::Similarity),
            "distance" => Ok(PairFunction::Distance),
            _ => Err(Error::Usage(format!("unknown pairwise function `{s}`"))),
        }
    }
}

/// Row summaries applied to each row of the comparison matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowSummary {
    Sum,
    Mean,
    Count,
    Variance,
}

impl RowSummary {
    pub const ALL: [RowSummary; 4] = [
        RowSummary::Sum,
        RowSummary::Mean,
        RowSummary::Count,
        RowSummary::Variance,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RowSummary::Sum => "sum",
            RowSummary::Mean => "mean",
            RowSummary::Count => "count",
            RowSummary::Variance => "variance",
        }
    }

    /// Summarises one row. `count` counts nonzero entries; variance uses the
    /// `n - 1` denominator.
    pub fn apply(&self, row: &[f64]) -> f64 {
        let n = row.len();
        match self {
            RowSummary::Sum => row.iter().sum(),
            RowSummary::Mean => {
                if n == 0 {
                    0.0
                } else {
                    row.iter().sum::<f64>() / n as f64
                }
            }
            RowSummary::Count => row.iter().filter(|&&v| v != 0.0).count() as f64,
            RowSummary::Variance => {
                if n < 2 {
                    return 0.0;
                }
                let mean = row.iter().sum::<f64>() / n as f64;
                row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
            }
        }
    }
}

impl FromStr for RowSummary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RowSummary::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown row summary `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairwiseConfig {
    /// Maximum number of nodes compared per node set; larger sets are sampled.
    pub sample_cap: usize,
    pub seed: u64,
}

impl Default for PairwiseConfig {
    fn default() -> Self {
        PairwiseConfig {
            sample_cap: 512,
            seed: 0,
        }
    }
}

/// Nodes of `set`, sampled down to the configured cap (ascending ids).
pub(crate) fn sampled_nodes(g: &BipartiteGraph, set: NodeSet, cfg: &PairwiseConfig) -> Vec<usize> {
    let nodes = g.nodes(set);
    if cfg.sample_cap == 0 || nodes.len() <= cfg.sample_cap {
        return nodes;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ set_salt(set));
    let mut picked: Vec<usize> = index::sample(&mut rng, nodes.len(), cfg.sample_cap)
        .into_iter()
        .map(|i| nodes[i])
        .collect();
    picked.sort_unstable();
    picked
}

fn set_salt(set: NodeSet) -> u64 {
    match set {
        NodeSet::G => 0x9e37_79b9,
        NodeSet::U => 0x85eb_ca6b,
        NodeSet::I => 0xc2b2_ae35,
    }
}

/// Rows of the comparison matrix over `nodes` (diagonal and infinite
/// distances excluded).
pub(crate) fn comparison_rows(
    g: &BipartiteGraph,
    nodes: &[usize],
    f: PairFunction,
) -> Vec<Vec<f64>> {
    match f {
        PairFunction::Similarity => {
            let neigh: Vec<Vec<usize>> = nodes
                .iter()
                .map(|&v| {
                    let mut ns: Vec<usize> = g.neighbors(v).iter().map(|&(n, _)| n).collect();
                    ns.sort_unstable();
                    ns.dedup();
                    ns
                })
                .collect();
            (0..nodes.len())
                .into_par_iter()
                .map(|a| {
                    (0..nodes.len())
                        .filter(|&b| b != a)
                        .map(|b| jaccard(&neigh[a], &neigh[b]))
                        .collect()
                })
                .collect()
        }
        PairFunction::Distance => nodes
            .par_iter()
            .map(|&v| {
                let dist = g.bfs(v);
                nodes
                    .iter()
                    .filter(|&&w| w != v)
                    .filter_map(|&w| dist[w].map(|d| d as f64))
                    .collect()
            })
            .collect(),
    }
}

fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - common;
    if union == 0 {
        0.0
    } else {
        common as f64 / union as f64
    }
}

/// One row summary per node of `set`.
pub fn pairwise_row_summaries(
    g: &BipartiteGraph,
    set: NodeSet,
    f: PairFunction,
    summary: RowSummary,
    cfg: &PairwiseConfig,
) -> Result<Vec<f64>> {
    let nodes = sampled_nodes(g, set, cfg);
    if nodes.is_empty() {
        return Err(Error::Usage(format!("node set {} is empty", set.as_str())));
    }
    Ok(comparison_rows(g, &nodes, f)
        .iter()
        .map(|row| summary.apply(row))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::toy;
    use super::*;

    #[test]
    fn toy_similarity_and_distance() {
        let g = toy();
        let users = g.nodes(NodeSet::U);
        let sim = comparison_rows(&g, &users, PairFunction::Similarity);
        // Row u1 = [sim(u1,u2), sim(u1,u3)].
        assert!((sim[0][0] - 2.0 / 3.0).abs() < 1e-12);
        let dist = comparison_rows(&g, &users, PairFunction::Distance);
        assert_eq!(dist[0][0], 2.0);
    }

    #[test]
    fn row_of_isolated_overlap_is_zero() {
        // u1-i1, u2-i2: no shared neighbours.
        let g = BipartiteGraph::from_edges(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]);
        let cfg = PairwiseConfig::default();
        let mean = pairwise_row_summaries(
            &g,
            NodeSet::U,
            PairFunction::Similarity,
            RowSummary::Mean,
            &cfg,
        )
        .unwrap();
        let count = pairwise_row_summaries(
            &g,
            NodeSet::U,
            PairFunction::Similarity,
            RowSummary::Count,
            &cfg,
        )
        .unwrap();
        assert_eq!(mean, vec![0.0, 0.0]);
        assert_eq!(count, vec![0.0, 0.0]);
        // Unreachable distances are dropped entirely.
        let sum = pairwise_row_summaries(
            &g,
            NodeSet::U,
            PairFunction::Distance,
            RowSummary::Count,
            &cfg,
        )
        .unwrap();
        assert_eq!(sum, vec![0.0, 0.0]);
    }

    #[test]
    fn singleton_set_gives_empty_row() {
        let g = BipartiteGraph::from_edges(1, 2, &[(0, 0, 1.0), (0, 1, 1.0)]);
        for s in RowSummary::ALL {
            let v = pairwise_row_summaries(
                &g,
                NodeSet::U,
                PairFunction::Distance,
                s,
                &Default::default(),
            )
            .unwrap();
            assert_eq!(v, vec![0.0]);
        }
    }

    #[test]
    fn sampling_caps_and_is_seeded() {
        let edges: Vec<_> = (0..40).map(|i| (i % 7, i, 1.0)).collect();
        let g = BipartiteGraph::from_edges(7, 40, &edges);
        let cfg = PairwiseConfig {
            sample_cap: 10,
            seed: 4,
        };
        let a = sampled_nodes(&g, NodeSet::I, &cfg);
        assert_eq!(a.len(), 10);
        assert_eq!(a, sampled_nodes(&g, NodeSet::I, &cfg));
    }
}
