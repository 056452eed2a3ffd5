//! Graph (GR) metafeatures at four levels: graph, node, pairwise, subgraph.

use rayon::prelude::*;

use super::{post_function, MetafeatureVector, PostFunction, Provenance};
use crate::graph::{
    self, BipartiteGraph, NodeFunction, NodePartition, NodeSet, PairFunction, PairwiseConfig,
    RowSummary,
};
use crate::Result;

/// Metafeature counts per level: graph, node, pairwise, subgraph.
pub const GRAPH_LEVEL_COUNTS: [usize; 4] = [5, 180, 96, 480];

const GRAPH_LEVEL: [&str; 5] = ["edge_density", "girth", "order", "size", "radius"];
const SUBGRAPHS: [&str; 2] = ["communities", "components"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GraphExtractionConfig {
    pub pairwise: PairwiseConfig,
    /// Seed of the Louvain visiting order.
    pub community_seed: u64,
}

/// The 761 GR names in extraction order.
pub fn graph_schema() -> Vec<String> {
    let mut names = Vec::with_capacity(761);
    for f in GRAPH_LEVEL {
        names.push(format!("G.{f}"));
    }
    for set in NodeSet::ALL {
        for f in NodeFunction::ALL {
            for pf in PostFunction::GRAPH {
                names.push(format!("{}.{}.{}", set.as_str(), f.as_str(), pf.as_str()));
            }
        }
    }
    for set in NodeSet::ALL {
        for f in PairFunction::ALL {
            for mpf in RowSummary::ALL {
                for pf in PostFunction::GRAPH {
                    names.push(format!(
                        "{}.[pairs.{}.{}].{}",
                        set.as_str(),
                        f.as_str(),
                        mpf.as_str(),
                        pf.as_str()
                    ));
                }
            }
        }
    }
    for sub in SUBGRAPHS {
        for f in NodeFunction::ALL {
            for il in PostFunction::GRAPH {
                for ol in PostFunction::GRAPH {
                    names.push(format!(
                        "{sub}.[subgraph.{}.{}].{}",
                        f.as_str(),
                        il.as_str(),
                        ol.as_str()
                    ));
                }
            }
        }
    }
    names
}

/// Applies `pf` to the finite entries of `values`; `0` when none remain.
fn aggregate<I: IntoIterator<Item = f64>>(values: I, pf: PostFunction) -> f64 {
    let kept: Vec<f64> = values.into_iter().filter(|v| v.is_finite()).collect();
    let out = post_function(&kept, pf);
    if out.is_finite() {
        out
    } else {
        0.0
    }
}

/// Raw scores of every node function, in `NodeFunction::ALL` order.
fn all_node_scores(g: &BipartiteGraph) -> Vec<Vec<f64>> {
    NodeFunction::ALL
        .par_iter()
        .map(|&f| graph::node_scores_raw(g, f))
        .collect()
}

pub fn extract_graph(g: &BipartiteGraph, cfg: &GraphExtractionConfig) -> Result<MetafeatureVector> {
    let mut values = Vec::with_capacity(761);

    let gl = graph::graph_level(g);
    values.extend([
        gl.edge_density,
        gl.girth as f64,
        gl.order as f64,
        gl.size as f64,
        gl.radius as f64,
    ]);

    let scores = all_node_scores(g);
    for set in NodeSet::ALL {
        let nodes = g.nodes(set);
        for per_fn in &scores {
            for pf in PostFunction::GRAPH {
                values.push(aggregate(nodes.iter().map(|&n| per_fn[n]), pf));
            }
        }
    }

    for set in NodeSet::ALL {
        let nodes = graph::pairwise::sampled_nodes(g, set, &cfg.pairwise);
        for f in PairFunction::ALL {
            let rows = graph::pairwise::comparison_rows(g, &nodes, f);
            for mpf in RowSummary::ALL {
                let per_node: Vec<f64> = rows.iter().map(|r| mpf.apply(r)).collect();
                for pf in PostFunction::GRAPH {
                    values.push(aggregate(per_node.iter().copied(), pf));
                }
            }
        }
    }

    let partitions = [
        graph::communities(g, cfg.community_seed),
        graph::components(g),
    ];
    for part in &partitions {
        values.extend(subgraph_block(g, part));
    }

    MetafeatureVector::new(graph_schema(), values, Provenance::GR)
}

/// `[subgraph.f.il].ol` for every function and post-function pair.
fn subgraph_block(g: &BipartiteGraph, part: &NodePartition) -> Vec<f64> {
    // per_subgraph[s][f][il]
    let per_subgraph: Vec<Vec<[f64; 4]>> = part
        .groups
        .par_iter()
        .map(|nodes| {
            let sub = g.induced(nodes);
            all_node_scores(&sub)
                .into_iter()
                .map(|s| PostFunction::GRAPH.map(|il| aggregate(s.iter().copied(), il)))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(15 * 16);
    for f in 0..NodeFunction::ALL.len() {
        for il in 0..PostFunction::GRAPH.len() {
            for ol in PostFunction::GRAPH {
                out.push(aggregate(per_subgraph.iter().map(|s| s[f][il]), ol));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_counts() {
        let s = graph_schema();
        assert_eq!(s.len(), 761);
        assert_eq!(GRAPH_LEVEL_COUNTS.iter().sum::<usize>(), 761);
        assert!(s.contains(&"G.[pairs.similarity.variance].skewness".to_string()));
        assert!(s.contains(&"communities.[subgraph.alpha.mean].entropy".to_string()));
        let set: std::collections::HashSet<_> = s.iter().collect();
        assert_eq!(set.len(), 761);
    }

    #[test]
    fn toy_graph_level_values() {
        let g = crate::graph::fixtures::toy();
        let v = extract_graph(&g, &Default::default()).unwrap();
        assert_eq!(v.len(), 761);
        assert_eq!(v.get("G.order"), Some(6.0));
        assert_eq!(v.get("G.size"), Some(7.0));
        assert_eq!(v.get("G.girth"), Some(4.0));
        assert_eq!(v.get("U.degree.mean"), Some(7.0 / 3.0));
    }

    #[test]
    fn edgeless_graph_is_all_defined() {
        let g = BipartiteGraph::from_edges(3, 2, &[]);
        let v = extract_graph(&g, &Default::default()).unwrap();
        assert!(v.values.iter().all(|x| x.is_finite()));
    }
}
