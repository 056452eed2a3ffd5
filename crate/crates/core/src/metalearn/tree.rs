//! Ranking trees: regression trees over rank vectors with variance impurity.

use rand::seq::index;
use rand::Rng;

const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        mean: Vec<f64>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTree {
    nodes: Vec<Node>,
}

/// Growth parameters of one tree.
pub(crate) struct GrowConfig {
    pub max_depth: usize,
    /// Candidate features per split; `None` means all.
    pub max_features: Option<usize>,
}

impl RankTree {
    /// Grows a tree on `rows` (features) and `targets` (rank vectors) restricted
    /// to `members`. With a feature budget below the feature count, candidates
    /// are drawn from `rng` at each split.
    pub(crate) fn grow<R: Rng>(
        rows: &[Vec<f64>],
        targets: &[Vec<f64>],
        members: &[usize],
        cfg: &GrowConfig,
        rng: &mut R,
    ) -> RankTree {
        let mut tree = RankTree { nodes: Vec::new() };
        tree.build(rows, targets, members.to_vec(), 0, cfg, rng);
        tree
    }

    fn build<R: Rng>(
        &mut self,
        rows: &[Vec<f64>],
        targets: &[Vec<f64>],
        members: Vec<usize>,
        depth: usize,
        cfg: &GrowConfig,
        rng: &mut R,
    ) -> usize {
        let id = self.nodes.len();
        let mean = mean_vector(targets, &members);
        self.nodes.push(Node::Leaf { mean });
        if members.len() < 2 || depth >= cfg.max_depth || sse(targets, &members) <= MIN_GAIN {
            return id;
        }
        let p = rows.first().map_or(0, Vec::len);
        let candidates: Vec<usize> = match cfg.max_features {
            Some(m) if m < p => {
                let mut c = index::sample(rng, p, m.max(1)).into_vec();
                c.sort_unstable();
                c
            }
            _ => (0..p).collect(),
        };
        let Some((feature, threshold)) = best_split(rows, targets, &members, &candidates) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = members
            .iter()
            .partition(|&&m| rows[m][feature] <= threshold);
        let left = self.build(rows, targets, l, depth + 1, cfg, rng);
        let right = self.build(rows, targets, r, depth + 1, cfg, rng);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    /// Leaf mean rank vector reached by `x`.
    pub fn leaf_mean(&self, x: &[f64]) -> &[f64] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { mean } => return mean,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    id = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }

    /// Number of split levels on the longest path; a single leaf has depth 0.
    pub fn depth(&self) -> usize {
        self.depth_from(0)
    }

    fn depth_from(&self, id: usize) -> usize {
        match &self.nodes[id] {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => {
                1 + self.depth_from(*left).max(self.depth_from(*right))
            }
        }
    }

    /// Smallest 1-based level at which each feature splits, if it does.
    pub fn min_split_levels(&self, n_features: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_features];
        let mut stack = vec![(0usize, 1usize)];
        while let Some((id, level)) = stack.pop() {
            if let Node::Split {
                feature,
                left,
                right,
                ..
            } = &self.nodes[id]
            {
                let slot = &mut out[*feature];
                *slot = Some(slot.map_or(level, |l: usize| l.min(level)));
                stack.push((*left, level + 1));
                stack.push((*right, level + 1));
            }
        }
        out
    }
}

fn mean_vector(targets: &[Vec<f64>], members: &[usize]) -> Vec<f64> {
    let k = targets.first().map_or(0, Vec::len);
    let mut m = vec![0.0; k];
    for &i in members {
        for (acc, v) in m.iter_mut().zip(&targets[i]) {
            *acc += v;
        }
    }
    let n = members.len().max(1) as f64;
    m.iter_mut().for_each(|v| *v /= n);
    m
}

/// Sum of squared deviations of member rank vectors from their mean.
fn sse(targets: &[Vec<f64>], members: &[usize]) -> f64 {
    let mean = mean_vector(targets, members);
    members
        .iter()
        .map(|&i| {
            targets[i]
                .iter()
                .zip(&mean)
                .map(|(v, m)| (v - m).powi(2))
                .sum::<f64>()
        })
        .sum()
}

/// Split maximising the reduction of mean impurity; ties keep the earliest
/// candidate feature and the smallest threshold.
fn best_split(
    rows: &[Vec<f64>],
    targets: &[Vec<f64>],
    members: &[usize],
    candidates: &[usize],
) -> Option<(usize, f64)> {
    let n = members.len();
    let k = targets[members[0]].len();
    let mut total = vec![0.0; k];
    let mut total_sq = 0.0;
    for &i in members {
        for (t, v) in total.iter_mut().zip(&targets[i]) {
            *t += v;
            total_sq += v * v;
        }
    }
    let sse_of = |sum: &[f64], sq: f64, cnt: f64| sq - sum.iter().map(|s| s * s).sum::<f64>() / cnt;
    let parent = sse_of(&total, total_sq, n as f64);

    let mut best: Option<(usize, f64)> = None;
    let mut best_gain = MIN_GAIN;
    let mut order = members.to_vec();
    let mut left = vec![0.0; k];
    for &f in candidates {
        order.sort_by(|&a, &b| rows[a][f].total_cmp(&rows[b][f]));
        left.iter_mut().for_each(|v| *v = 0.0);
        let mut left_sq = 0.0;
        for pos in 0..n - 1 {
            let i = order[pos];
            for (l, v) in left.iter_mut().zip(&targets[i]) {
                *l += v;
                left_sq += v * v;
            }
            let (x, next) = (rows[i][f], rows[order[pos + 1]][f]);
            if !(next > x) {
                continue;
            }
            let nl = (pos + 1) as f64;
            let right: Vec<f64> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
            let child =
                sse_of(&left, left_sq, nl) + sse_of(&right, total_sq - left_sq, n as f64 - nl);
            let gain = (parent - child) / n as f64;
            if gain > best_gain {
                best_gain = gain;
                let mid = x + (next - x) / 2.0;
                best = Some((f, mid));
            }
        }
    }
    best
}
