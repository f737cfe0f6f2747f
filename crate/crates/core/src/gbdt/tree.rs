//! Regression tree grown leaf-wise over binned features.

use super::GbdtParams;

/// Tree node. `threshold_bin` is inclusive on the left: a row goes left when
/// its bin is ≤ the threshold; rows in the feature's missing bin follow
/// `missing_left`.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold_bin: u16,
        missing_left: bool,
        gain: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        value: f64,
        count: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tree {
    /// Root is node 0; children always follow their parent (preorder-safe).
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn n_internal(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Split { .. }))
            .count()
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.len() - self.n_internal()
    }

    pub fn max_leaf_depth(&self) -> usize {
        fn depth_of(nodes: &[Node], idx: usize, depth: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => depth,
                Node::Split { left, right, .. } => depth_of(nodes, *left as usize, depth + 1)
                    .max(depth_of(nodes, *right as usize, depth + 1)),
            }
        }
        depth_of(&self.nodes, 0, 0)
    }

    /// Walks one binned row to its leaf value. `row_bin(f)` yields the row's
    /// bin for feature `f`; `missing_bins[f]` identifies the missing bin.
    pub fn output(&self, row_bin: &dyn Fn(usize) -> u16, missing_bins: &[u16]) -> f64 {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold_bin,
                    missing_left,
                    left,
                    right,
                    ..
                } => {
                    let bin = row_bin(*feature);
                    let go_left = if bin == missing_bins[*feature] {
                        *missing_left
                    } else {
                        bin <= *threshold_bin
                    };
                    idx = if go_left { *left as usize } else { *right as usize };
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SplitInfo {
    pub feature: usize,
    pub threshold_bin: u16,
    pub missing_left: bool,
    pub gain: f64,
}

pub(crate) struct GrowContext<'a> {
    /// Column-major training bins, `bins[feature][row]`.
    pub bins: &'a [Vec<u16>],
    pub n_value_bins: &'a [usize],
    pub gradients: &'a [f64],
    pub params: &'a GbdtParams,
}

struct LeafCandidate {
    node_slot: usize,
    rows: Vec<u32>,
    depth: usize,
    grad_sum: f64,
    best: Option<SplitInfo>,
}

fn leaf_score(grad_sum: f64, count: f64, lambda: f64) -> f64 {
    grad_sum * grad_sum / (count + lambda)
}

/// Exhaustive scan over the eligible features' bin boundaries, missing bin
/// routed to whichever side gains more. Boundaries and both missing
/// directions are visited in a fixed order with a strict improvement test,
/// so ties resolve to the earliest candidate and growth is deterministic.
pub(crate) fn best_split(
    ctx: &GrowContext,
    rows: &[u32],
    grad_sum: f64,
    depth: usize,
    eligible: &[usize],
) -> Option<SplitInfo> {
    let params = ctx.params;
    if depth >= params.max_depth || rows.len() < 2 * params.min_data_in_leaf {
        return None;
    }
    let lambda = params.lambda_l2;
    let count = rows.len() as f64;
    let parent_score = leaf_score(grad_sum, count, lambda);
    let min_data = params.min_data_in_leaf as u32;

    let mut best: Option<SplitInfo> = None;
    let mut best_gain = 0.0;
    for &f in eligible {
        let n_value = ctx.n_value_bins[f];
        let mut hist_g = vec![0.0f64; n_value + 1];
        let mut hist_c = vec![0u32; n_value + 1];
        let column = &ctx.bins[f];
        for &r in rows {
            let b = column[r as usize] as usize;
            hist_g[b] += ctx.gradients[r as usize];
            hist_c[b] += 1;
        }
        let miss_g = hist_g[n_value];
        let miss_c = hist_c[n_value];

        let mut left_g = 0.0;
        let mut left_c = 0u32;
        for b in 0..n_value {
            left_g += hist_g[b];
            left_c += hist_c[b];
            for missing_left in [false, true] {
                let (gl, cl) = if missing_left {
                    (left_g + miss_g, left_c + miss_c)
                } else {
                    (left_g, left_c)
                };
                let cr = rows.len() as u32 - cl;
                let gr = grad_sum - gl;
                if cl < min_data || cr < min_data {
                    continue;
                }
                let gain = leaf_score(gl, cl as f64, lambda) + leaf_score(gr, cr as f64, lambda)
                    - parent_score;
                if gain > best_gain {
                    best_gain = gain;
                    best = Some(SplitInfo {
                        feature: f,
                        threshold_bin: b as u16,
                        missing_left,
                        gain,
                    });
                }
            }
        }
    }
    best
}

/// Grows one tree leaf-wise: repeatedly split the leaf with the highest
/// positive gain until `num_leaves`, `max_depth`, `min_data_in_leaf` or lack
/// of positive gain stops growth. Returns the tree and its leaf regions
/// (training rows per leaf, unscaled leaf value).
pub(crate) fn grow_tree(ctx: &GrowContext, eligible: &[usize]) -> (Tree, Vec<(Vec<u32>, f64)>) {
    let params = ctx.params;
    let lambda = params.lambda_l2;
    let n_rows = ctx.gradients.len() as u32;
    let rows: Vec<u32> = (0..n_rows).collect();
    let grad_sum: f64 = rows.iter().map(|&r| ctx.gradients[r as usize]).sum();

    let mut nodes: Vec<Node> = vec![Node::Leaf { value: 0.0, count: 0 }];
    let root_best = best_split(ctx, &rows, grad_sum, 0, eligible);
    let mut candidates = vec![Some(LeafCandidate {
        node_slot: 0,
        rows,
        depth: 0,
        grad_sum,
        best: root_best,
    })];
    let mut n_leaves = 1;

    while n_leaves < params.num_leaves {
        let mut chosen: Option<usize> = None;
        let mut chosen_gain = 0.0;
        for (i, cand) in candidates.iter().enumerate() {
            if let Some(cand) = cand {
                if let Some(split) = &cand.best {
                    if split.gain > chosen_gain {
                        chosen_gain = split.gain;
                        chosen = Some(i);
                    }
                }
            }
        }
        let Some(idx) = chosen else { break };
        let cand = candidates[idx].take().unwrap();
        let split = cand.best.unwrap();

        let missing_bin = ctx.n_value_bins[split.feature] as u16;
        let column = &ctx.bins[split.feature];
        let mut left_rows = Vec::new();
        let mut right_rows = Vec::new();
        let mut left_grad = 0.0;
        let mut right_grad = 0.0;
        for &r in &cand.rows {
            let bin = column[r as usize];
            let go_left = if bin == missing_bin {
                split.missing_left
            } else {
                bin <= split.threshold_bin
            };
            if go_left {
                left_grad += ctx.gradients[r as usize];
                left_rows.push(r);
            } else {
                right_grad += ctx.gradients[r as usize];
                right_rows.push(r);
            }
        }

        let left_slot = nodes.len();
        let right_slot = nodes.len() + 1;
        nodes.push(Node::Leaf { value: 0.0, count: 0 });
        nodes.push(Node::Leaf { value: 0.0, count: 0 });
        nodes[cand.node_slot] = Node::Split {
            feature: split.feature,
            threshold_bin: split.threshold_bin,
            missing_left: split.missing_left,
            gain: split.gain,
            left: left_slot as u32,
            right: right_slot as u32,
        };

        let child_depth = cand.depth + 1;
        let left_best = best_split(ctx, &left_rows, left_grad, child_depth, eligible);
        let right_best = best_split(ctx, &right_rows, right_grad, child_depth, eligible);
        candidates.push(Some(LeafCandidate {
            node_slot: left_slot,
            rows: left_rows,
            depth: child_depth,
            grad_sum: left_grad,
            best: left_best,
        }));
        candidates.push(Some(LeafCandidate {
            node_slot: right_slot,
            rows: right_rows,
            depth: child_depth,
            grad_sum: right_grad,
            best: right_best,
        }));
        n_leaves += 1;
    }

    let mut regions = Vec::with_capacity(n_leaves);
    for cand in candidates.into_iter().flatten() {
        let value = -cand.grad_sum / (cand.rows.len() as f64 + lambda);
        nodes[cand.node_slot] = Node::Leaf {
            value,
            count: cand.rows.len() as u32,
        };
        regions.push((cand.rows, value));
    }
    (Tree { nodes }, regions)
}
