//! CART-style decision trees (Gini impurity, midpoint thresholds) and bagged
//! random forests with per-split feature subsampling.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use alloc::vec;
use rand::Rng;

use super::{GrowthLabel, ModelError, ModelParams, TrainMeta, TrainedModel};
use crate::rng;

const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        /// Training class distribution at this leaf.
        probs: Vec<f64>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// A fitted tree as a node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    pub nodes: Vec<TreeNode>,
    pub n_features: usize,
    pub n_classes: usize,
}

impl TreeModel {
    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let mut node = 0usize;
        loop {
            match &self.nodes[node] {
                TreeNode::Leaf { probs } => return probs.clone(),
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            p * p
        })
        .sum::<f64>()
}

struct TreeBuilder<'a> {
    x: &'a [Vec<f64>],
    y_idx: &'a [usize],
    n_classes: usize,
    max_depth: Option<usize>,
    mtry: usize,
    nodes: Vec<TreeNode>,
}

impl TreeBuilder<'_> {
    /// Best (feature, threshold, gain) over the candidate features, ties to
    /// the first encountered (lowest feature index, lowest threshold).
    fn best_split(
        &self,
        samples: &[usize],
        features: &[usize],
    ) -> Option<(usize, f64)> {
        let total = samples.len();
        let mut parent_counts = vec![0usize; self.n_classes];
        for &i in samples {
            parent_counts[self.y_idx[i]] += 1;
        }
        let parent_gini = gini(&parent_counts, total);
        let mut best: Option<(f64, usize, f64)> = None; // (gain, feature, threshold)
        for &f in features {
            let mut order: Vec<usize> = samples.to_vec();
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]).then(a.cmp(&b)));
            let mut left_counts = vec![0usize; self.n_classes];
            let mut left_n = 0usize;
            for w in 0..total - 1 {
                let i = order[w];
                left_counts[self.y_idx[i]] += 1;
                left_n += 1;
                let (va, vb) = (self.x[i][f], self.x[order[w + 1]][f]);
                if va == vb {
                    continue;
                }
                let threshold = va + (vb - va) / 2.0;
                let right_n = total - left_n;
                let mut right_counts = vec![0usize; self.n_classes];
                for (rc, (&pc, &lc)) in right_counts
                    .iter_mut()
                    .zip(parent_counts.iter().zip(&left_counts))
                {
                    *rc = pc - lc;
                }
                let weighted = (left_n as f64 * gini(&left_counts, left_n)
                    + right_n as f64 * gini(&right_counts, right_n))
                    / total as f64;
                let gain = parent_gini - weighted;
                let better = match best {
                    None => gain > MIN_GAIN,
                    Some((bg, _, _)) => gain > bg + MIN_GAIN,
                };
                if better {
                    best = Some((gain, f, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn leaf(&mut self, samples: &[usize]) -> usize {
        let mut counts = vec![0usize; self.n_classes];
        for &i in samples {
            counts[self.y_idx[i]] += 1;
        }
        let total = samples.len() as f64;
        self.nodes.push(TreeNode::Leaf {
            probs: counts.iter().map(|&c| c as f64 / total).collect(),
        });
        self.nodes.len() - 1
    }

    fn build(
        &mut self,
        samples: &[usize],
        depth: usize,
        tree_rng: &mut Option<&mut rand_chacha::ChaCha8Rng>,
    ) -> usize {
        let d = self.x[0].len();
        let pure = {
            let first = self.y_idx[samples[0]];
            samples.iter().all(|&i| self.y_idx[i] == first)
        };
        let depth_capped = self.max_depth.is_some_and(|m| depth >= m);
        if pure || samples.len() < 2 || depth_capped {
            return self.leaf(samples);
        }
        // feature subset: all features, or mtry sampled without replacement
        let features: Vec<usize> = if self.mtry >= d {
            (0..d).collect()
        } else {
            let rng = tree_rng.as_mut().expect("mtry < d requires a seeded rng");
            let mut pool: Vec<usize> = (0..d).collect();
            let mut picked = Vec::with_capacity(self.mtry);
            for _ in 0..self.mtry {
                picked.push(pool.swap_remove(rng.gen_range(0..pool.len())));
            }
            picked.sort_unstable();
            picked
        };
        match self.best_split(samples, &features) {
            None => self.leaf(samples),
            Some((feature, threshold)) => {
                let left_samples: Vec<usize> = samples
                    .iter()
                    .copied()
                    .filter(|&i| self.x[i][feature] <= threshold)
                    .collect();
                let right_samples: Vec<usize> = samples
                    .iter()
                    .copied()
                    .filter(|&i| self.x[i][feature] > threshold)
                    .collect();
                let slot = self.nodes.len();
                self.nodes.push(TreeNode::Leaf { probs: vec![] }); // placeholder
                let left = self.build(&left_samples, depth + 1, tree_rng);
                let right = self.build(&right_samples, depth + 1, tree_rng);
                self.nodes[slot] = TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                slot
            }
        }
    }
}

fn grow_tree(
    x: &[Vec<f64>],
    y_idx: &[usize],
    samples: &[usize],
    n_classes: usize,
    max_depth: Option<usize>,
    mtry: usize,
    mut tree_rng: Option<&mut rand_chacha::ChaCha8Rng>,
) -> TreeModel {
    let mut builder = TreeBuilder {
        x,
        y_idx,
        n_classes,
        max_depth,
        mtry,
        nodes: Vec::new(),
    };
    let root = builder.build(samples, 0, &mut tree_rng);
    debug_assert_eq!(root, 0);
    TreeModel {
        nodes: builder.nodes,
        n_features: x[0].len(),
        n_classes,
    }
}

pub(super) fn fit_tree(
    max_depth: Option<usize>,
    x: &[Vec<f64>],
    y_idx: &[usize],
    classes: Vec<GrowthLabel>,
    d: usize,
) -> Result<TrainedModel, ModelError> {
    let samples: Vec<usize> = (0..x.len()).collect();
    let tree = grow_tree(x, y_idx, &samples, classes.len(), max_depth, d, None);
    Ok(TrainedModel {
        classes,
        n_features: d,
        params: ModelParams::Tree(tree),
        meta: TrainMeta::default(),
    })
}

/// Bagged trees; per-tree RNG streams derive from the forest seed, so tree
/// training order does not matter.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<TreeModel>,
    pub n_features: usize,
}

impl ForestModel {
    /// Mean of the member trees' leaf distributions.
    pub fn proba(&self, x: &[f64], n_classes: usize) -> Vec<f64> {
        let mut acc = vec![0.0; n_classes];
        for tree in &self.trees {
            for (a, p) in acc.iter_mut().zip(tree.proba(x)) {
                *a += p;
            }
        }
        for a in &mut acc {
            *a /= self.trees.len() as f64;
        }
        acc
    }
}

/// Bootstrap sample of `n` indices drawn with the tree's stream.
pub(crate) fn bootstrap_indices(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

pub(crate) fn forest_tree_rng(seed: u64, tree: usize) -> rand_chacha::ChaCha8Rng {
    rng::stream(seed, &[tree as u64])
}

pub(super) fn fit_forest(
    seed: u64,
    n_trees: usize,
    mtry: Option<usize>,
    x: &[Vec<f64>],
    y_idx: &[usize],
    classes: Vec<GrowthLabel>,
    d: usize,
) -> Result<TrainedModel, ModelError> {
    if n_trees == 0 {
        return Err(ModelError::InconsistentInput(alloc::string::String::from(
            "forest needs at least one tree",
        )));
    }
    let mtry = mtry.unwrap_or_else(|| ((d as f64).sqrt().floor() as usize).max(1));
    let trees: Vec<TreeModel> = (0..n_trees)
        .map(|t| {
            let mut tree_rng = forest_tree_rng(seed, t);
            let samples = bootstrap_indices(&mut tree_rng, x.len());
            grow_tree(
                x,
                y_idx,
                &samples,
                classes.len(),
                None,
                mtry,
                Some(&mut tree_rng),
            )
        })
        .collect();
    Ok(TrainedModel {
        classes,
        n_features: d,
        params: ModelParams::Forest(ForestModel {
            trees,
            n_features: d,
        }),
        meta: TrainMeta::default(),
    })
}
