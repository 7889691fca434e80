//! Brute-force k-nearest-neighbor classifier.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use alloc::vec;

use super::{GrowthLabel, ModelError, ModelParams, TrainMeta, TrainedModel};

/// Stored training data; prediction scans all of it.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub k: usize,
    pub x: Vec<Vec<f64>>,
    pub y_idx: Vec<usize>,
    pub n_features: usize,
}

impl KnnModel {
    /// Neighbor indices sorted by (distance, index), nearest first.
    fn neighbors(&self, query: &[f64]) -> Vec<usize> {
        let mut scored: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, p)| {
                (
                    p.iter()
                        .zip(query)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>(),
                    i,
                )
            })
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        scored
            .into_iter()
            .take(self.k.min(self.x.len()))
            .map(|(_, i)| i)
            .collect()
    }

    /// Vote fractions over the class list.
    pub fn proba(&self, query: &[f64], n_classes: usize) -> Vec<f64> {
        let neighbors = self.neighbors(query);
        let mut votes = vec![0.0; n_classes];
        for &i in &neighbors {
            votes[self.y_idx[i]] += 1.0;
        }
        let total = neighbors.len() as f64;
        for v in &mut votes {
            *v /= total;
        }
        votes
    }

    /// Majority vote; a tie among top classes goes to the tied class whose
    /// representative appears earliest in the distance-sorted neighbor list
    /// (the nearest neighbor's class whenever it is among the tied).
    pub fn predict_index(&self, query: &[f64], n_classes: usize) -> usize {
        let neighbors = self.neighbors(query);
        let mut votes = vec![0usize; n_classes];
        for &i in &neighbors {
            votes[self.y_idx[i]] += 1;
        }
        let max = votes.iter().copied().max().unwrap_or(0);
        let tied: Vec<usize> = (0..n_classes).filter(|&c| votes[c] == max).collect();
        if tied.len() == 1 {
            return tied[0];
        }
        for &i in &neighbors {
            if tied.contains(&self.y_idx[i]) {
                return self.y_idx[i];
            }
        }
        tied[0]
    }
}

pub(super) fn fit_knn(
    k: usize,
    x: &[Vec<f64>],
    y_idx: &[usize],
    classes: Vec<GrowthLabel>,
    d: usize,
) -> Result<TrainedModel, ModelError> {
    if k == 0 {
        return Err(ModelError::InconsistentInput(alloc::string::String::from(
            "k must be >= 1",
        )));
    }
    Ok(TrainedModel {
        classes,
        n_features: d,
        params: ModelParams::Knn(KnnModel {
            k,
            x: x.to_vec(),
            y_idx: y_idx.to_vec(),
            n_features: d,
        }),
        meta: TrainMeta::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{fit, ClassifierConfig};
    use rand::Rng;

    use GrowthLabel::{Horizontal as H, Mixed as M, Vertical as V};

    #[test]
    fn one_nn_on_training_point_returns_its_own_label() {
        let x = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 0.0]];
        let y = vec![H, M, V];
        let model = fit(&ClassifierConfig::knn(1), &x, &y).unwrap();
        assert_eq!(model.predict(&x).unwrap(), y);
    }

    /// Exhaustive-distance oracle with the same vote-then-nearest tie rule.
    fn knn_oracle(
        train_x: &[Vec<f64>],
        train_y: &[usize],
        query: &[f64],
        k: usize,
        n_classes: usize,
    ) -> usize {
        let mut d: Vec<(f64, usize)> = train_x
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let dist: f64 = p.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
                (dist, i)
            })
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let top: Vec<usize> = d.iter().take(k).map(|&(_, i)| i).collect();
        let mut votes = vec![0usize; n_classes];
        for &i in &top {
            votes[train_y[i]] += 1;
        }
        let max = votes.iter().copied().max().unwrap();
        let tied: Vec<usize> = (0..n_classes).filter(|&c| votes[c] == max).collect();
        if tied.len() == 1 {
            tied[0]
        } else {
            top.iter()
                .map(|&i| train_y[i])
                .find(|c| tied.contains(c))
                .unwrap()
        }
    }

    #[test]
    fn predictions_match_brute_force_oracle() {
        let mut rng = crate::rng::stream(91, &[0]);
        let train_x: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let labels = [H, M, V];
        let train_y: Vec<GrowthLabel> = (0..60).map(|_| labels[rng.gen_range(0..3)]).collect();
        let queries: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        for k in [3usize, 5] {
            let model = fit(&ClassifierConfig::knn(k), &train_x, &train_y).unwrap();
            let pred = model.predict(&queries).unwrap();
            let y_idx: Vec<usize> = train_y
                .iter()
                .map(|l| [H, M, V].iter().position(|c| c == l).unwrap())
                .collect();
            for (q, p) in queries.iter().zip(&pred) {
                let want = [H, M, V][knn_oracle(&train_x, &y_idx, q, k, 3)];
                assert_eq!(*p, want);
            }
        }
    }

    #[test]
    fn proba_is_vote_fraction() {
        let x = vec![vec![0.0], vec![0.1], vec![0.2], vec![5.0]];
        let y = vec![H, H, V, V];
        let model = fit(&ClassifierConfig::knn(3), &x, &y).unwrap();
        let proba = model.predict_proba(&[vec![0.05]]).unwrap();
        assert!((proba[0][0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((proba[0][1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tie_goes_to_nearest_neighbor_class() {
        // k = 2 with one vote each: nearest wins
        let x = vec![vec![0.0], vec![1.0]];
        let y = vec![V, H];
        let model = fit(&ClassifierConfig::knn(2), &x, &y).unwrap();
        let pred = model.predict(&[vec![0.1], vec![0.9]]).unwrap();
        assert_eq!(pred, vec![V, H]);
    }
}
