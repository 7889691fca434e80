//! Versioned JSON persistence for trained models: kind, shapes, flat
//! parameter arrays, and the class list.

use std::path::Path;

use cephalo_core::features::GrowthLabel;
use cephalo_core::models::{
    ForestModel, KnnModel, LogregModel, MlpModel, ModelParams, TrainMeta, TrainedModel,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::report::SCHEMA_VERSION;

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    schema: u32,
    kind: String,
    classes: Vec<String>,
    n_features: usize,
    params: ParamsDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "kebab-case")]
enum ParamsDoc {
    Mlp {
        /// Layer widths from input to output.
        dims: Vec<usize>,
        /// Row-major weight matrices, one flat array per layer.
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    },
    Logreg {
        weights: Vec<f64>,
        biases: Vec<f64>,
    },
    Knn {
        k: usize,
        points: Vec<Vec<f64>>,
        labels: Vec<usize>,
    },
    Tree {
        nodes: Vec<NodeDoc>,
    },
    Forest {
        trees: Vec<Vec<NodeDoc>>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "kebab-case")]
enum NodeDoc {
    Leaf { probs: Vec<f64> },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

fn tree_to_doc(tree: &cephalo_core::models::TreeModel) -> Vec<NodeDoc> {
    use cephalo_core::models::TreeNode;
    tree.nodes
        .iter()
        .map(|n| match n {
            TreeNode::Leaf { probs } => NodeDoc::Leaf {
                probs: probs.clone(),
            },
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => NodeDoc::Split {
                feature: *feature,
                threshold: *threshold,
                left: *left,
                right: *right,
            },
        })
        .collect()
}

fn tree_from_doc(
    nodes: Vec<NodeDoc>,
    n_features: usize,
    n_classes: usize,
) -> cephalo_core::models::TreeModel {
    use cephalo_core::models::TreeNode;
    cephalo_core::models::TreeModel {
        nodes: nodes
            .into_iter()
            .map(|n| match n {
                NodeDoc::Leaf { probs } => TreeNode::Leaf { probs },
                NodeDoc::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                },
            })
            .collect(),
        n_features,
        n_classes,
    }
}

pub fn save_model(path: &Path, model: &TrainedModel) -> Result<(), CliError> {
    let params = match &model.params {
        ModelParams::Mlp(m) => {
            let mut dims = vec![m.n_features];
            dims.extend(m.layers.iter().map(|l| l.fan_out));
            ParamsDoc::Mlp {
                dims,
                weights: m.layers.iter().map(|l| l.weights.clone()).collect(),
                biases: m.layers.iter().map(|l| l.biases.clone()).collect(),
            }
        }
        ModelParams::Logreg(m) => ParamsDoc::Logreg {
            weights: m.weights.clone(),
            biases: m.biases.clone(),
        },
        ModelParams::Knn(m) => ParamsDoc::Knn {
            k: m.k,
            points: m.x.clone(),
            labels: m.y_idx.clone(),
        },
        ModelParams::Tree(t) => ParamsDoc::Tree {
            nodes: tree_to_doc(t),
        },
        ModelParams::Forest(f) => ParamsDoc::Forest {
            trees: f.trees.iter().map(tree_to_doc).collect(),
        },
    };
    let doc = ModelDoc {
        schema: SCHEMA_VERSION,
        kind: match &model.params {
            ModelParams::Mlp(_) => "mlp",
            ModelParams::Logreg(_) => "logreg",
            ModelParams::Knn(_) => "knn",
            ModelParams::Tree(_) => "tree",
            ModelParams::Forest(_) => "forest",
        }
        .to_string(),
        classes: model.classes.iter().map(|c| c.label().to_string()).collect(),
        n_features: model.n_features,
        params,
    };
    crate::report::write_json(path, &doc)
}

pub fn load_model(path: &Path) -> Result<TrainedModel, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path, e.to_string()))?;
    let doc: ModelDoc =
        serde_json::from_str(&text).map_err(|e| CliError::file(path, e.to_string()))?;
    if doc.schema != SCHEMA_VERSION {
        return Err(CliError::file(
            path,
            format!("unsupported model schema {}", doc.schema),
        ));
    }
    let classes: Vec<GrowthLabel> = doc
        .classes
        .iter()
        .map(|c| {
            GrowthLabel::parse(c)
                .ok_or_else(|| CliError::file(path, format!("unknown class label {c:?}")))
        })
        .collect::<Result<_, _>>()?;
    let n_classes = classes.len();
    let params = match doc.params {
        ParamsDoc::Mlp {
            dims,
            weights,
            biases,
        } => {
            if dims.len() < 2 || weights.len() != dims.len() - 1 || biases.len() != weights.len() {
                return Err(CliError::file(path, "inconsistent mlp layer shapes"));
            }
            let layers = dims
                .windows(2)
                .zip(weights.into_iter().zip(biases))
                .map(|(dim, (w, b))| {
                    if w.len() != dim[0] * dim[1] || b.len() != dim[1] {
                        return Err(CliError::file(path, "mlp parameter arrays do not match dims"));
                    }
                    Ok(cephalo_core::models::Layer {
                        weights: w,
                        biases: b,
                        fan_in: dim[0],
                        fan_out: dim[1],
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            ModelParams::Mlp(MlpModel {
                layers,
                n_features: doc.n_features,
            })
        }
        ParamsDoc::Logreg { weights, biases } => {
            if weights.len() != n_classes * doc.n_features || biases.len() != n_classes {
                return Err(CliError::file(path, "logreg parameter arrays do not match shape"));
            }
            ModelParams::Logreg(LogregModel {
                weights,
                biases,
                n_features: doc.n_features,
                n_classes,
            })
        }
        ParamsDoc::Knn { k, points, labels } => ModelParams::Knn(KnnModel {
            k,
            x: points,
            y_idx: labels,
            n_features: doc.n_features,
        }),
        ParamsDoc::Tree { nodes } => {
            ModelParams::Tree(tree_from_doc(nodes, doc.n_features, n_classes))
        }
        ParamsDoc::Forest { trees } => ModelParams::Forest(ForestModel {
            trees: trees
                .into_iter()
                .map(|t| tree_from_doc(t, doc.n_features, n_classes))
                .collect(),
            n_features: doc.n_features,
        }),
    };
    Ok(TrainedModel {
        classes,
        n_features: doc.n_features,
        params,
        meta: TrainMeta::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cephalo_core::models::{fit, ClassifierConfig};
    use GrowthLabel::{Horizontal as H, Mixed as M, Vertical as V};

    fn fixture() -> (Vec<Vec<f64>>, Vec<GrowthLabel>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..30 {
            let v = i as f64 / 5.0;
            x.push(vec![v, (i % 3) as f64]);
            y.push(if v < 2.0 {
                H
            } else if v < 4.0 {
                M
            } else {
                V
            });
        }
        (x, y)
    }

    #[test]
    fn all_kinds_roundtrip_with_identical_predictions() {
        let (x, y) = fixture();
        let dir = tempfile::tempdir().unwrap();
        let configs = [
            ClassifierConfig::mlp(&[6]).with_seed(1),
            ClassifierConfig::logreg(),
            ClassifierConfig::knn(3),
            ClassifierConfig::tree(),
            ClassifierConfig::forest(10).with_seed(2),
        ];
        for config in configs {
            let model = fit(&config, &x, &y).unwrap();
            let path = dir.path().join(format!("{}.json", config.kind.describe()));
            save_model(&path, &model).unwrap();
            let loaded = load_model(&path).unwrap();
            assert_eq!(loaded.classes, model.classes);
            assert_eq!(
                loaded.predict_proba(&x).unwrap(),
                model.predict_proba(&x).unwrap(),
                "{} probabilities changed across save/load",
                config.kind.describe()
            );
            assert_eq!(loaded.predict(&x).unwrap(), model.predict(&x).unwrap());
        }
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        std::fs::write(
            &path,
            r#"{"schema": 99, "kind": "knn", "classes": ["Mixed", "Vertical"], "n_features": 1,
                "params": {"layout": "knn", "k": 1, "points": [[0.0]], "labels": [0]}}"#,
        )
        .unwrap();
        assert!(load_model(&path).is_err());
    }
}
