use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LearnError, Payload, TrainedModel};
use crate::rng::{domain, SeedStream};
use crate::Label;

/// Internal split: rows with `z[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub left: u32,
    pub right: u32,
}

/// One tree node. `counts` are the bootstrap class counts `[TEXT, IMAGE]`
/// that reached it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub counts: [u32; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub n_trees: usize,
    pub max_features: usize,
    pub seed: u64,
    pub dim: usize,
    pub trees: Vec<Tree>,
}

fn gini(counts: [u32; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p = counts[0] as f64 / n;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

/// `n · gini` without the division, for comparing candidate splits.
fn weighted_gini(counts: [u32; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let (a, b) = (counts[0] as f64, counts[1] as f64);
    n - (a * a + b * b) / n
}

fn class_of(l: Label) -> usize {
    if l.is_positive() {
        0
    } else {
        1
    }
}

struct Best {
    decrease: f64,
    feature: usize,
    threshold: f64,
}

impl Best {
    fn beats(&self, other: &Option<Best>) -> bool {
        match other {
            None => true,
            Some(o) => {
                self.decrease > o.decrease
                    || (self.decrease == o.decrease
                        && (self.feature, self.threshold).partial_cmp(&(o.feature, o.threshold))
                            == Some(std::cmp::Ordering::Less))
            }
        }
    }
}

/// Best midpoint split of `samples` on one feature, or `None` if the
/// feature is constant there.
fn best_on_feature(rows: &[Vec<f64>], cls: &[usize], samples: &[usize], feature: usize, parent: [u32; 2]) -> Option<Best> {
    let mut sorted: Vec<usize> = samples.to_vec();
    sorted.sort_by(|&a, &b| rows[a][feature].total_cmp(&rows[b][feature]));
    let parent_w = weighted_gini(parent);
    let mut left = [0u32; 2];
    let mut best: Option<Best> = None;
    for w in 0..sorted.len() - 1 {
        left[cls[sorted[w]]] += 1;
        let lo = rows[sorted[w]][feature];
        let hi = rows[sorted[w + 1]][feature];
        if lo == hi {
            continue;
        }
        let mut threshold = lo + (hi - lo) / 2.0;
        if threshold >= hi {
            threshold = lo;
        }
        let right = [parent[0] - left[0], parent[1] - left[1]];
        let cand = Best { decrease: parent_w - weighted_gini(left) - weighted_gini(right), feature, threshold };
        if cand.beats(&best) {
            best = Some(cand);
        }
    }
    best
}

fn grow_tree(rows: &[Vec<f64>], cls: &[usize], max_features: usize, rng: &mut SeedStream) -> Tree {
    let n = rows.len();
    let dim = rows[0].len();
    let boot: Vec<usize> = (0..n).map(|_| rng.index(n)).collect();
    let mut nodes = Vec::new();
    let mut stack = vec![(0usize, boot)];
    nodes.push(Node { counts: [0, 0], split: None });
    while let Some((id, samples)) = stack.pop() {
        let mut counts = [0u32; 2];
        for &s in &samples {
            counts[cls[s]] += 1;
        }
        nodes[id].counts = counts;
        if counts[0] == 0 || counts[1] == 0 {
            continue;
        }
        // Draw features until `max_features` are examined and at least one
        // of them admits a split.
        let order = rng.sample_without_replacement(dim, dim);
        let mut best: Option<Best> = None;
        for (seen, &f) in order.iter().enumerate() {
            if seen >= max_features && best.is_some() {
                break;
            }
            if let Some(b) = best_on_feature(rows, cls, &samples, f, counts) {
                if b.beats(&best) {
                    best = Some(b);
                }
            }
        }
        let Some(best) = best else { continue };
        let (l, r): (Vec<usize>, Vec<usize>) =
            samples.iter().partition(|&&s| rows[s][best.feature] <= best.threshold);
        let left = nodes.len();
        nodes.push(Node { counts: [0, 0], split: None });
        nodes.push(Node { counts: [0, 0], split: None });
        nodes[id].split = Some(Split {
            feature: best.feature,
            threshold: best.threshold,
            left: left as u32,
            right: left as u32 + 1,
        });
        stack.push((left + 1, r));
        stack.push((left, l));
    }
    Tree { nodes }
}

impl Tree {
    pub fn leaf(&self, z: &[f64]) -> &Node {
        let mut node = &self.nodes[0];
        while let Some(s) = &node.split {
            node = &self.nodes[if z[s.feature] <= s.threshold { s.left } else { s.right } as usize];
        }
        node
    }

    /// Unnormalized impurity decrease per feature.
    fn decreases(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for node in &self.nodes {
            if let Some(s) = &node.split {
                let l = self.nodes[s.left as usize].counts;
                let r = self.nodes[s.right as usize].counts;
                let n = |c: [u32; 2]| (c[0] + c[1]) as f64;
                out[s.feature] += n(node.counts) * gini(node.counts) - n(l) * gini(l) - n(r) * gini(r);
            }
        }
        out
    }
}

impl Forest {
    /// Tree `t` draws from its own stream `(seed, FOREST_TREE, t)`, so the
    /// forest does not depend on thread scheduling.
    pub fn fit(
        rows: &[Vec<f64>],
        labels: &[Label],
        n_trees: usize,
        max_features: usize,
        seed: u64,
    ) -> Result<Self, LearnError> {
        let dim = rows[0].len();
        if n_trees == 0 {
            return Err(LearnError::InvalidParam("n_trees must be at least 1".into()));
        }
        if max_features == 0 || max_features > dim {
            return Err(LearnError::InvalidParam(format!("max_features must be in 1..={dim}, got {max_features}")));
        }
        let cls: Vec<usize> = labels.iter().map(|&l| class_of(l)).collect();
        let trees = (0..n_trees)
            .into_par_iter()
            .map(|t| grow_tree(rows, &cls, max_features, &mut SeedStream::new(seed, domain::FOREST_TREE, t as u64)))
            .collect();
        Ok(Self { n_trees, max_features, seed, dim, trees })
    }

    /// Mean over trees of the TEXT frequency in the reached leaf.
    pub fn probability(&self, z: &[f64]) -> f64 {
        let sum: f64 = self
            .trees
            .iter()
            .map(|t| {
                let c = t.leaf(z).counts;
                c[0] as f64 / (c[0] + c[1]) as f64
            })
            .sum();
        sum / self.trees.len() as f64
    }
}

/// Mean decrease in Gini impurity per feature: each tree's decreases are
/// normalized to sum 1, averaged over trees and renormalized. A forest
/// without any split returns uniform importances.
pub fn gini_importance(model: &TrainedModel) -> Result<Vec<f64>, LearnError> {
    let Payload::RandomForest(forest) = &model.payload else {
        return Err(LearnError::WrongFamily { expected: "RANDOM_FOREST", found: model.family() });
    };
    let dim = forest.dim;
    let mut total = vec![0.0; dim];
    for tree in &forest.trees {
        let d = tree.decreases(dim);
        let s: f64 = d.iter().sum();
        if s > 0.0 {
            for (t, v) in total.iter_mut().zip(&d) {
                *t += v / s;
            }
        }
    }
    let s: f64 = total.iter().sum();
    if s > 0.0 {
        total.iter_mut().for_each(|v| *v /= s);
    } else {
        total = vec![1.0 / dim as f64; dim];
    }
    Ok(total)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::{train_knn, train_random_forest};
    use Label::{Image, Text};

    fn noisy(seed: u64, n: usize) -> (Vec<Vec<f64>>, Vec<Label>) {
        let mut rng = SeedStream::new(seed, domain::TEST_DATA, 0);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let l = if i % 2 == 0 { Text } else { Image };
            let mut r: Vec<f64> = (0..4).map(|_| rng.uniform()).collect();
            r[0] = if l == Text { 1.0 + rng.uniform() } else { -rng.uniform() };
            rows.push(r);
            labels.push(l);
        }
        (rows, labels)
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini([5, 0]), 0.0);
        assert_eq!(gini([2, 2]), 0.5);
        assert!((weighted_gini([1, 3]) - 4.0 * gini([1, 3])).abs() < 1e-12);
    }

    #[test]
    fn single_class_is_certain() {
        let rows = vec![vec![0.0, 1.0], vec![1.0, 2.0], vec![3.0, 0.0]];
        let m = train_random_forest(&rows, &[Text; 3], 10, 2, 0).unwrap();
        assert_eq!(m.classify(&[9.0, -9.0]).unwrap(), (Text, 1.0));
        let imp = gini_importance(&m).unwrap();
        assert_eq!(imp, vec![0.5, 0.5]);
    }

    #[test]
    fn informative_feature_dominates() {
        let (rows, labels) = noisy(1, 100);
        let m = train_random_forest(&rows, &labels, 50, 2, 3).unwrap();
        for (r, l) in rows.iter().zip(&labels) {
            assert_eq!(m.predict(r).unwrap(), *l);
        }
        let imp = gini_importance(&m).unwrap();
        assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(imp.iter().all(|&v| v >= 0.0));
        assert!(imp[1..].iter().all(|&v| v < imp[0]), "{imp:?}");
    }

    #[test]
    fn leaves_are_pure_or_unsplittable() {
        let (rows, labels) = noisy(2, 40);
        let cls: Vec<usize> = labels.iter().map(|&l| class_of(l)).collect();
        let t = grow_tree(&rows, &cls, 2, &mut SeedStream::new(0, domain::FOREST_TREE, 0));
        let n = t.nodes[0].counts[0] + t.nodes[0].counts[1];
        assert_eq!(n, 40);
        for node in &t.nodes {
            if let Some(s) = &node.split {
                let (l, r) = (&t.nodes[s.left as usize], &t.nodes[s.right as usize]);
                assert_eq!([l.counts[0] + r.counts[0], l.counts[1] + r.counts[1]], node.counts);
            } else {
                assert!(node.counts.contains(&0));
            }
        }
    }

    #[test]
    fn wrong_family() {
        let m = train_knn(&[vec![0.0]], &[Text], 1).unwrap();
        assert!(matches!(gini_importance(&m), Err(LearnError::WrongFamily { .. })));
    }

    #[test]
    fn invalid_params() {
        let (rows, labels) = noisy(0, 10);
        assert!(train_random_forest(&rows, &labels, 0, 2, 0).is_err());
        assert!(train_random_forest(&rows, &labels, 5, 5, 0).is_err());
    }
}
