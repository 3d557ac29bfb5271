use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Row, N_FEATURES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features considered per split, drawn without replacement when below 4.
    pub max_features: usize,
}

/// Rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Binary regression tree stored as a flat node list; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn leaf(value: f64) -> Self {
        Self {
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub fn predict(&self, x: &Row) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Structural checks used after deserializing.
    pub(crate) fn validate(&self) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("tree has no nodes".into());
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match *node {
                Node::Leaf { value } if !value.is_finite() => return Err(format!("node {i}: non-finite leaf")),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if feature >= N_FEATURES {
                        return Err(format!("node {i}: feature index {feature} out of range"));
                    }
                    if !threshold.is_finite() {
                        return Err(format!("node {i}: non-finite threshold"));
                    }
                    // children always follow their parent, which rules out cycles
                    if left <= i || right <= i || left >= self.nodes.len() || right >= self.nodes.len() {
                        return Err(format!("node {i}: bad child index"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Grows a CART tree on `rows`, a multiset of indices into `x`/`y`.
    ///
    /// Splits maximize the squared-error reduction over midpoints between
    /// consecutive distinct feature values. Ties go to the lower feature
    /// index, then the lower threshold. `rng` is consulted only when
    /// `max_features < 4`.
    pub fn fit<R: Rng>(x: &[Row], y: &[f64], rows: Vec<usize>, params: &TreeParams, rng: &mut R) -> Self {
        let mut builder = Builder {
            x,
            y,
            params,
            nodes: Vec::new(),
        };
        builder.grow(rows, 0, rng);
        RegressionTree { nodes: builder.nodes }
    }
}

struct Builder<'a> {
    x: &'a [Row],
    y: &'a [f64],
    params: &'a TreeParams,
    nodes: Vec<Node>,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Builder<'_> {
    fn grow<R: Rng>(&mut self, rows: Vec<usize>, depth: usize, rng: &mut R) -> usize {
        let id = self.nodes.len();
        let first = self.y[rows[0]];
        let pure = rows.iter().all(|&r| self.y[r] == first);
        let mean = if pure {
            first
        } else {
            rows.iter().map(|&r| self.y[r]).sum::<f64>() / rows.len() as f64
        };
        self.nodes.push(Node::Leaf { value: mean });

        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        if pure || !depth_ok || rows.len() < 2 * self.params.min_leaf.max(1) {
            return id;
        }
        let features = self.features(rng);
        let Some(best) = self.best_split(&rows, mean, &features) else {
            return id;
        };
        let (left, right): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| self.x[r][best.feature] <= best.threshold);
        let left = self.grow(left, depth + 1, rng);
        let right = self.grow(right, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn features<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let mut all: Vec<usize> = (0..N_FEATURES).collect();
        let k = self.params.max_features.clamp(1, N_FEATURES);
        if k == N_FEATURES {
            return all;
        }
        for i in 0..k {
            let j = rng.random_range(i..N_FEATURES);
            all.swap(i, j);
        }
        all.truncate(k);
        all.sort_unstable();
        all
    }

    fn best_split(&self, rows: &[usize], mean: f64, features: &[usize]) -> Option<Candidate> {
        let n = rows.len();
        let min_leaf = self.params.min_leaf.max(1);
        let centered: Vec<f64> = rows.iter().map(|&r| self.y[r] - mean).collect();
        let total: f64 = centered.iter().sum();
        let mut best: Option<Candidate> = None;
        let mut order: Vec<usize> = Vec::with_capacity(n);
        for &f in features {
            order.clear();
            order.extend(0..n);
            order.sort_by(|&a, &b| {
                self.x[rows[a]][f]
                    .total_cmp(&self.x[rows[b]][f])
                    .then(rows[a].cmp(&rows[b]))
            });
            let mut left_sum = 0.0;
            for k in 1..n {
                left_sum += centered[order[k - 1]];
                if k < min_leaf || n - k < min_leaf {
                    continue;
                }
                let lo = self.x[rows[order[k - 1]]][f];
                let hi = self.x[rows[order[k]]][f];
                if lo == hi {
                    continue;
                }
                let right_sum = total - left_sum;
                let score = left_sum * left_sum / k as f64 + right_sum * right_sum / (n - k) as f64;
                if best.as_ref().is_none_or(|b| score > b.score) {
                    let mid = (lo + hi) / 2.0;
                    let threshold = if mid.is_finite() && mid < hi { mid } else { lo };
                    best = Some(Candidate {
                        feature: f,
                        threshold,
                        score,
                    });
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const FULL: TreeParams = TreeParams {
        max_depth: None,
        min_leaf: 1,
        max_features: 4,
    };

    fn fit(x: &[Row], y: &[f64], params: &TreeParams) -> RegressionTree {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        RegressionTree::fit(x, y, (0..x.len()).collect(), params, &mut rng)
    }

    #[test]
    fn hand_traced_tree() {
        let x = [
            [0.1, 0.0, 0.0, 0.0],
            [0.2, 0.0, 0.0, 0.0],
            [0.8, 0.0, 0.0, 0.0],
            [0.9, 0.0, 0.0, 1.0],
        ];
        let y = [1.0, 1.0, 5.0, 7.0];
        let tree = fit(&x, &y, &FULL);
        // root: x0 <= 0.5 separates {1,1} from {5,7}; then x0 <= 0.85 on the right
        assert_eq!(
            tree.nodes[0],
            Node::Split {
                feature: 0,
                threshold: 0.5,
                left: 1,
                right: 2
            }
        );
        assert_eq!(tree.nodes[1], Node::Leaf { value: 1.0 });
        assert_eq!(
            tree.nodes[2],
            Node::Split {
                feature: 0,
                threshold: (0.8 + 0.9) / 2.0,
                left: 3,
                right: 4
            }
        );
        assert_eq!(tree.predict(&[0.3, 9.0, 9.0, 9.0]), 1.0);
        assert_eq!(tree.predict(&[0.86, 0.0, 0.0, 0.0]), 7.0);
        let stump = fit(&x, &y, &TreeParams { max_depth: Some(1), ..FULL });
        assert_eq!(stump.predict(&x[3]), 6.0);
        assert_eq!(stump.depth(), 1);
    }

    #[test]
    fn zero_gain_splits_still_separate_impure_nodes() {
        let x = [[0.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0]];
        let y = [0.0, 1.0, 1.0, 0.0];
        let tree = fit(&x, &y, &FULL);
        for (row, target) in x.iter().zip(y) {
            assert_eq!(tree.predict(row), target);
        }
    }

    #[test]
    fn min_leaf_and_constant_targets() {
        let x: Vec<Row> = (0..6).map(|i| [i as f64, 0.0, 0.0, 0.0]).collect();
        let tree = fit(&x, &[2.5; 6], &FULL);
        assert_eq!(tree.nodes, vec![Node::Leaf { value: 2.5 }]);
        let y = [0.0, 0.0, 0.0, 9.0, 9.0, 9.0];
        let tree = fit(&x, &y, &TreeParams { min_leaf: 3, ..FULL });
        assert_eq!(tree.nodes.len(), 3);
        let tree = fit(&x, &y, &TreeParams { min_leaf: 4, ..FULL });
        assert_eq!(tree.nodes.len(), 1);
    }

    #[test]
    fn adjacent_floats_split_correctly() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let x = [[a, 0.0, 0.0, 0.0], [b, 0.0, 0.0, 0.0]];
        let tree = fit(&x, &[0.0, 1.0], &FULL);
        assert_eq!(tree.predict(&x[0]), 0.0);
        assert_eq!(tree.predict(&x[1]), 1.0);
    }

    #[test]
    fn validate_rejects_bad_structures() {
        assert!(RegressionTree { nodes: vec![] }.validate().is_err());
        let bad = RegressionTree {
            nodes: vec![Node::Split {
                feature: 4,
                threshold: 0.0,
                left: 1,
                right: 2,
            }],
        };
        assert!(bad.validate().is_err());
        let cyclic = RegressionTree {
            nodes: vec![
                Node::Split {
                    feature: 0,
                    threshold: 0.0,
                    left: 0,
                    right: 1,
                },
                Node::Leaf { value: 0.0 },
            ],
        };
        assert!(cyclic.validate().is_err());
        assert!(RegressionTree::leaf(1.0).validate().is_ok());
    }
}
